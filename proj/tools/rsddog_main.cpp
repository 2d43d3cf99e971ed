#include "rsddog/pipeline.hpp"

int main(int argc, char** argv) { return rsddog::run_cli(argc, argv); }
