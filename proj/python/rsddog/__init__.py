"""RSD-DOG local image descriptor: ridge/valley statistics from rotating half-Gaussian filters."""

from ._rsddog import (
    circular_midpoint,
    curve,
    describe_patch,
    dhsf_stack,
    extract_descriptors,
    extract_peaks,
    ground_truth,
    half_gaussian_kernel,
    harris_detect,
    load_image,
    normalize_patch,
    orientation_field,
    rotate_image,
    save_pgm,
    synth_image,
)

__all__ = [
    "circular_midpoint",
    "curve",
    "describe_patch",
    "dhsf_stack",
    "extract_descriptors",
    "extract_peaks",
    "ground_truth",
    "half_gaussian_kernel",
    "harris_detect",
    "load_image",
    "normalize_patch",
    "orientation_field",
    "rotate_image",
    "save_pgm",
    "synth_image",
]
