# Copyright 2026 The nexf Authors.
# SPDX-License-Identifier: Apache-2.0
"""Neural exposure fields at desk scale."""

from ._nexf import (
    Model,
    NexfError,
    capture_ldr,
    mean_well_exposedness,
    mertens_fuse,
    mse_reduction,
    pixel_weight,
    psnr,
    run_cli,
    ssim,
    two_region_hdr,
)

__all__ = [
    "Model",
    "NexfError",
    "capture_ldr",
    "mean_well_exposedness",
    "mertens_fuse",
    "mse_reduction",
    "pixel_weight",
    "psnr",
    "run_cli",
    "ssim",
    "two_region_hdr",
]
