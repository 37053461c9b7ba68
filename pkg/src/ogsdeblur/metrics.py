"""Restoration quality: PSNR in decibels and relative l2 error."""

from dataclasses import dataclass
import math

import numpy as np

from .grid import check_same_shape


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    relative_error: float
    max_intensity: float = 1.0


def psnr(restored, reference, max_intensity=1.0):
    """``10 log10(N * max_intensity^2 / ||restored - reference||^2)``.

    Returns ``math.inf`` when the two images are identical.
    """
    check_same_shape(restored, reference)
    if not max_intensity > 0:
        raise ValueError("max_intensity must be positive")
    diff = np.asarray(restored, dtype=np.float64) - np.asarray(reference, dtype=np.float64)
    err = float(np.vdot(diff, diff))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(diff.size * max_intensity**2 / err)


def relative_error(restored, reference):
    check_same_shape(restored, reference)
    reference = np.asarray(reference, dtype=np.float64)
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0.0:
        raise ValueError("relative error is undefined for an all-zero reference")
    return float(np.linalg.norm(np.asarray(restored, dtype=np.float64) - reference) / ref_norm)


def quality(restored, reference, max_intensity=1.0):
    return QualityReport(
        psnr(restored, reference, max_intensity),
        relative_error(restored, reference),
        max_intensity,
    )
