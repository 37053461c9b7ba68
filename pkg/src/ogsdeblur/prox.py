"""Elementwise proximal maps: l1 shrinkage and projection onto a box."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoxRange:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"box needs lo < hi, got [{self.lo}, {self.hi}]")


UNIT_BOX = BoxRange()


def shrink(x, threshold):
    """Soft thresholding ``sign(x) * max(|x| - threshold, 0)``."""
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def project_box(x, box=UNIT_BOX):
    return np.clip(np.asarray(x, dtype=np.float64), box.lo, box.hi)
