"""Synthetic degradations: normalized blur kernels, periodic blur, and
seeded salt-and-pepper noise.

Noise draws one uniform number per pixel in row-major order from
``numpy.random.default_rng(seed)`` (PCG64).  A draw ``u < level/2`` makes the
pixel 0, ``level/2 <= u < level`` makes it 1, anything else keeps it.
"""

from dataclasses import dataclass

import numpy as np

from . import spectral
from .grid import as_grid

KERNEL_KINDS = ("gaussian", "average", "delta")


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    size: int = 7
    sigma: float | None = 5.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if self.kind == "delta":
            if self.size != 1:
                raise ValueError("delta kernel has size 1")
            return
        if int(self.size) != self.size or self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be a positive odd integer, got {self.size}")
        if self.kind == "gaussian" and (self.sigma is None or not self.sigma > 0):
            raise ValueError("gaussian kernel needs sigma > 0")

    @classmethod
    def parse(cls, text):
        """Parse ``gaussian:SIZE:SIGMA``, ``average:SIZE`` or ``delta``."""
        parts = text.strip().split(":")
        kind = parts[0].lower()
        try:
            if kind == "gaussian" and len(parts) == 3:
                return cls("gaussian", int(parts[1]), float(parts[2]))
            if kind == "average" and len(parts) == 2:
                return cls("average", int(parts[1]), None)
            if kind == "delta" and len(parts) == 1:
                return cls("delta", 1, None)
        except ValueError as exc:
            raise ValueError(f"bad kernel spec {text!r}: {exc}") from None
        raise ValueError(
            f"bad kernel spec {text!r}; use gaussian:SIZE:SIGMA, average:SIZE or delta"
        )

    def __str__(self):
        if self.kind == "gaussian":
            return f"gaussian:{self.size}:{self.sigma:g}"
        if self.kind == "average":
            return f"average:{self.size}"
        return "delta"


@dataclass(frozen=True)
class NoiseSpec:
    level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"noise level must lie in [0, 1], got {self.level}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")


def make_kernel(spec):
    """Return the normalized spatial kernel for ``spec``."""
    if spec.kind == "delta":
        return np.ones((1, 1))
    if spec.kind == "average":
        return np.full((spec.size, spec.size), 1.0 / spec.size**2)
    r = (spec.size - 1) // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / (2.0 * spec.sigma**2))
    return k / k.sum()


def blur(clean, spec):
    clean = as_grid(clean, "clean")
    op = spectral.build_spectral(make_kernel(spec), *clean.shape)
    return spectral.apply(op, clean)


def noise_mask(shape, noise):
    """Per-pixel code: 0 untouched, 1 pepper (set to 0), 2 salt (set to 1)."""
    u = np.random.default_rng(noise.seed).random(shape)
    half = noise.level / 2.0
    mask = np.zeros(shape, dtype=np.int8)
    mask[u < half] = 1
    mask[(u >= half) & (u < noise.level)] = 2
    return mask


def add_salt_pepper(image, noise):
    image = np.array(image, dtype=np.float64)
    mask = noise_mask(image.shape, noise)
    image[mask == 1] = 0.0
    image[mask == 2] = 1.0
    return image


def degrade(clean, kernel, noise):
    """Blur ``clean`` periodically with ``kernel`` and add salt-and-pepper noise."""
    clean = as_grid(clean, "clean")
    if clean.min() < 0.0 or clean.max() > 1.0:
        raise ValueError("clean image values must lie in [0, 1]")
    return add_salt_pepper(blur(clean, kernel), noise)
