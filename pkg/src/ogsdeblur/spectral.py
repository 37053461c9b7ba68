"""Periodic convolution operators diagonalized by the 2D DFT.

Under periodic boundary conditions the blur ``H`` and the forward differences
``grad_x``, ``grad_y`` are block-circulant with circulant blocks, so each is
represented by one grid of eigenvalues.  Forward FFTs are unnormalized and
inverse FFTs carry the ``1/(height*width)`` factor (numpy's default pair).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import DimensionError, as_grid

# Imaginary residue tolerated after an inverse transform, relative to the
# largest real magnitude.
IMAG_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    """Frequency-domain eigenvalues of one periodic convolution.

    Attributes
    ----------
    eigenvalues : complex ndarray, shape (height, width)
    kernel : real ndarray
        The spatial kernel the operator was built from.
    center : tuple of int
        Zero-based index of the kernel entry mapped to pixel (0, 0).
    """

    eigenvalues: np.ndarray
    kernel: np.ndarray
    center: tuple

    @property
    def shape(self):
        return self.eigenvalues.shape


def default_center(kernel_shape):
    """Zero-based center ``(ceil(kh/2) - 1, ceil(kw/2) - 1)``.

    For odd sizes this is the middle entry; for even sizes it is the entry
    just before the midpoint.
    """
    return tuple((s + 1) // 2 - 1 for s in kernel_shape)


def build_spectral(kernel, height, width, center=None):
    """Build the eigenvalue grid of periodic convolution with ``kernel``.

    The kernel is zero-embedded into a ``height x width`` array and circularly
    shifted so that ``kernel[center]`` lands at index ``(0, 0)``; the
    eigenvalues are the 2D DFT of that array.
    """
    kernel = np.array(kernel, dtype=np.float64)
    if kernel.ndim == 1:
        kernel = kernel[:, None]
    if kernel.ndim != 2:
        raise ValueError("kernel must be 2D")
    kh, kw = kernel.shape
    if kh > height or kw > width:
        raise ValueError(f"kernel {kernel.shape} is larger than the image ({height}, {width})")
    if center is None:
        center = default_center(kernel.shape)
    center = tuple(int(c) for c in center)
    if not (0 <= center[0] < kh and 0 <= center[1] < kw):
        raise ValueError(f"center {center} lies outside the kernel {kernel.shape}")

    padded = np.zeros((height, width))
    padded[:kh, :kw] = kernel
    padded = np.roll(padded, (-center[0], -center[1]), axis=(0, 1))
    eig = np.fft.fft2(padded)
    eig.flags.writeable = False
    kernel.flags.writeable = False
    return SpectralOperator(eig, kernel, center)


def _real(z):
    re = z.real
    scale = np.max(np.abs(re)) if re.size else 0.0
    residue = np.max(np.abs(z.imag)) if z.size else 0.0
    if residue > IMAG_RTOL * max(scale, np.finfo(float).tiny):
        raise ValueError(
            f"inverse transform left an imaginary residue of {residue:.3e}; "
            "operator applied to incompatible data"
        )
    return np.ascontiguousarray(re)


def _check_dims(op, x):
    if np.shape(x) != op.shape:
        raise DimensionError(f"grid shape {np.shape(x)} does not match operator {op.shape}")


def apply(op, x):
    """Periodic convolution ``IDFT(eig * DFT(x))``."""
    _check_dims(op, x)
    return _real(np.fft.ifft2(op.eigenvalues * np.fft.fft2(x)))


def apply_adjoint(op, x):
    """Adjoint (correlation) ``IDFT(conj(eig) * DFT(x))``."""
    _check_dims(op, x)
    return _real(np.fft.ifft2(np.conj(op.eigenvalues) * np.fft.fft2(x)))


def identity(height, width):
    return build_spectral(np.ones((1, 1)), height, width)


# Forward differences with wraparound:
#   (grad_x f)[i, j] = f[i+1, j] - f[i, j],  (grad_y f)[i, j] = f[i, j+1] - f[i, j].
# As convolution kernels: weight -1 at offset 0 and +1 at offset -1.
DIFF_KERNEL_X = np.array([[1.0], [-1.0]])
DIFF_KERNEL_Y = np.array([[1.0, -1.0]])


@lru_cache(maxsize=16)
def gradient_operators(height, width):
    """Spectral forms of ``grad_x`` and ``grad_y`` for one image size."""
    gx = build_spectral(DIFF_KERNEL_X, height, width, center=(1, 0))
    gy = build_spectral(DIFF_KERNEL_Y, height, width, center=(0, 1))
    return gx, gy


def grad_x(f):
    f = np.asarray(f, dtype=np.float64)
    return np.roll(f, -1, axis=0) - f


def grad_y(f):
    f = np.asarray(f, dtype=np.float64)
    return np.roll(f, -1, axis=1) - f


def grad_x_adjoint(p):
    """``grad_x^T p``: backward difference ``p[i-1, j] - p[i, j]``."""
    p = np.asarray(p, dtype=np.float64)
    return np.roll(p, 1, axis=0) - p


def grad_y_adjoint(p):
    p = np.asarray(p, dtype=np.float64)
    return np.roll(p, 1, axis=1) - p


def normal_matrix_eigenvalues(blur, beta1, beta2, beta3):
    """Eigenvalues of ``beta1 (Dx^T Dx + Dy^T Dy) + beta2 H^T H + beta3 I``."""
    for name, b in (("beta1", beta1), ("beta2", beta2), ("beta3", beta3)):
        if not b > 0:
            raise ValueError(f"{name} must be strictly positive, got {b}")
    gx, gy = gradient_operators(*blur.shape)
    return (
        beta1 * (np.abs(gx.eigenvalues) ** 2 + np.abs(gy.eigenvalues) ** 2)
        + beta2 * np.abs(blur.eigenvalues) ** 2
        + beta3
    )


def solve_f_subproblem(rhs, blur, beta1, beta2, beta3, denominator=None):
    """Solve the f-update normal equation exactly by one FFT division.

    Parameters
    ----------
    rhs : ndarray
        Right-hand side, same shape as the blur operator.
    blur : SpectralOperator
    beta1, beta2, beta3 : float
        Strictly positive penalties.
    denominator : ndarray, optional
        Precomputed :func:`normal_matrix_eigenvalues` for these arguments;
        the solver passes it to avoid recomputing it every iteration.
    """
    rhs = as_grid(rhs, "rhs")
    _check_dims(blur, rhs)
    if denominator is None:
        denominator = normal_matrix_eigenvalues(blur, beta1, beta2, beta3)
    return _real(np.fft.ifft2(np.fft.fft2(rhs) / denominator))
