"""Overlapping group sparsity (OGS) functional and its MM denoiser.

A group is the ``K x K`` window around a pixel ``(i, j)`` spanning offsets
``-K_l .. K_r`` on both axes, with ``K_l = (K-1)//2`` and ``K_r = K//2``.
Samples outside the image count as zero, and only windows centered inside the
image are groups.  The functional is the sum of the groups' l2 norms::

    phi(v) = sum_{i,j} || v[i-K_l : i+K_r+1, j-K_l : j+K_r+1] ||_2

``mm_denoise`` minimizes ``alpha/2 ||v - v0||^2 + phi(v)`` by
majorization-minimization with a diagonal quadratic majorizer.
"""

from dataclasses import dataclass

import numpy as np

# Group energies below this are clamped before the inverse square root.
DEFAULT_ENERGY_FLOOR = 1e-15


@dataclass(frozen=True)
class GroupConfig:
    """Group edge length ``K``; the half-widths are derived, never set."""

    K: int = 3

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"group size K must be a positive integer, got {self.K}")

    @property
    def K_l(self):
        return (self.K - 1) // 2

    @property
    def K_r(self):
        return self.K // 2


@dataclass(frozen=True)
class MMSettings:
    """Inner-loop controls for :func:`mm_denoise`.

    ``max_iterations`` is the maximum inner iteration count (``NIt``) and
    ``tolerance`` the relative-change threshold.  The defaults match the
    experiments' ``NIt = 5``; with that cap the tolerance rarely binds.
    """

    max_iterations: int = 5
    tolerance: float = 1e-3
    energy_floor: float = DEFAULT_ENERGY_FLOOR

    def __post_init__(self):
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.energy_floor > 0:
            raise ValueError("energy_floor must be positive")


def _window_sum(x, lo, hi):
    """Zero-padded box sum: ``out[p] = sum_{a,b in [lo, hi]} x[p + (a, b)]``."""
    h, w = x.shape
    pad_lo, pad_hi = max(-lo, 0), max(hi, 0)
    xp = np.pad(x, ((pad_lo, pad_hi), (pad_lo, pad_hi)))
    out = np.zeros_like(x)
    for a in range(lo, hi + 1):
        r0 = pad_lo + a
        rows = xp[r0:r0 + h]
        for b in range(lo, hi + 1):
            c0 = pad_lo + b
            out += rows[:, c0:c0 + w]
    return out


def group_energy(v, cfg):
    """Squared l2 norm of the group centered at each pixel."""
    v = np.asarray(v, dtype=np.float64)
    return _window_sum(v * v, -cfg.K_l, cfg.K_r)


def group_norm_sum(v, cfg):
    """The OGS functional ``phi(v)``; with ``K = 1`` it is ``sum |v|``."""
    return float(np.sum(np.sqrt(group_energy(v, cfg))))


def lambda_sq_diagonal(u, cfg, floor=DEFAULT_ENERGY_FLOOR):
    """Diagonal of the squared majorizer weight ``Lambda(u)^2``.

    Entry ``p`` sums ``1/sqrt(e(q))`` over every group ``q`` containing pixel
    ``p``, i.e. over ``q = p - (a, b)`` with ``a, b in [-K_l, K_r]`` and ``q``
    inside the image, where ``e(q)`` is the group energy clamped at ``floor``.
    """
    if not floor > 0:
        raise ValueError("floor must be positive")
    inv = 1.0 / np.sqrt(np.maximum(group_energy(u, cfg), floor))
    # Groups containing p are centered at p - (a, b): the reversed window.
    return _window_sum(inv, -cfg.K_r, cfg.K_l)


def mm_objective(v, v0, alpha, cfg):
    """``alpha/2 ||v - v0||^2 + phi(v)``, the function mm_denoise decreases."""
    d = np.asarray(v) - np.asarray(v0)
    return 0.5 * alpha * float(np.vdot(d, d)) + group_norm_sum(v, cfg)


def mm_denoise(v0, alpha, cfg, settings=MMSettings(), callback=None):
    """Approximately solve ``min_v alpha/2 ||v - v0||^2 + phi(v)``.

    Starting from ``v = v0``, iterate the componentwise update
    ``v <- v0 / (1 + Lambda(v)^2 / alpha)`` until the relative change drops
    below ``settings.tolerance`` or ``settings.max_iterations`` updates have
    been made.

    Parameters
    ----------
    v0 : ndarray
        Point to denoise.
    alpha : float
        Positive weight of the quadratic term.
    cfg : GroupConfig
    settings : MMSettings
    callback : callable, optional
        Called as ``callback(k, v)`` after the ``k``-th update.

    Returns
    -------
    ndarray
        The last iterate.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    v0 = np.asarray(v0, dtype=np.float64)
    v = v0
    v_norm = np.linalg.norm(v)
    for k in range(1, settings.max_iterations + 1):
        if v_norm == 0.0:
            break
        weight = lambda_sq_diagonal(v, cfg, settings.energy_floor)
        v_new = v0 / (1.0 + weight / alpha)
        change = np.linalg.norm(v_new - v) / v_norm
        v = v_new
        v_norm = np.linalg.norm(v)
        if callback is not None:
            callback(k, v)
        if change < settings.tolerance:
            break
    return v
