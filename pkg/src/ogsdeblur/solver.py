"""ADMM solver for box-constrained L1-fidelity deblurring with an OGS
anisotropic TV regularizer::

    min_{lo <= f <= hi}  phi(grad_x f) + phi(grad_y f) + mu ||H f - g||_1

The splitting ``v_x = grad_x f``, ``v_y = grad_y f``, ``z = H f - g`` and
``w = f`` gives five subproblems per outer iteration (two MM denoisings, a
shrinkage, a box projection and one FFT solve) followed by multiplier updates
scaled by the relax parameter ``gamma``.  ``gamma = 1`` is classic ADMM.
"""

from dataclasses import dataclass, field, replace
import enum
import math
import time

import numpy as np

from . import spectral
from .grid import as_grid, check_same_shape
from .metrics import psnr
from .ogs import GroupConfig, MMSettings, group_norm_sum, mm_denoise
from .prox import UNIT_BOX, BoxRange, project_box, shrink

GAMMA_MAX = (math.sqrt(5.0) + 1.0) / 2.0


class SolverError(RuntimeError):
    """A non-finite value appeared in an iterate."""

    def __init__(self, step, iteration):
        super().__init__(f"non-finite value in {step} at outer iteration {iteration}")
        self.step = step
        self.iteration = iteration


@dataclass(frozen=True)
class SolverParams:
    mu: float = 80.0
    beta1: float = 1.0
    beta2: float = 500.0
    beta3: float = 1.0
    gamma: float = 1.618
    group: GroupConfig = field(default_factory=GroupConfig)
    inner: MMSettings = field(default_factory=MMSettings)
    tol: float = 1e-5
    max_iters: int = 500
    box: BoxRange = UNIT_BOX

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        for name in ("beta1", "beta2", "beta3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.gamma < GAMMA_MAX:
            raise ValueError(f"gamma must lie in (0, {GAMMA_MAX:.6f}), got {self.gamma}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass
class SolverState:
    f: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    z: np.ndarray
    w: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda3: np.ndarray
    lambda4: np.ndarray
    iteration: int = 0
    objective: float = math.nan

    @classmethod
    def initial(cls, g, box=UNIT_BOX):
        zero = np.zeros_like(g)
        return cls(
            f=g.copy(),
            vx=g.copy(),
            vy=g.copy(),
            z=zero.copy(),
            w=project_box(g, box),
            lambda1=zero.copy(),
            lambda2=zero.copy(),
            lambda3=zero.copy(),
            lambda4=zero.copy(),
        )


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    ITERATION_CAP = "iterationCap"


@dataclass
class SolveReport:
    """Result of :func:`solve`.

    ``objective_trace[k]`` is the objective at ``f^k``; entry 0 belongs to the
    starting point, so the trace has ``iterations + 1`` entries, as do
    ``timestamps`` (seconds since the solve started) and, when a reference
    image was given, ``psnr_trace``.
    """

    restored: np.ndarray
    iterations: int
    objective_trace: list
    timestamps: list
    termination: Termination
    psnr_trace: list | None = None
    state: SolverState | None = None

    @property
    def restored_display(self):
        """``restored`` clipped to the unit box."""
        return np.clip(self.restored, 0.0, 1.0)


def objective(f, g, blur, mu, cfg):
    """``phi(grad_x f) + phi(grad_y f) + mu ||H f - g||_1``."""
    check_same_shape(f, g)
    residual = spectral.apply(blur, f) - g
    return (
        group_norm_sum(spectral.grad_x(f), cfg)
        + group_norm_sum(spectral.grad_y(f), cfg)
        + mu * float(np.abs(residual).sum())
    )


def _finite(step, k, *arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise SolverError(step, k)


def solve(g, blur, params=SolverParams(), reference=None, callback=None):
    """Restore ``g`` degraded by ``blur`` and impulse noise.

    Parameters
    ----------
    g : ndarray
        Observed image.
    blur : SpectralOperator
        Blur operator, same shape as ``g``.
    params : SolverParams
    reference : ndarray, optional
        Clean image; when given, PSNR is tracked per iteration.
    callback : callable, optional
        Called as ``callback(state)`` after every outer iteration.

    Returns
    -------
    SolveReport
        ``restored`` is the final ``f`` iterate (not ``w``).
    """
    g = as_grid(g, "g")
    if g.shape != blur.shape:
        raise ValueError(f"image {g.shape} does not match blur operator {blur.shape}")
    if reference is not None:
        check_same_shape(reference, g)

    p = params
    b1, b2, b3, gam = p.beta1, p.beta2, p.beta3, p.gamma
    denom = spectral.normal_matrix_eigenvalues(blur, b1, b2, b3)
    # beta2 H^T g is constant across iterations.
    htg = b2 * spectral.apply_adjoint(blur, g)

    st = SolverState.initial(g, p.box)
    t0 = time.perf_counter()
    st.objective = objective(st.f, g, blur, p.mu, p.group)
    trace = [st.objective]
    stamps = [0.0]
    psnrs = [psnr(st.f, reference)] if reference is not None else None
    termination = Termination.ITERATION_CAP
    hf = spectral.apply(blur, st.f)

    for k in range(1, p.max_iters + 1):
        gx, gy = spectral.grad_x(st.f), spectral.grad_y(st.f)
        st.vx = mm_denoise(gx + st.lambda1 / b1, b1, p.group, p.inner)
        st.vy = mm_denoise(gy + st.lambda2 / b1, b1, p.group, p.inner)
        _finite("v-subproblem", k, st.vx, st.vy)

        st.z = shrink(hf - g + st.lambda3 / b2, p.mu / b2)
        _finite("z-subproblem", k, st.z)

        st.w = project_box(st.f + st.lambda4 / b3, p.box)
        _finite("w-subproblem", k, st.w)

        rhs = (
            spectral.grad_x_adjoint(b1 * st.vx - st.lambda1)
            + spectral.grad_y_adjoint(b1 * st.vy - st.lambda2)
            + spectral.apply_adjoint(blur, b2 * st.z - st.lambda3)
            + htg
            + b3 * st.w
            - st.lambda4
        )
        st.f = spectral.solve_f_subproblem(rhs, blur, b1, b2, b3, denominator=denom)
        _finite("f-subproblem", k, st.f)

        gx, gy = spectral.grad_x(st.f), spectral.grad_y(st.f)
        hf = spectral.apply(blur, st.f)
        st.lambda1 = st.lambda1 - gam * b1 * (st.vx - gx)
        st.lambda2 = st.lambda2 - gam * b1 * (st.vy - gy)
        st.lambda3 = st.lambda3 - gam * b2 * (st.z - (hf - g))
        st.lambda4 = st.lambda4 - gam * b3 * (st.w - st.f)
        _finite("multiplier update", k, st.lambda1, st.lambda2, st.lambda3, st.lambda4)

        prev = st.objective
        st.objective = (
            group_norm_sum(gx, p.group)
            + group_norm_sum(gy, p.group)
            + p.mu * float(np.abs(hf - g).sum())
        )
        if not math.isfinite(st.objective):
            raise SolverError("objective", k)
        st.iteration = k
        trace.append(st.objective)
        stamps.append(time.perf_counter() - t0)
        if psnrs is not None:
            psnrs.append(psnr(st.f, reference))
        if callback is not None:
            callback(st)

        if prev != 0.0 and abs(st.objective - prev) / abs(prev) < p.tol:
            termination = Termination.CONVERGED
            break
        if prev == 0.0 and st.objective == 0.0:
            termination = Termination.CONVERGED
            break

    return SolveReport(
        restored=st.f,
        iterations=st.iteration,
        objective_trace=trace,
        timestamps=stamps,
        termination=termination,
        psnr_trace=psnrs,
        state=st,
    )


def solve_classic(g, blur, params=SolverParams(), **kwargs):
    """:func:`solve` with the multiplier step fixed at ``gamma = 1``."""
    return solve(g, blur, params.with_(gamma=1.0), **kwargs)
