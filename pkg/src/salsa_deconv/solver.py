"""Deconvolution solvers sharing one objective and trace format.

``salsa_solve`` is the split augmented-Lagrangian shrinkage iteration:
an exact DFT-domain quadratic solve alternated with a soft-threshold
step and a multiplier update.  ``ist_solve`` and ``fista_solve`` are the
first-order shrinkage/thresholding baselines.  All three minimize

    0.5 * ||blur(synth(beta)) - y||^2 + tau * ||beta||_1

and report per-iteration progress in a :class:`SolverTrace`.  Objective
(and optional ISNR) evaluation is bookkeeping, not solver work, so it is
excluded from the recorded elapsed seconds; timings therefore compare
algorithms rather than instrumentation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .convolution import adjoint_filter, apply_filter, build_inversion_filter
from .frame import FrameCoeffs, FrameSpec, analysis_bands, synthesis_bands
from .prox import Regularizer, objective, prox

__all__ = [
    "DivergenceError",
    "SolverConfig",
    "SolverState",
    "TraceRecord",
    "SolverTrace",
    "beta_update",
    "salsa_solve",
    "ist_solve",
    "fista_solve",
    "fista_momentum",
]


class DivergenceError(RuntimeError):
    """Raised when an iterate stops being finite."""


@dataclass
class SolverConfig:
    """Shared solver settings.

    ``mu`` is the augmented-Lagrangian penalty; ``None`` resolves to the
    0.1*tau rule of thumb.  Stopping is either on relative objective
    change (``rel_tol``, checked against the previous iteration) or, when
    ``target_objective`` is set, on reaching that objective value; the
    ``max_iters`` cap always applies.
    """

    tau: float
    mu: float | None = None
    max_iters: int = 500
    rel_tol: float = 1e-5
    target_objective: float | None = None
    record_trace: bool = True

    def __post_init__(self) -> None:
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.rel_tol < 0:
            raise ValueError(f"rel_tol must be nonnegative, got {self.rel_tol}")
        if self.mu is not None and self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")

    def resolved_mu(self) -> float:
        mu = 0.1 * self.tau if self.mu is None else self.mu
        if mu <= 0:
            raise ValueError("resolved mu is not positive; pass mu explicitly when tau == 0")
        return mu


@dataclass
class SolverState:
    """SALSA iterates after iteration ``k``: primal pair and multiplier."""

    beta: FrameCoeffs
    theta: FrameCoeffs
    d: FrameCoeffs
    k: int


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    elapsed_s: float
    objective: float
    isnr_db: float | None = None


@dataclass
class SolverTrace:
    records: list[TraceRecord] = field(default_factory=list)

    @property
    def objectives(self) -> list[float]:
        return [r.objective for r in self.records]

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]


class _Run:
    """Trace/stopping bookkeeping shared by the three solvers."""

    def __init__(self, cfg: SolverConfig, isnr_fn):
        self.cfg = cfg
        self.isnr_fn = isnr_fn
        self.trace = SolverTrace()
        self.work_seconds = 0.0
        self.prev_objective: float | None = None
        self._t0 = 0.0

    def start_work(self) -> None:
        self._t0 = time.perf_counter()

    def stop_work(self) -> None:
        self.work_seconds += time.perf_counter() - self._t0

    def check_finite(self, bands: np.ndarray, k: int) -> None:
        if not np.all(np.isfinite(bands)):
            raise DivergenceError(f"non-finite coefficients at iteration {k}")

    def observe(self, k: int, f: float, image: np.ndarray | None) -> bool:
        """Record iteration ``k`` and return True when the run should stop."""
        if not math.isfinite(f):
            raise DivergenceError(f"non-finite objective at iteration {k}")
        if self.cfg.record_trace:
            isnr = None
            if self.isnr_fn is not None and image is not None:
                isnr = self.isnr_fn(image)
            self.trace.records.append(TraceRecord(k, self.work_seconds, f, isnr))
        stop = False
        if self.cfg.target_objective is not None:
            stop = f <= self.cfg.target_objective
        elif self.prev_objective is not None:
            change = abs(f - self.prev_objective)
            if self.prev_objective > 0:
                stop = change <= self.cfg.rel_tol * self.prev_objective
            else:
                stop = change == 0.0
        self.prev_objective = f
        return stop


def beta_update(r: FrameCoeffs, inv_filter: np.ndarray, frame: FrameSpec,
                mu: float) -> FrameCoeffs:
    """Exact minimizer of the quadratic subproblem via the Woodbury identity.

    Solves ``(Wt Ht H W + mu I) beta = r`` for the Parseval frame W and
    circular blur H, as ``(1/mu) * (r - Wt F W r)`` where F is the
    DFT-domain inversion filter from :func:`build_inversion_filter`.
    """
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if r.levels != frame.levels or r.bands.shape[0] != frame.n_subbands:
        raise ValueError(
            f"coefficient layout {r.bands.shape} does not match a "
            f"{frame.levels}-level frame"
        )
    filtered = apply_filter(inv_filter, synthesis_bands(r.bands, frame.levels))
    return FrameCoeffs(r.levels, (r.bands - analysis_bands(filtered, frame.levels)) / mu)


def salsa_solve(
    y: np.ndarray,
    otf: np.ndarray,
    frame: FrameSpec,
    reg: Regularizer,
    cfg: SolverConfig,
    isnr_fn: Callable[[np.ndarray], float] | None = None,
    inspect: Callable[[SolverState], None] | None = None,
) -> tuple[FrameCoeffs, np.ndarray, SolverTrace]:
    """Split augmented-Lagrangian shrinkage iteration.

    Precomputes ``ybar = Wt Ht y`` and the inversion filter, then repeats

        beta' = theta + d
        r     = ybar + mu * beta'
        beta  = (1/mu) * (r - Wt F W r)
        theta = soft_threshold(beta - d, tau / mu)
        d     = d - (beta - theta)

    starting from ``theta = beta = Wt y`` and ``d = 0``.  The returned
    solution is ``theta`` (the prox output, exactly sparse) together
    with its synthesis and the per-iteration trace.  ``inspect``, when
    given, is called with the :class:`SolverState` after every
    iteration; the multiplier update is computed literally as
    ``d - (beta - theta)`` so its telescoping is bitwise reproducible.
    """
    levels = frame.levels
    mu = cfg.resolved_mu()
    threshold = cfg.tau / mu
    run = _Run(cfg, isnr_fn)

    run.start_work()
    inv_filter = build_inversion_filter(otf, mu)
    ybar = analysis_bands(adjoint_filter(otf, y), levels)
    theta = analysis_bands(y, levels)
    beta = theta.copy()
    d = np.zeros_like(theta)
    run.stop_work()

    def f_at(bands: np.ndarray) -> float:
        return objective(y, otf, frame, FrameCoeffs(levels, bands), cfg.tau)

    stop = run.observe(0, f_at(theta), synthesis_bands(theta, levels))
    k = 0
    while not stop and k < cfg.max_iters:
        k += 1
        run.start_work()
        r = ybar + mu * (theta + d)
        filtered = apply_filter(inv_filter, synthesis_bands(r, levels))
        beta = (r - analysis_bands(filtered, levels)) / mu
        theta = prox(reg, FrameCoeffs(levels, beta - d), threshold).bands
        d = d - (beta - theta)
        run.stop_work()

        run.check_finite(beta, k)
        image = synthesis_bands(theta, levels)
        stop = run.observe(k, f_at(theta), image)
        if inspect is not None:
            inspect(SolverState(
                beta=FrameCoeffs(levels, beta),
                theta=FrameCoeffs(levels, theta),
                d=FrameCoeffs(levels, d),
                k=k,
            ))

    coeffs = FrameCoeffs(levels, theta)
    return coeffs, synthesis_bands(theta, levels), run.trace


def _default_step(otf: np.ndarray) -> float:
    # 1/L with L = max |d|^2, the Lipschitz bound of the data-term
    # gradient (the frame is Parseval, so ||W|| = 1).
    return 1.0 / float(np.max(np.abs(otf) ** 2))


def ist_solve(
    y: np.ndarray,
    otf: np.ndarray,
    frame: FrameSpec,
    reg: Regularizer,
    cfg: SolverConfig,
    step_size: float | None = None,
    isnr_fn: Callable[[np.ndarray], float] | None = None,
) -> tuple[FrameCoeffs, np.ndarray, SolverTrace]:
    """Iterative shrinkage/thresholding baseline.

    One iteration is a gradient step on the data term followed by the
    soft threshold: ``beta <- soft(beta - s * Wt Ht (H W beta - y),
    tau * s)``.  With the default step ``s = 1 / max|OTF|^2`` the
    objective is nonincreasing.
    """
    levels = frame.levels
    step = _default_step(otf) if step_size is None else step_size
    if step <= 0:
        raise ValueError(f"step_size must be positive, got {step}")
    threshold = cfg.tau * step
    run = _Run(cfg, isnr_fn)

    run.start_work()
    beta = analysis_bands(y, levels)
    run.stop_work()

    def f_at(bands: np.ndarray) -> float:
        return objective(y, otf, frame, FrameCoeffs(levels, bands), cfg.tau)

    stop = run.observe(0, f_at(beta), synthesis_bands(beta, levels))
    k = 0
    while not stop and k < cfg.max_iters:
        k += 1
        run.start_work()
        residual = apply_filter(otf, synthesis_bands(beta, levels)) - y
        grad = analysis_bands(adjoint_filter(otf, residual), levels)
        beta = prox(reg, FrameCoeffs(levels, beta - step * grad), threshold).bands
        run.stop_work()

        run.check_finite(beta, k)
        stop = run.observe(k, f_at(beta), synthesis_bands(beta, levels))

    coeffs = FrameCoeffs(levels, beta)
    return coeffs, synthesis_bands(beta, levels), run.trace


def fista_momentum(t: float) -> float:
    """Momentum recursion t -> (1 + sqrt(1 + 4 t^2)) / 2, starting from t = 1."""
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))


def fista_solve(
    y: np.ndarray,
    otf: np.ndarray,
    frame: FrameSpec,
    reg: Regularizer,
    cfg: SolverConfig,
    step_size: float | None = None,
    isnr_fn: Callable[[np.ndarray], float] | None = None,
) -> tuple[FrameCoeffs, np.ndarray, SolverTrace]:
    """Accelerated shrinkage/thresholding baseline.

    IST step taken at an extrapolated point, with the extrapolation
    weight ``(t_k - 1) / t_{k+1}`` driven by :func:`fista_momentum`.
    Unlike IST the objective need not decrease monotonically.
    """
    levels = frame.levels
    step = _default_step(otf) if step_size is None else step_size
    if step <= 0:
        raise ValueError(f"step_size must be positive, got {step}")
    threshold = cfg.tau * step
    run = _Run(cfg, isnr_fn)

    run.start_work()
    beta = analysis_bands(y, levels)
    z = beta.copy()
    t = 1.0
    run.stop_work()

    def f_at(bands: np.ndarray) -> float:
        return objective(y, otf, frame, FrameCoeffs(levels, bands), cfg.tau)

    stop = run.observe(0, f_at(beta), synthesis_bands(beta, levels))
    k = 0
    while not stop and k < cfg.max_iters:
        k += 1
        run.start_work()
        residual = apply_filter(otf, synthesis_bands(z, levels)) - y
        grad = analysis_bands(adjoint_filter(otf, residual), levels)
        beta_next = prox(reg, FrameCoeffs(levels, z - step * grad), threshold).bands
        t_next = fista_momentum(t)
        z = beta_next + ((t - 1.0) / t_next) * (beta_next - beta)
        beta, t = beta_next, t_next
        run.stop_work()

        run.check_finite(beta, k)
        stop = run.observe(k, f_at(beta), synthesis_bands(beta, levels))

    coeffs = FrameCoeffs(levels, beta)
    return coeffs, synthesis_bands(beta, levels), run.trace
