"""Scratch empirics: residual-vs-iteration curves for the 32x32 instances.

Finds, per blur family, the SALSA mu giving the fastest subgradient
certificate and the iteration budgets at which each solver crosses
res <= 1e-3 * tau.
"""

import sys
import time

import numpy as np

sys.path.insert(0, "tests")
from oracles import data_gradient, subgradient_residual  # noqa: E402

from salsa_deconv import (  # noqa: E402
    BlurKind,
    FrameSpec,
    Regularizer,
    SolverConfig,
    build_psf,
    degrade,
    fista_solve,
    ist_solve,
    phantom,
    psf_to_otf,
    salsa_solve,
)

LEVELS = 2
FRAME = FrameSpec(LEVELS)
REG = Regularizer()


def residual(y, otf, tau, bands) -> float:
    return subgradient_residual(bands, data_gradient(y, otf, LEVELS, bands), tau)


def main() -> None:
    x = phantom(32)
    cases = [
        ("uniform", build_psf(BlurKind.UNIFORM9, size=3), 50.0),
        ("gaussian", build_psf(BlurKind.GAUSSIAN, size=3, sigma=0.6), 20.0),
        ("invquad", build_psf(BlurKind.INVERSE_QUADRATIC, size=3), 20.0),
    ]
    for name, psf, tau in cases:
        y = degrade(x, psf, 1.0, 7)
        otf = psf_to_otf(psf, y.shape)
        print(f"-- {name} tau={tau}", flush=True)

        for ratio in (0.1, 0.3, 1.0, 3.0):
            marks: list[tuple[int, float]] = []

            def watch(state) -> None:
                if state.k % 1000 == 0 and state.k > 0:
                    marks.append((state.k, residual(y, otf, tau, state.theta.bands)))

            cfg = SolverConfig(tau=tau, mu=ratio * tau, max_iters=20000, rel_tol=0.0)
            t0 = time.perf_counter()
            salsa_solve(y, otf, FRAME, REG, cfg, inspect=watch)
            dt = time.perf_counter() - t0
            curve = " ".join(f"{k // 1000}k:{r / tau:.1e}" for k, r in marks[::2])
            print(f"   salsa mu={ratio:<4g}t ({dt:5.1f}s) {curve}", flush=True)

        for solver, budgets in (
            (ist_solve, (2000, 5000, 10000, 20000, 30000)),
            (fista_solve, (1000, 2000, 5000, 10000, 15000)),
        ):
            rows = []
            for budget in budgets:
                cfg = SolverConfig(tau=tau, max_iters=budget, rel_tol=0.0)
                t0 = time.perf_counter()
                coeffs, _, trace = solver(y, otf, FRAME, REG, cfg)
                dt = time.perf_counter() - t0
                rows.append((budget, trace.final.iteration,
                             residual(y, otf, tau, coeffs.bands), dt))
            label = "ist" if solver is ist_solve else "fista"
            curve = " ".join(f"{b}:{r / tau:.1e}({it},{dt:.0f}s)"
                             for b, it, r, dt in rows)
            print(f"   {label:5s} {curve}", flush=True)


if __name__ == "__main__":
    main()
