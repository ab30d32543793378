"""Scratch empirics round 2: smaller mu ratios and 1-level frames."""

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

REG = Regularizer()


def main() -> None:
    x = phantom(32)
    cases = [
        ("uniform", build_psf(BlurKind.UNIFORM9, size=3), 50.0),
        ("gaussian", build_psf(BlurKind.GAUSSIAN, size=3, sigma=0.6), 20.0),
        ("invquad", build_psf(BlurKind.INVERSE_QUADRATIC, size=3), 20.0),
    ]
    for levels in (1, 2):
        frame = FrameSpec(levels)
        for name, psf, tau in cases:
            y = degrade(x, psf, 1.0, 7)
            otf = psf_to_otf(psf, y.shape)

            def residual(bands) -> float:
                return subgradient_residual(
                    bands, data_gradient(y, otf, levels, bands), tau)

            print(f"-- {name} tau={tau} levels={levels}", flush=True)
            for ratio in (0.003, 0.01, 0.03, 0.1):
                marks: list[tuple[int, float]] = []

                def watch(state) -> None:
                    if state.k % 1000 == 0 and state.k > 0:
                        marks.append((state.k, residual(state.theta.bands)))

                cfg = SolverConfig(tau=tau, mu=ratio * tau, max_iters=12000,
                                   rel_tol=0.0)
                t0 = time.perf_counter()
                salsa_solve(y, otf, frame, REG, cfg, inspect=watch)
                dt = time.perf_counter() - t0
                curve = " ".join(f"{k // 1000}k:{r / tau:.1e}" for k, r in marks)
                print(f"   salsa mu={ratio:<5g}t ({dt:5.1f}s) {curve}", flush=True)

            if levels == 1:
                for solver, label, budgets in (
                    (ist_solve, "ist", (5000, 10000, 20000)),
                    (fista_solve, "fista", (1000, 2000, 5000)),
                ):
                    rows = []
                    for budget in budgets:
                        cfg = SolverConfig(tau=tau, max_iters=budget, rel_tol=0.0)
                        coeffs, _, trace = solver(y, otf, frame, REG, cfg)
                        rows.append((budget, trace.final.iteration,
                                     residual(coeffs.bands)))
                    curve = " ".join(f"{b}:{r / tau:.1e}({it})"
                                     for b, it, r in rows)
                    print(f"   {label:5s} {curve}", flush=True)


if __name__ == "__main__":
    main()
