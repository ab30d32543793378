"""Scratch empirics for the acceptance thresholds (not shipped API).

Part 1: candidate 32x32 consensus instances (one per blur family).
Part 2: per-experiment SALSA behaviour vs rel_tol at 256x256.
Part 3: experiment-1 three-solver time-to-common-target runs.
"""

import sys
import time
from dataclasses import replace

import numpy as np

sys.path.insert(0, "tests")
from oracles import data_gradient, subgradient_residual  # noqa: E402

from salsa_deconv import (  # noqa: E402
    DEFAULT_EXPERIMENTS,
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
    run_experiment,
    salsa_solve,
)


def part1() -> None:
    print("== part 1: 32x32 consensus candidates ==", flush=True)
    x = phantom(32)
    cases = [
        ("uniform", build_psf(BlurKind.UNIFORM9, size=3), 50.0),
        ("gaussian", build_psf(BlurKind.GAUSSIAN, size=3, sigma=0.6), 20.0),
        ("invquad", build_psf(BlurKind.INVERSE_QUADRATIC, size=3), 20.0),
    ]
    levels = 2
    frame = FrameSpec(levels)
    reg = Regularizer()
    for name, psf, tau in cases:
        y = degrade(x, psf, 1.0, 7)
        otf = psf_to_otf(psf, y.shape)
        print(f"-- {name}: tau={tau} min|otf|^2={np.min(np.abs(otf))**2:.3e}",
              flush=True)
        runs = {
            "salsa": (salsa_solve, SolverConfig(tau=tau, max_iters=12000, rel_tol=0.0)),
            "ist": (ist_solve, SolverConfig(tau=tau, max_iters=30000, rel_tol=0.0)),
            "fista": (fista_solve, SolverConfig(tau=tau, max_iters=15000, rel_tol=0.0)),
        }
        objs = {}
        for sname, (fn, cfg) in runs.items():
            t0 = time.perf_counter()
            coeffs, _, trace = fn(y, otf, frame, reg, cfg)
            dt = time.perf_counter() - t0
            res = subgradient_residual(
                coeffs.bands, data_gradient(y, otf, levels, coeffs.bands), tau)
            objs[sname] = trace.final.objective
            print(f"   {sname:6s} iters={trace.final.iteration:6d} "
                  f"obj={trace.final.objective:.10e} res/tau={res / tau:.3e} "
                  f"({dt:.1f}s)", flush=True)
        spread = (max(objs.values()) - min(objs.values())) / min(objs.values())
        print(f"   objective spread = {spread:.3e}", flush=True)


def part2() -> None:
    print("== part 2: SALSA vs rel_tol at 256x256 ==", flush=True)
    x = phantom(256)
    for eid, spec in DEFAULT_EXPERIMENTS.items():
        for rt in (1e-3, 1e-4, 1e-5):
            s = replace(spec, solvers=("salsa",), rel_tol=rt, max_iters=3000)
            t0 = time.perf_counter()
            rep = run_experiment(s, x)
            dt = time.perf_counter() - t0
            r = rep.results["salsa"]
            print(f"exp {eid:2s} rel_tol={rt:.0e} iters={r.iterations:5d} "
                  f"work={r.seconds:6.2f}s obj={r.objective:.8e} "
                  f"split={r.splitting_residual:.3e} isnr={r.isnr_db:6.3f} "
                  f"(wall {dt:.1f}s)", flush=True)


def part3() -> None:
    print("== part 3: experiment-1 time to common target ==", flush=True)
    x = phantom(256)
    base = DEFAULT_EXPERIMENTS["1"]
    for rt in (1e-3, 1e-4):
        s = replace(base, solvers=("salsa", "fista", "ist"), rel_tol=rt,
                    max_iters=9000, target_objective="auto")
        t0 = time.perf_counter()
        rep = run_experiment(s, x)
        dt = time.perf_counter() - t0
        print(f"rel_tol={rt:.0e} target={rep.target_objective:.6f} "
              f"(wall {dt:.1f}s)", flush=True)
        for name, r in rep.results.items():
            print(f"   {name:6s} iters={r.iterations:5d} work={r.seconds:7.2f}s "
                  f"reached={r.reached_target}", flush=True)


if __name__ == "__main__":
    part1()
    part2()
    part3()
