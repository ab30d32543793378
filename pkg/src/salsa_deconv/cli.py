"""Command-line front end: PGM I/O, experiment setup, artifact output.

Three subcommands:

``run``
    Execute one of the named benchmark experiments (1, 2A, 2B, 3A, 3B)
    on a ground-truth image: degrade it with the experiment's blur and
    noise, deblur with the requested solvers, and write artifacts.
``deblur``
    Deblur an already-degraded image with an explicit blur family and
    regularization weight (no ground truth, so no ISNR column).
``psf-dump``
    Print a blur kernel's taps, for inspection.

Artifacts land in ``--out`` with stable names: per solver a
reconstruction ``<id>_<solver>.pgm`` and a trace ``<id>_<solver>_trace.csv``,
plus one ``<id>_report.json`` per run (``<id>`` is the experiment id, or
``deblur``).  Exit status is 0 iff every requested solver terminated
without divergence; usage errors exit with 2.

Only binary 8-bit PGM (P5) images are supported.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bench import (
    DEFAULT_EXPERIMENTS,
    SOLVER_NAMES,
    ExperimentReport,
    ExperimentSpec,
    export_report,
    export_trace,
    phantom,
    run_experiment,
    solve_observation,
)
from .convolution import BlurKind, build_psf

__all__ = ["PgmError", "read_image", "write_image", "CliConfig", "parse_args", "main"]


class PgmError(ValueError):
    """Malformed or unsupported PGM data."""


def read_image(path: str | Path) -> np.ndarray:
    """Decode a binary 8-bit PGM (P5) file into a float array.

    Header comments and arbitrary whitespace are tolerated; maxval above
    255 (16-bit PGM) is rejected.  Errors report the byte offset of the
    problem.
    """
    path = Path(path)
    data = path.read_bytes()
    if data[:2] != b"P5":
        raise PgmError(f"{path}: not a binary PGM (expected magic 'P5' at byte 0)")
    pos = 2

    def next_int(name: str) -> int:
        nonlocal pos
        while pos < len(data):
            ch = data[pos:pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        token = data[start:pos]
        if not token:
            raise PgmError(f"{path}: truncated header at byte {start} (missing {name})")
        try:
            value = int(token)
        except ValueError:
            raise PgmError(
                f"{path}: invalid {name} {token.decode('latin-1')!r} at byte {start}"
            ) from None
        if value <= 0:
            raise PgmError(f"{path}: {name} must be positive, got {value} at byte {start}")
        return value

    width = next_int("width")
    height = next_int("height")
    maxval = next_int("maxval")
    if maxval > 255:
        raise PgmError(f"{path}: unsupported maxval {maxval} (only 8-bit PGM, maxval <= 255)")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PgmError(f"{path}: missing whitespace after maxval at byte {pos}")
    pos += 1
    expected = width * height
    raster = data[pos:pos + expected]
    if len(raster) < expected:
        raise PgmError(
            f"{path}: truncated raster at byte {pos + len(raster)} "
            f"(have {len(raster)} of {expected} pixel bytes)"
        )
    pixels = np.frombuffer(raster, dtype=np.uint8)
    return pixels.reshape(height, width).astype(float)


def write_image(image: np.ndarray, path: str | Path) -> None:
    """Write a 2-D array as binary 8-bit PGM, clamping to [0, 255] and rounding."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {image.shape}")
    pixels = np.rint(np.clip(image, 0.0, 255.0)).astype(np.uint8)
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())


@dataclass
class CliConfig:
    subcommand: str
    image: Path | None = None
    experiment: str | None = None
    blur: BlurKind | None = None
    sigma2: float | None = None
    tau: float | None = None
    mu: float | None = None  # None = auto = 0.1 * tau
    solvers: tuple[str, ...] = ()
    max_iters: int | None = None
    rel_tol: float | None = None
    target_objective: float | None = None
    seed: int | None = None
    out: Path = Path(".")


def _mu_flag(text: str) -> float | None:
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}")
    return value


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--solver", action="append", choices=SOLVER_NAMES, default=None,
                     help="solver to run (repeatable; default: salsa)")
    sub.add_argument("--mu", type=_mu_flag, default=None, metavar="REAL|auto",
                     help="penalty weight; 'auto' (default) uses 0.1*tau")
    sub.add_argument("--max-iters", type=int, default=None, metavar="INT")
    sub.add_argument("--rel-tol", type=float, default=None, metavar="REAL",
                     help="stop when the relative objective change drops below this")
    sub.add_argument("--target-objective", type=float, default=None, metavar="REAL",
                     help="stop once the objective reaches this value instead")
    sub.add_argument("--seed", type=int, default=None, metavar="INT")
    sub.add_argument("--out", type=Path, default=Path("."), metavar="DIR",
                     help="output directory (default: current directory)")


def parse_args(argv: list[str] | None = None) -> CliConfig:
    parser = argparse.ArgumentParser(
        prog="salsa-deconv",
        description="Frame-based image deblurring via augmented-Lagrangian splitting.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    run = subs.add_parser("run", help="run a named benchmark experiment")
    run.add_argument("--experiment", required=True, metavar="ID",
                     help="experiment id: " + ", ".join(DEFAULT_EXPERIMENTS))
    run.add_argument("--image", type=Path, default=None, metavar="PATH",
                     help="ground-truth PGM (default: built-in 256x256 phantom)")
    run.add_argument("--sigma2", type=float, default=None, metavar="REAL",
                     help="override the experiment's noise variance")
    run.add_argument("--tau", type=float, default=None, metavar="REAL",
                     help="override the experiment's regularization weight")
    _add_solver_flags(run)

    deblur = subs.add_parser("deblur", help="deblur an observed image")
    deblur.add_argument("--image", type=Path, required=True, metavar="PATH",
                        help="observed (degraded) PGM image")
    deblur.add_argument("--blur", required=True,
                        choices=[k.value for k in BlurKind],
                        help="blur family the observation was degraded with")
    deblur.add_argument("--tau", type=float, required=True, metavar="REAL",
                        help="regularization weight (problem-dependent, no default)")
    _add_solver_flags(deblur)

    dump = subs.add_parser("psf-dump", help="print a blur kernel's taps")
    dump.add_argument("--blur", required=True, choices=[k.value for k in BlurKind])

    ns = parser.parse_args(argv)

    if ns.subcommand == "run" and ns.experiment not in DEFAULT_EXPERIMENTS:
        parser.error(f"unknown experiment id {ns.experiment!r} "
                     f"(choose from {', '.join(DEFAULT_EXPERIMENTS)})")
    image = getattr(ns, "image", None)
    if image is not None and not image.is_file():
        parser.error(f"--image: file not found: {image}")
    tau = getattr(ns, "tau", None)
    if tau is not None and tau < 0:
        parser.error(f"--tau must be nonnegative, got {tau}")
    sigma2 = getattr(ns, "sigma2", None)
    if sigma2 is not None and sigma2 < 0:
        parser.error(f"--sigma2 must be nonnegative, got {sigma2}")

    blur = getattr(ns, "blur", None)
    return CliConfig(
        subcommand=ns.subcommand,
        image=image,
        experiment=getattr(ns, "experiment", None),
        blur=BlurKind(blur) if blur is not None else None,
        sigma2=sigma2,
        tau=tau,
        mu=getattr(ns, "mu", None),
        solvers=tuple(ns.solver) if getattr(ns, "solver", None) else (),
        max_iters=getattr(ns, "max_iters", None),
        rel_tol=getattr(ns, "rel_tol", None),
        target_objective=getattr(ns, "target_objective", None),
        seed=getattr(ns, "seed", None),
        out=getattr(ns, "out", Path(".")),
    )


def _write_artifacts(report: ExperimentReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, result in report.results.items():
        if result.image is not None:
            write_image(result.image, out_dir / f"{report.spec.id}_{name}.pgm")
    export_trace(report, out_dir)
    export_report(report, out_dir / f"{report.spec.id}_report.json")


def _print_summary(report: ExperimentReport) -> None:
    for name, r in report.results.items():
        if r.diverged:
            print(f"{report.spec.id} {name}: DIVERGED ({r.error})")
        else:
            isnr_txt = "" if r.isnr_db is None else f"  isnr={r.isnr_db:.2f} dB"
            print(f"{report.spec.id} {name}: {r.iterations} iters  "
                  f"objective={r.objective:.6g}  {r.seconds:.2f} s{isnr_txt}")


def _experiment_spec(cfg: CliConfig) -> ExperimentSpec:
    spec = DEFAULT_EXPERIMENTS[cfg.experiment]
    overrides: dict = {}
    if cfg.sigma2 is not None:
        overrides["noise_variance"] = cfg.sigma2
    if cfg.tau is not None:
        overrides["tau"] = cfg.tau
    if cfg.mu is not None:
        overrides["mu"] = cfg.mu
    if cfg.solvers:
        overrides["solvers"] = cfg.solvers
    if cfg.max_iters is not None:
        overrides["max_iters"] = cfg.max_iters
    if cfg.rel_tol is not None:
        overrides["rel_tol"] = cfg.rel_tol
    if cfg.target_objective is not None:
        overrides["target_objective"] = cfg.target_objective
    if cfg.seed is not None:
        overrides["seed"] = cfg.seed
    return dataclasses.replace(spec, **overrides)


def _cmd_run(cfg: CliConfig) -> int:
    x_true = read_image(cfg.image) if cfg.image is not None else phantom(256)
    report = run_experiment(_experiment_spec(cfg), x_true)
    _write_artifacts(report, cfg.out)
    _print_summary(report)
    return 0 if not any(r.diverged for r in report.results.values()) else 1


def _cmd_deblur(cfg: CliConfig) -> int:
    y = read_image(cfg.image)
    stop = {}
    if cfg.rel_tol is not None:
        stop["rel_tol"] = cfg.rel_tol
    if cfg.max_iters is not None:
        stop["max_iters"] = cfg.max_iters
    spec = ExperimentSpec(
        id="deblur",
        blur_kind=cfg.blur,
        noise_variance=0.0,  # observation is given; variance is not a solver input
        tau=cfg.tau,
        mu=cfg.mu,
        seed=cfg.seed if cfg.seed is not None else 0,
        solvers=cfg.solvers or ("salsa",),
        target_objective=cfg.target_objective,
        **stop,
    )
    report = solve_observation(y, spec)
    _write_artifacts(report, cfg.out)
    _print_summary(report)
    return 0 if not any(r.diverged for r in report.results.values()) else 1


def _cmd_psf_dump(cfg: CliConfig) -> int:
    psf = build_psf(cfg.blur)
    print(f"{cfg.blur.value}: {psf.support[0]}x{psf.support[1]}, center {psf.center}")
    for row in psf.taps:
        print(" ".join(format(v, ".17g") for v in row))
    return 0


def main(argv: list[str] | None = None) -> int:
    cfg = parse_args(argv)
    try:
        if cfg.subcommand == "run":
            return _cmd_run(cfg)
        if cfg.subcommand == "deblur":
            return _cmd_deblur(cfg)
        return _cmd_psf_dump(cfg)
    except (PgmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
