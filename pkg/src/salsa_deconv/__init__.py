"""Frame-based image deconvolution by augmented-Lagrangian splitting.

The pieces: FFT-domain circular blur operators (:mod:`.convolution`), a
Parseval redundant Haar frame (:mod:`.frame`), l1 proximal maps
(:mod:`.prox`), the splitting solver plus shrinkage baselines
(:mod:`.solver`), a reproducible benchmark harness (:mod:`.bench`) and a
PGM command-line front end (:mod:`.cli`).
"""

from .bench import (
    DEFAULT_EXPERIMENTS,
    ExperimentReport,
    ExperimentSpec,
    SolverResult,
    degrade,
    export_report,
    export_trace,
    isnr,
    phantom,
    report_summary,
    run_experiment,
    solve_observation,
)
from .convolution import (
    BlurKind,
    Psf,
    adjoint_filter,
    apply_filter,
    build_inversion_filter,
    build_psf,
    psf_to_otf,
)
from .frame import FrameCoeffs, FrameSpec, analysis, synthesis
from .prox import Regularizer, RegularizerKind, objective, prox, soft_threshold
from .solver import (
    DivergenceError,
    SolverConfig,
    SolverState,
    SolverTrace,
    TraceRecord,
    beta_update,
    fista_solve,
    ist_solve,
    salsa_solve,
)

__version__ = "0.1.0"

__all__ = [
    "BlurKind",
    "Psf",
    "build_psf",
    "psf_to_otf",
    "apply_filter",
    "adjoint_filter",
    "build_inversion_filter",
    "FrameSpec",
    "FrameCoeffs",
    "analysis",
    "synthesis",
    "RegularizerKind",
    "Regularizer",
    "soft_threshold",
    "prox",
    "objective",
    "DivergenceError",
    "SolverConfig",
    "SolverState",
    "TraceRecord",
    "SolverTrace",
    "beta_update",
    "salsa_solve",
    "ist_solve",
    "fista_solve",
    "ExperimentSpec",
    "SolverResult",
    "ExperimentReport",
    "DEFAULT_EXPERIMENTS",
    "phantom",
    "degrade",
    "isnr",
    "run_experiment",
    "solve_observation",
    "export_trace",
    "export_report",
    "report_summary",
    "__version__",
]
