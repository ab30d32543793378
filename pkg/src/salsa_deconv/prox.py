"""Regularizer proximal maps and the composite deconvolution objective.

The only shipped regularizer is the l1 norm on frame coefficients, whose
proximal map is the elementwise soft threshold
``sign(a) * max(|a| - t, 0)``, i.e. the minimizer of
``0.5*(a - b)^2 + t*|b|`` over ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .convolution import apply_filter
from .frame import FrameCoeffs, FrameSpec, norm1, synthesis

__all__ = [
    "RegularizerKind",
    "Regularizer",
    "soft_threshold",
    "prox",
    "objective",
]


class RegularizerKind(Enum):
    L1 = "l1"


@dataclass(frozen=True)
class Regularizer:
    """Separable convex penalty on frame coefficients.

    ``threshold_approx`` controls whether the coarse approximation
    subband is shrunk along with the details (the default).  Disabling
    it changes the effective penalty to the l1 norm of the detail bands
    only; :func:`objective` always reports the full l1 value.
    """

    kind: RegularizerKind = RegularizerKind.L1
    threshold_approx: bool = True


def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    """Elementwise soft threshold, the proximal map of ``threshold * |.|``."""
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def prox(reg: Regularizer, coeffs: FrameCoeffs, threshold: float) -> FrameCoeffs:
    """Proximal map of ``threshold * phi`` applied to frame coefficients."""
    if threshold < 0:
        raise ValueError(f"threshold must be nonnegative, got {threshold}")
    if reg.kind is not RegularizerKind.L1:
        raise ValueError(f"unsupported regularizer kind {reg.kind}")
    out = soft_threshold(coeffs.bands, threshold)
    if not reg.threshold_approx:
        out[-1] = coeffs.bands[-1]
    return FrameCoeffs(coeffs.levels, out)


def objective(y: np.ndarray, otf: np.ndarray, spec: FrameSpec,
              coeffs: FrameCoeffs, tau: float) -> float:
    """Composite objective 0.5*||blur(synth(coeffs)) - y||^2 + tau*||coeffs||_1."""
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    if y.shape != otf.shape or y.shape != coeffs.shape:
        raise ValueError(
            f"inconsistent shapes: y {y.shape}, otf {otf.shape}, coeffs {coeffs.shape}"
        )
    residual = apply_filter(otf, synthesis(coeffs, spec)) - y
    return 0.5 * float((residual**2).sum()) + tau * norm1(coeffs)
