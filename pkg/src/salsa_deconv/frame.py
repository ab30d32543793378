"""Parseval redundant Haar wavelet frame (undecimated, a-trous).

The analysis transform decomposes an image into ``3*levels + 1``
full-resolution subbands: three detail orientations per level plus one
final approximation.  Level ``j`` uses the Haar pair upsampled a trous
style, i.e. taps ``1/2`` at offsets ``{0, 2**(j-1)}`` (lowpass) and
``+1/2, -1/2`` at the same offsets (highpass), applied separably along
both axes with periodic wrap.  With that tap scale the subband filters
at each level resolve the identity, so the frame is Parseval: synthesis
is the exact adjoint of analysis and ``synthesis(analysis(x)) == x`` up
to floating point.

Subband order is fixed so serialized coefficients are portable:
``(level-1 horizontal, vertical, diagonal), (level-2 H, V, D), ...,
approximation`` where *horizontal* is row-lowpass/column-highpass,
*vertical* is row-highpass/column-lowpass and *diagonal* is highpass in
both axes.  Level 1 is the finest scale.

Image dimensions must be divisible by ``2**levels``; anything else is
rejected rather than padded, since padding would silently change the
operator the solvers work with.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FrameSpec",
    "FrameCoeffs",
    "analysis",
    "synthesis",
    "analysis_bands",
    "synthesis_bands",
    "axpy",
    "scale",
    "norm1",
    "norm2",
    "dot",
]


@dataclass(frozen=True)
class FrameSpec:
    """Decomposition depth of the redundant Haar frame (default 4)."""

    levels: int = 4

    def __post_init__(self) -> None:
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")

    @property
    def level_scales(self) -> tuple[float, ...]:
        """Per-level analysis tap scale; 1/2 per axis makes the frame Parseval."""
        return (0.5,) * self.levels

    @property
    def n_subbands(self) -> int:
        return 3 * self.levels + 1


@dataclass
class FrameCoeffs:
    """Coefficient vector of the redundant Haar frame.

    ``bands`` stacks the subbands as a ``(3*levels + 1, H, W)`` array in
    the order documented in the module docstring; every subband has the
    full image resolution (undecimated transform).
    """

    levels: int
    bands: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bands.shape[1:]

    def copy(self) -> "FrameCoeffs":
        return FrameCoeffs(self.levels, self.bands.copy())


def _check_image(image: np.ndarray, levels: int) -> np.ndarray:
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError(f"expected a 2-D image, got ndim={image.ndim}")
    h, w = image.shape
    step = 1 << levels
    if h % step or w % step:
        raise ValueError(
            f"image dimensions {h}x{w} must be divisible by 2**levels = {step}"
        )
    return image


def _check_layout(a: FrameCoeffs, b: FrameCoeffs) -> None:
    if a.levels != b.levels or a.bands.shape != b.bands.shape:
        raise ValueError(
            f"coefficient layouts differ: levels {a.levels} vs {b.levels}, "
            f"bands {a.bands.shape} vs {b.bands.shape}"
        )


def _check_coeffs(coeffs: FrameCoeffs, spec: FrameSpec) -> None:
    if coeffs.levels != spec.levels:
        raise ValueError(f"coefficients have {coeffs.levels} levels, spec wants {spec.levels}")
    if coeffs.bands.ndim != 3 or coeffs.bands.shape[0] != spec.n_subbands:
        raise ValueError(
            f"expected {spec.n_subbands} stacked subbands, got shape {coeffs.bands.shape}"
        )


# 1-D Haar pair at hole spacing `shift`, plus the matched adjoints.
# np.roll with negative shift reads x[i + shift], so lowpass/highpass act
# as out[i] = (x[i] +/- x[i + shift]) / 2 with periodic wrap.

def _lo(a, shift, axis):
    return 0.5 * (a + np.roll(a, -shift, axis))


def _hi(a, shift, axis):
    return 0.5 * (a - np.roll(a, -shift, axis))


def _lo_t(a, shift, axis):
    return 0.5 * (a + np.roll(a, shift, axis))


def _hi_t(a, shift, axis):
    return 0.5 * (a - np.roll(a, shift, axis))


def analysis_bands(image: np.ndarray, levels: int) -> np.ndarray:
    """Undecimated Haar decomposition as a raw ``(3*levels+1, H, W)`` stack."""
    a = _check_image(image, levels)
    out = np.empty((3 * levels + 1,) + a.shape)
    shift = 1
    for j in range(levels):
        lo0 = _lo(a, shift, 0)
        hi0 = _hi(a, shift, 0)
        out[3 * j] = _hi(lo0, shift, 1)      # horizontal detail
        out[3 * j + 1] = _lo(hi0, shift, 1)  # vertical detail
        out[3 * j + 2] = _hi(hi0, shift, 1)  # diagonal detail
        a = _lo(lo0, shift, 1)
        shift *= 2
    out[-1] = a
    return out


def synthesis_bands(bands: np.ndarray, levels: int) -> np.ndarray:
    """Adjoint of :func:`analysis_bands`; exact inverse for Parseval scaling."""
    a = bands[-1]
    shift = 1 << (levels - 1)
    for j in reversed(range(levels)):
        lo0 = _lo_t(a, shift, 1) + _hi_t(bands[3 * j], shift, 1)
        hi0 = _lo_t(bands[3 * j + 1], shift, 1) + _hi_t(bands[3 * j + 2], shift, 1)
        a = _lo_t(lo0, shift, 0) + _hi_t(hi0, shift, 0)
        shift //= 2
    return a


def analysis(image: np.ndarray, spec: FrameSpec) -> FrameCoeffs:
    """Frame analysis transform (the transpose of :func:`synthesis`).

    Cost is O(n * levels).  Requires image dimensions divisible by
    ``2**spec.levels``.
    """
    return FrameCoeffs(spec.levels, analysis_bands(image, spec.levels))


def synthesis(coeffs: FrameCoeffs, spec: FrameSpec) -> np.ndarray:
    """Frame synthesis transform; reconstructs the image from coefficients."""
    _check_coeffs(coeffs, spec)
    return synthesis_bands(coeffs.bands, spec.levels)


def axpy(a: float, x: FrameCoeffs, y: FrameCoeffs) -> FrameCoeffs:
    """Elementwise a*x + y over all subbands."""
    _check_layout(x, y)
    return FrameCoeffs(x.levels, a * x.bands + y.bands)


def scale(a: float, x: FrameCoeffs) -> FrameCoeffs:
    return FrameCoeffs(x.levels, a * x.bands)


def norm1(x: FrameCoeffs) -> float:
    """l1 norm summed over every subband."""
    return float(np.abs(x.bands).sum())


def norm2(x: FrameCoeffs) -> float:
    return float(np.sqrt((x.bands**2).sum()))


def dot(x: FrameCoeffs, y: FrameCoeffs) -> float:
    _check_layout(x, y)
    return float((x.bands * y.bands).sum())
