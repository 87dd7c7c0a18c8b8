"""Periodized one-dimensional filter-bank wavelet machinery.

A signal of even length n is split into n/2 approximation and n/2 detail
coefficients by circular convolution with a low-pass / high-pass analysis
pair followed by dyadic downsampling.  Iterating on the approximation branch
gives the usual multilevel cascade.  Synthesis is the adjoint operation
(zero-insertion upsampling followed by circular convolution with the
time-reversed filter), so for an orthonormal pair analysis-then-synthesis
is the identity to machine precision.

Boundary handling is periodization throughout: lengths halve exactly at
every level, which is what forces a length-16 signal down to exactly four
level-2 coefficients.

Alignment convention
--------------------
After circular convolution the output is sampled at indices
``(2*i + downsample_offset(len(filter))) mod n``.  The offset is half the
filter length; it was fixed once by matching the bundled reference vectors
(see :mod:`groupanon.reference`) and the synthesis side applies the mirror
phase.  Changing it breaks perfect reconstruction against those fixtures.

The high-pass filter is the quadrature mirror of the low-pass,
``h[k] = (-1)**(k+1) * l[L-1-k]``, again the sign convention validated by
the reference vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import WaveletError

__all__ = [
    "FilterPair",
    "WaveletDecomposition",
    "FILTERS",
    "get_filter",
    "downsample_offset",
    "conv_down",
    "up_conv",
    "decompose",
    "approximation_component",
    "detail_component",
    "reconstruct",
    "reconstruction_matrix",
]

_ATOL = 1e-12


def downsample_offset(filter_length: int) -> int:
    """Phase of the kept samples after circular convolution.

    Half the filter length; documented here as the single alignment
    constant of the module (2 for the four-tap filter the reference
    vectors validate).
    """
    return filter_length // 2


@dataclass(frozen=True)
class FilterPair:
    """An orthonormal low-pass / high-pass analysis pair.

    Invariants checked on construction: equal even lengths, low-pass taps
    summing to sqrt(2) with unit energy, high-pass taps summing to zero.
    """

    name: str
    lowpass: np.ndarray
    highpass: np.ndarray

    def __post_init__(self):
        low = np.asarray(self.lowpass, dtype=float)
        high = np.asarray(self.highpass, dtype=float)
        object.__setattr__(self, "lowpass", low)
        object.__setattr__(self, "highpass", high)
        if low.ndim != 1 or high.ndim != 1 or low.size != high.size:
            raise WaveletError("filter pair must be two equal-length vectors")
        if low.size < 2 or low.size % 2:
            raise WaveletError("filter length must be even and at least 2")
        if abs(low.sum() - np.sqrt(2.0)) > _ATOL:
            raise WaveletError(f"low-pass taps of {self.name!r} must sum to sqrt(2)")
        if abs((low * low).sum() - 1.0) > _ATOL:
            raise WaveletError(f"low-pass taps of {self.name!r} must have unit energy")
        if abs(high.sum()) > _ATOL:
            raise WaveletError(f"high-pass taps of {self.name!r} must sum to 0")
        low.setflags(write=False)
        high.setflags(write=False)

    @classmethod
    def from_lowpass(cls, name: str, lowpass) -> "FilterPair":
        """Build the pair from low-pass taps via the quadrature mirror."""
        low = np.asarray(lowpass, dtype=float)
        k = np.arange(low.size)
        high = (-1.0) ** (k + 1) * low[::-1]
        return cls(name, low, high)

    def __len__(self) -> int:
        return int(self.lowpass.size)


def _daubechies2() -> FilterPair:
    s3 = np.sqrt(3.0)
    low = np.array([1.0 - s3, 3.0 - s3, 3.0 + s3, 1.0 + s3]) / (4.0 * np.sqrt(2.0))
    return FilterPair.from_lowpass("db2", low)


def _daubechies4() -> FilterPair:
    low = np.array(
        [
            -0.010597401784997278,
            0.032883011666982945,
            0.030841381835986965,
            -0.18703481171888114,
            -0.02798376941698385,
            0.6308807679295904,
            0.7148465705525415,
            0.23037781330885523,
        ]
    )
    return FilterPair.from_lowpass("db4", low)


def _haar() -> FilterPair:
    low = np.array([1.0, 1.0]) / np.sqrt(2.0)
    return FilterPair.from_lowpass("haar", low)


FILTERS: dict[str, FilterPair] = {
    "db2": _daubechies2(),
    "db4": _daubechies4(),
    "haar": _haar(),
}


def get_filter(name: str) -> FilterPair:
    try:
        return FILTERS[name]
    except KeyError:
        known = ", ".join(sorted(FILTERS))
        raise WaveletError(f"unknown wavelet family {name!r} (available: {known})") from None


def _circular_convolve(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Full linear convolution folded back onto length len(x)."""
    n = x.size
    full = np.convolve(x, taps)
    out = np.zeros(n)
    np.add.at(out, np.arange(full.size) % n, full)
    return out


def conv_down(x, taps) -> np.ndarray:
    """Circular convolution with ``taps`` followed by dyadic downsampling.

    Output has length len(x)/2; samples are taken at the module alignment
    phase (see :func:`downsample_offset`).
    """
    x = np.asarray(x, dtype=float)
    taps = np.asarray(taps, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise WaveletError("input signal must be a non-empty vector")
    if x.size % 2:
        raise WaveletError(f"signal length {x.size} is odd; need an even length")
    if x.size < taps.size:
        raise WaveletError(
            f"signal length {x.size} is shorter than the filter ({taps.size} taps)"
        )
    y = _circular_convolve(x, taps)
    idx = (2 * np.arange(x.size // 2) + downsample_offset(taps.size)) % x.size
    return y[idx]


def up_conv(x, taps) -> np.ndarray:
    """Dyadic upsampling followed by circular convolution (synthesis).

    Adjoint of :func:`conv_down` for the same taps: zeros are inserted
    between samples and the result is circularly convolved with the
    time-reversed filter at the matching phase.  Output length is
    2*len(x).
    """
    x = np.asarray(x, dtype=float)
    taps = np.asarray(taps, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise WaveletError("input coefficient vector must be non-empty")
    n = 2 * x.size
    up = np.zeros(n)
    up[::2] = x
    synth = np.zeros(n)
    phase = downsample_offset(taps.size)
    np.add.at(synth, (phase - np.arange(taps.size)) % n, taps)
    return _circular_convolve(up, synth)


@dataclass(frozen=True)
class WaveletDecomposition:
    """Multilevel decomposition: one approximation plus per-level details.

    ``details[j]`` holds the level-j detail coefficients (length m/2**j),
    for j = level down to 1.  ``reconstruct`` reassembles the original
    signal to machine precision.
    """

    level: int
    approx: np.ndarray
    details: dict[int, np.ndarray]
    signal_length: int
    filter: FilterPair = field(repr=False)

    def detail_levels(self) -> list[int]:
        return sorted(self.details, reverse=True)


def decompose(values, filter_pair: FilterPair, level: int) -> WaveletDecomposition:
    """Run the analysis cascade for ``level`` steps.

    The signal length must be divisible by 2**level and every intermediate
    length must still cover the filter.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise WaveletError("signal must be one-dimensional")
    if level < 1:
        raise WaveletError("decomposition level must be at least 1")
    m = x.size
    feasible = _max_level(m, len(filter_pair))
    if m % (1 << level) or level > feasible:
        raise WaveletError(
            f"cannot decompose length {m} by {level} levels; "
            f"maximal feasible level is {feasible}"
        )
    details: dict[int, np.ndarray] = {}
    approx = x
    for j in range(1, level + 1):
        details[j] = conv_down(approx, filter_pair.highpass)
        approx = conv_down(approx, filter_pair.lowpass)
    return WaveletDecomposition(level, approx, details, m, filter_pair)


def _max_level(m: int, filter_length: int) -> int:
    level = 0
    while m % 2 == 0 and m >= filter_length:
        level += 1
        m //= 2
    return level


def approximation_component(dec: WaveletDecomposition) -> np.ndarray:
    """Low-frequency component: the approximation synthesized back to full length."""
    return _synthesize_approx(dec.approx, dec.level, dec.filter)


def _synthesize_approx(coeffs: np.ndarray, level: int, fp: FilterPair) -> np.ndarray:
    out = np.asarray(coeffs, dtype=float)
    for _ in range(level):
        out = up_conv(out, fp.lowpass)
    return out


def detail_component(dec: WaveletDecomposition) -> np.ndarray:
    """Sum of all detail components synthesized back to full length."""
    total = np.zeros(dec.signal_length)
    for j, d in dec.details.items():
        comp = up_conv(d, dec.filter.highpass)
        for _ in range(j - 1):
            comp = up_conv(comp, dec.filter.lowpass)
        total += comp
    return total


def reconstruct(dec: WaveletDecomposition) -> np.ndarray:
    """Approximation plus details; inverse of :func:`decompose`."""
    return approximation_component(dec) + detail_component(dec)


def reconstruction_matrix(filter_pair: FilterPair, level: int, length: int) -> np.ndarray:
    """Matrix R mapping approximation coefficients to the full-length component.

    R @ a equals the approximation component for any coefficient vector a;
    column j is the synthesis cascade of the j-th unit vector.  Shape is
    (length, length / 2**level).
    """
    if level < 1 or length % (1 << level):
        raise WaveletError(f"length {length} is not divisible by 2**{level}")
    ncoef = length >> level
    columns = np.empty((ncoef, length))
    for j in range(ncoef):
        unit = np.zeros(ncoef)
        unit[j] = 1.0
        columns[j] = _synthesize_approx(unit, level, filter_pair)
    return columns.T
