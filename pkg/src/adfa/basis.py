"""Analysis matrices for DFA, ADFA, MDFA and CQA.

Every non-DFA matrix has the same structure: row ``r`` is the geometric
sequence ``w_r**n`` for ``n = 0 .. n_cols-1`` with ``w_r = exp(-i*pi*c_r)``,
where ``c_r`` is the row's center frequency as a fraction of Nyquist.  The
methods differ only in how ``c_r`` is spaced:

* ADFA: linear, ``c_a = a / (n_bins - 1)``
* MDFA: uniform on the mel scale between 0 Hz and ``fs / 2``
* CQA:  geometric, ``c = B**(-a / b)`` for ``a = n_bins-1, ..., 0``

The DFA matrix is the ordinary N x N Fourier matrix.  Its ``center_freqs`` are
in cycles per sample (``m / N``), not fractions of Nyquist, because it covers
the full circle rather than the upper half.

Matrix entries are generated from exactly reduced phases (integer arithmetic
for DFA/ADFA), so entries that sit on a quarter turn are exactly 0 / +-1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from adfa import _kernels
from adfa.errors import InvalidArgument


class Method(enum.IntEnum):
    DFA = 0
    ADFA = 1
    MDFA = 2
    CQA = 3


class Normalization(enum.Enum):
    NONE = "none"
    INV_SQRT_COLS = "inv-sqrt-cols"


class MelFormula(enum.Enum):
    HTK = "htk"
    SLANEY = "slaney"


@dataclass(frozen=True)
class MelConfig:
    sample_rate: float
    formula: MelFormula = MelFormula.HTK

    def __post_init__(self):
        if not (self.sample_rate > 0 and math.isfinite(self.sample_rate)):
            raise InvalidArgument(
                f"sample_rate must be a positive finite number, got {self.sample_rate}",
                param="sample_rate",
            )


@dataclass(frozen=True)
class CqConfig:
    base: float = 2.0
    bins_per_octave: int = 96

    def __post_init__(self):
        if not (self.base > 1 and math.isfinite(self.base)):
            raise InvalidArgument(f"base must be > 1, got {self.base}", param="base")
        if int(self.bins_per_octave) != self.bins_per_octave or self.bins_per_octave < 1:
            raise InvalidArgument(
                f"bins_per_octave must be a positive integer, got {self.bins_per_octave}",
                param="bins_per_octave",
            )


@dataclass(frozen=True)
class MethodParams:
    """Everything needed to rebuild a matrix, or to evaluate it without one."""

    method: Method
    n_bins: int
    n_cols: int
    normalization: Normalization = Normalization.NONE
    mel: MelConfig | None = None
    cq: CqConfig | None = None


@dataclass(frozen=True, eq=False)
class AnalysisMatrix:
    """Complex ``n_bins x n_cols`` analysis matrix plus per-row metadata.

    ``entries`` and ``center_freqs`` are read-only arrays; the object is safe
    to share between threads.
    """

    method: Method
    entries: np.ndarray
    center_freqs: np.ndarray
    normalization: Normalization = Normalization.NONE
    params: MethodParams | None = field(default=None, repr=False)

    def __post_init__(self):
        self.entries.setflags(write=False)
        self.center_freqs.setflags(write=False)

    @property
    def n_bins(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    @cached_property
    def real_part(self) -> np.ndarray:
        return np.ascontiguousarray(self.entries.real)

    @cached_property
    def imag_part(self) -> np.ndarray:
        return np.ascontiguousarray(self.entries.imag)


# ---------------------------------------------------------------------------
# mel scale
# ---------------------------------------------------------------------------

_SLANEY_F_SP = 200.0 / 3
_SLANEY_MIN_LOG_HZ = 1000.0
_SLANEY_MIN_LOG_MEL = _SLANEY_MIN_LOG_HZ / _SLANEY_F_SP
_SLANEY_LOGSTEP = math.log(6.4) / 27.0


def hz_to_mel(freq, formula=MelFormula.HTK):
    """Convert Hz to mel.  HTK: ``2595 log10(1 + f/700)``; Slaney: linear
    below 1 kHz, logarithmic above."""
    f = np.asarray(freq, dtype=np.float64)
    if formula is MelFormula.HTK:
        return 2595.0 * np.log10(1.0 + f / 700.0)
    mel = f / _SLANEY_F_SP
    log_region = f >= _SLANEY_MIN_LOG_HZ
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mel = _SLANEY_MIN_LOG_MEL + np.log(f / _SLANEY_MIN_LOG_HZ) / _SLANEY_LOGSTEP
    return np.where(log_region, log_mel, mel)


def mel_to_hz(mel, formula=MelFormula.HTK):
    m = np.asarray(mel, dtype=np.float64)
    if formula is MelFormula.HTK:
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    hz = _SLANEY_F_SP * m
    log_region = m >= _SLANEY_MIN_LOG_MEL
    log_hz = _SLANEY_MIN_LOG_HZ * np.exp(_SLANEY_LOGSTEP * (m - _SLANEY_MIN_LOG_MEL))
    return np.where(log_region, log_hz, hz)


def mel_center_freqs(n_bins: int, config: MelConfig) -> np.ndarray:
    """Center frequencies in Hz, uniformly spaced in mel from 0 to ``fs/2``.

    The endpoints are pinned to exactly 0 and ``fs/2``.
    """
    _check_int(n_bins, "n_bins", minimum=2)
    nyquist = config.sample_rate / 2.0
    top_mel = hz_to_mel(nyquist, config.formula)
    fractions = np.arange(n_bins, dtype=np.float64) / (n_bins - 1)
    freqs = mel_to_hz(fractions * top_mel, config.formula)
    freqs[0] = 0.0
    freqs[-1] = nyquist
    return freqs


def cq_center_freqs(n_bins: int, config: CqConfig) -> np.ndarray:
    """``B**(-a/b)`` for ``a = n_bins-1, ..., 0``: lowest frequency first,
    Nyquist (1.0) last."""
    _check_int(n_bins, "n_bins", minimum=1)
    a = np.arange(n_bins - 1, -1, -1, dtype=np.float64)
    return config.base ** (-a / config.bins_per_octave)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _check_int(value, name, minimum):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise InvalidArgument(f"{name} must be an integer >= {minimum}, got {value!r}", param=name)


def _scale(normalization, n_cols):
    if normalization is Normalization.INV_SQRT_COLS:
        return 1.0 / math.sqrt(n_cols)
    return 1.0


def _rational_entries(rows, den, n_cols):
    # phase = 2*pi*(row*n mod den)/den, reduced in integers before any rounding
    n = np.arange(n_cols, dtype=np.int64)
    k = np.mod(np.multiply.outer(np.asarray(rows, dtype=np.int64), n), den)
    return _kernels.cispi_neg((2.0 * k) / den)


def _geometric_entries(center_freqs, n_cols):
    n = np.arange(n_cols, dtype=np.float64)
    return _kernels.cispi_neg(np.mod(np.multiply.outer(center_freqs, n), 2.0))


def _finish(method, entries, center_freqs, normalization, params):
    scale = _scale(normalization, entries.shape[1])
    if scale != 1.0:
        entries = entries * scale
    return AnalysisMatrix(method, entries, np.asarray(center_freqs, dtype=np.float64),
                          normalization, params)


def build_dfa_matrix(n: int, normalization=Normalization.NONE) -> AnalysisMatrix:
    """The N x N Fourier matrix ``exp(-2*pi*i*m*k/N)``."""
    _check_int(n, "n_bins", minimum=1)
    entries = _rational_entries(np.arange(n), n, n)
    params = MethodParams(Method.DFA, n, n, normalization)
    return _finish(Method.DFA, entries, np.arange(n) / n, normalization, params)


def build_adfa_matrix(n_bins: int, n_cols: int, normalization=Normalization.NONE) -> AnalysisMatrix:
    """ADFA matrix with ``w_a = exp(-i*pi*a/(n_bins-1))``.

    Orthogonal when ``n_cols == 2*(n_bins-1)``; other widths give the
    truncated (or extended) variant used in place of zero padding.
    """
    _check_int(n_bins, "n_bins", minimum=2)
    _check_int(n_cols, "n_cols", minimum=1)
    entries = _rational_entries(np.arange(n_bins), 2 * (n_bins - 1), n_cols)
    center = np.arange(n_bins) / (n_bins - 1)
    params = MethodParams(Method.ADFA, n_bins, n_cols, normalization)
    return _finish(Method.ADFA, entries, center, normalization, params)


def build_mdfa_matrix(n_bins: int, n_cols: int, config: MelConfig,
                      normalization=Normalization.NONE) -> AnalysisMatrix:
    _check_int(n_bins, "n_bins", minimum=2)
    _check_int(n_cols, "n_cols", minimum=1)
    center = mel_center_freqs(n_bins, config) / (config.sample_rate / 2.0)
    center[-1] = 1.0
    entries = _geometric_entries(center, n_cols)
    params = MethodParams(Method.MDFA, n_bins, n_cols, normalization, mel=config)
    return _finish(Method.MDFA, entries, center, normalization, params)


def build_cqa_matrix(n_bins: int, n_cols: int, config: CqConfig,
                     normalization=Normalization.NONE) -> AnalysisMatrix:
    _check_int(n_bins, "n_bins", minimum=1)
    _check_int(n_cols, "n_cols", minimum=1)
    center = cq_center_freqs(n_bins, config)
    entries = _geometric_entries(center, n_cols)
    params = MethodParams(Method.CQA, n_bins, n_cols, normalization, cq=config)
    return _finish(Method.CQA, entries, center, normalization, params)


def build_matrix(params: MethodParams) -> AnalysisMatrix:
    """Dispatch on ``params.method``."""
    m = params.method
    if m is Method.DFA:
        if params.n_bins != params.n_cols:
            raise InvalidArgument("DFA matrix is square: n_bins must equal n_cols", param="n_cols")
        return build_dfa_matrix(params.n_bins, params.normalization)
    if m is Method.ADFA:
        return build_adfa_matrix(params.n_bins, params.n_cols, params.normalization)
    if m is Method.MDFA:
        if params.mel is None:
            raise InvalidArgument("MDFA needs a MelConfig", param="mel")
        return build_mdfa_matrix(params.n_bins, params.n_cols, params.mel, params.normalization)
    if m is Method.CQA:
        return build_cqa_matrix(params.n_bins, params.n_cols, params.cq or CqConfig(),
                                params.normalization)
    raise InvalidArgument(f"unknown method {m!r}", param="method")


# ---------------------------------------------------------------------------
# orthogonality
# ---------------------------------------------------------------------------


class OrthogonalityReport(NamedTuple):
    max_deviation: float
    guaranteed: bool


def orthogonality_guaranteed(matrix: AnalysisMatrix) -> bool:
    if matrix.method is Method.DFA:
        return True
    return matrix.method is Method.ADFA and matrix.n_cols == 2 * (matrix.n_bins - 1)


def verify_orthogonality(matrix: AnalysisMatrix) -> OrthogonalityReport:
    """Max entry of ``|(1/n_cols) * E E^H - I|`` (plain ``E E^H - I`` when the
    matrix already carries the ``1/sqrt(n_cols)`` factor).

    The deviation is reported for any matrix; ``guaranteed`` is False when the
    orthogonality condition ``n_cols == 2*(n_bins-1)`` (or squareness for DFA)
    does not hold, in which case a large deviation is expected.
    """
    e = matrix.entries
    gram = e @ e.conj().T
    if matrix.normalization is Normalization.NONE:
        gram = gram / matrix.n_cols
    gram[np.diag_indices_from(gram)] -= 1.0
    return OrthogonalityReport(float(np.max(np.abs(gram))), orthogonality_guaranteed(matrix))
