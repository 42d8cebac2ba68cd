"""Apply analysis matrices to framed audio.

Two evaluation routes exist on purpose:

* the matrix path (:func:`analyze`, :func:`analyze_frame`) multiplies the
  precomputed matrix with windowed frames using two real BLAS products;
* the direct path (:func:`direct_eval_oracle`, :func:`direct_spectrogram`)
  rebuilds every exponential from its angle with ``sin``/``cos`` and never
  touches a matrix.  It is the oracle for verification and the baseline
  for :func:`bench`.
"""
from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from adfa import _kernels
from adfa.basis import AnalysisMatrix, CqConfig, Method, MethodParams, Normalization, hz_to_mel, mel_to_hz
from adfa.errors import InvalidArgument, VerificationError
from adfa.framing import FrameConfig, frames

DEFAULT_FLOOR_EPS = 1e-30


@dataclass(eq=False)
class Spectrogram:
    """Complex ``n_bins x n_frames`` spectrogram with provenance metadata."""

    method: Method
    data: np.ndarray
    center_freqs: np.ndarray
    sample_rate: float
    frame_len: int
    hop: int

    @property
    def n_bins(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]


@dataclass(eq=False)
class LogPowerSpectrogram:
    """Real log-power values, same layout as :class:`Spectrogram`.

    ``floor_eps`` is None when the spectrogram was loaded from a file, since
    the binary format does not carry it.
    """

    method: Method
    data: np.ndarray
    center_freqs: np.ndarray
    sample_rate: float
    frame_len: int
    hop: int
    floor_eps: float | None = DEFAULT_FLOOR_EPS

    @property
    def n_bins(self) -> int:
        return self.data.shape[0]

    @property
    def n_frames(self) -> int:
        return self.data.shape[1]


def analyze_frame(matrix: AnalysisMatrix, frame) -> np.ndarray:
    x = np.asarray(frame, dtype=np.float64)
    if x.shape != (matrix.n_cols,):
        raise InvalidArgument(
            f"frame length {x.shape} does not match matrix n_cols {matrix.n_cols}", param="frame"
        )
    out = np.empty(matrix.n_bins, dtype=np.complex128)
    out.real = matrix.real_part @ x
    out.imag = matrix.imag_part @ x
    return out


def analyze(signal, matrix: AnalysisMatrix, config: FrameConfig) -> Spectrogram:
    """Spectrogram whose column ``k`` is ``matrix @ windowed_frame_k``.

    A signal shorter than one frame gives an ``n_bins x 0`` spectrogram.
    """
    if matrix.n_cols != config.frame_len:
        raise InvalidArgument(
            f"matrix expects {matrix.n_cols}-sample frames but frame_len is {config.frame_len}",
            param="frame_len",
        )
    windowed = frames(signal, config).T
    data = np.empty((matrix.n_bins, windowed.shape[1]), dtype=np.complex128)
    data.real = matrix.real_part @ windowed
    data.imag = matrix.imag_part @ windowed
    return Spectrogram(
        method=matrix.method,
        data=data,
        center_freqs=np.array(matrix.center_freqs),
        sample_rate=float(getattr(signal, "sample_rate", 0.0)),
        frame_len=config.frame_len,
        hop=config.hop,
    )


def log_power(spec: Spectrogram, floor_eps: float = DEFAULT_FLOOR_EPS) -> LogPowerSpectrogram:
    """``ln(max(|X|^2, floor_eps))`` per cell."""
    if not floor_eps > 0:
        raise InvalidArgument(f"floor_eps must be > 0, got {floor_eps}", param="eps")
    power = spec.data.real ** 2 + spec.data.imag ** 2
    return LogPowerSpectrogram(
        method=spec.method,
        data=np.log(np.maximum(power, floor_eps)),
        center_freqs=np.array(spec.center_freqs),
        sample_rate=spec.sample_rate,
        frame_len=spec.frame_len,
        hop=spec.hop,
        floor_eps=float(floor_eps),
    )


# ---------------------------------------------------------------------------
# direct evaluation
# ---------------------------------------------------------------------------


def _oracle_rate(params: MethodParams, row: int) -> float:
    # half turns per sample for one row, computed without the basis builders
    n_bins = params.n_bins
    if params.method is Method.DFA:
        return 2.0 * row / params.n_cols
    if params.method is Method.ADFA:
        return row / (n_bins - 1)
    if params.method is Method.MDFA:
        if row == n_bins - 1:
            return 1.0
        nyquist = params.mel.sample_rate / 2.0
        top = float(hz_to_mel(nyquist, params.mel.formula))
        return float(mel_to_hz(top * row / (n_bins - 1), params.mel.formula)) / nyquist
    if params.method is Method.CQA:
        cq = params.cq or CqConfig()
        return cq.base ** (-(n_bins - 1 - row) / cq.bins_per_octave)
    raise InvalidArgument(f"unknown method {params.method!r}", param="method")


def oracle_rates(params: MethodParams) -> np.ndarray:
    return np.array([_oracle_rate(params, r) for r in range(params.n_bins)])


def _oracle_scale(params: MethodParams) -> float:
    if params.normalization is Normalization.INV_SQRT_COLS:
        return 1.0 / math.sqrt(params.n_cols)
    return 1.0


def direct_eval_oracle(params: MethodParams, frame, bin: int) -> complex:
    """One output bin by explicit summation, each term's exponential
    evaluated from its angle with ``math.cos`` / ``math.sin``."""
    if not 0 <= bin < params.n_bins:
        raise InvalidArgument(f"bin {bin} out of range [0, {params.n_bins})", param="bin")
    x = [float(v) for v in np.asarray(frame, dtype=np.float64)]
    if len(x) != params.n_cols:
        raise InvalidArgument(f"frame length {len(x)} != n_cols {params.n_cols}", param="frame")
    if params.method is Method.DFA:
        step = -2.0 * math.pi * bin / params.n_cols
    else:
        step = -math.pi * _oracle_rate(params, bin)
    re = 0.0
    im = 0.0
    for n, v in enumerate(x):
        angle = step * n
        re += v * math.cos(angle)
        im += v * math.sin(angle)
    scale = _oracle_scale(params)
    return complex(re * scale, im * scale)


def direct_eval_frames(params: MethodParams, frame_block) -> np.ndarray:
    """All bins for a ``(n_frames, n_cols)`` block via the naive kernel."""
    block = np.asarray(frame_block, dtype=np.float64)
    if block.ndim != 2 or block.shape[1] != params.n_cols:
        raise InvalidArgument(f"frames must be (n, {params.n_cols})", param="frame")
    return _kernels.direct_sum(block, oracle_rates(params), _oracle_scale(params))


def direct_spectrogram(params: MethodParams, signal, config: FrameConfig) -> Spectrogram:
    """Naive-path counterpart of :func:`analyze`."""
    if params.n_cols != config.frame_len:
        raise InvalidArgument(
            f"n_cols {params.n_cols} != frame_len {config.frame_len}", param="frame_len"
        )
    data = direct_eval_frames(params, frames(signal, config))
    return Spectrogram(
        method=params.method,
        data=data,
        center_freqs=oracle_rates(params) / (2.0 if params.method is Method.DFA else 1.0),
        sample_rate=float(getattr(signal, "sample_rate", 0.0)),
        frame_len=config.frame_len,
        hop=config.hop,
    )


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------


@dataclass
class BenchReport:
    matrix_path_seconds: float
    naive_path_seconds: float
    ratio: float
    repeats: int
    n_bins: int
    n_frames: int
    max_abs_diff: float
    backend: str
    threads: int

    def record(self, **extra) -> str:
        """One-line ``key=value`` summary."""
        fields = dict(extra)
        fields.update(
            backend=self.backend,
            threads=self.threads,
            n_bins=self.n_bins,
            n_frames=self.n_frames,
            repeats=self.repeats,
            max_abs_diff=f"{self.max_abs_diff:.3e}",
            matrix_path_seconds=f"{self.matrix_path_seconds:.6f}",
            naive_path_seconds=f"{self.naive_path_seconds:.6f}",
            ratio=f"{self.ratio:.3f}",
        )
        return " ".join(f"{k}={v}" for k, v in fields.items())


def _timed(fn):
    t0 = time.perf_counter()
    result = fn()
    return time.perf_counter() - t0, result


def bench(matrix: AnalysisMatrix, signal, config: FrameConfig, repeats: int = 3,
          threads: int = 1) -> BenchReport:
    """Time the matrix path against the naive per-term path on the same frames.

    Both paths are run once first and must agree within ``1e-9 * n_cols``;
    otherwise :class:`VerificationError` is raised and nothing is timed.  The
    reported times are medians over ``repeats`` runs.
    """
    if int(repeats) != repeats or repeats < 1:
        raise InvalidArgument(f"repeats must be >= 1, got {repeats}", param="repeats")
    if matrix.params is None:
        raise InvalidArgument("matrix carries no MethodParams; cannot run naive path",
                              param="matrix")
    params = matrix.params

    def matrix_path():
        return analyze(signal, matrix, config).data

    def naive_path():
        return direct_spectrogram(params, signal, config).data

    with _kernels.thread_limit(threads):
        fast = matrix_path()
        slow = naive_path()
        diff = float(np.max(np.abs(fast - slow))) if fast.size else 0.0
        tol = 1e-9 * matrix.n_cols
        if not diff <= tol:
            raise VerificationError(
                f"matrix and naive paths disagree: max |diff| = {diff:.3e} > {tol:.3e}"
            )
        matrix_times = []
        naive_times = []
        for _ in range(repeats):
            matrix_times.append(_timed(matrix_path)[0])
            naive_times.append(_timed(naive_path)[0])

    m = statistics.median(matrix_times)
    s = statistics.median(naive_times)
    return BenchReport(
        matrix_path_seconds=m,
        naive_path_seconds=s,
        ratio=s / m if m > 0 else math.inf,
        repeats=repeats,
        n_bins=matrix.n_bins,
        n_frames=fast.shape[1],
        max_abs_diff=diff,
        backend=_kernels.BACKEND,
        threads=threads,
    )
