"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The numba versions are used when numba imports and ``ADFA_NUMBA`` is not set
to a false value (``0``, ``false``, ``no``, ``off``).  Both implementations of
every kernel are importable under explicit names (``*_nb`` / ``*_np``) so tests
and benchmarks can compare them directly.

``ADFA_THREADS`` caps the number of threads used by the parallel numba kernels
and, when threadpoolctl is installed, by BLAS inside :func:`thread_limit`.
"""
from __future__ import annotations

import contextlib
import math
import os

import numpy as np

ENV_NUMBA = "ADFA_NUMBA"
ENV_THREADS = "ADFA_THREADS"

_FALSE_WORDS = {"0", "false", "no", "off"}


def numba_requested():
    return os.environ.get(ENV_NUMBA, "1").strip().lower() not in _FALSE_WORDS


try:
    import numba
    from numba import njit, prange

    # TBB builds older than numba's minimum warn on first parallel call
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# exp(-i*pi*t), exact at quarter turns
# ---------------------------------------------------------------------------


def cispi_neg_np(t):
    """Return ``exp(-i*pi*t)`` for an array of half-turn counts ``t``.

    The argument is reduced modulo 2 and folded to ``|f| <= 1/4`` around the
    nearest quarter turn before calling sin/cos, so ``t`` values that are exact
    multiples of 1/2 give exactly 0 and +-1 components.
    """
    t = np.mod(np.asarray(t, dtype=np.float64), 2.0)
    q = np.floor(2.0 * t + 0.5)
    f = t - 0.5 * q
    c = np.cos(np.pi * f)
    s = np.sin(np.pi * f)
    quadrant = q.astype(np.int64) & 3
    cos_t = np.choose(quadrant, [c, -s, -c, s])
    sin_t = np.choose(quadrant, [s, c, -s, -c])
    out = np.empty(t.shape, dtype=np.complex128)
    out.real = cos_t
    out.imag = -sin_t
    return out


# ---------------------------------------------------------------------------
# naive direct evaluation: one sin/cos per (bin, sample, frame)
# ---------------------------------------------------------------------------


def direct_sum_np(frames, rates, scale=1.0):
    """Evaluate ``sum_n frame[n] * exp(-i*pi*rate*n)`` for every bin and frame.

    ``frames`` is (n_frames, n_cols); ``rates`` holds one half-turns-per-sample
    value per bin.  Every exponential is recomputed from its angle for every
    frame.  Returns a complex (n_bins, n_frames) array.
    """
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    n_frames, n_cols = frames.shape
    out = np.empty((rates.shape[0], n_frames), dtype=np.complex128)
    angles = np.multiply.outer(-np.pi * rates, np.arange(n_cols, dtype=np.float64))
    for k in range(n_frames):
        x = frames[k]
        out[:, k].real = np.cos(angles) @ x
        out[:, k].imag = np.sin(angles) @ x
    if scale != 1.0:
        out *= scale
    return out


# ---------------------------------------------------------------------------
# 64-bit LCG white noise
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def lcg_uniform_np(n, seed, a, c):
    """Draw ``n`` uniforms in [-1, 1) from a 64-bit LCG (state advanced first).

    Pure Python integer arithmetic; this is the reference the numba kernel is
    checked against.
    """
    out = np.empty(n, dtype=np.float64)
    state = seed & _MASK64
    for i in range(n):
        state = (a * state + c) & _MASK64
        out[i] = (state >> 11) * (2.0 ** -53) * 2.0 - 1.0
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _cispi_neg_kernel(t, out):
        for i in range(t.shape[0]):
            x = t[i] % 2.0
            q = math.floor(2.0 * x + 0.5)
            f = x - 0.5 * q
            c = math.cos(math.pi * f)
            s = math.sin(math.pi * f)
            quadrant = int(q) & 3
            if quadrant == 0:
                ct, st = c, s
            elif quadrant == 1:
                ct, st = -s, c
            elif quadrant == 2:
                ct, st = -c, -s
            else:
                ct, st = s, -c
            out[i] = complex(ct, -st)

    # fastmath only reorders the two accumulations; the phase is still
    # evaluated from its angle for every term
    @njit(cache=True, parallel=True, fastmath=True)
    def _direct_sum_kernel(frames, rates, scale, out):
        n_frames, n_cols = frames.shape
        n_bins = rates.shape[0]
        for k in prange(n_frames):
            for b in range(n_bins):
                step = -math.pi * rates[b]
                re = 0.0
                im = 0.0
                for n in range(n_cols):
                    ang = step * n
                    x = frames[k, n]
                    re += x * math.cos(ang)
                    im += x * math.sin(ang)
                out[b, k] = complex(re * scale, im * scale)

    @njit(cache=True)
    def _lcg_kernel(seed, a, c, out):
        state = seed
        shift = np.uint64(11)
        inv = 2.0 ** -53
        for i in range(out.shape[0]):
            state = a * state + c
            out[i] = np.float64(state >> shift) * inv * 2.0 - 1.0

    def cispi_neg_nb(t):
        t = np.asarray(t, dtype=np.float64)
        flat = np.ascontiguousarray(t).reshape(-1)
        out = np.empty(flat.shape[0], dtype=np.complex128)
        _cispi_neg_kernel(flat, out)
        return out.reshape(t.shape)

    def direct_sum_nb(frames, rates, scale=1.0):
        frames = np.ascontiguousarray(frames, dtype=np.float64)
        rates = np.ascontiguousarray(rates, dtype=np.float64)
        out = np.empty((rates.shape[0], frames.shape[0]), dtype=np.complex128)
        _direct_sum_kernel(frames, rates, float(scale), out)
        return out

    def lcg_uniform_nb(n, seed, a, c):
        out = np.empty(n, dtype=np.float64)
        _lcg_kernel(np.uint64(seed & _MASK64), np.uint64(a & _MASK64),
                    np.uint64(c & _MASK64), out)
        return out

else:  # pragma: no cover
    cispi_neg_nb = direct_sum_nb = lcg_uniform_nb = None


USE_NUMBA = HAVE_NUMBA and numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:
    cispi_neg = cispi_neg_nb
    direct_sum = direct_sum_nb
    lcg_uniform = lcg_uniform_nb
else:
    cispi_neg = cispi_neg_np
    direct_sum = direct_sum_np
    lcg_uniform = lcg_uniform_np


def env_threads():
    """Thread cap from ``ADFA_THREADS``, or None when unset.

    Raises ValueError for anything but a positive integer.
    """
    raw = os.environ.get(ENV_THREADS)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}")
    return value


@contextlib.contextmanager
def thread_limit(n):
    """Temporarily cap numba and BLAS parallelism at ``n`` threads."""
    stack = contextlib.ExitStack()
    previous = None
    if HAVE_NUMBA:
        previous = numba.get_num_threads()
        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover
        threadpool_limits = None
    if threadpool_limits is not None:
        stack.enter_context(threadpool_limits(limits=n))
    try:
        with stack:
            yield
    finally:
        if previous is not None:
            numba.set_num_threads(previous)
