import cmath
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from adfa import _kernels
from adfa.io import LCG_INCREMENT, LCG_MULTIPLIER, LCG_SEED

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")

BACKENDS = [pytest.param("np", id="numpy"),
            pytest.param("nb", id="numba", marks=needs_numba)]


def kernel(name, backend):
    return getattr(_kernels, f"{name}_{backend}")


@pytest.mark.parametrize("backend", BACKENDS)
class TestCispi:
    def test_quarter_turns_exact(self, backend):
        t = np.array([0.0, 0.5, 1.0, 1.5, 2.0, -0.5, 7.0, 3.5])
        got = kernel("cispi_neg", backend)(t)
        want = np.array([1, -1j, -1, 1j, 1, 1j, -1, 1j])
        np.testing.assert_array_equal(got.real, want.real)
        np.testing.assert_array_equal(got.imag, want.imag)

    def test_matches_cmath(self, backend, rng):
        t = rng.uniform(-10, 10, 500)
        got = kernel("cispi_neg", backend)(t)
        want = np.array([cmath.exp(-1j * math.pi * v) for v in t])
        np.testing.assert_allclose(got, want, atol=1e-13)

    def test_shape_preserved(self, backend):
        assert kernel("cispi_neg", backend)(np.zeros((3, 4))).shape == (3, 4)


@needs_numba
def test_cispi_backends_agree(rng):
    # numpy's SIMD sin/cos and libm may differ in the last bit
    t = np.concatenate([rng.uniform(0, 2, 1000), np.arange(0, 2, 0.125)])
    np.testing.assert_allclose(_kernels.cispi_neg_nb(t), _kernels.cispi_neg_np(t),
                               rtol=0, atol=2.3e-16)


@pytest.mark.parametrize("backend", BACKENDS)
def test_direct_sum_against_cmath(backend, rng):
    frames = rng.standard_normal((3, 10))
    rates = np.array([0.0, 0.3, 1.0, 1.7])
    got = kernel("direct_sum", backend)(frames, rates, 0.5)
    assert got.shape == (4, 3)
    for k in range(3):
        for b, r in enumerate(rates):
            want = 0.5 * sum(frames[k, n] * cmath.exp(-1j * math.pi * r * n) for n in range(10))
            assert abs(got[b, k] - want) < 1e-12


@needs_numba
def test_direct_sum_backends_agree(rng):
    frames = rng.standard_normal((5, 300))
    rates = rng.uniform(0, 1, 40)
    np.testing.assert_allclose(_kernels.direct_sum_nb(frames, rates),
                               _kernels.direct_sum_np(frames, rates), atol=1e-10)


def _lcg_reference(n):
    state, out = LCG_SEED, []
    for _ in range(n):
        state = (LCG_MULTIPLIER * state + LCG_INCREMENT) % 2 ** 64
        out.append((state >> 11) / 2.0 ** 53 * 2 - 1)
    return out


@pytest.mark.parametrize("backend", BACKENDS)
def test_lcg(backend):
    got = kernel("lcg_uniform", backend)(1000, LCG_SEED, LCG_MULTIPLIER, LCG_INCREMENT)
    np.testing.assert_array_equal(got, _lcg_reference(1000))
    assert got.min() >= -1 and got.max() < 1


def test_env_flag_selects_numpy():
    env = dict(os.environ, ADFA_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "import adfa; print(adfa.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.parametrize("raw,expected", [(None, None), ("", None), ("4", 4)])
def test_env_threads(monkeypatch, raw, expected):
    if raw is None:
        monkeypatch.delenv("ADFA_THREADS", raising=False)
    else:
        monkeypatch.setenv("ADFA_THREADS", raw)
    assert _kernels.env_threads() == expected


@pytest.mark.parametrize("raw", ["0", "-2", "many"])
def test_env_threads_rejects(monkeypatch, raw):
    monkeypatch.setenv("ADFA_THREADS", raw)
    with pytest.raises(ValueError):
        _kernels.env_threads()


def test_thread_limit_restores():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    before = _kernels.numba.get_num_threads()
    with _kernels.thread_limit(1):
        assert _kernels.numba.get_num_threads() == 1
    assert _kernels.numba.get_num_threads() == before
