"""Fixed-size numerical self-checks run by ``adfa verify``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from adfa.basis import (
    CqConfig, MelConfig, Method, MethodParams, build_adfa_matrix, build_dfa_matrix, build_matrix,
    verify_orthogonality,
)
from adfa.engine import direct_eval_frames

ORTHOGONALITY_BINS = (2, 5, 33, 257)
HALF_SPECTRUM_BINS = (5, 33, 257)
PARSEVAL_SIZES = (4, 16, 64)
ORACLE_BINS = 97
ORACLE_COLS = 192
N_RANDOM = 100
SEED = 20240


@dataclass
class Check:
    name: str
    params: dict
    deviation: float
    tolerance: float
    expected_violation: bool = False

    @property
    def passed(self) -> bool:
        return self.expected_violation or self.deviation < self.tolerance

    def line(self) -> str:
        if self.expected_violation:
            status = "warn-not-orthogonal"
        else:
            status = "ok" if self.passed else "FAIL"
        kv = " ".join(f"{k}={v}" for k, v in self.params.items())
        return (f"check={self.name} {kv} max_dev={self.deviation:.3e} "
                f"tol={self.tolerance:.1e} status={status}")


def orthogonality_checks(bins):
    for n2 in bins:
        report = verify_orthogonality(build_adfa_matrix(n2, 2 * (n2 - 1)))
        yield Check("orthogonality", {"n_bins": n2, "n_cols": 2 * (n2 - 1)},
                    report.max_deviation, 1e-9)


def truncated_check(n_bins, n_cols):
    report = verify_orthogonality(build_adfa_matrix(n_bins, n_cols))
    return Check("orthogonality", {"n_bins": n_bins, "n_cols": n_cols}, report.max_deviation,
                 1e-9, expected_violation=not report.guaranteed)


def half_spectrum_checks(bins, rng):
    for n2 in bins:
        n1 = 2 * (n2 - 1)
        z = rng.standard_normal((N_RANDOM, n1))
        adfa = build_adfa_matrix(n2, n1).entries @ z.T
        dfa = build_dfa_matrix(n1).entries[:n2] @ z.T
        yield Check("half_spectrum", {"n_bins": n2, "n_cols": n1},
                    float(np.max(np.abs(adfa - dfa))), 1e-9 * n1)


def parseval_checks(sizes, rng):
    for n in sizes:
        z = rng.standard_normal((N_RANDOM, n))
        y = build_dfa_matrix(n).entries @ z.T
        lhs = np.sum(np.abs(y) ** 2, axis=0)
        rhs = n * np.sum(z ** 2, axis=1)
        yield Check("parseval", {"n": n}, float(np.max(np.abs(lhs - rhs) / rhs)), 1e-9)


def oracle_params(n_bins=ORACLE_BINS, n_cols=ORACLE_COLS, sample_rate=16000.0):
    return [
        MethodParams(Method.DFA, n_cols, n_cols),
        MethodParams(Method.ADFA, n_bins, n_cols),
        MethodParams(Method.MDFA, n_bins, n_cols, mel=MelConfig(sample_rate)),
        MethodParams(Method.CQA, n_bins, n_cols, cq=CqConfig(2.0, 96)),
    ]


def oracle_checks(rng):
    z = rng.standard_normal((N_RANDOM, ORACLE_COLS))
    for params in oracle_params():
        fast = build_matrix(params).entries @ z.T
        slow = direct_eval_frames(params, z)
        yield Check("oracle", {"method": params.method.name.lower(), "n_bins": params.n_bins,
                               "n_cols": params.n_cols},
                    float(np.max(np.abs(fast - slow))), 1e-9 * params.n_cols)


def run_checks(extra_bins=(), truncated=None):
    """All suites; ``truncated`` is an optional ``(n_bins, n_cols)`` pair."""
    rng = np.random.default_rng(SEED)
    ortho = tuple(dict.fromkeys(ORTHOGONALITY_BINS + tuple(extra_bins)))
    half = tuple(dict.fromkeys(HALF_SPECTRUM_BINS + tuple(extra_bins)))
    checks = list(orthogonality_checks(ortho))
    if truncated is not None:
        checks.append(truncated_check(*truncated))
    checks.extend(half_spectrum_checks(half, rng))
    checks.extend(parseval_checks(PARSEVAL_SIZES, rng))
    checks.extend(oracle_checks(rng))
    return checks
