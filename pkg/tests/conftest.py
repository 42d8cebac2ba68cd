import cmath
import struct
import wave

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def brute_dft_row(frame, angle_per_sample):
    """sum_n frame[n] * exp(i * angle_per_sample * n) with cmath, term by term."""
    return sum(float(x) * cmath.exp(1j * angle_per_sample * n) for n, x in enumerate(frame))


def write_pcm16(path, samples, sample_rate=16000, channels=1):
    """Write interleaved int16 samples with the stdlib wave module."""
    data = np.asarray(samples, dtype="<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(data.tobytes())
    return path


def riff(chunks):
    """Assemble a RIFF/WAVE blob from (id, body) pairs, padding odd bodies."""
    body = b"WAVE"
    for cid, payload in chunks:
        body += cid + struct.pack("<I", len(payload)) + payload
        if len(payload) & 1:
            body += b"\0"
    return b"RIFF" + struct.pack("<I", len(body)) + body


def fmt_chunk(tag=1, channels=1, rate=16000, bits=16):
    align = channels * bits // 8
    return b"fmt ", struct.pack("<HHIIHH", tag, channels, rate, rate * align, align, bits)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(results, key=lambda r: r["name"]):
        verdict = "PASS" if r["ok"] else "FAIL"
        terminalreporter.write_line(f"{verdict} {r['name']}: {r['detail']}")
