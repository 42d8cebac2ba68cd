import csv
import struct

import numpy as np
import pytest

from adfa.basis import CqConfig, MelConfig, Method, Normalization, build_adfa_matrix, build_cqa_matrix, build_dfa_matrix, build_mdfa_matrix
from adfa.engine import LogPowerSpectrogram, Spectrogram, analyze, log_power
from adfa.errors import CorruptFile, NotAdfaFile, UnsupportedFormat, UnsupportedVersion, WriteError
from adfa.framing import FrameConfig
from adfa.io import (
    HEADER, AudioBuffer, Format, file_size_for, read_matrix, read_spectrogram, read_wav,
    synthetic_noise, write_matrix, write_spectrogram,
)

from conftest import fmt_chunk, riff, write_pcm16


class TestReadWav:
    def test_scaling(self, tmp_path):
        p = write_pcm16(tmp_path / "a.wav", [0, 16384, -16384, -32768])
        audio = read_wav(p)
        assert audio.sample_rate == 16000
        np.testing.assert_array_equal(audio.samples, [0.0, 0.5, -0.5, -1.0])

    def test_stereo_mixdown(self, tmp_path):
        p = write_pcm16(tmp_path / "s.wav", [32767, 32767, 100, 300, -2, 0], 8000, channels=2)
        audio = read_wav(p)
        assert audio.sample_rate == 8000
        np.testing.assert_array_equal(audio.samples, [32767 / 32768, 200 / 32768, -1 / 32768])

    def test_skips_unknown_chunks(self, tmp_path):
        blob = riff([(b"LIST", b"abc"), fmt_chunk(), (b"fact", b"1234"),
                     (b"data", struct.pack("<3h", 1, 2, 3))])
        (tmp_path / "x.wav").write_bytes(blob)
        np.testing.assert_array_equal(read_wav(tmp_path / "x.wav").samples,
                                      np.array([1, 2, 3]) / 32768)

    def test_extensible_pcm(self, tmp_path):
        tag, ch, rate, br, al, bits = struct.unpack("<HHIIHH", fmt_chunk()[1])
        ext = struct.pack("<HHIIHH", 0xFFFE, ch, rate, br, al, bits)
        ext += struct.pack("<HHI", 22, 16, 4) + struct.pack("<H", 1) + bytes(14)
        (tmp_path / "e.wav").write_bytes(riff([(b"fmt ", ext), (b"data", b"\x00\x40")]))
        np.testing.assert_array_equal(read_wav(tmp_path / "e.wav").samples, [0.5])

    def test_8bit_rejected(self, tmp_path):
        (tmp_path / "b.wav").write_bytes(riff([fmt_chunk(bits=8), (b"data", b"\x80\x80")]))
        with pytest.raises(UnsupportedFormat):
            read_wav(tmp_path / "b.wav")

    def test_float_rejected_with_code(self, tmp_path):
        (tmp_path / "f.wav").write_bytes(riff([fmt_chunk(tag=3, bits=32), (b"data", bytes(4))]))
        with pytest.raises(UnsupportedFormat) as exc:
            read_wav(tmp_path / "f.wav")
        assert exc.value.format_code == 3
        assert "0x0003" in str(exc.value)

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_wav(tmp_path / "nope.wav")

    def test_truncated_data_chunk(self, tmp_path):
        blob = riff([fmt_chunk(), (b"data", bytes(100))])[:-10]
        (tmp_path / "t.wav").write_bytes(blob)
        with pytest.raises(CorruptFile):
            read_wav(tmp_path / "t.wav")

    @pytest.mark.parametrize("blob", [b"RIFF\x10\x00", riff([(b"data", b"\0\0")]),
                                      riff([fmt_chunk()]), riff([fmt_chunk(channels=2), (b"data", b"\0\0")])])
    def test_corrupt(self, tmp_path, blob):
        (tmp_path / "c.wav").write_bytes(blob)
        with pytest.raises(CorruptFile):
            read_wav(tmp_path / "c.wav")

    def test_not_riff(self, tmp_path):
        (tmp_path / "n.wav").write_bytes(b"fLaC" + bytes(40))
        with pytest.raises(UnsupportedFormat):
            read_wav(tmp_path / "n.wav")


def _spec(rng, n_bins=7, n_frames=5):
    data = rng.standard_normal((n_bins, n_frames)) + 1j * rng.standard_normal((n_bins, n_frames))
    return Spectrogram(Method.CQA, data, np.linspace(0.1, 1, n_bins), 16000.0, 1724, 1596)


def _assert_same(a, b):
    assert type(a) is type(b)
    assert a.method is b.method
    assert a.data.tobytes() == b.data.tobytes() and a.data.shape == b.data.shape
    assert a.center_freqs.tobytes() == b.center_freqs.tobytes()
    assert (a.sample_rate, a.frame_len, a.hop) == (b.sample_rate, b.frame_len, b.hop)


class TestSpectrogramFormat:
    def test_header_layout(self, tmp_path, rng):
        s = _spec(rng)
        write_spectrogram(s, tmp_path / "s.bin")
        blob = (tmp_path / "s.bin").read_bytes()
        assert blob[:4] == bytes([0x41, 0x44, 0x46, 0x41])
        assert HEADER.size == 36
        fields = struct.unpack("<4sIBBHIIdII", blob[:36])
        assert fields == (b"ADFA", 1, 3, 0, 0, 7, 5, 16000.0, 1724, 1596)
        centers = np.frombuffer(blob, "<f8", 7, 36)
        np.testing.assert_array_equal(centers, s.center_freqs)
        # frame-major payload, (re, im) pairs
        first = struct.unpack("<4d", blob[36 + 56:36 + 56 + 32])
        assert first == (s.data[0, 0].real, s.data[0, 0].imag, s.data[1, 0].real, s.data[1, 0].imag)
        assert len(blob) == file_size_for(7, 5)

    def test_roundtrip_complex(self, tmp_path, rng):
        s = _spec(rng)
        write_spectrogram(s, tmp_path / "s.bin")
        _assert_same(s, read_spectrogram(tmp_path / "s.bin"))

    def test_roundtrip_log_power(self, tmp_path, rng):
        lp = log_power(_spec(rng))
        write_spectrogram(lp, tmp_path / "l.bin")
        back = read_spectrogram(tmp_path / "l.bin")
        assert isinstance(back, LogPowerSpectrogram) and back.floor_eps is None
        assert (tmp_path / "l.bin").read_bytes()[9] == 1
        _assert_same(lp, back)

    def test_empty(self, tmp_path):
        s = Spectrogram(Method.ADFA, np.zeros((863, 0), complex), np.linspace(0, 1, 863),
                        16000.0, 1724, 1596)
        write_spectrogram(s, tmp_path / "e.bin")
        assert (tmp_path / "e.bin").stat().st_size == 36 + 8 * 863
        _assert_same(s, read_spectrogram(tmp_path / "e.bin"))

    def test_bad_magic(self, tmp_path):
        (tmp_path / "r.bin").write_bytes(b"RIFF" + bytes(60))
        with pytest.raises(NotAdfaFile):
            read_spectrogram(tmp_path / "r.bin")

    def test_future_version(self, tmp_path, rng):
        write_spectrogram(_spec(rng), tmp_path / "v.bin")
        blob = bytearray((tmp_path / "v.bin").read_bytes())
        blob[4:8] = struct.pack("<I", 2)
        (tmp_path / "v.bin").write_bytes(bytes(blob))
        with pytest.raises(UnsupportedVersion):
            read_spectrogram(tmp_path / "v.bin")

    def test_short_payload(self, tmp_path, rng):
        s = _spec(rng, n_frames=10)
        write_spectrogram(s, tmp_path / "s.bin")
        blob = (tmp_path / "s.bin").read_bytes()
        (tmp_path / "s.bin").write_bytes(blob[:-16 * 7])
        with pytest.raises(CorruptFile):
            read_spectrogram(tmp_path / "s.bin")

    def test_csv_complex(self, tmp_path, rng):
        s = _spec(rng, 3, 2)
        write_spectrogram(s, tmp_path / "s.csv", Format.CSV)
        rows = list(csv.reader((tmp_path / "s.csv").open()))
        assert rows[0] == ["bin", "frame", "re", "im"]
        assert [(int(r[0]), int(r[1])) for r in rows[1:]] == [(b, k) for k in range(2) for b in range(3)]
        for b, k, re, im in rows[1:]:
            assert complex(float(re), float(im)) == s.data[int(b), int(k)]

    def test_csv_real(self, tmp_path, rng):
        lp = log_power(_spec(rng, 2, 2))
        write_spectrogram(lp, tmp_path / "l.csv", "csv")
        rows = list(csv.reader((tmp_path / "l.csv").open()))
        assert rows[0] == ["bin", "frame", "value"] and len(rows) == 5
        assert float(rows[2][2]) == lp.data[1, 0]

    def test_write_error(self, tmp_path, rng):
        with pytest.raises(WriteError):
            write_spectrogram(_spec(rng), tmp_path / "missing" / "x.bin")


class TestMatrixFormat:
    def test_dfa2_payload(self, tmp_path):
        write_matrix(build_dfa_matrix(2), tmp_path / "m.bin")
        blob = (tmp_path / "m.bin").read_bytes()
        assert np.frombuffer(blob, "<f8", 8, 36 + 16).tolist() == [1, 0, 1, 0, 1, 0, -1, 0]
        n_frames = struct.unpack_from("<I", blob, 16)[0]
        assert n_frames == 2

    def test_column_major_payload(self, tmp_path):
        m = build_adfa_matrix(3, 4)
        write_matrix(m, tmp_path / "m.bin")
        payload = np.frombuffer((tmp_path / "m.bin").read_bytes(), "<c16", offset=36 + 24)
        np.testing.assert_array_equal(payload[:3], m.entries[:, 0])
        np.testing.assert_array_equal(payload[3:6], m.entries[:, 1])

    @pytest.mark.parametrize("matrix", [
        build_dfa_matrix(16),
        build_adfa_matrix(9, 16, Normalization.INV_SQRT_COLS),
        build_mdfa_matrix(9, 16, MelConfig(16000)),
        build_cqa_matrix(9, 11, CqConfig(2, 3)),
    ], ids=["dfa", "adfa-norm", "mdfa", "cqa"])
    def test_roundtrip(self, tmp_path, matrix):
        write_matrix(matrix, tmp_path / "m.bin")
        back = read_matrix(tmp_path / "m.bin")
        assert back.method is matrix.method and back.normalization is matrix.normalization
        assert back.entries.tobytes() == matrix.entries.tobytes()
        assert back.center_freqs.tobytes() == matrix.center_freqs.tobytes()

    def test_863_by_1724_size(self, tmp_path):
        write_matrix(build_adfa_matrix(863, 1724), tmp_path / "big.bin")
        size = (tmp_path / "big.bin").stat().st_size
        # payload is 863 * 1724 * 16 = 23_804_992 bytes
        assert size - 36 - 8 * 863 == 23_804_992

    def test_mdfa_sample_rate_in_header(self, tmp_path):
        write_matrix(build_mdfa_matrix(9, 16, MelConfig(22050)), tmp_path / "m.bin")
        assert struct.unpack_from("<d", (tmp_path / "m.bin").read_bytes(), 20)[0] == 22050.0


class TestAudioBuffer:
    def test_validation(self):
        with pytest.raises(ValueError):
            AudioBuffer(0, np.zeros(3))
        with pytest.raises(ValueError):
            AudioBuffer(16000, [0.0, np.nan])

    def test_synthetic_noise(self):
        a, b = synthetic_noise(1.0), synthetic_noise(1.0)
        assert len(a) == 16000 and a.sample_rate == 16000
        assert a.samples.tobytes() == b.samples.tobytes()
        assert a.samples.min() >= -1 and a.samples.max() < 1
        assert abs(a.samples.mean()) < 0.02


def test_end_to_end_wav(tmp_path, rng):
    pcm = (rng.uniform(-1, 1, 16000) * 32767).astype(np.int16)
    audio = read_wav(write_pcm16(tmp_path / "in.wav", pcm))
    spec = analyze(audio, build_adfa_matrix(863, 1724), FrameConfig())
    write_spectrogram(spec, tmp_path / "out.bin")
    _assert_same(spec, read_spectrogram(tmp_path / "out.bin"))
