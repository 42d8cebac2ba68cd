"""Audio input and spectrogram / matrix serialization.

Binary layout (all little-endian), see ``docs/format.md``::

    offset  type   field
    0       4s     magic b"ADFA"
    4       u32    version (1)
    8       u8     method code (0 DFA, 1 ADFA, 2 MDFA, 3 CQA)
    9       u8     dtype (0 complex as two f64, 1 real f64)
    10      u16    reserved, 0
    12      u32    n_bins
    16      u32    n_frames   (n_cols for matrix files)
    20      f64    sample_rate
    28      u32    frame_len
    32      u32    hop
    36      f64[n_bins]            center frequencies
    ...     payload, frame-major   (frame 0's n_bins values, then frame 1, ...)

Concurrent writes to the same path are undefined.
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

import numpy as np

from adfa import _kernels
from adfa.basis import AnalysisMatrix, Method, MethodParams, Normalization
from adfa.engine import LogPowerSpectrogram, Spectrogram
from adfa.errors import CorruptFile, InvalidArgument, NotAdfaFile, UnsupportedFormat, UnsupportedVersion, WriteError

MAGIC = b"ADFA"
VERSION = 1
HEADER = struct.Struct("<4sIBBHIIdII")

DTYPE_COMPLEX = 0
DTYPE_REAL = 1

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class Format(enum.Enum):
    BINARY = "binary"
    CSV = "csv"


@dataclass(eq=False)
class AudioBuffer:
    """Mono samples (nominally in [-1, 1)) and their sample rate in Hz."""

    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if not self.sample_rate > 0:
            raise InvalidArgument(f"sample_rate must be > 0, got {self.sample_rate}",
                                  param="sample_rate")
        if self.samples.ndim != 1:
            raise InvalidArgument("samples must be one-dimensional", param="samples")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidArgument("samples must be finite", param="samples")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


LCG_SEED = 0x5EED
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407


def synthetic_noise(seconds, sample_rate=16000) -> AudioBuffer:
    """Deterministic white noise in [-1, 1) from a fixed-seed 64-bit LCG.

    The state is advanced before each draw and its top 53 bits give the
    uniform variate, so the sequence is identical on every machine.
    """
    if not seconds >= 0:
        raise InvalidArgument(f"seconds must be >= 0, got {seconds}", param="synthetic")
    n = int(round(seconds * sample_rate))
    samples = _kernels.lcg_uniform(n, LCG_SEED, LCG_MULTIPLIER, LCG_INCREMENT)
    return AudioBuffer(int(sample_rate), samples)


# ---------------------------------------------------------------------------
# WAV
# ---------------------------------------------------------------------------


def _iter_chunks(blob, path):
    pos = 12
    while pos + 8 <= len(blob):
        chunk_id, size = struct.unpack_from("<4sI", blob, pos)
        body = pos + 8
        if body + size > len(blob):
            raise CorruptFile(f"{path}: chunk {chunk_id!r} truncated "
                              f"({len(blob) - body} of {size} bytes present)")
        yield chunk_id, blob[body:body + size]
        pos = body + size + (size & 1)
    if pos < len(blob) and len(blob) - pos < 8 and blob[pos:].strip(b"\0"):
        raise CorruptFile(f"{path}: trailing partial chunk header")


def read_wav(path) -> AudioBuffer:
    """Read a 16-bit PCM RIFF/WAVE file, averaging channels to mono.

    Raises FileNotFoundError, :class:`UnsupportedFormat` (non-PCM or bit
    depth other than 16) or :class:`CorruptFile`.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12:
        if blob and (blob.startswith(b"RIFF") or b"RIFF".startswith(blob)):
            raise CorruptFile(f"{path}: truncated RIFF header")
        raise UnsupportedFormat(f"{path}: not a RIFF/WAVE file")
    riff, _, wave = struct.unpack_from("<4sI4s", blob, 0)
    if riff != b"RIFF" or wave != b"WAVE":
        raise UnsupportedFormat(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    for chunk_id, body in _iter_chunks(blob, path):
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise CorruptFile(f"{path}: fmt chunk is {len(body)} bytes, need 16")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            tag = fmt[0]
            if tag == WAVE_FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise CorruptFile(f"{path}: extensible fmt chunk too short")
                tag = struct.unpack_from("<H", body, 24)[0]
            fmt = (tag,) + fmt[1:]
        elif chunk_id == b"data":
            if fmt is None:
                raise CorruptFile(f"{path}: data chunk before fmt chunk")
            data = body
            break
    if fmt is None:
        raise CorruptFile(f"{path}: missing fmt chunk")
    tag, channels, sample_rate, _, _, bits = fmt
    if tag != WAVE_FORMAT_PCM:
        raise UnsupportedFormat(f"{path}: format code 0x{tag:04X} is not integer PCM",
                                format_code=tag)
    if bits != 16:
        raise UnsupportedFormat(f"{path}: {bits}-bit PCM is not supported (need 16)",
                                format_code=tag)
    if channels < 1 or sample_rate < 1:
        raise CorruptFile(f"{path}: {channels} channels at {sample_rate} Hz")
    if data is None:
        raise CorruptFile(f"{path}: missing data chunk")
    frame_bytes = 2 * channels
    if len(data) % frame_bytes:
        raise CorruptFile(f"{path}: data chunk holds a partial sample frame")
    pcm = np.frombuffer(data, dtype="<i2").reshape(-1, channels).astype(np.float64) / 32768.0
    return AudioBuffer(sample_rate, pcm.mean(axis=1) if channels > 1 else pcm[:, 0].copy())


# ---------------------------------------------------------------------------
# ADFA binary / CSV
# ---------------------------------------------------------------------------


def _header(method, dtype, n_bins, n_frames, sample_rate, frame_len, hop):
    return HEADER.pack(MAGIC, VERSION, int(method), dtype, 0, n_bins, n_frames,
                       float(sample_rate), frame_len, hop)


def _write_bytes(path, chunks):
    try:
        with open(path, "wb") as fh:
            for c in chunks:
                fh.write(c)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_csv(spec, path):
    complex_data = np.iscomplexobj(spec.data)
    lines = ["bin,frame,re,im" if complex_data else "bin,frame,value"]
    for k in range(spec.n_frames):
        col = spec.data[:, k]
        for b in range(spec.n_bins):
            v = col[b]
            if complex_data:
                lines.append(f"{b},{k},{float(v.real)!r},{float(v.imag)!r}")
            else:
                lines.append(f"{b},{k},{float(v)!r}")
    _write_bytes(path, ["\n".join(lines).encode("ascii") + b"\n"])


def write_spectrogram(spec, path, format=Format.BINARY) -> None:
    if Format(format) is Format.CSV:
        _write_csv(spec, path)
        return
    complex_data = np.iscomplexobj(spec.data)
    dtype = DTYPE_COMPLEX if complex_data else DTYPE_REAL
    payload = np.ascontiguousarray(spec.data.T).astype("<c16" if complex_data else "<f8")
    header = _header(spec.method, dtype, spec.n_bins, spec.n_frames, spec.sample_rate,
                     spec.frame_len, spec.hop)
    centers = np.asarray(spec.center_freqs, dtype="<f8")
    _write_bytes(path, [header, centers.tobytes(), payload.tobytes()])


def _read_envelope(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise NotAdfaFile(f"{path}: bad magic {blob[:4]!r}")
    if len(blob) < HEADER.size:
        raise CorruptFile(f"{path}: header truncated ({len(blob)} bytes)")
    (_, version, method, dtype, _reserved, n_bins, n_frames, sample_rate,
     frame_len, hop) = HEADER.unpack_from(blob, 0)
    if version > VERSION:
        raise UnsupportedVersion(f"{path}: format version {version} (this reader knows {VERSION})")
    if version < 1:
        raise CorruptFile(f"{path}: invalid version {version}")
    try:
        method = Method(method)
    except ValueError:
        raise CorruptFile(f"{path}: unknown method code {method}") from None
    if dtype not in (DTYPE_COMPLEX, DTYPE_REAL):
        raise CorruptFile(f"{path}: unknown dtype code {dtype}")
    width = 16 if dtype == DTYPE_COMPLEX else 8
    expected = HEADER.size + 8 * n_bins + width * n_bins * n_frames
    if len(blob) != expected:
        raise CorruptFile(f"{path}: {len(blob)} bytes on disk, header implies {expected}")
    centers = np.frombuffer(blob, dtype="<f8", count=n_bins, offset=HEADER.size)
    payload = np.frombuffer(blob, dtype="<c16" if width == 16 else "<f8",
                            count=n_bins * n_frames, offset=HEADER.size + 8 * n_bins)
    data = payload.reshape(n_frames, n_bins).T
    data = np.array(data, dtype=np.complex128 if width == 16 else np.float64)
    return method, dtype, data, np.array(centers, dtype=np.float64), sample_rate, frame_len, hop


def read_spectrogram(path):
    """Inverse of :func:`write_spectrogram` (binary format).

    Complex files load as :class:`Spectrogram`, real ones as
    :class:`LogPowerSpectrogram` with ``floor_eps=None``.
    """
    method, dtype, data, centers, sr, frame_len, hop = _read_envelope(path)
    if dtype == DTYPE_COMPLEX:
        return Spectrogram(method, data, centers, sr, frame_len, hop)
    return LogPowerSpectrogram(method, data, centers, sr, frame_len, hop, floor_eps=None)


def write_matrix(matrix: AnalysisMatrix, path) -> None:
    """Write a matrix in the spectrogram envelope: dtype 0, ``n_frames`` holds
    ``n_cols``, ``frame_len = n_cols``, ``hop = 0``, and the payload is stored
    column by column."""
    sr = 0.0
    if matrix.params is not None and matrix.params.mel is not None:
        sr = matrix.params.mel.sample_rate
    header = _header(matrix.method, DTYPE_COMPLEX, matrix.n_bins, matrix.n_cols, sr,
                     matrix.n_cols, 0)
    centers = np.asarray(matrix.center_freqs, dtype="<f8")
    payload = np.ascontiguousarray(matrix.entries.T).astype("<c16")
    _write_bytes(path, [header, centers.tobytes(), payload.tobytes()])


def read_matrix(path) -> AnalysisMatrix:
    method, dtype, data, centers, _, _, _ = _read_envelope(path)
    if dtype != DTYPE_COMPLEX:
        raise CorruptFile(f"{path}: matrix files must hold complex data")
    n_bins, n_cols = data.shape
    norm = Normalization.NONE
    if data.size and data[0, 0] != 1.0:
        norm = Normalization.INV_SQRT_COLS
    params = None
    if method in (Method.DFA, Method.ADFA):
        params = MethodParams(method, n_bins, n_cols, norm)
    return AnalysisMatrix(method, data, centers, norm, params)


def file_size_for(n_bins, n_frames, complex_data=True) -> int:
    width = 16 if complex_data else 8
    return HEADER.size + 8 * n_bins + width * n_bins * n_frames


__all__ = [
    "AudioBuffer", "Format", "read_wav", "write_spectrogram", "read_spectrogram",
    "write_matrix", "read_matrix", "file_size_for", "synthetic_noise", "MAGIC", "VERSION", "HEADER",
]
