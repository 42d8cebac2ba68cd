"""Matrix-based discrete Fourier analysis: DFA, ADFA, MDFA and CQA spectrograms."""
from adfa._kernels import BACKEND
from adfa.basis import (
    AnalysisMatrix,
    CqConfig,
    MelConfig,
    MelFormula,
    Method,
    MethodParams,
    Normalization,
    build_adfa_matrix,
    build_cqa_matrix,
    build_dfa_matrix,
    build_matrix,
    build_mdfa_matrix,
    cq_center_freqs,
    hz_to_mel,
    mel_center_freqs,
    mel_to_hz,
    verify_orthogonality,
)
from adfa.engine import (
    LogPowerSpectrogram,
    Spectrogram,
    analyze,
    analyze_frame,
    bench,
    direct_eval_oracle,
    direct_spectrogram,
    log_power,
)
from adfa.errors import (
    AdfaError,
    CorruptFile,
    InvalidArgument,
    NotAdfaFile,
    UnsupportedFormat,
    UnsupportedVersion,
    VerificationError,
    WriteError,
)
from adfa.framing import FrameConfig, TailPolicy, Window, frames, make_window, num_frames
from adfa.io import (
    AudioBuffer,
    Format,
    read_matrix,
    read_spectrogram,
    read_wav,
    synthetic_noise,
    write_matrix,
    write_spectrogram,
)

__version__ = "0.1.0"
