"""Short-time framing and tapering windows.

Defaults follow the analysis setup used for the 863-bin features: 1724-sample
frames sharing 128 samples with their neighbour (hop 1596) and a Blackman
window.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from adfa.errors import InvalidArgument

DEFAULT_FRAME_LEN = 1724
DEFAULT_OVERLAP = 128


class Window(enum.Enum):
    BLACKMAN = "blackman"
    HANN = "hann"
    RECTANGULAR = "rectangular"


class TailPolicy(enum.Enum):
    DROP_PARTIAL = "drop"
    ZERO_PAD_LAST = "pad"


@dataclass(frozen=True)
class FrameConfig:
    """Framing parameters.

    ``overlap`` is the number of samples consecutive frames share, so the hop
    is ``frame_len - overlap``.  ``hop_override`` replaces that derived hop
    when set (for readers who take "overlap" to mean the stride).
    """

    frame_len: int = DEFAULT_FRAME_LEN
    overlap: int = DEFAULT_OVERLAP
    window: Window = Window.BLACKMAN
    tail_policy: TailPolicy = TailPolicy.DROP_PARTIAL
    hop_override: int | None = None

    def __post_init__(self):
        if int(self.frame_len) != self.frame_len or self.frame_len < 1:
            raise InvalidArgument(f"frame_len must be >= 1, got {self.frame_len}", param="frame_len")
        if self.hop_override is None:
            if int(self.overlap) != self.overlap or not 0 <= self.overlap < self.frame_len:
                raise InvalidArgument(
                    f"overlap must satisfy 0 <= overlap < frame_len ({self.frame_len}), "
                    f"got {self.overlap}",
                    param="overlap",
                )
        elif int(self.hop_override) != self.hop_override or self.hop_override < 1:
            raise InvalidArgument(f"hop must be >= 1, got {self.hop_override}", param="hop")

    @property
    def hop(self) -> int:
        if self.hop_override is not None:
            return int(self.hop_override)
        return self.frame_len - self.overlap


def make_window(kind: Window, length: int) -> np.ndarray:
    """Symmetric window of ``length`` samples.

    Blackman uses the 0.42 / 0.5 / 0.08 coefficients in the factored form
    ``0.16 (1 - cos x)(2.125 - cos x)``, which equals
    ``0.42 - 0.5 cos x + 0.08 cos 2x`` but gives exact zeros at the ends and
    an exact 1 at the centre of odd-length windows.  Only the first half is
    evaluated; the second half is its mirror image.
    """
    if int(length) != length or length < 1:
        raise InvalidArgument(f"window length must be >= 1, got {length}", param="frame_len")
    if kind is Window.RECTANGULAR:
        return np.ones(length)
    if length < 2:
        raise InvalidArgument(f"{kind.value} window needs length >= 2, got {length}",
                              param="frame_len")
    half = (length + 1) // 2
    c = np.cos(2.0 * np.pi * np.arange(half) / (length - 1))
    if kind is Window.BLACKMAN:
        head = 0.16 * (1.0 - c) * (2.125 - c)
    elif kind is Window.HANN:
        head = 0.5 * (1.0 - c)
    else:
        raise InvalidArgument(f"unknown window {kind!r}", param="window")
    return np.concatenate([head, head[: length - half][::-1]])


def num_frames(signal_len: int, config: FrameConfig) -> int:
    if signal_len <= 0:
        return 0
    hop = config.hop
    if config.tail_policy is TailPolicy.DROP_PARTIAL:
        if signal_len < config.frame_len:
            return 0
        return (signal_len - config.frame_len) // hop + 1
    return math.ceil(max(signal_len - config.frame_len, 0) / hop) + 1


def frame_starts(signal_len: int, config: FrameConfig) -> np.ndarray:
    return np.arange(num_frames(signal_len, config), dtype=np.int64) * config.hop


def frames(signal, config: FrameConfig) -> np.ndarray:
    """Windowed frames as a ``(n_frames, frame_len)`` float64 array.

    ``signal`` may be an :class:`~adfa.io.AudioBuffer` or a 1-D array.  Frame
    ``k`` covers samples ``[k*hop, k*hop + frame_len)``; with
    ``ZERO_PAD_LAST`` the missing tail of the final frame is zero before the
    window is applied.
    """
    x = np.asarray(getattr(signal, "samples", signal), dtype=np.float64)
    if x.ndim != 1:
        raise InvalidArgument("signal must be one-dimensional", param="signal")
    n = num_frames(x.shape[0], config)
    L = config.frame_len
    if n == 0:
        return np.zeros((0, L))
    needed = (n - 1) * config.hop + L
    if needed > x.shape[0]:
        x = np.concatenate([x, np.zeros(needed - x.shape[0])])
    view = np.lib.stride_tricks.sliding_window_view(x, L)[:: config.hop][:n]
    return view * make_window(config.window, L)
