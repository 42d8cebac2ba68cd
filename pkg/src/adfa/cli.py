"""``adfa`` command line.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import sys

from adfa import _kernels
from adfa.basis import (
    CqConfig, MelConfig, MelFormula, Method, MethodParams, Normalization, build_matrix,
)
from adfa.engine import DEFAULT_FLOOR_EPS, analyze, bench, log_power
from adfa.errors import AdfaError, InvalidArgument, VerificationError
from adfa.framing import DEFAULT_FRAME_LEN, DEFAULT_OVERLAP, FrameConfig, TailPolicy, Window
from adfa.io import Format, read_wav, synthetic_noise, write_matrix, write_spectrogram
from adfa.verify import run_checks

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3

DEFAULT_BINS = 863

_FLAG_FOR_PARAM = {
    "n_bins": "--bins",
    "bins": "--bins",
    "n_cols": "--cols",
    "cols": "--cols",
    "frame_len": "--frame-len",
    "overlap": "--overlap",
    "hop": "--hop",
    "window": "--window",
    "base": "--cq-base",
    "bins_per_octave": "--cq-bins-per-octave",
    "sample_rate": "--sr",
    "eps": "--eps",
    "repeats": "--repeats",
    "threads": "--threads",
    "synthetic": "--synthetic",
}


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _add_method_flags(p, default_method="adfa"):
    p.add_argument("--method", choices=[m.name.lower() for m in Method], default=default_method)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS,
                   help="number of output frequency components (ignored for dfa in analyze)")
    p.add_argument("--normalization", choices=[n.value for n in Normalization], default="none")
    p.add_argument("--mel-formula", choices=[f.value for f in MelFormula], default="htk")
    p.add_argument("--cq-base", type=float, default=2.0)
    p.add_argument("--cq-bins-per-octave", type=int, default=96)


def _add_frame_flags(p):
    p.add_argument("--frame-len", type=int, default=DEFAULT_FRAME_LEN)
    p.add_argument("--overlap", type=int, default=DEFAULT_OVERLAP,
                   help="samples shared by consecutive frames (hop = frame-len - overlap)")
    p.add_argument("--hop", type=int, default=None, help="explicit hop; overrides --overlap")
    p.add_argument("--window", choices=[w.value for w in Window], default="blackman")
    p.add_argument("--tail", choices=[t.value for t in TailPolicy], default="drop",
                   help="drop the partial last frame, or zero-pad it")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="adfa", description="Matrix-based DFA / ADFA / MDFA / CQA spectral analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectrogram of a 16-bit PCM WAV file")
    p.add_argument("input")
    _add_method_flags(p)
    _add_frame_flags(p)
    p.add_argument("--log-power", action="store_true")
    p.add_argument("--eps", type=float, default=DEFAULT_FLOOR_EPS)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=[f.value for f in Format], default="binary")

    p = sub.add_parser("matrix", help="export an analysis matrix")
    _add_method_flags(p)
    p.add_argument("--cols", type=int, default=None, help="n_cols; default 2*(bins-1)")
    p.add_argument("--sr", type=float, default=16000.0, help="sample rate for mdfa")
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="run the numerical self-checks")
    p.add_argument("--bins", type=int, action="append", default=[],
                   help="extra n_bins for the orthogonality / half-spectrum suites")
    p.add_argument("--cols", type=int, default=None,
                   help="also check an ADFA matrix of --bins x --cols (may be non-orthogonal)")

    p = sub.add_parser("bench", help="matrix path vs naive per-term path timing")
    p.add_argument("input", nargs="?")
    p.add_argument("--synthetic", type=float, default=None, metavar="SECONDS",
                   help="use deterministic white noise of this length instead of a WAV")
    p.add_argument("--sr", type=float, default=16000.0, help="sample rate of --synthetic input")
    _add_method_flags(p)
    _add_frame_flags(p)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--threads", type=int, default=None,
                   help="threads per path (default: ADFA_THREADS or 1)")
    return parser


# ---------------------------------------------------------------------------
# flag validation
# ---------------------------------------------------------------------------


def _frame_config(args):
    return FrameConfig(
        frame_len=args.frame_len,
        overlap=args.overlap,
        window=Window(args.window),
        tail_policy=TailPolicy(args.tail),
        hop_override=args.hop,
    )


def _method_params(args, n_cols, sample_rate):
    method = Method[args.method.upper()]
    norm = Normalization(args.normalization)
    if method is Method.DFA:
        return MethodParams(method, n_cols, n_cols, norm)
    min_bins = 1 if method is Method.CQA else 2
    if args.bins < min_bins:
        raise InvalidArgument(f"{method.name} needs at least {min_bins} bins, got {args.bins}",
                              param="bins")
    mel = cq = None
    if method is Method.MDFA:
        mel = MelConfig(sample_rate, MelFormula(args.mel_formula))
    if method is Method.CQA:
        cq = CqConfig(args.cq_base, args.cq_bins_per_octave)
    return MethodParams(method, args.bins, n_cols, norm, mel=mel, cq=cq)


def _precheck_method(args):
    # everything that does not depend on the input's sample rate
    _method_params(args, args.frame_len, 16000.0)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_analyze(args):
    config = _frame_config(args)
    if not args.eps > 0:
        raise InvalidArgument(f"must be > 0, got {args.eps}", param="eps")
    _precheck_method(args)
    audio = read_wav(args.input)
    params = _method_params(args, config.frame_len, float(audio.sample_rate))
    spec = analyze(audio, build_matrix(params), config)
    if args.log_power:
        spec = log_power(spec, args.eps)
    write_spectrogram(spec, args.out, Format(args.format))
    print(f"wrote {args.out} method={args.method} n_bins={spec.n_bins} n_frames={spec.n_frames}")
    return EXIT_OK


def cmd_matrix(args):
    method = Method[args.method.upper()]
    if method is Method.DFA:
        n_cols = args.bins if args.cols is None else args.cols
        if n_cols != args.bins:
            raise InvalidArgument("dfa matrices are square; --cols must equal --bins", param="cols")
        if args.bins < 1:
            raise InvalidArgument(f"must be >= 1, got {args.bins}", param="bins")
    else:
        _method_params(args, 1, args.sr)
        n_cols = max(2 * (args.bins - 1), 1) if args.cols is None else args.cols
        if n_cols < 1:
            raise InvalidArgument(f"must be >= 1, got {n_cols}", param="cols")
    params = _method_params(args, n_cols, args.sr)
    if method is Method.DFA:
        params = MethodParams(Method.DFA, args.bins, args.bins, params.normalization)
    matrix = build_matrix(params)
    write_matrix(matrix, args.out)
    print(f"wrote {args.out} method={args.method} n_bins={matrix.n_bins} n_cols={matrix.n_cols}")
    return EXIT_OK


def cmd_verify(args):
    for b in args.bins:
        if b < 2:
            raise InvalidArgument(f"must be >= 2, got {b}", param="bins")
    truncated = None
    if args.cols is not None:
        if not args.bins:
            raise InvalidArgument("--cols needs a --bins value", param="cols")
        if args.cols < 1:
            raise InvalidArgument(f"must be >= 1, got {args.cols}", param="cols")
        truncated = (args.bins[-1], args.cols)
    checks = run_checks(extra_bins=args.bins, truncated=truncated)
    for c in checks:
        print(c.line())
    for c in checks:
        if c.expected_violation:
            print(f"warning: n_cols != 2*(n_bins-1) for {c.params}; orthogonality not guaranteed",
                  file=sys.stderr)
    failed = [c for c in checks if not c.passed]
    print(f"verify checks={len(checks)} failed={len(failed)} backend={_kernels.BACKEND}")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_bench(args):
    config = _frame_config(args)
    if args.repeats < 1:
        raise InvalidArgument(f"must be >= 1, got {args.repeats}", param="repeats")
    threads = args.threads
    if threads is None:
        try:
            threads = _kernels.env_threads() or 1
        except ValueError as exc:
            raise InvalidArgument(str(exc), param="threads") from None
    if threads < 1:
        raise InvalidArgument(f"must be >= 1, got {threads}", param="threads")
    if (args.input is None) == (args.synthetic is None):
        raise UsageError("input", "give exactly one of a WAV path or --synthetic SECONDS")
    _precheck_method(args)
    if args.synthetic is not None:
        if not args.sr > 0:
            raise InvalidArgument(f"must be > 0, got {args.sr}", param="sample_rate")
        audio = synthetic_noise(args.synthetic, args.sr)
        source = f"synthetic:{args.synthetic:g}s"
    else:
        audio = read_wav(args.input)
        source = args.input
    params = _method_params(args, config.frame_len, float(audio.sample_rate))
    report = bench(build_matrix(params), audio, config, repeats=args.repeats, threads=threads)
    print(report.record(method=args.method, input=source))
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "matrix": cmd_matrix,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except InvalidArgument as exc:
        flag = _FLAG_FOR_PARAM.get(exc.param, exc.param or "argument")
        if args.command in ("analyze", "bench") and flag == "--cols":
            flag = "--frame-len"
        print(f"adfa {args.command}: error: {flag}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"adfa {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (OSError, AdfaError) as exc:
        print(f"adfa {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
