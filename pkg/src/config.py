import argparse
import math
import os
import sys
from argparse import Namespace
from pathlib import Path
from typing import List, Optional

from src.errors import ConfigError
from src.keywords import ExitCode, MergeOrder, StatsFormat

KEY_ENV = "STEGODOC_KEY"
MAX_KEY = (1 << 64) - 1
COMMANDS = ("halftone", "inspect", "embed", "extract", "metrics", "codec", "bench")


def parse_key(text: str) -> int:
    text = text.strip()
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text, 10)
    except ValueError:
        raise ConfigError(f"key must be a decimal or 0x-hex integer, got {text!r}") from None
    if not 0 <= value <= MAX_KEY:
        raise ConfigError(f"key must fit in 64 bits, got {text}")
    return value


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


class Config:
    def __init__(self):
        self.command = ""

        # shared key of sender and receiver
        self.key: Optional[int] = None

        # T3: embeddable pixels need a 3x3 standard deviation above it
        self.sd_threshold = 2.5

        # candidate T3 values tried by embed, largest first
        self.auto_sd_thresholds: List[float] = []

        # quadtree stops splitting once min(w, h) <= 2 * min_length
        self.min_length = 4

        # T1: intensity spread that makes a block divisible
        self.split_threshold = 1

        self.merge_order = MergeOrder.VERTICAL_FIRST

        self.stats = StatsFormat.NONE

        # read non-netpbm inputs through Pillow
        self.allow_other_formats = False

        self.log_level = "INFO"
        self.log_dir: Optional[str] = None

        # bench sweep
        self.sd_thresholds: List[float] = [0.0, 2.5, 5.0]
        self.min_lengths: List[int] = [4]

        self.settings: Optional[Namespace] = None

    def check(self, settings: Namespace):
        self.settings = settings
        self.command = settings.command
        self.log_level = settings.log_level.upper()
        self.log_dir = settings.log_dir or None
        self.allow_other_formats = getattr(settings, "allow_other_formats", False)

        if hasattr(settings, "min_length"):
            if settings.min_length < 1:
                raise ConfigError("minimum rectangle length must be at least 1")
            self.min_length = settings.min_length

        if hasattr(settings, "threshold"):
            if settings.threshold < 1:
                raise ConfigError("split threshold must be at least 1")
            self.split_threshold = settings.threshold

        if hasattr(settings, "merge_order"):
            try:
                self.merge_order = MergeOrder.of(settings.merge_order)
            except ValueError as e:
                raise ConfigError(str(e)) from None

        if hasattr(settings, "sd_threshold"):
            self.sd_threshold = self._check_sd(settings.sd_threshold)

        if getattr(settings, "auto_sd_threshold", None):
            self.auto_sd_thresholds = [self._check_sd(t) for t in settings.auto_sd_threshold]

        if hasattr(settings, "stats"):
            self.stats = StatsFormat(settings.stats)

        if self.command in ("embed", "extract"):
            self.key = self._resolve_key(settings.key)

        if self.command == "bench":
            self.sd_thresholds = [self._check_sd(t) for t in settings.sd_thresholds]
            if any(m < 1 for m in settings.min_lengths):
                raise ConfigError("minimum rectangle lengths must be at least 1")
            self.min_lengths = settings.min_lengths

        for name in ("host", "doc", "stego", "ref", "test", "input"):
            path = getattr(settings, name, None)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"--{name} {path} does not exist")

        if self.log_dir is not None:
            Path(self.log_dir).mkdir(parents=True, exist_ok=True)

    @staticmethod
    def _check_sd(value: float) -> float:
        if not math.isfinite(value) or value < 0:
            raise ConfigError(f"sd threshold must be finite and non-negative, got {value}")
        return value

    @staticmethod
    def _resolve_key(flag: Optional[str]) -> int:
        if flag is not None and flag != "":
            return parse_key(flag)
        env = os.environ.get(KEY_ENV, "")
        if env != "":
            return parse_key(env)
        raise ConfigError(f"a key is required: pass --key or set {KEY_ENV}")


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with ExitCode.USAGE."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.USAGE, f"{self.prog}: error: {message}\n")


def _add_pipeline_options(parser):
    parser.add_argument('--min-length',
                        help='minimum rectangle length of the quadtree, default=4',
                        type=int, required=False, default=4)
    parser.add_argument('--threshold',
                        help='intensity spread that splits a block (T1), default=1',
                        type=int, required=False, default=1)
    parser.add_argument('--merge-order',
                        help='order of the two rectangle merging passes',
                        choices=[m.value for m in MergeOrder], required=False,
                        default=MergeOrder.VERTICAL_FIRST.value)


def _add_format_option(parser):
    parser.add_argument('--allow-other-formats',
                        help='read non-netpbm images (PNG, BMP, ...) through Pillow',
                        action='store_true')


def parse_args(argv: Optional[List[str]] = None) -> Namespace:
    common = ArgumentParser(add_help=False)
    common.add_argument('--log-level',
                        help='loguru level, default=INFO',
                        type=str, required=False, default="INFO")
    common.add_argument('--log-dir',
                        help='also write rotating log files to this folder',
                        type=str, required=False, default="")

    parser = ArgumentParser(prog="stegodoc",
                            description="Hide scanned text documents in gray-level images.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("halftone", parents=[common], help="convert a gray document to a PBM halftone or back")
    p.add_argument('--input', help='input .pgm (or .pbm with --inverse)', type=str, required=True)
    p.add_argument('--out', help='output .pbm (or .pgm with --inverse)', type=str, required=True)
    p.add_argument('--inverse', help='inverse halftone a .pbm into a .pgm', action='store_true')
    _add_format_option(p)

    p = sub.add_parser("inspect", parents=[common], help="dump quadtree leaves and content rectangles as CSV")
    p.add_argument('--input', help='gray document (.pgm) or halftone (.pbm)', type=str, required=True)
    p.add_argument('--what', help='which rectangles to list',
                   choices=["all", "leaves", "content", "merged"], default="all")
    _add_pipeline_options(p)
    _add_format_option(p)

    p = sub.add_parser("embed", parents=[common], help="hide a document in a host image")
    p.add_argument('--host', help='host image (.pgm)', type=str, required=True)
    p.add_argument('--doc', help='scanned document (.pgm)', type=str, required=True)
    p.add_argument('--key', help=f'64-bit key, decimal or 0x-hex (default: ${KEY_ENV})', type=str, default=None)
    p.add_argument('--sd-threshold', help='T3, default=2.5', type=float, default=2.5)
    p.add_argument('--auto-sd-threshold',
                   help='extension: comma separated T3 candidates, the largest that fits is used',
                   type=parse_float_list, default=None)
    p.add_argument('--out', help='stego image (.pgm)', type=str, required=True)
    p.add_argument('--stats', help='print embedding statistics', choices=[s.value for s in StatsFormat],
                   default=StatsFormat.NONE.value)
    _add_pipeline_options(p)
    _add_format_option(p)

    p = sub.add_parser("extract", parents=[common], help="recover a document from a stego image")
    p.add_argument('--stego', help='stego image (.pgm)', type=str, required=True)
    p.add_argument('--key', help=f'64-bit key, decimal or 0x-hex (default: ${KEY_ENV})', type=str, default=None)
    p.add_argument('--sd-threshold', help='T3 used at embedding, default=2.5', type=float, default=2.5)
    p.add_argument('--out-halftone', help='recovered halftone (.pbm)', type=str, default="")
    p.add_argument('--out-gray', help='inverse halftoned document (.pgm)', type=str, default="")
    _add_format_option(p)

    p = sub.add_parser("metrics", parents=[common], help="print psnr,ssim of two images")
    p.add_argument('--ref', help='reference image', type=str, required=True)
    p.add_argument('--test', help='test image', type=str, required=True)
    _add_format_option(p)

    p = sub.add_parser("codec", parents=[common], help="decimal coding of raw bit files")
    p.add_argument('action', choices=["encode", "decode"])
    p.add_argument('--input', help='input bit file', type=str, required=True)
    p.add_argument('--out', help='output bit file', type=str, required=True)

    p = sub.add_parser("bench", parents=[common], help="sweep hosts x documents x T3 x minimum length")
    p.add_argument('--hosts', help='host images', nargs='*', default=[])
    p.add_argument('--docs', help='document images', nargs='*', default=[])
    p.add_argument('--sd-thresholds', help='comma separated T3 values, default=0,2.5,5',
                   type=parse_float_list, default=[0.0, 2.5, 5.0])
    p.add_argument('--min-lengths', help='comma separated minimum rectangle lengths, default=4',
                   type=parse_int_list, default=[4])
    p.add_argument('--threshold', help='intensity spread that splits a block (T1), default=1',
                   type=int, default=1)
    p.add_argument('--merge-order', choices=[m.value for m in MergeOrder],
                   default=MergeOrder.VERTICAL_FIRST.value)
    p.add_argument('--out', help='CSV report, default=stdout', type=str, default="")
    _add_format_option(p)

    return parser.parse_args(argv)
