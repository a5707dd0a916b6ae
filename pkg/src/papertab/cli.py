"""Command-line entry point.

Every configuration key has a mirrored flag (``--<section>-<key>``) that
overrides the config file; ``--handedness`` and ``--preview-port`` are
shorthands for their [pipeline] keys. Exit codes: 0 success, 1 I/O error,
2 configuration error.
"""

import argparse
import sys

from .config import SCHEMA, ConfigError, load_config
from .runner import EXIT_CONFIG_ERROR, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papertab",
        description="Convert a webcam view of handwriting on paper into a "
                    "rectified, binarized content stream.",
    )
    parser.add_argument("--input", required=True,
                        help="directory of numbered PNG frames, or a .y4m file")
    parser.add_argument("--output", required=True,
                        help="output directory (image-sequence) or .y4m path (raw-video)")
    parser.add_argument("--config", default=None, help="INI configuration file")
    parser.add_argument("--handedness", choices=("left", "right"), default=None,
                        help="writing hand; left mirrors the frame before segmentation")
    parser.add_argument("--preview-port", type=int, default=None, metavar="N",
                        help="serve a read-only MJPEG preview on this port (0 = ephemeral)")
    parser.add_argument("--diagnostics", default=None, metavar="DIR",
                        help="dump per-stage intermediate artifacts per frame")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the timing summary and progress output")
    for section, key in SCHEMA:
        if (section, key) in (("pipeline", "handedness"), ("pipeline", "preview_port")):
            continue
        flag = f"--{section}-{key}".replace("_", "-")
        parser.add_argument(flag, default=None, metavar="V", dest=f"{section}.{key}",
                            help=f"override [{section}] {key}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides: dict[tuple[str, str], str] = {}
    for section, key in SCHEMA:
        value = getattr(args, f"{section}.{key}", None)
        if value is not None:
            overrides[(section, key)] = value
    if args.handedness is not None:
        overrides[("pipeline", "handedness")] = args.handedness
    if args.preview_port is not None:
        overrides[("pipeline", "preview_port")] = str(args.preview_port)

    try:
        config = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    report = run(config, args.input, args.output,
                 diagnostics_dir=args.diagnostics, quiet=args.quiet)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
