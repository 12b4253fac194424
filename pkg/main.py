# main.py

import argparse
import sys
import os

# Add the current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from bresse.exceptions import BresseError
from bresse.pipeline import COMMANDS, EXIT_ERROR, run
from bresse.runconfig import parse_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bresse",
        description="Boundary-damped Bresse beam: simulation, spectra and stability certificates",
    )
    parser.add_argument("command", choices=COMMANDS, help="Analysis to run")
    parser.add_argument("--config", help="Flat JSON run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="Override one configuration entry (repeatable)")
    parser.add_argument("--out", help="Output directory (default: $BRESSE_OUTPUT_DIR or ./output)")
    parser.add_argument("--plot", action="store_true", help="Also write an SVG plot of the CSV report")
    parser.add_argument("--progress", action="store_true", help="Show progress bars for long loops")
    parser.add_argument("--log-level", default="INFO", help="Logging level")
    return parser


def main(argv=None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)

    try:
        config = parse_config(args.config, args.overrides, args.out)
    except BresseError as e:
        print(f"✗ Invalid configuration: {e}")
        return EXIT_ERROR

    print("\n" + "=" * 60)
    print(f" bresse {args.command}  (N={config.N}, scenario={config.scenario.value})")
    print("=" * 60 + "\n")
    return run(config, args.command, plot=args.plot, progress=args.progress, log_level=args.log_level)


if __name__ == "__main__":
    sys.exit(main())
