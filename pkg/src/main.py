import argparse
import sys
from typing import List, Optional

from src.core.configs import settings
from src.core.errors import ConfigError, DomainError, EchoLabError, NumericalError
from src.models.experiment import EXPERIMENT_KINDS
from src.services.config_loader import parse_overrides, resolve_config
from src.services.experiments import run
from src.services.recipes import list_recipes
from src.utils.logging import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description=settings.description,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Experiment kinds:
  {", ".join(EXPERIMENT_KINDS)}

Examples:
  echo-lab --list
  echo-lab fig1 --workers 4
  echo-lab fidelity-curve --set n_atoms=64 --set k_set=-32:32 --out -
  echo-lab echo-matrix --config regular.cfg --set l=-31
        """,
    )
    parser.add_argument("name", nargs="?", help="Experiment kind or recipe name")
    parser.add_argument("--list", action="store_true", help="List the built-in recipes and exit")
    parser.add_argument("--config", type=str, default=None, help="Flat key = value config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one config key (repeatable)",
    )
    parser.add_argument("--out", type=str, default=None, help="Output CSV path, '-' for stdout")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes for sweeps")
    parser.add_argument("--seed", type=int, default=None, help="Seed for random observables and noise")
    parser.add_argument("--log-level", type=str, default=settings.log_level, help="Logging level")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the echo-lab command.

    Returns:
        int: 0 on success, 1 on a config error, 2 on a numerical failure
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, settings.use_colors)

    if args.list or not args.name:
        print(list_recipes())
        return EXIT_OK

    try:
        config = resolve_config(
            args.name,
            config_file=args.config,
            overrides=parse_overrides(args.overrides),
            flags={"out": args.out, "workers": args.workers, "seed": args.seed},
        )
        path = run(config)
    except (ConfigError, DomainError) as e:
        logger.error(str(e))
        print(f"{settings.app_name}: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(str(e))
        print(f"{settings.app_name}: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except EchoLabError as e:
        logger.error(str(e))
        print(f"{settings.app_name}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    if path != "-":
        logger.info(f"Done: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
