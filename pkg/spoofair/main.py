import logging
import sys
from typing import Optional, Sequence

from .cli import build_parser
from .core.config import settings
from .core.errors import SpoofairError

log = logging.getLogger(__name__)


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else settings.log_level.upper()
    logging.basicConfig(level=level, format="%(asctime)s [%(levelname)s] %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        return args.handler(args)
    except SpoofairError as exc:
        log.debug("%s failed", args.command, exc_info=True)
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    except Exception:
        log.exception("Unexpected error in %s", args.command)
        return 2


def run() -> None:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    if hasattr(sys.stderr, "reconfigure"):
        sys.stderr.reconfigure(encoding="utf-8")
    sys.exit(main())


if __name__ == "__main__":
    run()
