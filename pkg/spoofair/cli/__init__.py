import argparse

from ..core.config import settings
from . import check, det, evaluate, simulate

__all__ = ["build_parser", "check", "det", "evaluate", "simulate"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Gender fairness evaluation of spoof detection scores.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (evaluate, simulate, det, check):
        module.register(subparsers)
    return parser
