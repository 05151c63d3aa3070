# src/cli/main.py
"""
Entry point of the `felkit` executable.

Examples (from repo root):
  felkit eval-ml --alpha 0.5 --beta 1 --lam 1 --x 0.5 --z 0.3,0.5i
  felkit solve --variant caputo --a 0.75 --bkernel 1.5 --c 1 --rho 1 --zeta 2 --x 1 \
      --omega 0.2+0i --delta 0 --init 1 --grid 0:1:101
  felkit verify --config runs/classical.env --output out/verify.csv
  felkit sweep --a 1 --bkernel 2 --c 2 --zeta 1 --init 1 --sweep g0=0.05,0.1,0.2 --jobs 3
"""
from __future__ import annotations

import sys
from collections.abc import Sequence

from .config import UsageError, build_parser, parse_config
from .runner import run


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        config = parse_config(argv, parser=parser)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
