"""Run settings assembled from command-line flags and the environment"""

from __future__ import annotations

import argparse
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path

from .asymptotics import DEFAULT_RHO_TOLERANCE
from .corpus import CORPUS_DIR
from .errors import InputError
from .singularity import CONVENTIONS

CORPUS_ENV = "TORSION_CORPUS_DIR"


@dataclass(frozen=True)
class Settings:
    order: int | None = None
    convention: str = "steenbrink"
    tolerance: float = DEFAULT_RHO_TOLERANCE
    output: Path | None = None
    corpus_dir: Path = CORPUS_DIR
    verbosity: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.order is not None and self.order < 0:
            raise InputError(f"--order must be non-negative, got {self.order}")
        if self.convention not in CONVENTIONS:
            raise InputError(f"--convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if not self.tolerance > 0:
            raise InputError(f"--tolerance must be positive, got {self.tolerance}")

    @classmethod
    def from_args(cls, args: argparse.Namespace, environ: Mapping[str, str] | None = None) -> "Settings":
        """Flags win over the environment, which wins over the bundled defaults"""
        environ = os.environ if environ is None else environ
        corpus_dir = getattr(args, "corpus_dir", None) or environ.get(CORPUS_ENV) or CORPUS_DIR
        return cls(
            order=args.order,
            convention=args.convention,
            tolerance=args.tolerance,
            output=Path(args.output) if args.output else None,
            corpus_dir=Path(corpus_dir),
            verbosity=args.verbose,
        )
