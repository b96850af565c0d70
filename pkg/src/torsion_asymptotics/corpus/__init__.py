"""Bundled reference corpus of germs and quadratic-rank-2 configurations"""

from pathlib import Path

CORPUS_DIR = Path(__file__).parent
