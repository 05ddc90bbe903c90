"""Frozen reference tables for the window classifications.

Three CSV resources ship with the package, one per examined-wire taxonomy:
``golden_middle.csv`` (81 five-wire windows), ``golden_wire2.csv`` and
``golden_wire1.csv`` (27 four-wire windows each).  Every row carries the
pattern, its class label, the exact pi-scaled response coefficients, and
the reference 50% delay in picoseconds at the canonical operating point
(tau0 = 1.42 ps, lambda = 12.24).  Coefficient cells hold a rational pair
``p,q`` meaning (p + q*sqrt(5))/pi for the middle table and
(p + q*sqrt(2))/pi for the side tables.

Set the environment variable ``CACFORGE_GOLDEN_DIR`` to load the CSVs from
a different directory (same file names and layout).
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

from .bus_model import TransitionPattern
from .errors import GoldenMismatchError
from .exact import Quad, quad_sqrt2, quad_sqrt5

GOLDEN_DIR_ENV = "CACFORGE_GOLDEN_DIR"

MIDDLE_FILE = "golden_middle.csv"
WIRE2_FILE = "golden_wire2.csv"
WIRE1_FILE = "golden_wire1.csv"


@dataclass(frozen=True)
class GoldenRow:
    """One reference row: pattern, class label, exact coefficients, delay."""

    pattern: TransitionPattern
    subclass: Optional[int]
    label: str
    coefficients: tuple[Quad, ...]
    delay_ps: float


def data_dir() -> Path:
    """Directory holding the golden CSVs (env override or bundled data)."""
    override = os.environ.get(GOLDEN_DIR_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("cacforge") / "data"))


def _parse_cell(cell: str, root: int) -> Quad:
    p_text, q_text = cell.split(",")
    p, q = Fraction(p_text), Fraction(q_text)
    return quad_sqrt5(p, q) if root == 5 else quad_sqrt2(p, q)


@lru_cache(maxsize=None)
def _load(path_text: str, examined: int, root: int,
          coeff_count: int, has_subclass: bool) -> tuple[GoldenRow, ...]:
    path = Path(path_text)
    if not path.is_file():
        raise GoldenMismatchError(f"golden table not found: {path}")
    rows = []
    with path.open(newline="") as fh:
        for rec in csv.DictReader(fh):
            pattern = TransitionPattern.from_string(rec["pattern"], examined)
            coeffs = tuple(_parse_cell(rec[f"c{i}"], root)
                           for i in range(coeff_count))
            rows.append(GoldenRow(
                pattern=pattern,
                subclass=int(rec["subclass"]) if has_subclass else None,
                label=rec["cls"],
                coefficients=coeffs,
                delay_ps=float(rec["delay_ps"]),
            ))
    return tuple(rows)


def load_middle() -> tuple[GoldenRow, ...]:
    """All 81 middle-wire reference rows in printed order."""
    return _load(str(data_dir() / MIDDLE_FILE), 2, 5, 3, True)


def load_wire2() -> tuple[GoldenRow, ...]:
    """All 27 second-wire reference rows in printed order."""
    return _load(str(data_dir() / WIRE2_FILE), 1, 2, 4, False)


def load_wire1() -> tuple[GoldenRow, ...]:
    """All 27 edge-wire reference rows in printed order."""
    return _load(str(data_dir() / WIRE1_FILE), 0, 2, 4, False)
