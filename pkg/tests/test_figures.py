"""Smoke tests: each renderer writes a real PNG."""
from __future__ import annotations

from pathlib import Path

from cacforge.classification import ClassTables, Taxonomy, sweep_lambda
from cacforge.codebook import (ClassicCodeFamily, ConstraintConfig,
                               build_codebook, classic_codebook, prune_iolc)
from cacforge.evaluation import report
from cacforge.figures import (render_intervals, render_sweep,
                              render_wire_profile)

PNG_MAGIC = b"\x89PNG"


def _assert_png(path: Path) -> None:
    data = path.read_bytes()
    assert data[:4] == PNG_MAGIC
    assert len(data) > 1000


def test_render_sweep(tmp_path: Path) -> None:
    points = sweep_lambda([3.0, 6.0, 12.24], Taxonomy.MIDDLE_C)
    out = render_sweep(points, tmp_path / "sweep.png")
    assert out == tmp_path / "sweep.png"
    _assert_png(out)


def test_render_intervals(tmp_path: Path) -> None:
    tables = ClassTables.build()
    out = render_intervals(tables.middle.intervals(), tmp_path / "iv.png",
                           "middle class intervals")
    _assert_png(out)


def test_render_wire_profile(tmp_path: Path) -> None:
    c21 = build_codebook(ConstraintConfig(2, 1), 10)
    books = [prune_iolc(c21), classic_codebook(ClassicCodeFamily.OLC, 10)]
    out = render_wire_profile(report(books), tmp_path / "profile.png")
    _assert_png(out)
