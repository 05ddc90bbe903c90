"""Delay-class taxonomies for bus transition windows.

Windows around an examined wire fall into delay-ordered classes: seven
classes C0..C6 for a middle wire (5-wire window), five classes 0C..4C for
the second wire and three for the edge wire (4-wire windows).  Class
memberships are frozen reference data; at the canonical operating point
(tau0 = 1.42 ps, lambda = 12.24) delays come from the reference column,
elsewhere from the modal-series solver.

A legacy three-wire taxonomy D0..D4 with worst-case bounds (1+i*lambda)*tau0
is kept for comparison.  Its actual delay ranges overlap (D0..D2 in
particular), which is precisely what the wider windows fix.

Two separation notions are tracked when sweeping the coupling factor:

* worst-delay separability (class maxima strictly increase with the class
  index), which holds for lambda >= 3 on middle wires, breaks at lambda = 2,
  and holds for lambda >= 1 on side wires;
* strict interval disjointness, which needs slightly stronger coupling
  (lambda >= 4 middle, >= 3 second wire, >= 5 edge wire) because the fast
  tail of one class can undercut the slow tail of the previous one.
"""

from __future__ import annotations

import enum
import math
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from . import golden
from .bus_model import (
    DEFAULT_LAMBDA,
    DEFAULT_TAU0_PS,
    FULL_SERIES,
    BusParams,
    ClosedFormResponse,
    TransitionPattern,
    TransitionSymbol,
    enumerate_patterns,
    modal_coefficient_slots,
    pattern_delay,
    synth_response,
)
from .errors import ClassificationInvalidError, GoldenMismatchError, PatternError
from .exact import Quad

__all__ = [
    "Taxonomy", "DelayClass", "ClassEntry", "ClassificationTable",
    "Subclass", "SubclassTable", "ClassTables", "SweepPoint", "LegacyResult",
    "UNCONSTRAINED", "MIDDLE_MIN_LAMBDA", "SIDE_MIN_LAMBDA",
    "GOLDEN_SOURCE", "MODEL_SOURCE",
    "enumerate_patterns", "build_subclasses", "classify_middle",
    "classify_side", "classify_legacy", "legacy_index", "window_class",
    "sweep_lambda", "verify_golden",
]

MIDDLE_MIN_LAMBDA = 3.0
SIDE_MIN_LAMBDA = 1.0

GOLDEN_SOURCE = "golden"
MODEL_SOURCE = "model"

# Reference-reproduction budget: every frozen delay is matched by the
# closer of the truncated and full-series solves within 0.03 ps or 1.0%
# relative (measured worst case uses 0.97 of the relative budget).
GOLDEN_ABS_TOL_PS = 0.03
GOLDEN_REL_TOL = 0.010


class Taxonomy(enum.Enum):
    """Which examined-wire taxonomy a class index refers to."""

    MIDDLE_C = "middle"
    SIDE_WIRE2 = "wire2"
    SIDE_WIRE1 = "wire1"
    LEGACY_D = "legacy"


_CLASS_COUNT = {
    Taxonomy.MIDDLE_C: 7,
    Taxonomy.SIDE_WIRE2: 5,
    Taxonomy.SIDE_WIRE1: 3,
    Taxonomy.LEGACY_D: 5,
}


@dataclass(frozen=True)
class DelayClass:
    """One delay class: a taxonomy plus a small index."""

    taxonomy: Taxonomy
    index: int

    def __post_init__(self) -> None:
        count = _CLASS_COUNT[self.taxonomy]
        if not 0 <= self.index < count:
            raise ClassificationInvalidError(
                f"{self.taxonomy.value} class index {self.index} "
                f"outside 0..{count - 1}")

    @property
    def label(self) -> str:
        if self.taxonomy is Taxonomy.MIDDLE_C:
            return f"C{self.index}"
        if self.taxonomy is Taxonomy.LEGACY_D:
            return f"D{self.index}"
        return f"{self.index}C"

    @classmethod
    def from_label(cls, taxonomy: Taxonomy, label: str) -> "DelayClass":
        text = label.strip()
        digits = text[1:] if text[0] in "CD" else text[:-1]
        try:
            return cls(taxonomy, int(digits))
        except (ValueError, IndexError):
            raise ClassificationInvalidError(f"bad class label {label!r}")

    def __str__(self) -> str:
        return self.label


class _Unconstrained:
    """Marker for windows whose examined wire holds: no 50% delay exists."""

    _singleton: Optional["_Unconstrained"] = None

    def __new__(cls) -> "_Unconstrained":
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self) -> str:
        return "Unconstrained"


UNCONSTRAINED = _Unconstrained()


@dataclass(frozen=True)
class ClassEntry:
    """Classification of one window pattern."""

    subclass: int
    delay_class: DelayClass
    delay_ps: float
    response: ClosedFormResponse
    delay_source: str


class ClassificationTable:
    """All windows of one taxonomy classified at a parameter snapshot."""

    def __init__(self, taxonomy: Taxonomy, params: BusParams,
                 entries: "OrderedDict[TransitionPattern, ClassEntry]") -> None:
        self.taxonomy = taxonomy
        self.params = params
        self.entries = entries

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, pattern: TransitionPattern) -> bool:
        return pattern in self.entries

    def __getitem__(self, pattern: TransitionPattern) -> ClassEntry:
        try:
            return self.entries[pattern]
        except KeyError:
            raise PatternError(f"pattern {pattern} not in {self.taxonomy.value} table")

    def classes(self) -> "OrderedDict[DelayClass, tuple[TransitionPattern, ...]]":
        """Members per class, ordered by class index."""
        acc: dict[DelayClass, list[TransitionPattern]] = {}
        for pattern, entry in self.entries.items():
            acc.setdefault(entry.delay_class, []).append(pattern)
        ordered = OrderedDict()
        for dc in sorted(acc, key=lambda c: c.index):
            ordered[dc] = tuple(acc[dc])
        return ordered

    def subclasses(self) -> "OrderedDict[int, tuple[TransitionPattern, ...]]":
        acc: dict[int, list[TransitionPattern]] = {}
        for pattern, entry in self.entries.items():
            acc.setdefault(entry.subclass, []).append(pattern)
        return OrderedDict((sid, tuple(acc[sid])) for sid in sorted(acc))

    def intervals(self) -> tuple[tuple[DelayClass, float, float], ...]:
        """Per-class (min, max) delay, ordered by class index."""
        out = []
        for dc, members in self.classes().items():
            delays = [self.entries[p].delay_ps for p in members]
            out.append((dc, min(delays), max(delays)))
        return tuple(out)

    @property
    def intervals_disjoint(self) -> bool:
        iv = self.intervals()
        return all(iv[i][2] < iv[i + 1][1] for i in range(len(iv) - 1))

    @property
    def worst_delay_ordered(self) -> bool:
        iv = self.intervals()
        return all(iv[i][2] < iv[i + 1][2] for i in range(len(iv) - 1))


@dataclass(frozen=True)
class Subclass:
    """Patterns sharing one exact symbolic coefficient tuple."""

    sid: int
    coefficients: tuple[Quad, ...]
    members: tuple[TransitionPattern, ...]


@dataclass(frozen=True)
class SubclassTable:
    """Exact-coefficient partition of a window enumeration."""

    params: BusParams
    groups: tuple[Subclass, ...]

    def __len__(self) -> int:
        return len(self.groups)

    def subclass_of(self, pattern: TransitionPattern) -> Subclass:
        key = tuple(q.key() for q in modal_coefficient_slots(pattern))
        for group in self.groups:
            if tuple(q.key() for q in group.coefficients) == key:
                return group
        raise PatternError(f"pattern {pattern} matches no subclass")


def build_subclasses(patterns: Iterable[TransitionPattern],
                     params: Optional[BusParams] = None) -> SubclassTable:
    """Group window patterns by their exact coefficient tuples.

    Subclass ids follow first appearance in the given order.  The 81
    middle-wire windows form 25 subclasses; each side enumeration keeps its
    27 patterns distinct.
    """
    params = params or BusParams()
    keyed: "OrderedDict[tuple, tuple[tuple[Quad, ...], list[TransitionPattern]]]"
    keyed = OrderedDict()
    width = examined = None
    for pattern in patterns:
        if width is None:
            width, examined = pattern.width, pattern.examined
        elif (pattern.width, pattern.examined) != (width, examined):
            raise PatternError("mixed window shapes in one subclass build")
        coeffs = modal_coefficient_slots(pattern)
        key = tuple(q.key() for q in coeffs)
        if key not in keyed:
            keyed[key] = (coeffs, [])
        keyed[key][1].append(pattern)
    groups = tuple(
        Subclass(sid, coeffs, tuple(members))
        for sid, (coeffs, members) in enumerate(keyed.values(), start=1))
    return SubclassTable(params=params, groups=groups)


def _is_canonical(params: BusParams) -> bool:
    return (math.isclose(params.tau0_ps, DEFAULT_TAU0_PS, rel_tol=0.0, abs_tol=1e-12)
            and math.isclose(params.lam, DEFAULT_LAMBDA, rel_tol=0.0, abs_tol=1e-12))


def _build_table(taxonomy: Taxonomy, rows: Sequence[golden.GoldenRow],
                 params: BusParams) -> ClassificationTable:
    canonical = _is_canonical(params)
    sids: dict[tuple, int] = {}
    entries: "OrderedDict[TransitionPattern, ClassEntry]" = OrderedDict()
    for row in rows:
        if row.subclass is not None:
            sid = row.subclass
        else:
            key = tuple(q.key() for q in row.coefficients)
            sid = sids.setdefault(key, len(sids) + 1)
        if canonical:
            delay, source = row.delay_ps, GOLDEN_SOURCE
        else:
            delay = pattern_delay(row.pattern, params, harmonics=FULL_SERIES)
            source = MODEL_SOURCE
        entries[row.pattern] = ClassEntry(
            subclass=sid,
            delay_class=DelayClass.from_label(taxonomy, row.label),
            delay_ps=delay,
            response=synth_response(row.pattern, params),
            delay_source=source,
        )
    return ClassificationTable(taxonomy, params, entries)


@lru_cache(maxsize=None)
def _classify_middle(params: BusParams) -> ClassificationTable:
    return _build_table(Taxonomy.MIDDLE_C, golden.load_middle(), params)


@lru_cache(maxsize=None)
def _classify_side(params: BusParams) -> tuple[ClassificationTable, ClassificationTable]:
    wire2 = _build_table(Taxonomy.SIDE_WIRE2, golden.load_wire2(), params)
    wire1 = _build_table(Taxonomy.SIDE_WIRE1, golden.load_wire1(), params)
    return wire2, wire1


def classify_middle(params: Optional[BusParams] = None) -> ClassificationTable:
    """Classify all 81 middle-wire windows into C0..C6.

    Requires lambda >= 3: below that the class worst-case delays lose their
    strict ordering (C1 overtakes C2 at lambda = 2).
    """
    params = params or BusParams()
    if params.lam < MIDDLE_MIN_LAMBDA - 1e-12:
        raise ClassificationInvalidError(
            f"lambda={params.lam:g} below {MIDDLE_MIN_LAMBDA:g}; middle-wire "
            f"classes are only delay-separated from lambda >= 3")
    return _classify_middle(params)


def classify_side(params: Optional[BusParams] = None,
                  ) -> tuple[ClassificationTable, ClassificationTable]:
    """Classify the 4-wire side windows: (second-wire table, edge-wire table).

    Requires lambda >= 1, the separation threshold for the side taxonomies.
    """
    params = params or BusParams()
    if params.lam < SIDE_MIN_LAMBDA - 1e-12:
        raise ClassificationInvalidError(
            f"lambda={params.lam:g} below {SIDE_MIN_LAMBDA:g}; side-wire "
            f"classes are only delay-separated from lambda >= 1")
    return _classify_side(params)


def legacy_index(deltas: Sequence[int], position: int) -> int:
    """Legacy per-wire class index from a window's transition deltas.

    Interior wires use 2 - d*(d_left + d_right), edge wires 1 - d*d_neighbor;
    a non-switching wire is class 0 by convention.
    """
    d = deltas[position]
    if d == 0:
        return 0
    left = deltas[position - 1] if position > 0 else None
    right = deltas[position + 1] if position + 1 < len(deltas) else None
    if left is not None and right is not None:
        return 2 - d * (left + right)
    neighbor = left if left is not None else right
    if neighbor is None:
        raise PatternError("legacy index needs at least one neighbor wire")
    return 1 - d * neighbor


@dataclass(frozen=True)
class LegacyResult:
    """Legacy class of a three-wire window plus its worst-case bound."""

    delay_class: DelayClass
    bound_ps: float


def classify_legacy(pattern: TransitionPattern,
                    params: Optional[BusParams] = None) -> LegacyResult:
    """Classify a width-3 window by the legacy taxonomy D0..D4.

    The bound is (1 + i*lambda)*tau0; a holding middle wire is D0 with
    bound tau0 by convention.
    """
    params = params or BusParams()
    if pattern.width != 3:
        raise PatternError("legacy classification takes a width-3 window")
    i = legacy_index(pattern.deltas, 1)
    bound = (1.0 + i * params.lam) * params.tau0_ps
    if pattern.deltas[1] == 0:
        bound = params.tau0_ps
    return LegacyResult(DelayClass(Taxonomy.LEGACY_D, i), bound)


@dataclass(frozen=True)
class ClassTables:
    """The three window tables built at one parameter snapshot."""

    middle: ClassificationTable
    wire2: ClassificationTable
    wire1: ClassificationTable
    params: BusParams

    @classmethod
    def build(cls, params: Optional[BusParams] = None) -> "ClassTables":
        params = params or BusParams()
        wire2, wire1 = classify_side(params)
        return cls(middle=classify_middle(params), wire2=wire2,
                   wire1=wire1, params=params)


def window_class(window: TransitionPattern, tables: ClassTables,
                 ) -> Union[DelayClass, _Unconstrained]:
    """Delay class of a window, or UNCONSTRAINED if its wire holds.

    A falling examined wire is classified through its complement pattern.
    """
    symbol = window.examined_symbol
    if symbol is TransitionSymbol.HOLD:
        return UNCONSTRAINED
    if symbol is TransitionSymbol.DOWN:
        window = window.complement()
    shape = (window.width, window.examined)
    if shape == (5, 2):
        table = tables.middle
    elif shape == (4, 1):
        table = tables.wire2
    elif shape == (4, 0):
        table = tables.wire1
    else:
        raise PatternError(f"no classification table for window shape {shape}")
    return table[window].delay_class


@dataclass(frozen=True)
class SweepPoint:
    """Per-class delay intervals at one coupling factor."""

    lam: float
    intervals: tuple[tuple[DelayClass, float, float], ...]
    non_overlap: bool
    intervals_disjoint: bool


def _sweep_rows(taxonomy: Taxonomy) -> list[tuple[TransitionPattern, DelayClass]]:
    if taxonomy is Taxonomy.MIDDLE_C:
        rows = golden.load_middle()
    elif taxonomy is Taxonomy.SIDE_WIRE2:
        rows = golden.load_wire2()
    elif taxonomy is Taxonomy.SIDE_WIRE1:
        rows = golden.load_wire1()
    else:
        rows = golden.load_middle()
        return [(row.pattern,
                 DelayClass(Taxonomy.LEGACY_D,
                            legacy_index(row.pattern.deltas, 2)))
                for row in rows]
    return [(row.pattern, DelayClass.from_label(taxonomy, row.label))
            for row in rows]


def sweep_lambda(lambda_values: Iterable[float], taxonomy: Taxonomy,
                 tau0_ps: float = DEFAULT_TAU0_PS,
                 harmonics: int = FULL_SERIES) -> tuple[SweepPoint, ...]:
    """Per-class delay intervals across coupling factors.

    Memberships stay frozen at the reference assignment; delays are solved
    from the modal series at each lambda.  ``non_overlap`` reports
    worst-delay separability (strictly increasing class maxima),
    ``intervals_disjoint`` the stricter range condition.  For the legacy
    taxonomy the middle windows are regrouped by their D class, with the
    window delays as range proxy.
    """
    members = _sweep_rows(taxonomy)
    points = []
    for lam in lambda_values:
        if lam <= 0:
            raise ClassificationInvalidError("coupling factor must be positive")
        params = BusParams(tau0_ps=tau0_ps, lam=float(lam))
        ranges: dict[DelayClass, tuple[float, float]] = {}
        for pattern, dc in members:
            delay = pattern_delay(pattern, params, harmonics=harmonics)
            lo, hi = ranges.get(dc, (math.inf, -math.inf))
            ranges[dc] = (min(lo, delay), max(hi, delay))
        ordered = tuple((dc,) + ranges[dc]
                        for dc in sorted(ranges, key=lambda c: c.index))
        non_overlap = all(ordered[i][2] < ordered[i + 1][2]
                          for i in range(len(ordered) - 1))
        disjoint = all(ordered[i][2] < ordered[i + 1][1]
                       for i in range(len(ordered) - 1))
        points.append(SweepPoint(float(lam), ordered, non_overlap, disjoint))
    return tuple(points)


def verify_golden(params: Optional[BusParams] = None) -> list[str]:
    """Cross-check the frozen tables against the model; return mismatches.

    Coefficients must match exactly.  Each frozen delay must be matched by
    the closer of the truncated and full-series solves within the
    documented budget (0.03 ps absolute or 1.0% relative).
    """
    params = params or BusParams()
    problems = []
    for rows in (golden.load_middle(), golden.load_wire2(), golden.load_wire1()):
        for row in rows:
            model = modal_coefficient_slots(row.pattern)
            if tuple(q.key() for q in model) != tuple(q.key() for q in row.coefficients):
                problems.append(f"{row.pattern}: coefficient tuple differs")
                continue
            err = min(
                abs(pattern_delay(row.pattern, params) - row.delay_ps),
                abs(pattern_delay(row.pattern, params, harmonics=FULL_SERIES)
                    - row.delay_ps))
            if err > max(GOLDEN_ABS_TOL_PS, GOLDEN_REL_TOL * row.delay_ps):
                problems.append(
                    f"{row.pattern}: delay off by {err:.4f} ps "
                    f"(reference {row.delay_ps:g})")
    return problems
