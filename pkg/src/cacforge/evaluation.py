"""Whole-bus delay evaluation and throughput metrics for codebooks.

Every wire of a transition is scored through its window table: middle
wires by the five-wire table, the two wires at each edge by the four-wire
tables (right edge reflected).  Worst cases are exact maxima over all
ordered codeword pairs; for books past the pair limit the evaluation
composes per-wire window products instead, which gives the same maxima
because a wire's delay depends only on its own window and every window
pair at a wire is realised by some word pair.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .bus_model import BusParams, TransitionPattern, TransitionSymbol
from .classification import ClassTables
from .codebook import Codebook, Codeword, ConstraintConfig, wire_windows
from .errors import ConfigError, PatternError, WidthError

EXHAUSTIVE_PAIR_LIMIT = 2000


def _resolve_tables(params: Optional[BusParams],
                    tables: Optional[ClassTables]) -> ClassTables:
    if tables is None:
        return ClassTables.build(params)
    if params is not None and params != tables.params:
        raise ConfigError("params do not match the supplied class tables")
    return tables


def _window_delay(window: TransitionPattern, tables: ClassTables) -> float:
    """Evaluated 50% delay of one window; 0 when its wire holds."""
    symbol = window.examined_symbol
    if symbol is TransitionSymbol.HOLD:
        return 0.0
    if symbol is TransitionSymbol.DOWN:
        window = window.complement()
    shape = (window.width, window.examined)
    if shape == (5, 2):
        return tables.middle[window].delay_ps
    if shape == (4, 1):
        return tables.wire2[window].delay_ps
    if shape == (4, 0):
        return tables.wire1[window].delay_ps
    raise PatternError(f"no delay table for window shape {shape}")


def pair_wire_delays(u: Codeword, v: Codeword,
                     params: Optional[BusParams] = None,
                     tables: Optional[ClassTables] = None) -> tuple[float, ...]:
    """Per-wire 50% delays for the bus transition u -> v.

    Middle wires see their centered five-wire window, edge wires the
    leftmost or reflected rightmost four-wire window.  Wires that do not
    switch report 0.
    """
    if u.width < 5:
        raise WidthError(f"delay evaluation needs width >= 5, got {u.width}")
    tables = _resolve_tables(params, tables)
    return tuple(_window_delay(window, tables)
                 for _, window in wire_windows(u, v))


@dataclass(frozen=True)
class DelayReport:
    """Worst-case transition delays of one codebook.

    wire_pairs holds the first ordered codeword pair (decimal order)
    attaining each wire's worst delay, or None for a wire that never
    switches.  method records whether ordered pairs were enumerated
    exhaustively ("pairs") or composed from per-wire window products
    ("windows").
    """

    width: int
    wire_worst_ps: tuple[float, ...]
    wire_pairs: tuple[Optional[tuple[Codeword, Codeword]], ...]
    worst_delay_ps: float
    worst_wire: int
    worst_pair: Optional[tuple[Codeword, Codeword]]
    params: BusParams
    method: str


class _WireWindowIndex:
    """Integer window extraction per wire plus a window-delay cache."""

    def __init__(self, width: int, tables: ClassTables) -> None:
        self.width = width
        self.tables = tables
        self.cache: dict[tuple[str, int, int], float] = {}
        kinds = ["w1", "w2"] + ["mid"] * (width - 4) + ["w2", "w1"]
        self.kinds = tuple(kinds)

    def extract(self, word: Codeword) -> tuple[int, ...]:
        n = self.width
        value = word.decimal
        left4 = value >> (n - 4)
        right4 = value & 15
        mirrored = ((right4 & 1) << 3 | (right4 & 2) << 1
                    | (right4 & 4) >> 1 | (right4 & 8) >> 3)
        wins = [left4, left4]
        for k in range(3, n - 1):
            wins.append((value >> (n - k - 2)) & 31)
        wins += [mirrored, mirrored]
        return tuple(wins)

    def delay(self, wire_index: int, a: int, b: int) -> float:
        kind = self.kinds[wire_index]
        key = (kind, a, b)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        width = 5 if kind == "mid" else 4
        examined = {"mid": 2, "w2": 1, "w1": 0}[kind]
        symbols = tuple(
            _SYMBOLS[(a >> (width - 1 - i)) & 1][(b >> (width - 1 - i)) & 1]
            for i in range(width))
        value = _window_delay(TransitionPattern(symbols, examined), self.tables)
        self.cache[key] = value
        return value


_SYMBOLS = ((TransitionSymbol.HOLD, TransitionSymbol.UP),
            (TransitionSymbol.DOWN, TransitionSymbol.HOLD))


def codebook_worst_delay(cb: Codebook,
                         params: Optional[BusParams] = None,
                         tables: Optional[ClassTables] = None,
                         pair_limit: int = EXHAUSTIVE_PAIR_LIMIT) -> DelayReport:
    """Exact worst-case per-wire and whole-bus delays over a codebook.

    Books up to pair_limit words are scored over all ordered pairs; the
    first pair in decimal order attaining each maximum is reported.
    Larger books switch to the window-product composition, which reaches
    the same per-wire maxima at far lower cost.
    """
    if len(cb) < 2:
        raise ConfigError(f"delay evaluation needs at least 2 words, got {len(cb)}")
    if cb.width < 5:
        raise WidthError(f"delay evaluation needs width >= 5, got {cb.width}")
    tables = _resolve_tables(params, tables)
    n = cb.width
    words = cb.words
    index = _WireWindowIndex(n, tables)
    windows = [index.extract(word) for word in words]
    wire_worst = [0.0] * n
    wire_pairs: list[Optional[tuple[Codeword, Codeword]]] = [None] * n
    if len(words) <= pair_limit:
        method = "pairs"
        for i, wu in enumerate(windows):
            for j, wv in enumerate(windows):
                if i == j:
                    continue
                for k in range(n):
                    d = index.delay(k, wu[k], wv[k])
                    if d > wire_worst[k]:
                        wire_worst[k] = d
                        wire_pairs[k] = (words[i], words[j])
    else:
        method = "windows"
        for k in range(n):
            seen: dict[int, Codeword] = {}
            for word, wins in zip(words, windows):
                seen.setdefault(wins[k], word)
            values = sorted(seen)
            for a in values:
                for b in values:
                    d = index.delay(k, a, b)
                    if d > wire_worst[k]:
                        wire_worst[k] = d
                        wire_pairs[k] = (seen[a], seen[b])
    worst = max(wire_worst)
    worst_wire = wire_worst.index(worst) + 1
    return DelayReport(
        width=n,
        wire_worst_ps=tuple(wire_worst),
        wire_pairs=tuple(wire_pairs),
        worst_delay_ps=worst,
        worst_wire=worst_wire,
        worst_pair=wire_pairs[worst_wire - 1],
        params=tables.params,
        method=method,
    )


def constraint_delay_ceiling(constraint: ConstraintConfig,
                             tables: ClassTables) -> float:
    """Largest window delay any book under the constraint can exhibit."""
    cap = 0.0
    for table, ceiling in ((tables.middle, constraint.middle),
                           (tables.wire2, constraint.side),
                           (tables.wire1, constraint.side)):
        for delay_class, _, hi in table.intervals():
            if delay_class.index <= ceiling:
                cap = max(cap, hi)
    return cap


@dataclass(frozen=True)
class Metrics:
    """Size, rate, and throughput of a codebook against a baseline."""

    label: str
    width: int
    size: int
    data_bits: int
    rate: float
    worst_delay_ps: float
    throughput: float
    gain: float


def metrics(cb: Codebook, baseline_cb: Codebook,
            params: Optional[BusParams] = None,
            tables: Optional[ClassTables] = None) -> Metrics:
    """Rate, throughput, and throughput gain of cb over baseline_cb.

    The rate of an M-word book on n wires is floor(log2 M) / n; the
    throughput divides the rate by the evaluated worst-case delay, and
    the gain is the ratio of the two throughputs.
    """
    if cb.width != baseline_cb.width:
        raise WidthError(
            f"width mismatch: {cb.width} vs baseline {baseline_cb.width}")
    if len(cb) < 2 or len(baseline_cb) < 2:
        raise ConfigError("metrics need books of at least 2 words")
    tables = _resolve_tables(params, tables)
    size = len(cb)
    data_bits = size.bit_length() - 1
    rate = data_bits / cb.width
    worst = codebook_worst_delay(cb, tables=tables).worst_delay_ps
    throughput = rate / worst
    base_bits = len(baseline_cb).bit_length() - 1
    base_rate = base_bits / baseline_cb.width
    base_worst = codebook_worst_delay(baseline_cb, tables=tables).worst_delay_ps
    return Metrics(
        label=cb.provenance,
        width=cb.width,
        size=size,
        data_bits=data_bits,
        rate=rate,
        worst_delay_ps=worst,
        throughput=throughput,
        gain=throughput / (base_rate / base_worst),
    )


@dataclass(frozen=True)
class BookEvaluation:
    """One codebook's delay report and throughput row in a comparison."""

    label: str
    width: int
    size: int
    data_bits: int
    rate: float
    worst_delay_ps: float
    throughput: float
    gain: float
    delays: DelayReport


@dataclass(frozen=True)
class ComparisonReport:
    """Evaluations of several codebooks at one parameter snapshot."""

    params: BusParams
    entries: tuple[BookEvaluation, ...]


def report(codebooks: Sequence[Codebook],
           params: Optional[BusParams] = None,
           tables: Optional[ClassTables] = None) -> ComparisonReport:
    """Evaluate codebooks side by side and attach throughput gains.

    Within each bus width the last listed book serves as the gain
    baseline (callers conventionally list the reference book last), so
    its own gain is 1.  An empty input produces an empty report.
    """
    tables = _resolve_tables(params, tables)
    evaluated = []
    for cb in codebooks:
        delays = codebook_worst_delay(cb, tables=tables)
        size = len(cb)
        data_bits = size.bit_length() - 1
        rate = data_bits / cb.width
        evaluated.append((cb, delays, size, data_bits, rate,
                          rate / delays.worst_delay_ps))
    baseline_throughput = {}
    for cb, _, _, _, _, throughput in evaluated:
        baseline_throughput[cb.width] = throughput
    entries = tuple(
        BookEvaluation(
            label=cb.provenance,
            width=cb.width,
            size=size,
            data_bits=data_bits,
            rate=rate,
            worst_delay_ps=delays.worst_delay_ps,
            throughput=throughput,
            gain=throughput / baseline_throughput[cb.width],
            delays=delays,
        )
        for cb, delays, size, data_bits, rate, throughput in evaluated)
    return ComparisonReport(params=tables.params, entries=entries)


def per_wire_csv(delays: DelayReport) -> str:
    """CSV with columns wire_index, worst_delay_ps, from_word, to_word."""
    lines = ["wire_index,worst_delay_ps,from_word,to_word"]
    for k in range(delays.width):
        pair = delays.wire_pairs[k]
        src, dst = (str(pair[0]), str(pair[1])) if pair else ("-", "-")
        lines.append(f"{k + 1},{delays.wire_worst_ps[k]:.6f},{src},{dst}")
    return "\n".join(lines) + "\n"


def summary_csv(comparison: ComparisonReport) -> str:
    """One CSV row per evaluated codebook.

    Labels holding a comma, such as C2,1C, are double-quoted.
    """
    lines = ["label,width,size,data_bits,rate,worst_delay_ps,throughput,gain"]
    for e in comparison.entries:
        label = f'"{e.label}"' if "," in e.label else e.label
        lines.append(
            f"{label},{e.width},{e.size},{e.data_bits},{e.rate:.6f},"
            f"{e.worst_delay_ps:.6f},{e.throughput:.6f},{e.gain:.6f}")
    return "\n".join(lines) + "\n"


def report_json(comparison: ComparisonReport) -> str:
    """JSON mirror of the summary and per-wire tables."""
    payload = {
        "params": {"tau0_ps": comparison.params.tau0_ps,
                   "lam": comparison.params.lam},
        "entries": [
            {
                "label": e.label,
                "width": e.width,
                "size": e.size,
                "data_bits": e.data_bits,
                "rate": e.rate,
                "worst_delay_ps": e.worst_delay_ps,
                "throughput": e.throughput,
                "gain": e.gain,
                "method": e.delays.method,
                "wires": [
                    {
                        "wire_index": k + 1,
                        "worst_delay_ps": e.delays.wire_worst_ps[k],
                        "from_word": str(pair[0]) if pair else None,
                        "to_word": str(pair[1]) if pair else None,
                    }
                    for k, pair in enumerate(e.delays.wire_pairs)
                ],
            }
            for e in comparison.entries
        ],
    }
    return json.dumps(payload, indent=2) + "\n"
