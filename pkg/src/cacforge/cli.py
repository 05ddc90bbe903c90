"""Command-line front end: classification tables, codebooks, delay reports,
and stream coding, with figures rendered next to the delimited output."""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Optional, Sequence, Union

from .bus_model import DEFAULT_LAMBDA, DEFAULT_TAU0_PS, BusParams
from .classification import (ClassificationTable, ClassTables, DelayClass,
                             Taxonomy, classify_middle, classify_side,
                             legacy_index, sweep_lambda, verify_golden)
from .codebook import (ClassicCodeFamily, Codebook, Codeword, ConstraintConfig,
                       build_codebook, classic_codebook, codebook_size,
                       constraint_matrix, iolc_size, matrix_csv, prune_iolc,
                       transition_legal, write_codebook)
from .codec import build_rank_table, decode, encode
from .errors import CacforgeError, ConfigError
from .evaluation import (codebook_worst_delay, per_wire_csv, report,
                         report_json, summary_csv)
from . import figures

_CONFIG_KEYS = {"tau0", "lambda", "out", "parity", "json", "figures"}

_BOOK_TOKEN = re.compile(r"^(iolc|olc|fpc|ftc|foc|c21|c31|c42|c53|c64)-?(\d+)$")
_CONSTRAINT_BY_TOKEN = {"c21": (2, 1), "c31": (3, 1), "c42": (4, 2),
                        "c53": (5, 3), "c64": (6, 4)}
_SEEDED = {(2, 1), (3, 1), (4, 2), (5, 3)}
_THEOREM_PARTNER = {"OLC": (3, 1), "FPC": (4, 2), "FOC": (5, 3)}


def _load_config(argv: Sequence[str]) -> dict:
    """Pull defaults out of a --config JSON file before parsing proper."""
    path: Optional[str] = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(
            f"unknown config keys {unknown}; valid: {sorted(_CONFIG_KEYS)}")
    return cfg


def _slug(provenance: str) -> str:
    return provenance.lower().replace(",", "_")


def _parse_sweep(text: str) -> list[float]:
    m = re.match(r"^(-?\d+):(-?\d+)$", text.strip())
    if not m:
        raise ConfigError(f"sweep must look like LO:HI, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise ConfigError(f"empty sweep range {text!r}")
    return [float(v) for v in range(lo, hi + 1)]


def _taxonomies(name: str) -> list[Taxonomy]:
    if name == "side":
        return [Taxonomy.SIDE_WIRE2, Taxonomy.SIDE_WIRE1]
    return [Taxonomy(name)]


def _build_named_book(token: str, parity: int) -> Codebook:
    m = _BOOK_TOKEN.match(token.strip().lower())
    if not m:
        raise ConfigError(
            f"unrecognised codebook token {token!r}; expected a name from "
            "iolc/olc/fpc/ftc/foc/c21/c31/c42/c53/c64 followed by a width, "
            "e.g. iolc10 or c21-10")
    name, n = m.group(1), int(m.group(2))
    if name == "iolc":
        return prune_iolc(build_codebook(ConstraintConfig(2, 1), n, parity))
    if name in _CONSTRAINT_BY_TOKEN:
        return build_codebook(
            ConstraintConfig(*_CONSTRAINT_BY_TOKEN[name]), n, parity)
    return classic_codebook(ClassicCodeFamily[name.upper()], n, parity)


def _emit(path: Path, text: str) -> Path:
    path.write_text(text)
    print(f"wrote {path}")
    return path


# ------------------------------------------------------------------ classify


def _legacy_rows(params: BusParams) -> list[tuple[str, str, float]]:
    table = classify_middle(params)
    rows = []
    for pattern, entry in table.entries.items():
        index = legacy_index(pattern.deltas, 2)
        label = str(DelayClass(Taxonomy.LEGACY_D, index))
        rows.append((str(pattern), label, entry.delay_ps))
    return rows


def _legacy_intervals(rows: Sequence[tuple[str, str, float]],
                      ) -> list[tuple[DelayClass, float, float]]:
    by_label: dict[str, list[float]] = {}
    for _, label, delay in rows:
        by_label.setdefault(label, []).append(delay)
    out = []
    for label in sorted(by_label):
        dc = DelayClass(Taxonomy.LEGACY_D, int(label[1:]))
        out.append((dc, min(by_label[label]), max(by_label[label])))
    return out


def _classification_table(taxonomy: Taxonomy,
                          params: BusParams) -> ClassificationTable:
    if taxonomy is Taxonomy.MIDDLE_C:
        return classify_middle(params)
    wire2, wire1 = classify_side(params)
    return wire2 if taxonomy is Taxonomy.SIDE_WIRE2 else wire1


def _table_csv(table: ClassificationTable) -> str:
    lines = ["pattern,subclass,cls,delay_ps"]
    for pattern, entry in table.entries.items():
        lines.append(f"{pattern},{entry.subclass},{entry.delay_class},"
                     f"{entry.delay_ps:.6f}")
    return "\n".join(lines) + "\n"


def _table_json(table: ClassificationTable) -> str:
    payload = {
        "taxonomy": table.taxonomy.value,
        "params": {"tau0_ps": table.params.tau0_ps, "lam": table.params.lam},
        "rows": [
            {"pattern": str(pattern), "subclass": entry.subclass,
             "cls": str(entry.delay_class), "delay_ps": entry.delay_ps}
            for pattern, entry in table.entries.items()
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _sweep_csv(points) -> str:
    lines = ["lam,cls,lo_ps,hi_ps,non_overlap,intervals_disjoint"]
    for point in points:
        for dc, lo, hi in point.intervals:
            lines.append(
                f"{point.lam:.6f},{dc},{lo:.6f},{hi:.6f},"
                f"{str(point.non_overlap).lower()},"
                f"{str(point.intervals_disjoint).lower()}")
    return "\n".join(lines) + "\n"


def _sweep_json(points, taxonomy: Taxonomy, tau0: float) -> str:
    payload = {
        "taxonomy": taxonomy.value,
        "tau0_ps": tau0,
        "points": [
            {"lam": p.lam, "non_overlap": p.non_overlap,
             "intervals_disjoint": p.intervals_disjoint,
             "classes": [{"cls": str(dc), "lo_ps": lo, "hi_ps": hi}
                         for dc, lo, hi in p.intervals]}
            for p in points
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _cmd_classify(args: argparse.Namespace) -> int:
    params = BusParams(tau0_ps=args.tau0, lam=args.lam)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.check:
        problems = verify_golden(params)
        for problem in problems:
            print(problem, file=sys.stderr)
        if problems:
            print(f"golden check failed: {len(problems)} mismatching rows",
                  file=sys.stderr)
            return 1
        print("golden check ok: shipped tables match the model")
        return 0
    if args.sweep:
        lams = _parse_sweep(args.sweep)
        for taxonomy in _taxonomies(args.taxonomy):
            points = sweep_lambda(lams, taxonomy, tau0_ps=args.tau0)
            if args.json:
                _emit(out / f"sweep_{taxonomy.value}.json",
                      _sweep_json(points, taxonomy, args.tau0))
            else:
                _emit(out / f"sweep_{taxonomy.value}.csv", _sweep_csv(points))
            if args.figures:
                print(f"wrote {figures.render_sweep(points, out / f'sweep_{taxonomy.value}.png')}")
        return 0
    for taxonomy in _taxonomies(args.taxonomy):
        title = (f"{taxonomy.value} class intervals "
                 f"(lambda={params.lam:g}, tau0={params.tau0_ps:g} ps)")
        if taxonomy is Taxonomy.LEGACY_D:
            rows = _legacy_rows(params)
            if args.json:
                payload = {"taxonomy": taxonomy.value,
                           "params": {"tau0_ps": params.tau0_ps,
                                      "lam": params.lam},
                           "rows": [{"pattern": p, "cls": c, "delay_ps": d}
                                    for p, c, d in rows]}
                _emit(out / "classify_legacy.json",
                      json.dumps(payload, indent=2) + "\n")
            else:
                lines = ["pattern,subclass,cls,delay_ps"]
                lines += [f"{p},,{c},{d:.6f}" for p, c, d in rows]
                _emit(out / "classify_legacy.csv", "\n".join(lines) + "\n")
            intervals = _legacy_intervals(rows)
        else:
            table = _classification_table(taxonomy, params)
            if args.json:
                _emit(out / f"classify_{taxonomy.value}.json", _table_json(table))
            else:
                _emit(out / f"classify_{taxonomy.value}.csv", _table_csv(table))
            intervals = list(table.intervals())
        if args.figures:
            path = figures.render_intervals(
                intervals, out / f"intervals_{taxonomy.value}.png", title)
            print(f"wrote {path}")
    return 0


# --------------------------------------------------------------------- build


def _resolve_subject(args: argparse.Namespace,
                     ) -> Union[ConstraintConfig, ClassicCodeFamily, str]:
    if args.family:
        try:
            family = ClassicCodeFamily[args.family.upper()]
        except KeyError:
            names = ", ".join(f.name for f in ClassicCodeFamily)
            raise ConfigError(f"unknown family {args.family!r}; one of {names}")
        if args.prune:
            raise ConfigError("--prune applies to --constraint C2,1C only")
        return family
    constraint = ConstraintConfig.from_label(args.constraint)
    if args.prune:
        if (constraint.middle, constraint.side) != (2, 1):
            raise ConfigError("--prune applies to --constraint C2,1C only")
        return "IOLC"
    return constraint


def _make_book(subject: Union[ConstraintConfig, ClassicCodeFamily, str],
               n: int, parity: int) -> Codebook:
    if subject == "IOLC":
        return prune_iolc(build_codebook(ConstraintConfig(2, 1), n, parity))
    if isinstance(subject, ClassicCodeFamily):
        return classic_codebook(subject, n, parity)
    return build_codebook(subject, n, parity)


def _fib(k: int) -> int:
    a, b = 1, 1
    for _ in range(k - 1):
        a, b = b, a + b
    return a


def _trib(k: int) -> int:
    seq = [1, 1, 2]
    while len(seq) < k:
        seq.append(seq[-1] + seq[-2] + seq[-3])
    return seq[k - 1]


def _verify_book(subject, book: Codebook, parity: int) -> list[str]:
    """Consistency checks on a just-built book; returns failure messages."""
    failures = []
    n = book.width

    def check(ok: bool, label: str) -> None:
        if ok:
            print(f"ok: {label}")
        else:
            failures.append(label)
            print(f"FAIL: {label}")

    if subject == "IOLC":
        check(len(book) == iolc_size(n), "pruned size matches the masked count")
        unpruned = build_codebook(ConstraintConfig(2, 1), n, parity)
        check(book.decimal_set <= unpruned.decimal_set,
              "pruned book is a subset of the unpruned one")
        legality: Optional[ConstraintConfig] = ConstraintConfig(2, 1)
    elif isinstance(subject, ClassicCodeFamily):
        sizes = {"FPC": lambda: 2 * _fib(n + 1), "FTC": lambda: _fib(n + 2),
                 "FOC": lambda: _trib(n + 2)}
        if subject.name in sizes:
            check(len(book) == sizes[subject.name](),
                  "size matches the family's counting formula")
        partner = _THEOREM_PARTNER.get(subject.name)
        legality = ConstraintConfig(*partner) if partner else None
        if legality and 5 <= n <= 12:
            built = build_codebook(legality, n, parity if subject.name != "FPC"
                                   else 0)
            check(book.decimal_set == built.decimal_set,
                  f"book coincides with the ({legality.label}) construction")
    else:
        if n >= 5:
            check(len(book) == codebook_size(subject, n),
                  "size matches the transfer-matrix count")
        legality = subject
    if legality is not None and 5 <= n <= 10:
        tables = ClassTables.build()
        words = book.words
        bad = sum(1 for u in words for v in words
                  if u != v and not transition_legal(u, v, legality, tables))
        check(bad == 0,
              f"all ordered pairs legal under ({legality.label})")
    return failures


def _cmd_build(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    subject = _resolve_subject(args)
    book = _make_book(subject, args.n, args.parity)
    path = out / f"{_slug(book.provenance)}_n{book.width}.txt"
    write_codebook(book, path)
    print(f"wrote {path} ({len(book)} words)")
    if args.matrix:
        if not (isinstance(subject, ConstraintConfig)
                and (subject.middle, subject.side) in _SEEDED):
            raise ConfigError(
                "--matrix needs a seeded constraint (C2,1C through C5,3C)")
        _emit(out / f"matrix_{_slug(subject.label)}.csv",
              matrix_csv(constraint_matrix(subject)))
    if args.verify:
        failures = _verify_book(subject, book, args.parity)
        if failures:
            print(f"verification failed: {len(failures)} checks",
                  file=sys.stderr)
            return 1
    return 0


# ---------------------------------------------------------------------- eval


def _cmd_eval(args: argparse.Namespace) -> int:
    tokens: list[str] = []
    if args.codebooks:
        tokens += [t for t in args.codebooks.split(",") if t.strip()]
    tokens += args.codebook or []
    if not tokens:
        raise ConfigError("no codebooks given; use --codebooks or --codebook")
    params = BusParams(tau0_ps=args.tau0, lam=args.lam)
    tables = ClassTables.build(params)
    books = [_build_named_book(token, args.parity) for token in tokens]
    comparison = report(books, tables=tables)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.json:
        _emit(out / "report.json", report_json(comparison))
    else:
        _emit(out / "summary.csv", summary_csv(comparison))
        for entry in comparison.entries:
            _emit(out / f"wires_{_slug(entry.label)}_n{entry.width}.csv",
                  per_wire_csv(entry.delays))
    if args.figures:
        path = figures.render_wire_profile(comparison,
                                           out / "wire_profile.png")
        print(f"wrote {path}")
    return 0


# --------------------------------------------------------------------- codec


def _cmd_codec(args: argparse.Namespace) -> int:
    subject = _resolve_subject(args)
    table = build_rank_table(subject, args.n, args.parity)
    source = sys.stdin if args.input is None else open(args.input)
    try:
        for raw in source:
            line = raw.strip()
            if not line:
                continue
            if args.encode:
                try:
                    value = int(line, 16)
                except ValueError:
                    raise ConfigError(f"not a hex data word: {line!r}")
                print(encode(value, table))
            else:
                print(f"0x{decode(Codeword.from_text(line), table):x}")
    finally:
        if source is not sys.stdin:
            source.close()
    return 0


# ---------------------------------------------------------------- the parser


def _add_common(sub: argparse.ArgumentParser, cfg: dict) -> None:
    sub.add_argument("--config", metavar="PATH",
                     help="JSON file with defaults for tau0/lambda/out/"
                          "parity/json/figures")
    sub.add_argument("--out", default=cfg.get("out", "."),
                     help="output directory (default: current)")
    sub.add_argument("--json", action="store_true",
                     default=bool(cfg.get("json", False)),
                     help="emit JSON instead of CSV")
    sub.add_argument("--no-figures", dest="figures", action="store_false",
                     default=bool(cfg.get("figures", True)),
                     help="skip figure rendering")


def _add_params(sub: argparse.ArgumentParser, cfg: dict) -> None:
    sub.add_argument("--tau0", type=float,
                     default=float(cfg.get("tau0", DEFAULT_TAU0_PS)),
                     help="crosstalk-free wire delay in ps")
    sub.add_argument("--lambda", dest="lam", type=float,
                     default=float(cfg.get("lambda", DEFAULT_LAMBDA)),
                     help="coupling-to-ground capacitance ratio")


def _add_subject(sub: argparse.ArgumentParser, cfg: dict) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--constraint", metavar="LABEL",
                       help="constraint pair such as C2,1C")
    group.add_argument("--family", metavar="NAME",
                       help="classic family: OLC, FTC, FPC, or FOC")
    sub.add_argument("--n", type=int, required=True, help="bus width")
    sub.add_argument("--parity", type=int, choices=(0, 1),
                     default=int(cfg.get("parity", 0)),
                     help="seed or boundary parity")
    sub.add_argument("--prune",
                     action="store_true",
                     help="apply the side-window prune (C2,1C only)")


def _build_parser(cfg: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cacforge",
        description="Crosstalk-aware bus classification, codebooks, delay "
                    "reports, and fixed-length coding.")
    commands = parser.add_subparsers(dest="command", required=True)

    classify = commands.add_parser(
        "classify", help="emit window classification tables and sweeps")
    classify.add_argument("--taxonomy", default="middle",
                          choices=("middle", "wire2", "wire1", "side",
                                   "legacy"))
    classify.add_argument("--sweep", metavar="LO:HI",
                          help="sweep the coupling factor over integers LO..HI")
    classify.add_argument("--check", action="store_true",
                          help="diff the shipped golden tables against the "
                               "model and exit nonzero on mismatch")
    _add_params(classify, cfg)
    _add_common(classify, cfg)
    classify.set_defaults(func=_cmd_classify)

    build = commands.add_parser("build", help="construct and save a codebook")
    _add_subject(build, cfg)
    build.add_argument("--verify", action="store_true",
                       help="run size/legality consistency checks")
    build.add_argument("--matrix", action="store_true",
                       help="also export the expansion matrix as CSV")
    _add_common(build, cfg)
    build.set_defaults(func=_cmd_build)

    evaluate = commands.add_parser(
        "eval", help="evaluate worst-case delays and throughput")
    evaluate.add_argument("--codebooks", metavar="LIST",
                          help="comma list of books, e.g. iolc10,c21-10,olc10")
    evaluate.add_argument("--codebook", action="append", metavar="TOKEN",
                          help="one book (repeatable)")
    evaluate.add_argument("--parity", type=int, choices=(0, 1),
                          default=int(cfg.get("parity", 0)))
    _add_params(evaluate, cfg)
    _add_common(evaluate, cfg)
    evaluate.set_defaults(func=_cmd_eval)

    codec = commands.add_parser(
        "codec", help="encode hex data words / decode binary codewords")
    _add_subject(codec, cfg)
    mode = codec.add_mutually_exclusive_group(required=True)
    mode.add_argument("--encode", action="store_true",
                      help="read hex data words, write binary codewords")
    mode.add_argument("--decode", action="store_true",
                      help="read binary codewords, write hex data words")
    codec.add_argument("--input", metavar="PATH",
                       help="read lines from a file instead of stdin")
    _add_common(codec, cfg)
    codec.set_defaults(func=_cmd_codec)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    arguments = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = _load_config(arguments)
        parser = _build_parser(cfg)
        args = parser.parse_args(arguments)
        return args.func(args)
    except CacforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
