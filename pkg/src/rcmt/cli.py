"""Command-line front end.

    rcmt <encode|decode|roundtrip|stats|metrics|reward> [flags] <input> [-o output]

Exit codes: 0 success, 1 usage error, 2 input parse error, 3 verification
failure. Data goes to standard output (or ``-o``); diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

from rcmt import codec
from rcmt.analysis import format_table, measure, summarize, theoretical_bound
from rcmt.errors import RcmtError
from rcmt.metrics import StabilityMode, batch_metrics
from rcmt.molgraph import canonical_hash
from rcmt.reward import HarmonicOracle, RewardWeights, Thermostat, combine, reward
from rcmt.sdf import format_record, graph_record, parse_record, split_records

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VERIFY = 3

# Below this many items a process pool costs more than it saves.
_PARALLEL_MIN = 256


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _delta_from_env():
    raw = os.environ.get("RCMT_DELTA")
    if raw is None or not raw.strip():
        return codec.DEFAULT_DELTA
    try:
        return codec.as_delta(raw.strip())
    except (ValueError, ArithmeticError) as exc:
        raise UsageError(f"RCMT_DELTA: {exc}") from None


def _pmap(fn, items, jobs):
    """Order-preserving map, fanned out over processes for large inputs."""
    if jobs <= 1 or len(items) < _PARALLEL_MIN:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path} is not UTF-8 text: {exc}") from None


def _emit(text: str, output: str | None):
    if output is None or output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _machine(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _warn(msg: str):
    print(msg, file=sys.stderr)


# Workers return (value, error message) pairs so one bad record does not
# abort the whole batch inside a process pool.


def _parse_worker(args):
    raw, delta = args
    try:
        record = parse_record(raw)
    except RcmtError as exc:
        return None, str(exc)
    return replace(record, graph=codec.requantize(record.graph, delta)), None


def _load_sdf(path: str, jobs: int, delta) -> tuple[list, int]:
    raws = split_records(_read(path))
    results = _pmap(_parse_worker, [(raw, delta) for raw in raws], jobs)
    records = []
    failed = 0
    for record, error in results:
        if error is not None:
            failed += 1
            _warn(error)
        else:
            records.append(record)
    return records, failed


def _decode_worker(args):
    number, line = args
    try:
        return codec.decode(line, line=number), None
    except RcmtError as exc:
        return None, str(exc)


def _load_rcmt(path: str, jobs: int) -> tuple[list, int]:
    lines = _read(path).split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    results = _pmap(_decode_worker, list(enumerate(lines, start=1)), jobs)
    graphs = []
    failed = 0
    for graph, error in results:
        if error is not None:
            failed += 1
            _warn(error)
        else:
            graphs.append(graph)
    return graphs, failed


def _load_graphs(path: str, jobs: int, delta):
    if path.endswith(".rcmt"):
        return _load_rcmt(path, jobs)
    records, failed = _load_sdf(path, jobs, delta)
    return [r.graph for r in records], failed


def _summary(failed: int, total: int):
    if failed:
        _warn(f"{failed} failed of {total}")


def cmd_encode(args) -> int:
    delta = _delta_from_env()
    raws = split_records(_read(args.input))
    results = _pmap(_encode_worker, [(raw, delta) for raw in raws], args.jobs)
    lines = []
    failed = 0
    for line, error in results:
        if error is not None:
            failed += 1
            _warn(error)
        else:
            lines.append(line + "\n")
    _emit("".join(lines), args.output)
    _summary(failed, len(raws))
    return EXIT_PARSE if failed else EXIT_OK


def _encode_worker(args):
    record, error = _parse_worker(args)
    if error is not None:
        return None, error
    return codec.encode(record.graph), None


def _decode_format_worker(args):
    graph, error = _decode_worker(args)
    if error is not None:
        return None, error
    try:
        return format_record(graph_record(graph)), None
    except ValueError as exc:
        return None, f"line {args[0]}: {exc}"


def cmd_decode(args) -> int:
    lines = _read(args.input).split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    results = _pmap(_decode_format_worker, list(enumerate(lines, start=1)), args.jobs)
    out = []
    failed = 0
    for text, error in results:
        if error is not None:
            failed += 1
            _warn(error)
        else:
            out.append(text)
    _emit("".join(out), args.output)
    _summary(failed, len(lines))
    return EXIT_PARSE if failed else EXIT_OK


def cmd_roundtrip(args) -> int:
    delta = _delta_from_env()
    raws = split_records(_read(args.input))
    rows = []
    mismatches = failed = 0
    max_rmsd = 0.0
    for raw in raws:
        record, error = _parse_worker((raw, delta))
        if error is not None:
            failed += 1
            _warn(error)
            rows.append({"record": raw.index, "status": "ERROR", "error": error})
            continue
        try:
            report = codec.roundtrip_report(record.graph)
        except RcmtError as exc:
            report = None
            _warn(f"record {raw.index}: decode failed: {exc}")
        ok = report is not None and report.ok
        mismatches += not ok
        rmsd = report.rmsd if report is not None else math.inf
        max_rmsd = max(max_rmsd, rmsd)
        row = {"record": raw.index, "status": "PASS" if ok else "FAIL"}
        if report is not None:
            row.update(
                elements_equal=report.elements_equal,
                coords_equal=report.coords_equal,
                bonds_equal=report.bonds_equal,
                rmsd=report.rmsd if math.isfinite(report.rmsd) else None,
            )
        rows.append(row)

    if args.format == "machine":
        text = _machine(
            {
                "records": rows,
                "max_rmsd": max_rmsd if math.isfinite(max_rmsd) else None,
                "passed": sum(r["status"] == "PASS" for r in rows),
                "failed": mismatches,
                "errors": failed,
            }
        )
    else:
        lines = [f"record {r['record']}: {r['status']}" for r in rows]
        lines.append(f"max rmsd {max_rmsd:.4f} A over {len(rows)} records")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    if mismatches:
        return EXIT_VERIFY
    return EXIT_PARSE if failed else EXIT_OK


def cmd_stats(args) -> int:
    delta = _delta_from_env()
    records, failed = _load_sdf(args.input, args.jobs, delta)
    reports = []
    failures = []
    for index, record in enumerate(records):
        try:
            reports.append(measure(record))
        except (RcmtError, ValueError) as exc:
            failures.append((index, str(exc)))
            _warn(f"record {index}: {exc}")
    if not reports:
        _warn("no measurable records")
        return EXIT_PARSE
    summary = summarize(reports, failures)
    bounds = None
    if args.bound is not None:
        bounds = [
            theoretical_bound(r.n_atoms, r.n_bonds, args.bound, float(delta)) if r.n_atoms else math.nan
            for r in summary.per_molecule
        ]
    if args.format == "machine":
        doc = summary.to_dict()
        if bounds is not None:
            doc["bound_L"] = args.bound
            doc["bounds"] = [b if math.isfinite(b) else None for b in bounds]
        text = _machine(doc)
    else:
        text = format_table(summary, bounds)
    _emit(text, args.output)
    return EXIT_PARSE if failed or failures else EXIT_OK


def cmd_metrics(args) -> int:
    graphs, failed = _load_graphs(args.input, args.jobs, _delta_from_env())
    if not graphs:
        _warn("no molecules to evaluate")
        return EXIT_PARSE
    report = batch_metrics(graphs, mode=StabilityMode(args.mode))
    text = _machine(report.to_dict()) if args.format == "machine" else report.table()
    _emit(text, args.output)
    return EXIT_PARSE if failed else EXIT_OK


def load_reward_config(path: str | None) -> dict:
    """Read a JSON reward configuration and validate every field.

    Keys: ``weights`` (w_mol, w_atom, w_div, w_valid), ``kT``, ``epsilon``,
    ``lr`` and ``reference_corpus`` (path, relative to the config file).
    """
    raw = {}
    if path is not None:
        try:
            raw = json.loads(_read(path))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError(f"{path}: config must be a JSON object")
    known = {"weights", "kT", "epsilon", "lr", "reference_corpus"}
    unknown = set(raw) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        weights = RewardWeights(**raw.get("weights", {}))
        thermo = Thermostat(float(raw.get("kT", 1.0)))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    epsilon = raw.get("epsilon", 0.2)
    lr = raw.get("lr", 1e-4)
    if not isinstance(epsilon, (int, float)) or not 0 < epsilon < 1:
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not isinstance(lr, (int, float)) or not lr >= 0:
        raise UsageError(f"lr must be nonnegative, got {lr!r}")
    corpus = raw.get("reference_corpus")
    if corpus is not None and path is not None:
        corpus = str(Path(path).parent / corpus)
    return {"weights": weights, "thermo": thermo, "epsilon": epsilon, "lr": lr, "reference_corpus": corpus}


def cmd_reward(args) -> int:
    config = load_reward_config(args.config)
    delta = _delta_from_env()
    oracle = HarmonicOracle()
    if config["reference_corpus"]:
        refs, ref_failed = _load_graphs(config["reference_corpus"], args.jobs, delta)
        if ref_failed or not refs:
            _warn("reference corpus failed to load")
            return EXIT_PARSE
        oracle = oracle.calibrated(refs)
    graphs, failed = _load_graphs(args.input, args.jobs, delta)
    weights, thermo = config["weights"], config["thermo"]
    seen: set[str] = set()
    rows = []
    for index, g in enumerate(graphs):
        try:
            b = reward(g, weights, oracle, thermo, seen)
        except ValueError as exc:
            failed += 1
            _warn(f"molecule {index}: {exc}")
            continue
        seen.add(canonical_hash(g))
        rows.append((index, b))
    if not rows:
        _warn("no molecules scored")
        return EXIT_PARSE
    n = len(rows)
    mean = combine(
        weights,
        math.fsum(b.s_mol for _, b in rows) / n,
        math.fsum(b.s_atom for _, b in rows) / n,
        math.fsum(b.diversity for _, b in rows) / n,
        math.fsum(b.validity for _, b in rows) / n,
    )
    if args.format == "machine":
        text = _machine(
            {
                "molecules": [dict(index=i, **b.to_dict()) for i, b in rows],
                "mean": mean.to_dict(),
                "weights": asdict(weights),
                "kT": thermo.kT,
            }
        )
    else:
        lines = [f"{'#':>4} {'s_mol':>10} {'s_atom':>10} {'div':>4} {'valid':>5} {'total':>10}"]
        for i, b in rows:
            lines.append(f"{i:>4} {b.s_mol:>10.6f} {b.s_atom:>10.6f} {b.diversity:>4.0f} {b.validity:>5.0f} {b.total:>10.6f}")
        lines.append(
            f"mean {mean.s_mol:>10.6f} {mean.s_atom:>10.6f} {mean.diversity:>4.2f} {mean.validity:>5.2f} {mean.total:>10.6f}"
        )
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return EXIT_PARSE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input file (.sdf or .rcmt)")
    common.add_argument("-o", "--output", help="output path (default: standard output)")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    common.add_argument("--format", choices=("table", "machine"), default="table")

    parser = _Parser(prog="rcmt", description="Reversible compact text encoding for 3D molecules.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("encode", parents=[common], help="SDF -> one compact line per record")
    sub.add_parser("decode", parents=[common], help="compact lines -> SDF")
    sub.add_parser("roundtrip", parents=[common], help="verify lossless encode/decode")
    p = sub.add_parser("stats", parents=[common], help="character-count compression statistics")
    p.add_argument("--bound", type=float, metavar="L", help="also print the size bound for coordinate range L")
    p = sub.add_parser("metrics", parents=[common], help="stability, validity and uniqueness percentages")
    p.add_argument("--mode", choices=("explicit", "implicit"), default="explicit")
    p = sub.add_parser("reward", parents=[common], help="per-molecule reward breakdown")
    p.add_argument("--config", help="JSON reward configuration")
    return parser


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "roundtrip": cmd_roundtrip,
    "stats": cmd_stats,
    "metrics": cmd_metrics,
    "reward": cmd_reward,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help (0) and on usage errors (1).
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.jobs < 1:
        _warn("rcmt: error: --jobs must be at least 1")
        return EXIT_USAGE
    if getattr(args, "bound", None) is not None and not args.bound > 0:
        _warn("rcmt: error: --bound must be positive")
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _warn(f"rcmt: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
