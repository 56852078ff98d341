"""Command line: generate instances, prove bounds, and build report tables.

    branchdual gen random --n 30 --d 0.1,0.5 --count 10 --seed 0 --out data/
    branchdual bound --instances data/ --method wbh-vs,bfs --max-expansions 10000 --out res/
    branchdual tables res/results.jsonl --out res/
    branchdual profile res/results.jsonl --target-percent 5 --out res/profile.csv
    branchdual exact --instances data/small.inst
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from .instances import (gen_random, gen_turner, read_instance, read_matrix_market,
                        write_instance)
from .experiments import (CHECKPOINTS, METHODS, SEARCH_METHODS, RunConfig, load_results,
                          frontier_table, gap_table, profile_csv, profile_curves,
                          results_csv, results_jsonl, run_method, static_bounds,
                          table_csv, with_reference_ub)
from .bandwidth import bandwidth_domain
from .oracle import OracleCapExceeded, exact_bandwidth

INSTANCE_SUFFIX = ".inst"


class CliError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:  # start:stop:step, stop inclusive
            bits = [int(b) for b in part.split(":")]
            start, stop = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            out.extend(range(start, stop + 1, step))
        else:
            out.append(int(part))
    return out


def _instance_paths(items: list[str]) -> list[Path]:
    paths = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob(f"*{INSTANCE_SUFFIX}")) + sorted(p.glob("*.mtx")))
        elif p.exists():
            paths.append(p)
        else:
            raise CliError(f"no such instance file or directory: {item}")
    if not paths:
        raise CliError("no instances found")
    return paths


def _load(path: Path):
    if path.suffix == ".mtx":
        return read_matrix_market(path)
    return read_instance(path)


def cmd_gen(args) -> int:
    out = Path(args.out)
    if args.kind == "mm":
        records = [read_matrix_market(p) for p in _instance_paths(args.instances or [])]
    else:
        densities = _floats(args.d) if args.d else []
        count = args.count
        records = []
        if args.kind == "random":
            cells = [(None, d) for d in densities]
        else:
            phis = _ints(args.phi) if args.phi else []
            cells = [(phi, d) for phi in phis for d in densities]
        if not cells or count < 1:
            raise CliError("empty parameter grid: nothing to generate")
        with warnings.catch_warnings():
            if args.quiet:
                warnings.simplefilter("ignore", RuntimeWarning)
            for ci, (phi, d) in enumerate(cells):
                for s in range(count):
                    seed = args.seed + 1000 * ci + s
                    if phi is None:
                        records.append(gen_random(args.n, d, seed))
                    else:
                        records.append(gen_turner(args.n, phi, d, seed))
    out.mkdir(parents=True, exist_ok=True)
    for r in records:
        write_instance(r, out / f"{r.name}{INSTANCE_SUFFIX}")
    print(f"wrote {len(records)} instances to {out}")
    return 0


def _methods(text: str | None) -> tuple[str, ...]:
    if not text:
        return SEARCH_METHODS
    ms = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in ms if m not in METHODS]
    if bad:
        raise CliError(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(METHODS)}")
    return ms


def cmd_bound(args) -> int:
    config = RunConfig(methods=_methods(args.method), max_expansions=args.max_expansions,
                       target_bound=args.target_bound, target_percent=args.target_percent,
                       checkpoints=CHECKPOINTS, seed=args.seed)
    records = []
    for p in _instance_paths(args.instances):
        try:
            records.append(_load(p))
        except ValueError as exc:
            print(json.dumps({"instance": str(p), "error": str(exc)}), file=sys.stderr)
    records.sort(key=lambda r: r.name)
    results, errors = [], []
    for record in records:
        try:
            record = with_reference_ub(record)
            prepared = bandwidth_domain(record.graph)
            statics = static_bounds(record.graph)
        except (ValueError, OracleCapExceeded) as exc:
            errors.append({"instance": record.name, "error": str(exc)})
            continue
        for method in config.methods:
            try:
                res = run_method(record, method, config, prepared, statics)
            except Exception as exc:  # keep going; the failure is reported
                errors.append({"instance": record.name, "method": method, "error": repr(exc)})
                continue
            results.append(res)
            if args.out is None:
                sys.stdout.write(results_jsonl([res]))
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        jsonl, csv_path = out / "results.jsonl", out / "results.csv"
        with jsonl.open("a") as fh:
            fh.write(results_jsonl(results))
        text = results_csv(results)
        if csv_path.exists() and csv_path.stat().st_size > 0:
            text = text.split("\n", 1)[1]  # header already present
        with csv_path.open("a") as fh:
            fh.write(text)
        if errors:
            with (out / "errors.jsonl").open("a") as fh:
                fh.writelines(json.dumps(e, sort_keys=True) + "\n" for e in errors)
    for e in errors:
        print(json.dumps(e, sort_keys=True), file=sys.stderr)
    return 1 if errors and not results else 0


def _read_results(paths: list[str]):
    results = []
    for p in paths:
        results.extend(load_results(Path(p).read_text()))
    return results


def cmd_tables(args) -> int:
    results = _read_results(args.results)
    gaps = table_csv(gap_table(results), "gap_at")
    fronts = table_csv(frontier_table(results), "frontier_at")
    if args.out is None:
        sys.stdout.write(gaps + "\n" + fronts)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "gap_table.csv").write_text(gaps)
        (out / "frontier_table.csv").write_text(fronts)
    return 0


def cmd_profile(args) -> int:
    results = _read_results(args.results)
    missing = sorted({r.instance for r in results if r.reference_ub is None})
    for name in missing:
        print(f"warning: {name} has no reference UB; left out of the profile", file=sys.stderr)
    text = profile_csv(profile_curves(results, args.target_percent, args.max_expansions))
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    return 0


def cmd_exact(args) -> int:
    status = 0
    for p in _instance_paths(args.instances):
        record = _load(p)
        try:
            value = exact_bandwidth(record.graph)
        except OracleCapExceeded as exc:
            print(f"{record.name}: {exc}", file=sys.stderr)
            status = 1
            continue
        updated = record.with_ub(value, "exact")
        target = Path(args.out) / f"{record.name}{INSTANCE_SUFFIX}" if args.out else p
        if target.suffix == ".mtx":
            target = target.with_suffix(INSTANCE_SUFFIX)
        target.parent.mkdir(parents=True, exist_ok=True)
        write_instance(updated, target)
        print(f"{record.name} {value}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="branchdual",
                                     description="Branching-dual lower bounds for graph bandwidth")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write instance files for a parameter grid")
    g.add_argument("kind", choices=("random", "turner", "mm"))
    g.add_argument("--n", type=int, default=30)
    g.add_argument("--d", help="comma-separated densities")
    g.add_argument("--phi", help="comma-separated bandwidths or start:stop:step (turner)")
    g.add_argument("--count", type=int, default=10, help="instances per grid cell")
    g.add_argument("--seed", type=int, default=0, help="base seed")
    g.add_argument("--instances", nargs="*", help="Matrix Market files (kind mm)")
    g.add_argument("--out", required=True)
    g.add_argument("--quiet", action="store_true", help="silence density clamp warnings")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bound", help="run bound provers on instances")
    b.add_argument("--instances", nargs="+", required=True)
    b.add_argument("--method", help=f"comma-separated subset of {','.join(METHODS)}")
    b.add_argument("--max-expansions", type=int, default=10000)
    b.add_argument("--target-bound", type=int)
    b.add_argument("--target-percent", type=float)
    b.add_argument("--seed", type=int, default=0, help="recorded only; searches are deterministic")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    t = sub.add_parser("tables", help="gap and frontier tables from result files")
    t.add_argument("results", nargs="+")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tables)

    p = sub.add_parser("profile", help="performance-profile curve from result files")
    p.add_argument("results", nargs="+")
    p.add_argument("--target-percent", type=float, required=True)
    p.add_argument("--max-expansions", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile)

    e = sub.add_parser("exact", help="exact bandwidth of small instances, stored as reference UB")
    e.add_argument("--instances", nargs="+", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_exact)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
