"""Turner30 experiment: planted-bandwidth graphs, profiles against the planted phi.

    python scripts/run_turner30.py --out runs/turner30 [--max-expansions 1000]

The planted phi is an upper bound on the optimum, so every proved bound
must stay at or below it; the script reports any run that does not.
"""

import argparse
from pathlib import Path

from branchdual.cli import main as cli
from branchdual.experiments import load_results


def run(out: Path, max_expansions: int, count: int) -> int:
    cli(["gen", "turner", "--n", "30", "--phi", "3:27:3", "--d", "0.3,0.5",
         "--count", str(count), "--seed", "100000", "--quiet", "--out", str(out / "inst")])
    cli(["bound", "--instances", str(out / "inst"),
         "--method", "wbh-vs,wbh-lr,dfs,bfs,static-bounds",
         "--max-expansions", str(max_expansions), "--out", str(out / "res")])
    results = out / "res" / "results.jsonl"
    for pct in (0, 5, 10):
        cli(["profile", str(results), "--target-percent", str(pct),
             "--out", str(out / "res" / f"profile_{pct}pct.csv")])
    bad = [r for r in load_results(results.read_text())
           if r.certificate.proved_bound > r.reference_ub]
    for r in bad:
        print(f"bound above planted phi: {r.instance} {r.method} "
              f"{r.certificate.proved_bound} > {r.reference_ub}")
    print(f"{len(bad)} runs above the planted bandwidth")
    return 1 if bad else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/turner30")
    ap.add_argument("--max-expansions", type=int, default=1000)
    ap.add_argument("--count", type=int, default=10, help="graphs per (phi, d) cell")
    args = ap.parse_args()
    raise SystemExit(run(Path(args.out), args.max_expansions, args.count))
