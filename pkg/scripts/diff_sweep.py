"""Run the differential oracle over the corpus and several generator seeds.

Example:
    python3 scripts/diff_sweep.py --cc g++ --cc clang++ --seeds 0 1 2 --count 1000
"""

import argparse
import glob
import json
import os
import sys
import time

from deducto.dsl import parse
from deducto.errors import CompilerUnavailable
from deducto.gen import GenConfig, generate_programs
from deducto.oracle import SKIP_EXIT, compiler_argv, diff_oracle

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def corpus_files(directory):
    for path in sorted(glob.glob(os.path.join(directory, "*.tdl"))):
        sf = parse(open(path).read(), path)
        if sf.expect == "pass":
            yield sf


def sweep(cc, seeds, count, batch, corpus):
    rows = []
    sources = [("corpus", sf) for sf in corpus_files(corpus)]
    for seed in seeds:
        cfg = GenConfig(seed=seed, count=count, batch=batch)
        sources += [(f"seed={seed}", sf) for sf in generate_programs(cfg)]
    for label, sf in sources:
        t0 = time.perf_counter()
        report = diff_oracle(sf, cc)
        rows.append(
            {
                "cc": cc,
                "source": label,
                "path": sf.path,
                "checks": report.checks,
                "divergences": [d.to_json() for d in report.divergences],
                "seconds": round(time.perf_counter() - t0, 3),
            }
        )
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cc", action="append", help="compiler to compare against (repeatable)")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--batch", type=int, default=100)
    ap.add_argument("--corpus", default=os.path.join(REPO, "corpus"))
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)

    compilers = []
    for cc in args.cc or [os.environ.get("CXX", "c++")]:
        try:
            compiler_argv(cc)
            compilers.append(cc)
        except CompilerUnavailable as exc:
            print(f"skipping {cc}: {exc}", file=sys.stderr)
    if not compilers:
        return SKIP_EXIT

    rows = [row for cc in compilers for row in sweep(cc, args.seeds, args.count, args.batch, args.corpus)]
    if args.json:
        json.dump(rows, sys.stdout, indent=2)
        print()
    else:
        for cc in compilers:
            mine = [r for r in rows if r["cc"] == cc]
            checks = sum(r["checks"] for r in mine)
            bad = [d for r in mine for d in r["divergences"]]
            secs = sum(r["seconds"] for r in mine)
            print(f"{cc}: {len(mine)} programs, {checks} checks, {len(bad)} divergences, {secs:.1f}s")
            for d in bad:
                print(f"  {d['name']}: {d['kind']} engine={d['engine']} {d['detail']}")
    return 1 if any(r["divergences"] for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
