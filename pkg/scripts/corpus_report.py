"""Summarize the golden corpus: declarations, assertions and resolved types per file."""

import argparse
import glob
import os
import sys
from collections import Counter

from deducto.check import check
from deducto.dsl import parse

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", nargs="?", default=os.path.join(REPO, "corpus"))
    ap.add_argument("--types", action="store_true", help="also list every resolved type")
    args = ap.parse_args(argv)

    totals = Counter()
    for path in sorted(glob.glob(os.path.join(args.corpus, "*.tdl"))):
        report = check(parse(open(path).read(), path))
        n_assert = len(report.assertions)
        totals.update(files=1, decls=len(report.entries), asserts=n_assert, failed=report.failed, errors=report.errors)
        print(
            f"{os.path.basename(path):28} {len(report.entries):4} decls {n_assert:4} asserts "
            f"{report.failed:2} failed {report.errors:2} errors"
        )
        if args.types:
            for e in report.entries:
                if e.resolved is not None:
                    print(f"    {e.name:16} {e.resolved}")
    print(
        f"total: {totals['files']} files, {totals['decls']} decls, {totals['asserts']} asserts, "
        f"{totals['failed']} failed, {totals['errors']} errors"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
