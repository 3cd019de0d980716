#!/usr/bin/env python3
"""Stabilization report for the parameter-elimination pipeline.

Each relational formula with finite-set parameters is translated to a
parameter-free formula over the restriction to the parameter hull; the
component sentences are decided by the budgeted grid oracle.  The script
translates a corpus of formulas, checks the translation against direct
grid evaluation on all parameter tuples from a small rational pool, and
prints per-formula agreement, oracle-sentence counts, and timing.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from mcdlo.fefvau import funky, translate_with_parameters
from mcdlo.models import WsoStructure, restrict
from mcdlo.order import FinSet
from mcdlo.semantics import bruteforce_eval, stabilize
from mcdlo.syntax import SIGNATURES, free_vars, parse

DEFAULT_CORPUS = [
    "(subset A B)",
    "(not (subset A B))",
    "(ltE A B)",
    "(and (subset A B) (not (= A B)))",
    "(exists X (and (subset X A) (not (= X bot))))",
    "(forall X (implies (subset X A) (subset X B)))",
    "(exists X (and (subset X A) (ltE X B)))",
    "(exists X (exists Y (and (subset X A) (and (subset Y X) (subset Y B)))))",
    "(or (= A bot) (exists X (and (subset X A) (= X B))))",
    "(forall X (implies (and (subset X A) (subset X B)) (= X bot)))",
]


@dataclass
class PipelineConfig:
    corpus: list[str] = field(default_factory=lambda: list(DEFAULT_CORPUS))
    pool: list[Fraction] = field(default_factory=lambda: [
        Fraction(0), Fraction(1, 3), Fraction(1, 2)])
    kmax: int = 4


def subsets_of(pool):
    out = []
    for r in range(len(pool) + 1):
        for combo in itertools.combinations(pool, r):
            out.append(FinSet.from_iterable(combo))
    return out


def run(config: PipelineConfig) -> int:
    w = WsoStructure()
    mo = SIGNATURES["mo"]
    subs = subsets_of(config.pool)
    grand_cases = grand_failures = unstable_formulas = 0

    for text in config.corpus:
        phi = parse(text, mo)
        params = tuple(sorted(free_vars(phi)))
        t0 = time.time()
        out = translate_with_parameters(phi, params)
        t_translate = time.time() - t0
        if not out.stabilized:
            unstable_formulas += 1
            print(f"UNSTABLE  {text}  "
                  f"({len(out.sentences)} sentences, {t_translate:.2f}s)")
            continue

        t0 = time.time()
        cases = failures = skipped = 0
        for values in itertools.product(subs, repeat=len(params)):
            asg = dict(zip(params, values))
            direct = stabilize("w", phi, asg, kmax=config.kmax)
            if not direct.stabilized:
                skipped += 1
                continue
            er = restrict(w, funky(list(asg.values())))
            index_asg = {n: er.to_msofin(v) for n, v in asg.items()}
            got = bruteforce_eval(er.msofin(), out.psi, index_asg)
            cases += 1
            failures += got != direct.verdict
        grand_cases += cases
        grand_failures += failures
        status = "ok " if failures == 0 else "BAD"
        print(f"{status}  {text}")
        print(f"     {len(out.sentences)} oracle sentences, "
              f"{cases} tuples checked, {failures} mismatches, "
              f"{skipped} skipped, translate {t_translate:.2f}s, "
              f"check {time.time() - t0:.2f}s")

    total = len(config.corpus)
    print(f"\n{total - unstable_formulas}/{total} formulas stabilized; "
          f"{grand_failures}/{grand_cases} tuple mismatches")
    return 0 if grand_failures == 0 and unstable_formulas == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--formula", action="append", default=None,
                        help="formula to check (repeatable; default corpus "
                        "otherwise)")
    parser.add_argument("--kmax", type=int, default=4,
                        help="stabilization budget for the grid oracle")
    args = parser.parse_args(argv)
    config = PipelineConfig(kmax=args.kmax)
    if args.formula:
        config.corpus = args.formula
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
