#!/usr/bin/env python3
"""Exhaustive search over the successor-preimage witness characterisation.

For every pair (A, B) of finite sets drawn from a rational grid, collect the
right-endpoint sets of all interval unions D (with endpoints in a refined
grid) whose left endpoints match the two-case prescription, whose right
endpoints lie in A, and which cover A.  With the unboundedness requirement
on D the collected set is exactly {msinv(A, B)}; without it, bounded
witnesses ending at max(A) produce spurious results.  The script reports
both counts and prints the smallest counterexamples for the bounded
variant.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from mcdlo.order import FinSet, enumerate_interval_unions


@dataclass
class SearchConfig:
    pool: list[Fraction] = field(default_factory=lambda: [
        Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(2, 3),
        Fraction(4, 5)])
    extra_grid: list[Fraction] = field(default_factory=lambda: [
        Fraction(9, 10), Fraction(19, 20)])
    max_examples: int = 5

    def grid(self) -> list[Fraction]:
        mids = [(a + b) / 2 for a, b in zip(self.pool, self.pool[1:])]
        return sorted(set(self.pool) | set(mids) | set(self.extra_grid))


def subsets_of(pool):
    out = []
    for r in range(len(pool) + 1):
        for combo in itertools.combinations(pool, r):
            out.append(FinSet.from_iterable(combo))
    return out


def witness_results(a: FinSet, b: FinSet, buckets, require_unbounded: bool):
    bp = a.inter(b)
    if a.is_empty() or bp.is_empty():
        return {FinSet()}
    if a.min_set().issubset(bp):
        target = bp.minus(bp.min_set()).union(FinSet.of(0))
    else:
        target = bp.union(FinSet.of(0))
    out = set()
    for d in buckets.get(target, []):
        if require_unbounded and d.is_bounded():
            continue
        c = d.right_endpoints()
        if c.issubset(a) and all(d.member(p) for p in a.points):
            out.add(c)
    return out


def run(config: SearchConfig) -> int:
    grid = config.grid()
    t0 = time.time()
    buckets: dict[FinSet, list] = {}
    for d in enumerate_interval_unions(grid, include_end=True):
        buckets.setdefault(d.left_endpoints(), []).append(d)
    n_unions = sum(len(v) for v in buckets.values())
    print(f"grid: {len(grid)} points, {n_unions} interval unions "
          f"({time.time() - t0:.1f}s to enumerate)")

    cases = 0
    bad_unbounded = 0
    bad_bounded = []
    t0 = time.time()
    for a in subsets_of(config.pool):
        for r in range(len(a) + 1):
            for combo in itertools.combinations(a.points, r):
                b = FinSet.from_iterable(combo)
                cases += 1
                want = {a.sinv(b)}
                if witness_results(a, b, buckets, True) != want:
                    bad_unbounded += 1
                got = witness_results(a, b, buckets, False)
                if got != want:
                    bad_bounded.append((a, b, got - want))

    print(f"{cases} pairs searched in {time.time() - t0:.1f}s")
    print(f"unbounded-witness variant: {bad_unbounded} mismatches")
    print(f"bounded-witness variant:   {len(bad_bounded)} mismatches")
    smallest = sorted(bad_bounded, key=lambda t: (len(t[0]), len(t[1])))
    for a, b, spurious in smallest[:config.max_examples]:
        print(f"  A={a} B={b} spurious C values: {sorted(spurious, key=str)}")
    return 0 if bad_unbounded == 0 and bad_bounded else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-examples", type=int, default=5,
                        help="counterexamples to print for the bounded variant")
    args = parser.parse_args(argv)
    return run(SearchConfig(max_examples=args.max_examples))


if __name__ == "__main__":
    sys.exit(main())
