"""Fast self-check suites behind the `mcdlo selftest` command.

Each suite exercises one of the package's documented invariants at desk
scale: small fixed pools, exhaustive where cheap, seeded random sampling
where not.  The suites are deliberately independent of the pytest tree so a
deployed installation can be checked without the development dependencies.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .models import (LciStructure, MsoFin, WsoStructure, eval_atomic)
from .order import FinSet, IntervalUnion, enumerate_interval_unions
from .rewriting import CodePair, code_domain, defeq_translate, qf_positive_rewrite
from .semantics import bruteforce_eval, stabilize
from .syntax import (And, App, Const, Eq, Implies, Not, Or, SIGNATURES, Var,
                     is_positive_existential, parse, print_formula)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    failures: int

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {"name": self.name, "cases": self.cases,
                "failures": self.failures, "ok": self.ok}


POOL3 = (Fraction(0), Fraction(1, 3), Fraction(2, 3))
POOL4 = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
POOL6 = (Fraction(0), Fraction(1, 6), Fraction(1, 3), Fraction(1, 2),
         Fraction(2, 3), Fraction(5, 6))


def _subsets(pool) -> list[FinSet]:
    return [FinSet.from_iterable(c) for r in range(len(pool) + 1)
            for c in itertools.combinations(pool, r)]


def _direct(structure, f, asg) -> bool:
    """Exact evaluation of a quantifier-free formula."""
    if isinstance(f, Not):
        return not _direct(structure, f.body, asg)
    if isinstance(f, And):
        return _direct(structure, f.left, asg) and _direct(structure, f.right, asg)
    if isinstance(f, Or):
        return _direct(structure, f.left, asg) or _direct(structure, f.right, asg)
    if isinstance(f, Implies):
        return (not _direct(structure, f.left, asg)) or _direct(structure, f.right, asg)
    return eval_atomic(structure, f, asg)


def suite_nonempty_characterisation() -> SuiteResult:
    """A != bot iff A = {0} or {0} is contained in sinv(A u {0}, A)."""
    zero = FinSet.of(0)
    failures = 0
    sets = _subsets(POOL6)
    for a in sets:
        lhs = not a.is_empty()
        rhs = a == zero or zero.issubset(a.union(zero).sinv(a))
        if lhs != rhs:
            failures += 1
    return SuiteResult("nonempty-characterisation", len(sets), failures)


def suite_endpoint_code_domain() -> SuiteResult:
    """code_domain agrees with a brute-force search for an interval union
    realizing the candidate endpoint pair."""
    realizable = {(u.left_endpoints(), u.right_endpoints())
                  for u in enumerate_interval_unions(POOL4, include_end=True)
                  if not u.is_empty()}
    failures = cases = 0
    for b in _subsets(POOL4):
        for c in _subsets(POOL4):
            cases += 1
            if code_domain(b, c) != ((b, c) in realizable):
                failures += 1
    return SuiteResult("endpoint-code-domain", cases, failures)


def suite_code_roundtrip() -> SuiteResult:
    """Interval union -> endpoint code -> interval union is the identity."""
    corpus = enumerate_interval_unions(POOL3, include_end=True)
    failures = 0
    for u in corpus:
        pair = CodePair.of(u)
        if pair.to_interval_union() != u:
            failures += 1
    return SuiteResult("code-roundtrip", len(corpus), failures)


def _random_wso_qf(rng: random.Random):
    ops2 = ["union", "inter", "setminus", "delta"]

    def term(d):
        if d == 0:
            return rng.choice([Var("X"), Var("Y"), Const("bot"), Const("zero")])
        if rng.random() < 0.6:
            return App(rng.choice(ops2), (term(d - 1), term(d - 1)))
        if rng.random() < 0.5:
            return App(rng.choice(["min", "max"]), (term(d - 1),))
        return App("msinv", (term(d - 1), term(d - 1)))

    def formula(d):
        if d == 0:
            return Eq(term(rng.randint(0, 2)), term(rng.randint(0, 2)))
        c = rng.random()
        if c < 0.35:
            return Not(formula(d - 1))
        if c < 0.7:
            return And(formula(d - 1), formula(d - 1))
        return Or(formula(d - 1), formula(d - 1))

    return formula(rng.randint(1, 2))


def suite_positive_rewrite() -> SuiteResult:
    """qf_positive_rewrite output is positive existential and agrees with the
    input on every assignment from a small pool."""
    rng = random.Random(7)
    w = WsoStructure()
    pool = (Fraction(0), Fraction(1, 2))
    sets = _subsets(pool)
    failures = cases = 0
    for _ in range(8):
        f = _random_wso_qf(rng)
        out = qf_positive_rewrite(f)
        syntactic = is_positive_existential(out)
        for x in sets:
            for y in sets:
                cases += 1
                asg = {"X": x, "Y": y}
                want = _direct(w, f, asg)
                rep = stabilize("w", out, asg, kmax=3)
                if not syntactic or rep.verdict != want or not rep.stabilized:
                    failures += 1
    return SuiteResult("positive-rewrite", cases, failures)


def suite_order_definitions() -> SuiteResult:
    """The defined order relations agree with the primitive ones."""
    failures = cases = 0
    f = parse("(ltE X Y)", SIGNATURES["mo"])
    w = WsoStructure()
    tr = defeq_translate(f, "mo", "wso")
    for x in _subsets(POOL4):
        for y in _subsets(POOL4):
            cases += 1
            if _direct(w, tr, {"X": x, "Y": y}) != w.rel_ltE(x, y):
                failures += 1
    m = MsoFin(3)
    tr = defeq_translate(f, "mo", "msofin")
    for x in m.universe():
        for y in m.universe():
            cases += 1
            want = m.rel_ltE(x, y)
            if bruteforce_eval(m, tr, {"X": x, "Y": y}) != want:
                failures += 1
    return SuiteResult("order-definitions", cases, failures)


def suite_parse_print_roundtrip() -> SuiteResult:
    samples = [
        ("wso", "(exists X (not (= X bot)))"),
        ("wso", "(= (msinv (union A zero) A) B)"),
        ("wso", "(forall X (implies (= (min X) X) (= X X)))"),
        ("lci", "(= (l A) (r A))"),
        ("lci", "(exists D (and (= (r D) C) (= (max D) bot)))"),
        ("mo", "(forall X (implies (subset X Y) (ltE X Y)))"),
        ("msofin", "(= (sinv (union X zero)) zerostar)"),
    ]
    failures = 0
    for sig, text in samples:
        f = parse(text, SIGNATURES[sig])
        if print_formula(f) != text or parse(print_formula(f), SIGNATURES[sig]) != f:
            failures += 1
    return SuiteResult("parse-print-roundtrip", len(samples), failures)


def suite_membership_formula() -> SuiteResult:
    """The coded-membership formula matches interval-union membership."""
    from .rewriting import phi_mem
    from .syntax import FreshVars
    fresh = FreshVars({"Xl", "Xr", "Z"})
    f = phi_mem(Var("Xl"), Var("Xr"), Var("Z"), fresh)
    failures = cases = 0
    for u in enumerate_interval_unions(POOL3, include_end=True):
        if u.is_empty():
            continue
        pair = CodePair.of(u)
        for p in POOL3 + (Fraction(5, 6),):
            cases += 1
            asg = {"Xl": pair.left, "Xr": pair.right, "Z": FinSet.of(p)}
            rep = stabilize("w", f, asg, kmax=3)
            if rep.verdict != u.member(p) or not rep.stabilized:
                failures += 1
    return SuiteResult("membership-formula", cases, failures)


SUITES = [
    suite_nonempty_characterisation,
    suite_endpoint_code_domain,
    suite_code_roundtrip,
    suite_positive_rewrite,
    suite_order_definitions,
    suite_parse_print_roundtrip,
    suite_membership_formula,
]


def run_suites() -> list[SuiteResult]:
    return [s() for s in SUITES]
