"""Acceptance criteria, one test per criterion.

Each test prints a single pass/fail line (visible with `pytest -s` or in the
captured output) and enforces its own wall-clock budget.  Criterion 10 is a
documented limitation: the global model-completeness statements quantify
over all models and embeddings and are exercised only through their
constructive ingredients (criteria 5-8); the test checks that the
limitation is documented.
"""

import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from mcdlo.fefvau import PowerStructure, atomic_sequences, funky, fv_reduce, \
    translate_with_parameters
from mcdlo.models import (ElementRestriction, LciStructure, MsoFin,
                          WsoStructure, eval_atomic, restrict)
from mcdlo.order import FinSet, IntervalUnion, enumerate_interval_unions
from mcdlo.rewriting import (code_domain, defeq_translate, phi_mem,
                             phi_subset, qf_positive_rewrite, is_positive_wso)
from mcdlo.semantics import bruteforce_eval, grid_eval, relativize, stabilize
from mcdlo.syntax import (And, App, Const, Eq, Exists, Forall, FreshVars,
                          LtEAtom, Not, Or, RAtom, SIGNATURES, SubsetAtom,
                          Var, free_vars, parse, print_formula)

from conftest import POOL3, POOL4, POOL5, POOL6, subsets_of

W = WsoStructure()
MO = SIGNATURES["mo"]
WSO = SIGNATURES["wso"]


def report(num, name, failures, cases, elapsed, budget):
    ok = failures == 0 and elapsed < budget
    line = (f"criterion {num:2d} [{name}]: {'PASS' if ok else 'FAIL'} "
            f"({cases} cases, {failures} failures, {elapsed:.1f}s/"
            f"{budget:.0f}s)")
    print(line, file=sys.stderr, flush=True)
    assert failures == 0, line
    assert elapsed < budget, line
    return line


def direct_qf(structure, f, asg):
    from mcdlo.syntax import Implies, Not as NotF
    if isinstance(f, NotF):
        return not direct_qf(structure, f.body, asg)
    if isinstance(f, And):
        return direct_qf(structure, f.left, asg) and direct_qf(structure, f.right, asg)
    if isinstance(f, Or):
        return direct_qf(structure, f.left, asg) or direct_qf(structure, f.right, asg)
    if isinstance(f, Implies):
        return (not direct_qf(structure, f.left, asg)) or direct_qf(structure, f.right, asg)
    return eval_atomic(structure, f, asg)


def test_criterion_01_nonempty_characterisation():
    t0 = time.time()
    zero = FinSet.of(0)
    failures = cases = 0
    for a in subsets_of(POOL6):
        cases += 1
        lhs = not a.is_empty()
        rhs = a == zero or zero.issubset(a.union(zero).sinv(a))
        failures += lhs != rhs
    report(1, "nonempty characterisation", failures, cases,
           time.time() - t0, 1.0)


# -- criterion 2: the successor-preimage witness over interval unions --------

GRID11 = sorted(set(POOL5)
                | {(a + b) / 2 for a, b in zip(POOL5, POOL5[1:])}
                | {Fraction(9, 10), Fraction(19, 20)})


def _collect_witness_results(a, b, require_unbounded, buckets):
    """Right-endpoint sets of all interval unions D realizing the two-case
    witness condition for the pair (a, b)."""
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


def _witness_buckets():
    buckets = {}
    for d in enumerate_interval_unions(GRID11, include_end=True):
        buckets.setdefault(d.left_endpoints(), []).append(d)
    return buckets


def test_criterion_02_sinv_witness_characterisation():
    t0 = time.time()
    buckets = _witness_buckets()
    failures = cases = 0
    for a in subsets_of(POOL5):
        for r in range(len(a) + 1):
            for combo in itertools.combinations(a.points, r):
                b = FinSet.from_iterable(combo)
                cases += 1
                got = _collect_witness_results(a, b, True, buckets)
                failures += got != {a.sinv(b)}
    report(2, "successor-preimage witness", failures, cases,
           time.time() - t0, 60.0)


def test_criterion_02_addendum_bounded_witness_admits_spurious_results():
    """The witness condition without the unboundedness requirement is not
    sound: a bounded D may end at max(A), admitting it as a right endpoint
    although it has no successor.  This records the counterexample family."""
    buckets = _witness_buckets()
    a = b = FinSet.of(0)
    got = _collect_witness_results(a, b, False, buckets)
    assert a.sinv(b) == FinSet()
    assert FinSet.of(0) in got  # spurious: D = [0,0] yields C = {0}
    counter_count = 0
    for a in subsets_of(POOL5):
        for r in range(1, len(a) + 1):
            for combo in itertools.combinations(a.points, r):
                b = FinSet.from_iterable(combo)
                if _collect_witness_results(a, b, False, buckets) != {a.sinv(b)}:
                    counter_count += 1
    assert counter_count > 0


def test_criterion_03_endpoint_pair_lemma():
    t0 = time.time()
    realizable = {(u.left_endpoints(), u.right_endpoints())
                  for u in enumerate_interval_unions(POOL4, include_end=True)
                  if not u.is_empty()}
    failures = cases = 0
    for b in subsets_of(POOL4):
        for c in subsets_of(POOL4):
            cases += 1
            failures += code_domain(b, c) != ((b, c) in realizable)
    report(3, "endpoint-pair lemma", failures, cases, time.time() - t0, 10.0)


def test_criterion_04_membership_and_inclusion_formulas():
    t0 = time.time()
    corpus = enumerate_interval_unions(POOL4, include_end=True)
    fresh = FreshVars({"Xl", "Xr", "Yl", "Yr", "Z"})
    mem = phi_mem(Var("Xl"), Var("Xr"), Var("Z"), fresh)
    failures = cases = 0
    for u in corpus:
        if u.is_empty():
            continue
        for z in POOL4:
            cases += 1
            asg = {"Xl": u.left_endpoints(), "Xr": u.right_endpoints(),
                   "Z": FinSet.of(z)}
            failures += direct_qf(W, mem, asg) != u.member(z)
    sub = phi_subset(Var("Xl"), Var("Xr"), Var("Yl"), Var("Yr"), fresh)
    for u in corpus:
        for v in corpus:
            cases += 1
            asg = {"Xl": u.left_endpoints(), "Xr": u.right_endpoints(),
                   "Yl": v.left_endpoints(), "Yr": v.right_endpoints()}
            rep = stabilize("w", sub, asg, kmax=3)
            failures += (not rep.stabilized) or rep.verdict != u.subset(v)
    report(4, "coded membership/inclusion", failures, cases,
           time.time() - t0, 60.0)


def test_criterion_05_definitional_equivalences():
    t0 = time.time()
    failures = cases = 0
    mo_atoms = [SubsetAtom(Var("X"), Var("Y")), LtEAtom(Var("X"), Var("Y")),
                Eq(Var("X"), Var("Y"))]
    msofin_atoms = [Eq(App("union", (Var("X"), Var("Y"))), Var("Z")),
                    Eq(App("inter", (Var("X"), Var("Y"))), Var("Z")),
                    Eq(App("sinv", (Var("X"),)), Var("Z")),
                    Eq(Var("X"), Const("bot")),
                    Eq(Var("X"), Const("zero")),
                    Eq(Var("X"), Const("zerostar"))]
    for n in range(5):
        m = MsoFin(n)
        univ = list(m.universe())
        for atom in mo_atoms:
            tr = defeq_translate(atom, "mo", "msofin")
            for x in univ:
                for y in univ:
                    cases += 1
                    asg = {"X": x, "Y": y}
                    failures += (eval_atomic(m, atom, asg)
                                 != bruteforce_eval(m, tr, asg))
        for atom in msofin_atoms:
            tr = defeq_translate(atom, "msofin", "mo")
            names = sorted(free_vars(atom))
            for vals in itertools.product(univ, repeat=len(names)):
                cases += 1
                asg = dict(zip(names, vals))
                failures += (bruteforce_eval(m, atom, asg)
                             != bruteforce_eval(m, tr, asg))
    region = FinSet.from_iterable(POOL4)
    er = restrict(W, region)
    m4 = er.msofin()
    subs = subsets_of(POOL4)
    for atom in mo_atoms:
        tr = defeq_translate(atom, "mo", "wso")
        for x in subs:
            for y in subs:
                cases += 1
                asg = {"X": x, "Y": y}
                failures += eval_atomic(W, atom, asg) != direct_qf(W, tr, asg)
    wso_atoms = [Eq(App("union", (Var("X"), Var("Y"))), Var("Z")),
                 Eq(App("inter", (Var("X"), Var("Y"))), Var("Z")),
                 Eq(App("min", (Var("X"),)), Var("Z")),
                 Eq(App("max", (Var("X"),)), Var("Z")),
                 Eq(App("msinv", (Var("X"), Var("Y"))), Var("Z")),
                 Eq(Var("X"), Const("bot")),
                 Eq(Var("X"), Const("zero"))]
    for atom in wso_atoms:
        tr = defeq_translate(atom, "wso", "mo")
        names = sorted(free_vars(atom))
        for vals in itertools.product(subs, repeat=len(names)):
            cases += 1
            asg = dict(zip(names, vals))
            got = bruteforce_eval(m4, tr,
                                  {k: er.to_msofin(v) for k, v in asg.items()})
            failures += eval_atomic(W, atom, asg) != got
    report(5, "definitional equivalences", failures, cases,
           time.time() - t0, 30.0)


def test_criterion_06_fv_reduction_on_powers():
    t0 = time.time()
    rng = random.Random(20)
    seqs = atomic_sequences()
    ps = PowerStructure(MsoFin(2), [Fraction(0), Fraction(1, 2)])
    elements = list(ps.elements())
    assert len(elements) == 16

    def rand_formula(names, depth):
        if depth == 0:
            kind = rng.choice(["subset", "=", "ltE"])
            return RAtom(seqs[kind], (rng.choice(names), rng.choice(names)))
        c = rng.random()
        if c < 0.25:
            return Not(rand_formula(names, depth - 1))
        if c < 0.5:
            return And(rand_formula(names, depth - 1),
                       rand_formula(names, depth - 1))
        if c < 0.7:
            return Or(rand_formula(names, depth - 1),
                      rand_formula(names, depth - 1))
        q = rng.choice([Exists, Forall])
        return q("V", rand_formula(names + ["V"], depth - 1))

    failures = cases = 0
    for _ in range(30):
        phi = rand_formula(["U"], rng.randint(1, 2))
        seq = fv_reduce(phi, context=("U",))
        for fu in elements:
            cases += 1
            direct = ps.eval(phi, {"U": fu})
            via = ps.r_atom(seq, [fu])
            failures += direct != via
    report(6, "first-order variable reduction", failures, cases,
           time.time() - t0, 30.0)


PARAM_CORPUS = [
    "(subset A B)",
    "(= A B)",
    "(ltE A B)",
    "(not (ltE A A))",
    "(exists X (and (subset X A) (not (= X bot))))",
    "(exists X (and (subset A X) (subset X B)))",
    "(forall X (implies (subset X A) (subset X B)))",
    "(forall X (implies (subset X A) (= X bot)))",
    "(exists X (and (subset X A) (ltE X B)))",
    "(exists X (ltE A X))",
    "(forall X (implies (ltE X A) (not (= X bot))))",
    "(and (subset A B) (not (= A B)))",
    "(or (= A bot) (exists X (and (subset X A) (not (= X A)))))",
    "(implies (ltE A B) (not (= B bot)))",
    "(exists X (forall Y (implies (subset Y X) (subset Y A))))",
    "(forall X (exists Y (and (subset Y X) (subset Y A))))",
    "(exists X (and (not (= X bot)) (and (subset X A) (subset X B))))",
    "(forall X (implies (and (subset X A) (subset X B)) (= X bot)))",
    "(not (exists X (and (ltE A X) (subset X B))))",
    "(exists X (exists Y (and (subset X A) (and (subset Y X) (subset Y B)))))",
]


def test_criterion_07_parameter_pipeline():
    t0 = time.time()
    tuples1 = [(a,) for a in subsets_of(POOL3)]
    tuples2 = [(a, b) for a in subsets_of(POOL3) for b in subsets_of(POOL3)]
    failures = cases = 0
    unstable = 0
    total_formulas = 0
    for text in PARAM_CORPUS:
        phi = parse(text, MO)
        params = tuple(sorted(free_vars(phi)))
        out = translate_with_parameters(phi, params)
        total_formulas += 1
        if not out.stabilized:
            unstable += 1
            continue
        pool = tuples1 if len(params) == 1 else tuples2
        for values in pool:
            asg = dict(zip(params, values))
            hull = funky(list(asg.values()))
            direct = stabilize("w", phi, asg)
            if not direct.stabilized:
                unstable += 1
                continue
            cases += 1
            er = restrict(W, hull)
            index_asg = {n: er.to_msofin(v) for n, v in asg.items()}
            got = bruteforce_eval(er.msofin(), out.psi, index_asg)
            failures += got != direct.verdict
    assert unstable <= 0.1 * max(total_formulas, 1), \
        f"{unstable} oracle stabilization failures"
    report(7, "parameter translation pipeline", failures, cases,
           time.time() - t0, 300.0)


def test_criterion_08_positive_existential_rewriting():
    t0 = time.time()
    rng = random.Random(1)
    subs = subsets_of(POOL4)
    ops2 = ["union", "inter", "setminus", "delta", "msinv"]

    def rterm(depth, names):
        choice = rng.random()
        if depth == 0 or choice < 0.4:
            return rng.choice([Var(v) for v in names]
                              + [Const("bot"), Const("zero")])
        if choice < 0.55:
            return App(rng.choice(["min", "max"]), (rterm(depth - 1, names),))
        return App(rng.choice(ops2),
                   (rterm(depth - 1, names), rterm(depth - 1, names)))

    def rformula(depth, names):
        c = rng.random()
        if depth == 0 or c < 0.35:
            atom = Eq(rterm(2, names), rterm(2, names))
            return Not(atom) if rng.random() < 0.5 else atom
        return rng.choice([And, Or])(rformula(depth - 1, names),
                                     rformula(depth - 1, names))

    failures = cases = 0
    for _ in range(100):
        names = ["X", "Y"][:rng.choice([1, 2])]
        f = rformula(2, names)
        g = qf_positive_rewrite(f)
        syntactic = is_positive_wso(g)
        for vals in itertools.product(subs, repeat=len(names)):
            cases += 1
            asg = dict(zip(names, vals))
            rep = stabilize("w", g, asg, kmax=3)
            ok = (syntactic and rep.stabilized
                  and rep.verdict == direct_qf(W, f, asg))
            if not ok:
                failures += 1
                break
    report(8, "positive existential rewriting", failures, cases,
           time.time() - t0, 60.0)


FINITE_TRUTHS = [
    "(exists X (= X bot))",
    "(forall X (subset X X))",
    "(forall X (subset bot X))",
    "(forall X (forall Y (implies (and (subset X Y) (subset Y X)) (= X Y))))",
    "(forall X (not (ltE X bot)))",
    "(forall X (forall Y (implies (ltE X Y) (not (= Y bot)))))",
    "(forall X (exists Y (subset Y X)))",
    "(forall X (forall Y (exists Z (and (subset Z X) (subset Z Y)))))",
    "(forall X (forall Y (implies (subset X Y) (implies (ltE Y X) (ltE Y Y)))))",
    "(exists X (forall Y (subset X Y)))",
]


def test_criterion_09_relativisation_soundness():
    t0 = time.time()
    failures = cases = 0
    for text in FINITE_TRUTHS:
        phi = parse(text, MO)
        # premise: the sentence holds in every finite powerset structure
        for n in range(5):
            assert bruteforce_eval(MsoFin(n), phi, {}), text
        guarded = Forall("Wrel", relativize(phi, ("element", "Wrel")))
        cases += 1
        rep = grid_eval("w", guarded, {}, k=2)
        failures += not rep.verdict
    report(9, "relativisation soundness", failures, cases,
           time.time() - t0, 60.0)


def test_criterion_10_model_completeness_documented_limitation():
    t0 = time.time()
    readme = Path(__file__).resolve().parent.parent / "README.md"
    text = readme.read_text()
    documented = "Scope and limitations" in text
    report(10, "model completeness (documented limitation)",
           0 if documented else 1, 1, time.time() - t0, 5.0)
