import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mcdlo.models import LciStructure, MsoFin, WsoStructure, eval_atomic
from mcdlo.order import FinSet, IntervalUnion, enumerate_interval_unions
from mcdlo.rewriting import (CodePair, code_domain, code_to_interval_union,
                             defeq_translate, l_in_w_translate,
                             lci_existential_rewrite, notbot_formula,
                             phi_mem, phi_subset, qf_positive_rewrite,
                             w_in_l_translate)
from mcdlo.semantics import bruteforce_eval, stabilize
from mcdlo.syntax import (And, App, Const, Eq, FreshVars, Implies, Not, Or,
                          SIGNATURES, Var, formula_ops, free_vars,
                          is_existential, is_positive_existential, parse,
                          print_formula)

from conftest import POOL3, POOL4, subsets_of

W = WsoStructure()
L = LciStructure()


def direct_qf(structure, f, asg):
    if isinstance(f, Not):
        return not direct_qf(structure, f.body, asg)
    if isinstance(f, And):
        return direct_qf(structure, f.left, asg) and direct_qf(structure, f.right, asg)
    if isinstance(f, Or):
        return direct_qf(structure, f.left, asg) or direct_qf(structure, f.right, asg)
    if isinstance(f, Implies):
        return (not direct_qf(structure, f.left, asg)) or direct_qf(structure, f.right, asg)
    return eval_atomic(structure, f, asg)


# -- nonempty characterisation ----------------------------------------------

def test_notbot_formula_semantics(subs4):
    f = notbot_formula(Var("A"))
    for a in subs4:
        assert direct_qf(W, f, {"A": a}) == (not a.is_empty())


# -- endpoint codes ----------------------------------------------------------

def test_code_domain_examples():
    q = Fraction(1, 4)
    assert code_domain(FinSet.of(0), FinSet.of(0))       # singleton {0}
    assert code_domain(FinSet.of(q), FinSet())           # [1/4, END)
    assert not code_domain(FinSet.of(Fraction(1, 2)), FinSet.of(q))


def test_code_to_interval_union_examples():
    q = Fraction(1, 4)
    assert code_to_interval_union(FinSet.of(q), FinSet()) == \
        IntervalUnion(((q, None),))
    with pytest.raises(ValueError):
        code_to_interval_union(FinSet.of(Fraction(1, 2)), FinSet.of(q))


points = st.fractions(min_value=0, max_value=Fraction(15, 16),
                      max_denominator=16)
interval_unions = st.lists(
    st.tuples(points, st.one_of(st.none(), points))
    .filter(lambda iv: iv[1] is None or iv[0] <= iv[1]),
    max_size=3).map(IntervalUnion.normalize)


@given(interval_unions)
def test_code_pair_roundtrip(u):
    pair = CodePair.of(u)
    assert pair.to_interval_union() == u
    assert CodePair.from_json(pair.to_json()) == pair


def test_code_pair_rejects_unrealizable():
    with pytest.raises(ValueError):
        CodePair(FinSet.of(Fraction(1, 2)), FinSet.of(Fraction(1, 4)))


def test_code_pair_json_shape():
    pair = CodePair.of(IntervalUnion(((Fraction(0), Fraction(1, 4)),)))
    assert pair.to_json() == {"l": ["0/1"], "r": ["1/4"]}


# -- positive existential rewriting -----------------------------------------

def test_positive_rewrite_atom_passthrough():
    f = parse("(= X Y)", SIGNATURES["wso"])
    assert qf_positive_rewrite(f) == f


def test_positive_rewrite_negation_becomes_witness():
    f = parse("(not (= X bot))", SIGNATURES["wso"])
    out = qf_positive_rewrite(f)
    assert is_positive_existential(out)
    ops = formula_ops(out)
    assert not ops & {"setminus", "delta"}
    for x in subsets_of(POOL3):
        rep = stabilize("w", out, {"X": x}, kmax=3)
        assert rep.stabilized and rep.verdict == (not x.is_empty())


def test_positive_rewrite_handles_extensions():
    sig = SIGNATURES["wso"].with_extensions(setminus=True, delta=True)
    f = parse("(not (= (setminus X Y) (delta X Y)))", sig)
    out = qf_positive_rewrite(f)
    assert is_positive_existential(out)
    assert not formula_ops(out) & {"setminus", "delta"}
    for x in subsets_of(POOL3)[:6]:
        for y in subsets_of(POOL3)[:6]:
            asg = {"X": x, "Y": y}
            rep = stabilize("w", out, asg, kmax=3)
            assert rep.stabilized
            assert rep.verdict == (x.minus(y) != x.delta(y)), asg


# -- definitional equivalences -----------------------------------------------

def test_defeq_subset_is_lattice_inclusion():
    f = parse("(subset X Y)", SIGNATURES["mo"])
    out = defeq_translate(f, "mo", "wso")
    for x in subsets_of(POOL3):
        for y in subsets_of(POOL3):
            assert direct_qf(W, out, {"X": x, "Y": y}) == x.issubset(y)


def test_defeq_lte_to_msofin():
    f = parse("(ltE X Y)", SIGNATURES["mo"])
    out = defeq_translate(f, "mo", "msofin")
    m = MsoFin(3)
    for x in m.universe():
        for y in m.universe():
            assert bruteforce_eval(m, out, {"X": x, "Y": y}) == m.rel_ltE(x, y)


def test_defeq_rejects_unsupported_pair():
    f = parse("(= X Y)", SIGNATURES["wso"])
    from mcdlo.models import EvalError
    with pytest.raises((EvalError, ValueError)):
        defeq_translate(f, "wso", "lci")


# -- W(I) inside L(I) --------------------------------------------------------

def test_w_in_l_shared_atom_passes_through():
    f = parse("(= (union X Y) Z)", SIGNATURES["wso"])
    out = w_in_l_translate(f)
    assert "union" in formula_ops(out)
    assert "msinv" not in formula_ops(out)


def test_w_in_l_is_existential_on_positive_input():
    f = parse("(exists X (= (msinv A X) B))", SIGNATURES["wso"])
    out = w_in_l_translate(f)
    assert is_existential(out)
    assert "msinv" not in formula_ops(out)


def test_w_in_l_empty_first_argument_guard():
    f = parse("(= (msinv A B) C)", SIGNATURES["wso"])
    out = w_in_l_translate(f)
    bot = IntervalUnion()
    b = IntervalUnion.of_points([Fraction(1, 2)])
    assert stabilize("l", out, {"A": bot, "B": b, "C": bot}).verdict
    assert not stabilize("l", out,
                         {"A": bot, "B": b,
                          "C": IntervalUnion.of_points([0])}).verdict


def test_w_in_l_sinv_small_sample():
    f = parse("(= (msinv A B) C)", SIGNATURES["wso"])
    out = w_in_l_translate(f)
    pool = [Fraction(0), Fraction(1, 2)]
    sets = subsets_of(pool)
    for a in sets:
        for b in sets:
            for c in sets:
                asg = {"A": IntervalUnion.from_finset(a),
                       "B": IntervalUnion.from_finset(b),
                       "C": IntervalUnion.from_finset(c)}
                rep = stabilize("l", out, asg, kmax=3)
                assert rep.stabilized
                assert rep.verdict == (a.sinv(b) == c), (a, b, c)


# -- L(I) inside W(I) --------------------------------------------------------

CORPUS3 = enumerate_interval_unions(POOL3, include_end=True)


def pair_env(asg):
    env = {}
    for name, iu in asg.items():
        cp = CodePair.of(iu)
        env[f"{name}_l"] = cp.left
        env[f"{name}_r"] = cp.right
    return env


@pytest.mark.parametrize("src", ["(= (l A) B)", "(= (r A) B)",
                                 "(= (min A) B)", "(= (max A) B)",
                                 "(= A B)"])
def test_l_in_w_unary_graph_atoms(src):
    f = parse(src, SIGNATURES["lci"])
    out = l_in_w_translate(f)
    for a in CORPUS3:
        for b in CORPUS3:
            asg = {"A": a, "B": b}
            want = eval_atomic(L, f, asg)
            rep = stabilize("w", out, pair_env(asg), kmax=3)
            assert rep.stabilized and rep.verdict == want, asg


@pytest.mark.parametrize("op", ["union", "inter"])
def test_l_in_w_lattice_atoms_sampled(op):
    rng = random.Random(5)
    f = parse(f"(= ({op} A B) C)", SIGNATURES["lci"])
    out = l_in_w_translate(f)
    trials = [tuple(rng.choice(CORPUS3) for _ in range(3)) for _ in range(30)]
    trials += [(a, b, L.apply(op, a, b))
               for a, b in [(rng.choice(CORPUS3), rng.choice(CORPUS3))
                            for _ in range(15)]]
    for a, b, c in trials:
        asg = {"A": a, "B": b, "C": c}
        want = eval_atomic(L, f, asg)
        rep = stabilize("w", out, pair_env(asg), kmax=3)
        assert rep.stabilized and rep.verdict == want, asg


def test_membership_and_inclusion_formulas_spot():
    fresh = FreshVars({"Xl", "Xr", "Yl", "Yr"})
    mem = phi_mem(Var("Xl"), Var("Xr"), Var("Z"), fresh)
    u = IntervalUnion(((Fraction(0), Fraction(1, 3)), (Fraction(2, 3), None)))
    pair = CodePair.of(u)
    for z, want in [(Fraction(1, 6), True), (Fraction(1, 2), False),
                    (Fraction(5, 6), True)]:
        asg = {"Xl": pair.left, "Xr": pair.right, "Z": FinSet.of(z)}
        assert direct_qf(W, mem, asg) == want, z


# -- quantifier-free L(I) to existential L(I) --------------------------------

def test_lci_existential_rewrite_positive_passthrough():
    f = parse("(= X Y)", SIGNATURES["lci"])
    assert lci_existential_rewrite(f) == f


def test_lci_existential_rewrite_nonempty():
    f = parse("(not (= X bot))", SIGNATURES["lci"])
    out = lci_existential_rewrite(f)
    assert is_existential(out)
    pool = [Fraction(0), Fraction(1, 2)]
    for x in enumerate_interval_unions(pool, include_end=True):
        rep = stabilize("l", out, {"X": x}, kmax=3)
        assert rep.stabilized and rep.verdict == (not x.is_empty()), x


def test_lci_existential_rewrite_inequation_sampled():
    f = parse("(not (= X Y))", SIGNATURES["lci"])
    out = lci_existential_rewrite(f)
    assert is_existential(out)
    rng = random.Random(9)
    corpus = enumerate_interval_unions([Fraction(0), Fraction(1, 2)],
                                       include_end=True)
    pairs = [(rng.choice(corpus), rng.choice(corpus)) for _ in range(8)]
    pairs += [(u, u) for u in corpus[:4]]
    for x, y in pairs:
        rep = stabilize("l", out, {"X": x, "Y": y}, kmax=3)
        assert rep.stabilized and rep.verdict == (x != y), (x, y)


def test_lci_existential_rewrite_syntactic_on_random_input():
    rng = random.Random(13)

    def rand_term(d):
        if d == 0:
            return rng.choice([Var("X"), Var("Y"), Const("bot"), Const("zero")])
        if rng.random() < 0.5:
            return App(rng.choice(["union", "inter"]),
                       (rand_term(d - 1), rand_term(d - 1)))
        return App(rng.choice(["min", "max", "l", "r"]), (rand_term(d - 1),))

    def rand_formula(d):
        if d == 0:
            return Eq(rand_term(rng.randint(0, 2)), rand_term(rng.randint(0, 2)))
        c = rng.random()
        if c < 0.3:
            return Not(rand_formula(d - 1))
        if c < 0.65:
            return And(rand_formula(d - 1), rand_formula(d - 1))
        return Or(rand_formula(d - 1), rand_formula(d - 1))

    for _ in range(50):
        f = rand_formula(rng.randint(1, 3))
        assert is_existential(lci_existential_rewrite(f))
