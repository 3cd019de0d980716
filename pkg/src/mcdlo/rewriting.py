"""Formula translators between the four signatures.

Four families of rewriting live here:

* `defeq_translate` — the definitional equivalences between the relational
  order signature (subset / order-between-members) and the two functional
  signatures (finite-powerset and finite-subsets-of-I).
* `qf_positive_rewrite` — quantifier-free formulas over W(I) become positive
  existential formulas: negated equations are replaced by a nonemptiness
  witness inside the symmetric difference, and the difference operators are
  then eliminated through their lattice characterisations.
* `w_in_l_translate` / `l_in_w_translate` — the two-way interpretation
  between W(I) and the interval-union structure L(I), via the finite-set
  predicate l(X) = r(X) in one direction and endpoint codes in the other.
* `lci_existential_rewrite` — quantifier-free L(I) formulas become
  existential ones by routing each negated equation through endpoint codes
  and the positive rewriting of W(I).
"""

from __future__ import annotations

from dataclasses import dataclass

from .order import FinSet, IntervalUnion
from .syntax import (And, App, Const, Eq, Exists, Forall, Formula, FreshVars,
                     Implies, LtEAtom, Not, Or, SignatureError, Signature,
                     SubsetAtom, Term, Var, all_vars, and_all, contains_node,
                     or_all, subst_term, substitute, unnest)
from .models import EvalError


# ---------------------------------------------------------------------------
# Term/formula shorthands

BOT = Const("bot")
ZERO = Const("zero")


def _union(*ts: Term) -> Term:
    out = ts[0]
    for t in ts[1:]:
        out = App("union", (out, t))
    return out


def _inter(a: Term, b: Term) -> Term:
    return App("inter", (a, b))


def _minus(a: Term, b: Term) -> Term:
    return App("setminus", (a, b))


def _min(a: Term) -> Term:
    return App("min", (a,))


def _max(a: Term) -> Term:
    return App("max", (a,))


def _msinv(a: Term, b: Term) -> Term:
    return App("msinv", (a, b))


def _subset_eq(a: Term, b: Term) -> Formula:
    """a is contained in b, expressed in the functional signatures."""
    return Eq(_inter(a, b), a)


def _nonempty(t: Term) -> Formula:
    return Not(Eq(t, BOT))


# ---------------------------------------------------------------------------
# Nonemptiness, positively

def notbot_formula(t: Term) -> Formula:
    """Positive formula equivalent over W(I) to t != bot: either t is the
    zero singleton or zero lies in the successor-preimage of t within
    t-with-zero (so t has a member above zero)."""
    return Or(Eq(t, ZERO),
              Eq(_inter(ZERO, _msinv(_union(t, ZERO), t)), ZERO))


# ---------------------------------------------------------------------------
# Negation normal form (quantifier-aware, used by several rewriters)

def nnf(f: Formula) -> Formula:
    """Push negations down to atoms and expand implications."""
    def pos(g: Formula) -> Formula:
        if isinstance(g, (Eq, SubsetAtom, LtEAtom)):
            return g
        if isinstance(g, Not):
            return neg(g.body)
        if isinstance(g, And):
            return And(pos(g.left), pos(g.right))
        if isinstance(g, Or):
            return Or(pos(g.left), pos(g.right))
        if isinstance(g, Implies):
            return Or(neg(g.left), pos(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, pos(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, pos(g.body))
        raise EvalError(f"cannot normalise {g!r}")

    def neg(g: Formula) -> Formula:
        if isinstance(g, (Eq, SubsetAtom, LtEAtom)):
            return Not(g)
        if isinstance(g, Not):
            return pos(g.body)
        if isinstance(g, And):
            return Or(neg(g.left), neg(g.right))
        if isinstance(g, Or):
            return And(neg(g.left), neg(g.right))
        if isinstance(g, Implies):
            return And(pos(g.left), neg(g.right))
        if isinstance(g, Exists):
            return Forall(g.var, neg(g.body))
        if isinstance(g, Forall):
            return Exists(g.var, neg(g.body))
        raise EvalError(f"cannot normalise {g!r}")

    return pos(f)


# ---------------------------------------------------------------------------
# Positive existential rewriting over W(I)

def _term_contains_op(t: Term, op: str) -> bool:
    if isinstance(t, App):
        return t.op == op or any(_term_contains_op(a, op) for a in t.args)
    return False


def _find_innermost(t: Term, op: str):
    """Leftmost App with the given op none of whose arguments contains it."""
    if isinstance(t, App):
        for a in t.args:
            found = _find_innermost(a, op)
            if found is not None:
                return found
        if t.op == op:
            return t
    return None


def _rewrite_terms(f: Formula, rewriter) -> Formula:
    def go_term(t: Term) -> Term:
        if isinstance(t, App):
            return rewriter(App(t.op, tuple(go_term(a) for a in t.args)))
        return t

    def go(g: Formula) -> Formula:
        if isinstance(g, (Eq, SubsetAtom, LtEAtom)):
            return type(g)(go_term(g.left), go_term(g.right))
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        raise EvalError(f"cannot rewrite {g!r}")

    return go(f)


def _expand_delta(f: Formula) -> Formula:
    def rw(t: App) -> Term:
        if t.op == "delta":
            a, b = t.args
            return _union(_minus(a, b), _minus(b, a))
        return t
    return _rewrite_terms(f, rw)


def _setminus_witness(a: Term, b: Term, c: Term) -> Formula:
    """c = a minus b, characterised without difference: c fills a up from
    a n b and avoids b.  Valid in any lattice of sets."""
    return And(Eq(_union(_inter(a, b), c), a), Eq(_inter(b, c), BOT))


def _eliminate_setminus(f: Formula, fresh: FreshVars) -> Formula:
    """Replace each difference subterm, innermost first, by an existential
    witness.  The witness quantifier is hoisted outside a negated atom (the
    witness is functionally determined, so polarity does not matter)."""
    def literal(g: Formula) -> Formula:
        atom = g.body if isinstance(g, Not) else g
        target = (_find_innermost(atom.left, "setminus")
                  or _find_innermost(atom.right, "setminus"))
        if target is None:
            return g
        a, b = target.args
        c = fresh.fresh("C")
        rewritten = type(atom)(_replace_in_term(atom.left, target, Var(c)),
                               _replace_in_term(atom.right, target, Var(c)))
        if isinstance(g, Not):
            rewritten = Not(rewritten)
        return Exists(c, And(_setminus_witness(a, b, Var(c)),
                             literal(rewritten)))

    def go(g: Formula) -> Formula:
        if isinstance(g, (Eq, SubsetAtom, LtEAtom)):
            return literal(g)
        if isinstance(g, Not) and isinstance(g.body, (Eq, SubsetAtom, LtEAtom)):
            return literal(g)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        raise EvalError(f"cannot rewrite {g!r}")

    return go(f)


def _replace_in_term(t: Term, target: Term, replacement: Term) -> Term:
    if t == target:
        return replacement
    if isinstance(t, App):
        return App(t.op, tuple(_replace_in_term(a, target, replacement)
                               for a in t.args))
    return t


def qf_positive_rewrite(f: Formula) -> Formula:
    """Positive existential equivalent over W(I) of a quantifier-free formula
    (difference and symmetric-difference extensions allowed in the input).

    A negated equation becomes the existence of a nonempty subset of the
    symmetric difference of its sides; the differences are then unfolded into
    their existential lattice witnesses, outermost so that each quantifier
    carries its defining constraints as top-level conjuncts."""
    fresh = FreshVars(all_vars(f))
    g = _eliminate_setminus(_expand_delta(nnf(f)), fresh)

    def drop_negations(h: Formula) -> Formula:
        if isinstance(h, Eq):
            return h
        if isinstance(h, Not):
            if not isinstance(h.body, Eq):
                raise EvalError(f"unexpected negated atom {h.body!r} over W(I)")
            q1, q2 = h.body.left, h.body.right
            c1, c2, y = fresh.fresh("C"), fresh.fresh("C"), fresh.fresh("Y")
            inhabit = And(notbot_formula(Var(y)),
                          Eq(_inter(Var(y), _union(Var(c1), Var(c2))), Var(y)))
            return Exists(c1, And(_setminus_witness(q1, q2, Var(c1)),
                                  Exists(c2, And(_setminus_witness(q2, q1, Var(c2)),
                                                 Exists(y, inhabit)))))
        if isinstance(h, (And, Or)):
            return type(h)(drop_negations(h.left), drop_negations(h.right))
        if isinstance(h, Exists):
            return Exists(h.var, drop_negations(h.body))
        raise EvalError(f"not quantifier-free over W(I): {h!r}")

    return drop_negations(g)


def is_positive_wso(f: Formula) -> bool:
    """Syntactic check: no negation, implication, universal, difference or
    symmetric difference anywhere."""
    if contains_node(f, (Not, Implies, Forall)):
        return False
    ops = set()

    def collect(t: Term):
        if isinstance(t, App):
            ops.add(t.op)
            for a in t.args:
                collect(a)

    def walk(g: Formula):
        if isinstance(g, (Eq, SubsetAtom, LtEAtom)):
            collect(g.left)
            collect(g.right)
        elif isinstance(g, (And, Or)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Exists):
            walk(g.body)

    walk(f)
    return not ops & {"setminus", "delta"}


# ---------------------------------------------------------------------------
# Definitional equivalences

def _tag(sig) -> str:
    if isinstance(sig, Signature):
        return sig.tag
    return str(sig)


def _at(t: Term, fresh: FreshVars) -> Formula:
    """t is an atom: nonempty with no proper nonempty part."""
    w = fresh.fresh("W")
    return And(_nonempty(t),
               Forall(w, Implies(SubsetAtom(Var(w), t),
                                 Or(Eq(Var(w), BOT), Eq(Var(w), t)))))


def _no_atoms(fresh: FreshVars) -> Formula:
    w = fresh.fresh("W")
    return Not(Exists(w, _at(Var(w), fresh)))


def _is_zero_mo(t: Term, fresh: FreshVars) -> Formula:
    """t is the least atom (or bot in the degenerate empty order)."""
    w = fresh.fresh("W")
    least = And(_at(t, fresh),
                Forall(w, Implies(_at(Var(w), fresh),
                                  Not(LtEAtom(Var(w), t)))))
    return Or(least, And(_no_atoms(fresh), Eq(t, BOT)))


def _is_zerostar_mo(t: Term, fresh: FreshVars) -> Formula:
    """t is the greatest atom (or bot in the degenerate empty order)."""
    w = fresh.fresh("W")
    greatest = And(_at(t, fresh),
                   Forall(w, Implies(_at(Var(w), fresh),
                                     Not(LtEAtom(t, Var(w))))))
    return Or(greatest, And(_no_atoms(fresh), Eq(t, BOT)))


def _succ_global(z: Term, zp: Term, fresh: FreshVars) -> Formula:
    """Atom zp is the immediate successor of atom z in the whole order."""
    w = fresh.fresh("W")
    return And(LtEAtom(z, zp),
               Not(Exists(w, and_all([_at(Var(w), fresh),
                                      LtEAtom(z, Var(w)),
                                      LtEAtom(Var(w), zp)]))))


def _succ_within(a: Term, z: Term, zp: Term, fresh: FreshVars) -> Formula:
    """Atom zp is the immediate successor of atom z inside a."""
    w = fresh.fresh("W")
    return And(LtEAtom(z, zp),
               Not(Exists(w, and_all([_at(Var(w), fresh),
                                      SubsetAtom(Var(w), a),
                                      LtEAtom(z, Var(w)),
                                      LtEAtom(Var(w), zp)]))))


def _union_mo(u1: Term, u2: Term, v: Term, fresh: FreshVars) -> Formula:
    w = fresh.fresh("W")
    return and_all([SubsetAtom(u1, v), SubsetAtom(u2, v),
                    Forall(w, Implies(And(SubsetAtom(u1, Var(w)),
                                          SubsetAtom(u2, Var(w))),
                                      SubsetAtom(v, Var(w))))])


def _inter_mo(u1: Term, u2: Term, v: Term, fresh: FreshVars) -> Formula:
    w = fresh.fresh("W")
    return and_all([SubsetAtom(v, u1), SubsetAtom(v, u2),
                    Forall(w, Implies(And(SubsetAtom(Var(w), u1),
                                          SubsetAtom(Var(w), u2)),
                                      SubsetAtom(Var(w), v)))])


def _min_mo(u: Term, v: Term, fresh: FreshVars) -> Formula:
    w = fresh.fresh("W")
    proper = and_all([_at(v, fresh), SubsetAtom(v, u),
                      Forall(w, Implies(And(_at(Var(w), fresh),
                                            SubsetAtom(Var(w), u)),
                                        Not(LtEAtom(Var(w), v))))])
    return Or(And(Eq(u, BOT), Eq(v, BOT)), proper)


def _max_mo(u: Term, v: Term, fresh: FreshVars) -> Formula:
    w = fresh.fresh("W")
    proper = and_all([_at(v, fresh), SubsetAtom(v, u),
                      Forall(w, Implies(And(_at(Var(w), fresh),
                                            SubsetAtom(Var(w), u)),
                                        Not(LtEAtom(v, Var(w)))))])
    return Or(And(Eq(u, BOT), Eq(v, BOT)), proper)


def _sinv_mo(u: Term, v: Term, fresh: FreshVars) -> Formula:
    """v = preimage of u under the global successor, atom by atom."""
    z = fresh.fresh("Z")
    zp = fresh.fresh("Z")
    member = Exists(zp, and_all([_at(Var(zp), fresh),
                                 SubsetAtom(Var(zp), u),
                                 _succ_global(Var(z), Var(zp), fresh)]))
    return Forall(z, Implies(_at(Var(z), fresh),
                             And(Implies(SubsetAtom(Var(z), v), member),
                                 Implies(member, SubsetAtom(Var(z), v)))))


def _msinv_mo(u1: Term, u2: Term, v: Term, fresh: FreshVars) -> Formula:
    """v = members of u1 whose successor within u1 lies in u2, atom by atom."""
    z = fresh.fresh("Z")
    zp = fresh.fresh("Z")
    member = And(SubsetAtom(Var(z), u1),
                 Exists(zp, and_all([_at(Var(zp), fresh),
                                     SubsetAtom(Var(zp), u1),
                                     SubsetAtom(Var(zp), u2),
                                     _succ_within(u1, Var(z), Var(zp), fresh)])))
    return Forall(z, Implies(_at(Var(z), fresh),
                             And(Implies(SubsetAtom(Var(z), v), member),
                                 Implies(member, SubsetAtom(Var(z), v)))))


def _init_msofin(a: Term) -> Formula:
    """a is an initial segment: empty, or contains zero and is closed under
    the successor preimage."""
    return Or(Eq(a, BOT),
              And(_subset_eq(ZERO, a),
                  _subset_eq(App("sinv", (a,)), a)))


def _compl_msofin(a: Term, b: Term, fresh: FreshVars) -> Formula:
    """b is the complement of a: disjoint, and jointly absorbing."""
    c = fresh.fresh("C")
    return And(Eq(_inter(a, b), BOT),
               Forall(c, Eq(_inter(Var(c), _union(a, b)), Var(c))))


def _lte_to_msofin(x: Term, y: Term, fresh: FreshVars) -> Formula:
    """Some member of x below some member of y: an initial segment meets x
    while its complement meets y."""
    a = fresh.fresh("A")
    b = fresh.fresh("B")
    return Exists(a, and_all([
        _init_msofin(Var(a)),
        _nonempty(_inter(x, Var(a))),
        Exists(b, And(_compl_msofin(Var(a), Var(b), fresh),
                      _nonempty(_inter(y, Var(b)))))]))


def _lte_to_wso(x: Term, y: Term) -> Formula:
    """min(x) < max(y), expressed with the min/max operations."""
    return and_all([_nonempty(x), _nonempty(y),
                    Not(Eq(_min(x), _max(y))),
                    Eq(_min(_union(_min(x), _max(y))), _min(x))])


def _mo_to_functional(f: Formula, dst: str, fresh: FreshVars) -> Formula:
    def go(g: Formula) -> Formula:
        if isinstance(g, Eq):
            return g
        if isinstance(g, SubsetAtom):
            return _subset_eq(g.left, g.right)
        if isinstance(g, LtEAtom):
            if dst == "wso":
                return _lte_to_wso(g.left, g.right)
            return _lte_to_msofin(g.left, g.right, fresh)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        raise EvalError(f"not a relational-signature formula: {g!r}")

    return go(f)


def _functional_atom_to_mo(g: Eq, src: str, fresh: FreshVars) -> Formula:
    if not isinstance(g, Eq):
        raise EvalError(f"functional signatures have equational atoms, got {g!r}")
    app, other = None, None
    if isinstance(g.left, App):
        app, other = g.left, g.right
    elif isinstance(g.right, App):
        app, other = g.right, g.left

    hoists: list[tuple[str, Formula]] = []

    def leaf(t: Term) -> Term:
        if isinstance(t, Var) or (isinstance(t, Const) and t.name == "bot"):
            return t
        if isinstance(t, Const) and t.name in ("zero", "zerostar"):
            u = fresh.fresh("U")
            definition = (_is_zero_mo(Var(u), fresh) if t.name == "zero"
                          else _is_zerostar_mo(Var(u), fresh))
            hoists.append((u, definition))
            return Var(u)
        raise EvalError(f"atom not unnested: {t!r}")

    if app is None:
        core: Formula = Eq(leaf(g.left), leaf(g.right))
    else:
        args = [leaf(a) for a in app.args]
        v = leaf(other)
        if app.op == "union":
            core = _union_mo(args[0], args[1], v, fresh)
        elif app.op == "inter":
            core = _inter_mo(args[0], args[1], v, fresh)
        elif app.op == "min":
            core = _min_mo(args[0], v, fresh)
        elif app.op == "max":
            core = _max_mo(args[0], v, fresh)
        elif app.op == "sinv" and src == "msofin":
            core = _sinv_mo(args[0], v, fresh)
        elif app.op == "msinv" and src == "wso":
            core = _msinv_mo(args[0], args[1], v, fresh)
        else:
            raise EvalError(f"function {app.op!r} not part of {src}")
    for u, definition in reversed(hoists):
        core = Exists(u, And(definition, core))
    return core


def _functional_to_mo(f: Formula, src: str, fresh: FreshVars) -> Formula:
    f = unnest(f, fresh)

    def go(g: Formula) -> Formula:
        if isinstance(g, Eq):
            return _functional_atom_to_mo(g, src, fresh)
        if isinstance(g, (SubsetAtom, LtEAtom)):
            raise EvalError(f"relational atom {g!r} not part of {src}")
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        raise EvalError(f"not a formula over {src}: {g!r}")

    return go(f)


def defeq_translate(f: Formula, src, dst) -> Formula:
    """Truth-preserving translation along one of the definitional
    equivalences: relational <-> finite-powerset, relational <-> W(I)."""
    src, dst = _tag(src), _tag(dst)
    fresh = FreshVars(all_vars(f))
    if src == "mo" and dst in ("msofin", "wso"):
        return _mo_to_functional(f, dst, fresh)
    if src in ("msofin", "wso") and dst == "mo":
        return _functional_to_mo(f, src, fresh)
    raise SignatureError(f"no definitional translation {src} -> {dst}")


# ---------------------------------------------------------------------------
# W(I) inside L(I)

def finite_set_formula(t: Term) -> Formula:
    """The finite elements of L(I): left and right endpoints coincide."""
    return Eq(App("l", (t,)), App("r", (t,)))


def _sinv_witness_lci(a: Term, b: Term, c: Term, fresh: FreshVars) -> Formula:
    """Existential interval-union characterisation of the successor-preimage
    equation sinv(a, b) = c for finite a, b, c."""
    bp = fresh.fresh("B")
    d = fresh.fresh("D")
    e = fresh.fresh("E")
    bpv, dv, ev = Var(bp), Var(d), Var(e)
    degenerate = And(Or(Eq(a, BOT), Eq(bpv, BOT)), Eq(c, BOT))
    # D must be unbounded: a bounded witness could end at max(a) and admit
    # it as a spurious right endpoint even though it has no successor
    shared = [Eq(App("r", (dv,)), c),
              _subset_eq(c, a),
              _subset_eq(a, dv),
              Eq(_max(dv), BOT)]
    # e = bp minus its minimum, as the unique disjoint complement
    e_def = And(Eq(_union(ev, _min(bpv)), bpv), Eq(_inter(ev, _min(bpv)), BOT))
    case_min_in = And(
        Eq(_inter(_min(a), bpv), _min(a)),
        Exists(e, And(e_def,
                      Exists(d, and_all([Eq(App("l", (dv,)),
                                            _union(ev, ZERO))] + shared)))))
    case_min_out = And(Not(Eq(_inter(_min(a), bpv), _min(a))),
                       Exists(d, and_all([Eq(App("l", (dv,)),
                                             _union(bpv, ZERO))] + shared)))
    proper = and_all([Not(Eq(a, BOT)), Not(Eq(bpv, BOT)),
                      Or(case_min_in, case_min_out)])
    return Exists(bp, And(Eq(bpv, _inter(a, b)), Or(degenerate, proper)))


def w_in_l_translate(f: Formula) -> Formula:
    """Interpret a W(I) formula in L(I): quantifiers relativise to the
    finite sets, shared operations pass through, and the successor-preimage
    compiles to its existential interval-union characterisation."""
    fresh = FreshVars(all_vars(f))
    f = unnest(f, fresh)

    def atom(g: Eq) -> Formula:
        if not isinstance(g, Eq):
            raise EvalError(f"W(I) formulas have equational atoms, got {g!r}")
        for side, other in ((g.left, g.right), (g.right, g.left)):
            if isinstance(side, App) and side.op == "msinv":
                a, b = side.args
                return _sinv_witness_lci(a, b, other, fresh)
            if isinstance(side, App) and side.op in ("setminus", "delta"):
                raise EvalError(
                    "positivise first: difference operators have no L(I) image")
        return g

    def go(g: Formula) -> Formula:
        if isinstance(g, Eq):
            return atom(g)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, And(finite_set_formula(Var(g.var)), go(g.body)))
        if isinstance(g, Forall):
            return Forall(g.var, Implies(finite_set_formula(Var(g.var)),
                                         go(g.body)))
        raise EvalError(f"not a W(I) formula: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# Endpoint codes

@dataclass(frozen=True)
class CodePair:
    """Left/right endpoint sets identifying an interval union injectively."""

    left: FinSet
    right: FinSet

    def __post_init__(self):
        if self.left.is_empty() and self.right.is_empty():
            return
        if not code_domain(self.left, self.right):
            raise ValueError(
                f"({self.left}, {self.right}) codes no interval union")

    @classmethod
    def of(cls, u: IntervalUnion) -> "CodePair":
        return cls(u.left_endpoints(), u.right_endpoints())

    def to_interval_union(self) -> IntervalUnion:
        return code_to_interval_union(self.left, self.right)

    def to_json(self) -> dict:
        return {"l": self.left.to_json(), "r": self.right.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "CodePair":
        return cls(FinSet.from_json(data["l"]), FinSet.from_json(data["r"]))


def code_domain(b: FinSet, c: FinSet) -> bool:
    """True when some nonempty interval union has left endpoints b and right
    endpoints c: endpoints alternate correctly, possibly with a trailing
    unbounded interval."""
    if b.is_empty():
        return False
    both = b.union(c)
    if not both.min_set().issubset(b):
        return False
    b_only = b.minus(c)
    c_only = c.minus(b)
    paired = both.sinv(c_only)
    bounded = both.max_set().issubset(c) and paired == b_only
    unbounded = (both.max_set().issubset(b_only)
                 and paired.union(both.max_set()) == b_only)
    return bounded or unbounded


def code_to_interval_union(b: FinSet, c: FinSet) -> IntervalUnion:
    """Rebuild the interval union from its endpoint code."""
    if b.is_empty() and c.is_empty():
        return IntervalUnion()
    if not code_domain(b, c):
        raise ValueError(f"({b}, {c}) codes no interval union")
    lefts = list(b.points)
    rights: list = list(c.points)
    if len(rights) == len(lefts) - 1:
        rights.append(None)  # trailing unbounded interval
    intervals = tuple(zip(lefts, rights))
    u = IntervalUnion(intervals)
    assert u.left_endpoints() == b and u.right_endpoints() == c
    return u


# ---------------------------------------------------------------------------
# L(I) inside W(I), on endpoint codes

def _boundary(xl: Term, xr: Term) -> Term:
    return _union(xl, xr)


def phi_mem(xl: Term, xr: Term, z: Term, fresh: FreshVars) -> Formula:
    """Membership of the singleton z in the interval union coded by
    (xl, xr), expressed over W(I) with the difference extension."""
    bdr = _boundary(xl, xr)
    bz = _union(bdr, z)
    between = And(_subset_eq(_msinv(bz, z), App("setminus", (xl, xr))),
                  _nonempty(_inter(_msinv(bz, App("setminus", (xr, xl))), z)))
    unbounded = _subset_eq(_max(bdr), App("setminus", (xl, xr)))
    tail = And(unbounded, Eq(z, _max(bz)))
    return And(_nonempty(bdr),
               or_all([_subset_eq(z, bdr), between, tail]))


def at_formula(t: Term, fresh: FreshVars) -> Formula:
    """t is a singleton: nonempty and equal to its own minimum."""
    return And(_nonempty(t), Eq(t, _min(t)))


def phi_subset(xl: Term, xr: Term, yl: Term, yr: Term,
               fresh: FreshVars) -> Formula:
    """Inclusion of coded interval unions: every singleton member of the
    first is a member of the second."""
    z = fresh.fresh("Z")
    return Forall(z, Implies(at_formula(Var(z), fresh),
                             Implies(phi_mem(xl, xr, Var(z), fresh),
                                     phi_mem(yl, yr, Var(z), fresh))))


def code_domain_formula(b: Term, c: Term, fresh: FreshVars) -> Formula:
    """The endpoint-code realizability condition as a W(I) formula."""
    both = _union(b, c)
    b_only = App("setminus", (b, c))
    c_only = App("setminus", (c, b))
    paired = _msinv(both, c_only)
    bounded = And(_subset_eq(_max(both), c), Eq(paired, b_only))
    unbounded = And(_subset_eq(_max(both), b_only),
                    Eq(_union(paired, _max(both)), b_only))
    return and_all([_nonempty(b), _subset_eq(_min(both), b),
                    Or(bounded, unbounded)])


def code_ok_formula(b: Term, c: Term, fresh: FreshVars) -> Formula:
    """(b, c) is the code of some interval union, the empty one included."""
    return Or(And(Eq(b, BOT), Eq(c, BOT)), code_domain_formula(b, c, fresh))


def bdd_formula(xl: Term, xr: Term, fresh: FreshVars) -> Formula:
    """The coded interval union is bounded: empty, or its largest endpoint is
    a proper right endpoint."""
    bdr = _boundary(xl, xr)
    return Or(Eq(xl, BOT),
              Not(_subset_eq(_max(bdr), App("setminus", (xl, xr)))))


def _max_code_formula(xl: Term, xr: Term, zl: Term, zr: Term,
                      fresh: FreshVars) -> Formula:
    """Graph of max on codes: bot for empty or unbounded input, else the
    singleton on the largest endpoint."""
    bdr = _boundary(xl, xr)
    unbounded_or_empty = Or(Eq(xl, BOT),
                            _subset_eq(_max(bdr), App("setminus", (xl, xr))))
    m = _max(bdr)
    return Or(And(unbounded_or_empty, And(Eq(zl, BOT), Eq(zr, BOT))),
              And(Not(unbounded_or_empty), And(Eq(zl, m), Eq(zr, m))))


def _pair_names(name: str) -> tuple[str, str]:
    return f"{name}_l", f"{name}_r"


def _code_terms(t: Term) -> tuple[Term, Term]:
    if isinstance(t, Var):
        l, r = _pair_names(t.name)
        return Var(l), Var(r)
    if isinstance(t, Const) and t.name == "bot":
        return BOT, BOT
    if isinstance(t, Const) and t.name == "zero":
        return ZERO, ZERO
    raise EvalError(f"atom not unnested: {t!r}")


def l_in_w_translate(f: Formula) -> Formula:
    """Interpret an L(I) formula in W(I): each variable X becomes the pair of
    endpoint sets (X_l, X_r), quantifiers are guarded by code realizability,
    and operations become code-level graph formulas."""
    fresh = FreshVars(set().union(*[set(_pair_names(v)) for v in all_vars(f)]
                                  or [set()]) | all_vars(f))
    f = unnest(f, fresh)

    def lattice_atom(op: str, x: Term, y: Term, z: Term) -> Formula:
        """z = x op y by membership extensionality over singleton probes."""
        xl, xr = _code_terms(x)
        yl, yr = _code_terms(y)
        zl, zr = _code_terms(z)
        w = fresh.fresh("Z")
        in_x = phi_mem(xl, xr, Var(w), fresh)
        in_y = phi_mem(yl, yr, Var(w), fresh)
        in_z = phi_mem(zl, zr, Var(w), fresh)
        combo = Or(in_x, in_y) if op == "union" else And(in_x, in_y)
        return Forall(w, Implies(at_formula(Var(w), fresh),
                                 And(Implies(in_z, combo),
                                     Implies(combo, in_z))))

    def atom(g: Eq) -> Formula:
        if not isinstance(g, Eq):
            raise EvalError(f"L(I) formulas have equational atoms, got {g!r}")
        app, other = None, None
        if isinstance(g.left, App):
            app, other = g.left, g.right
        elif isinstance(g.right, App):
            app, other = g.right, g.left
        if app is None:
            xl, xr = _code_terms(g.left)
            yl, yr = _code_terms(g.right)
            return And(Eq(xl, yl), Eq(xr, yr))
        zl, zr = _code_terms(other)
        if app.op in ("union", "inter"):
            return lattice_atom(app.op, app.args[0], app.args[1], other)
        xl, xr = _code_terms(app.args[0])
        if app.op == "l":
            return And(Eq(zl, xl), Eq(zr, xl))
        if app.op == "r":
            return And(Eq(zl, xr), Eq(zr, xr))
        if app.op == "min":
            empty = And(Eq(xl, BOT), And(Eq(zl, BOT), Eq(zr, BOT)))
            proper = And(Not(Eq(xl, BOT)),
                         And(Eq(zl, _min(xl)), Eq(zr, _min(xl))))
            return Or(empty, proper)
        if app.op == "max":
            return _max_code_formula(xl, xr, zl, zr, fresh)
        raise EvalError(f"function {app.op!r} not part of L(I)")

    def go(g: Formula) -> Formula:
        if isinstance(g, Eq):
            return atom(g)
        if isinstance(g, SubsetAtom):
            xl, xr = _code_terms(g.left)
            yl, yr = _code_terms(g.right)
            return phi_subset(xl, xr, yl, yr, fresh)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            l, r = _pair_names(g.var)
            guard = code_ok_formula(Var(l), Var(r), fresh)
            if isinstance(g, Exists):
                return Exists(l, Exists(r, And(guard, go(g.body))))
            return Forall(l, Forall(r, Implies(guard, go(g.body))))
        raise EvalError(f"not an L(I) formula: {g!r}")

    return go(f)


# ---------------------------------------------------------------------------
# Existential rewriting for quantifier-free L(I) formulas

def _neq_template(fresh: FreshVars) -> Formula:
    """Existential L(I) formula in variables Uneq, Vneq expressing that two
    finite sets differ, via positive W(I) rewriting of the inequation."""
    base = Not(Eq(Var("Uneq"), Var("Vneq")))
    positive = qf_positive_rewrite(base)
    return w_in_l_translate(positive)


def lci_existential_rewrite(f: Formula) -> Formula:
    """Existential equivalent over L(I) of a quantifier-free formula: positive
    atoms pass through, and each negated equation becomes the statement that
    the endpoint codes differ, routed through the positive W(I) rewriting."""
    fresh = FreshVars(all_vars(f) | {"Uneq", "Vneq"})
    template = _neq_template(fresh)

    def differ(s: Term, t: Term) -> Formula:
        out = substitute(template, "Uneq", s)
        return substitute(out, "Vneq", t)

    def neq(q1: Term, q2: Term) -> Formula:
        # interval unions differ exactly when their endpoint codes differ
        return Or(differ(App("l", (q1,)), App("l", (q2,))),
                  differ(App("r", (q1,)), App("r", (q2,))))

    def go(g: Formula) -> Formula:
        if isinstance(g, Eq):
            return g
        if isinstance(g, Not):
            if not isinstance(g.body, Eq):
                raise EvalError(f"unexpected negated atom {g.body!r} over L(I)")
            return neq(g.body.left, g.body.right)
        if isinstance(g, (And, Or)):
            return type(g)(go(g.left), go(g.right))
        raise EvalError(f"not quantifier-free over L(I): {g!r}")

    return go(nnf(f))
