"""Quantifier evaluation: exact brute force on finite powerset structures and
budgeted grid semantics on W(I) / L(I), plus relativisation transformers.

The grid semantics is a witness-search procedure: quantified set variables
range over subsets of a finite grid grown from the assignment's points (W),
or over canonical interval unions with endpoints in the grid, including
unbounded variants (L).  Verdicts carry a stabilization flag comparing
budgets k and k+1; stability is evidence, not proof, of the true verdict.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .order import FinSet, IntervalUnion, enumerate_interval_unions
from .syntax import (And, App, Const, Eq, Exists, ExistsPartition, Forall,
                     FreshVars, Formula, Implies, LtEAtom, Not, Or, SubsetAtom,
                     Term, Var, all_vars, free_vars)
from .models import EvalError, LciStructure, MsoFin, eval_atomic, eval_term

DEFAULT_GRID_CAP = 14
DEFAULT_MSOFIN_CAP = 16


def grid_cap() -> int:
    return int(os.environ.get("MCDLO_GRID_CAP", DEFAULT_GRID_CAP))


class GridCapError(EvalError):
    pass


@dataclass(frozen=True)
class EvalReport:
    verdict: bool
    budget_used: int
    stabilized: bool

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "budget_used": self.budget_used,
                "stabilized": self.stabilized}


# ---------------------------------------------------------------------------
# Quantifier pruning shared by the bitmask evaluators
#
# Witness variables introduced by the rewriting layer always come with
# lattice constraints among the top-level conjuncts of the quantified body
# (v contained in t, v disjoint from t, union with t prescribed).  Reading
# those constraints off syntactically confines the witness search to an
# interval of the subset lattice instead of the whole powerset.

def _conjuncts(f: Formula):
    if isinstance(f, And):
        yield from _conjuncts(f.left)
        yield from _conjuncts(f.right)
    else:
        yield f


def _mask_bounds(term_eval, var: str, conjs, env: dict, top: int):
    """(lower, upper, singleton) constraints every satisfying value of var
    must respect; singleton means var is empty or a single point."""
    from .syntax import term_vars
    upper, lower = top, 0
    singleton = False
    vt = Var(var)
    for c in conjs:
        if (isinstance(c, Eq)
                and ((c.left == vt and c.right == App("min", (vt,)))
                     or (c.right == vt and c.left == App("min", (vt,))))):
            singleton = True
        if (isinstance(c, SubsetAtom) and c.left == vt
                and var not in term_vars(c.right)):
            upper &= term_eval(c.right, env)
            continue
        if not isinstance(c, Eq):
            continue
        for a, b in ((c.left, c.right), (c.right, c.left)):
            if (not isinstance(a, App) or a.op not in ("inter", "union")
                    or vt not in a.args):
                continue
            other = a.args[0] if a.args[1] == vt else a.args[1]
            if other == vt or var in term_vars(other):
                continue
            if a.op == "inter":
                if b == vt:
                    upper &= term_eval(other, env)
                elif var not in term_vars(b) and term_eval(b, env) == 0:
                    upper &= top & ~term_eval(other, env)
            elif a.op == "union" and var not in term_vars(b):
                u = term_eval(b, env)
                upper &= u
                lower |= u & ~term_eval(other, env)
    return lower, upper, singleton


def _bounded_masks(term_eval, var: str, body: Formula, env: dict, top: int,
                   antecedent_only: bool = False):
    """Candidate masks for a quantified variable; for universal quantifiers
    only the antecedent of an implication may constrain (other values hold
    vacuously)."""
    if antecedent_only:
        if not isinstance(body, Implies):
            conjs = []
        else:
            conjs = list(_conjuncts(body.left))
    else:
        conjs = list(_conjuncts(body))
    lower, upper, singleton = _mask_bounds(term_eval, var, conjs, env, top)
    if lower & ~upper:
        return
    if singleton:
        if lower == 0:
            yield 0
        rest = upper
        while rest:
            bit = rest & -rest
            if lower | bit == bit or lower == bit:
                yield bit
            rest &= rest - 1
        return
    free = upper & ~lower
    sub = free
    while True:
        yield sub | lower
        if sub == 0:
            return
        sub = (sub - 1) & free


# ---------------------------------------------------------------------------
# Exact evaluation on MSO(n), bitmask-based

class BruteForceEvaluator:
    """Exact truth in MSO(n); subsets are encoded as n-bit masks."""

    def __init__(self, n: int, cap: int = DEFAULT_MSOFIN_CAP,
                 constants: Optional[dict] = None):
        if n > cap:
            raise EvalError(f"MSO({n}) exceeds brute-force cap {cap}")
        self.n = n
        self.top = (1 << n) - 1
        self.constants = dict(constants or {})

    def encode(self, s) -> int:
        mask = 0
        for i in s:
            if not 0 <= i < self.n:
                raise EvalError(f"element {i} outside MSO({self.n})")
            mask |= 1 << i
        return mask

    def decode(self, mask: int) -> frozenset:
        return frozenset(i for i in range(self.n) if mask >> i & 1)

    def term(self, t: Term, env: dict) -> int:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvalError(f"unbound variable {t.name!r}") from None
        if isinstance(t, Const):
            if t.name in env:
                return env[t.name]
            if t.name in self.constants:
                return self.constants[t.name]
            if t.name == "bot":
                return 0
            if t.name == "top":
                return self.top
            if t.name == "zero":
                return 1 if self.n else 0
            if t.name == "zerostar":
                return 1 << (self.n - 1) if self.n else 0
            raise EvalError(f"unknown constant {t.name!r}")
        op = t.op
        if op == "union":
            return self.term(t.args[0], env) | self.term(t.args[1], env)
        if op == "inter":
            return self.term(t.args[0], env) & self.term(t.args[1], env)
        if op == "setminus":
            return self.term(t.args[0], env) & ~self.term(t.args[1], env)
        if op == "delta":
            return self.term(t.args[0], env) ^ self.term(t.args[1], env)
        if op == "compl":
            return self.top & ~self.term(t.args[0], env)
        if op == "sinv":
            return self.term(t.args[0], env) >> 1
        raise EvalError(f"function {op!r} undefined in MSO({self.n})")

    def formula(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Eq):
            return self.term(f.left, env) == self.term(f.right, env)
        if isinstance(f, SubsetAtom):
            a, b = self.term(f.left, env), self.term(f.right, env)
            return a | b == b
        if isinstance(f, LtEAtom):
            a, b = self.term(f.left, env), self.term(f.right, env)
            if not a or not b:
                return False
            return (a & -a).bit_length() < b.bit_length()
        if isinstance(f, Not):
            return not self.formula(f.body, env)
        if isinstance(f, And):
            return self.formula(f.left, env) and self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Implies):
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        if isinstance(f, Exists):
            env = dict(env)
            for mask in _bounded_masks(self.term, f.var, f.body, env, self.top):
                env[f.var] = mask
                if self.formula(f.body, env):
                    return True
            return False
        if isinstance(f, Forall):
            env = dict(env)
            for mask in _bounded_masks(self.term, f.var, f.body, env, self.top,
                                       antecedent_only=True):
                env[f.var] = mask
                if not self.formula(f.body, env):
                    return False
            return True
        if isinstance(f, ExistsPartition):
            return self._exists_partition(f, env)
        raise EvalError(f"cannot evaluate {f!r}")

    def _exists_partition(self, f: ExistsPartition, env: dict) -> bool:
        """Search for a labelling of index points by blocks.  Top-level
        conjuncts of shape (subset Z t), with Z a block variable and t free of
        block variables, prune the per-point block choices."""
        blocks = f.block_vars
        bset = set(blocks)
        bounds: dict[str, int] = {}
        rest: list[Formula] = []

        def conjuncts(g: Formula):
            if isinstance(g, And):
                yield from conjuncts(g.left)
                yield from conjuncts(g.right)
            else:
                yield g

        from .syntax import term_vars
        for c in conjuncts(f.body):
            if (isinstance(c, SubsetAtom) and isinstance(c.left, Var)
                    and c.left.name in bset and c.left.name not in bounds
                    and not (term_vars(c.right) & bset)):
                bounds[c.left.name] = self.term(c.right, env)
            else:
                rest.append(c)

        allowed_per_point = []
        for i in range(self.n):
            allowed = [z for z in blocks
                       if z not in bounds or bounds[z] >> i & 1]
            if not allowed:
                return False
            allowed_per_point.append(allowed)

        env = dict(env)
        for labelling in itertools.product(*allowed_per_point):
            for z in blocks:
                env[z] = 0
            for i, z in enumerate(labelling):
                env[z] |= 1 << i
            if all(self.formula(c, env) for c in rest):
                return True
        return False


def bruteforce_eval(m: MsoFin, f: Formula, assignment: Optional[dict] = None,
                    cap: int = DEFAULT_MSOFIN_CAP,
                    constants: Optional[dict] = None) -> bool:
    """Exact truth of f in MSO(n); assignment maps variables to frozensets of
    ints (or bitmask ints)."""
    ev = BruteForceEvaluator(m.n, cap=cap,
                             constants={k: (v if isinstance(v, int) else ev_enc(m.n, v))
                                        for k, v in (constants or {}).items()})
    env = {}
    for name, value in (assignment or {}).items():
        env[name] = value if isinstance(value, int) else ev.encode(value)
    return ev.formula(f, env)


def ev_enc(n: int, s) -> int:
    mask = 0
    for i in s:
        mask |= 1 << i
    return mask


# ---------------------------------------------------------------------------
# Grids

@dataclass(frozen=True)
class GridSpec:
    """Witness pool: the seeds plus k mean-generated points inside every gap
    between consecutive seeds and k points above the greatest seed."""

    seeds: FinSet
    budget: int

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if Fraction(0) not in set(self.seeds.points):
            object.__setattr__(self, "seeds", self.seeds.union(FinSet.of(0)))

    def points(self) -> FinSet:
        pts = list(self.seeds.points)
        out = set(pts)
        gaps = list(zip(pts, pts[1:])) + [(pts[-1], Fraction(1))]
        for a, b in gaps:
            lo = a
            for _ in range(self.budget):
                lo = (lo + b) / 2
                out.add(lo)
        return FinSet.from_iterable(out)


def make_grid(seed_points, budget: int, cap: Optional[int] = None) -> FinSet:
    grid = GridSpec(FinSet.from_iterable(seed_points), budget).points()
    limit = grid_cap() if cap is None else cap
    if len(grid) > limit:
        raise GridCapError(f"grid of {len(grid)} points exceeds cap {limit}")
    return grid


def _w_seed_points(assignment: dict) -> set:
    pts = {Fraction(0)}
    for v in assignment.values():
        if isinstance(v, FinSet):
            pts.update(v.points)
        elif isinstance(v, IntervalUnion):
            pts.update(v.endpoints("both").points)
        else:
            raise EvalError(f"bad assignment value {v!r}")
    return pts


# ---------------------------------------------------------------------------
# Grid evaluation on W(I)

class GridWEvaluator:
    """Subsets of the grid as bitmasks; term/atomic layers are exact."""

    def __init__(self, grid: FinSet):
        self.grid = grid
        self.index = {p: i for i, p in enumerate(grid.points)}
        self.size = len(grid.points)
        self.full = (1 << self.size) - 1

    def encode(self, a: FinSet) -> int:
        mask = 0
        for p in a.points:
            if p not in self.index:
                raise EvalError(f"point {p} outside the grid")
            mask |= 1 << self.index[p]
        return mask

    def decode(self, mask: int) -> FinSet:
        return FinSet.from_iterable(self.grid.points[i]
                                    for i in range(self.size) if mask >> i & 1)

    def term(self, t: Term, env: dict) -> int:
        if isinstance(t, Var):
            try:
                return env[t.name]
            except KeyError:
                raise EvalError(f"unbound variable {t.name!r}") from None
        if isinstance(t, Const):
            if t.name in env:
                return env[t.name]
            if t.name == "bot":
                return 0
            if t.name == "zero":
                return 1  # grid point 0 is always present and is the least
            raise EvalError(f"unknown constant {t.name!r} in W(I)")
        op = t.op
        if op == "union":
            return self.term(t.args[0], env) | self.term(t.args[1], env)
        if op == "inter":
            return self.term(t.args[0], env) & self.term(t.args[1], env)
        if op == "setminus":
            return self.term(t.args[0], env) & ~self.term(t.args[1], env)
        if op == "delta":
            return self.term(t.args[0], env) ^ self.term(t.args[1], env)
        if op == "min":
            a = self.term(t.args[0], env)
            return a & -a
        if op == "max":
            a = self.term(t.args[0], env)
            return 1 << (a.bit_length() - 1) if a else 0
        if op == "msinv":
            a = self.term(t.args[0], env)
            b = self.term(t.args[1], env)
            out = 0
            prev = -1
            rest = a
            while rest:
                low = rest & -rest
                if prev >= 0 and low & b:
                    out |= 1 << prev
                prev = low.bit_length() - 1
                rest &= rest - 1
            return out
        raise EvalError(f"function {op!r} undefined in W(I)")

    def formula(self, f: Formula, env: dict) -> bool:
        if isinstance(f, Eq):
            return self.term(f.left, env) == self.term(f.right, env)
        if isinstance(f, SubsetAtom):
            a, b = self.term(f.left, env), self.term(f.right, env)
            return a | b == b
        if isinstance(f, LtEAtom):
            a, b = self.term(f.left, env), self.term(f.right, env)
            if not a or not b:
                return False
            return (a & -a).bit_length() < b.bit_length()
        if isinstance(f, Not):
            return not self.formula(f.body, env)
        if isinstance(f, And):
            return self.formula(f.left, env) and self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Implies):
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        if isinstance(f, Exists):
            env = dict(env)
            for mask in _bounded_masks(self.term, f.var, f.body, env, self.full):
                env[f.var] = mask
                if self.formula(f.body, env):
                    return True
            return False
        if isinstance(f, Forall):
            env = dict(env)
            for mask in _bounded_masks(self.term, f.var, f.body, env, self.full,
                                       antecedent_only=True):
                env[f.var] = mask
                if not self.formula(f.body, env):
                    return False
            return True
        raise EvalError(f"cannot evaluate {f!r} on the W(I) grid")


# ---------------------------------------------------------------------------
# Grid evaluation on L(I)

class GridLEvaluator:
    """Quantified variables range over canonical interval unions with
    endpoints in the grid, including unbounded variants."""

    def __init__(self, grid: FinSet):
        self.grid = grid
        self.structure = LciStructure()
        self._candidates = None

    @property
    def candidates(self):
        if self._candidates is None:
            self._candidates = enumerate_interval_unions(self.grid.points,
                                                         include_end=True)
        return self._candidates

    @staticmethod
    def _from_endpoint_sets(lefts, rights):
        """The at most one interval union with the given left and right
        endpoint sets (sorted pairing; a missing last right endpoint marks
        the unbounded interval)."""
        if not (lefts.is_finite_set() and rights.is_finite_set()):
            return []
        lp, rp = lefts.left_endpoints().points, rights.left_endpoints().points
        if len(rp) == len(lp):
            raw = list(zip(lp, rp))
        elif len(rp) == len(lp) - 1:
            raw = list(zip(lp, rp)) + [(lp[-1], None)]
        else:
            return []
        try:
            cand = IntervalUnion(tuple(raw))
        except ValueError:
            return []
        if cand.left_endpoints() != lefts.left_endpoints():
            return []
        if IntervalUnion.from_finset(cand.right_endpoints()) != rights:
            return []
        return [cand]

    def _witnesses(self, var: str, body: Formula, env: dict):
        """Candidate values for a quantified variable, narrowed by top-level
        equational or subset constraints among the body's conjuncts."""
        from .syntax import term_vars
        vt = Var(var)
        upper = None
        lower = None
        lefts = rights = None
        unbounded = False
        for c in _conjuncts(body):
            if isinstance(c, Eq):
                for a, b in ((c.left, c.right), (c.right, c.left)):
                    if var in term_vars(b):
                        continue
                    if a == vt:
                        return [eval_term(self.structure, b, env)]
                    if not isinstance(a, App):
                        continue
                    if a.op in ("l", "r", "max") and a.args == (vt,):
                        value = eval_term(self.structure, b, env)
                        if a.op == "l":
                            lefts = value
                        elif a.op == "r":
                            rights = value
                        elif value.is_empty():
                            # max(v) = bot forces v empty or unbounded
                            unbounded = True
                    if a.op == "inter" and vt in a.args:
                        other = a.args[0] if a.args[1] == vt else a.args[1]
                        if other == vt or var in term_vars(other):
                            continue
                        if b == vt:
                            bound = eval_term(self.structure, other, env)
                            upper = bound if upper is None else upper.inter(bound)
                        elif b == other:
                            bound = eval_term(self.structure, other, env)
                            lower = (bound if lower is None
                                     else lower.union(bound))
                    if a.op == "union" and vt in a.args:
                        other = a.args[0] if a.args[1] == vt else a.args[1]
                        if other != vt and var not in term_vars(other):
                            bound = eval_term(self.structure, b, env)
                            upper = bound if upper is None else upper.inter(bound)
            elif (isinstance(c, SubsetAtom) and c.left == vt
                    and var not in term_vars(c.right)):
                bound = eval_term(self.structure, c.right, env)
                upper = bound if upper is None else upper.inter(bound)
        if lefts is not None and rights is not None:
            pool = self._from_endpoint_sets(lefts, rights)
        elif upper is not None and upper.is_finite_set():
            pts = upper.left_endpoints().points
            pool = [IntervalUnion.of_points(p for k, p in enumerate(pts)
                                            if mask >> k & 1)
                    for mask in range(1 << len(pts))]
        elif upper is not None:
            pool = [cand for cand in self.candidates if cand.subset(upper)]
        elif lower is not None or unbounded:
            pool = self.candidates
        else:
            return self.candidates
        if lower is not None:
            pool = [cand for cand in pool if lower.subset(cand)]
        if unbounded:
            pool = [cand for cand in pool
                    if cand.is_empty() or not cand.is_bounded()]
        return pool

    def formula(self, f: Formula, env: dict) -> bool:
        if isinstance(f, (Eq, SubsetAtom, LtEAtom)):
            return eval_atomic(self.structure, f, env)
        if isinstance(f, Not):
            return not self.formula(f.body, env)
        if isinstance(f, And):
            return self.formula(f.left, env) and self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Implies):
            return (not self.formula(f.left, env)) or self.formula(f.right, env)
        if isinstance(f, Exists):
            env = dict(env)
            for cand in self._witnesses(f.var, f.body, env):
                env[f.var] = cand
                if self.formula(f.body, env):
                    return True
            return False
        if isinstance(f, Forall):
            env = dict(env)
            for cand in self.candidates:
                env[f.var] = cand
                if not self.formula(f.body, env):
                    return False
            return True
        raise EvalError(f"cannot evaluate {f!r} on the L(I) grid")


def _verdict_at(kind: str, f: Formula, assignment: dict, k: int,
                cap: Optional[int]) -> bool:
    grid = make_grid(_w_seed_points(assignment), k, cap=cap)
    if kind == "w":
        ev = GridWEvaluator(grid)
        env = {name: ev.encode(v) for name, v in assignment.items()}
        return ev.formula(f, env)
    if kind == "l":
        ev = GridLEvaluator(grid)
        return ev.formula(f, dict(assignment))
    raise ValueError(f"unknown structure kind {kind!r}")


def grid_eval(kind: str, f: Formula, assignment: Optional[dict] = None,
              k: int = 1, cap: Optional[int] = None) -> EvalReport:
    """Budgeted witness-search truth value over W(I) (kind='w') or L(I)
    (kind='l').  Reports whether the verdicts at budgets k and k+1 agree."""
    assignment = dict(assignment or {})
    v1 = _verdict_at(kind, f, assignment, k, cap)
    v2 = _verdict_at(kind, f, assignment, k + 1, cap)
    return EvalReport(verdict=v1, budget_used=k, stabilized=(v1 == v2))


def stabilize(kind: str, f: Formula, assignment: Optional[dict] = None,
              kmax: int = 4, cap: Optional[int] = None) -> EvalReport:
    """Verdict at the least budget k <= kmax whose verdict agrees with k+1,
    else the kmax verdict flagged as not stabilized."""
    if kmax < 2:
        raise ValueError("kmax must be >= 2")
    assignment = dict(assignment or {})
    verdicts: dict[int, bool] = {}

    def v(k: int) -> bool:
        if k not in verdicts:
            verdicts[k] = _verdict_at(kind, f, assignment, k, cap)
        return verdicts[k]

    for k in range(1, kmax):
        if v(k) == v(k + 1):
            return EvalReport(verdict=v(k), budget_used=k, stabilized=True)
    return EvalReport(verdict=v(kmax), budget_used=kmax, stabilized=False)


# ---------------------------------------------------------------------------
# Relativisation

def at_mo(var: str, fresh: FreshVars) -> Formula:
    """MO formula defining the atoms (minimal nonempty sets)."""
    w = fresh.fresh("W")
    return And(Not(Eq(Var(var), Const("bot"))),
               Forall(w, Implies(SubsetAtom(Var(w), Var(var)),
                                 Or(Eq(Var(w), Const("bot")),
                                    Eq(Var(w), Var(var))))))


def relativize(f: Formula, mode, fresh: Optional[FreshVars] = None) -> Formula:
    """Quantifier relativisation of an MO formula.

    mode = ("element", Y): restriction to the subsets of Y; quantifiers are
    guarded with X being a subset of Y.

    mode = ("interval", I, J): restriction to finite sets inside the window
    [i, j), where I and J are atom-valued variables naming the endpoints;
    quantifiers are guarded by every atom of X lying in the window.
    """
    kind = mode[0]
    params = mode[1:]
    if fresh is None:
        fresh = FreshVars(all_vars(f) | set(params))
    clash = set(params) & all_vars(f)
    if clash:
        for name in clash:
            # the guard variables must be fresh for f; rename bound uses
            f = _rename_bound(f, name, fresh.fresh(name))

    if kind == "element":
        yvar = params[0]

        def guard(x: str) -> Formula:
            return SubsetAtom(Var(x), Var(yvar))
    elif kind == "interval":
        ivar, jvar = params

        def guard(x: str) -> Formula:
            z = fresh.fresh("Z")
            window = And(Or(LtEAtom(Var(ivar), Var(z)), Eq(Var(ivar), Var(z))),
                         LtEAtom(Var(z), Var(jvar)))
            return Forall(z, Implies(And(at_mo(z, fresh),
                                         SubsetAtom(Var(z), Var(x))),
                                     window))
    else:
        raise ValueError(f"unknown relativisation mode {kind!r}")

    def go(g: Formula) -> Formula:
        if isinstance(g, (Eq, SubsetAtom, LtEAtom)):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, And(guard(g.var), go(g.body)))
        if isinstance(g, Forall):
            return Forall(g.var, Implies(guard(g.var), go(g.body)))
        raise EvalError(f"cannot relativize {g!r}")

    return go(f)


def _rename_bound(f: Formula, old: str, new: str) -> Formula:
    if isinstance(f, (Eq, SubsetAtom, LtEAtom)):
        return f
    if isinstance(f, Not):
        return Not(_rename_bound(f.body, old, new))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_rename_bound(f.left, old, new),
                       _rename_bound(f.right, old, new))
    if isinstance(f, (Exists, Forall)):
        body = _rename_bound(f.body, old, new)
        if f.var == old:
            from .syntax import rename_free
            return type(f)(new, rename_free(body, old, new))
        return type(f)(f.var, body)
    raise EvalError(f"cannot rename in {f!r}")
