"""Abstract syntax, s-expression parsing/printing and structural operations
for formulas over the four signatures used in the toolkit.

One shared AST is used for every signature; a Signature value records which
head symbols are legal so translators can be total functions between tags.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union


class SyntaxErrorAt(ValueError):
    """Parse failure carrying the character position of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SignatureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    op: str
    args: tuple


Term = Union[Var, Const, App]

ARITY = {
    "union": 2, "inter": 2, "setminus": 2, "delta": 2, "msinv": 2,
    "sinv": 1, "min": 1, "max": 1, "l": 1, "r": 1, "compl": 1,
}


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class SubsetAtom:
    left: Term
    right: Term


@dataclass(frozen=True)
class LtEAtom:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class RAtom:
    """Atomic relation of the generalised-power signature: R_zeta applied to
    power variables.  `seq` is a fefvau.AcceptableSequence."""
    seq: object
    args: tuple[str, ...]


@dataclass(frozen=True)
class ExistsPartition:
    """Index-algebra quantifier asserting the existence of a partition of the
    full index set into blocks named by `block_vars` (blocks may be empty)
    under which `body` holds.  Serialised as (exists-partition (Z ...) f)."""
    block_vars: tuple[str, ...]
    body: "Formula"


Formula = Union[Eq, SubsetAtom, LtEAtom, Not, And, Or, Implies,
                Exists, Forall, RAtom, ExistsPartition]

ATOM_TYPES = (Eq, SubsetAtom, LtEAtom)


def and_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Eq(Const("bot"), Const("bot"))
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def or_all(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return Not(Eq(Const("bot"), Const("bot")))
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# Signatures

@dataclass(frozen=True)
class Signature:
    tag: str
    functions: frozenset
    constants: frozenset
    relations: frozenset
    extra_constants: frozenset = frozenset()

    def with_extensions(self, setminus=False, delta=False, constants=()) -> "Signature":
        funcs = set(self.functions)
        if setminus:
            funcs.add("setminus")
        if delta:
            funcs.add("delta")
        return Signature(self.tag, frozenset(funcs), self.constants,
                         self.relations, self.extra_constants | frozenset(constants))

    def all_constants(self) -> frozenset:
        return self.constants | self.extra_constants

    def allows_function(self, op: str) -> bool:
        return op in self.functions

    def allows_relation(self, rel: str) -> bool:
        return rel in self.relations


# bot is core in the functional signatures and kept available in MO as a
# convenience for the (definable) empty set.
MO = Signature("mo", frozenset(), frozenset({"bot"}),
               frozenset({"subset", "ltE", "="}))
MSOFIN = Signature("msofin", frozenset({"union", "inter", "sinv"}),
                   frozenset({"bot", "zero", "zerostar"}), frozenset({"="}))
WSO = Signature("wso", frozenset({"union", "inter", "min", "max", "msinv"}),
                frozenset({"bot", "zero"}), frozenset({"="}))
LCI = Signature("lci", frozenset({"union", "inter", "min", "max", "l", "r"}),
                frozenset({"bot", "zero"}), frozenset({"="}))

SIGNATURES = {"mo": MO, "msofin": MSOFIN, "wso": WSO, "lci": LCI}

VAR_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text: str):
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append((m.group(), m.start()))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        if self.pos >= len(self.tokens):
            raise SyntaxErrorAt("unexpected end of input", len(self.text))
        return self.tokens[self.pos]

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str):
        tok, at = self.next()
        if tok != value:
            raise SyntaxErrorAt(f"expected {value!r}, found {tok!r}", at)

    def parse_formula(self) -> Formula:
        tok, at = self.next()
        if tok != "(":
            raise SyntaxErrorAt(f"expected '(', found {tok!r}", at)
        head, hat = self.next()
        if head in ("not",):
            body = self.parse_formula()
            self.expect(")")
            return Not(body)
        if head in ("and", "or", "implies"):
            left = self.parse_formula()
            right = self.parse_formula()
            self.expect(")")
            cls = {"and": And, "or": Or, "implies": Implies}[head]
            return cls(left, right)
        if head in ("exists", "forall"):
            var, vat = self.next()
            if not VAR_RE.match(var):
                raise SyntaxErrorAt(f"bad variable token {var!r}", vat)
            body = self.parse_formula()
            self.expect(")")
            return (Exists if head == "exists" else Forall)(var, body)
        if head == "exists-partition":
            self.expect("(")
            blocks = []
            while self.peek()[0] != ")":
                var, vat = self.next()
                if not VAR_RE.match(var):
                    raise SyntaxErrorAt(f"bad variable token {var!r}", vat)
                blocks.append(var)
            self.expect(")")
            body = self.parse_formula()
            self.expect(")")
            return ExistsPartition(tuple(blocks), body)
        if head in ("=", "subset", "ltE"):
            if head != "=" and not self.sig.allows_relation(head):
                raise SyntaxErrorAt(
                    f"relation {head!r} not in signature {self.sig.tag!r}", hat)
            left = self.parse_term()
            right = self.parse_term()
            self.expect(")")
            cls = {"=": Eq, "subset": SubsetAtom, "ltE": LtEAtom}[head]
            return cls(left, right)
        raise SyntaxErrorAt(f"unknown formula head {head!r}", hat)

    def parse_term(self) -> Term:
        tok, at = self.next()
        if tok == "(":
            op, oat = self.next()
            if op not in ARITY:
                raise SyntaxErrorAt(f"unknown function symbol {op!r}", oat)
            if not self.sig.allows_function(op):
                raise SyntaxErrorAt(
                    f"function {op!r} not in signature {self.sig.tag!r}", oat)
            args = tuple(self.parse_term() for _ in range(ARITY[op]))
            self.expect(")")
            return App(op, args)
        if tok == ")":
            raise SyntaxErrorAt("unexpected ')'", at)
        if tok in self.sig.all_constants():
            return Const(tok)
        if VAR_RE.match(tok):
            return Var(tok)
        raise SyntaxErrorAt(f"unknown token {tok!r}", at)


def parse(text: str, sig: Signature) -> Formula:
    p = _Parser(text, sig)
    f = p.parse_formula()
    if p.pos != len(p.tokens):
        raise SyntaxErrorAt("trailing input", p.tokens[p.pos][1])
    return f


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text, sig)
    t = p.parse_term()
    if p.pos != len(p.tokens):
        raise SyntaxErrorAt("trailing input", p.tokens[p.pos][1])
    return t


# ---------------------------------------------------------------------------
# Printing

def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    return "(" + t.op + " " + " ".join(print_term(a) for a in t.args) + ")"


def print_formula(f: Formula) -> str:
    if isinstance(f, Eq):
        return f"(= {print_term(f.left)} {print_term(f.right)})"
    if isinstance(f, SubsetAtom):
        return f"(subset {print_term(f.left)} {print_term(f.right)})"
    if isinstance(f, LtEAtom):
        return f"(ltE {print_term(f.left)} {print_term(f.right)})"
    if isinstance(f, Not):
        return f"(not {print_formula(f.body)})"
    if isinstance(f, And):
        return f"(and {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, Or):
        return f"(or {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, Implies):
        return f"(implies {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, Exists):
        return f"(exists {f.var} {print_formula(f.body)})"
    if isinstance(f, Forall):
        return f"(forall {f.var} {print_formula(f.body)})"
    if isinstance(f, ExistsPartition):
        return ("(exists-partition (" + " ".join(f.block_vars) + ") "
                + print_formula(f.body) + ")")
    if isinstance(f, RAtom):
        return "(R " + " ".join(f.args) + ")"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Variables and substitution

def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, ATOM_TYPES):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, ExistsPartition):
        return free_vars(f.body) - set(f.block_vars)
    if isinstance(f, RAtom):
        return set(f.args)
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> set[str]:
    if isinstance(f, ATOM_TYPES):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or, Implies)):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, ExistsPartition):
        return all_vars(f.body) | set(f.block_vars)
    if isinstance(f, RAtom):
        return set(f.args)
    raise TypeError(f"not a formula: {f!r}")


class FreshVars:
    """Generator of variable names avoiding a given set."""

    def __init__(self, avoid: Iterable[str] = (), prefix: str = "V"):
        self.avoid = set(avoid)
        self.prefix = prefix
        self.counter = 0

    def fresh(self, prefix: Optional[str] = None) -> str:
        prefix = prefix or self.prefix
        while True:
            self.counter += 1
            name = f"{prefix}{self.counter}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def subst_term(t: Term, var: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == var else t
    if isinstance(t, Const):
        return t
    return App(t.op, tuple(subst_term(a, var, value) for a in t.args))


def substitute(f: Formula, var: str, value: Term) -> Formula:
    """Capture-avoiding substitution of a term for a free variable."""
    value_vars = term_vars(value)

    def go(g: Formula, bound: set[str]) -> Formula:
        if isinstance(g, ATOM_TYPES):
            if var in bound:
                return g
            return type(g)(subst_term(g.left, var, value),
                           subst_term(g.right, var, value))
        if isinstance(g, Not):
            return Not(go(g.body, bound))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left, bound), go(g.right, bound))
        if isinstance(g, (Exists, Forall)):
            if g.var == var:
                return g
            if g.var in value_vars and var in free_vars(g.body):
                fv = FreshVars(all_vars(g.body) | value_vars | {var})
                new = fv.fresh(g.var.rstrip("0123456789") or "V")
                body = rename_free(g.body, g.var, new)
                return type(g)(new, go(body, bound))
            return type(g)(g.var, go(g.body, bound))
        if isinstance(g, ExistsPartition):
            if var in g.block_vars:
                return g
            return ExistsPartition(g.block_vars, go(g.body, bound | set(g.block_vars)))
        if isinstance(g, RAtom):
            # power atoms take bare variable arguments; only var-for-var works
            if isinstance(value, Var):
                return RAtom(g.seq, tuple(value.name if a == var else a
                                          for a in g.args))
            if var in g.args:
                raise ValueError("cannot substitute a complex term into a power atom")
            return g
        raise TypeError(f"not a formula: {g!r}")

    return go(f, set())


def rename_free(f: Formula, old: str, new: str) -> Formula:
    return substitute(f, old, Var(new))


# ---------------------------------------------------------------------------
# Unnesting

def _app_count(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(_app_count(a) for a in t.args)
    return 0


def atom_is_unnested(f: Formula) -> bool:
    if not isinstance(f, ATOM_TYPES):
        raise TypeError("expected an atomic formula")
    return _app_count(f.left) + _app_count(f.right) <= 1


def _innermost_app(t: Term):
    """Leftmost App subterm all of whose arguments are leaves, or None."""
    if isinstance(t, App):
        for a in t.args:
            found = _innermost_app(a)
            if found is not None:
                return found
        return t
    return None


def _replace_subterm(t: Term, target: Term, replacement: Term) -> Term:
    if t == target:
        return replacement
    if isinstance(t, App):
        return App(t.op, tuple(_replace_subterm(a, target, replacement)
                               for a in t.args))
    return t


def unnest_atom(f: Formula, fresh: FreshVars) -> Formula:
    """Hoist nested function applications out of an atomic formula using
    existentially quantified auxiliaries, preserving truth in every structure."""
    hoisted: list[tuple[str, Term]] = []
    left, right = f.left, f.right
    while _app_count(left) + _app_count(right) > 1:
        if _app_count(left) > 1 or (_app_count(left) == 1 and _app_count(right) >= 1):
            side = "left"
            inner = _innermost_app(left)
        else:
            side = "right"
            inner = _innermost_app(right)
        name = fresh.fresh("U")
        hoisted.append((name, inner))
        if side == "left":
            left = _replace_subterm(left, inner, Var(name))
        else:
            right = _replace_subterm(right, inner, Var(name))
    core: Formula = type(f)(left, right)
    for name, term in reversed(hoisted):
        core = Exists(name, And(Eq(Var(name), term), core))
    return core


def unnest(f: Formula, fresh: Optional[FreshVars] = None) -> Formula:
    """Equivalent formula in which every atomic subformula holds at most one
    function symbol, the rest being variables and constants."""
    if fresh is None:
        fresh = FreshVars(all_vars(f))
    if isinstance(f, ATOM_TYPES):
        return unnest_atom(f, fresh)
    if isinstance(f, Not):
        return Not(unnest(f.body, fresh))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(unnest(f.left, fresh), unnest(f.right, fresh))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, unnest(f.body, fresh))
    if isinstance(f, ExistsPartition):
        return ExistsPartition(f.block_vars, unnest(f.body, fresh))
    if isinstance(f, RAtom):
        return f
    raise TypeError(f"not a formula: {f!r}")


def is_unnested(f: Formula) -> bool:
    if isinstance(f, ATOM_TYPES):
        return atom_is_unnested(f)
    if isinstance(f, Not):
        return is_unnested(f.body)
    if isinstance(f, (And, Or, Implies)):
        return is_unnested(f.left) and is_unnested(f.right)
    if isinstance(f, (Exists, Forall)):
        return is_unnested(f.body)
    if isinstance(f, ExistsPartition):
        return is_unnested(f.body)
    if isinstance(f, RAtom):
        return True
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Shape predicates used by the rewriting layer

def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, ATOM_TYPES + (RAtom,)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or, Implies)):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def is_positive_existential(f: Formula) -> bool:
    """No negation, implication or universal quantification anywhere."""
    if isinstance(f, ATOM_TYPES + (RAtom,)):
        return True
    if isinstance(f, (And, Or)):
        return is_positive_existential(f.left) and is_positive_existential(f.right)
    if isinstance(f, Exists):
        return is_positive_existential(f.body)
    return False


def is_existential(f: Formula) -> bool:
    """No universal quantifier and no existential quantifier under negation
    or on the left of an implication."""

    def go(g: Formula, positive: bool) -> bool:
        if isinstance(g, ATOM_TYPES + (RAtom,)):
            return True
        if isinstance(g, Not):
            return go(g.body, not positive)
        if isinstance(g, (And, Or)):
            return go(g.left, positive) and go(g.right, positive)
        if isinstance(g, Implies):
            return go(g.left, not positive) and go(g.right, positive)
        if isinstance(g, Exists):
            return positive and go(g.body, positive)
        if isinstance(g, Forall):
            return (not positive) and go(g.body, positive)
        return False

    return go(f, True)


def formula_ops(f: Formula) -> set[str]:
    """All function symbols occurring anywhere in the formula."""

    def term_ops(t: Term) -> set[str]:
        if isinstance(t, App):
            out = {t.op}
            for a in t.args:
                out |= term_ops(a)
            return out
        return set()

    if isinstance(f, ATOM_TYPES):
        return term_ops(f.left) | term_ops(f.right)
    if isinstance(f, Not):
        return formula_ops(f.body)
    if isinstance(f, (And, Or, Implies)):
        return formula_ops(f.left) | formula_ops(f.right)
    if isinstance(f, (Exists, Forall)):
        return formula_ops(f.body)
    if isinstance(f, ExistsPartition):
        return formula_ops(f.body)
    if isinstance(f, RAtom):
        return set()
    raise TypeError(f"not a formula: {f!r}")


def contains_node(f: Formula, kinds) -> bool:
    if isinstance(f, kinds):
        return True
    if isinstance(f, ATOM_TYPES + (RAtom,)):
        return False
    if isinstance(f, Not):
        return contains_node(f.body, kinds)
    if isinstance(f, (And, Or, Implies)):
        return contains_node(f.left, kinds) or contains_node(f.right, kinds)
    if isinstance(f, (Exists, Forall, ExistsPartition)):
        return contains_node(f.body, kinds)
    raise TypeError(f"not a formula: {f!r}")
