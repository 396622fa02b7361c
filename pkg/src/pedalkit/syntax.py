"""Ground formulas, programs and credence formulas.

Everything here is an immutable tree.  Derived connectives (``&``, ``->``,
``<->``, ``[pi]``, ``G``) are real constructors so that printing is faithful;
:func:`desugar` rewrites them into the primitive basis
``{Atom, Bottom, Not, Or, Diamond, GlobalDiamond}`` before any semantic work.

Concrete syntax (ASCII)::

    #            bottom            ~f        negation
    f & g        conjunction       f | g     disjunction
    f -> g       implication       f <-> g   equivalence
    [prog]f      box               <prog>f   diamond
    G f          global box        F f       global diamond
    p;q  p+q  p*  ?f               programs
    P(f) >= 3/5                    credence comparison (>=, >, =, <=, <)
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Optional

__all__ = [
    "Formula", "Atom", "Bottom", "Not", "Or", "And", "Implies", "Iff",
    "Diamond", "Box", "GlobalDiamond", "GlobalBox", "TOP", "BOTTOM",
    "Program", "AtomicProgram", "Seq", "Choice", "Star", "Test",
    "CredenceFormula", "AtLeast", "CNot", "COr", "CAnd", "CImplies", "CIff",
    "Comparison", "Signature", "ParseError", "UnknownIdentifierError",
    "parse_formula", "parse_program", "parse_credence", "parse_rational",
    "print_formula", "print_program", "print_credence",
    "desugar", "desugar_program", "desugar_credence", "desugar_comparison",
    "as_comparison", "canon", "canon_credence", "cneg",
    "fl_closure", "fl_trace", "fl_pm", "is_dmff", "subformulas",
    "formula_signature", "credence_grounds",
    "random_formula", "random_program",
]


def _cached_hash(self):
    try:
        return self.__dict__["_h"]
    except KeyError:
        h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, "_h", h)
        return h


def _node(cls):
    cls = dataclass(frozen=True)(cls)
    # trees are hashed a lot (closure sets, atom tables); cache it per node
    cls.__hash__ = _cached_hash
    cls.__str__ = lambda self: _print_any(self)
    return cls


# ---------------------------------------------------------------------------
# AST

class Formula:
    """Base class of ground (PDL with global box) formulas."""


class Program:
    """Base class of program terms."""


class CredenceFormula:
    """Base class of Boolean combinations of ``P(f) >= q``."""


@_node
class Atom(Formula):
    name: str


@_node
class Bottom(Formula):
    pass


@_node
class Not(Formula):
    body: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


@_node
class Diamond(Formula):
    program: Program
    body: Formula


@_node
class Box(Formula):
    program: Program
    body: Formula


@_node
class GlobalDiamond(Formula):
    body: Formula


@_node
class GlobalBox(Formula):
    body: Formula


@_node
class AtomicProgram(Program):
    name: str


@_node
class Seq(Program):
    first: Program
    second: Program


@_node
class Choice(Program):
    left: Program
    right: Program


@_node
class Star(Program):
    body: Program


@_node
class Test(Program):
    formula: Formula


@_node
class AtLeast(CredenceFormula):
    formula: Formula
    q: Fraction

    def __post_init__(self):
        if isinstance(self.q, (int, Fraction)):
            q = Fraction(self.q)
            if not 0 <= q <= 1:
                raise ValueError(f"probability bound {q} outside [0, 1]")
            object.__setattr__(self, "q", q)


@_node
class CNot(CredenceFormula):
    body: CredenceFormula


@_node
class COr(CredenceFormula):
    left: CredenceFormula
    right: CredenceFormula


@_node
class CAnd(CredenceFormula):
    left: CredenceFormula
    right: CredenceFormula


@_node
class CImplies(CredenceFormula):
    left: CredenceFormula
    right: CredenceFormula


@_node
class CIff(CredenceFormula):
    left: CredenceFormula
    right: CredenceFormula


BOTTOM = Bottom()
TOP = Not(BOTTOM)

RELATIONS = (">=", ">", "=", "<=", "<")


@dataclass(frozen=True)
class Comparison:
    """``P(formula) relation q`` before desugaring."""

    formula: Formula
    relation: str
    q: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        q = Fraction(self.q)
        if not 0 <= q <= 1:
            raise ValueError(f"probability bound {q} outside [0, 1]")
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class Signature:
    formula_atoms: frozenset = frozenset()
    program_atoms: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "formula_atoms", frozenset(self.formula_atoms))
        object.__setattr__(self, "program_atoms", frozenset(self.program_atoms))

    def __or__(self, other):
        return Signature(self.formula_atoms | other.formula_atoms,
                         self.program_atoms | other.program_atoms)


# ---------------------------------------------------------------------------
# Comparisons

def desugar_comparison(c: Comparison) -> CredenceFormula:
    g, q = c.formula, c.q
    if c.relation == ">=":
        return AtLeast(g, q)
    if c.relation == "<":
        return CNot(AtLeast(g, q))
    if c.relation == "<=":
        return AtLeast(Not(g), 1 - q)
    if c.relation == "=":
        return CAnd(AtLeast(g, q), AtLeast(Not(g), 1 - q))
    # ">"
    return CAnd(AtLeast(g, q), CNot(desugar_comparison(Comparison(g, "=", q))))


def as_comparison(cf: CredenceFormula) -> Optional[Comparison]:
    """Recognise the exact output of :func:`desugar_comparison`.

    ``AtLeast(~g, q)`` is read as the primitive ``>=`` on ``~g``.
    """
    candidates = []
    if isinstance(cf, AtLeast):
        candidates.append(Comparison(cf.formula, ">=", cf.q))
        if isinstance(cf.formula, Not):
            candidates.append(Comparison(cf.formula.body, "<=", 1 - cf.q))
    elif isinstance(cf, CNot) and isinstance(cf.body, AtLeast):
        candidates.append(Comparison(cf.body.formula, "<", cf.body.q))
    elif isinstance(cf, CAnd) and isinstance(cf.left, AtLeast):
        candidates += [Comparison(cf.left.formula, rel, cf.left.q) for rel in ("=", ">")]
    for c in candidates:
        if desugar_comparison(c) == cf:
            return c
    return None


# ---------------------------------------------------------------------------
# Tokenizer and parser

class ParseError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownIdentifierError(ParseError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d*\.\d+|\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><->|->|>=|<=|[<>=~&|\#()\[\];+*?])
""", re.VERBOSE)

_RESERVED = {"G", "F", "P"}


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_rational(text) -> Fraction:
    """Exact rational from ``"3/5"``, ``"0.6"`` or ``"1"``."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


class _Parser:
    def __init__(self, text, sig):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, *texts):
        kind, text, _ = self.tok
        return kind in ("op", "ident") and text in texts

    def advance(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        if not self.peek(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, msg):
        kind, text, pos = self.tok
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"{msg}, found {found}", pos)

    def done(self):
        if self.tok[0] != "end":
            self.fail("unexpected trailing input")

    def ident(self, role):
        kind, text, pos = self.tok
        if kind != "ident" or text in _RESERVED:
            self.fail(f"expected {role} name")
        self.advance()
        if self.sig is not None:
            known = self.sig.formula_atoms if role == "atom" else self.sig.program_atoms
            if text not in known:
                raise UnknownIdentifierError(f"unknown {role} {text!r}", pos)
        return text

    # formulas, loosest first
    def formula(self):
        left = self.implication()
        if self.peek("<->"):
            self.advance()
            return Iff(left, self.implication())
        return left

    def implication(self):
        left = self.disjunction()
        if self.peek("->"):
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.peek("|"):
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek("&"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.peek("~"):
            self.advance()
            return Not(self.unary())
        if self.peek("G"):
            self.advance()
            return GlobalBox(self.unary())
        if self.peek("F"):
            self.advance()
            return GlobalDiamond(self.unary())
        if self.peek("["):
            self.advance()
            prog = self.program()
            self.expect("]")
            return Box(prog, self.unary())
        if self.peek("<"):
            self.advance()
            prog = self.program()
            self.expect(">")
            return Diamond(prog, self.unary())
        if self.peek("#"):
            self.advance()
            return BOTTOM
        if self.peek("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        return Atom(self.ident("atom"))

    # programs
    def program(self):
        left = self.sequence()
        while self.peek("+"):
            self.advance()
            left = Choice(left, self.sequence())
        return left

    def sequence(self):
        left = self.starred()
        while self.peek(";"):
            self.advance()
            left = Seq(left, self.starred())
        return left

    def starred(self):
        if self.peek("?"):
            self.advance()
            prog = Test(self.unary())
        elif self.peek("("):
            self.advance()
            prog = self.program()
            self.expect(")")
        else:
            prog = AtomicProgram(self.ident("program"))
        while self.peek("*"):
            self.advance()
            prog = Star(prog)
        return prog

    # credence formulas
    def credence(self):
        left = self.c_implication()
        if self.peek("<->"):
            self.advance()
            return CIff(left, self.c_implication())
        return left

    def c_implication(self):
        left = self.c_disjunction()
        if self.peek("->"):
            self.advance()
            return CImplies(left, self.c_implication())
        return left

    def c_disjunction(self):
        left = self.c_conjunction()
        while self.peek("|"):
            self.advance()
            left = COr(left, self.c_conjunction())
        return left

    def c_conjunction(self):
        left = self.c_unary()
        while self.peek("&"):
            self.advance()
            left = CAnd(left, self.c_unary())
        return left

    def c_unary(self):
        if self.peek("~"):
            self.advance()
            return CNot(self.c_unary())
        if self.peek("("):
            self.advance()
            f = self.credence()
            self.expect(")")
            return f
        return self.comparison()

    _FLIP = {">=": "<=", "<=": ">=", ">": "<", "<": ">", "=": "="}

    def comparison(self):
        if self.tok[0] == "num":
            q = self.number()
            rel = self.relation()
            g = self.probability()
            rel = self._FLIP[rel]
        else:
            g = self.probability()
            rel = self.relation()
            q = self.number()
        return desugar_comparison(Comparison(g, rel, q))

    def probability(self):
        if not self.peek("P"):
            self.fail("expected 'P('")
        self.advance()
        self.expect("(")
        g = self.formula()
        self.expect(")")
        return g

    def relation(self):
        if not self.peek(*RELATIONS):
            self.fail("expected one of >= > = <= <")
        return self.advance()[1]

    def number(self):
        kind, text, pos = self.tok
        if kind != "num":
            self.fail("expected a rational number")
        self.advance()
        q = parse_rational(text)
        if not 0 <= q <= 1:
            raise ParseError(f"probability bound {q} outside [0, 1]", pos)
        return q


def parse_formula(text: str, sig: Optional[Signature] = None) -> Formula:
    """Parse a ground formula; with ``sig`` unknown identifiers are errors."""
    p = _Parser(text, sig)
    f = p.formula()
    p.done()
    return f


def parse_program(text: str, sig: Optional[Signature] = None) -> Program:
    p = _Parser(text, sig)
    prog = p.program()
    p.done()
    return prog


def parse_credence(text: str, sig: Optional[Signature] = None) -> CredenceFormula:
    """Parse a credence formula.  Comparison sugar is desugared on the fly."""
    p = _Parser(text, sig)
    f = p.credence()
    p.done()
    return f


# ---------------------------------------------------------------------------
# Printer

_IFF, _IMP, _OR, _AND, _UNARY, _ATOM = range(1, 7)
_P_CHOICE, _P_SEQ, _P_STAR, _P_ATOM = range(1, 5)


def _f_level(f):
    if isinstance(f, (Iff, CIff)):
        return _IFF
    if isinstance(f, (Implies, CImplies)):
        return _IMP
    if isinstance(f, (Or, COr)):
        return _OR
    if isinstance(f, (And, CAnd)):
        return _AND
    if isinstance(f, (Not, CNot, Diamond, Box, GlobalBox, GlobalDiamond)):
        return _UNARY
    return _ATOM


def _p_level(p):
    if isinstance(p, Choice):
        return _P_CHOICE
    if isinstance(p, Seq):
        return _P_SEQ
    if isinstance(p, Star):
        return _P_STAR
    return _P_ATOM


_BINARY = {Iff: " <-> ", Implies: " -> ", Or: " | ", And: " & ",
           CIff: " <-> ", CImplies: " -> ", COr: " | ", CAnd: " & "}


def _pf(f, need):
    s = _render(f)
    return f"({s})" if _f_level(f) < need else s


def _pp(p, need):
    s = _render_program(p)
    return f"({s})" if _p_level(p) < need else s


def _render(f):
    t = type(f)
    if t is Atom:
        return f.name
    if t is Bottom:
        return "#"
    if t in (Not, CNot):
        return "~" + _pf(f.body, _UNARY)
    if t in (Iff, CIff):
        return _pf(f.left, _IMP) + _BINARY[t] + _pf(f.right, _IMP)
    if t in (Implies, CImplies):
        return _pf(f.left, _OR) + _BINARY[t] + _pf(f.right, _IMP)
    if t in (Or, COr):
        return _pf(f.left, _OR) + _BINARY[t] + _pf(f.right, _AND)
    if t in (And, CAnd):
        return _pf(f.left, _AND) + _BINARY[t] + _pf(f.right, _UNARY)
    if t is Diamond:
        return f"<{_render_program(f.program)}>" + _pf(f.body, _UNARY)
    if t is Box:
        return f"[{_render_program(f.program)}]" + _pf(f.body, _UNARY)
    if t in (GlobalBox, GlobalDiamond):
        body = _pf(f.body, _UNARY)
        sep = " " if body[0].isalnum() or body[0] == "_" else ""
        return ("G" if t is GlobalBox else "F") + sep + body
    if t is AtLeast:
        return f"P({_render(f.formula)}) >= {f.q}"
    raise TypeError(f"not a formula: {f!r}")


def _render_program(p):
    t = type(p)
    if t is AtomicProgram:
        return p.name
    if t is Choice:
        return _pp(p.left, _P_CHOICE) + "+" + _pp(p.right, _P_SEQ)
    if t is Seq:
        return _pp(p.first, _P_SEQ) + ";" + _pp(p.second, _P_STAR)
    if t is Star:
        return _pp(p.body, _P_STAR) + "*"
    if t is Test:
        return "?" + _pf(p.formula, _UNARY)
    raise TypeError(f"not a program: {p!r}")


def _print_any(x):
    return _render_program(x) if isinstance(x, Program) else _render(x)


def print_formula(f: Formula) -> str:
    return _render(f)


def print_program(p: Program) -> str:
    return _render_program(p)


def print_credence(cf: CredenceFormula) -> str:
    return _render(cf)


# ---------------------------------------------------------------------------
# Desugaring

def desugar(f: Formula) -> Formula:
    """Rewrite into the primitive basis, exactly per the abbreviations."""
    t = type(f)
    if t in (Atom, Bottom):
        return f
    if t is Not:
        return Not(desugar(f.body))
    if t is Or:
        return Or(desugar(f.left), desugar(f.right))
    if t is And:
        return Not(Or(Not(desugar(f.left)), Not(desugar(f.right))))
    if t is Implies:
        return Or(Not(desugar(f.left)), desugar(f.right))
    if t is Iff:
        return desugar(And(Implies(f.left, f.right), Implies(f.right, f.left)))
    if t is Diamond:
        return Diamond(desugar_program(f.program), desugar(f.body))
    if t is Box:
        return Not(Diamond(desugar_program(f.program), Not(desugar(f.body))))
    if t is GlobalDiamond:
        return GlobalDiamond(desugar(f.body))
    if t is GlobalBox:
        return Not(GlobalDiamond(Not(desugar(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def desugar_program(p: Program) -> Program:
    t = type(p)
    if t is AtomicProgram:
        return p
    if t is Seq:
        return Seq(desugar_program(p.first), desugar_program(p.second))
    if t is Choice:
        return Choice(desugar_program(p.left), desugar_program(p.right))
    if t is Star:
        return Star(desugar_program(p.body))
    if t is Test:
        return Test(desugar(p.formula))
    raise TypeError(f"not a program: {p!r}")


def desugar_credence(cf: CredenceFormula) -> CredenceFormula:
    """Primitive credence basis {AtLeast, CNot, COr}; ground parts desugared."""
    t = type(cf)
    if t is AtLeast:
        return AtLeast(desugar(cf.formula), cf.q)
    if t is CNot:
        return CNot(desugar_credence(cf.body))
    if t is COr:
        return COr(desugar_credence(cf.left), desugar_credence(cf.right))
    if t is CAnd:
        return CNot(COr(CNot(desugar_credence(cf.left)), CNot(desugar_credence(cf.right))))
    if t is CImplies:
        return COr(CNot(desugar_credence(cf.left)), desugar_credence(cf.right))
    if t is CIff:
        return desugar_credence(CAnd(CImplies(cf.left, cf.right), CImplies(cf.right, cf.left)))
    raise TypeError(f"not a credence formula: {cf!r}")


def cneg(f):
    """Negation that cancels an outer negation instead of stacking one."""
    if isinstance(f, Not):
        return f.body
    if isinstance(f, CNot):
        return f.body
    if isinstance(f, CredenceFormula):
        return CNot(f)
    return Not(f)


def _collapse(f):
    t = type(f)
    if t in (Atom, Bottom):
        return f
    if t is Not:
        return cneg(_collapse(f.body))
    if t is Or:
        return Or(_collapse(f.left), _collapse(f.right))
    if t is Diamond:
        return Diamond(_collapse_program(f.program), _collapse(f.body))
    if t is GlobalDiamond:
        return GlobalDiamond(_collapse(f.body))
    raise TypeError(f"not a primitive formula: {f!r}")


def _collapse_program(p):
    t = type(p)
    if t is AtomicProgram:
        return p
    if t is Seq:
        return Seq(_collapse_program(p.first), _collapse_program(p.second))
    if t is Choice:
        return Choice(_collapse_program(p.left), _collapse_program(p.right))
    if t is Star:
        return Star(_collapse_program(p.body))
    return Test(_collapse(p.formula))


def canon(f: Formula) -> Formula:
    """Desugar and cancel double negations everywhere.

    Two formulas with the same canonical form are interderivable by
    abbreviation unfolding and double-negation replacement, so the proof
    checker compares formulas up to this form.
    """
    return _collapse(desugar(f))


def canon_credence(cf: CredenceFormula) -> CredenceFormula:
    cf = desugar_credence(cf)

    def go(c):
        if isinstance(c, AtLeast):
            return AtLeast(_collapse(c.formula), c.q)
        if isinstance(c, CNot):
            return cneg(go(c.body))
        return COr(go(c.left), go(c.right))

    return go(cf)


# ---------------------------------------------------------------------------
# Structural queries

def _children(x):
    for f in fields(x):
        v = getattr(x, f.name)
        if isinstance(v, (Formula, Program, CredenceFormula)):
            yield v


def subformulas(f) -> Iterable:
    """All nodes (formulas and programs) of the tree, preorder."""
    stack = [f]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(list(_children(x))))


def formula_signature(*items) -> Signature:
    """Atomic formula and program names occurring in formulas or credence formulas."""
    fa, pa = set(), set()
    for item in items:
        for x in subformulas(item):
            if isinstance(x, Atom):
                fa.add(x.name)
            elif isinstance(x, AtomicProgram):
                pa.add(x.name)
    return Signature(fa, pa)


def credence_grounds(cf: CredenceFormula) -> list:
    """Ground formulas under ``P``, in first-occurrence order."""
    out = []
    for x in subformulas(cf):
        if isinstance(x, AtLeast) and x.formula not in out:
            out.append(x.formula)
    return out


def is_dmff(f: Formula) -> bool:
    """True when no program modality occurs anywhere in ``f``.

    The global modalities do not count: they read only the equivalence
    relation, which a credence model fixes.
    """
    return not any(isinstance(x, (Diamond, Box)) for x in subformulas(f))


# ---------------------------------------------------------------------------
# Fischer-Ladner closure

def _fl_steps(f):
    """(rule, produced formula) pairs for one primitive-basis formula."""
    t = type(f)
    if t is Not or t is GlobalDiamond:
        yield "subformula", f.body
    elif t is Or:
        yield "subformula", f.left
        yield "subformula", f.right
    elif t is Diamond:
        yield "subformula", f.body
        p, g = f.program, f.body
        if isinstance(p, Test):
            yield "test", p.formula
        elif isinstance(p, Seq):
            yield "seq", Diamond(p.first, Diamond(p.second, g))
        elif isinstance(p, Choice):
            yield "choice", Diamond(p.left, g)
            yield "choice", Diamond(p.right, g)
        elif isinstance(p, Star):
            yield "star", Diamond(p.body, g)
            yield "star", Diamond(p.body, f)


def fl_trace(formulas) -> dict:
    """Closure with an audit trail.

    Maps each member to ``(rule, parent)``; members of the (desugared)
    input map to ``("given", None)``.  Insertion order is deterministic.
    """
    trace = {}
    queue = []
    for f in formulas:
        f = desugar(f)
        if f not in trace:
            trace[f] = ("given", None)
            queue.append(f)
    i = 0
    while i < len(queue):
        f = queue[i]
        i += 1
        for rule, g in _fl_steps(f):
            if g not in trace:
                trace[g] = (rule, f)
                queue.append(g)
    return trace


def fl_closure(formulas) -> frozenset:
    return frozenset(fl_trace(formulas))


def fl_pm(formulas) -> frozenset:
    fl = fl_closure(formulas)
    return fl | frozenset(Not(g) for g in fl)


# ---------------------------------------------------------------------------
# Random trees (test-harness generators)

def random_program(rng: random.Random, sig: Signature, depth: int = 3,
                   tests: bool = True, sugar: bool = True) -> Program:
    progs = sorted(sig.program_atoms)
    if depth <= 0 or rng.random() < 0.35:
        if progs:
            return AtomicProgram(rng.choice(progs))
        return Test(random_formula(rng, sig, 0, sugar))
    kind = rng.choice(("seq", "choice", "star", "test") if tests else ("seq", "choice", "star"))
    sub = lambda: random_program(rng, sig, depth - 1, tests, sugar)
    if kind == "seq":
        return Seq(sub(), sub())
    if kind == "choice":
        return Choice(sub(), sub())
    if kind == "star":
        return Star(sub())
    return Test(random_formula(rng, sig, depth - 1, sugar))


def random_formula(rng: random.Random, sig: Signature, depth: int = 3,
                   sugar: bool = True, dynamic: bool = True) -> Formula:
    """Random formula of depth at most ``depth`` over ``sig``.

    ``sugar=False`` restricts to the primitive basis; ``dynamic=False``
    produces dynamic-modal-free formulas.
    """
    atoms = sorted(sig.formula_atoms)
    if depth <= 0 or rng.random() < 0.2:
        if atoms and rng.random() < 0.9:
            return Atom(rng.choice(atoms))
        return BOTTOM
    kinds = ["not", "or", "gdia"]
    if sugar:
        kinds += ["and", "implies", "gbox"]
        if rng.random() < 0.15:
            kinds.append("iff")
    if dynamic and sig.program_atoms:
        kinds += ["dia", "dia"] + (["box"] if sugar else [])
    kind = rng.choice(kinds)
    sub = lambda: random_formula(rng, sig, depth - 1, sugar, dynamic)
    if kind == "not":
        return Not(sub())
    if kind == "or":
        return Or(sub(), sub())
    if kind == "and":
        return And(sub(), sub())
    if kind == "implies":
        return Implies(sub(), sub())
    if kind == "iff":
        return Iff(sub(), sub())
    if kind == "gdia":
        return GlobalDiamond(sub())
    if kind == "gbox":
        return GlobalBox(sub())
    prog = random_program(rng, sig, max(depth - 2, 0), sugar=sugar)
    return (Diamond if kind == "dia" else Box)(prog, sub())
