"""Satisfiability and validity for PDL with a global box, via closure atoms.

An atom is a truth assignment to the Fischer-Ladner closure that is locally
coherent: Boolean connectives, the one-step unfoldings of ``;``, ``+``,
``?`` and ``*``, and ``g -> F g``.  Atoms whose diamond or global-diamond
demands cannot be met are then eliminated until nothing changes (Pratt-style
elimination).  The survivors are exactly the consistent atoms, and they form
the canonical model:

* two atoms are rbox-related iff they agree on every ``F g`` in the closure;
* ``(W, V)`` is a ``p``-edge iff they are rbox-related and every closure
  formula ``<p>g`` with ``g`` in ``V`` is in ``W``.

Consistency is decided semantically, which coincides with Hilbert-style
consistency because the proof system is sound and complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Sequence

from .kripke import KripkeModel, Relation, Valuation, _bits
from .syntax import (
    Atom as AtomFormula, AtomicProgram, Bottom, Choice, Diamond, Formula,
    GlobalDiamond, Not, Or, Seq, Star, Test, desugar, fl_trace, is_dmff,
)

__all__ = [
    "CapExceeded", "Atom", "AtomSpace", "Section", "atoms", "coherent_atoms",
    "decide_satisfiable", "decide_valid", "canonical_model", "dmff_class",
    "canonical_sections", "section_valuation", "Satisfiability",
    "DEFAULT_CLOSURE_CAP", "DEFAULT_SECTION_CAP",
]

DEFAULT_CLOSURE_CAP = 18
DEFAULT_SECTION_CAP = 10 ** 6


class CapExceeded(ValueError):
    """A configured size guard would be exceeded."""


@dataclass(frozen=True, eq=False)
class Atom:
    """A maximal consistent subset of the signed closure, stored as a bitmask."""

    bits: int
    space: "AtomSpace" = field(repr=False)

    def __contains__(self, f):
        return self.space.holds(self.bits, f)

    @property
    def members(self) -> frozenset:
        out = set()
        for i, g in enumerate(self.space.closure):
            out.add(g if self.bits >> i & 1 else Not(g))
        return frozenset(out)

    def __eq__(self, other):
        return isinstance(other, Atom) and self.bits == other.bits and self.space is other.space

    def __hash__(self):
        return hash(self.bits)

    def __str__(self):
        return "{" + ", ".join(sorted(map(str, self.members))) + "}"


def _branching(f):
    if isinstance(f, (AtomFormula, GlobalDiamond)):
        return True
    return isinstance(f, Diamond) and isinstance(f.program, (AtomicProgram, Star))


class AtomSpace:
    """Closure of a formula set, its coherent atoms, and the elimination result.

    ``cap`` bounds the number of closure formulas whose truth value is not
    fixed by the others (atoms, ``<p>g``, ``<pi*>g`` and ``F g``); the atom
    count is at most two to that power.
    """

    def __init__(self, formulas: Iterable[Formula], cap: int = DEFAULT_CLOSURE_CAP):
        self.given = [desugar(f) for f in formulas]
        self.trace = fl_trace(self.given)
        self.closure = tuple(self.trace)
        self.index = {f: i for i, f in enumerate(self.closure)}
        self.n_branching = sum(1 for f in self.closure if _branching(f))
        if self.n_branching > cap:
            raise CapExceeded(
                f"closure has {self.n_branching} independent formulas (|FL| = {len(self.closure)}), "
                f"cap is {cap}")
        self.coherent = self._enumerate()
        self._columns()
        self._program_tables()
        self.alive = self._eliminate()
        self.survivors = [k for k in _bits(self.alive)]

    # -- membership ------------------------------------------------------

    def holds(self, bits, f) -> bool:
        """Membership of a signed-closure formula in the atom ``bits``."""
        f = desugar(f)
        i = self.index.get(f)
        if i is not None:
            return bool(bits >> i & 1)
        if isinstance(f, Not) and f.body in self.index:
            return not bits >> self.index[f.body] & 1
        raise KeyError(f"{f} is not in the signed closure")

    # -- local coherence -------------------------------------------------

    def _rules(self):
        """Per closure formula: ('free',) or ('det', fn, deps); plus cross constraints."""
        ix = self.index
        rules, constraints = {}, []
        for f, i in ix.items():
            t = type(f)
            if t is Bottom:
                rules[i] = ((), lambda v: False)
            elif t is Not:
                j = ix[f.body]
                rules[i] = ((j,), lambda v, j=j: not v[j])
            elif t is Or:
                a, b = ix[f.left], ix[f.right]
                rules[i] = ((a, b), lambda v, a=a, b=b: v[a] or v[b])
            elif t is Diamond and isinstance(f.program, Seq):
                j = ix[Diamond(f.program.first, Diamond(f.program.second, f.body))]
                rules[i] = ((j,), lambda v, j=j: v[j])
            elif t is Diamond and isinstance(f.program, Choice):
                a = ix[Diamond(f.program.left, f.body)]
                b = ix[Diamond(f.program.right, f.body)]
                rules[i] = ((a, b), lambda v, a=a, b=b: v[a] or v[b])
            elif t is Diamond and isinstance(f.program, Test):
                a, b = ix[f.program.formula], ix[f.body]
                rules[i] = ((a, b), lambda v, a=a, b=b: v[a] and v[b])
            elif t is Diamond and isinstance(f.program, Star):
                g = ix[f.body]
                step = ix[Diamond(f.program.body, f)]
                constraints.append(((i, g, step), lambda v, i=i, g=g, s=step: v[i] == (v[g] or v[s])))
            elif t is GlobalDiamond:
                g = ix[f.body]
                constraints.append(((i, g), lambda v, i=i, g=g: v[i] or not v[g]))
        return rules, constraints

    def _enumerate(self):
        rules, constraints = self._rules()
        n = len(self.closure)
        order, state = [], {}

        def visit(i):
            if state.get(i) == 2:
                return
            if state.get(i) == 1:
                raise RuntimeError("cyclic closure dependencies")
            state[i] = 1
            for j in rules.get(i, ((), None))[0]:
                visit(j)
            state[i] = 2
            order.append(i)

        for i in range(n):
            visit(i)
        pos = {i: k for k, i in enumerate(order)}
        checks = [[] for _ in range(n)]
        for deps, fn in constraints:
            checks[max(pos[d] for d in deps)].append(fn)

        out = []
        v = [False] * n

        def go(k, bits):
            if k == n:
                out.append(bits)
                return
            i = order[k]
            rule = rules.get(i)
            options = (rule[1](v),) if rule else (False, True)
            for val in options:
                v[i] = val
                if all(fn(v) for fn in checks[k]):
                    go(k + 1, bits | (val << i))
            v[i] = False

        go(0, 0)
        return out

    # -- elimination -----------------------------------------------------

    def _columns(self):
        n = len(self.closure)
        cols = [0] * n
        for k, bits in enumerate(self.coherent):
            for i in _bits(bits):
                cols[i] |= 1 << k
        self.col = cols
        self.all = (1 << len(self.coherent)) - 1
        gd = [i for i, f in enumerate(self.closure) if isinstance(f, GlobalDiamond)]
        gd_mask = sum(1 << i for i in gd)
        self.box_key = [bits & gd_mask for bits in self.coherent]
        classes = {}
        for k, key in enumerate(self.box_key):
            classes[key] = classes.get(key, 0) | (1 << k)
        self.box_classes = classes

    def _program_tables(self):
        pairs = {}
        for i, f in enumerate(self.closure):
            if isinstance(f, Diamond) and isinstance(f.program, AtomicProgram):
                pairs.setdefault(f.program.name, []).append((i, self.index[f.body]))
        self.program_pairs = pairs
        self.rows = {}
        for p in pairs:
            self.rows[p] = self._edges(lambda k: k, p)

    def _edges(self, sigma, p):
        """Rows of the p-relation between coherent atoms, read through ``sigma``."""
        dia = sum(1 << d for d, _ in self.program_pairs.get(p, ()))
        body_bits = [(d, b) for d, b in self.program_pairs.get(p, ())]

        def body_mask(bits):
            return sum(1 << d for d, b in body_bits if bits >> b & 1)

        groups = {}
        for k, bits in enumerate(self.coherent):
            key = (self.box_key[sigma(k)], body_mask(self.coherent[sigma(k)]))
            groups[key] = groups.get(key, 0) | (1 << k)
        rows = []
        for k in range(len(self.coherent)):
            wb = self.coherent[sigma(k)]
            box, have = self.box_key[sigma(k)], wb & dia
            row = 0
            for (gbox, need), members in groups.items():
                if gbox == box and need & ~have == 0:
                    row |= members
            rows.append(row)
        return rows

    def _pre_atomic(self, p, targets, alive):
        rows = self.rows.get(p)
        out = 0
        for k in _bits(alive):
            if rows is None:
                # no <p>g in the closure: p may connect any rbox-related atoms
                hit = self.box_classes[self.box_key[k]] & targets
            else:
                hit = rows[k] & targets
            if hit:
                out |= 1 << k
        return out

    def _pre(self, prog, targets, alive):
        targets &= alive
        t = type(prog)
        if t is AtomicProgram:
            return self._pre_atomic(prog.name, targets, alive)
        if t is Seq:
            return self._pre(prog.first, self._pre(prog.second, targets, alive), alive)
        if t is Choice:
            return self._pre(prog.left, targets, alive) | self._pre(prog.right, targets, alive)
        if t is Test:
            return targets & self.col[self.index[prog.formula]]
        if t is Star:
            x = targets
            while True:
                nxt = x | self._pre(prog.body, x, alive)
                if nxt == x:
                    return x
                x = nxt
        raise TypeError(prog)

    def _pre_global(self, targets, alive):
        out = 0
        for key, members in self.box_classes.items():
            if members & targets & alive:
                out |= members
        return out & alive

    def _eliminate(self):
        alive = self.all
        demands = [(i, f) for i, f in enumerate(self.closure)
                   if isinstance(f, (Diamond, GlobalDiamond))]
        while True:
            bad = 0
            for i, f in demands:
                holders = self.col[i] & alive
                if not holders:
                    continue
                goal = self.col[self.index[f.body]] & alive
                if isinstance(f, Diamond):
                    ok = self._pre(f.program, goal, alive)
                else:
                    ok = self._pre_global(goal, alive)
                bad |= holders & ~ok
            if not bad:
                return alive
            alive &= ~bad

    # -- results ---------------------------------------------------------

    def atoms(self) -> list:
        return [Atom(self.coherent[k], self) for k in self.survivors]

    def coherent_atoms(self) -> list:
        return [Atom(bits, self) for bits in self.coherent]

    def formula_atoms(self):
        return sorted(f.name for f in self.closure if isinstance(f, AtomFormula))

    def program_atoms(self, extra=()):
        names = set(self.program_pairs) | set(extra)
        for f in self.closure:
            if isinstance(f, Diamond):
                stack = [f.program]
                while stack:
                    p = stack.pop()
                    if isinstance(p, AtomicProgram):
                        names.add(p.name)
                    elif isinstance(p, Seq):
                        stack.extend((p.first, p.second))
                    elif isinstance(p, Choice):
                        stack.extend((p.left, p.right))
                    elif isinstance(p, Star):
                        stack.append(p.body)
        return sorted(names)

    def _relation_on(self, keep, rows_of):
        pos = {k: n for n, k in enumerate(keep)}
        out = []
        for k in keep:
            row = rows_of(k)
            out.append(sum(1 << pos[j] for j in _bits(row) if j in pos))
        return Relation(len(keep), tuple(out))

    def rbox(self, keep=None) -> Relation:
        keep = self.survivors if keep is None else keep
        return self._relation_on(keep, lambda k: self.box_classes[self.box_key[k]])

    def program_relation(self, p, keep=None, sigma=None) -> Relation:
        keep = self.survivors if keep is None else keep
        if p not in self.program_pairs:
            return self.rbox(keep) if sigma is None else self._relation_on(
                keep, lambda k: self.box_classes[self.box_key[k]])
        rows = self.rows[p] if sigma is None else self._edges(sigma, p)
        return self._relation_on(keep, lambda k: rows[k])

    def model(self, keep=None, programs=()) -> KripkeModel:
        """Canonical model restricted to ``keep`` (coherent-atom indices, default all survivors)."""
        keep = self.survivors if keep is None else list(keep)
        pos = {k: n for n, k in enumerate(keep)}
        vf = {}
        for a in self.formula_atoms():
            i = self.index[AtomFormula(a)]
            vf[a] = frozenset(pos[k] for k in keep if self.coherent[k] >> i & 1)
        vp = {p: self.program_relation(p, keep) for p in self.program_atoms(programs)}
        return KripkeModel(len(keep), vf, Valuation.of(vp), self.rbox(keep))


def coherent_atoms(formulas, cap: int = DEFAULT_CLOSURE_CAP) -> list:
    """Locally coherent atoms, before elimination."""
    return AtomSpace(formulas, cap).coherent_atoms()


def atoms(formulas, cap: int = DEFAULT_CLOSURE_CAP) -> list:
    """The consistent atoms of the signed closure of ``formulas``."""
    return AtomSpace(formulas, cap).atoms()


@dataclass(frozen=True)
class Satisfiability:
    satisfiable: bool
    witness: KripkeModel = None
    state: int = None

    def __iter__(self):
        return iter((self.satisfiable, self.witness))

    def __bool__(self):
        return self.satisfiable


def decide_satisfiable(f: Formula, cap: int = DEFAULT_CLOSURE_CAP) -> Satisfiability:
    """Decide satisfiability; a witness is the canonical model cut down to one rbox class."""
    space = AtomSpace([f], cap)
    i = space.index[desugar(f)]
    hits = [k for k in space.survivors if space.coherent[k] >> i & 1]
    if not hits:
        return Satisfiability(False)
    w = hits[0]
    cls = space.box_classes[space.box_key[w]] & space.alive
    keep = list(_bits(cls))
    return Satisfiability(True, space.model(keep), keep.index(w))


def decide_valid(f: Formula, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    return not decide_satisfiable(Not(f), cap).satisfiable


def canonical_model(formulas, cap: int = DEFAULT_CLOSURE_CAP):
    """``(model, atoms)``: the canonical model whose state ``i`` is ``atoms[i]``."""
    space = AtomSpace(formulas, cap)
    return space.model(), space.atoms()


# ---------------------------------------------------------------------------
# Sections

def _dmff_mask(space):
    return sum(1 << i for i, f in enumerate(space.closure) if is_dmff(f))


def dmff_class(w: Atom, among: Sequence[Atom]) -> list:
    """Members of ``among`` containing exactly the same dmffs as ``w``."""
    mask = _dmff_mask(w.space)
    return [v for v in among if v.bits & mask == w.bits & mask]


def _classes(among):
    mask = _dmff_mask(among[0].space) if among else 0
    groups = {}
    for n, a in enumerate(among):
        groups.setdefault(a.bits & mask, []).append(n)
    return list(groups.values())


@dataclass(frozen=True)
class Section:
    """A dmff-class-preserving self-map on atom positions ``0..n-1``."""

    mapping: tuple

    def __call__(self, i):
        return self.mapping[i]

    def inverse(self) -> "Section":
        inv = [None] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        if None in inv:
            raise ValueError("section is not a bijection")
        return Section(tuple(inv))

    def is_canonical(self, among) -> bool:
        for cls in _classes(among):
            if sorted(self.mapping[i] for i in cls) != cls:
                return False
        return True


def canonical_sections(among: Sequence[Atom], cap: int = DEFAULT_SECTION_CAP) -> list:
    """Every section that permutes each dmff class; products of per-class permutations."""
    classes = _classes(among)
    count = math.prod(math.factorial(len(c)) for c in classes)
    if count > cap:
        raise CapExceeded(f"{count} canonical sections, cap is {cap}")
    out = []
    for choice in product(*(permutations(c) for c in classes)):
        m = [None] * len(among)
        for cls, image in zip(classes, choice):
            for i, j in zip(cls, image):
                m[i] = j
        out.append(Section(tuple(m)))
    return out


def section_valuation(sigma: Section, among: Sequence[Atom]) -> Valuation:
    """``v_sigma(p) = {(W1, W2) : (sigma W1, sigma W2) is a canonical p-edge}``."""
    space = among[0].space
    keep = [space.coherent.index(a.bits) for a in among]
    canon = {p: space.program_relation(p, keep) for p in space.program_atoms()}
    out = {}
    for p, rel in canon.items():
        out[p] = Relation.from_pairs(len(among), [
            (i, j) for i in range(len(among)) for j in range(len(among))
            if (sigma(i), sigma(j)) in rel])
    return Valuation.of(out)
