"""Tight credence bounds over a fixed frame by exact linear programming.

Every program valuation over the frame gets a weight variable.  Valuations
that agree on all formulas mentioned in a query are interchangeable, so they
are merged into one variable per truth profile.  Credence constraints are
turned into disjunctive normal form over literals ``P(g) >= q`` and
``P(g) < q``; each disjunct is one LP.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .decision import DEFAULT_CLOSURE_CAP, CapExceeded, decide_valid
from .kripke import Frame, ModelError, Relation, Valuation, extension, frame_from_dict
from .pedal import PedalModel
from .simplex import linprog_exact
from .syntax import (
    And, AtLeast, CAnd, CIff, CImplies, CNot, COr, Formula, Implies, Signature,
    credence_grounds, desugar, formula_signature, parse_credence, parse_formula,
)

__all__ = [
    "BoundsQuery", "BoundsResult", "enumerate_valuations", "truth_profile",
    "solve_bounds", "frechet_lower_bound", "credence_dnf", "query_from_dict",
    "load_query", "result_to_dict", "DEFAULT_VALUATION_CAP", "DEFAULT_DNF_CAP", "NOTION",
]

DEFAULT_VALUATION_CAP = 2 ** 20
DEFAULT_DNF_CAP = 64


@dataclass(frozen=True)
class BoundsQuery:
    frame: Frame
    state: int
    constraints: tuple
    query: Formula
    programs: frozenset = None  # defaults to the programs mentioned

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def program_atoms(self):
        if self.programs is not None:
            return sorted(self.programs)
        return sorted(formula_signature(self.query, *self.constraints).program_atoms)


@dataclass(frozen=True)
class BoundsResult:
    feasible: bool
    minimum: Fraction = None
    maximum: Fraction = None
    min_attained: bool = False
    max_attained: bool = False
    witness_min: PedalModel = field(default=None, repr=False)
    witness_max: PedalModel = field(default=None, repr=False)
    n_valuations: int = 0
    n_profiles: int = 0


def enumerate_valuations(frame: Frame, programs, cap: int = DEFAULT_VALUATION_CAP) -> list:
    """All assignments of a subset of rbox to each program, in binary-counter order.

    Bit ``k`` of the counter for program number ``i`` (sorted by name) is
    the ``k``-th rbox pair, sorted.
    """
    if isinstance(programs, Signature):
        programs = programs.program_atoms
    programs = sorted(programs)
    pairs = frame.rbox.pairs()
    width = len(pairs)
    count = 2 ** (width * len(programs))
    if count > cap:
        raise CapExceeded(f"valuation space has {count} elements, cap is {cap}")
    out = []
    for code in range(count):
        rels = {}
        for i, p in enumerate(programs):
            chunk = code >> (i * width)
            rels[p] = Relation.from_pairs(frame.n, [pairs[k] for k in range(width) if chunk >> k & 1])
        out.append(Valuation.of(rels))
    return out


def truth_profile(frame: Frame, state: int, g: Formula, vs: Sequence[Valuation]) -> tuple:
    g = desugar(g)
    return tuple(extension(frame.with_valuation(v), g) >> state & 1 for v in vs)


# ---------------------------------------------------------------------------
# Constraint normal form

def _nnf(cf, positive=True):
    """Yield DNF as a list of conjunctions of ``(formula, q, is_lower_bound)``."""
    t = type(cf)
    if t is AtLeast:
        return [[(cf.formula, cf.q, positive)]]
    if t is CNot:
        return _nnf(cf.body, not positive)
    if t is CImplies:
        return _nnf(COr(CNot(cf.left), cf.right), positive)
    if t is CIff:
        both = CAnd(cf.left, cf.right)
        neither = CAnd(CNot(cf.left), CNot(cf.right))
        return _nnf(COr(both, neither), positive)
    if t in (COr, CAnd):
        conj = (t is CAnd) == positive
        left, right = _nnf(cf.left, positive), _nnf(cf.right, positive)
        if conj:
            return [a + b for a in left for b in right]
        return left + right
    raise TypeError(f"not a credence formula: {cf!r}")


def credence_dnf(constraints, cap: int = DEFAULT_DNF_CAP) -> list:
    """DNF of the conjunction of ``constraints``; each literal is ``(g, q, lower)``."""
    disjuncts = [[]]
    for cf in constraints:
        parts = _nnf(cf)
        if len(disjuncts) * len(parts) > cap:
            raise CapExceeded(f"constraint DNF exceeds {cap} disjuncts")
        disjuncts = [a + b for a, b in product(disjuncts, parts)]
    return disjuncts


# ---------------------------------------------------------------------------
# Solving

def _profiles(q: BoundsQuery, cap):
    vs = enumerate_valuations(q.frame, q.program_atoms(), cap)
    formulas = [desugar(q.query)]
    for cf in q.constraints:
        for g in credence_grounds(cf):
            if desugar(g) not in formulas:
                formulas.append(desugar(g))
    cols = {}
    for k, v in enumerate(vs):
        m = q.frame.with_valuation(v)
        key = tuple(extension(m, g) >> q.state & 1 for g in formulas)
        cols.setdefault(key, []).append(k)
    keys = list(cols)
    reps = [vs[cols[key][0]] for key in keys]
    index = {g: i for i, g in enumerate(formulas)}
    return vs, keys, reps, index


def _solve_disjunct(lits, keys, index, objective, maximize):
    """``(value, attained, x)`` for one disjunct, or None when it is empty."""
    n = len(keys)
    closed_ub, closed_b, strict_rows, strict_b = [], [], [], []
    for g, r, lower in lits:
        row = [key[index[desugar(g)]] for key in keys]
        if lower:
            closed_ub.append([-a for a in row])
            closed_b.append(-r)
        else:
            strict_rows.append(row)
            strict_b.append(r)
    eq, eq_b = [[1] * n], [1]

    def slack_lp(extra_eq=(), extra_b=()):
        # max t with each strict row + t <= bound, t <= 1; strictly feasible iff t > 0
        a_ub = [row + [0] for row in closed_ub] + [row + [1] for row in strict_rows] + [[0] * n + [1]]
        b_ub = closed_b + strict_b + [1]
        a_eq = [row + [0] for row in list(eq) + list(extra_eq)]
        b_eq = eq_b + list(extra_b)
        res = linprog_exact([0] * n + [1], a_ub, b_ub, a_eq, b_eq, maximize=True)
        if res.status != "optimal" or res.value <= 0:
            return None
        return res.x[:n]

    if strict_rows and slack_lp() is None:
        return None
    res = linprog_exact(objective, closed_ub + strict_rows, closed_b + strict_b, eq, eq_b,
                        maximize=maximize)
    if res.status != "optimal":
        return None
    if not strict_rows:
        return res.value, True, res.x
    x = slack_lp([objective], [res.value])
    return (res.value, True, x) if x is not None else (res.value, False, None)


def _witness(frame, reps, x):
    return PedalModel.singletons(frame, [(v, w) for v, w in zip(reps, x) if w])


def solve_bounds(q: BoundsQuery, valuation_cap: int = DEFAULT_VALUATION_CAP,
                 dnf_cap: int = DEFAULT_DNF_CAP) -> BoundsResult:
    """Minimum and maximum of ``mu(state, query)`` over credence models on the frame.

    Bounds coming only from a closed boundary of a strict constraint are
    reported with ``*_attained = False`` and no witness.
    """
    vs, keys, reps, index = _profiles(q, valuation_cap)
    objective = [key[0] for key in keys]
    disjuncts = credence_dnf(q.constraints, dnf_cap)
    best = {}
    for maximize in (False, True):
        better = (lambda a, b: a > b) if maximize else (lambda a, b: a < b)
        cur = None
        for lits in disjuncts:
            got = _solve_disjunct(lits, keys, index, objective, maximize)
            if got is None:
                continue
            if cur is None or better(got[0], cur[0]) or (got[0] == cur[0] and got[1] and not cur[1]):
                cur = got
        best[maximize] = cur
    if best[False] is None:
        return BoundsResult(False, n_valuations=len(vs), n_profiles=len(keys))
    lo, hi = best[False], best[True]
    return BoundsResult(
        True, lo[0], hi[0], lo[1], hi[1],
        _witness(q.frame, reps, lo[2]) if lo[1] else None,
        _witness(q.frame, reps, hi[2]) if hi[1] else None,
        len(vs), len(keys))


def frechet_lower_bound(constraints, query: Formula, cap: int = DEFAULT_CLOSURE_CAP):
    """``max(0, sum r - (n - 1))`` when the constrained formulas jointly entail ``query``.

    ``constraints`` holds ``(formula, r)`` pairs or ``P(g) >= r`` credence
    atoms.  Returns None when the entailment is not valid.
    """
    pairs = [(c.formula, c.q) if isinstance(c, AtLeast) else (c[0], Fraction(c[1]))
             for c in constraints]
    target = query
    if pairs:
        premise = pairs[0][0]
        for g, _ in pairs[1:]:
            premise = And(premise, g)
        target = Implies(premise, query)
    if not decide_valid(target, cap):
        return None
    return max(Fraction(0), sum((r for _, r in pairs), Fraction(0)) - (len(pairs) - 1))


# ---------------------------------------------------------------------------
# JSON

def query_from_dict(d) -> BoundsQuery:
    if not isinstance(d, dict) or "frame" not in d:
        raise ModelError(["query file needs a 'frame' object"])
    frame = frame_from_dict(d["frame"])
    state = int(d.get("state", 0))
    if not 0 <= state < frame.n:
        raise ModelError([f"state {state} out of range"])
    constraints = [parse_credence(c) for c in d.get("constraints", [])]
    query = parse_formula(d["query"])
    programs = frozenset(d["programs"]) if "programs" in d else None
    return BoundsQuery(frame, state, constraints, query, programs)


def load_query(path) -> BoundsQuery:
    with open(path) as fh:
        try:
            return query_from_dict(json.load(fh))
        except json.JSONDecodeError as e:
            raise ModelError([f"invalid JSON: {e}"]) from None


# Optima range over credence models on the given frame only; a bound derivable
# in the calculus can be weaker than the fixed-frame minimum.
NOTION = "fixed-frame semantic optimum"


def result_to_dict(r: BoundsResult) -> dict:
    if not r.feasible:
        return {"min": "infeasible", "max": "infeasible", "notion": NOTION,
                "valuations": r.n_valuations, "profiles": r.n_profiles}
    return {"min": str(r.minimum), "minAttained": r.min_attained,
            "max": str(r.maximum), "maxAttained": r.max_attained, "notion": NOTION,
            "valuations": r.n_valuations, "profiles": r.n_profiles}
