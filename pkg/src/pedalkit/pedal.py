"""Credence models over program valuations and the measure they induce.

A :class:`PedalModel` is a frame plus finitely many listed cells of program
valuations with rational weights.  Every valuation not listed belongs to one
implicit "everything else" cell.  That cell is infinite in general, so it
must carry weight 0.  Valuations inside a cell share the cell's weight
uniformly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .kripke import (
    Frame, ModelError, Relation, Valuation, extension, frame_from_dict,
    frame_to_dict, random_partition, relation_from_json, validate_frame,
)
from .syntax import (
    AtLeast, CAnd, CIff, CImplies, CNot, COr, CredenceFormula, Formula,
    Signature, desugar, parse_rational,
)

__all__ = [
    "Cell", "PedalModel", "validate_pedal", "point_mass", "measure_set",
    "mu", "satisfies_credence", "valid_credence", "random_pedal_model",
    "random_valuation", "load_pedal", "pedal_from_dict", "pedal_to_dict",
]


@dataclass(frozen=True)
class Cell:
    valuations: tuple
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "valuations", tuple(self.valuations))
        object.__setattr__(self, "weight", Fraction(self.weight))


@dataclass(frozen=True)
class PedalModel:
    frame: Frame
    cells: tuple
    rest_weight: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "rest_weight", Fraction(self.rest_weight))

    @classmethod
    def singletons(cls, frame, weighted: Iterable) -> "PedalModel":
        """One singleton cell per ``(valuation, weight)`` pair."""
        return cls(frame, [Cell([v], w) for v, w in weighted])

    def supported(self):
        """``(valuation, point mass)`` for every valuation with nonzero mass."""
        for cell in self.cells:
            if cell.weight and cell.valuations:
                share = cell.weight / len(cell.valuations)
                for v in cell.valuations:
                    yield v, share

    def model(self, v):
        """The Kripke model of the frame under valuation ``v`` (shares the frame's data)."""
        return self.frame.with_valuation(v)


def validate_pedal(pm: PedalModel) -> list:
    """Violated conditions; empty when ``pm`` is a valid credence model."""
    violations = validate_frame(pm.frame)
    seen = {}
    for ci, cell in enumerate(pm.cells):
        if cell.weight < 0:
            violations.append(f"cell {ci} has negative weight {cell.weight}")
        if cell.weight and not cell.valuations:
            violations.append(f"cell {ci} is empty but has weight {cell.weight}")
        for v in cell.valuations:
            if v in seen:
                where = "twice in" if seen[v] == ci else f"in cells {seen[v]} and"
                violations.append(f"valuation listed {where} cell {ci}")
            seen[v] = ci
            for p, rel in v.items:
                if rel.n != pm.frame.n or not rel.issubset(pm.frame.rbox):
                    violations.append(f"cell {ci}: v_p({p}) not contained in rbox")
    total = sum((c.weight for c in pm.cells), Fraction(0)) + pm.rest_weight
    if total != 1:
        violations.append(f"weights sum to {total}")
    if pm.rest_weight != 0:
        violations.append(
            f"implicit rest cell has weight {pm.rest_weight}; it is infinite and must have weight 0")
    return violations


def point_mass(pm: PedalModel, v: Valuation) -> Fraction:
    for cell in pm.cells:
        if v in cell.valuations:
            return cell.weight / len(cell.valuations)
    return Fraction(0)


def measure_set(pm: PedalModel, vs) -> Fraction:
    """Mass of a finite set of valuations.

    Computed twice, as a sum of point masses and as a cell-wise
    proportional sum; the two must agree exactly.
    """
    vs = set(vs)
    by_points = sum((point_mass(pm, v) for v in vs), Fraction(0))
    by_cells = Fraction(0)
    for cell in pm.cells:
        if cell.weight:
            hit = sum(1 for v in cell.valuations if v in vs)
            by_cells += cell.weight * Fraction(hit, len(cell.valuations))
    if by_points != by_cells:
        raise ArithmeticError(f"measure mismatch: {by_points} != {by_cells}")
    return by_points


def mu(pm: PedalModel, s: int, g: Formula) -> Fraction:
    """Credence that ``g`` holds at state ``s``."""
    g = desugar(g)
    total = Fraction(0)
    for v, share in pm.supported():
        if extension(pm.model(v), g) >> s & 1:
            total += share
    return total


def satisfies_credence(pm: PedalModel, s: int, cf: CredenceFormula, _cache=None) -> bool:
    cache = {} if _cache is None else _cache
    t = type(cf)
    if t is AtLeast:
        key = cf.formula
        if key not in cache:
            cache[key] = mu(pm, s, cf.formula)
        return cache[key] >= cf.q
    go = lambda x: satisfies_credence(pm, s, x, cache)
    if t is CNot:
        return not go(cf.body)
    if t is COr:
        return go(cf.left) or go(cf.right)
    if t is CAnd:
        return go(cf.left) and go(cf.right)
    if t is CImplies:
        return (not go(cf.left)) or go(cf.right)
    if t is CIff:
        return go(cf.left) == go(cf.right)
    raise TypeError(f"not a credence formula: {cf!r}")


def valid_credence(pm: PedalModel, cf: CredenceFormula) -> bool:
    """True at every state of ``pm``."""
    return all(satisfies_credence(pm, s, cf) for s in pm.frame.states)


# ---------------------------------------------------------------------------
# Generators

def random_valuation(rng, frame, programs, density=0.4) -> Valuation:
    pairs = frame.rbox.pairs()
    return Valuation.of({p: Relation.from_pairs(frame.n, [x for x in pairs if rng.random() < density])
                         for p in sorted(programs)})


def random_pedal_model(seed, n_states: int, sig: Signature, n_valuations: int = 6,
                       n_cells: int = 3, density: float = 0.4) -> PedalModel:
    """Random valid credence model with up to ``n_valuations`` distinct supported valuations."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    labels = random_partition(rng, n_states)
    rbox = Relation.from_pairs(n_states, [(i, j) for i in range(n_states)
                                          for j in range(n_states) if labels[i] == labels[j]])
    vf = {a: frozenset(s for s in range(n_states) if rng.random() < 0.5)
          for a in sorted(sig.formula_atoms)}
    frame = Frame(n_states, vf, rbox)
    vals = []
    for _ in range(n_valuations):
        v = random_valuation(rng, frame, sig.program_atoms, density)
        if v not in vals:
            vals.append(v)
    rng.shuffle(vals)
    k = min(n_cells, len(vals))
    cuts = sorted(rng.sample(range(1, len(vals)), k - 1)) if k > 1 else []
    groups = [vals[a:b] for a, b in zip([0] + cuts, cuts + [len(vals)])]
    raw = [rng.randint(0, 6) for _ in groups]
    if not any(raw):
        raw[0] = 1
    total = sum(raw)
    return PedalModel(frame, [Cell(g, Fraction(w, total)) for g, w in zip(groups, raw)])


# ---------------------------------------------------------------------------
# JSON

def _valuation_from_json(d, n) -> Valuation:
    return Valuation.of({p: relation_from_json(pairs, n) for p, pairs in d.items()})


def pedal_from_dict(d) -> PedalModel:
    """Build and validate a credence model from the JSON schema."""
    frame = frame_from_dict(d)
    try:
        cells = [Cell([_valuation_from_json(v, frame.n) for v in c["valuations"]],
                      parse_rational(c["weight"]))
                 for c in d["cells"]]
        rest = parse_rational(d.get("rest", "0"))
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError([f"malformed cells: {e}"]) from None
    pm = PedalModel(frame, cells, rest)
    violations = validate_pedal(pm)
    if violations:
        raise ModelError(violations)
    return pm


def pedal_to_dict(pm: PedalModel) -> dict:
    d = frame_to_dict(pm.frame)
    d["cells"] = [{"weight": str(c.weight),
                   "valuations": [{p: [list(x) for x in r.pairs()] for p, r in v.items}
                                  for v in c.valuations]}
                  for c in pm.cells]
    return d


def load_pedal(path) -> PedalModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelError([f"invalid JSON: {e}"]) from None
    return pedal_from_dict(data)
