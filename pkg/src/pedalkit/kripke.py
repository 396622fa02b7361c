"""Finite Kripke models with a global equivalence relation.

States are ``0..n-1``.  A :class:`Relation` is a dense boolean matrix packed
as one integer bitmask per row, which keeps composition and star exact and
cheap at the sizes this package works with.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Mapping

from .syntax import (
    Atom, Bottom, Choice, Diamond, Formula, GlobalDiamond, Not, Or, Program,
    AtomicProgram, Seq, Signature, Star, Test, desugar, desugar_program,
)

__all__ = [
    "Relation", "Valuation", "Frame", "KripkeModel", "ModelError",
    "star_closure", "denote", "extension", "satisfies", "valid_on",
    "validate_model", "validate_frame", "random_model", "random_partition",
    "load_model", "model_from_dict", "model_to_dict", "frame_from_dict",
    "frame_to_dict", "relation_from_json",
]


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Relation:
    """Binary relation on ``range(n)``; ``rows[i]`` has bit ``j`` set iff (i, j) is in it."""

    n: int
    rows: tuple

    @classmethod
    def from_pairs(cls, n, pairs) -> "Relation":
        rows = [0] * n
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"pair ({i}, {j}) outside states 0..{n - 1}")
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n):
        return cls(n, (0,) * n)

    @classmethod
    def identity(cls, n):
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def universal(cls, n):
        return cls(n, ((1 << n) - 1,) * n)

    def pairs(self):
        return [(i, j) for i, row in enumerate(self.rows) for j in _bits(row)]

    def __contains__(self, pair):
        i, j = pair
        return bool(self.rows[i] >> j & 1)

    def __len__(self):
        return sum(bin(r).count("1") for r in self.rows)

    def __or__(self, other):
        return Relation(self.n, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __and__(self, other):
        return Relation(self.n, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def issubset(self, other):
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def compose(self, other) -> "Relation":
        """``self`` then ``other``."""
        out = []
        for row in self.rows:
            acc = 0
            for j in _bits(row):
                acc |= other.rows[j]
            out.append(acc)
        return Relation(self.n, tuple(out))

    def preimage(self, targets: int) -> int:
        """States with at least one successor in the ``targets`` bitmask."""
        m = 0
        for i, row in enumerate(self.rows):
            if row & targets:
                m |= 1 << i
        return m

    def image(self, sources: int) -> int:
        m = 0
        for i in _bits(sources):
            m |= self.rows[i]
        return m

    def restrict(self, keep) -> "Relation":
        """Sub-relation on the listed states, renumbered in list order."""
        keep = list(keep)
        out = []
        for i in keep:
            row = self.rows[i]
            out.append(sum(1 << k for k, j in enumerate(keep) if row >> j & 1))
        return Relation(len(keep), tuple(out))

    def is_reflexive(self):
        return all(row >> i & 1 for i, row in enumerate(self.rows))

    def is_symmetric(self):
        return all(self.rows[j] >> i & 1 for i, j in self.pairs())

    def is_transitive(self):
        return self.compose(self).issubset(self)


def star_closure(r: Relation, states=None) -> Relation:
    """Reflexive-transitive closure by squaring ``I | r`` until it stops growing."""
    if states is not None and len(states) != r.n:
        raise ValueError("relation and state set disagree in size")
    cur = r | Relation.identity(r.n)
    while True:
        nxt = cur.compose(cur)
        if nxt == cur:
            return cur
        cur = nxt


@dataclass(frozen=True)
class Valuation:
    """Total assignment of relations to atomic programs, kept as sorted pairs."""

    items: tuple

    @classmethod
    def of(cls, mapping: Mapping[str, Relation]) -> "Valuation":
        return cls(tuple(sorted(mapping.items())))

    def __getitem__(self, name):
        for k, r in self.items:
            if k == name:
                return r
        raise KeyError(name)

    def get(self, name, default=None):
        for k, r in self.items:
            if k == name:
                return r
        return default

    def names(self):
        return [k for k, _ in self.items]

    def as_dict(self):
        return dict(self.items)


@dataclass(frozen=True)
class Frame:
    """States, atomic-formula valuation and the global equivalence relation."""

    n: int
    vf: Mapping[str, frozenset] = field(hash=False)
    rbox: Relation

    @property
    def states(self):
        return range(self.n)

    def with_valuation(self, vp) -> "KripkeModel":
        if not isinstance(vp, Valuation):
            vp = Valuation.of(vp)
        return KripkeModel(self.n, self.vf, vp, self.rbox)


@dataclass(frozen=True)
class KripkeModel:
    n: int
    vf: Mapping[str, frozenset] = field(hash=False)
    vp: Valuation
    rbox: Relation

    @property
    def states(self):
        return range(self.n)

    @property
    def frame(self) -> Frame:
        return Frame(self.n, self.vf, self.rbox)

    @property
    def signature(self) -> Signature:
        return Signature(self.vf, self.vp.names())


class ModelError(ValueError):
    """A model or model file that fails validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def validate_frame(frame) -> list:
    violations = []
    if frame.n < 1:
        violations.append("state set is empty")
    r = frame.rbox
    if r.n != frame.n:
        violations.append(f"rbox is over {r.n} states, model has {frame.n}")
        return violations
    for i in range(r.n):
        if not r.rows[i] >> i & 1:
            violations.append(f"rbox not reflexive at {i}")
    for i, j in r.pairs():
        if not r.rows[j] >> i & 1:
            violations.append(f"rbox not symmetric at ({i}, {j})")
    for i, k in r.compose(r).pairs():
        if not r.rows[i] >> k & 1:
            violations.append(f"rbox not transitive at ({i}, {k})")
    for a, states in frame.vf.items():
        bad = [s for s in states if not 0 <= s < frame.n]
        if bad:
            violations.append(f"vf({a}) mentions unknown states {bad}")
    return violations


def validate_model(m: KripkeModel) -> list:
    """Violated model conditions; empty when ``m`` is a valid model."""
    violations = validate_frame(m)
    if any(v.startswith("rbox is over") for v in violations):
        return violations
    for p, rel in m.vp.items:
        if rel.n != m.n:
            violations.append(f"v_p({p}) is over {rel.n} states, model has {m.n}")
            continue
        outside = [pair for pair in rel.pairs() if pair not in m.rbox]
        if outside:
            violations.append(f"v_p({p}) not contained in rbox: {outside}")
    return violations


# ---------------------------------------------------------------------------
# Semantics

def _ext(m, f, cache):
    t = type(f)
    if t is Atom:
        return sum(1 << s for s in m.vf.get(f.name, ()))
    if t is Bottom:
        return 0
    if t is Not:
        return ((1 << m.n) - 1) & ~_ext(m, f.body, cache)
    if t is Or:
        return _ext(m, f.left, cache) | _ext(m, f.right, cache)
    if t is Diamond:
        return _den(m, f.program, cache).preimage(_ext(m, f.body, cache))
    if t is GlobalDiamond:
        return m.rbox.preimage(_ext(m, f.body, cache))
    raise TypeError(f"not a primitive formula: {f!r}")


def _den(m, p, cache):
    hit = cache.get(p)
    if hit is not None:
        return hit
    t = type(p)
    if t is AtomicProgram:
        r = m.vp.get(p.name)
        if r is None:
            r = Relation.empty(m.n)
    elif t is Seq:
        r = _den(m, p.first, cache).compose(_den(m, p.second, cache))
    elif t is Choice:
        r = _den(m, p.left, cache) | _den(m, p.right, cache)
    elif t is Star:
        r = star_closure(_den(m, p.body, cache))
    elif t is Test:
        ext = _ext(m, p.formula, cache)
        r = Relation(m.n, tuple((1 << s) if ext >> s & 1 else 0 for s in range(m.n)))
    else:
        raise TypeError(f"not a program: {p!r}")
    cache[p] = r
    return r


def denote(pi: Program, m: KripkeModel) -> Relation:
    """Transition relation of ``pi`` in ``m``."""
    return _den(m, desugar_program(pi), {})


def extension(m: KripkeModel, f: Formula) -> int:
    """Bitmask of the states where ``f`` holds."""
    return _ext(m, desugar(f), {})


def satisfies(m: KripkeModel, s: int, f: Formula) -> bool:
    return bool(extension(m, f) >> s & 1)


def valid_on(m: KripkeModel, f: Formula) -> bool:
    return extension(m, f) == (1 << m.n) - 1


# ---------------------------------------------------------------------------
# Generators

def random_partition(rng, n):
    """Block label per state; the equivalence it induces is the rbox."""
    labels = []
    for i in range(n):
        labels.append(rng.randrange(max(labels, default=-1) + 2))
    return labels


def random_model(seed, n_states: int, sig: Signature, density: float = 0.3) -> KripkeModel:
    """Deterministic random model; program edges are drawn inside the rbox."""
    if n_states < 1:
        raise ValueError("a model needs at least one state")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    labels = random_partition(rng, n_states)
    rbox = Relation.from_pairs(n_states, [(i, j) for i in range(n_states)
                                          for j in range(n_states) if labels[i] == labels[j]])
    vf = {a: frozenset(s for s in range(n_states) if rng.random() < 0.5)
          for a in sorted(sig.formula_atoms)}
    vp = {p: Relation.from_pairs(n_states, [pair for pair in rbox.pairs() if rng.random() < density])
          for p in sorted(sig.program_atoms)}
    return KripkeModel(n_states, vf, Valuation.of(vp), rbox)


# ---------------------------------------------------------------------------
# JSON model files

def relation_from_json(data, n) -> Relation:
    if data == "universal":
        return Relation.universal(n)
    if data == "identity":
        return Relation.identity(n)
    return Relation.from_pairs(n, [tuple(pair) for pair in data])


def frame_from_dict(d) -> Frame:
    try:
        n = int(d["states"])
        vf = {a: frozenset(int(s) for s in states) for a, states in d.get("vf", {}).items()}
        rbox = relation_from_json(d.get("rbox", "universal"), n)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError([f"malformed frame: {e}"]) from None
    frame = Frame(n, vf, rbox)
    violations = validate_frame(frame)
    if violations:
        raise ModelError(violations)
    return frame


def model_from_dict(d) -> KripkeModel:
    """Build and validate a model from the JSON schema; invalid input raises :class:`ModelError`."""
    frame = frame_from_dict(d)
    try:
        vp = {p: relation_from_json(pairs, frame.n) for p, pairs in d.get("vp", {}).items()}
    except (TypeError, ValueError) as e:
        raise ModelError([f"malformed vp: {e}"]) from None
    m = frame.with_valuation(vp)
    violations = validate_model(m)
    if violations:
        raise ModelError(violations)
    return m


def frame_to_dict(frame) -> dict:
    return {
        "states": frame.n,
        "vf": {a: sorted(states) for a, states in sorted(frame.vf.items())},
        "rbox": ("universal" if frame.rbox == Relation.universal(frame.n)
                 else [list(p) for p in frame.rbox.pairs()]),
    }


def model_to_dict(m: KripkeModel) -> dict:
    d = frame_to_dict(m)
    d["vp"] = {p: [list(pair) for pair in r.pairs()] for p, r in m.vp.items}
    return d


def load_model(path) -> KripkeModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelError([f"invalid JSON: {e}"]) from None
    return model_from_dict(data)
