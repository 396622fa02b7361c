"""The two-state program-specification example.

Two states ``s = 0`` and ``t = 1`` under a universal equivalence; ``A`` and
``C`` hold at ``s`` only, ``B`` and ``D`` at ``t`` only.  Three program
valuations:

* ``v1``: ``p`` goes s->t, ``q`` loops at s
* ``v2``: ``p`` and ``q`` both go s->t
* ``v3``: ``q`` goes s->t, ``p`` loops at s

The published weights (2/5, 2/5, 1/5 on v1, v2, v3) give credence 4/5 to the
first specification, not the 3/5 claimed alongside them.  The weights
(2/5, 1/5, 2/5) reproduce all three claimed credences, so they are the
default here; :data:`LITERAL_WEIGHTS` keeps the published reading.
"""

from fractions import Fraction

from .kripke import Frame, Relation, Valuation
from .pedal import PedalModel
from .syntax import parse_credence, parse_formula

S, T = 0, 1

FRAME = Frame(2, {"A": frozenset({S}), "C": frozenset({S}),
                  "B": frozenset({T}), "D": frozenset({T})},
              Relation.universal(2))


def _val(p, q):
    return Valuation.of({"p": Relation.from_pairs(2, p), "q": Relation.from_pairs(2, q)})


V1 = _val([(S, T)], [(S, S)])
V2 = _val([(S, T)], [(S, T)])
V3 = _val([(S, S)], [(S, T)])
VALUATIONS = (V1, V2, V3)

SPEC_P = parse_formula("G(A -> [p]B)")
SPEC_Q = parse_formula("G(C -> [q]D)")
COMBINED = parse_formula("G [(?A;p)+(?C;q)](B|D)")

CONSTRAINTS = (parse_credence("P(G(A -> [p]B)) >= 3/5"),
               parse_credence("P(G(C -> [q]D)) >= 3/5"))

CORRECTED_WEIGHTS = (Fraction(2, 5), Fraction(1, 5), Fraction(2, 5))
LITERAL_WEIGHTS = (Fraction(2, 5), Fraction(2, 5), Fraction(1, 5))


def model(weights=CORRECTED_WEIGHTS) -> PedalModel:
    return PedalModel.singletons(FRAME, zip(VALUATIONS, weights))
