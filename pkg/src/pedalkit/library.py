"""Curated proof scripts for derived rules, replayed by :func:`derived_rule_suite`.

No script uses R3.  Deduction-theorem steps are spelled out as explicit
modus ponens chains, and no script has unused lines or repeated statements.
"""

from .proofcheck import PDL, PEDAL, check_proof_dict


def _ax(stmt, sid):
    return {"stmt": stmt, "just": {"axiom": sid}}


def _mp(stmt, i, j):
    return {"stmt": stmt, "just": {"mp": [i, j]}}


def _prem(stmt):
    return {"stmt": stmt, "just": {"premise": True}}


LIBRARY = {
    "r2 on a tautology": {"system": PEDAL, "lines": [
        {"stmt": "P(a | ~a) = 1", "just": {"r2": "semantic"}},
    ]},
    "r2 with an embedded proof": {"system": PEDAL, "lines": [
        {"stmt": "P(G a -> a) = 1", "just": {"r2": {"lines": [_ax("G a -> a", "GT")]}}},
    ]},
    "lower-bound monotonicity": {"system": PEDAL, "lines": [
        _ax("P(a) < 1/2 -> P(a) <= 1/2", "A5"),
        _ax("P(a) <= 1/2 -> P(a) < 3/5", "A4"),
        _ax("(P(a) < 1/2 -> P(a) <= 1/2) -> ((P(a) <= 1/2 -> P(a) < 3/5)"
            " -> (P(a) >= 3/5 -> P(a) >= 1/2))", "A1"),
        _mp("(P(a) <= 1/2 -> P(a) < 3/5) -> (P(a) >= 3/5 -> P(a) >= 1/2)", 1, 3),
        _mp("P(a) >= 3/5 -> P(a) >= 1/2", 2, 4),
    ]},
    "upper-bound monotonicity": {"system": PEDAL, "lines": [
        _ax("P(<p>a) <= 1/3 -> P(<p>a) < 1/2", "A4"),
        _ax("P(<p>a) < 1/2 -> P(<p>a) <= 1/2", "A5"),
        _ax("(P(<p>a) <= 1/3 -> P(<p>a) < 1/2) -> ((P(<p>a) < 1/2 -> P(<p>a) <= 1/2)"
            " -> (P(<p>a) <= 1/3 -> P(<p>a) <= 1/2))", "A1"),
        _mp("(P(<p>a) < 1/2 -> P(<p>a) <= 1/2) -> (P(<p>a) <= 1/3 -> P(<p>a) <= 1/2)", 1, 3),
        _mp("P(<p>a) <= 1/3 -> P(<p>a) <= 1/2", 2, 4),
    ]},
    "complement bound": {"system": PEDAL, "lines": [
        _ax("P(G(A -> [p]B)) >= 3/5 -> P(~G(A -> [p]B)) <= 2/5", "A1"),
    ]},
    "nonnegativity": {"system": PEDAL, "lines": [
        _ax("P(<p*>a) >= 0", "A2"),
    ]},
    "dmff zero-one": {"system": PEDAL, "lines": [
        _ax("P(G a -> F b) = 1 | P(G a -> F b) = 0", "A3"),
    ]},
    "finite additivity, n = 2": {"system": PEDAL, "lines": [
        _prem("P(a & b) = 0"),
        _prem("P(a) >= 1/3"),
        _prem("P(b) >= 1/4"),
        _ax("((P(a) >= 1/3 & P(b) >= 1/4) & P(a & b) = 0) -> P(a | b) >= 7/12", "A6"),
        _ax("(((P(a) >= 1/3 & P(b) >= 1/4) & P(a & b) = 0) -> P(a | b) >= 7/12)"
            " -> (P(a) >= 1/3 -> (P(b) >= 1/4 -> (P(a & b) = 0 -> P(a | b) >= 7/12)))", "A1"),
        _mp("P(a) >= 1/3 -> (P(b) >= 1/4 -> (P(a & b) = 0 -> P(a | b) >= 7/12))", 4, 5),
        _mp("P(b) >= 1/4 -> (P(a & b) = 0 -> P(a | b) >= 7/12)", 2, 6),
        _mp("P(a & b) = 0 -> P(a | b) >= 7/12", 3, 7),
        _mp("P(a | b) >= 7/12", 1, 8),
    ]},
    "subadditivity": {"system": PEDAL, "lines": [
        _prem("P(a) <= 1/5"),
        _prem("P(b) < 3/10"),
        _ax("(P(a) <= 1/5 & P(b) < 3/10) -> P(a | b) < 1/2", "A7"),
        _ax("((P(a) <= 1/5 & P(b) < 3/10) -> P(a | b) < 1/2)"
            " -> (P(a) <= 1/5 -> (P(b) < 3/10 -> P(a | b) < 1/2))", "A1"),
        _mp("P(a) <= 1/5 -> (P(b) < 3/10 -> P(a | b) < 1/2)", 3, 4),
        _mp("P(b) < 3/10 -> P(a | b) < 1/2", 1, 5),
        _mp("P(a | b) < 1/2", 2, 6),
    ]},
    "test diamond": {"system": PDL, "lines": [
        _ax("[?a]~b <-> (a -> ~b)", "Test"),
        _ax("([?a]~b <-> (a -> ~b)) -> (<?a>b <-> a & b)", "Taut"),
        _mp("<?a>b <-> a & b", 1, 2),
    ]},
    "choice diamond": {"system": PDL, "lines": [
        _ax("[p+q]~a <-> [p]~a & [q]~a", "Choice"),
        _ax("([p+q]~a <-> [p]~a & [q]~a) -> (<p+q>a <-> <p>a | <q>a)", "Taut"),
        _mp("<p+q>a <-> <p>a | <q>a", 1, 2),
    ]},
    "star diamond": {"system": PDL, "lines": [
        _ax("(~a & [p][p*]~a) <-> [p*]~a", "Star"),
        _ax("((~a & [p][p*]~a) <-> [p*]~a) -> (<p*>a <-> a | <p><p*>a)", "Taut"),
        _mp("<p*>a <-> a | <p><p*>a", 1, 2),
    ]},
    "diamond over disjunction": {"system": PDL, "lines": [
        _ax("[p](~a & ~b) <-> [p]~a & [p]~b", "BoxAnd"),
        _ax("([p](~a & ~b) <-> [p]~a & [p]~b) -> (<p>(a | b) <-> <p>a | <p>b)", "Taut"),
        _mp("<p>(a | b) <-> <p>a | <p>b", 1, 2),
    ]},
    "one step implies star": {"system": PDL, "lines": [
        _ax("(~a & [p][p*]~a) <-> [p*]~a", "Star"),
        _ax("((~a & [p][p*]~a) <-> [p*]~a) -> (~<p*>a -> ~a)", "Taut"),
        _mp("~<p*>a -> ~a", 1, 2),
        {"stmt": "[p](~<p*>a -> ~a)", "just": {"nec": 3, "program": "p"}},
        _ax("[p](~<p*>a -> ~a) -> ([p]~<p*>a -> [p]~a)", "K"),
        _mp("[p]~<p*>a -> [p]~a", 4, 5),
        _ax("((~a & [p][p*]~a) <-> [p*]~a) -> (([p]~<p*>a -> [p]~a) -> (<p>a -> <p*>a))", "Taut"),
        _mp("([p]~<p*>a -> [p]~a) -> (<p>a -> <p*>a)", 1, 7),
        _mp("<p>a -> <p*>a", 6, 8),
    ]},
    "sequence diamond": {"system": PDL, "lines": [
        _ax("[p;q]~a <-> [p][q]~a", "Seq"),
        _ax("([p;q]~a <-> [p][q]~a) -> (<p;q>a <-> <p><q>a)", "Taut"),
        _mp("<p;q>a <-> <p><q>a", 1, 2),
    ]},
    "global box implies global diamond": {"system": PDL, "lines": [
        _ax("G a -> a", "GT"),
        _ax("G ~a -> ~a", "GT"),
        _ax("(G a -> a) -> ((G ~a -> ~a) -> (G a -> F a))", "Taut"),
        _mp("(G ~a -> ~a) -> (G a -> F a)", 1, 3),
        _mp("G a -> F a", 2, 4),
    ]},
    "necessitation of a tautology": {"system": PDL, "lines": [
        _ax("a | ~a", "Taut"),
        {"stmt": "[p](a | ~a)", "just": {"nec": 1, "program": "p"}},
        {"stmt": "G [p](a | ~a)", "just": {"nec_global": 2}},
    ]},
}


def derived_rule_suite(r3_bound: int = 100) -> dict:
    """Check every library script; maps name to its :class:`Verdict`."""
    return {name: check_proof_dict(script, r3_bound) for name, script in LIBRARY.items()}
