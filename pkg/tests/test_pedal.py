import json
import random
from fractions import Fraction

import pytest

from pedalkit import anne
from pedalkit.kripke import ModelError, Relation, Valuation, extension
from pedalkit.pedal import (
    Cell, PedalModel, load_pedal, measure_set, mu, pedal_to_dict, point_mass,
    random_pedal_model, satisfies_credence, valid_credence, validate_pedal,
)
from pedalkit.syntax import And, Not, Signature, parse_credence, parse_formula, print_formula, random_formula

SIG = Signature({"a", "b"}, {"p"})


def test_worked_example_corrected_weights():
    pm = anne.model()
    assert validate_pedal(pm) == []
    for s in (anne.S, anne.T):
        assert mu(pm, s, anne.SPEC_P) == Fraction(3, 5)
        assert mu(pm, s, anne.SPEC_Q) == Fraction(3, 5)
        assert mu(pm, s, anne.COMBINED) == Fraction(1, 5)
    for c in anne.CONSTRAINTS:
        assert satisfies_credence(pm, anne.S, c)


def test_worked_example_published_weights():
    pm = anne.model(anne.LITERAL_WEIGHTS)
    assert mu(pm, anne.S, anne.SPEC_P) == Fraction(4, 5)
    assert mu(pm, anne.S, anne.SPEC_Q) == Fraction(3, 5)
    assert mu(pm, anne.S, anne.COMBINED) == Fraction(2, 5)


def test_top_and_bottom():
    pm = random_pedal_model(1, 3, SIG)
    assert mu(pm, 0, parse_formula("~#")) == 1
    assert mu(pm, 0, parse_formula("#")) == 0


def test_complement_and_additivity():
    for seed in range(100):
        rng = random.Random(seed)
        pm = random_pedal_model(rng, rng.randint(1, 3), SIG)
        g, h = random_formula(rng, SIG, 3), random_formula(rng, SIG, 3)
        s = rng.randrange(pm.frame.n)
        assert mu(pm, s, g) + mu(pm, s, Not(g)) == 1
        # g & h and g & ~h split g
        assert mu(pm, s, And(g, h)) + mu(pm, s, And(g, Not(h))) == mu(pm, s, g)


def test_measure_set_agrees_with_point_masses():
    pm = random_pedal_model(5, 2, SIG, n_valuations=8, n_cells=3)
    vs = [v for c in pm.cells for v in c.valuations]
    assert measure_set(pm, vs) == 1
    assert measure_set(pm, vs[:2]) == point_mass(pm, vs[0]) + point_mass(pm, vs[1])


def test_cells_share_weight_uniformly():
    frame = anne.FRAME
    pm = PedalModel(frame, [Cell([anne.V1, anne.V2], Fraction(1, 2)), Cell([anne.V3], Fraction(1, 2))])
    assert validate_pedal(pm) == []
    assert point_mass(pm, anne.V1) == Fraction(1, 4)
    assert mu(pm, 0, anne.COMBINED) == Fraction(1, 4)


def test_dmff_zero_one():
    for seed in range(50):
        rng = random.Random(seed)
        pm = random_pedal_model(rng, 3, SIG)
        g = random_formula(rng, SIG, 3, dynamic=False)
        assert mu(pm, rng.randrange(3), g) in (0, 1)


def test_validation_messages():
    frame = anne.FRAME
    assert "weights sum to 3/2" in validate_pedal(
        PedalModel(frame, [Cell([anne.V1], 1), Cell([anne.V2], Fraction(1, 2))]))
    msgs = validate_pedal(PedalModel(frame, [Cell([anne.V1], Fraction(1, 2))], rest_weight=Fraction(1, 2)))
    assert any("rest cell" in m for m in msgs)
    msgs = validate_pedal(PedalModel(frame, [Cell([anne.V1], 2), Cell([anne.V2], -1)]))
    assert any("negative" in m for m in msgs)
    msgs = validate_pedal(PedalModel(frame, [Cell([anne.V1], Fraction(1, 2)), Cell([anne.V1], Fraction(1, 2))]))
    assert any("cells 0 and" in m for m in msgs)


def test_valuation_outside_rbox_rejected():
    from pedalkit.kripke import Frame
    frame = Frame(2, {}, Relation.identity(2))
    v = Valuation.of({"p": Relation.from_pairs(2, [(0, 1)])})
    assert any("rbox" in m for m in validate_pedal(PedalModel.singletons(frame, [(v, 1)])))


def test_credence_connectives():
    pm = anne.model()
    assert satisfies_credence(pm, 0, parse_credence("P(G(A -> [p]B)) = 3/5"))
    assert satisfies_credence(pm, 0, parse_credence("P(G(A -> [p]B)) > 1/2 & ~P(G(A -> [p]B)) > 3/5"))
    assert not satisfies_credence(pm, 0, parse_credence("P(G(A -> [p]B)) < 3/5"))
    assert valid_credence(pm, parse_credence("P(A | ~A) = 1"))


def test_json_round_trip(tmp_path):
    pm = anne.model()
    path = tmp_path / "pm.json"
    path.write_text(json.dumps(pedal_to_dict(pm)))
    back = load_pedal(path)
    assert mu(back, 0, anne.SPEC_P) == Fraction(3, 5)


def test_json_invalid(tmp_path):
    d = pedal_to_dict(anne.model())
    d["cells"][0]["weight"] = "9/10"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    with pytest.raises(ModelError):
        load_pedal(path)


def test_dmff_truth_ignores_program_valuation():
    rng = random.Random(8)
    for _ in range(100):
        pm = random_pedal_model(rng, 3, SIG, n_valuations=4)
        g = random_formula(rng, SIG, 3, dynamic=False)
        vs = [v for c in pm.cells for v in c.valuations]
        for s in range(3):
            truths = {extension(pm.frame.with_valuation(v), g) >> s & 1 for v in vs}
            assert len(truths) == 1


@pytest.mark.parametrize("rel", [">=", ">", "=", "<=", "<"])
def test_comparisons_match_measure(rel):
    import operator
    cmp = {">=": operator.ge, ">": operator.gt, "=": operator.eq, "<=": operator.le, "<": operator.lt}[rel]
    rng = random.Random(rel)
    for _ in range(100):
        pm = random_pedal_model(rng, 2, SIG)
        g = random_formula(rng, SIG, 2)
        q = Fraction(rng.randint(0, 6), 6)
        cf = parse_credence(f"P({print_formula(g)}) {rel} {q}")
        assert satisfies_credence(pm, 0, cf) == cmp(mu(pm, 0, g), q)


def test_probability_rules_hold():
    rng = random.Random(12)
    for _ in range(100):
        pm = random_pedal_model(rng, 2, SIG)
        g, h = random_formula(rng, SIG, 2), random_formula(rng, SIG, 2)
        s = Fraction(rng.randint(0, 6), 6)
        r = s * Fraction(rng.randint(0, 6), 6)
        G, H = f"({print_formula(g)})", f"({print_formula(h)})"
        # monotonicity in the bound, and under a valid implication
        assert valid_credence(pm, parse_credence(f"P({G}) >= {s} -> P({G}) >= {r}"))
        assert valid_credence(pm, parse_credence(f"P({G} & {H}) >= {s} -> P({G}) >= {s}"))
