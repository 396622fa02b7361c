import json
import random
import time
from fractions import Fraction

import pytest

from pedalkit import anne
from pedalkit.bounds import (
    BoundsQuery, CapExceeded, credence_dnf, enumerate_valuations, frechet_lower_bound,
    load_query, result_to_dict, solve_bounds, truth_profile,
)
from pedalkit.kripke import Frame, Relation
from pedalkit.pedal import PedalModel, mu, satisfies_credence, validate_pedal
from pedalkit.syntax import AtLeast, Signature, parse_credence, parse_formula, random_formula

from oracles import oracle_bounds

F, C = parse_formula, parse_credence


def _frame(n, rbox=None, **vf):
    return Frame(n, {k: frozenset(v) for k, v in vf.items()}, rbox or Relation.universal(n))


def test_enumeration_counts():
    assert len(enumerate_valuations(anne.FRAME, {"p", "q"})) == 256
    assert len(enumerate_valuations(_frame(1), {"p"})) == 2
    assert len(enumerate_valuations(_frame(2, Relation.identity(2)), {"p"})) == 4
    assert len(enumerate_valuations(anne.FRAME, Signature(set(), {"p"}))) == 16


def test_enumeration_is_deterministic_and_distinct():
    a = enumerate_valuations(anne.FRAME, {"p", "q"})
    assert a == enumerate_valuations(anne.FRAME, ["q", "p"])
    assert len(set(a)) == 256
    assert not a[0]["p"] and not a[0]["q"]


def test_enumeration_cap_reports_count():
    with pytest.raises(CapExceeded) as err:
        enumerate_valuations(anne.FRAME, {"p", "q"}, cap=100)
    assert "256" in str(err.value)


def test_truth_profiles():
    vs = enumerate_valuations(anne.FRAME, {"p", "q"})
    assert set(truth_profile(anne.FRAME, 0, F("~#"), vs)) == {1}
    assert set(truth_profile(anne.FRAME, 0, F("#"), vs)) == {0}
    bits = truth_profile(anne.FRAME, anne.S, anne.SPEC_P, anne.VALUATIONS)
    assert bits == (1, 1, 0)
    full = truth_profile(anne.FRAME, anne.S, anne.SPEC_P, vs)
    # s has p-successors only at t: 4 choices of p edges out of t, 4 of q
    assert sum(full) == 2 * 4 * 16


def _anne_query():
    return BoundsQuery(anne.FRAME, anne.S, anne.CONSTRAINTS, anne.COMBINED)


def test_worked_example_minimum():
    res = solve_bounds(_anne_query())
    assert res.feasible
    assert res.minimum == Fraction(1, 5) and res.min_attained
    assert res.maximum == 1 and res.max_attained
    assert res.n_valuations == 256


def test_witnesses_are_exact():
    q = _anne_query()
    res = solve_bounds(q)
    for wit, value in ((res.witness_min, res.minimum), (res.witness_max, res.maximum)):
        assert validate_pedal(wit) == []
        assert mu(wit, q.state, q.query) == value
        assert all(satisfies_credence(wit, q.state, c) for c in q.constraints)


def test_trivial_bounds():
    frame = _frame(2, a=[0])
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(a) >= 1")], F("a")))
    assert res.minimum == res.maximum == 1
    # a valuation-dependent query behaves like a contingent proposition
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(<p>a) >= 3/5")], F("<p>a")))
    assert (res.minimum, res.maximum) == (Fraction(3, 5), 1)


def test_infeasible():
    frame = _frame(2, a=[0])
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(<p>a) >= 3/5"), C("P(<p>a) <= 1/2")], F("a")))
    assert not res.feasible
    assert result_to_dict(res)["min"] == "infeasible"


def test_strict_constraints_report_attainment():
    frame = _frame(2, a=[0])
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(<p>a) > 1/2")], F("<p>a")))
    assert res.minimum == Fraction(1, 2) and not res.min_attained
    assert res.witness_min is None
    assert res.maximum == 1 and res.max_attained
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(<p>a) > 1/2")], F("[p]#")))
    assert res.minimum == 0 and res.min_attained
    assert res.maximum == Fraction(1, 2) and not res.max_attained


def test_strict_infeasible():
    frame = _frame(1)
    assert not solve_bounds(BoundsQuery(frame, 0, [C("P(<p>~#) > 1")], F("a"))).feasible


def test_disjunctive_constraints():
    frame = _frame(2, a=[0])
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(<p>a) >= 4/5 | P(<p>a) <= 1/5")], F("<p>a")))
    assert (res.minimum, res.maximum) == (0, 1)
    res = solve_bounds(BoundsQuery(frame, 0, [C("P(<p>a) >= 4/5 | P(<p>~a) >= 9/10")], F("<p>a")))
    assert res.minimum == 0


def test_dnf_cap():
    cs = [C(f"P(<p>a) >= 1/{k} | P(<q>a) >= 1/{k}") for k in range(2, 9)]
    assert len(credence_dnf(cs[:6])) == 64
    with pytest.raises(CapExceeded):
        credence_dnf(cs)


def test_monotone_in_constraints():
    q1 = BoundsQuery(anne.FRAME, 0, [C("P(G(A -> [p]B)) >= 1/2")], anne.COMBINED)
    q2 = BoundsQuery(anne.FRAME, 0, [C("P(G(A -> [p]B)) >= 4/5")], anne.COMBINED)
    assert solve_bounds(q1).minimum <= solve_bounds(q2).minimum


def test_bounds_contain_sampled_models():
    q = _anne_query()
    res = solve_bounds(q)
    vs = enumerate_valuations(anne.FRAME, {"p", "q"})
    rng = random.Random(0)
    hits = 0
    for _ in range(200):
        support = rng.sample(vs, rng.randint(1, 5))
        raw = [rng.randint(1, 9) for _ in support]
        pm = PedalModel.singletons(anne.FRAME, [(v, Fraction(w, sum(raw))) for v, w in zip(support, raw)])
        if all(satisfies_credence(pm, q.state, c) for c in q.constraints):
            hits += 1
            assert res.minimum <= mu(pm, q.state, q.query) <= res.maximum
    assert hits > 5


def test_state_independent_within_class():
    a = solve_bounds(BoundsQuery(anne.FRAME, anne.S, anne.CONSTRAINTS, F("G[p]B")))
    b = solve_bounds(BoundsQuery(anne.FRAME, anne.T, anne.CONSTRAINTS, F("G[p]B")))
    assert (a.minimum, a.maximum) == (b.minimum, b.maximum)


def test_frechet_examples():
    t0 = time.perf_counter()
    assert frechet_lower_bound(anne.CONSTRAINTS, anne.COMBINED) == Fraction(1, 5)
    assert time.perf_counter() - t0 < 10
    pairs = [(anne.SPEC_P, Fraction(1, 2)), (anne.SPEC_Q, Fraction(2, 5))]
    assert frechet_lower_bound(pairs, anne.COMBINED) == 0
    assert frechet_lower_bound([(anne.SPEC_P, Fraction(3, 5))], anne.COMBINED) is None
    assert frechet_lower_bound([], F("a | ~a")) == 1


def test_frechet_never_exceeds_lp_minimum():
    lp = solve_bounds(_anne_query()).minimum
    assert frechet_lower_bound(anne.CONSTRAINTS, anne.COMBINED) <= lp


def test_against_independent_oracle():
    rng = random.Random(3)
    sig = Signature({"a"}, {"p"})
    checked = 0
    for _ in range(60):
        frame = _frame(2, a=[s for s in range(2) if rng.random() < 0.5])
        lower = [(random_formula(rng, sig, 2), Fraction(rng.randint(0, 4), 4))
                 for _ in range(rng.randint(1, 2))]
        query = random_formula(rng, sig, 2)
        got = solve_bounds(BoundsQuery(frame, 0, [AtLeast(g, r) for g, r in lower], query,
                                       frozenset({"p"})))
        want = oracle_bounds(frame, 0, lower, query, ["p"])
        if want is None:
            assert not got.feasible
            continue
        n, lo, hi = want
        assert got.n_profiles == n
        assert (got.minimum, got.maximum) == (lo, hi)
        checked += 1
    assert checked > 20


def test_query_file(tmp_path):
    d = {"frame": {"states": 2, "vf": {"A": [0], "C": [0], "B": [1], "D": [1]}, "rbox": "universal"},
         "state": 0,
         "constraints": ["P(G(A -> [p]B)) >= 3/5", "P(G(C -> [q]D)) >= 3/5"],
         "query": "G[(?A;p)+(?C;q)](B | D)"}
    path = tmp_path / "q.json"
    path.write_text(json.dumps(d))
    out = result_to_dict(solve_bounds(load_query(path)))
    assert out["min"] == "1/5" and out["minAttained"] is True
