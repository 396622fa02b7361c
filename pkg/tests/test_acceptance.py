"""Acceptance gate: one test per headline criterion, each reported in the terminal summary."""

import random
import time
from fractions import Fraction

from conftest import ACCEPTANCE
from corpus import SATISFIABLE, UNSATISFIABLE, VALID
from fuzz import mutate
from oracles import brute_satisfiable, oracle_bounds

from pedalkit import anne
from pedalkit.bounds import BoundsQuery, frechet_lower_bound, solve_bounds
from pedalkit.decision import (
    canonical_model, canonical_sections, decide_satisfiable, decide_valid, section_valuation,
)
from pedalkit.kripke import (
    Frame, KripkeModel, Relation, denote, extension, random_model, satisfies, valid_on,
)
from pedalkit.library import LIBRARY, derived_rule_suite
from pedalkit.pedal import measure_set, mu, random_pedal_model, satisfies_credence
from pedalkit.proofcheck import PDL, PEDAL, check_proof_dict, match_axiom
from pedalkit.syntax import (
    AtLeast, CAnd, CImplies, CredenceFormula, Diamond, Not, Or, And, Seq, Signature,
    canon, canon_credence, fl_closure, formula_signature, parse_credence, parse_formula,
    parse_program, print_formula, print_program, random_formula, random_program,
)

SIG = Signature({"a", "b"}, {"p", "q"})


def record(name, ok, detail):
    ACCEPTANCE[name] = (ok, detail)
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------

def test_worked_example_reproduction():
    t0 = time.perf_counter()
    pm = anne.model()
    got = tuple(mu(pm, anne.S, g) for g in (anne.SPEC_P, anne.SPEC_Q, anne.COMBINED))
    literal = mu(anne.model(anne.LITERAL_WEIGHTS), anne.S, anne.SPEC_P)
    dt = time.perf_counter() - t0
    want = (Fraction(3, 5), Fraction(3, 5), Fraction(1, 5))
    ok = got == want and literal == Fraction(4, 5) and dt < 1
    record("worked example credences", ok,
           f"mu = {', '.join(map(str, got))}; published weights give {literal}; {dt:.3f}s")


def test_worked_example_bound():
    t0 = time.perf_counter()
    res = solve_bounds(BoundsQuery(anne.FRAME, anne.S, anne.CONSTRAINTS, anne.COMBINED))
    fr = frechet_lower_bound(anne.CONSTRAINTS, anne.COMBINED)
    dt = time.perf_counter() - t0
    ok = (res.n_valuations == 256 and res.minimum == Fraction(1, 5) and res.min_attained
          and fr == Fraction(1, 5) and dt < 10)
    record("worked example bound", ok,
           f"min = {res.minimum} (attained={res.min_attained}) over {res.n_valuations} valuations; "
           f"frechet = {fr}; {dt:.2f}s")


# ---------------------------------------------------------------------------
# Axiom soundness

def _f(rng, depth=2):
    return "(" + print_formula(random_formula(rng, SIG, depth)) + ")"


def _pi(rng):
    return "(" + print_program(random_program(rng, SIG, 2)) + ")"


PDL_TEMPLATES = {
    "Taut": ["{X} -> ({Y} -> {X})", "({X} -> ({Y} -> {Z})) -> (({X} -> {Y}) -> ({X} -> {Z}))",
             "(~{Y} -> ~{X}) -> ({X} -> {Y})"],
    "K": ["[{pi}]({X} -> {Y}) -> ([{pi}]{X} -> [{pi}]{Y})"],
    "BoxAnd": ["[{pi}]({X} & {Y}) <-> ([{pi}]{X} & [{pi}]{Y})"],
    "Choice": ["[{pi}+{pi2}]{X} <-> ([{pi}]{X} & [{pi2}]{X})"],
    "Test": ["[?{X}]{Y} <-> ({X} -> {Y})"],
    "Seq": ["[{pi};{pi2}]{X} <-> [{pi}][{pi2}]{X}"],
    "Star": ["({X} & [{pi}][{pi}*]{X}) <-> [{pi}*]{X}"],
    "Induction": ["({X} & [{pi}*]({X} -> [{pi}]{X})) -> [{pi}*]{X}"],
    "GK": ["G({X} -> {Y}) -> (G {X} -> G {Y})"],
    "GT": ["G {X} -> {X}"],
    "G5": ["F {X} -> G F {X}"],
    "Incl": ["<{pi}>{X} -> F {X}"],
}


def _pdl_instance(sid, rng):
    t = rng.choice(PDL_TEMPLATES[sid])
    return parse_formula(t.format(X=_f(rng), Y=_f(rng), Z=_f(rng), pi=_pi(rng), pi2=_pi(rng)))


def _r(rng):
    return Fraction(rng.randint(0, 12), 12)


def _pedal_instance(sid, rng):
    X, Y = _f(rng), _f(rng)
    if sid == "A1":
        cs = [f"P({_f(rng)}) {rng.choice(['>=', '<=', '<', '>', '='])} {_r(rng)}" for _ in range(3)]
        t = rng.choice(PDL_TEMPLATES["Taut"])
        return parse_credence(t.format(X=f"({cs[0]})", Y=f"({cs[1]})", Z=f"({cs[2]})"))
    if sid == "A2":
        return parse_credence(f"P({X}) >= 0")
    if sid == "A3":
        d = "(" + print_formula(random_formula(rng, SIG, 3, dynamic=False)) + ")"
        return parse_credence(f"P({d}) = 1 | P({d}) = 0")
    if sid == "A4":
        r1 = Fraction(rng.randint(0, 11), 12)
        r2 = Fraction(rng.randint(int(r1 * 12) + 1, 12), 12)
        return parse_credence(f"P({X}) <= {r1} -> P({X}) < {r2}")
    if sid == "A5":
        r = _r(rng)
        return parse_credence(f"P({X}) < {r} -> P({X}) <= {r}")
    if sid == "A6":
        r1, r2 = _r(rng), _r(rng)
        return parse_credence(f"(P({X}) >= {r1} & P({Y}) >= {r2} & P({X} & {Y}) = 0)"
                              f" -> P({X} | {Y}) >= {min(1, r1 + r2)}")
    if sid == "A7":
        r1 = _r(rng)
        r2 = Fraction(rng.randint(0, 12 - int(r1 * 12)), 12)
        return parse_credence(f"(P({X}) <= {r1} & P({Y}) < {r2}) -> P({X} | {Y}) < {r1 + r2}")
    raise KeyError(sid)


def test_axiom_soundness():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    kripke = [random_model(rng, rng.randint(1, 4), SIG, density=0.35) for _ in range(200)]
    pedal = [random_pedal_model(rng, rng.randint(1, 3), SIG) for _ in range(200)]
    bad, unmatched, checks = [], [], 0
    for sid in PDL_TEMPLATES:
        for _ in range(50):
            f = _pdl_instance(sid, rng)
            if match_axiom(f, PDL, sid) != sid:
                unmatched.append((sid, print_formula(f)))
            for m in kripke:
                checks += 1
                if not valid_on(m, f):
                    bad.append((sid, print_formula(f)))
                    break
    for sid in ("A1", "A2", "A3", "A4", "A5", "A6", "A7"):
        for _ in range(50):
            cf = _pedal_instance(sid, rng)
            if match_axiom(cf, PEDAL, sid) != sid:
                unmatched.append((sid, str(cf)))
            for pm in pedal:
                checks += 1
                if not all(satisfies_credence(pm, s, cf) for s in range(pm.frame.n)):
                    bad.append((sid, str(cf)))
                    break
    dt = time.perf_counter() - t0
    ok = not bad and not unmatched and dt < 120
    record("axiom soundness", ok,
           f"{len(PDL_TEMPLATES) + 7} schemas x 50 instances x 200 models, {checks} model checks, "
           f"{len(bad)} counterexamples, {len(unmatched)} unrecognised instances; {dt:.1f}s"
           + (f"; first: {(bad + unmatched)[0]}" if bad or unmatched else ""))


# ---------------------------------------------------------------------------

def _power(pi, n):
    out = pi
    for _ in range(n - 1):
        out = Seq(out, pi)
    return out


def test_program_equivalences():
    rng = random.Random(77)
    models = [random_model(rng, rng.randint(1, 4), SIG, density=0.35) for _ in range(200)]
    bad, total = [], 0
    for _ in range(40):
        p1, p2 = random_program(rng, SIG, 2), random_program(rng, SIG, 2)
        g1, g2 = random_formula(rng, SIG, 2), random_formula(rng, SIG, 2)
        P, P2, X, Y = (f"({print_program(p1)})", f"({print_program(p2)})",
                       f"({print_formula(g1)})", f"({print_formula(g2)})")
        facts = [
            f"<{P}+{P2}>{X} <-> <{P}>{X} | <{P2}>{X}",
            f"<{P}*>{X} <-> {X} | <{P}><{P}*>{X}",
            f"<?{X}>{Y} <-> {X} & {Y}",
            f"<{P}>({X} | {Y}) <-> <{P}>{X} | <{P}>{Y}",
            f"<{P};{P2}>{X} <-> <{P}><{P2}>{X}",
        ]
        fs = [parse_formula(t) for t in facts]
        fs += [parse_formula(f"<{print_program(_power(p1, n))}>{X} -> <{P}*>{X}") for n in range(1, 5)]
        for f in fs:
            for m in models:
                total += 1
                if not valid_on(m, f):
                    bad.append(print_formula(f))
                    break
    record("program equivalences", not bad,
           f"{total} model checks over 200 models, {len(bad)} counterexamples")


def test_measure_laws():
    rng = random.Random(5)
    bad = 0
    for _ in range(500):
        pm = random_pedal_model(rng, rng.randint(1, 3), SIG, n_valuations=rng.randint(1, 8),
                                n_cells=rng.randint(1, 4))
        g, h = random_formula(rng, SIG, 3), random_formula(rng, SIG, 3)
        s = rng.randrange(pm.frame.n)
        if mu(pm, s, g) + mu(pm, s, Not(g)) != 1:
            bad += 1
        disjoint = And(h, Not(g))
        if mu(pm, s, Or(g, disjoint)) != mu(pm, s, g) + mu(pm, s, disjoint):
            bad += 1
        vs = [v for c in pm.cells for v in c.valuations]
        rng.shuffle(vs)
        k = rng.randint(0, len(vs))
        if measure_set(pm, vs) != measure_set(pm, vs[:k]) + measure_set(pm, vs[k:]):
            bad += 1
    zero_one = 0
    for _ in range(200):
        pm = random_pedal_model(rng, rng.randint(1, 3), SIG)
        d = random_formula(rng, SIG, 3, dynamic=False)
        if mu(pm, rng.randrange(pm.frame.n), d) not in (0, 1):
            zero_one += 1
    record("measure laws", bad == 0 and zero_one == 0,
           f"500 models: {bad} complement/additivity failures; 200 dmffs: {zero_one} zero-one failures")


# ---------------------------------------------------------------------------

def test_decision_oracle():
    t0 = time.perf_counter()
    disagree, lemma_models, lemma_bad = [], 0, 0
    for label, texts in (("valid", VALID), ("satisfiable", SATISFIABLE), ("unsatisfiable", UNSATISFIABLE)):
        for text in texts:
            f = parse_formula(text)
            sig = formula_signature(f)
            sat = brute_satisfiable(f, sig.formula_atoms, sig.program_atoms, 3, extension) is not None
            refutable = brute_satisfiable(Not(f), sig.formula_atoms, sig.program_atoms, 3,
                                          extension) is not None
            oracle = "unsatisfiable" if not sat else ("valid" if not refutable else "satisfiable")
            mine = ("valid" if decide_valid(f) else
                    "satisfiable" if decide_satisfiable(f).satisfiable else "unsatisfiable")
            if not (oracle == mine == label):
                disagree.append((text, label, oracle, mine))
            if len(fl_closure([f])) <= 10:
                model, at = canonical_model([f])
                lemma_models += 1
                for i, w in enumerate(at):
                    for g in w.space.closure:
                        if satisfies(model, i, g) != (g in w):
                            lemma_bad += 1
    dt = time.perf_counter() - t0
    n = len(VALID) + len(SATISFIABLE) + len(UNSATISFIABLE)
    ok = not disagree and lemma_bad == 0 and dt < 300
    record("decision oracle", ok,
           f"{n} formulas, {len(disagree)} disagreements; truth lemma on {lemma_models} canonical "
           f"models, {lemma_bad} failures; {dt:.1f}s" + (f"; first: {disagree[0]}" if disagree else ""))


def test_section_relocation():
    bad, sections = 0, 0
    for text in ("[p]a", "<p*>a"):
        model, at = canonical_model([parse_formula(text)])
        closure = at[0].space.closure
        programs = {g.program for g in closure if isinstance(g, Diamond)} | {parse_program("p")}
        for sigma in canonical_sections(at):
            sections += 1
            inv = sigma.inverse()
            msig = KripkeModel(model.n, model.vf, section_valuation(sigma, at), model.rbox)
            for pi in programs:
                rc, rs = denote(pi, model), denote(pi, msig)
                for w in range(model.n):
                    for v in range(model.n):
                        if ((w, v) in rc) != ((inv(w), inv(v)) in rs):
                            bad += 1
            for g in closure:
                for w in range(model.n):
                    if satisfies(model, w, g) != satisfies(msig, inv(w), g):
                        bad += 1
    record("section relocation", bad == 0 and sections > 2,
           f"{sections} canonical sections over two closures, {bad} violations")


# ---------------------------------------------------------------------------

def _canonical(stmt):
    return canon_credence(stmt) if isinstance(stmt, CredenceFormula) else canon(stmt)


def _conj(items):
    out = items[0]
    for x in items[1:]:
        out = CAnd(out, x)
    return out


def test_proof_checker():
    suite = derived_rule_suite()
    accepted = [n for n, v in suite.items() if v.status == "Accepted"]
    required = {"finite additivity, n = 2", "test diamond"} <= set(accepted)
    rng = random.Random(99)
    scripts = list(LIBRARY.values())
    silent = 0
    for _ in range(1000):
        s = rng.choice(scripts)
        got = None
        while got is None:
            got = mutate(s, rng)
        v = check_proof_dict(got[1])
        if v.accepted and _canonical(v.conclusion) == _canonical(check_proof_dict(s).conclusion):
            silent += 1
    unsound = 0
    for name, script in LIBRARY.items():
        if script["system"] != PEDAL:
            continue
        v = suite[name]
        target = CImplies(_conj(v.premises), v.conclusion) if v.premises else v.conclusion
        sig = formula_signature(target)
        for seed in range(100):
            pm = random_pedal_model(rng, rng.randint(1, 3), sig)
            if not all(satisfies_credence(pm, s, target) for s in range(pm.frame.n)):
                unsound += 1
                break
    ok = len(accepted) == len(suite) >= 10 and required and silent == 0 and unsound == 0
    record("proof checker", ok,
           f"{len(accepted)}/{len(suite)} library scripts accepted; 1000 mutations, {silent} silent "
           f"accepts; {unsound} PEDAL conclusions failing on 100 random models")


def test_lp_exactness():
    rng = random.Random(11)
    compared, wrong = 0, 0
    frames = [anne.FRAME]
    for _ in range(4):
        frames.append(Frame(2, {"a": frozenset(s for s in range(2) if rng.random() < 0.5)},
                            Relation.universal(2)))
    for _ in range(200):
        frame = rng.choice(frames)
        sig = Signature(set(frame.vf), {"p"})
        lower = [(random_formula(rng, sig, 2), Fraction(rng.randint(0, 6), 6))
                 for _ in range(rng.randint(1, 2))]
        query = random_formula(rng, sig, 2)
        want = oracle_bounds(frame, 0, lower, query, ["p"])
        if want is not None and want[0] > 8:
            continue
        got = solve_bounds(BoundsQuery(frame, 0, [AtLeast(g, r) for g, r in lower], query,
                                       frozenset({"p"})))
        compared += 1
        if want is None:
            wrong += got.feasible
        elif (got.n_profiles, got.minimum, got.maximum) != want:
            wrong += 1
    anne_lo = oracle_bounds(anne.FRAME, anne.S,
                            [(c.formula, c.q) for c in anne.CONSTRAINTS], anne.COMBINED, ["p", "q"])
    compared += 1
    if anne_lo[1] != Fraction(1, 5):
        wrong += 1
    record("LP exactness", wrong == 0 and compared > 100,
           f"{compared} instances with at most 8 profiles, {wrong} mismatches against vertex enumeration")
