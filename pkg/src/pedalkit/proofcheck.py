"""Hilbert-style proof checking for PDL with a global box and for PEDAL.

Statements are compared up to abbreviation unfolding and cancellation of
double negations (:func:`~pedalkit.syntax.canon`).  Axiom schemas are
patterns with formula, program, credence and rational metavariables.
Proof files are JSON::

    {"system": "PEDAL",
     "lines": [{"stmt": "P(a) >= 0", "just": {"axiom": "A2"}},
               {"stmt": "...", "just": {"mp": [1, 2]}}]}

Justifications: ``{"axiom": id}`` (``id`` may be null to try every schema),
``{"premise": true}``, ``{"mp": [i, j]}`` where line ``j`` is ``line_i -> stmt``,
``{"nec": i, "program": "p"}``, ``{"nec_global": i}``,
``{"r2": "semantic"}`` or ``{"r2": {"lines": [...]}}`` (an embedded PDL
script), and ``{"r3": {"premises": [i, ...]}}``.  Line numbers start at 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from itertools import product
from typing import Optional

from . import syntax as sx
from .decision import DEFAULT_CLOSURE_CAP, CapExceeded, decide_valid
from .syntax import (
    AtLeast, Atom, AtomicProgram, Bottom, CNot, COr, CredenceFormula, Diamond,
    Formula, GlobalDiamond, Not, Or, Program, canon, canon_credence, cneg,
    is_dmff, parse_credence, parse_formula, parse_program,
)

__all__ = [
    "PDL", "PEDAL", "SCHEMAS", "Justification", "ProofLine", "ProofScript",
    "Verdict", "ProofFormatError", "match_axiom", "check_proof",
    "script_from_dict", "check_proof_dict", "load_script", "is_tautology",
]

PDL = "PDLBox"
PEDAL = "PEDAL"
DEFAULT_R3_BOUND = 100
TAUTOLOGY_ATOM_CAP = 20


# ---------------------------------------------------------------------------
# Metavariables

@dataclass(frozen=True)
class FVar(Formula):
    name: str


@dataclass(frozen=True)
class PVar(Program):
    name: str


@dataclass(frozen=True)
class CVar(CredenceFormula):
    name: str


@dataclass(frozen=True)
class RVar:
    name: str


@dataclass(frozen=True)
class OneMinus:
    name: str


@dataclass(frozen=True)
class RExpr:
    """A rational computed from other bindings; checked after matching."""
    fn: object


def _meta(x, fvars, pvars):
    """Turn named atoms and programs into metavariables."""
    if isinstance(x, Atom) and x.name in fvars:
        return FVar(x.name)
    if isinstance(x, AtomicProgram) and x.name in pvars:
        return PVar(x.name)
    if isinstance(x, (Formula, Program, CredenceFormula)):
        args = [_meta(getattr(x, f.name), fvars, pvars) for f in fields(x)]
        return type(x)(*args)
    return x


def _bind(env, key, value):
    if key in env:
        return env[key] == value
    env[key] = value
    return True


def _match(p, t, env, deferred) -> bool:
    tp = type(p)
    if tp is FVar:
        return _bind(env, p.name, t)
    if tp is PVar:
        return _bind(env, p.name, t)
    if tp is CVar:
        return _bind(env, p.name, t)
    if tp in (Not, CNot) and type(p.body) in (FVar, CVar):
        # canonical forms cancel double negations, so undo that here
        return _bind(env, p.body.name, cneg(t))
    if tp is not type(t):
        return False
    if tp is AtLeast:
        return _match(p.formula, t.formula, env, deferred) and _match_q(p.q, t.q, env, deferred)
    for f in fields(p):
        a, b = getattr(p, f.name), getattr(t, f.name)
        if isinstance(a, (Formula, Program, CredenceFormula)):
            if not _match(a, b, env, deferred):
                return False
        elif a != b:
            return False
    return True


def _match_q(pq, q, env, deferred):
    if isinstance(pq, RVar):
        return _bind(env, pq.name, q)
    if isinstance(pq, OneMinus):
        return _bind(env, pq.name, 1 - q)
    if isinstance(pq, RExpr):
        deferred.append((pq, q))
        return True
    return pq == q


# ---------------------------------------------------------------------------
# Schemas

@dataclass(frozen=True)
class Schema:
    id: str
    system: str
    patterns: tuple
    side: object = None  # env -> bool
    note: str = ""

    def match(self, stmt) -> Optional[dict]:
        for pat in self.patterns:
            env, deferred = {}, []
            if not _match(pat, stmt, env, deferred):
                continue
            if any(expr.fn(env) != q for expr, q in deferred):
                continue
            if self.side is None or self.side(env):
                return env
        return None


def _ground(text, fvars=("X", "Y"), pvars=("pi", "pi1", "pi2")):
    return _meta(canon(parse_formula(text)), set(fvars), set(pvars))


def _cred(cf):
    return _meta(canon_credence(cf), {"X", "Y"}, set())


X, Y = Atom("X"), Atom("Y")


def _ge(g, r):
    return AtLeast(g, r)


def _lt(g, r):
    return CNot(AtLeast(g, r))


def _le(g, r):
    return AtLeast(Not(g), OneMinus(r) if isinstance(r, str) else 1 - r)


def _eq(g, r):
    return sx.CAnd(_ge(g, r), _le(g, r))


_R1, _R2, _R = RVar("r1"), RVar("r2"), RVar("r")
_A6_LEFT = sx.CAnd(sx.CAnd(_ge(X, _R1), _ge(Y, _R2)), _eq(sx.And(X, Y), Fraction(0)))
_A6_RIGHT = sx.CAnd(_ge(X, _R1), sx.CAnd(_ge(Y, _R2), _eq(sx.And(X, Y), Fraction(0))))
_A6_GOAL = _ge(Or(X, Y), RExpr(lambda e: min(Fraction(1), e["r1"] + e["r2"])))
_A7_GOAL = _lt(Or(X, Y), RExpr(lambda e: e["r1"] + e["r2"]))

PDL_SCHEMAS = [
    Schema("K", PDL, (_ground("[pi](X -> Y) -> ([pi]X -> [pi]Y)"),)),
    Schema("BoxAnd", PDL, (_ground("[pi](X & Y) <-> ([pi]X & [pi]Y)"),)),
    Schema("Choice", PDL, (_ground("[pi1+pi2]X <-> ([pi1]X & [pi2]X)"),)),
    Schema("Test", PDL, (_ground("[?X]Y <-> (X -> Y)"),)),
    Schema("Seq", PDL, (_ground("[pi1;pi2]X <-> [pi1][pi2]X"),)),
    Schema("Star", PDL, (_ground("(X & [pi][pi*]X) <-> [pi*]X"),)),
    Schema("Induction", PDL, (_ground("(X & [pi*](X -> [pi]X)) -> [pi*]X"),)),
    Schema("GK", PDL, (_ground("G(X -> Y) -> (G X -> G Y)"),)),
    Schema("GT", PDL, (_ground("G X -> X"),)),
    Schema("G5", PDL, (_ground("F X -> G F X"),)),
    Schema("Incl", PDL, (_ground("<pi>X -> F X"),)),
]

PEDAL_SCHEMAS = [
    Schema("A2", PEDAL, (_cred(_ge(X, Fraction(0))),)),
    Schema("A3", PEDAL, (_cred(sx.COr(_eq(X, Fraction(1)), _eq(X, Fraction(0)))),),
           side=lambda e: is_dmff(e["X"]), note="X must be a dmff"),
    Schema("A4", PEDAL, (_cred(sx.CImplies(_le(X, "r1"), _lt(X, _R2))),),
           side=lambda e: e["r1"] < e["r2"], note="needs r1 < r2"),
    Schema("A5", PEDAL, (_cred(sx.CImplies(_lt(X, _R), _le(X, "r"))),)),
    Schema("A6", PEDAL, (_cred(sx.CImplies(_A6_LEFT, _A6_GOAL)),
                         _cred(sx.CImplies(_A6_RIGHT, _A6_GOAL)))),
    Schema("A7", PEDAL, (_cred(sx.CImplies(sx.CAnd(_le(X, "r1"), _lt(Y, _R2)), _A7_GOAL)),),
           side=lambda e: e["r1"] + e["r2"] <= 1, note="needs r1 + r2 <= 1"),
]

SCHEMAS = {s.id: s for s in PDL_SCHEMAS + PEDAL_SCHEMAS}
SCHEMAS_BY_SYSTEM = {PDL: ["Taut"] + [s.id for s in PDL_SCHEMAS],
                     PEDAL: ["A1"] + [s.id for s in PEDAL_SCHEMAS]}


# ---------------------------------------------------------------------------
# Tautologies

def _skeleton_atoms(f, out):
    t = type(f)
    if t in (Not, CNot):
        _skeleton_atoms(f.body, out)
    elif t in (Or, COr):
        _skeleton_atoms(f.left, out)
        _skeleton_atoms(f.right, out)
    elif t is not Bottom and f not in out:
        out.append(f)


def _eval_skeleton(f, val):
    t = type(f)
    if t in (Not, CNot):
        return not _eval_skeleton(f.body, val)
    if t in (Or, COr):
        return _eval_skeleton(f.left, val) or _eval_skeleton(f.right, val)
    if t is Bottom:
        return False
    return val[f]


def is_tautology(stmt) -> bool:
    """Truth-table check on the propositional skeleton of the canonical form.

    Ground statements treat atoms, ``<pi>g`` and ``F g`` as letters;
    credence statements treat each ``P(g) >= q`` as a letter.
    """
    c = canon_credence(stmt) if isinstance(stmt, CredenceFormula) else canon(stmt)
    letters = []
    _skeleton_atoms(c, letters)
    if len(letters) > TAUTOLOGY_ATOM_CAP:
        raise CapExceeded(f"{len(letters)} propositional letters, cap is {TAUTOLOGY_ATOM_CAP}")
    for bits in product((False, True), repeat=len(letters)):
        if not _eval_skeleton(c, dict(zip(letters, bits))):
            return False
    return True


def _canon(stmt):
    return canon_credence(stmt) if isinstance(stmt, CredenceFormula) else canon(stmt)


def match_axiom(statement, system: str = None, schema_id: str = None) -> Optional[str]:
    """First schema id (of ``system``, or the given one) that ``statement`` instantiates."""
    if system is None:
        system = PEDAL if isinstance(statement, CredenceFormula) else PDL
    ids = SCHEMAS_BY_SYSTEM[system]
    if schema_id is not None:
        if schema_id not in ids:
            return None
        ids = [schema_id]
    c = _canon(statement)
    for sid in ids:
        if sid in ("Taut", "A1"):
            try:
                if is_tautology(c):
                    return sid
            except CapExceeded:
                pass
        elif SCHEMAS[sid].match(c) is not None:
            return sid
    return None


# ---------------------------------------------------------------------------
# Scripts

class ProofFormatError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass(frozen=True)
class Justification:
    kind: str  # axiom | premise | mp | nec | nec_global | r2 | r3
    axiom: str = None
    refs: tuple = ()
    program: Program = None
    certificate: object = None  # "semantic" or an embedded ProofScript


@dataclass(frozen=True)
class ProofLine:
    index: int
    statement: object
    justification: Justification


@dataclass(frozen=True)
class ProofScript:
    system: str
    lines: tuple

    @property
    def conclusion(self):
        return self.lines[-1].statement


@dataclass(frozen=True)
class Verdict:
    status: str  # Accepted | AcceptedApproximate | Rejected
    line: int = None
    reason: str = ""
    k: int = None
    conclusion: object = None
    premises: tuple = ()
    line_ok: tuple = field(default=(), repr=False)

    @property
    def accepted(self):
        return self.status != "Rejected"

    def __str__(self):
        if self.status == "Rejected":
            return f"Rejected(line {self.line}: {self.reason})"
        if self.status == "AcceptedApproximate":
            return f"AcceptedApproximate({self.k})"
        return "Accepted"


def _index(v, n):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ProofFormatError(n, f"line reference must be an integer, got {v!r}")
    return v


def _justification(d, n, system):
    if not isinstance(d, dict) or len(d) == 0:
        raise ProofFormatError(n, "missing justification")
    if "axiom" in d:
        return Justification("axiom", axiom=d["axiom"])
    if "premise" in d:
        return Justification("premise")
    if "mp" in d:
        refs = d["mp"]
        if not isinstance(refs, list) or len(refs) != 2:
            raise ProofFormatError(n, "mp needs two line numbers")
        return Justification("mp", refs=tuple(_index(r, n) for r in refs))
    if "nec" in d:
        prog = d.get("program")
        try:
            prog = parse_program(prog) if prog is not None else None
        except sx.ParseError as e:
            raise ProofFormatError(n, f"program: {e}") from None
        return Justification("nec", refs=(_index(d["nec"], n),), program=prog)
    if "nec_global" in d:
        return Justification("nec_global", refs=(_index(d["nec_global"], n),))
    if "r2" in d:
        cert = d["r2"]
        if cert == "semantic":
            return Justification("r2", certificate="semantic")
        if isinstance(cert, dict):
            inner = dict(cert)
            inner.setdefault("system", PDL)
            return Justification("r2", certificate=script_from_dict(inner))
        raise ProofFormatError(n, "r2 certificate must be 'semantic' or a script")
    if "r3" in d:
        r3 = d["r3"]
        refs = r3.get("premises") if isinstance(r3, dict) else None
        if not isinstance(refs, list):
            raise ProofFormatError(n, "r3 needs a list of premise lines")
        return Justification("r3", refs=tuple(_index(r, n) for r in refs))
    raise ProofFormatError(n, f"unknown justification {sorted(d)}")


def script_from_dict(d) -> ProofScript:
    if not isinstance(d, dict):
        raise ProofFormatError(0, "proof must be a JSON object")
    system = d.get("system")
    if system not in (PDL, PEDAL):
        raise ProofFormatError(0, f"system must be {PDL!r} or {PEDAL!r}")
    raw = d.get("lines")
    if not isinstance(raw, list) or not raw:
        raise ProofFormatError(0, "proof needs a nonempty list of lines")
    lines = []
    for n, item in enumerate(raw, 1):
        if not isinstance(item, dict) or "stmt" not in item:
            raise ProofFormatError(n, "line needs 'stmt'")
        try:
            parse = parse_credence if system == PEDAL else parse_formula
            stmt = parse(item["stmt"])
        except (sx.ParseError, TypeError, ValueError) as e:
            raise ProofFormatError(n, f"cannot parse statement: {e}") from None
        lines.append(ProofLine(n, stmt, _justification(item.get("just"), n, system)))
    return ProofScript(system, tuple(lines))


def load_script(path) -> ProofScript:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ProofFormatError(0, f"invalid JSON: {e}") from None
    return script_from_dict(data)


# ---------------------------------------------------------------------------
# Checking

_PR_ONE = _cred(_eq(X, Fraction(1)))
_R3_SHAPE = _meta(COr(CNot(CVar("A")), AtLeast(Atom("X"), RVar("r"))), {"X"}, set())


class _Fail(Exception):
    pass


def _check_line(script, line, canon_of, ok, r3_bound, cap):
    """Return the R3 bound used (or None); raise _Fail with a reason."""
    j, n = line.justification, line.index
    c = canon_of[n]
    for r in j.refs:
        if not 1 <= r < n:
            raise _Fail(f"cites line {r}, which is not an earlier line")
        if not ok[r]:
            raise _Fail(f"cites line {r}, which does not check")
    if script.system == PEDAL and not isinstance(line.statement, CredenceFormula):
        raise _Fail("not a credence formula")

    if j.kind == "premise":
        return None
    if j.kind == "axiom":
        sid = j.axiom
        if sid is not None and sid not in SCHEMAS_BY_SYSTEM[script.system]:
            raise _Fail(f"unknown axiom {sid!r} for {script.system}")
        if match_axiom(line.statement, script.system, sid) is None:
            schema = SCHEMAS.get(sid)
            extra = f" ({schema.note})" if schema is not None and schema.note else ""
            raise _Fail(f"not an instance of {sid or 'any axiom'}{extra}")
        return None
    if j.kind == "mp":
        i, k = j.refs
        imp = COr if script.system == PEDAL else Or
        if canon_of[k] != imp(cneg(canon_of[i]), c):
            raise _Fail(f"line {k} is not line {i} -> this line")
        return None
    if j.kind in ("nec", "nec_global"):
        if script.system != PDL:
            raise _Fail("necessitation applies to PDL lines only")
        body = cneg(canon_of[j.refs[0]])
        if j.kind == "nec_global":
            if c != Not(GlobalDiamond(body)):
                raise _Fail(f"not G applied to line {j.refs[0]}")
            return None
        if not (type(c) is Not and type(c.body) is Diamond and c.body.body == body):
            raise _Fail(f"not [pi] applied to line {j.refs[0]}")
        if j.program is not None and c.body.program != sx._collapse_program(sx.desugar_program(j.program)):
            raise _Fail("program does not match the statement")
        return None
    if j.kind == "r2":
        if script.system != PEDAL:
            raise _Fail("r2 applies to PEDAL lines only")
        env = {}
        if not _match(_PR_ONE, c, env, []):
            raise _Fail("r2 conclusion must have the form P(g) = 1")
        g = env["X"]
        if j.certificate == "semantic":
            try:
                valid = decide_valid(g, cap)
            except CapExceeded as e:
                raise _Fail(f"semantic certificate: {e}") from None
            if not valid:
                raise _Fail(f"{g} is not PDL-valid")
            return None
        sub = check_proof(j.certificate, r3_bound, cap)
        if not sub.accepted:
            raise _Fail(f"embedded proof: {sub}")
        if sub.premises:
            raise _Fail("embedded proof uses premises")
        if canon(sub.conclusion) != g:
            raise _Fail("embedded proof concludes a different formula")
        return None
    if j.kind == "r3":
        if script.system != PEDAL:
            raise _Fail("r3 applies to PEDAL lines only")
        env = {}
        if not _match(_R3_SHAPE, c, env, []):
            raise _Fail("r3 conclusion must have the form A -> P(g) >= r")
        a, g, r = env["A"], env["X"], env["r"]
        if r <= 0:
            raise _Fail("r3 needs r > 0")
        have = set()
        for ref in j.refs:
            e = {}
            if _match(_R3_SHAPE, canon_of[ref], e, []) and e["A"] == a and e["X"] == g:
                have.add(e["r"])
        lo = math.ceil(1 / r)
        missing = [k for k in range(lo, r3_bound + 1) if r - Fraction(1, k) not in have]
        if missing:
            raise _Fail(f"r3 premise for k = {missing[0]} (P(g) >= {r - Fraction(1, missing[0])}) missing")
        return r3_bound
    raise _Fail(f"unknown justification {j.kind}")


def check_proof(script: ProofScript, r3_bound: int = DEFAULT_R3_BOUND,
                cap: int = DEFAULT_CLOSURE_CAP) -> Verdict:
    """Check every line; the verdict reports the first failing line.

    A line checks when its own justification holds and every line it cites
    checks, so the status of line ``i`` depends only on lines ``1..i``.
    """
    if r3_bound < 1:
        raise ValueError("r3 bound must be at least 1")
    canon_of, ok, first, r3_used = {}, {}, None, False
    for line in script.lines:
        n = line.index
        try:
            canon_of[n] = _canon(line.statement)
            used = _check_line(script, line, canon_of, ok, r3_bound, cap)
            ok[n] = True
            r3_used = r3_used or used is not None
        except _Fail as e:
            ok[n] = False
            if first is None:
                first = (n, str(e))
    line_ok = tuple(ok[line.index] for line in script.lines)
    premises = tuple(l.statement for l in script.lines if l.justification.kind == "premise")
    if first is not None:
        return Verdict("Rejected", first[0], first[1], line_ok=line_ok,
                       conclusion=script.conclusion, premises=premises)
    if r3_used:
        return Verdict("AcceptedApproximate", k=r3_bound, conclusion=script.conclusion,
                       premises=premises, line_ok=line_ok)
    return Verdict("Accepted", conclusion=script.conclusion, premises=premises, line_ok=line_ok)


def check_proof_dict(d, r3_bound: int = DEFAULT_R3_BOUND, cap: int = DEFAULT_CLOSURE_CAP) -> Verdict:
    """Like :func:`check_proof`, but malformed input becomes a rejection."""
    try:
        script = script_from_dict(d)
    except ProofFormatError as e:
        return Verdict("Rejected", e.line, e.message)
    return check_proof(script, r3_bound, cap)
