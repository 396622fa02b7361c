"""Command-line front end: ``pedalkit <command> ...``.

Exit codes: 0 success or true, 1 false or rejected, 2 input error,
3 infeasible or a size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields

from . import anne
from .bounds import (
    DEFAULT_VALUATION_CAP, NOTION, BoundsQuery, frechet_lower_bound, load_query,
    result_to_dict, solve_bounds,
)
from .decision import (
    DEFAULT_CLOSURE_CAP, DEFAULT_SECTION_CAP, CapExceeded, decide_satisfiable,
)
from .kripke import ModelError, load_model, model_to_dict, satisfies
from .pedal import load_pedal, mu, pedal_to_dict
from .proofcheck import DEFAULT_R3_BOUND, ProofFormatError, check_proof, load_script
from .syntax import Not, ParseError, Signature, parse_formula, print_formula

OK, FALSE, INPUT_ERROR, INFEASIBLE = 0, 1, 2, 3


@dataclass
class Config:
    flClosureCap: int = DEFAULT_CLOSURE_CAP
    valuationCap: int = DEFAULT_VALUATION_CAP
    sectionCap: int = DEFAULT_SECTION_CAP
    r3Bound: int = DEFAULT_R3_BOUND
    outputFormat: str = "text"

    @classmethod
    def load(cls, path) -> "Config":
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        for name in ("flClosureCap", "valuationCap", "sectionCap", "r3Bound"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.outputFormat not in ("text", "json"):
            raise ValueError(f"outputFormat must be 'text' or 'json', got {self.outputFormat!r}")


class _Out:
    def __init__(self, cfg, stream):
        self.json = cfg.outputFormat == "json"
        self.stream = stream

    def emit(self, text, data):
        if self.json:
            print(json.dumps(data, sort_keys=True), file=self.stream)
        else:
            print(text, file=self.stream)


def _state(n, s):
    if not 0 <= s < n:
        raise ModelError([f"state {s} out of range 0..{n - 1}"])
    return s


def cmd_eval(args, cfg, out):
    m = load_model(args.model)
    f = parse_formula(args.formula, m.signature)
    value = satisfies(m, _state(m.n, args.state), f)
    out.emit("true" if value else "false", {"value": value})
    return OK if value else FALSE


def cmd_mu(args, cfg, out):
    pm = load_pedal(args.model)
    programs = set()
    for cell in pm.cells:
        for v in cell.valuations:
            programs |= set(v.names())
    f = parse_formula(args.formula, Signature(pm.frame.vf, programs))
    value = mu(pm, _state(pm.frame.n, args.state), f)
    out.emit(str(value), {"mu": str(value)})
    return OK


def cmd_bounds(args, cfg, out):
    q = load_query(args.query)
    r = solve_bounds(q, valuation_cap=cfg.valuationCap)
    data = result_to_dict(r)
    if not r.feasible:
        out.emit("infeasible", data)
        return INFEASIBLE
    text = (f"min = {r.minimum} ({'attained' if r.min_attained else 'not attained'}); "
            f"max = {r.maximum} ({'attained' if r.max_attained else 'not attained'}); "
            f"{r.n_valuations} valuations, {r.n_profiles} profiles; {NOTION}")
    if args.witness and r.witness_min is not None:
        with open(args.witness, "w") as fh:
            json.dump(pedal_to_dict(r.witness_min), fh, indent=2)
    out.emit(text, data)
    return OK


def cmd_decide(args, cfg, out):
    f = parse_formula(args.formula)
    refute = decide_satisfiable(Not(f), cfg.flClosureCap)
    valid = not refute.satisfiable
    sat = decide_satisfiable(f, cfg.flClosureCap)
    if valid:
        text = "valid"
    elif sat.satisfiable:
        text = "satisfiable, not valid"
    else:
        text = "unsatisfiable"
    data = {"valid": valid, "satisfiable": sat.satisfiable}
    if args.witness and sat.satisfiable:
        with open(args.witness, "w") as fh:
            json.dump({"model": model_to_dict(sat.witness), "state": sat.state}, fh, indent=2)
    if args.countermodel and not valid:
        with open(args.countermodel, "w") as fh:
            json.dump({"model": model_to_dict(refute.witness), "state": refute.state}, fh, indent=2)
    out.emit(text, data)
    if args.sat:
        return OK if sat.satisfiable else FALSE
    return OK if valid else FALSE


def cmd_check(args, cfg, out):
    script = load_script(args.proof)
    v = check_proof(script, cfg.r3Bound, cfg.flClosureCap)
    data = {"status": v.status}
    if v.status == "Rejected":
        data.update(line=v.line, reason=v.reason)
    if v.k is not None:
        data["k"] = v.k
    out.emit(str(v), data)
    return OK if v.accepted else FALSE


def demo_anne(cfg=None) -> tuple:
    """Run the two-state example end to end: ``(report lines, all_ok, data)``."""
    cfg = cfg or Config()
    lines, ok, data = [], True, {}
    claims = (("spec p", anne.SPEC_P), ("spec q", anne.SPEC_Q), ("combined", anne.COMBINED))
    expected = {"corrected": ("3/5", "3/5", "1/5"), "published": ("4/5", "3/5", "2/5")}
    claimed = ("3/5", "3/5", "1/5")
    for label, weights in (("corrected", anne.CORRECTED_WEIGHTS), ("published", anne.LITERAL_WEIGHTS)):
        pm = anne.model(weights)
        lines.append(f"{label} weights v1={weights[0]}, v2={weights[1]}, v3={weights[2]}:")
        got = []
        for (name, g), want, claim in zip(claims, expected[label], claimed):
            value = str(mu(pm, anne.S, g))
            got.append(value)
            note = "" if value == claim else f"   differs from the claimed {claim}"
            lines.append(f"  mu(s, {print_formula(g)}) = {value}{note}")
            ok &= value == want
        data[label] = got
    lines.append("the published weights do not reproduce the claimed credences; "
                 "the corrected weights reproduce all three claims")

    q = BoundsQuery(anne.FRAME, anne.S, anne.CONSTRAINTS, anne.COMBINED)
    r = solve_bounds(q, valuation_cap=cfg.valuationCap)
    fr = frechet_lower_bound(anne.CONSTRAINTS, anne.COMBINED, cfg.flClosureCap)
    lines.append(f"bounds over {r.n_valuations} valuations ({r.n_profiles} profiles): "
                 f"min = {r.minimum}, max = {r.maximum}")
    attained = "true" if r.min_attained else "false"
    lines.append(f"min credence = {r.minimum}; frechet = {fr}; attained = {attained}")
    ok &= r.feasible and str(r.minimum) == "1/5" and r.min_attained and str(fr) == "1/5"
    data.update(min=str(r.minimum), frechet=str(fr), attained=r.min_attained, ok=ok)
    lines.append("ok" if ok else "MISMATCH")
    return lines, ok, data


def cmd_demo_anne(args, cfg, out):
    lines, ok, data = demo_anne(cfg)
    out.emit("\n".join(lines), data)
    return OK if ok else FALSE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--r3-bound", type=int, default=argparse.SUPPRESS, metavar="K",
                        help="check R3 premises for k up to K")

    ap = argparse.ArgumentParser(prog="pedalkit", parents=[common],
                                 description="PDL with a global box, credences and proof checking")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="truth of a formula at a state")
    p.add_argument("model")
    p.add_argument("state", type=int)
    p.add_argument("formula")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("mu", parents=[common], help="credence of a formula at a state")
    p.add_argument("model")
    p.add_argument("state", type=int)
    p.add_argument("formula")
    p.set_defaults(fn=cmd_mu)

    p = sub.add_parser("bounds", parents=[common], help="min/max credence under constraints")
    p.add_argument("query")
    p.add_argument("--witness", help="write the minimizing credence model here")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("decide", parents=[common], help="validity / satisfiability")
    p.add_argument("formula")
    p.add_argument("--sat", action="store_true", help="exit status reflects satisfiability")
    p.add_argument("--witness", help="write a satisfying model here")
    p.add_argument("--countermodel", help="write a falsifying model here")
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("check", parents=[common], help="check a proof script")
    p.add_argument("proof")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("demo-anne", parents=[common], help="run the two-state example")
    p.set_defaults(fn=cmd_demo_anne)
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = Config.load(args.config) if getattr(args, "config", None) else Config()
        if getattr(args, "r3_bound", None) is not None:
            cfg.r3Bound = args.r3_bound
        if getattr(args, "json", False):
            cfg.outputFormat = "json"
        cfg.validate()
    except (OSError, ValueError) as e:
        print(f"error: config: {e}", file=stderr)
        return INPUT_ERROR
    out = _Out(cfg, stdout)
    try:
        return args.fn(args, cfg, out)
    except CapExceeded as e:
        print(f"error: {e}", file=stderr)
        return INFEASIBLE
    except ModelError as e:
        print("error: invalid input:", file=stderr)
        for v in e.violations:
            print(f"  {v}", file=stderr)
        return INPUT_ERROR
    except ProofFormatError as e:
        print(f"error: proof file {e}", file=stderr)
        return INPUT_ERROR
    except ParseError as e:
        print(f"error: {e}", file=stderr)
        return INPUT_ERROR
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
