"""Command-line front end.

One curve file per invocation; every analysis is a subcommand.  Exit codes:
0 on success, 1 on a domain error (with a stable machine-readable code), 2
on a parse error.  --json emits a deterministic JSON report (sorted keys,
canonical rational strings).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import complexes as cx
from . import counting, curvefile, fanmodel, stacky
from . import paramcurve as pc
from . import tropgraph
from .errors import ConstraintCountMismatch, ParseError, TropicorrError
from .exactla import CoeffGroup, GroupSize


def _group_from_args(args, char: int) -> CoeffGroup:
    tag = getattr(args, "group", "Z") or "Z"
    if tag == "Z":
        return CoeffGroup.integers()
    if tag == "Q":
        return CoeffGroup.rationals()
    if tag == "Fp":
        return CoeffGroup.field(char)
    if tag == "kstar":
        return CoeffGroup.units(char)
    raise ParseError(f"unknown group {tag!r}")


def _size_json(s: GroupSize) -> dict:
    return {"free_rank": s.free_rank, "kdim": s.kdim,
            "finite_order": s.finite_order}


def _group_json(g) -> dict:
    return {"rank": g.rank, "torsion": list(g.torsion)}


def _need_constraints(constraints):
    if constraints is None:
        raise ConstraintCountMismatch("the curve file carries no constraints")
    return constraints


def cmd_validate(p, constraints, char, args):
    violations = pc.param_violations(p)
    return {"valid": not violations, "violations": violations}, (0 if not violations else 1)


def cmd_info(p, constraints, char, args):
    pc.require_balanced(p)
    g = tropgraph.genus(p.curve)
    out = {
        "genus": g,
        "degree": [[list(d), m] for d, m in pc.degree(p)],
        "rank": pc.rank(p),
        "zero_slope_bounded": pc.zero_slope_bounded_count(p),
        "stable": tropgraph.is_stable(p.curve),
        "finite_vertices": len(p.curve.finite_vertices),
        "infinite_vertices": len(p.curve.infinite_vertices),
    }
    if g == 1:
        out["tropical_j"] = str(pc.tropical_j(p))
    if constraints is not None:
        rep = pc.check_constraint(p, constraints)
        out["constraint"] = {"satisfies": rep.satisfies, "simple": rep.simple,
                             "codim": rep.codim}
    return out, 0


def cmd_stabilize(p, constraints, char, args):
    st = pc.stabilize_param(p)
    return {"curve": curvefile.curve_to_json(st, constraints, char)}, 0


def cmd_tr(p, constraints, char, args):
    tr = fanmodel.gamma_tr(p)
    return {"curve": curvefile.curve_to_json(tr, constraints, char)}, 0


def cmd_fan(p, constraints, char, args):
    tr = fanmodel.gamma_tr(p)
    fm = fanmodel.fan_model(tr)
    mults = fanmodel.cone_multiplicities(fm, tr)
    return {"fan": fanmodel.fan_to_json(fm, mults)}, 0


def cmd_complex(p, constraints, char, args):
    spec = cx.ComplexSpec(args.variant,
                          _need_constraints(constraints) if args.constrained else None,
                          elliptic=args.elliptic)
    rep = cx.compute(p, spec, _group_from_args(args, char))
    nrows = len(rep.matrix)
    return {
        "variant": args.variant,
        "group": str(rep.group),
        "matrix_shape": [nrows, rep.layout.domain_dim],
        "E1_rank": rep.E1_rank,
        "E2": _group_json(rep.E2),
        "zero_slope_bounded": rep.c_gamma,
        "E1_size": _size_json(rep.E1_size),
        "E2_size": _size_json(rep.E2_size),
    }, 0


def cmd_regular(p, constraints, char, args):
    group = _group_from_args(args, char)
    verdict = cx.regularity(p, constraints if args.constrained else None,
                            group, elliptic=args.elliptic)
    return {
        "group": str(group),
        "g_regular": verdict.g_regular,
        "elliptically_regular": verdict.elliptically_regular,
        "obstruction": _size_json(verdict.obstruction),
    }, 0


def _count_json(res) -> dict:
    hyp = res.hypotheses
    return {
        "count": str(res.count),
        "factorization": [str(res.torsor_order), str(res.stacky_factor)],
        "hypotheses": {
            "trivalent": hyp.trivalent,
            "satisfies_A": hyp.satisfies_A,
            "codim_match": hyp.codim_match,
            "no_zero_slope_bounded": hyp.no_zero_slope_bounded,
            "char_ok": hyp.char_ok,
            "regular": hyp.regular,
            "elliptic_regular": hyp.elliptic_regular,
        },
        "cross_checks": list(res.cross_checks),
    }


def cmd_count(p, constraints, char, args):
    res = counting.correspondence_count(p, _need_constraints(constraints), char)
    return _count_json(res), 0


def cmd_count_elliptic(p, constraints, char, args):
    res = counting.elliptic_count(p, _need_constraints(constraints), char)
    return _count_json(res), 0


def cmd_stacky(p, constraints, char, args):
    tr = fanmodel.gamma_tr(p)
    a = fanmodel.ramification(tr, 1)["minimal_a"]
    st = stacky.stacky_data(tr, a)
    ns = stacky.node_stack(tr)
    return {
        "stacky": stacky.stacky_to_json(st),
        "node_orders": dict(sorted(ns.node_orders.items())),
        "marked_orders": dict(sorted(ns.marked_orders.items())),
        "dm": stacky.is_dm(p, char),
        "char": char,
    }, 0


def cmd_reduction_data(p, constraints, char, args):
    tr = fanmodel.gamma_tr(p)
    table = {}
    for v in tr.curve.finite_vertices:
        table[v] = [[eid, list(vec)]
                    for eid, vec in fanmodel.reduction_exponents(tr, v)]
    return {"exponents": table}, 0


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "stabilize": cmd_stabilize,
    "tr": cmd_tr,
    "fan": cmd_fan,
    "complex": cmd_complex,
    "regular": cmd_regular,
    "count": cmd_count,
    "count-elliptic": cmd_count_elliptic,
    "stacky": cmd_stacky,
    "reduction-data": cmd_reduction_data,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tropicorr",
        description="exact combinatorics of parameterized tropical curves")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("file", help="curve JSON file (tropicorr/1)")
        sp.add_argument("--json", action="store_true",
                        help="emit the full JSON report")
        sp.add_argument("--char", type=int, default=None,
                        help="residue characteristic (overrides the file)")
        sp.add_argument("--group", choices=["Z", "Q", "Fp", "kstar"],
                        default="Z", help="coefficient group")
        sp.add_argument("--constrained", action="store_true",
                        help="use the file's constraints")
        sp.add_argument("--elliptic", action="store_true",
                        help="augment with the cycle (genus one)")
        sp.add_argument("--variant", choices=["b", "beta"], default="beta",
                        help="plain (b) or stacky (beta) complex")
        sp.add_argument("--out", default=None,
                        help="write the JSON report to this file")
    return ap


def _flat(prefix, value, lines):
    if isinstance(value, dict):
        for k in value:
            _flat(f"{prefix}.{k}" if prefix else str(k), value[k], lines)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        lines.append(f"{prefix}: {json.dumps(value)}")
    else:
        lines.append(f"{prefix}: {value}")


def _emit(report, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return
    if args.json:
        sys.stdout.write(text)
    else:
        lines = []
        _flat("", report["result"], lines)
        sys.stdout.write("\n".join(lines) + "\n")


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        p, constraints, file_char, raw = curvefile.load(args.file)
        char = file_char if args.char is None else args.char
        warnings = []
        if args.char is not None and file_char and args.char != file_char:
            warnings.append(
                f"--char {args.char} overrides char {file_char} from the file")
        payload, code = COMMANDS[args.command](p, constraints, char, args)
        report = {
            "command": args.command,
            "input": {"path": args.file,
                      "sha256": hashlib.sha256(raw).hexdigest()},
            "result": payload,
            "warnings": warnings,
        }
        _emit(report, args)
        return code
    except ParseError as exc:
        sys.stdout.write(json.dumps(
            {"error": {"code": exc.code, "message": str(exc)}}) + "\n")
        return 2
    except TropicorrError as exc:
        sys.stdout.write(json.dumps(
            {"error": {"code": exc.code, "message": str(exc)}},
            sort_keys=True) + "\n")
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
