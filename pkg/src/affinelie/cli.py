"""Command-line interface: ``affinelie <command> [options]``.

Exit codes: 0 success, 1 a check failed (or the point is off the variety), 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, suites
from .algebra import from_json, is_complete
from .atlas import (ATLAS_ALPHAS, OffVariety, VarietyPoint, canonical_point, canonical_representative, classify,
                    family_product, invariants, make_tag, product_to_point, variety_residual)
from .geodesics import FORMULATIONS, closed_form, integrate
from .projective import LinearRep, projective_etale_check, sl2_block_rep, sl2_left_regular_rep
from .reps import derivative_residual, etale_check, rho, verify_homomorphism
from .transforms import AFF_DIMS, PAIRINGS, aff_transform, case_summary


class InputError(Exception):
    pass


# --- output -----------------------------------------------------------------------

def clean(obj):
    """JSON-safe copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    return obj


def dumps(doc) -> str:
    return json.dumps(clean(doc), sort_keys=True, indent=2) + "\n"


def _text(doc, prefix="") -> list[str]:
    lines = []
    for k, v in sorted(clean(doc).items()):
        if isinstance(v, dict):
            lines += _text(v, f"{prefix}{k}.")
        else:
            lines.append(f"{prefix}{k}: {json.dumps(v)}")
    return lines


def emit(doc, args, rows=None, header=None):
    fmt = args.format or ("csv" if rows is not None else "json")
    if fmt == "csv":
        if rows is None:
            raise InputError(f"csv output is only available for 'geodesic', not '{args.command}'")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out = buf.getvalue()
    elif fmt == "text":
        out = "\n".join(_text(doc)) + "\n"
    else:
        out = dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# --- parsing helpers ----------------------------------------------------------------

def floats(text: str, n: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(s) for s in text.replace(" ", "").split(",") if s != ""]
    except ValueError:
        raise InputError(f"could not parse {what} {text!r} as comma-separated numbers") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{what} needs {n} numbers, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"{what} must be finite")
    return vals


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"could not read {path}: {exc}") from None


def tolerances(args) -> dict:
    tols = dict(suites.DEFAULT_TOLS)
    if args.config:
        cfg = load_json(args.config)
        bad = [k for k in cfg if k not in tols]
        if bad or not all(isinstance(v, (int, float)) for v in cfg.values()):
            raise InputError(f"config keys must be among {sorted(tols)} with numeric values")
        tols.update({k: float(v) for k, v in cfg.items()})
    if args.tol is not None:
        tols = {k: args.tol for k in tols}
    return tols


# --- commands ---------------------------------------------------------------------

def cmd_classify(args, tols):
    if (args.point is None) == (args.product is None):
        raise InputError("give exactly one of --point or --product")
    torsion = 0.0
    if args.point is not None:
        p = VarietyPoint(*floats(args.point, 6, "--point"))
    else:
        try:
            _, prod = from_json(load_json(args.product))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad product document: {exc}") from None
        if prod is None:
            raise InputError("product document has no 'product' entry")
        try:
            p, torsion = product_to_point(prod)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    tol = tols["classify"]
    res = variety_residual(p)
    doc = {"point": list(p.as_tuple()), "residual": res, "tolerance": tol}
    if torsion > tol:
        doc.update(on_variety=False, torsion_residual=torsion)
        return doc, 1
    tag = classify(p, tol)
    if isinstance(tag, OffVariety):
        doc["on_variety"] = False
        return doc, 1
    doc.update(on_variety=True, **tag.to_dict(), invariants=invariants(canonical_representative(tag)))
    return doc, 0


def cmd_verify(args, tols):
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    try:
        report = suites.run(args.seed, tols, only, mutate=args.mutate)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    return report, 0 if report["ok"] else 1


def _aff_case(fam, alpha):
    if fam == "F1":
        return 5 if alpha == 0 else (3 if alpha == 1 else 1)
    if fam == "F2":
        return 3 if alpha == -1 else 2
    return 4 if fam in ("A1", "A2") else 6


_COORDS = {
    "F1": "(alpha, alpha, 0, 0, 0, 0)", "F2": "(alpha, -alpha, 0, alpha, 0, 0)",
    "A1": "(1, 0, 0, 0, 0, 0)", "A2": "(-1, 0, 0, -1, 0, 0)",
    "R1": "(2, 0, 0, 0, 1, 0)", "R2": "(2, 0, 0, 0, -1, 0)",
}
_COMPONENT = {"F1": "I", "F2": "II", "A1": "I", "A2": "II", "R1": "III", "R2": "III"}


def _member(fam, alpha):
    prod = family_product(fam, alpha)
    case = _aff_case(fam, alpha)
    return {
        "alpha": alpha,
        "coordinates": list(canonical_point(fam, alpha).as_tuple()),
        "special": list(make_tag(_COMPONENT[fam], fam, alpha).special),
        "complete": is_complete(prod),
        "aff_case": case,
        "aff_dim": AFF_DIMS[case],
        "invariants": invariants(prod),
    }


def cmd_atlas(args, tols):
    families = []
    for fam in ("F1", "F2", "A1", "A2", "R1", "R2"):
        entry = {"family": fam, "component": _COMPONENT[fam], "coordinates": _COORDS[fam],
                 "representation": fam.lower()}
        if fam in ATLAS_ALPHAS:
            entry["excluded"] = [0.0] if fam == "F2" else []
            entry["members"] = [_member(fam, a) for a in ATLAS_ALPHAS[fam]]
            entry["complete"] = [m["alpha"] for m in entry["members"] if m["complete"]]
        else:
            entry.update(_member(fam, None))
            entry.pop("alpha")
        families.append(entry)
    cases = [{"case": c, "dim": AFF_DIMS[c], "paired": [f if a is None else f"{f}({a:g})" for f, a in PAIRINGS[c]]}
             for c in sorted(AFF_DIMS)]
    return {"families": families, "cases": cases, "aff_dims": [AFF_DIMS[c] for c in sorted(AFF_DIMS)]}, 0


GEODESIC_HEADER = ["t", "x", "y", "v1", "v2", "x_closed", "y_closed", "residual"]


def cmd_geodesic(args, tols):
    fam = args.family.upper()
    try:
        prod = family_product(fam, args.alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.T == 0 or args.n < 2:
        raise InputError("need T != 0 and n >= 2")
    traj = integrate(prod, args.a, args.b, args.T, args.formulation, n=args.n)
    variant = args.variant or ("printed" if args.formulation == "literal" else "developed")
    try:
        cf = closed_form(fam, args.alpha, args.a, args.b, variant)
    except ValueError as exc:
        cf, note = None, str(exc)
    else:
        note = None
    rows = []
    for t, s in zip(traj.t, traj.states):
        if not np.all(np.isfinite(s)):
            break
        x, y, w1, w2 = (float(v) for v in s)
        v1, v2 = (w1 / x, w2 / x) if args.formulation == "coordinate" else (w1, w2)
        xc = yc = r = ""
        if cf is not None and (cf.domain[0] < t < cf.domain[1] or t == 0):
            cx_, cy_ = cf(np.array([t]))
            xc, yc = float(cx_[0]), float(cy_[0])
            r = max(abs(x - xc), abs(y - yc))
        rows.append([t, x, y, v1, v2, xc, yc, r])
    doc = {"family": fam, "alpha": args.alpha, "a": args.a, "b": args.b, "T": args.T,
           "formulation": args.formulation, "variant": variant, "status": traj.status,
           "escape_time": traj.escape_time, "closed_form_domain": list(cf.domain) if cf else None,
           "closed_form_note": note, "columns": GEODESIC_HEADER, "rows": rows}
    csv_rows = [[_csvnum(v) for v in row] for row in rows]
    return doc, 0, csv_rows


def _csvnum(v):
    return v if v == "" else f"{v:.12g}"


def cmd_rep(args, tols):
    try:
        rep = rho(args.family, args.alpha)
        at = floats(args.at, 2, "--at")
        mat = rep(*at)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    doc = {"label": rep.label(), "at": at, "matrix": mat}
    code = 0
    if args.verify:
        h = verify_homomorphism(rep, 100, tols["homomorphism"], args.seed)
        d = derivative_residual(rep, rep.product())
        e = etale_check(rep)
        ok = h.ok and d <= tols["derivative"] and e
        doc["verify"] = {"ok": ok, **h.residuals, "derivative": d, "etale": e,
                         "tolerances": {k: tols[k] for k in ("homomorphism", "derivative")}}
        code = 0 if ok else 1
    return doc, code


def cmd_afftrans(args, tols):
    case = args.case
    doc = {"case": case, "alpha": args.alpha, "dim": AFF_DIMS[case]}
    code = 0
    if case != 5:
        try:
            params = floats(args.params, 2 if case == 6 else 4, "--params") if args.params else None
            phi = aff_transform(case, args.alpha, *params) if params else aff_transform(case, args.alpha)
            at = floats(args.at, 2, "--at")
            X, Y = phi(*at)
        except (ValueError, TypeError) as exc:
            raise InputError(str(exc)) from None
        doc.update(params=list(phi.params), at=at, image=[float(X), float(Y)])
    elif args.params:
        raise InputError("case 5 has no closed-form family")
    if args.verify:
        if case in (1, 2) and args.alpha is None:
            raise InputError(f"case {case} needs --alpha")
        try:
            s = case_summary(case, args.alpha, args.seed, draws=20, tol=tols["affinity"])
        except ValueError as exc:
            raise InputError(str(exc)) from None
        s["tolerances"] = {"affinity": tols["affinity"], "closure": tols["closure"]}
        doc["verify"] = s
        code = 0 if s["ok"] else 1
    return doc, code


EXAMPLES = {
    "sl2-printed": (lambda: sl2_block_rep("printed"), "0,0,1,0"),
    "sl2-offset": (lambda: sl2_block_rep("offset"), "0,0,1,0"),
    "sl2-left-regular": (sl2_left_regular_rep, "1,0,0,1"),
}


def cmd_projective(args, tols):
    if (args.rep is None) == (args.example is None):
        raise InputError("give exactly one of --rep or --example")
    if args.rep:
        try:
            rep = LinearRep.from_json(load_json(args.rep))
        except (ValueError, TypeError, KeyError) as exc:
            raise InputError(f"bad representation document: {exc}") from None
        w_text = args.w
        if w_text is None:
            raise InputError("--w is required with --rep")
    else:
        build, default_w = EXAMPLES[args.example]
        rep, w_text = build(), args.w or default_w
    w = floats(w_text, None, "--w")
    try:
        r = projective_etale_check(rep, w, tols["projective"])
    except ValueError as exc:
        raise InputError(str(exc)) from None
    doc = {"label": rep.label, "n": rep.n, "m": rep.m, "w": w, "etale": r.ok, "rank": r.rank,
           "singular_values": list(r.singular_values), "trace_residual": r.trace_residual,
           "rank_rule": "rank counts singular values above 1e-10 * largest"}
    if rep.source is not None:
        doc["bracket_residual"] = rep.bracket_residual()
    return doc, 0 if r.ok else 1


COMMANDS = {
    "classify": cmd_classify, "verify": cmd_verify, "atlas": cmd_atlas, "geodesic": cmd_geodesic,
    "rep": cmd_rep, "afftrans": cmd_afftrans, "projective": cmd_projective,
}


def _global_options(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--tol", type=float, default=d(None), help="override every tolerance")
    p.add_argument("--config", default=d(None), help="JSON file of tolerance overrides")
    p.add_argument("--format", choices=("json", "csv", "text"), default=d(None))
    p.add_argument("--out", default=d(None), help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affinelie", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)

    p = sub.add_parser("classify", parents=[common], help="classify a variety point or a 2-dim product")
    p.add_argument("--point", help="alpha,beta,gamma,delta,eps,lambda")
    p.add_argument("--product", help="product JSON file (dim/product triples)")

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--only", help=f"comma-separated subset of: {', '.join(suites.SUITES)}")
    p.add_argument("--mutate", action="store_true", help=argparse.SUPPRESS)

    sub.add_parser("atlas", parents=[common], help="emit the classification atlas")

    p = sub.add_parser("geodesic", parents=[common], help="integrate a geodesic through (1, 0)")
    p.add_argument("--family", required=True, choices=("f1", "f2", "a1", "a2", "r1", "r2", "F1", "F2", "A1",
                                                       "A2", "R1", "R2"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--a", type=float, default=1.0, help="initial frame velocity, e1 component")
    p.add_argument("--b", type=float, default=0.0, help="initial frame velocity, e2 component")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--formulation", choices=tuple(FORMULATIONS), default="frame")
    p.add_argument("--variant", choices=("printed", "corrected", "developed"))

    p = sub.add_parser("rep", parents=[common], help="evaluate an affine representation")
    p.add_argument("--family", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--at", default="1,0", help="group element x,y with x > 0")
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("afftrans", parents=[common], help="affine transformation groups")
    p.add_argument("--case", type=int, required=True, choices=sorted(AFF_DIMS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--params", help="a,b,c,d (a,b for case 6); identity by default")
    p.add_argument("--at", default="1,0")
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("projective", parents=[common], help="projective etale check")
    p.add_argument("--rep", help="representation JSON file with 'matrices' (and optional 'brackets')")
    p.add_argument("--example", choices=tuple(EXAMPLES))
    p.add_argument("--w", help="comma-separated vector")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tols = tolerances(args)
        out = COMMANDS[args.command](args, tols)
        doc, code = out[0], out[1]
        if args.command == "geodesic":
            emit(doc, args, rows=out[2], header=GEODESIC_HEADER)
        else:
            emit(doc, args)
    except InputError as exc:
        print(f"affinelie {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
