"""Command-line entry point: ``torelli {verify,derive,sample,walk,flow,hist}``.

Exit codes: 0 pass, 1 verdict false, 2 usage error, 3 budget exhausted,
4 infeasible boundary data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET, EXIT_INFEASIBLE = 0, 1, 2, 3, 4

# defaults for options that may also come from --config
DEFAULTS = {
    "surface": "4hs",
    "c": None,
    "order": "grevlex",
    "budget": 10**6,
    "pairs": 10**5,
    "variant": "goldman",
    "row_variant": "ks",
    "seed": 0,
    "start_seed": None,
    "steps": 1000,
    "n": 1000,
    "method": "rep",
    "gens": None,
    "T": 1.0,
    "dt": 1e-3,
    "record_every": 1,
    "bins": 20,
    "coords": "t12,t13,t23",
    "trials": 1000,
}


class UsageError(Exception):
    pass


def _parse_config(path) -> dict:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        cfg[key] = value
    return cfg


def _coerce(key, value):
    if value is None:
        return None
    default = DEFAULTS[key]
    if isinstance(default, bool):
        return str(value).lower() in {"1", "true", "yes", "on"}
    if isinstance(default, int) and not isinstance(value, int):
        return int(float(value)) if key in {"budget", "pairs"} else int(value)
    if isinstance(default, float) and not isinstance(value, float):
        return float(value)
    return value


def _resolve(args, cfg):
    for key in DEFAULTS:
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            setattr(args, key, _coerce(key, cfg.get(key, DEFAULTS[key])))
        else:
            setattr(args, key, _coerce(key, getattr(args, key)))


def _floats(text, what="--c"):
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"{what} expects comma-separated numbers, got {text!r}") from None


def _boundary(args):
    from .charvar import check_boundary_value, get_surface

    if args.c is None:
        n = get_surface(args.surface).n_boundary
        raise UsageError(f"--c with {n} comma-separated values is required for surface {args.surface}")
    try:
        return check_boundary_value(args.surface, _floats(args.c))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    from .charvar import relation_k, sum_product, verify_relation_identity
    from .polyring import variables

    if args.check == "relation":
        ks, kp = sum_product()
        T4 = variables()[0]
        diff = relation_k() - (kp - T4 * (ks - T4))
        ok = verify_relation_identity()
        payload = {
            "command": "verify",
            "check": "relation",
            "surface": args.surface,
            "verdict": ok,
            "difference_terms": len(diff.terms),
        }
        _emit(args, payload, f"relation k = kp - t4 (ks - t4): {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_FALSE

    if args.check == "twists":
        from .su2dyn import TwistValidationError, twist_table, validate_rule

        rules = {}
        ok = True
        try:
            table = twist_table(args.surface)
        except TwistValidationError as exc:
            _emit(args, {"command": "verify", "check": "twists", "surface": args.surface,
                         "verdict": False, "error": str(exc)}, f"twists: FAIL ({exc})")
            return EXIT_FALSE
        for name, rule in table.items():
            try:
                rules[name] = validate_rule(args.surface, rule, trials=args.trials, seed=args.seed)
            except TwistValidationError as exc:
                ok = False
                rules[name] = {"error": str(exc)}
        payload = {"command": "verify", "check": "twists", "surface": args.surface,
                   "verdict": ok, "rules": rules}
        lines = [f"{n}: {r}" for n, r in rules.items()]
        _emit(args, payload, "\n".join(lines + [f"twists: {'PASS' if ok else 'FAIL'}"]))
        return EXIT_OK if ok else EXIT_FALSE

    from .groebner import BudgetExceeded, transversality_certificate

    try:
        cert = transversality_certificate(
            args.surface,
            order=args.order,
            max_steps=args.budget,
            max_pairs=args.pairs,
            variant=args.variant,
            witness=not args.no_witness,
            seed=args.seed,
        )
    except BudgetExceeded as exc:
        payload = {"command": "verify", "check": "transversality", "surface": args.surface,
                   "order": args.order, "verdict": None, "budget_exhausted": True,
                   "error": str(exc), "stats": exc.stats}
        _emit(args, payload, f"transversality: BUDGET EXHAUSTED ({exc})")
        return EXIT_BUDGET
    payload = {"command": "verify", "check": "transversality", **cert.to_json()}
    text = [f"surface {cert.surface}, order {cert.order}, bivector {cert.variant}"]
    for c in cert.checks:
        text.append(
            f"  GB({c.label}): {len(c.gb)} elements; residue "
            f"{'nonzero' if c.nonzero else 'ZERO'} ({len(c.residue.terms)} terms); "
            f"witness {'found' if c.witness else 'none'}"
        )
    text.append(f"transversality: {'PASS' if cert.verdict else 'FAIL'}")
    _emit(args, payload, "\n".join(text))
    return EXIT_OK if cert.verdict else EXIT_FALSE


# ---------------------------------------------------------------- derive


def cmd_derive(args) -> int:
    from .charvar import resolve_poly, surface_kind
    from .locus import dependency_poly, try_quadratic_split
    from .poisson import ham_field
    from .polyring import VARS, PolySyntaxError

    if args.what == "s":
        res = dependency_poly(args.surface, args.row_variant)
        s = res.s
        payload = {"command": "derive", "what": "s", "surface": surface_kind(args.surface).value,
                   "row_variant": args.row_variant, "rows": list(res.row_labels),
                   "poly": str(s), "terms": len(s.terms), "degree": s.total_degree()}
        _emit(args, payload, str(s))
        return EXIT_OK

    if args.what == "split":
        if args.var is None:
            raise UsageError("derive split needs --var")
        if args.var not in VARS:
            raise UsageError(f"unknown variable {args.var!r}")
        try:
            p = resolve_poly(args.poly) if args.poly else dependency_poly(args.surface, args.row_variant).s
        except PolySyntaxError as exc:
            raise UsageError(f"--poly: {exc}") from None
        pair = try_quadratic_split(p, args.var)
        payload = {"command": "derive", "what": "split", "var": args.var,
                   "factors": [str(f) for f in pair] if pair else None}
        _emit(args, payload, "no split" if pair is None else f"({pair[0]}) * ({pair[1]})")
        return EXIT_OK

    if args.f is None:
        raise UsageError("derive hamfield needs --f")
    try:
        f = resolve_poly(args.f)
    except (PolySyntaxError, ValueError) as exc:
        raise UsageError(f"--f: {exc}") from None
    v = ham_field(args.surface, f, args.variant)
    comps = {name: str(c) for name, c in zip(VARS, v.comps)}
    payload = {"command": "derive", "what": "hamfield", "surface": surface_kind(args.surface).value,
               "variant": args.variant, "f": str(f), "components": comps}
    _emit(args, payload, "\n".join(f"d/d{n}: {c}" for n, c in comps.items()))
    return EXIT_OK


# ---------------------------------------------------------------- numerics


def _write_rows(rows, out):
    from .su2dyn import write_jsonl

    if out:
        return write_jsonl(rows, out)
    n = 0
    for row in rows:
        sys.stdout.write(json.dumps(row) + "\n")
        n += 1
    return n


def cmd_sample(args) -> int:
    from .charvar import SPHERE, surface_kind
    from .su2dyn import liouville_sample_4hs, sample_rep, trace_coords

    c = _boundary(args)
    if args.method == "liouville":
        if surface_kind(args.surface) is not SPHERE:
            raise UsageError("the Liouville sampler is only available for --surface 4hs")
        pts = liouville_sample_4hs(c, args.n, seed=args.seed)
    else:
        pts = np.array([trace_coords(sample_rep(args.surface, c, seed=args.seed + i)) for i in range(args.n)])
    rows = ({"step": i + 1, "x": [float(v) for v in x], "gen": args.method} for i, x in enumerate(pts))
    n = _write_rows(rows, args.out)
    if args.out:
        payload = {"command": "sample", "surface": args.surface, "c": list(c), "n": n,
                   "method": args.method, "seed": args.seed, "out": args.out}
        _emit(args, payload, f"wrote {n} points to {args.out}")
    return EXIT_OK


def cmd_walk(args) -> int:
    from .charvar import boundary_residual
    from .su2dyn import sample_rep, walk

    c = _boundary(args)
    gens = [g.strip() for g in args.gens.split(",")] if args.gens else None
    start_seed = args.seed if args.start_seed is None else args.start_seed
    r0 = sample_rep(args.surface, c, seed=start_seed)
    try:
        res = walk(args.surface, r0, gens=gens, steps=args.steps, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    n = _write_rows(res.jsonl_rows(), args.out)
    if args.out:
        worst = max(float(np.max(np.abs(boundary_residual(args.surface, c, x)))) for x in res.points[:: max(1, n // 1000)])
        payload = {"command": "walk", "surface": args.surface, "c": list(c), "steps": n,
                   "seed": args.seed, "gens": gens, "out": args.out, "max_residual_sampled": worst}
        _emit(args, payload, f"wrote {n} steps to {args.out}")
    return EXIT_OK


def cmd_flow(args) -> int:
    from .charvar import boundary_residual, resolve_poly
    from .polyring import PolySyntaxError
    from .su2dyn import FlowError, flow, sample_rep, trace_coords

    c = _boundary(args)
    if args.f is None:
        raise UsageError("flow needs --f")
    try:
        f = resolve_poly(args.f)
    except (PolySyntaxError, ValueError) as exc:
        raise UsageError(f"--f: {exc}") from None
    x0 = trace_coords(sample_rep(args.surface, c, seed=args.seed))
    try:
        traj = flow(args.surface, x0, f, T=args.T, dt=args.dt, project=args.project,
                    variant=args.variant, record_every=args.record_every)
    except FlowError as exc:
        payload = {"command": "flow", "verdict": False, "error": str(exc)}
        _emit(args, payload, f"flow rejected: {exc}")
        return EXIT_FALSE
    fvals = [float(f.eval(x, exact=False)) for x in traj]
    rows = ({"step": i * args.record_every, "x": [float(v) for v in x], "gen": "flow"} for i, x in enumerate(traj))
    n = _write_rows(rows, args.out)
    if args.out:
        payload = {"command": "flow", "verdict": True, "surface": args.surface, "c": list(c),
                   "f": str(f), "T": args.T, "dt": args.dt, "project": args.project, "rows": n,
                   "f_drift": max(abs(v - fvals[0]) for v in fvals),
                   "final_residual": float(np.max(np.abs(boundary_residual(args.surface, c, traj[-1])))),
                   "out": args.out}
        _emit(args, payload, f"wrote {n} states to {args.out}")
    return EXIT_OK


def _load_hist(path, bins, coords):
    from .su2dyn import histogram, read_hist_csv, read_jsonl_points

    path = str(path)
    if path.endswith(".csv"):
        return read_hist_csv(path)
    return histogram(read_jsonl_points(path), bins=bins, coords=coords)


def cmd_hist(args) -> int:
    from .polyring import VARS
    from .su2dyn import tv, write_hist_csv

    coords = tuple(c.strip() for c in args.coords.split(","))
    bad = [c for c in coords if c not in VARS]
    if bad:
        raise UsageError(f"unknown coordinates {bad}")
    if args.input is None:
        raise UsageError("hist needs --input")
    try:
        h = _load_hist(args.input, args.bins, coords)
        other = _load_hist(args.compare, args.bins, coords) if args.compare else None
        dist = tv(h, other) if other is not None else None
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        write_hist_csv(h, args.out)
    payload = {"command": "hist", "bins": h.bins, "coords": list(h.coords), "total": h.total,
               "out": args.out, "tv": dist}
    text = f"{h.total} points in {h.bins}^{len(h.coords)} bins"
    if dist is not None:
        text += f"\nTV = {dist:.6f}"
    _emit(args, payload, text)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file overriding defaults")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--surface", choices=["4hs", "2ht"], default=None)
    common.add_argument("--seed", type=int, default=None)

    p = argparse.ArgumentParser(prog="torelli", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a symbolic certificate")
    v.add_argument("check", choices=["relation", "transversality", "twists"])
    v.add_argument("--budget", type=int, default=None, help="reduction-step budget")
    v.add_argument("--pairs", type=int, default=None, help="S-pair budget")
    v.add_argument("--order", choices=["grevlex", "lex"], default=None)
    v.add_argument("--variant", choices=["goldman", "literal"], default=None, help="torus bivector table")
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--no-witness", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("derive", parents=[common], help="print a derived polynomial object")
    d.add_argument("what", choices=["s", "split", "hamfield"])
    d.add_argument("--row-variant", dest="row_variant", choices=["ks", "kp"], default=None)
    d.add_argument("--var")
    d.add_argument("--poly", help="polynomial to split (default: the surface's s)")
    d.add_argument("--f", help="Hamiltonian, as polynomial text or a name such as 2ht:p12")
    d.add_argument("--variant", choices=["goldman", "literal"], default=None)
    d.set_defaults(func=cmd_derive)

    s = sub.add_parser("sample", parents=[common], help="sample points of a relative character variety")
    s.add_argument("--c")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--method", choices=["rep", "liouville"], default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    w = sub.add_parser("walk", parents=[common], help="random walk of Dehn twists")
    w.add_argument("--c")
    w.add_argument("--steps", type=int, default=None)
    w.add_argument("--gens", help="comma-separated twist names (default: all)")
    w.add_argument("--start-seed", dest="start_seed", type=int, default=None)
    w.add_argument("--out")
    w.set_defaults(func=cmd_walk)

    f = sub.add_parser("flow", parents=[common], help="integrate a Hamiltonian flow")
    f.add_argument("--c")
    f.add_argument("--f")
    f.add_argument("--T", type=float, default=None)
    f.add_argument("--dt", type=float, default=None)
    f.add_argument("--project", action="store_true")
    f.add_argument("--variant", choices=["goldman", "literal"], default=None)
    f.add_argument("--record-every", dest="record_every", type=int, default=None)
    f.add_argument("--out")
    f.set_defaults(func=cmd_flow)

    h = sub.add_parser("hist", parents=[common], help="histogram a point stream, optionally compare")
    h.add_argument("--input", help="JSONL point stream or histogram CSV")
    h.add_argument("--bins", type=int, default=None)
    h.add_argument("--coords", default=None)
    h.add_argument("--compare", help="second JSONL or CSV file; prints the TV distance")
    h.add_argument("--out", help="write the histogram CSV here")
    h.set_defaults(func=cmd_hist)
    return p


def main(argv=None) -> int:
    from .groebner import BudgetExceeded
    from .su2dyn import InfeasibleBoundary

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _parse_config(args.config) if args.config else {}
        _resolve(args, cfg)
        return args.func(args)
    except UsageError as exc:
        print(f"torelli: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"torelli: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"torelli: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InfeasibleBoundary as exc:
        print(f"torelli: infeasible boundary data: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
