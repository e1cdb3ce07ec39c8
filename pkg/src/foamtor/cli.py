"""Command-line front end.

Every command is deterministic given --seed (default from FOAMTOR_SEED), and
every numeric claim of the library is reproducible by a one-line invocation;
see README.  Exit code 0 means all internal consistency checks passed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .foam import FoamError, builtin, cellular_homology, parse_foam, reduce_foam
from .groups import get_group
from .partition import (fit_scaling, fit_toy, toy_laplace, z_char_appendix,
                        z_char_surface, z_mc, zestimates_csv, zestimates_from_csv)
from .torsion import torsion_at, torus_volume_csv, torus_volume_grid
from .twisted import min_b2


def _load_foam(source):
    if source.startswith("@") or os.path.exists(source):
        path = source.lstrip("@")
        with open(path, "r", encoding="utf-8") as fh:
            return parse_foam(fh.read(), name=os.path.basename(path))
    return builtin(source)


def _tau_grid(source):
    lo, hi, n = source.split(":")
    return np.logspace(math.log10(float(lo)), math.log10(float(hi)), int(n))


def _emit(args, payload, default=str):
    text = json.dumps(payload, indent=2, default=default)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _common(sub, samples_default=100):
    sub.add_argument("--foam", required=True,
                     help="builtin key (sphere, torus, genus:g, appendix, dunce_hat, "
                          "projective_plane) or a foam file path")
    sub.add_argument("--group", default="su2", choices=["su2", "u1"])
    sub.add_argument("--samples", type=int, default=samples_default)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--format", default="json", choices=["json", "csv"])
    sub.add_argument("--out", default=None)


def _seed_of(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FOAMTOR_SEED")
    return int(env) if env else 0


def _config_echo(args, seed):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    cfg["seed"] = seed
    cfg["version"] = __version__
    return cfg


def cmd_analyze(args):
    seed = _seed_of(args)
    rng = np.random.default_rng(seed)
    foam = reduce_foam(_load_foam(args.foam))
    cell = cellular_homology(foam)
    report = min_b2(foam, args.group, args.samples, rng)
    group = get_group(args.group)
    warnings = []
    if report.stratified:
        warnings.append("multiple (b0, b2) strata sampled: representation variety "
                        "is stratified; the divergence prediction uses the minimum")
    if report.rank_warnings:
        warnings.append("%d samples had thin singular-value gaps" % report.rank_warnings)
    payload = {
        "config": _config_echo(args, seed),
        "foam": {"name": foam.name, "V": foam.V, "E": foam.E, "F": foam.F,
                 "euler": foam.euler},
        "cellular": {"betti": list(cell.betti), "euler": cell.euler},
        "twisted": {
            "histogram_b2": {str(k): v for k, v in report.histogram.items()},
            "strata": [{"b0": k[0], "b2": k[1], "count": v}
                       for k, v in report.strata.items()],
            "b2_0": report.b2_0,
            "possibly_singular": sum(s.possibly_singular for s in report.samples),
        },
        "predicted_omega": report.b2_0,
        "euler_identity_ok": all(
            (row[0] - row[1] + row[2]) == group.dim_g * foam.euler for row in report.rows),
        "warnings": warnings,
    }
    _emit(args, payload)
    ok = payload["euler_identity_ok"] and report.rank_warnings == 0
    return 0 if ok else 1


def cmd_flat(args):
    seed = _seed_of(args)
    rng = np.random.default_rng(seed)
    from .twisted import sample_flat
    foam, samples = sample_flat(_load_foam(args.foam), args.group, args.samples, rng)
    payload = {"config": _config_echo(args, seed),
               "foam": foam.name,
               "samples": [s.to_json() for s in samples]}
    _emit(args, payload)
    return 0 if samples else 1


def cmd_ztau(args):
    seed = _seed_of(args)
    foam = reduce_foam(_load_foam(args.foam))
    taus = _tau_grid(args.tau_grid)
    points = []
    for tau in taus:
        if args.method == "mc":
            points.append(z_mc(foam, args.group, float(tau), args.samples,
                               seed=seed, n_workers=args.workers))
        else:
            points.append(_char_point(foam, args.group, float(tau)))
    if args.format == "csv":
        text = zestimates_csv(points)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, {"config": _config_echo(args, seed),
                     "points": [p.to_json() for p in points]})
    return 0


def _char_point(foam, group, tau):
    if get_group(group).name != "su2":
        raise SystemExit("character evaluators are implemented for SU(2)")
    name = foam.name
    if name.startswith("genus"):
        return z_char_surface(int(name[5:]), tau)
    if name == "sphere":
        return z_char_surface(0, tau)
    if name == "appendix":
        return z_char_appendix(tau)
    raise SystemExit("no character evaluator for foam %r; use --method mc" % name)


def cmd_fit(args):
    points = zestimates_from_csv(open(args.infile, encoding="utf-8").read()) \
        if args.infile else None
    if points is None:
        raise SystemExit("fit needs --in CSV produced by ztau")
    fit = fit_scaling(points, model=args.model)
    payload = {"config": {"in": args.infile, "model": args.model,
                          "version": __version__},
               "fit": fit.to_json()}
    _emit(args, payload)
    return 0


def cmd_torsion(args):
    seed = _seed_of(args)
    rng = np.random.default_rng(seed)
    if args.check == "torus-volume":
        rows = torus_volume_grid(args.grid, rng)
        max_err = max(r[4] for r in rows)
        if args.format == "csv":
            text = torus_volume_csv(rows)
            if args.out:
                open(args.out, "w", encoding="utf-8").write(text)
            else:
                sys.stdout.write(text)
        else:
            _emit(args, {"config": _config_echo(args, seed),
                         "check": "torus-volume",
                         "grid": args.grid, "max_abs_error": max_err,
                         "tolerance": 1e-10, "passed": bool(max_err < 1e-10)})
        return 0 if max_err < 1e-10 else 1
    from .twisted import sample_flat
    foam, samples = sample_flat(_load_foam(args.foam), args.group, args.samples, rng)
    values = []
    for s in samples:
        try:
            values.append(torsion_at(foam, s, rng).to_json())
        except ValueError as exc:
            values.append({"error": str(exc)})
    payload = {"config": _config_echo(args, seed), "foam": foam.name,
               "torsion": values}
    _emit(args, payload)
    return 0


def cmd_toy(args):
    taus = _tau_grid(args.tau_grid)
    values = [toy_laplace(float(t), args.box) for t in taus]
    fit = fit_toy(taus, values, box_halfwidth=args.box)
    payload = {
        "config": {"tau_grid": list(map(float, taus)), "box": args.box,
                   "version": __version__},
        "points": [{"tau": float(t), "value": v} for t, v in zip(taus, values)],
        "fit": fit.to_json(),
        "selected_model": "sqrt(tau)*log(1/tau)" if fit.with_log_correction else "pure power",
    }
    _emit(args, payload)
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="foamtor",
        description="Divergence degrees, twisted Betti numbers and Reidemeister "
                    "torsion of heat-kernel-regularized flat gauge models on foams.")
    p.add_argument("--version", action="version", version=__version__)
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("analyze", help="cellular + twisted Betti analysis, b2_0, predicted omega")
    _common(s)
    s.set_defaults(func=cmd_analyze)

    s = subs.add_parser("flat", help="dump flat-connection samples")
    _common(s, samples_default=10)
    s.set_defaults(func=cmd_flat)

    s = subs.add_parser("ztau", help="evaluate Z_tau on a tau grid")
    _common(s, samples_default=10 ** 6)
    s.add_argument("--method", default="char", choices=["char", "mc"])
    s.add_argument("--tau-grid", default="1e-3:1e-1:8")
    s.set_defaults(func=cmd_ztau)

    s = subs.add_parser("fit", help="fit the divergence exponent from a ztau CSV")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--model", default="auto", choices=["auto", "pure", "with-log"])
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_fit)

    s = subs.add_parser("torsion", help="torsion at flat samples, or --check torus-volume")
    _common(s, samples_default=10)
    s.add_argument("--check", default=None, choices=[None, "torus-volume"])
    s.add_argument("--grid", type=int, default=20)
    s.set_defaults(func=cmd_torsion)

    s = subs.add_parser("toy", help="toy Laplace integral and its anomalous scaling fit")
    s.add_argument("--tau-grid", default="1e-6:1e-2:9")
    s.add_argument("--box", type=float, default=1.0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_toy)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FoamError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
