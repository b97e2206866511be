"""bigktype command line: figure data, check suites, single evaluations, counts, kernel tables.

Outputs are CSV (header row, floats to 17 significant digits) and JSON
reports of the form {command, config, checks, wall_time}.  With a fixed
seed and config every file is byte-identical between runs; the measured
wall time is only written when --timing is given.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from . import checks as ck

SUITES = ("symmetries", "plancherel", "envelopes", "counting", "voronoi")


class ConfigError(ValueError):
    pass


def _num(x):
    if isinstance(x, complex):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, float):
        return format(x, ".17g")
    return x


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(float(x)) if hasattr(x, "__float__") and not isinstance(x, (int, bool))
                        else x for x in row])


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def dump_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n"


def read_config(path) -> dict:
    """Flat `key = value` lines; # starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key.replace("_", "").isalnum():
            raise ConfigError(f"{path}:{lineno}: bad key {key!r}")
        out[key] = val
    return out


def _merged(args, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    cfg = dict(defaults)
    if args.config:
        for k, v in read_config(args.config).items():
            if k not in defaults:
                raise ConfigError(f"{args.config}: unknown key {k!r} for this command")
            cfg[k] = type(defaults[k])(v) if defaults[k] is not None else v
    for k in defaults:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    cfg["seed"] = args.seed
    return cfg


def _report(command: str, config: dict, checks, wall: float, timing: bool) -> dict:
    return {"command": command, "config": config, "checks": [c.as_dict() for c in checks],
            "wall_time": wall if timing else None}


def _finish(args, command: str, config: dict, checks, t0: float, name: str) -> int:
    rep = _report(command, config, checks, time.perf_counter() - t0, args.timing)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(dump_json(rep))
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{flag} {c.name}: {c.measured:.6g} (threshold {c.relation} {c.threshold:.6g})")
    return 0 if all(c.passed for c in checks) else 1


# -- figure1 -------------------------------------------------------------------

def cmd_figure1(args) -> int:
    t0 = time.perf_counter()
    cfg = _merged(args, {"ell": 120, "q": "", "points": 601})
    ell = int(cfg["ell"])
    if ell > 200:
        raise ConfigError("figure1 needs ell <= 200")
    qs = [int(x) for x in str(cfg["q"]).split(",") if x.strip()] or \
        [ell, 100 * ell // 120, 20 * ell // 120, 0]
    data = ck.figure1_data(ell, qs, int(cfg["points"]))
    out = Path(args.out)
    for q, (v, vals) in data.items():
        write_csv(out / f"figure1_l{ell}_q{q}.csv", ["v", "value"], zip(v, vals))
    checks = ck.figure1(ell) if ell == 120 and not cfg["q"] else []
    return _finish(args, "figure1", cfg, checks, t0, "figure1.json")


# -- suites --------------------------------------------------------------------

def _suite_symmetries(cfg, out: Path):
    ell = int(cfg["ell"])
    n = int(cfg["samples"])
    seed = cfg["seed"]
    return (ck.identity_values(ell) + ck.wang_symmetry(ell, n, seed) + ck.conjugation_invariance(ell, n, seed)
            + ck.three_routes(n, seed, min(ell, 10), ell))


def _suite_plancherel(cfg, out: Path):
    ell = int(cfg["ell"])
    return (ck.haar_normalization() + ck.transform_roundtrip(min(ell, 4)) + ck.plancherel(ell)
            + ck.cartan_constant())


def _suite_envelopes(cfg, out: Path):
    from .sphtrace import default_sampler, envelope_scan

    ells = [int(x) for x in str(cfg["ells"]).split(",")]
    sampler = default_sampler(int(cfg["samples"]), cfg["seed"], 5.0)
    checks, rows = [], []
    for kind in ("zero", "half", "top", "full"):
        scan = envelope_scan(ells, kind, sampler, jobs=cfg["jobs"])
        for rep in scan.reports:
            for desc, val, env, ratio in rep.samples:
                rows.append((kind, rep.ell, rep.q, rep.theorem, desc, val, env, ratio))
        for a, b, g_obs, g_max, _ in scan.growth:
            checks.append(ck.below(f"envelope.{kind}.growth_{a}_{b}", g_obs, g_max))
        if scan.reports[0].theorem in ("thm5a", "thm5b"):
            checks.append(ck.below(f"envelope.{kind}.cutoff_violations",
                                   sum(r.cutoff_violations for r in scan.reports), 0))
    write_csv(out / "envelopes.csv", ["q_kind", "ell", "q", "theorem", "sample", "abs_phi", "envelope", "ratio"],
              rows)
    return checks


def _suite_counting(cfg, out: Path):
    L_grid = list(range(7, int(cfg["Lmax"]) + 1))
    reports = ck.counting_scan(L_grid, int(cfg["samples"]), cfg["seed"], cfg["jobs"])
    rows = []
    for lid, rep in reports.items():
        for r in rep.rows:
            rows.append((lid, r.L, r.regime, r.delta1, r.delta2, r.count, r.bound, r.ratio,
                         r.bound_name, r.sample, r.upper))
    write_csv(out / "counting_scan.csv",
              ["lemma_id", "L", "regime", "delta1", "delta2", "count", "bound", "ratio",
               "bound_name", "sample", "upper"], rows)
    checks = ck.counting_checks(reports)
    if int(cfg["straightforward"]):
        checks += ck.straightforward(seed=cfg["seed"])
    return checks


def _suite_voronoi(cfg, out: Path):
    from .voronoi import SpectralPair, decay_slope

    slope, vals = decay_slope(SpectralPair(0, 0, 0, 0))
    write_csv(out / "voronoi_decay.csv", ["x", "abs_W"], zip([10 * 10 ** (k / 8) for k in range(9)], vals))
    return (ck.voronoi_contours() + ck.voronoi_symmetries(int(cfg["samples"]), cfg["seed"])
            + [ck.below("voronoi.decay_slope", slope, -3 + 0.2)])


_SUITE_DEFAULTS = {
    "symmetries": {"ell": 6, "samples": 20},
    "plancherel": {"ell": 6},
    "envelopes": {"ells": "8,16,32,64", "samples": 200},
    "counting": {"Lmax": 30, "samples": 10, "straightforward": 1},
    "voronoi": {"samples": 20},
}


def cmd_suite(args) -> int:
    t0 = time.perf_counter()
    cfg = _merged(args, _SUITE_DEFAULTS[args.name])
    cfg["jobs"] = args.jobs
    runner = {"symmetries": _suite_symmetries, "plancherel": _suite_plancherel,
              "envelopes": _suite_envelopes, "counting": _suite_counting,
              "voronoi": _suite_voronoi}[args.name]
    checks = runner(cfg, Path(args.out))
    cfg.pop("jobs")  # parallelism must not show up in the byte-compared report
    return _finish(args, f"suite {args.name}", cfg, checks, t0, f"suite_{args.name}.json")


# -- eval ----------------------------------------------------------------------

def parse_complex(text) -> complex:
    return complex(str(text).replace(" ", "").replace("i", "j"))


def cmd_eval(args) -> int:
    from .mat2c import parse_matrix

    g = parse_matrix(args.g)
    out = {"object": args.object}
    if args.object == "phi":
        from .sphtrace import SpectralParam, phi_trace_estimate

        val, err = phi_trace_estimate(SpectralParam(parse_complex(args.nu), float(args.p), float(args.ell)), g)
        out.update(value=val, route="aligned trace quadrature", error=err)
    elif args.object == "phi_avg":
        from .mat2c import cartan
        from .sphtrace import phi_avg_reduced_estimate, phi_avg_top_estimate

        ell, q, nu = float(args.ell), float(args.q), parse_complex(args.nu)
        if q == ell:
            val, err = phi_avg_top_estimate(ell, nu, cartan(g))
            route = "q = l closed form"
        else:
            val, err = phi_avg_reduced_estimate(ell, nu, q, cartan(g))
            route = "reduced (u, v) formula"
        out.update(value=val, route=route, error=err)
    elif args.object == "kernel":
        from .voronoi import SpectralPair, voronoi_kernel

        pair = SpectralPair(parse_complex(args.nu1), parse_complex(args.nu2), int(args.p1), int(args.p2))
        val = voronoi_kernel(float(args.x), pair, float(args.P))
        out.update(value=val, route="contour", error=None)
    else:
        from . import mat2c

        fn = {"K": mat2c.dist_to_K, "S": mat2c.dist_to_S, "D": mat2c.dist_to_D, "N": mat2c.dist_to_N}
        if args.set not in fn:
            raise ConfigError(f"--set must be one of {sorted(fn)}")
        out.update(value=fn[args.set](g), route=f"dist_to_{args.set}",
                   error=None if args.set != "N" else "upper bound")
    val = complex(out["value"])
    if abs(val.imag) <= 1e-12 * max(1.0, abs(val.real)):
        # real up to rounding; the discarded part is kept for the record
        out["value"], out["imag_discarded"] = val.real, val.imag
    sys.stdout.write(dump_json(out))
    return 0


# -- count / kernel ------------------------------------------------------------

def cmd_count(args) -> int:
    from .counting import CountSpec, count
    from .mat2c import parse_matrix

    spec = CountSpec(g=parse_matrix(args.g), L=args.L, regime=args.regime, predicate=args.predicate,
                     delta1=args.delta1, delta2=args.delta2, implied_constant=args.implied_constant,
                     H1=args.H1, H2=args.H2)
    r = count(spec)
    out = {"predicate": spec.predicate.value, "regime": spec.regime.name, "L": spec.L,
           "count": r.count, "upper": r.upper, "parabolic": r.parabolic, "nonparabolic": r.nonparabolic,
           "folded": r.folded, "identity_failures": r.identity_failures,
           "per_n": {str(k): v for k, v in sorted(r.per_n.items())}}
    sys.stdout.write(dump_json(out))
    return 0


def cmd_kernel(args) -> int:
    import numpy as np

    from .voronoi import SpectralPair, voronoi_kernel

    t0 = time.perf_counter()
    pair = SpectralPair(parse_complex(args.nu1), parse_complex(args.nu2), int(args.p1), int(args.p2))
    xs = np.geomspace(args.xmin, args.xmax, args.points)
    vals = [voronoi_kernel(float(x), pair, args.P) for x in xs]
    write_csv(Path(args.out) / "kernel.csv", ["x", "re", "im"], ((x, v.real, v.imag) for x, v in zip(xs, vals)))
    cfg = {"nu1": args.nu1, "nu2": args.nu2, "p1": args.p1, "p2": args.p2, "P": args.P,
           "xmin": args.xmin, "xmax": args.xmax, "points": args.points}
    return _finish(args, "kernel", cfg, [], t0, "kernel.json")


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--config", help="key = value file")
    common.add_argument("--timing", action="store_true", help="record wall time in reports")

    p = argparse.ArgumentParser(prog="bigktype", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("figure1", parents=[common], help="restriction-to-K profiles")
    f.add_argument("--ell", type=int)
    f.add_argument("--q", help="comma-separated q values")
    f.add_argument("--points", type=int)
    f.set_defaults(func=cmd_figure1)

    s = sub.add_parser("suite", parents=[common], help="run a check suite")
    s.add_argument("name", choices=SUITES)
    s.add_argument("--ell", type=int)
    s.add_argument("--ells")
    s.add_argument("--samples", type=int)
    s.add_argument("--Lmax", type=int)
    s.add_argument("--straightforward", type=int)
    s.set_defaults(func=cmd_suite)

    e = sub.add_parser("eval", parents=[common], help="evaluate one object")
    e.add_argument("object", choices=("phi", "phi_avg", "kernel", "distance"))
    e.add_argument("--g", default="id")
    e.add_argument("--ell", default="1")
    e.add_argument("--nu", default="0")
    e.add_argument("--p", default="0")
    e.add_argument("--q", default="0")
    e.add_argument("--set", default="K")
    e.add_argument("--x", default="1")
    e.add_argument("--nu1", default="0")
    e.add_argument("--nu2", default="0")
    e.add_argument("--p1", default="0")
    e.add_argument("--p2", default="0")
    e.add_argument("--P", default="1")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("count", parents=[common], help="exact Hecke matrix count")
    c.add_argument("--g", default="id")
    c.add_argument("--L", type=float, default=7)
    c.add_argument("--regime", default="UNIT", choices=("UNIT", "MID", "HIGH"))
    c.add_argument("--predicate", default="THM1_M",
                   choices=("THM1_M", "M_STAR", "M_STAR_0", "M_K", "M_D", "Q_PAIRS"))
    c.add_argument("--delta1", type=float, default=0.1)
    c.add_argument("--delta2", type=float, default=0.1)
    c.add_argument("--implied-constant", type=float, default=10.0)
    c.add_argument("--H1", type=float, default=1.0)
    c.add_argument("--H2", type=float, default=1.0)
    c.set_defaults(func=cmd_count)

    k = sub.add_parser("kernel", parents=[common], help="Voronoi kernel table")
    k.add_argument("--nu1", default="0")
    k.add_argument("--nu2", default="0")
    k.add_argument("--p1", default="0")
    k.add_argument("--p2", default="0")
    k.add_argument("--P", type=float, default=1.0)
    k.add_argument("--xmin", type=float, default=0.1)
    k.add_argument("--xmax", type=float, default=100.0)
    k.add_argument("--points", type=int, default=31)
    k.set_defaults(func=cmd_kernel)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"bigktype: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
