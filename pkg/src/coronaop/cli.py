"""Batch experiment runner and self-test entry points.

Subcommands:

    run <config.json> [--out DIR] [--seed N]   experiment batch; per
        (symbol, filter, window radius) runs the oscillation diagnostic and
        the distance sandwich, writing results.json and results.csv
    selftest [--inject-fault CHECK] [--seed N]  exact-algebra suite on Z_8
    gallery --list                              available symbols and filters

Exit codes: 0 when every verdict is PASS or SKIP, 1 on any FAIL (or failed
self-test check), 2 on a malformed config.  Identical config and seed yield
byte-identical CSV output.  The CORONAOP_MAX_WORKERS environment variable
caps the experiment thread pool (default 1, sequential).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .fourier import dual_norm, fourier, space_norm
from .group import Cyclic, GroupSpec, Torus
from .gohberg import SandwichConfig, sandwich
from .quantize import Op_apply, op_quantize
from .symbols import (DualFunction, gallery, make_filter, make_symbol, osc)
from .crossed import CrossedElement, compose, involution, sch
from . import __version__


class ConfigError(ValueError):
    """Raised with a location-anchored message for malformed configs."""


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

_DEFAULT_TOLERANCES = {"vo": 1e-2, "lower": 0.05, "numeric": 1e-8,
                       "membership": 1e-2}


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("%s:%d:%d: invalid JSON: %s"
                          % (path, exc.lineno, exc.colno, exc.msg))
    validate_config(cfg, path)
    return cfg


def validate_config(cfg, where="config"):
    def fail(field, msg):
        raise ConfigError("%s: field %r %s" % (where, field, msg))

    for key in ("group", "schedule", "symbols", "filters"):
        if key not in cfg:
            fail(key, "is required")
    sched = cfg["schedule"]
    if not isinstance(sched, list) or not sched:
        fail("schedule", "must be a nonempty list of window radii")
    if any(int(m) <= 0 for m in sched):
        fail("schedule", "entries must be positive")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        fail("schedule", "must be strictly increasing")
    tols = {**_DEFAULT_TOLERANCES, **cfg.get("tolerances", {})}
    for name, value in tols.items():
        if not value > 0:
            fail("tolerances.%s" % name, "must be positive")
    if not isinstance(cfg["symbols"], list) or not cfg["symbols"]:
        fail("symbols", "must be a nonempty list")
    if not isinstance(cfg["filters"], list) or not cfg["filters"]:
        fail("filters", "must be a nonempty list")
    for i, entry in enumerate(cfg["symbols"]):
        if "name" not in entry:
            fail("symbols[%d].name" % i, "is required")
    for i, entry in enumerate(cfg["filters"]):
        if "type" not in entry:
            fail("filters[%d].type" % i, "is required")
    for i, entry in enumerate(cfg["group"].get("factors", [])):
        if "torus" not in entry and "cyclic" not in entry:
            fail("group.factors[%d]" % i, "must be a torus or cyclic entry")
    if not cfg["group"].get("factors"):
        fail("group.factors", "is required")


def spec_for_radius(group_cfg, m):
    """Instantiate the group template at window radius m (torus grids
    default to the tight 2m+1)."""
    factors = []
    for entry in group_cfg["factors"]:
        if "torus" in entry:
            t = entry["torus"] or {}
            window = int(t.get("window") or m)
            grid = int(t.get("grid") or 2 * window + 1)
            factors.append(Torus(grid=grid, window=window))
        else:
            factors.append(Cyclic(order=int(entry["cyclic"])))
    return GroupSpec(factors)


def sandwich_config(cfg, m, seed):
    s = dict(cfg.get("sandwich", {}))
    tols = {**_DEFAULT_TOLERANCES, **cfg.get("tolerances", {})}
    levels = s.get("candidate_levels")
    ranks = s.get("svd_ranks", ())
    return SandwichConfig(
        k_max=int(s.get("k_max") or m),
        candidate_levels=tuple(int(k) for k in levels) if levels else None,
        svd_ranks=tuple(int(r) for r in ranks),
        n_probes=int(s.get("n_probes", 24)),
        probe_slack=float(s.get("probe_slack", 0.05)),
        bump_radius=s.get("bump_radius", "auto"),
        vo_tol=tols["vo"], tol_lower=tols["lower"], tol_num=tols["numeric"],
        membership_tol=tols["membership"], seed=seed)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def _fmt(value):
    if value is None or value == "":
        return ""
    return "%.12g" % float(value)


def _atomic_write(path, text):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_one(cfg, sym_cfg, filt_cfg, m, seed):
    spec = spec_for_radius(cfg["group"], m)
    symbol = make_symbol(spec, sym_cfg)
    filt = make_filter(spec, filt_cfg)
    scfg = sandwich_config(cfg, m, seed)
    rep = sandwich(symbol, filt, scfg,
                   symbol_name=sym_cfg.get("id", sym_cfg["name"]),
                   filter_name=filt_cfg.get("id", filt_cfg["type"]))
    return {"symbol": rep.symbol_name, "filter": rep.filter_name, "M": m,
            "report": rep}


def run(config_path, out_dir="coronaop_out", seed=None):
    cfg = load_config(config_path)
    if seed is None:
        seed = int(cfg.get("seed", 0))
    jobs = [(sym_cfg, filt_cfg, int(m))
            for sym_cfg in cfg["symbols"]
            for filt_cfg in cfg["filters"]
            for m in cfg["schedule"]]
    workers = max(1, int(os.environ.get("CORONAOP_MAX_WORKERS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda j: _run_one(cfg, j[0], j[1], j[2], seed), jobs))
    else:
        results = [_run_one(cfg, *job, seed) for job in jobs]

    os.makedirs(out_dir, exist_ok=True)
    payload = {"version": __version__, "config": cfg, "seed": seed,
               "results": [{"symbol": r["symbol"], "filter": r["filter"],
                            "M": r["M"], **r["report"].to_dict()}
                           for r in results]}
    _atomic_write(os.path.join(out_dir, "results.json"),
                  json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")

    lines = ["symbol,filter,M,level,D_est,lower,upper"]
    for r in results:
        for level, d_est, lower, upper in r["report"].csv_rows():
            lines.append(",".join([r["symbol"], r["filter"], str(r["M"]),
                                   str(level), _fmt(d_est), _fmt(lower),
                                   _fmt(upper)]))
    _atomic_write(os.path.join(out_dir, "results.csv"), "\n".join(lines) + "\n")

    failed = [r for r in results if r["report"].verdict == "FAIL"]
    for r in results:
        rep = r["report"]
        print("%-14s %-12s M=%-4d %-4s D=%s lower=%s upper=%s%s"
              % (r["symbol"], r["filter"], r["M"], rep.verdict,
                 _fmt(rep.d_estimate) or "-", _fmt(rep.final_lower) or "-",
                 _fmt(rep.upper_min) or "-",
                 ("  [" + rep.reason + "]") if rep.reason else ""))
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def _selftest_checks(seed, inject_fault=None):
    rng = np.random.default_rng(seed)
    spec = GroupSpec([Cyclic(8)])
    n = spec.grid_size

    def rand_vec():
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)

    def rand_element():
        pts = rng.choice(n, size=2, replace=False)
        return CrossedElement.from_pairs(
            spec, [((int(p),), rng.standard_normal(n) + 1j * rng.standard_normal(n))
                   for p in pts])

    def check_plancherel():
        worst = max(abs(dual_norm(fourier(spec, u)) - space_norm(spec, u))
                    for u in (rand_vec() for _ in range(20)))
        return worst, 1e-10

    def check_diagram():
        worst = 0.0
        C = spec.char_matrix
        for _ in range(5):
            grid = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            from .symbols import Symbol
            f = Symbol.from_grid(spec, grid)
            op_direct = op_quantize(f).matrix
            space = np.stack([Op_apply(f, col) for col in np.eye(n, dtype=complex).T],
                             axis=1)
            conj = C.conj().T @ space @ C / n
            worst = max(worst, float(np.abs(op_direct - conj).max()))
        return worst, 1e-10

    def check_sch_homomorphism():
        worst = 0.0
        for i in range(100):
            a, b = rand_element(), rand_element()
            lhs = sch(compose(a, b)).matrix
            rhs = sch(a).matrix @ sch(b).matrix
            if inject_fault == "sch_homomorphism" and i == 0:
                lhs = lhs.copy()
                lhs[0, 0] += 1e-3
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst, 1e-12

    def check_involution():
        worst = 0.0
        for _ in range(100):
            a = rand_element()
            worst = max(worst, float(np.abs(sch(involution(a)).matrix
                                            - sch(a).matrix.conj().T).max()))
        return worst, 1e-12

    def check_osc_leibniz():
        worst = 0.0
        for _ in range(100):
            p1 = DualFunction.from_values(spec, rng.standard_normal(n)
                                          + 1j * rng.standard_normal(n))
            p2 = DualFunction.from_values(spec, rng.standard_normal(n)
                                          + 1j * rng.standard_normal(n))
            zeta = spec.dual_point((int(rng.integers(8)),))
            lhs = osc(p1 * p2, zeta).values
            rhs = p2.translate(zeta).values * osc(p1, zeta).values \
                + p1.values * osc(p2, zeta).values
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst, 1e-12

    return [("plancherel", check_plancherel), ("diagram", check_diagram),
            ("sch_homomorphism", check_sch_homomorphism),
            ("involution_adjoint", check_involution),
            ("osc_leibniz", check_osc_leibniz)]


def selftest(seed=0, inject_fault=None):
    checks = _selftest_checks(seed, inject_fault)
    if inject_fault is not None and inject_fault not in (
            name for name, _ in checks):
        print("unknown fault target %r" % inject_fault, file=sys.stderr)
        return 2
    failed = 0
    for name, fn in checks:
        worst, tol = fn()
        ok = worst <= tol
        failed += not ok
        print("%-20s %s  (worst %.3e, tol %.0e)"
              % (name, "PASS" if ok else "FAIL", worst, tol))
    return 1 if failed else 0


def list_gallery():
    print("symbols:")
    for name, entry in sorted(gallery().items()):
        print("  %-28s %s" % (name, entry.summary))
    print("filters:")
    print("  %-28s %s" % ("full", "levels |xi|_inf >= k (the whole corona)"))
    print("  %-28s %s" % ("cone",
                          "levels |xi| >= k within half_angle + 1/k of a direction set"))
    print("  %-28s %s" % ("union / intersection", "combinations of the above"))
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="coronaop", description="pseudodifferential distance experiments "
        "on compact abelian groups")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment batch from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="coronaop_out")
    p_run.add_argument("--seed", type=int, default=None)

    p_self = sub.add_parser("selftest", help="exact-algebra suite on Z_8")
    p_self.add_argument("--inject-fault", default=None, metavar="CHECK")
    p_self.add_argument("--seed", type=int, default=0)

    p_gal = sub.add_parser("gallery", help="list available symbols and filters")
    p_gal.add_argument("--list", action="store_true", default=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run(args.config, out_dir=args.out, seed=args.seed)
        if args.command == "selftest":
            return selftest(seed=args.seed, inject_fault=args.inject_fault)
        return list_gallery()
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
