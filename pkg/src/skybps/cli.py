"""Batch driver: construct a family, verify its invariants, emit reports.

Subcommands
-----------
verify        one family at each margin in the margin list, extrapolate the
              degree, check every tolerance; exit 0 iff all checks pass.
sweep         verify once per point of a parameter grid; per-row failures are
              recorded and the run continues.
obstruction   evaluate the left-action moment-map obstruction constant K/2.

Configuration is JSON (``--config``), with common fields overridable by
flags.  Unknown keys are rejected.  Outputs: ``report.json`` (nested,
schema-versioned) and ``results.csv`` with the fixed header
family,params,n,margin,E,deg,bound,gap,r1,r2,exit.  Files are written
atomically.  SKYRME_THREADS caps sweep parallelism; runs are deterministic
for a fixed configuration.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .energy_degree import (
    CSV_HEADER,
    EnergyReport,
    bound_gap,
    bps_coefficients,
    bps_residuals,
    charge_density_cross_residual,
    general_bound_coefficient,
)
from .errors import ConfigError, SkybpsError
from .exprs import Expression
from .gaugefield import Configuration, naturality_check_specs, pullback_naturality_residual
from .grid import extrapolate_margin
from .lie_target import (
    AdjointIntervalFamily,
    eta2_zero_family,
    left_action_obstruction,
    make_adjoint_interval_target,
    make_su2_left_target,
    make_u1_fibered_target,
    round_s3_family,
    u1_s3_adjoint_target,
    verify_moment_conditions,
)
from .solutions import (
    dirac_monopole,
    identity_u1_solution,
    mercator_sphere,
    spherical_solution,
    spinorial_solution,
    symplectic_solution,
    twisted_spinorial_solution,
)

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "family", "n", "margins", "bps", "family_params", "target", "surface",
    "tolerances", "perturb", "output_dir", "emit_gnuplot", "seed", "sweep",
}
_TOL_KEYS = {"residual", "gap_rel", "degree", "bianchi", "naturality", "moment", "charge_cross"}
_DEFAULT_TOLS = {
    "residual": 5e-4,
    "gap_rel": 0.01,
    "degree": 1e-2,
    "bianchi": 1e-5,
    "naturality": 1e-5,
    "moment": 1e-6,
    "charge_cross": 1e-10,
}
_DEFAULT_MARGINS = {
    "identity-u1": [0.36, 0.24, 0.16],
    "dirac-monopole": [0.12, 0.06, 0.03],
    "spinorial": [0.2, 0.1, 0.05],
    "twisted-spinorial": [0.2, 0.1, 0.05],
    "spherical": [0.12, 0.06, 0.03],
    "symplectic": [0.2, 0.1, 0.05],
}
# families whose margin-extrapolated degree must sit at an integer
_INTEGER_DEGREE = {"identity-u1", "spinorial", "twisted-spinorial", "spherical", "symplectic"}


def _check_keys(d: dict, allowed: set, where: str):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _expr_fn(text: str, *names: str):
    e = Expression(text)
    bad = set(e.variables) - set(names)
    if bad:
        raise ConfigError(f"expression {text!r} uses unknown variable(s) {sorted(bad)}")

    def fn(*args):
        return e(**dict(zip(names, args))) * np.ones_like(sum(args))

    return fn


def build_target(cfg: dict):
    """Target selection by name with profile parameters from the config."""
    cfg = dict(cfg or {"name": "default"})
    name = cfg.pop("name", "default")
    if name in ("default", "u1-s3"):
        _check_keys(cfg, set(), f"target {name!r}")
        return u1_s3_adjoint_target()
    if name == "u1-fibered":
        _check_keys(cfg, {"mu_x", "mu_y", "h", "omega_x", "lo", "hi", "periodic"},
                    "target 'u1-fibered'")
        return make_u1_fibered_target(
            mu_x=_expr_fn(cfg.get("mu_x", "0"), "x", "y"),
            mu_y=_expr_fn(cfg["mu_y"], "x", "y"),
            h=_expr_fn(cfg.get("h", "1"), "x", "y"),
            omega_x=_expr_fn(cfg.get("omega_x", "0"), "x", "y"),
            chart_lo=tuple(cfg.get("lo", (0.0, 0.0, 0.0))),
            chart_hi=tuple(cfg.get("hi", (2 * np.pi, np.pi / 2, 4 * np.pi))),
            chart_periodic=tuple(cfg.get("periodic", (True, False, True))),
        )
    if name in ("adjoint-s3", "s3-round"):
        _check_keys(cfg, set(), f"target {name!r}")
        return make_adjoint_interval_target(round_s3_family())
    if name == "adjoint-interval":
        _check_keys(cfg, {"h1", "h2", "eta1", "eta2", "interval", "compact"},
                    "target 'adjoint-interval'")
        fam = AdjointIntervalFamily(
            h1=_expr_fn(cfg.get("h1", "1"), "xi"),
            h2=_expr_fn(cfg["h2"], "xi"),
            eta1=_expr_fn(cfg["eta1"], "xi"),
            eta2=_expr_fn(cfg.get("eta2", "0"), "xi"),
            interval=tuple(cfg.get("interval", (0.0, np.pi))),
            compact=cfg.get("compact"),
        )
        return make_adjoint_interval_target(fam)
    if name == "su2-left":
        _check_keys(cfg, {"K"}, "target 'su2-left'")
        return make_su2_left_target(float(cfg.get("K", 1.0)))
    raise ConfigError(f"unknown target {name!r}")


def build_surface(cfg: dict):
    cfg = dict(cfg or {})
    name = cfg.pop("name", "s2-round")
    if name != "s2-round":
        raise ConfigError(f"unknown surface {name!r}")
    _check_keys(cfg, {"curvature", "tau_max"}, "surface 's2-round'")
    return mercator_sphere(float(cfg.get("curvature", 1.0)), float(cfg.get("tau_max", 3.0)))


def _reject_section(cfg: dict, key: str, family: str):
    if cfg.get(key):
        raise ConfigError(f"family {family!r} does not take a {key!r} section")


def _spinorial_family_from_target(cfg: dict):
    """Profile family for the spinorial/twisted constructions (h1 = 1)."""
    tcfg = dict(cfg or {"name": "s3-round"})
    name = tcfg.pop("name", "s3-round")
    if name in ("s3-round", "default"):
        _check_keys(tcfg, set(), f"target {name!r}")
        # the eta2 = 0 representative of the round metric (moment-map gauge)
        return eta2_zero_family(np.sin, (0.0, np.pi), compact="s3",
                                name="round-metric-eta2-zero")
    if name == "adjoint-interval":
        _check_keys(tcfg, {"h2", "eta1", "eta2", "interval", "compact"},
                    "target 'adjoint-interval'")
        return AdjointIntervalFamily(
            h1=_expr_fn("1", "xi"),
            h2=_expr_fn(tcfg["h2"], "xi"),
            eta1=_expr_fn(tcfg["eta1"], "xi"),
            eta2=_expr_fn(tcfg.get("eta2", "0"), "xi"),
            interval=tuple(tcfg.get("interval", (0.0, np.pi))),
            compact=tcfg.get("compact"),
        )
    raise ConfigError(f"unknown spinorial target {name!r}")


def build_family(cfg: dict, margin: float):
    """Dispatch a family constructor; returns (FamilyResult, BPSParams)."""
    family = cfg["family"]
    n = int(cfg.get("n", 48))
    fp = dict(cfg.get("family_params") or {})
    bps_cfg = dict(cfg.get("bps") or {})
    _check_keys(bps_cfg, {"alpha", "beta", "gamma"}, "bps")

    if family == "identity-u1":
        _check_keys(fp, {"ax"}, "identity-u1 params")
        _reject_section(cfg, "surface", family)
        target = build_target(cfg.get("target"))
        ax = _expr_fn(fp.get("ax", "0.1*sin(theta)"), "theta", "x")
        res = identity_u1_solution(ax, target=target, n=n, margin=margin)
        p = bps_coefficients(0.0, 0.0, 0.0)
    elif family == "dirac-monopole":
        _check_keys(fp, {"r_window"}, "dirac-monopole params")
        _reject_section(cfg, "surface", family)
        _reject_section(cfg, "target", family)
        res = dirac_monopole(n=n, r_window=tuple(fp.get("r_window", (0.5, 2.0))), margin=margin)
        p = bps_coefficients(bps_cfg.get("alpha", 0.0), bps_cfg.get("beta", 0.0),
                             bps_cfg.get("gamma", 0.0))
    elif family == "spinorial":
        _check_keys(fp, set(), "spinorial params")
        surface = build_surface(cfg.get("surface"))
        fam = _spinorial_family_from_target(cfg.get("target"))
        res = spinorial_solution(surface=surface, fam=fam, n=n, margin=margin)
        p = bps_coefficients(0.0, 0.0, 0.0)
    elif family == "twisted-spinorial":
        _check_keys(fp, {"alpha", "beta", "gamma"}, "twisted-spinorial params")
        _reject_section(cfg, "surface", family)  # curvature is implied by alpha/beta
        _reject_section(cfg, "target", family)
        a, b, g = fp.get("alpha", 0.0), fp.get("beta"), fp.get("gamma", 1.0)
        res = twisted_spinorial_solution(alpha=a, gamma=g, beta=b, n=n, margin=margin)
        p = bps_coefficients(a, b or 0.0, g)
    elif family == "spherical":
        _check_keys(fp, {"c1", "c2", "alpha", "beta", "xi_window"}, "spherical params")
        _reject_section(cfg, "surface", family)
        _reject_section(cfg, "target", family)
        a, b = fp.get("alpha", 1.0), fp.get("beta", 2.0)
        res = spherical_solution(fp.get("c1", 1.0), fp.get("c2", -1.0), a, b,
                                 xi_window=tuple(fp.get("xi_window", (0.2, 1.5))),
                                 n=n, margin=margin)
        p = bps_coefficients(a, b, 0.0)
    elif family == "symplectic":
        _check_keys(fp, {"beta", "twist"}, "symplectic params")
        _reject_section(cfg, "surface", family)
        _reject_section(cfg, "target", family)
        twist = fp.get("twist")
        phase = _expr_fn(twist, "xi") if twist else None
        res = symplectic_solution(n=n, margin=margin, xi_phase=phase)
        p = bps_coefficients(0.0, fp.get("beta", 1.0), 0.0)
    else:
        raise ConfigError(f"unknown family {cfg['family']!r}")

    pert = dict(cfg.get("perturb") or {})
    _check_keys(pert, {"eps", "seed"}, "perturb")
    eps = float(pert.get("eps", 0.0))
    if eps:
        res.config = perturb_configuration(res.config, eps, int(pert.get("seed", 0)))
    return res, p


def perturb_configuration(c: Configuration, eps: float, seed: int = 0) -> Configuration:
    """Add a smooth bump of amplitude eps to phi (vanishing at open boundaries)."""
    rng = np.random.default_rng(seed)
    grid = c.grid
    mesh = np.stack(grid.meshes())
    bump = np.ones(grid.shape)
    for ax in range(3):
        lo, hi = grid.lo_eff[ax], grid.hi_eff[ax]
        t = (mesh[ax] - lo) / (hi - lo)
        bump = bump * (np.sin(np.pi * t) if not grid.periodic[ax] else np.sin(2 * np.pi * t))
    phi = c.phi.copy()
    for mu in range(3):
        phi[mu] = phi[mu] + eps * rng.uniform(0.5, 1.0) * bump
    return Configuration(grid, c.target, phi, c.A.copy(), c.gM, c.orientation,
                         c.phi_winding.copy())


# ---------------------------------------------------------------------------
# verify pipeline
# ---------------------------------------------------------------------------


def _validate_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    _check_keys(cfg, _TOP_KEYS, "configuration")
    if "family" not in cfg:
        raise ConfigError("configuration needs a 'family'")
    tols = dict(_DEFAULT_TOLS)
    user_tols = dict(cfg.get("tolerances") or {})
    _check_keys(user_tols, _TOL_KEYS, "tolerances")
    tols.update(user_tols)
    out = copy.deepcopy(cfg)
    out["tolerances"] = tols
    if "margins" not in out or not out["margins"]:
        out["margins"] = list(_DEFAULT_MARGINS.get(cfg["family"], [0.2, 0.1, 0.05]))
    ms = [float(m) for m in out["margins"]]
    if any(m <= 0 for m in ms) or any(a <= b for a, b in zip(ms, ms[1:])):
        raise ConfigError("margins must be positive and strictly decreasing")
    if len(ms) >= 3:
        ratios = [a / b for a, b in zip(ms, ms[1:])]
        if max(ratios) - min(ratios) > 1e-6 * ratios[0]:
            raise ConfigError(
                "three or more margins must form a geometric sequence "
                "(constant ratio) for the deficit-order fit"
            )
    return out


def run_verify(cfg: dict) -> dict:
    """Full verification of one family: construct, check, extrapolate.

    Returns a report dict with per-margin rows, the margin-extrapolated
    degree, a list of named checks, and the resulting exit code.
    """
    cfg = _validate_config(cfg)
    tols = cfg["tolerances"]
    margins = [float(m) for m in cfg["margins"]]
    checks: list[dict] = []
    rows: list[EnergyReport] = []
    degs = []

    def check(name, value, tol, ok=None):
        ok = bool(value <= tol) if ok is None else bool(ok)
        checks.append({"name": name, "value": value, "tol": tol, "pass": ok})
        return ok

    first = None
    vol_n = None
    for m in margins:
        res, p = build_family(cfg, m)
        c = res.config
        if first is None:
            first = res
            mom = verify_moment_conditions(c.target, n=32)
            check("moment_def_residual", mom["def_residual"], tols["moment"])
            if c.target.has_moment_constraint:
                check("moment_constraint_residual", mom["constraint_residual"], tols["moment"])
            check("bianchi_residual", c.bianchi_residual(), tols["bianchi"])
            for name, spec in naturality_check_specs(c.target):
                check(f"naturality[{name}]", pullback_naturality_residual(c, spec),
                      tols["naturality"])
            check("charge_density_cross", charge_density_cross_residual(c), tols["charge_cross"])
            vol_n = c.target.volume()
        riem = bool(np.all(c.gM.riemannian_mask()))
        if not riem:
            rows.append(EnergyReport(res.family, _row_params(cfg, m), cfg.get("n", 48), m,
                                     np.nan, np.nan, np.nan, np.nan, np.nan, np.nan,
                                     extras={"riemannian": False}, exit_code=1))
            check(f"riemannian[m={m}]", 1.0, 0.0, ok=False)
            continue
        r = bps_residuals(c, p)
        bg = bound_gap(c, p, vol_n)
        degs.append(bg["degree"])
        rows.append(EnergyReport(
            family=res.family, params=_row_params(cfg, m), n=int(cfg.get("n", 48)),
            margin=m, energy=bg["energy"], degree=bg["degree"], bound=bg["bound"],
            gap=bg["gap"], r1=r["r1"], r2=r["r2"], terms=bg["terms"],
            extras={k: v for k, v in res.diagnostics.items() if isinstance(v, (int, float, bool))},
        ))
        check(f"r1[m={m}]", r["r1"], tols["residual"])
        check(f"r2[m={m}]", r["r2"], tols["residual"])
        check(f"gap_rel[m={m}]", abs(bg["gap"]) / max(abs(bg["energy"]), 1e-30), tols["gap_rel"])
        check(f"decomposition[m={m}]", bg["decomposition_residual"], 1e-10)

    deg_extrap = None
    if degs and len(degs) == len(margins):
        deg_extrap = extrapolate_margin(margins, degs)
        # the integer claim holds for the margin -> 0 limit, so it needs at
        # least two margins to extrapolate from
        if cfg["family"] in _INTEGER_DEGREE and len(margins) >= 2:
            check("degree_integer", abs(deg_extrap - round(deg_extrap)), tols["degree"])

    exit_code = 0 if all(ch["pass"] for ch in checks) else 1
    for row in rows:
        if row.exit_code == 0 and exit_code:
            row.exit_code = exit_code
    return {
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "rows": [r.to_json_dict() for r in rows],
        "degree_extrapolated": deg_extrap,
        "volume_n": vol_n,
        # reported value only; no sharpness or positivity claim attached
        "general_bound_coefficient": general_bound_coefficient(p),
        "checks": checks,
        "exit": exit_code,
        "_reports": rows,
    }


def _row_params(cfg, margin):
    out = dict(cfg.get("family_params") or {})
    out.update(cfg.get("bps") or {})
    return out


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _set_path(cfg: dict, path: str, value):
    keys = path.split(".")
    node = cfg
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def run_sweep(cfg: dict) -> dict:
    """One verify run per sweep point; failures are per-row, the run continues."""
    cfg = _validate_config(cfg)
    sweep = dict(cfg.get("sweep") or {})
    _check_keys(sweep, {"param", "values"}, "sweep")
    if "param" not in sweep or "values" not in sweep:
        raise ConfigError("sweep needs 'param' and 'values'")
    values = list(sweep["values"])

    def one(value):
        sub = copy.deepcopy(cfg)
        sub.pop("sweep", None)
        _set_path(sub, sweep["param"], value)
        try:
            rep = run_verify(sub)
            return value, rep, None
        except SkybpsError as exc:
            return value, None, f"{type(exc).__name__}: {exc}"

    workers = max(1, int(os.environ.get("SKYRME_THREADS", "1")))
    if workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, values))
    else:
        results = [one(v) for v in values]

    rows, points = [], []
    any_fail = False
    for value, rep, err in results:
        if err is not None:
            any_fail = True
            points.append({"value": value, "error": err, "exit": 1})
            continue
        any_fail = any_fail or rep["exit"] != 0
        points.append({
            "value": value,
            "exit": rep["exit"],
            "degree_extrapolated": rep["degree_extrapolated"],
            "rows": rep["rows"],
        })
        rows.extend(rep["_reports"])
    # observed convergence order for n-doubling pairs within the sweep
    conv = []
    if sweep["param"] == "n":
        by_n = {int(v): rep for (v, rep, err) in results if rep is not None}
        for n1 in sorted(by_n):
            if 2 * n1 in by_n:
                r_a = by_n[n1]["rows"][-1]
                r_b = by_n[2 * n1]["rows"][-1]
                if r_a["r1"] > 0 and r_b["r1"] > 0:
                    conv.append({
                        "n_pair": [n1, 2 * n1],
                        "observed_order_r1": float(np.log2(r_a["r1"] / r_b["r1"])),
                    })
    return {
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "points": points,
        "convergence": conv,
        "exit": 1 if any_fail else 0,
        "_reports": rows,
    }


# ---------------------------------------------------------------------------
# output and entry points
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".skybps-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_outputs(report: dict, out_dir: str, emit_gnuplot: bool = False):
    import io

    reports = report.pop("_reports", [])
    _atomic_write(os.path.join(out_dir, "report.json"),
                  json.dumps(report, indent=2, sort_keys=True, default=_json_default))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow(r.to_csv_row())
    _atomic_write(os.path.join(out_dir, "results.csv"), buf.getvalue())
    if emit_gnuplot:
        cols = ["margin", "E", "deg", "gap", "r1", "r2"]
        out = ["# " + " ".join(cols)]
        for r in reports:
            out.append(" ".join(repr(v) for v in
                                [r.margin, r.energy, r.degree, r.gap, r.r1, r.r2]))
        _atomic_write(os.path.join(out_dir, "results.dat"), "\n".join(out) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as f:
                cfg = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}")
    if getattr(args, "family", None):
        cfg["family"] = args.family
    if getattr(args, "n", None):
        cfg["n"] = args.n
    if getattr(args, "margins", None):
        cfg["margins"] = [float(x) for x in args.margins.split(",")]
    if getattr(args, "ax", None):
        cfg.setdefault("family_params", {})["ax"] = args.ax
    if getattr(args, "surface", None):
        cfg.setdefault("surface", {})["name"] = args.surface
    if getattr(args, "curvature", None) is not None:
        cfg.setdefault("surface", {})["name"] = cfg.get("surface", {}).get("name", "s2-round")
        cfg["surface"]["curvature"] = args.curvature
    if getattr(args, "target", None):
        cfg.setdefault("target", {})["name"] = args.target
    for k in ("alpha", "beta", "gamma"):
        v = getattr(args, k, None)
        if v is not None:
            cfg.setdefault("family_params", {})[k] = v
            cfg.setdefault("bps", {})[k] = v
    if getattr(args, "output_dir", None):
        cfg["output_dir"] = args.output_dir
    if getattr(args, "emit_gnuplot", False):
        cfg["emit_gnuplot"] = True
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="skybps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--family", help="family name")
    common.add_argument("-n", "--n", dest="n", type=int, help="grid points per axis")
    common.add_argument("--margins", help="comma-separated margin list")
    common.add_argument("--ax", help="A_x(theta, x) expression for identity-u1")
    common.add_argument("--surface", help="surface name (s2-round)")
    common.add_argument("--curvature", type=float, help="surface Gauss curvature")
    common.add_argument("--target", help="target name")
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--output-dir", dest="output_dir", default=".")
    common.add_argument("--emit-gnuplot", dest="emit_gnuplot", action="store_true")

    sub.add_parser("verify", parents=[common], help="verify one family")
    sub.add_parser("sweep", parents=[common], help="verify a parameter grid")
    ob = sub.add_parser("obstruction", parents=[common],
                        help="left-action moment obstruction constant")
    ob.add_argument("--K", type=float, default=1.0)

    args = parser.parse_args(argv)
    try:
        if args.command == "obstruction":
            if args.K <= 0:
                raise ConfigError("K must be positive")
            value = left_action_obstruction(args.K)
            print(f"iota_nu mu obstruction constant for K={args.K}: {value!r}")
            print(f"expected K/2 = {args.K / 2!r}; nonzero, so no valid degree exists")
            report = {
                "schema_version": SCHEMA_VERSION,
                "K": args.K,
                "obstruction": value,
                "expected": args.K / 2,
                "positive": value > 0,
                "exit": 0 if value > 0 else 1,
            }
            _atomic_write(os.path.join(args.output_dir, "report.json"),
                          json.dumps(report, indent=2, sort_keys=True))
            return report["exit"]
        cfg = _load_config(args)
        out_dir = cfg.pop("output_dir", None) or args.output_dir
        emit = bool(cfg.pop("emit_gnuplot", False) or args.emit_gnuplot)
        if args.command == "verify":
            report = run_verify(cfg)
        else:
            report = run_sweep(cfg)
        write_outputs(report, out_dir, emit)
        for ch in report.get("checks", []):
            status = "pass" if ch["pass"] else "FAIL"
            print(f"[{status}] {ch['name']}: {ch['value']:.3e} (tol {ch['tol']:.1e})")
        if "degree_extrapolated" in report and report["degree_extrapolated"] is not None:
            print(f"degree (margin-extrapolated): {report['degree_extrapolated']:.6f}")
        print(f"exit: {report['exit']}")
        return report["exit"]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SkybpsError as exc:
        print(f"verification error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
