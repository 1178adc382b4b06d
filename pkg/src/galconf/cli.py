"""Configuration-driven command-line entry point.

Subcommands: algebra {check,dump}, orbit {classify,parametrize},
casimir eval, simulate, symmetry verify, verify.  Exit codes: 0 on
success, 1 on verification failure, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import algebra as al
from . import coadjoint as co
from . import dynamics as dy
from . import poisson as po
from . import verify as vf
from .errors import (
    AmbiguousClass,
    BadDimension,
    GalconfError,
    InvalidConfig,
    LabelMismatch,
    UnsupportedExtension,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BAD_INPUT = 2

SCHEMA_VERSION = 1


def _emit(data: dict, path: Optional[str]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail_input(message: str) -> int:
    sys.stderr.write(json.dumps({"error": message}) + "\n")
    return EXIT_BAD_INPUT


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read JSON config {path}: {exc}")


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def cmd_algebra_check(args) -> int:
    alg = al.build_algebra(args.N, args.dim, args.central, args.with_ds)
    checks = []
    defect, triple = al.jacobi_worst(alg)
    checks.append({"name": "jacobi", "defect": float(defect), "allowed": 0.0,
                   "passed": defect == 0,
                   "detail": f"worst triple {triple}" if triple else ""})
    bad = sum(1 for (x, y), res in alg.table.items()
              if {g: -c for g, c in res.items()} != alg.table.get((y, x)))
    checks.append({"name": "antisymmetry", "defect": bad, "allowed": 0.0,
                   "passed": bad == 0, "detail": ""})
    if alg.central:
        M = alg.generator("M")
        bad = sum(1 for g in alg.generators if al.bracket(alg, {M: 1}, {g: 1}))
        checks.append({"name": "mass_central", "defect": bad, "allowed": 0.0,
                       "passed": bad == 0, "detail": ""})
    passed = all(c["passed"] for c in checks)
    _emit({"schema_version": SCHEMA_VERSION,
           "algebra": {"N": alg.N, "dim": alg.dim, "central": alg.central,
                       "with_ds": alg.with_ds},
           "checks": checks, "passed": passed}, args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_algebra_dump(args) -> int:
    alg = al.build_algebra(args.N, args.dim, args.central, args.with_ds)
    _emit(al.dump_table(alg), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# orbits and Casimirs
# ---------------------------------------------------------------------------

def cmd_orbit_classify(args) -> int:
    try:
        cls = co.classify_orbit(args.chi, tol=args.tol)
    except AmbiguousClass as exc:
        _emit({"schema_version": SCHEMA_VERSION, "error": str(exc)}, args.out)
        return EXIT_FAIL
    _emit({"schema_version": SCHEMA_VERSION, "tag": cls.tag, "sigma": cls.sigma,
           "interval": co.chi_interval(args.chi)}, args.out)
    return EXIT_OK


def _resolve_internal(cfg: dict, dim: int):
    """(s, chi, label) from the flat config keys s / chi / chi_class / sigma."""
    if dim == 3:
        s = np.asarray(cfg.get("s", [0.0, 0.0, 0.0]), dtype=float).reshape(3)
        s2 = float(s @ s)
    else:
        s = float(cfg.get("s", 0.0))
        s2 = s
    has_chi = "chi" in cfg
    has_class = "chi_class" in cfg
    if not has_chi and not has_class:
        chi = np.zeros(3)
        cls = co.OrbitClass("Origin")
    elif has_class:
        cls = co.OrbitClass(cfg["chi_class"], float(cfg.get("sigma", 0.0)))
        chi = np.asarray(cfg["chi"], dtype=float).reshape(3) if has_chi \
            else co.chi_for_class(cls)
    else:
        chi = np.asarray(cfg["chi"], dtype=float).reshape(3)
        cls = co.classify_orbit(chi)
    label = co.OrbitLabel(m=float(cfg["m"]), s2=s2, chi_class=cls)
    return s, chi, label


def cmd_orbit_parametrize(args) -> int:
    cfg = _load_json(args.config)
    try:
        x = np.asarray(cfg["x"], dtype=float)
        if x.ndim != 2:
            raise InvalidConfig("x must be an (N+1) x dim array")
        s, chi, label = _resolve_internal(cfg, x.shape[1])
        X = co.parametrize(label, s, chi, x)
    except KeyError as exc:
        raise InvalidConfig(f"missing config key {exc}")
    except (LabelMismatch, AmbiguousClass) as exc:
        _emit({"schema_version": SCHEMA_VERSION, "error": str(exc)}, args.out)
        return EXIT_FAIL
    out = {"schema_version": SCHEMA_VERSION, "dual": X.to_json(),
           "label": {"m": label.m, "s2": label.s2,
                     "chi_class": label.chi_class.tag,
                     "sigma": label.chi_class.sigma}}
    _emit(out, args.out)
    return EXIT_OK


def cmd_casimir_eval(args) -> int:
    data = _load_json(args.dual)
    X = co.DualVector.from_json(data.get("dual", data))
    alg = al.build_algebra(X.N, X.dim, central=True)
    c1, c2, c3 = co.casimir_values(alg, X)
    _emit({"schema_version": SCHEMA_VERSION, "C1": c1, "C2": c2, "C3": c3}, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

def _load_run_config(path: str) -> dict:
    cfg = _load_json(path)
    for key in ("N", "dim", "m", "dt", "T"):
        if key not in cfg:
            raise InvalidConfig(f"missing required config key {key!r}")
    N, dim = int(cfg["N"]), int(cfg["dim"])
    al.build_algebra(N, dim, central=True)  # admissibility gate
    m = float(cfg["m"])
    if not m > 0:
        raise InvalidConfig("m must be positive")
    method = cfg.get("method", "rk4")
    if method not in ("rk4", "closed"):
        raise InvalidConfig(f"unknown method {method!r}")
    ham_tag = cfg.get("hamiltonian", "free")
    if ham_tag == "newton_hooke":
        if (N, dim) != (1, 3):
            raise InvalidConfig("newton_hooke runs require N=1, dim=3")
        if method == "closed":
            raise InvalidConfig("closed-form sampling covers the free flow only")
        ham = dy.HamiltonianChoice("newton_hooke", omega=float(cfg.get("omega", 0.0)),
                                   sign=int(cfg.get("sign", 1)))
    elif ham_tag == "free":
        ham = dy.FREE
    else:
        raise InvalidConfig(f"unknown hamiltonian {ham_tag!r}")
    nq, npp = po.q_levels(N, dim), po.p_levels(N, dim)
    q = np.asarray(cfg.get("q", np.zeros((nq, dim))), dtype=float)
    p = np.asarray(cfg.get("p", np.zeros((npp, dim))), dtype=float)
    if q.shape != (nq, dim) or p.shape != (npp, dim):
        raise InvalidConfig(
            f"initial blocks must be q:{(nq, dim)} p:{(npp, dim)}, "
            f"got q:{q.shape} p:{p.shape}")
    try:
        s, chi, label = _resolve_internal(cfg, dim)
    except (LabelMismatch, AmbiguousClass) as exc:
        raise InvalidConfig(str(exc))
    if "chi" in cfg and "chi_class" in cfg:
        got = co.classify_orbit(chi, tol=float(cfg.get("classify_tol", 1e-9)))
        if got.tag != label.chi_class.tag:
            raise InvalidConfig(
                f"explicit chi classifies as {got.tag}, config says "
                f"{label.chi_class.tag}")
    dt, T = float(cfg["dt"]), float(cfg["T"])
    if T < 0 or (T > 0 and not 0 < dt <= T):
        raise InvalidConfig("need T >= 0 and 0 < dt <= T")
    tol_fit_default = 1e-10 if method == "closed" else 1e-7
    return {
        "N": N, "dim": dim, "m": m, "method": method, "ham": ham,
        "pt": po.PhasePoint(q=q, p=p, s=s, chi=chi, m=m),
        "dt": dt, "T": T,
        "csv": cfg.get("csv"), "summary": cfg.get("summary"),
        "seed": int(cfg.get("seed", 0)),
        "tol_conservation": float(cfg.get("tol_conservation", 1e-8)),
        "tol_fit": float(cfg.get("tol_fit", tol_fit_default)),
        "raw": cfg,
    }


def cmd_simulate(args) -> int:
    cfg = _load_run_config(args.config)
    traj = dy.integrate(cfg["pt"], cfg["ham"], cfg["T"], cfg["dt"], cfg["method"])
    if cfg["csv"]:
        with open(cfg["csv"], "w") as fh:
            fh.write(dy.trajectory_csv_text(traj))
    drifts = {}
    rec = traj.recorded
    if cfg["ham"].free:
        p0 = np.array([st.p[0] for st in traj.states])
        drifts["p0"] = float(np.max(np.abs(p0 - p0[0])))
        chi_e = np.array([st.chi[0] - st.chi[1] for st in traj.states])
        drifts["chi_diff"] = float(np.max(np.abs(chi_e - chi_e[0])))
        for nm in ("h", "j", "C1", "C2", "C3"):
            drifts[nm] = float(np.max(np.abs(rec[nm] - rec[nm][0])))
    else:
        energy = rec["h"] + cfg["ham"].sign * cfg["ham"].omega ** 2 * rec["k"]
        drifts["deformed_energy"] = float(np.max(np.abs(energy - energy[0])))
        for nm in ("C1", "C2", "C3"):
            drifts[nm] = float(np.max(np.abs(rec[nm] - rec[nm][0])))
    spin = np.array([st.spin_invariant() for st in traj.states])
    drifts["spin_invariant"] = float(np.max(np.abs(spin - spin[0])))
    interval = np.array([co.chi_interval(st.chi) for st in traj.states])
    drifts["chi_interval"] = float(np.max(np.abs(interval - interval[0])))
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg["raw"],
        "samples": len(traj.times),
        "drifts": drifts,
        "tolerances": {"conservation": cfg["tol_conservation"], "fit": cfg["tol_fit"]},
        "casimirs": {"C1": float(rec["C1"][0]), "C2": float(rec["C2"][0]),
                     "C3": float(rec["C3"][0])},
    }
    passed = all(v <= cfg["tol_conservation"] for v in drifts.values())
    if cfg["ham"].free and len(traj.times) >= traj.N + 3:
        residual, diff = dy.verify_motion_order(traj)
        threshold = dy.conditioning_threshold(traj)
        summary["motion_order"] = {
            "degree": traj.N, "fit_residual": residual,
            "scaled_difference": diff, "difference_threshold": threshold,
            "allowed_residual": cfg["tol_fit"],
        }
        passed = passed and residual <= cfg["tol_fit"] and diff <= threshold
    summary["passed"] = bool(passed)
    _emit(summary, cfg["summary"] or args.out)
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def _parse_tols(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise InvalidConfig(f"tolerance override must be name=value, got {item!r}")
        name, value = item.split("=", 1)
        if name not in vf.DEFAULT_TOLERANCES:
            raise InvalidConfig(f"unknown tolerance {name!r}")
        out[name] = float(value)
    return out


def cmd_verify(args) -> int:
    which = "all" if args.suite == "all" else args.suite
    report = vf.run_suites(which, seed=args.seed, tolerances=_parse_tols(args.tol))
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_symmetry_verify(args) -> int:
    cfg = _load_json(args.config)
    tols = cfg.get("tolerances", {})
    unknown = set(tols) - set(vf.DEFAULT_TOLERANCES)
    if unknown:
        raise InvalidConfig(f"unknown tolerances {sorted(unknown)}")
    report = vf.run_suites("symmetry", seed=int(cfg.get("seed", 42)), tolerances=tols)
    _emit(report, args.out or cfg.get("report"))
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_algebra_flags(p) -> None:
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--central", action="store_true")
    p.add_argument("--with-ds", dest="with_ds", action="store_true")
    p.add_argument("-o", "--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="galconf",
        description="Exact construction and verification of conformal "
                    "extensions of Galilei symmetry, their coadjoint orbits "
                    "and orbit dynamics.")
    sub = ap.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="structure-constant table tools")
    alg_sub = alg.add_subparsers(dest="subcommand", required=True)
    chk = alg_sub.add_parser("check", help="exact identity checks")
    _add_algebra_flags(chk)
    chk.set_defaults(func=cmd_algebra_check)
    dmp = alg_sub.add_parser("dump", help="dump the table as JSON")
    _add_algebra_flags(dmp)
    dmp.set_defaults(func=cmd_algebra_dump)

    orb = sub.add_parser("orbit", help="orbit classification and parametrization")
    orb_sub = orb.add_subparsers(dest="subcommand", required=True)
    ocl = orb_sub.add_parser("classify")
    ocl.add_argument("--chi", type=float, nargs=3, required=True)
    ocl.add_argument("--tol", type=float, default=1e-9)
    ocl.add_argument("-o", "--out", default=None)
    ocl.set_defaults(func=cmd_orbit_classify)
    opa = orb_sub.add_parser("parametrize")
    opa.add_argument("--config", required=True)
    opa.add_argument("-o", "--out", default=None)
    opa.set_defaults(func=cmd_orbit_parametrize)

    cas = sub.add_parser("casimir", help="Casimir evaluation")
    cas_sub = cas.add_subparsers(dest="subcommand", required=True)
    cev = cas_sub.add_parser("eval")
    cev.add_argument("--dual", required=True, help="DualVector JSON file")
    cev.add_argument("-o", "--out", default=None)
    cev.set_defaults(func=cmd_casimir_eval)

    sim = sub.add_parser("simulate", help="run a configured trajectory")
    sim.add_argument("--config", required=True)
    sim.add_argument("-o", "--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    sym = sub.add_parser("symmetry", help="symmetry transformation checks")
    sym_sub = sym.add_subparsers(dest="subcommand", required=True)
    svf = sym_sub.add_parser("verify")
    svf.add_argument("--config", required=True)
    svf.add_argument("-o", "--out", default=None)
    svf.set_defaults(func=cmd_symmetry_verify)

    ver = sub.add_parser("verify", help="run property suites")
    ver.add_argument("suite", nargs="?", default="all",
                     choices=["all"] + vf.suite_names())
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--tol", action="append", metavar="NAME=VALUE",
                     help="tolerance override (repeatable)")
    ver.add_argument("-o", "--out", default=None)
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfig, BadDimension, UnsupportedExtension) as exc:
        return _fail_input(f"{type(exc).__name__}: {exc}")
    except GalconfError as exc:
        sys.stderr.write(json.dumps(
            {"error": f"{type(exc).__name__}: {exc}"}) + "\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
