"""Command line front end.

Usage::

    warpsoliton MODE [--config run.toml] [--example NAME] [options]

``MODE`` is one of ``verify``, ``gallery``, ``geodesic``, ``arclength``,
``growth`` or ``volume`` (or ``mode = ...`` in the config).  Command line
flags override the config file, which overrides the built-in defaults; the
fully resolved configuration is echoed in every report.

Exit codes: 0 verdict pass, 1 verdict fail, 2 configuration or domain error.
Reports go to stdout (or ``--output``); log lines go to stderr.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import sys
import time
from typing import Optional

import numpy as np

from . import __version__
from . import gallery as G
from . import geodesic_lab as L
from . import warped_soliton as W
from .field_calculus import (
    Domain,
    DomainViolation,
    ExprSyntaxError,
    const,
    parse_expr,
    to_text,
)
from .riemannian_core import ConformalMetric

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("warpsoliton")

SCHEMA = "warpsoliton.report/1"
MODES = ("verify", "gallery", "geodesic", "arclength", "growth", "volume")

DEFAULTS = {
    "mode": "verify",
    "example": None,
    "params": {"n": None, "m": None, "c": None, "direction": None, "rho": None,
               "regime": "almost", "inset": 0.2},
    "metric": None,
    "soliton": None,
    "sampling": {"count": 200, "seed": 0, "low_discrepancy": False},
    "tolerances": {"residual": 1e-6, "constancy": 1e-8, "scalar": 1e-7, "speed": 1e-8},
    "probe": {"rays": 10, "horizon": 50.0, "step": 1e-3, "radii": [0.5, 1.0, 1.5, 2.0],
              "samples": 4096, "ray": "last-axis", "from": 1.0, "to": None, "limit": None,
              "start": None, "direction": None, "weight": None},
    "expected": None,
}


class ConfigError(ValueError):
    """Unreadable or invalid run configuration."""


# ---------------------------------------------------------------------------
# configuration


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return data


def _csv_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then command line flags."""
    cfg = copy.deepcopy(DEFAULTS)
    if args.config:
        cfg = _merge(cfg, load_config(args.config))
    flags = {
        "mode": args.mode,
        "example": args.example,
        "params": {"n": args.n, "m": args.m, "c": args.c, "regime": args.regime,
                   "rho": args.rho, "inset": args.inset,
                   "direction": _csv_floats(args.direction) if args.direction else None},
        "sampling": {"count": args.points, "seed": args.seed,
                     "low_discrepancy": True if args.low_discrepancy else None},
        "tolerances": {"residual": args.tol, "constancy": args.constancy_tol},
        "probe": {"rays": args.rays, "horizon": args.horizon, "step": args.step,
                  "radii": _csv_floats(args.radii) if args.radii else None,
                  "samples": args.samples, "ray": args.ray, "from": getattr(args, "from_"),
                  "to": args.to, "start": _csv_floats(args.start) if args.start else None,
                  "direction": _csv_floats(args.velocity) if args.velocity else None},
    }

    def apply(dst, src):
        for key, val in src.items():
            if isinstance(val, dict):
                apply(dst.setdefault(key, {}), val)
            elif val is not None:
                dst[key] = val

    if args.example is not None:
        # an example on the command line replaces an explicit metric from the file
        cfg["metric"] = cfg["soliton"] = None
    if (args.mode or cfg["mode"]) == "arclength" and args.horizon is not None:
        flags["probe"]["limit"] = args.horizon
    apply(cfg, flags)
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict):
    if cfg["mode"] not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    for name, val in cfg["tolerances"].items():
        if not (isinstance(val, (int, float)) and val > 0):
            raise ConfigError(f"tolerance {name} must be > 0")
    if int(cfg["sampling"]["count"]) < 1:
        raise ConfigError("sampling count must be >= 1")
    p = cfg["probe"]
    if not p["step"] > 0 or not p["horizon"] > 0:
        raise ConfigError("probe step and horizon must be > 0")
    if int(p["rays"]) < 1 or int(p["samples"]) < 1:
        raise ConfigError("probe rays and samples must be >= 1")
    if cfg["params"]["regime"] not in ("almost", "rho"):
        raise ConfigError("regime must be 'almost' or 'rho'")
    if cfg["mode"] != "gallery" and cfg["example"] is None and cfg["metric"] is None:
        raise ConfigError("give --example or a [metric] section")
    if cfg["example"] is not None and cfg["metric"] is not None:
        raise ConfigError("give either an example or a [metric] section, not both")
    if cfg["example"] is not None and cfg["example"] not in G.NAMES + G.EXTRA_NAMES:
        raise ConfigError(f"unknown example {cfg['example']!r}; choose from {G.NAMES + G.EXTRA_NAMES}")


def _parse(field_name, text, n):
    try:
        return parse_expr(str(text), n)
    except ExprSyntaxError as exc:
        raise ConfigError(f"{field_name}: {exc} in {text!r}") from exc


def _example_id(cfg, name=None) -> G.ExampleId:
    prm = cfg["params"]
    direction = tuple(prm["direction"]) if prm["direction"] else None
    return G.ExampleId.default(name or cfg["example"], n=prm["n"], m=prm["m"], c=prm["c"],
                               direction=direction, rho=prm["rho"])


class Problem:
    """Everything a run needs: soliton data plus probe geometry."""

    def __init__(self, data: Optional[W.WarpedSolitonData], probe_metric: ConformalMetric,
                 volume_metric: ConformalMetric, phi, start, ex: Optional[G.ExampleId] = None):
        self.data = data
        self.probe_metric = probe_metric
        self.volume_metric = volume_metric
        self.phi = phi
        self.start = np.asarray(start, dtype=float)
        self.ex = ex


def _default_start(ex: G.ExampleId):
    p = np.zeros(ex.n)
    if ex.name in G.HALF_SPACE:
        p[-1] = 1.0
    return p


def build_problem(cfg: dict, name: Optional[str] = None) -> Problem:
    if name or cfg["example"]:
        ex = _example_id(cfg, name)
        regime = cfg["params"]["regime"]
        d = G.build_example(ex, regime=regime, inset=float(cfg["params"]["inset"]))
        start = cfg["probe"]["start"] if cfg["probe"]["start"] is not None else _default_start(ex)
        probe = d.base.with_domain(G.natural_domain(ex))
        return Problem(d, probe, d.base, d.phi, start, ex)
    met = cfg["metric"]
    try:
        n = int(met["dimension"])
        dom = Domain(tuple(met["lower"]), tuple(met["upper"]), float(met.get("inset", 1e-6)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"[metric] needs dimension, u, lower, upper: {exc}") from exc
    if dom.n != n:
        raise ConfigError("metric bounds do not match the dimension")
    g = ConformalMetric(_parse("metric.u", met.get("u", "0"), n), dom)
    sol = cfg["soliton"]
    d = None
    phi = const(0.0)
    if sol:
        f = _parse("soliton.f", sol.get("f", "1"), n)
        phi = _parse("soliton.phi", sol.get("phi", "0"), n)
        kw = dict(m=int(sol.get("m", 1)), mu=float(sol.get("mu", 0.0)), name="config")
        if "Lambda" in sol:
            kw["Lambda"] = _parse("soliton.Lambda", sol["Lambda"], n)
        else:
            if "lam" not in sol or "rho" not in sol:
                raise ConfigError("[soliton] needs Lambda or both lam and rho")
            kw["lam"], kw["rho"] = float(sol["lam"]), float(sol["rho"])
        try:
            d = W.WarpedSolitonData(g, f, phi, **kw)
        except ValueError as exc:
            raise ConfigError(f"[soliton]: {exc}") from exc
    start = cfg["probe"]["start"] if cfg["probe"]["start"] is not None else g.domain.center()
    return Problem(d, g, g, phi, start)


# ---------------------------------------------------------------------------
# report assembly


def _num(x):
    """Round to 9 significant digits; non-finite values become strings."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return float(f"{x:.9g}")
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, np.ndarray):
        return _num(x.tolist())
    return x


def _thin(t, X, max_points=201):
    """Evenly strided subsample (always keeping the last entry)."""
    stride = max(1, int(math.ceil(len(t) / (max_points - 1))))
    idx = list(range(0, len(t), stride))
    if idx[-1] != len(t) - 1:
        idx.append(len(t) - 1)
    return t[idx], X[idx]


def _sample(cfg, d: W.WarpedSolitonData):
    s = cfg["sampling"]
    return d.base.domain.sample(int(s["count"]), int(s["seed"]), bool(s["low_discrepancy"]))


def verify_one(cfg: dict, prob: Problem) -> dict:
    """Residuals, constants and checks for one soliton."""
    d = prob.data
    if d is None:
        raise ConfigError("verify needs soliton data ([soliton] section or --example)")
    tol = float(cfg["tolerances"]["residual"])
    ctol = float(cfg["tolerances"]["constancy"])
    P = _sample(cfg, d)
    expected = cfg["expected"]
    if expected is None and prob.ex is not None:
        expected = G.expected_constants(prob.ex)
    rep = W.verify(d, P, tol=tol, constancy_tol=ctol, expected=expected)
    residuals = {k: {"sup": v.sup, "mean": v.mean, "tol": v.tol, "pass": v.passed}
                 for k, v in rep.equations.items()}
    checks = dict(rep.checks)
    probes = {}
    if prob.ex is not None and prob.ex.name in G.NAMES:
        stol = float(cfg["tolerances"]["scalar"])
        diff = np.abs(np.atleast_1d(W.warped_scalar(d, P)) - G.closed_form_scalar(prob.ex, P))
        entry = {"sup": float(diff.max()), "mean": float(diff.mean()), "tol": stol,
                 "pass": bool(diff.max() <= stol)}
        if prob.ex.name == "halfspace_steady" and prob.ex.m != 1:
            entry["note"] = "printed scalar formula holds only for m = 1; report only"
        else:
            checks["closed_form_scalar"] = entry["pass"]
        residuals["closed_form_scalar"] = entry
    constants = dict(rep.constants)
    if expected:
        constants["expected"] = dict(expected)
    if d.mode == "rho":
        sb = W.scalar_bound_report(d, P, tol=tol)
        probes["scalar_bound"] = {"flag": sb.flag, "bound": sb.bound, "inf_scalar": sb.inf_scalar,
                                  "rho": sb.rho, "rho_max": sb.rho_max, "note": sb.note}
    fs = W.fiber_sign_check(d, P, tol=tol)
    probes["fiber_sign"] = {"premises": fs.premises, "conclusion": fs.conclusion,
                            "holds": fs.holds, **fs.detail}
    probes["notes"] = list(rep.notes)
    return {"residuals": residuals, "constants": constants, "probes": probes,
            "checks": checks}


def run_verify(cfg, prob):
    out = verify_one(cfg, prob)
    return out["residuals"], out["constants"], out["probes"], out["checks"]


def run_gallery(cfg, _prob):
    residuals, constants, probes, checks = {}, {}, {}, {}
    for name in G.NAMES:
        sub = verify_one(cfg, build_problem(cfg, name))
        residuals[name] = sub["residuals"]
        constants[name] = sub["constants"]
        probes[name] = sub["probes"]
        checks[name] = all(sub["checks"].values())
    return residuals, constants, probes, checks


def _direction(cfg, n):
    v = cfg["probe"]["direction"]
    if v is None:
        v = np.zeros(n)
        v[-1] = 1.0
    return np.asarray(v, dtype=float)


def run_geodesic(cfg, prob):
    g = prob.probe_metric
    p = cfg["probe"]
    tr = L.integrate_geodesic(g, prob.start, _direction(cfg, g.n), float(p["horizon"]), float(p["step"]))
    drift = float(np.max(np.abs(tr.speed - 1.0)))
    stol = float(cfg["tolerances"]["speed"])
    probes = {
        "geodesic": {
            "start": prob.start.tolist(), "end_time": tr.end, "end_point": tr.x[-1].tolist(),
            "exit_reason": tr.exit_reason, "speed_drift": drift,
            "series": [[float(t)] + list(map(float, x)) for t, x in
                       zip(*_thin(tr.t, tr.x))],
        }
    }
    if tr.exit_reason == "unresolved":
        probes["geodesic"]["note"] = (
            f"coordinates run away before t = {tr.end:.9g}; a unit-speed geodesic leaving every "
            "compact set in finite time is incomplete")
    return {}, {}, probes, {"speed_drift": drift <= stol}


def _ray_curve(cfg, prob):
    g = prob.probe_metric
    how = cfg["probe"]["ray"]
    if how != "last-axis":
        raise ConfigError(f"unsupported ray {how!r} (only 'last-axis')")
    base = np.array(prob.start, dtype=float)
    return L.ray_curve(g.n, base, -1), base


def run_arclength(cfg, prob):
    g = prob.probe_metric
    p = cfg["probe"]
    curve, base = _ray_curve(cfg, prob)
    t0 = float(p["from"])
    t1 = math.inf if p["to"] is None else float(p["to"])
    horizon = None if p["limit"] is None else float(p["limit"])
    tol = float(cfg["tolerances"]["residual"])
    entry = {"curve": [to_text(c) for c in curve], "from": t0, "to": t1}
    checks = {}
    try:
        length = L.curve_arclength(g, curve, t0, t1, horizon=horizon)
        entry["length"] = length
        entry["converged"] = True
        upper = t1
        if math.isinf(t1):
            entry["flag"] = "incomplete along ray"
        else:
            entry["flag"] = "finite segment"
    except L.DivergentLength as exc:
        entry["length"] = exc.length
        entry["converged"] = False
        entry["flag"] = f"diverges beyond {exc.beyond:.9g}"
        entry["note"] = ("divergent curve criterion: unbounded length along this ray is "
                         "consistent with completeness in this direction")
        upper = exc.beyond
    closed = _closed_form_length(prob, t0, upper)
    if closed is not None:
        entry["closed_form"] = closed
        entry["closed_form_error"] = abs(entry["length"] - closed)
        checks["closed_form_length"] = entry["closed_form_error"] <= tol
    checks["computed"] = math.isfinite(entry["length"])
    return {}, {}, {"arclength": entry}, checks


def _log_sinh(t):
    return t + math.log1p(-math.exp(-2.0 * t)) - math.log(2.0)


def _closed_form_length(prob, t0, t1):
    ex = prob.ex
    if ex is None:
        return None
    if ex.name == "hyperbolic_traceless" and math.isfinite(t1):
        return _log_sinh(t1) - _log_sinh(t0)
    if ex.name == "halfspace_steady":
        return 1.0 / t0 - (0.0 if math.isinf(t1) else 1.0 / t1)
    if ex.name == "cosh_traceless" and math.isfinite(t1) and t1 < 700:
        return math.sinh(t1) - math.sinh(t0)
    return None


def _lambda_of(prob: Problem, cfg):
    d = prob.data
    if d is None:
        return None
    if d.mode == "rho":
        return d.lam
    try:
        return W.derive_soliton_constants(d, _sample(cfg, d)).lam
    except (W.DegenerateAlpha, W.ConstantScalarCase):
        vals = np.atleast_1d(W.soliton_function(d, _sample(cfg, d)))
        return float(vals.mean()) if np.ptp(vals) <= 1e-12 else None


def run_growth(cfg, prob):
    g = prob.probe_metric
    p = cfg["probe"]
    v = cfg["probe"]["direction"]
    try:
        gs = L.potential_growth(g, prob.phi, prob.start, v, float(p["horizon"]), float(p["step"]),
                                rays=int(p["rays"]), seed=int(cfg["sampling"]["seed"]))
    except L.InsufficientHorizon as exc:
        return {}, {}, {"potential_growth_error": str(exc)}, {"horizon_reached": False}
    lam = _lambda_of(prob, cfg)
    entry = {
        "rays": [{"direction": gs.directions[r].tolist(), "tail_max": float(gs.tail_max[r])}
                 for r in range(len(gs.directions))],
        "min_tail_max": gs.min_tail_max,
        "horizon": gs.horizon,
        "lambda": lam,
        "note": "limsup proxied by the maximum over the final quarter; minimum over sampled "
                "directions only, no uniformity claimed",
    }
    if lam is not None:
        entry["min_tail_max_minus_lambda"] = gs.min_tail_max - lam
    t, r = _thin(gs.t, gs.ratio[:, 0])
    return {}, {}, {"potential_growth": [[float(a), float(b)] for a, b in zip(t, r)],
                    "potential_growth_summary": entry}, {"horizon_reached": True}


def run_volume(cfg, prob):
    g = prob.volume_metric
    p = cfg["probe"]
    d = prob.data
    if p["weight"] is not None:
        w, wnote = _parse("probe.weight", p["weight"], g.n), "weight from config"
    elif d is not None:
        w, wnote = L.soliton_weight(d.phi, d.rho if d.mode == "rho" else None, d.N)
    else:
        w, wnote = prob.phi, "weight = phi"
    seed = int(cfg["sampling"]["seed"])
    ests = []
    for R in p["radii"]:
        ests.append(L.weighted_ball_volume(g, w, prob.start, float(R), int(p["samples"]), seed))
    rows = [{"radius": e.radius, "estimate": e.estimate, "stderr": e.stderr, "samples": e.samples,
             "seed": e.seed, "clipped": e.clipped} for e in ests]
    entry = {"weight": to_text(w), "weight_note": wnote, "start": prob.start.tolist(), "balls": rows,
             "notes": sorted({n for e in ests for n in e.notes})}
    checks = {"nonnegative": all(e.estimate >= 0 for e in ests)}
    if len(ests) >= 4:
        fit = L.growth_bound_check(ests)
        entry["growth_fit"] = {"fits_quadratic_exponent": fit.fits_quadratic_exponent, "C0": fit.C0,
                               "intercept": fit.intercept, "residual_rms": fit.residual_rms}
        checks["growth_fit"] = fit.fits_quadratic_exponent
    return {}, {}, {"volume": entry}, checks


RUNNERS = {"verify": run_verify, "gallery": run_gallery, "geodesic": run_geodesic,
           "arclength": run_arclength, "growth": run_growth, "volume": run_volume}


def run(cfg: dict) -> dict:
    """Execute a resolved configuration and return the report dictionary."""
    start = time.perf_counter()
    prob = None if cfg["mode"] == "gallery" else build_problem(cfg)
    residuals, constants, probes, checks = RUNNERS[cfg["mode"]](cfg, prob)
    verdict = "pass" if all(bool(v) for v in checks.values()) else "fail"
    return {
        "config": _num(cfg),
        "residuals": _num(residuals),
        "constants": _num(constants),
        "probes": _num({**probes, "checks": checks}),
        "verdict": verdict,
        "meta": {"schema": SCHEMA, "version": __version__,
                 "wall_time_s": round(time.perf_counter() - start, 3)},
    }


def error_report(cfg: Optional[dict], message: str, point=None) -> dict:
    meta = {"schema": SCHEMA, "version": __version__, "error": message}
    if point is not None:
        meta["point"] = _num(np.asarray(point, dtype=float))
    return {"config": _num(cfg or {}), "residuals": {}, "constants": {}, "probes": {},
            "verdict": "error", "meta": meta}


# ---------------------------------------------------------------------------
# output


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (list, dict)):
        rows.append((prefix, f"[{len(obj)} entries]"))
    else:
        rows.append((prefix, obj))


def format_text(report: dict) -> str:
    rows = []
    for key in ("verdict", "residuals", "constants", "probes"):
        _flatten(key, report[key], rows)
    width = max(len(k) for k, _ in rows)
    lines = [f"{k:<{width}}  {v}" for k, v in rows]
    lines.append(f"{'meta.schema':<{width}}  {report['meta']['schema']}")
    return "\n".join(lines) + "\n"


def emit_report(report: dict, fmt: str = "json", sink=None):
    """Write ``report`` as one JSON document or a fixed-width text table."""
    text = (json.dumps(report, indent=2, sort_keys=False) + "\n") if fmt == "json" else format_text(report)
    if sink is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    elif isinstance(sink, str):
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sink.write(text)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="warpsoliton",
                                 description="Verify and probe warped-product gradient solitons.")
    ap.add_argument("mode", nargs="?", choices=MODES, help="what to run (default: config mode or verify)")
    ap.add_argument("--config", help="TOML run configuration")
    ap.add_argument("--example", help="gallery example name")
    ap.add_argument("--n", type=int, help="base dimension of the example")
    ap.add_argument("--m", type=int, help="fiber dimension of the example")
    ap.add_argument("--c", type=float, help="Schouten shift c / Gaussian lambda0")
    ap.add_argument("--rho", type=float, help="declared rho of gaussian_shrinker")
    ap.add_argument("--direction", help="unit vector a for schouten_linear, comma separated")
    ap.add_argument("--regime", choices=("almost", "rho"), help="explicit Lambda or (lam, rho)")
    ap.add_argument("--inset", type=float, help="margin of the sampling box")
    ap.add_argument("--points", type=int, help="number of sample points (default 200)")
    ap.add_argument("--seed", type=int, help="random seed (default 0)")
    ap.add_argument("--low-discrepancy", action="store_true", help="Halton points instead of uniform")
    ap.add_argument("--tol", type=float, help="residual tolerance (default 1e-6)")
    ap.add_argument("--constancy-tol", type=float, help="spread tolerance (default 1e-8)")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--output", help="write the report here instead of stdout")
    ap.add_argument("--rays", type=int, help="number of rays for growth probes")
    ap.add_argument("--horizon", type=float, help="geodesic horizon T; arclength search cap")
    ap.add_argument("--step", type=float, help="integrator step (default 1e-3)")
    ap.add_argument("--radii", help="ball radii, comma separated")
    ap.add_argument("--samples", type=int, help="Monte Carlo samples per ball")
    ap.add_argument("--ray", help="arclength curve (last-axis)")
    ap.add_argument("--from", dest="from_", type=float, help="arclength start parameter")
    ap.add_argument("--to", type=float, help="arclength end parameter (default infinity)")
    ap.add_argument("--start", help="base point, comma separated")
    ap.add_argument("--velocity", help="initial direction for geodesic/growth probes, comma separated")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    cfg = None
    try:
        cfg = resolve_config(args)
        log.info("running %s", cfg["mode"])
        report = run(cfg)
    except DomainViolation as exc:
        log.error("domain violation: %s", exc)
        report = error_report(cfg, f"domain violation: {exc}", getattr(exc, "point", None))
    except (ConfigError, ValueError) as exc:
        log.error("%s", exc)
        report = error_report(cfg, str(exc))
    try:
        emit_report(report, args.format, args.output)
    except OSError as exc:
        log.error("cannot write report: %s", exc)
        return 2
    return {"pass": 0, "fail": 1}.get(report["verdict"], 2)


if __name__ == "__main__":
    raise SystemExit(main())
