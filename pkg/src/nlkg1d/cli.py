"""Command-line front end: deterministic CSV/JSON artifacts.

Subcommands: profile, curve, analyze, classify, hessian, simulate,
coercivity-demo.  Input is a JSON config file (--config); unknown keys are
rejected.  Exit codes: 0 success, 2 validation error, 3 convergence or
blow-up failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np
from scipy.integrate import simpson

from . import bifurcation, profiles, simulator, spectral
from .errors import (
    ConvergenceFailure,
    DomainViolation,
    Error,
    GridMismatch,
    IntegrationBlowup,
    NonPositiveCoefficient,
    NumericBlowup,
    PreconditionViolation,
    RegimeViolation,
    ToleranceFailure,
)
from .model import ModelParams

_VALIDATION_ERRORS = (
    NonPositiveCoefficient,
    RegimeViolation,
    DomainViolation,
    GridMismatch,
    PreconditionViolation,
)
_CONVERGENCE_ERRORS = (
    ToleranceFailure,
    ConvergenceFailure,
    IntegrationBlowup,
    NumericBlowup,
)

_CURVE_POINTS = 200

_SCHEMA = {
    "a": (int, float),
    "b": (int, float),
    "m": (int, float),
    "omega": (int, float),
    "sigma": (int, float),
    "grid": {"L": (int, float), "n": int},
    "sim": {
        "dt": (int, float),
        "t_end": (int, float),
        "N": int,
        "L_d": (int, float),
        "eps": (int, float),
        "seed": int,
        "perturbation": str,
    },
    "demo": {"s0": (int, float), "k_max": int},
    "output": {"format": str, "path": str},
}


class ConfigError(Error):
    """The configuration file does not match the documented schema."""


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _validate_section(raw, _SCHEMA, "")
    return raw


def _validate_section(data: dict, schema: dict, where: str):
    for key, val in data.items():
        if key not in schema:
            raise ConfigError(f"unknown config key {where}{key!r}")
        spec = schema[key]
        if isinstance(spec, dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {where}{key!r} must be an object")
            _validate_section(val, spec, f"{where}{key}.")
        else:
            if isinstance(val, bool) or not isinstance(val, spec):
                raise ConfigError(
                    f"config key {where}{key!r} has wrong type {type(val).__name__}"
                )


def _require(cfg: dict, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing required key(s): {', '.join(missing)}")


def _params(cfg: dict, relaxed: bool = False) -> ModelParams:
    _require(cfg, "a", "b", "m")
    return ModelParams(float(cfg["a"]), float(cfg["b"]), float(cfg["m"]), relaxed=relaxed)


def _spatial_grid(cfg: dict, p: ModelParams, omega: float) -> profiles.SpatialGrid:
    gcfg = cfg.get("grid", {})
    n = int(gcfg.get("n", 4096))
    if "L" in gcfg:
        return profiles.SpatialGrid(float(gcfg["L"]), n)
    return profiles.default_grid(p, omega, n)


# -- output plumbing --------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _resolve_output(args, cfg: dict, default_format: str):
    out_cfg = cfg.get("output", {})
    fmt = args.format or out_cfg.get("format") or default_format
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")
    path = args.out or out_cfg.get("path")
    return fmt, path


def _write(path, text: str):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(args, cfg, columns, rows, default_format="csv"):
    fmt, path = _resolve_output(args, cfg, default_format)
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        _write(path, "\n".join(lines) + "\n")
    else:
        payload = {"columns": list(columns), "rows": [list(map(float, r)) for r in rows]}
        _write(path, json.dumps(payload, indent=2) + "\n")


def _emit_report(args, cfg, report: dict, default_format="json"):
    fmt, path = _resolve_output(args, cfg, default_format)
    if fmt == "json":
        _write(path, json.dumps(report, indent=2) + "\n")
    else:
        lines = ["key,value"]
        lines += [f"{k},{json.dumps(v)}" for k, v in report.items()]
        _write(path, "\n".join(lines) + "\n")


# -- subcommands ------------------------------------------------------------


def cmd_profile(args, cfg: dict) -> int:
    p = _params(cfg)
    _require(cfg, "omega")
    omega = float(cfg["omega"])
    prof = profiles.closed_form(p, omega, _spatial_grid(cfg, p, omega))
    x = prof.grid.x()
    r, rp = prof.values, prof.derivative
    if args.reflect:
        x = np.concatenate([-x[:0:-1], x])
        r = np.concatenate([r[:0:-1], r])
        rp = np.concatenate([-rp[:0:-1], rp])
    _emit_table(args, cfg, ("x", "R", "Rprime"), zip(x, r, rp))
    return 0


def cmd_curve(args, cfg: dict) -> int:
    p = _params(cfg)
    omegas = p.window().linspace(_CURVE_POINTS)
    rows = [
        (
            w,
            float(bifurcation.sigma(p, w)),
            float(bifurcation.sigma_prime(p, w)),
            bifurcation.energy_e(p, w),
        )
        for w in omegas
    ]
    _emit_table(args, cfg, ("omega", "sigma", "sigma_prime", "energy"), rows)
    return 0


def cmd_analyze(args, cfg: dict) -> int:
    p = _params(cfg)
    _emit_report(args, cfg, bifurcation.critical_omegas(p).to_dict())
    return 0


def cmd_classify(args, cfg: dict) -> int:
    p = _params(cfg)
    _require(cfg, "sigma")
    _emit_report(args, cfg, bifurcation.classify(p, float(cfg["sigma"])).to_dict())
    return 0


def cmd_hessian(args, cfg: dict) -> int:
    p = _params(cfg)
    _require(cfg, "omega")
    omega = float(cfg["omega"])
    grid = _spatial_grid(cfg, p, omega)
    prof = profiles.closed_form(p, omega, grid)
    system = spectral.assemble(prof)
    eig, v, eta = spectral.constrained_min_mode(system)
    dr = spectral.domega_profile(p, omega, grid)
    tnorm = math.sqrt(system.norm_sq(dr, 1.0))
    overlap = abs(system.mass_inner(v, eta, dr / tnorm, 1.0 / tnorm))
    _emit_report(
        args,
        cfg,
        {
            "a": p.a,
            "b": p.b,
            "m": p.m,
            "omega": omega,
            "half_width": grid.half_width,
            "n": grid.n,
            "min_eigenvalue": eig,
            "kernel_overlap": overlap,
            "sigma_prime": float(bifurcation.sigma_prime(p, omega)),
        },
    )
    return 0


def cmd_simulate(args, cfg: dict) -> int:
    p = _params(cfg)
    _require(cfg, "omega")
    scfg = cfg.get("sim", {})
    eps = float(scfg.get("eps", 0.0))
    series = simulator.run(
        simulator.default_config(
            p,
            float(cfg["omega"]),
            t_end=float(scfg.get("t_end", 50.0)),
            n_points=int(scfg.get("N", 4096)),
            half_width=(float(scfg["L_d"]) if "L_d" in scfg else None),
            dt=(float(scfg["dt"]) if "dt" in scfg else None),
            perturbation=scfg.get("perturbation", "bump" if eps > 0 else "none"),
            eps=eps,
            seed=int(scfg.get("seed", 0)),
        )
    )
    _emit_table(args, cfg, simulator.TimeSeries.COLUMNS, series.rows())
    return 0


def coercivity_table(p: ModelParams, s0: float, sigma_level: float, k_max: int):
    """Escaping-plateau test family: closed forms against quadrature.

    For W >= 0 with an interior zero s0, the family u_k (value s0 on
    [-k, k], linear ramp to zero over one unit) has H^1 norm growing
    affinely in k while the reduced energy stays bounded:

        ||u_k||^2   = 2 s0^2 (k + 1/3)
        ||u_k'||^2  = 2 s0^2
        E*(u_k, omega_k) = s0^2 + 3 sigma^2 / (4 s0^2 (3k + 1))
                           + (2/s0) int_0^{s0} W.

    Each closed form is paired with composite-Simpson quadrature split at
    the ramp so the polynomial pieces integrate to near machine accuracy.
    """
    w_s0 = float(p.w(s0))
    if abs(w_s0) > 1e-10:
        raise PreconditionViolation(
            f"W(s0) = {w_s0:.3e} must vanish to 1e-10; the family needs an "
            "interior zero of W (tau <= 1 territory)"
        )
    # int_0^{s0} W(t) dt in closed form
    w_int = p.m**2 * s0**3 / 6.0 - p.a * s0**5 / 5.0 + p.b * s0**7 / 7.0
    tail_term = 2.0 / s0 * w_int

    ramp = np.linspace(0.0, 1.0, 2049)  # u = s0*(1 - y) on the unit ramp
    u_ramp = s0 * (1.0 - ramp)
    ramp_u2 = float(simpson(u_ramp**2, x=ramp))
    ramp_w = float(simpson(p.w(u_ramp), x=ramp))
    ramp_du2 = float(simpson(np.full_like(ramp, s0**2), x=ramp))

    rows = []
    for k in range(1, k_max + 1):
        l2_closed = 2.0 * s0**2 * (k + 1.0 / 3.0)
        du_closed = 2.0 * s0**2
        e_closed = s0**2 + 3.0 * sigma_level**2 / (4.0 * s0**2 * (3.0 * k + 1.0)) + tail_term
        l2_quad = 2.0 * (s0**2 * k + ramp_u2)
        du_quad = 2.0 * ramp_du2
        w_quad = 2.0 * (w_s0 * k + ramp_w)
        e_quad = 0.5 * du_quad + sigma_level**2 / (2.0 * l2_quad) + w_quad
        rows.append((k, l2_closed, l2_quad, du_closed, du_quad, e_closed, e_quad))
    return rows


def cmd_coercivity_demo(args, cfg: dict) -> int:
    p = _params(cfg, relaxed=True)
    _require(cfg, "sigma")
    dcfg = cfg.get("demo", {})
    rows = coercivity_table(
        p,
        float(dcfg.get("s0", 1.0)),
        float(cfg["sigma"]),
        int(dcfg.get("k_max", 100)),
    )
    _emit_table(
        args,
        cfg,
        (
            "k",
            "u_l2sq_closed",
            "u_l2sq_quad",
            "du_l2sq_closed",
            "du_l2sq_quad",
            "energy_closed",
            "energy_quad",
        ),
        rows,
    )
    return 0


_COMMANDS = {
    "profile": cmd_profile,
    "curve": cmd_curve,
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "hessian": cmd_hessian,
    "simulate": cmd_simulate,
    "coercivity-demo": cmd_coercivity_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlkg1d",
        description="Standing waves, charge-curve bifurcations and stability "
        "experiments for the 1-D quartic-sextic Klein-Gordon field.",
        epilog="Computed defaults: profile grid L = 40/sqrt(m^2 - omega^2) with "
        "n = 4096 intervals; simulation box L_d = 40/sqrt(m^2 - omega^2), "
        "N = 4096 points, dt = dx/2; curve sweeps 200 frequencies.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the JSON config file")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument(
        "--format",
        choices=("csv", "json"),
        default=None,
        help="output format (default: csv for tables, json for reports)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "profile": "emit the standing-wave profile as x,R,Rprime",
        "curve": "emit omega,sigma,sigma_prime,energy over the frequency window",
        "analyze": "emit the charge-curve bifurcation report",
        "classify": "count and classify the branches at one charge level",
        "hessian": "smallest constrained Hessian eigenvalue at one frequency",
        "simulate": "time-integrate the field and emit the diagnostic series",
        "coercivity-demo": "tabulate the escaping family that defeats coercivity",
    }
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "profile":
            sp.add_argument(
                "--reflect",
                action="store_true",
                help="emit the full line by even reflection instead of [0, L]",
            )
        sp.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.handler(args, cfg)
    except _VALIDATION_ERRORS as exc:
        print(f"nlkg1d: invalid input: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"nlkg1d: bad config: {exc}", file=sys.stderr)
        return 2
    except _CONVERGENCE_ERRORS as exc:
        print(f"nlkg1d: computation failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
