"""Command-line front end.

Subcommands: threshold, find-ss, find-nss, intensity, sweep, field-profile.
Parameters come from an optional flat key=value config file plus flag
overrides (flags win).  Data goes to stdout or --out as CSV or JSON;
diagnostics go to stderr only, at the level selected by SPECSING_LOG.
Output is deterministic: identical configuration yields byte-identical data.

Exit statuses: 0 success, 2 invalid input, 3 numerical non-convergence,
4 below threshold (intensity command only).
"""
from __future__ import annotations

import argparse
import cmath
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import __version__
from ._backend import backend_name
from .errors import (BelowThresholdError, BlowUpError, ConvergenceError,
                     DegenerateParameterError, InvalidParameterError,
                     QuadratureError, SingularityProximityError, SpecsingError)
from .linear_scattering import (find_linear_singularity, threshold_gain,
                                threshold_gain_weak_absorption)
from .nonlinear_bvp import ShootingConfig, assemble_amplitudes, face_terms, integrate_field
from .perturbation import emitted_intensity
from .singularity_finder import (find_nonlinear_singularity, intensity_for_gain,
                                 sweep, sweep_to_csv)
from .slab_model import (NonlinearityKind, NonlinearitySpec, SlabMedium,
                         WavePoint, gain_from_kappa)

log = logging.getLogger("specsing")

_CONFIG_KEYS = {
    "eta", "kappa", "thickness_a", "k", "K", "nonlinearity.kind",
    "nonlinearity.sigma", "n_plus", "mode", "steps", "tol", "format", "out",
}

SCHEMA = "specsing/1"


@dataclass
class RunConfig:
    """Validated parameter record assembled from config file and flags."""

    eta: Optional[float] = None
    kappa: Optional[float] = None
    thickness_a: float = 1.0
    k: Optional[float] = None
    K: Optional[float] = None
    kind: Optional[str] = None
    sigma: float = 0.0
    n_plus: complex = 1.0 + 0.0j
    mode: int = 1
    steps: int = 2048
    tol: Optional[float] = None
    format: str = "json"
    out: Optional[str] = None

    def medium(self) -> SlabMedium:
        self.require("eta")
        kappa = self.kappa if self.kappa is not None else 0.0
        return SlabMedium(eta=self.eta, kappa=kappa, thickness_a=self.thickness_a)

    def nonlinearity(self) -> NonlinearitySpec:
        kind = self.kind
        if kind is None:
            kind = "kerr" if self.sigma != 0.0 else "none"
        try:
            nk = NonlinearityKind(kind)
        except ValueError:
            raise InvalidParameterError(
                f"nonlinearity.kind must be one of none/kerr/custom, got {kind!r}")
        if nk is NonlinearityKind.CUSTOM:
            raise InvalidParameterError(
                "custom nonlinearity laws are only available through the Python API")
        return NonlinearitySpec(kind=nk, sigma=self.sigma)

    def wave_point(self) -> WavePoint:
        medium = self.medium()
        if self.K is not None:
            return WavePoint.from_K(medium, self.K)
        if self.k is not None:
            return WavePoint.from_k(medium, self.k)
        raise InvalidParameterError("missing wavenumber: set k or K")

    def shooting(self) -> ShootingConfig:
        return ShootingConfig(steps=self.steps)

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise InvalidParameterError(f"missing required parameter: {name}")


def _parse_value(key: str, raw: str) -> object:
    try:
        if key in ("eta", "kappa", "thickness_a", "k", "K",
                   "nonlinearity.sigma", "tol"):
            return float(raw)
        if key in ("mode", "steps"):
            return int(raw)
        if key == "n_plus":
            return complex(raw.replace(" ", ""))
        return raw
    except ValueError:
        raise InvalidParameterError(f"config key {key!r}: cannot parse {raw!r}")


def load_config_file(path: str) -> dict:
    """Parse a flat key = value file; '#' starts a comment."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise InvalidParameterError(
                        f"{path}:{lineno}: expected key = value, got {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in _CONFIG_KEYS:
                    raise InvalidParameterError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = _parse_value(key, raw)
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config file {path}: {exc}")
    return values


_FIELD_MAP = {
    "eta": "eta", "kappa": "kappa", "thickness_a": "thickness_a", "k": "k",
    "K": "K", "nonlinearity.kind": "kind", "nonlinearity.sigma": "sigma",
    "n_plus": "n_plus", "mode": "mode", "steps": "steps", "tol": "tol",
    "format": "format", "out": "out",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(cfg, _FIELD_MAP[key], value)
    overrides = {
        "eta": args.eta, "kappa": args.kappa, "thickness_a": args.thickness,
        "sigma": args.sigma, "mode": args.mode, "steps": args.steps,
        "tol": args.tol, "format": args.format, "out": args.out,
        "k": getattr(args, "k", None), "K": getattr(args, "K", None),
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    if args.n_plus is not None:
        try:
            cfg.n_plus = complex(args.n_plus.replace(" ", ""))
        except ValueError:
            raise InvalidParameterError(f"--n-plus: cannot parse {args.n_plus!r}")
    if getattr(args, "kind", None) is not None:
        cfg.kind = args.kind
    if cfg.format not in ("csv", "json"):
        raise InvalidParameterError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.steps < 16:
        raise InvalidParameterError(f"steps must be >= 16, got {cfg.steps}")
    if cfg.tol is not None and not (cfg.tol > 0.0):
        raise InvalidParameterError(f"tol must be positive, got {cfg.tol}")
    if cfg.mode < 1:
        raise InvalidParameterError(f"mode must be >= 1, got {cfg.mode}")
    return cfg


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", cfg.out)
    else:
        sys.stdout.write(text)


def _record(cfg: RunConfig, command: str, data: dict) -> None:
    """Write a flat scalar record as JSON or single-row CSV."""
    if cfg.format == "json":
        payload = {"schema": SCHEMA, "command": command, **data}
        _emit(cfg, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        keys = list(data)
        row = ",".join(_fmt(v) if isinstance(v, float) else str(v)
                       for v in data.values())
        _emit(cfg, ",".join(keys) + "\n" + row + "\n")


def cmd_threshold(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg.require("eta")
    root = find_linear_singularity(cfg.eta, cfg.mode, tol=cfg.tol or 1e-12)
    a = cfg.thickness_a
    g0 = threshold_gain(root.eta0, root.kappa0, a)
    g0_weak = threshold_gain_weak_absorption(root.eta0, a)
    log.info("branch %d root: kappa0=%.9g K0=%.9g", cfg.mode, root.kappa0, root.K0)
    _record(cfg, "threshold", {
        "eta0": root.eta0,
        "mode": root.mode_index,
        "kappa0": root.kappa0,
        "K0": root.K0,
        "k0": root.K0 / a,
        "residual": root.residual,
        "g0": g0,
        "g0_weak_absorption": g0_weak,
        "g0_rel_gap": abs(g0_weak - g0) / g0,
        "thickness_a": a,
    })
    return 0


def cmd_find_ss(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg.require("eta")
    root = find_linear_singularity(cfg.eta, cfg.mode, tol=cfg.tol or 1e-12)
    a = cfg.thickness_a
    medium = SlabMedium(eta=root.eta0, kappa=root.kappa0, thickness_a=a)
    _record(cfg, "find-ss", {
        "eta0": root.eta0,
        "mode": root.mode_index,
        "kappa0": root.kappa0,
        "K0": root.K0,
        "k0": root.K0 / a,
        "residual": root.residual,
        "g0": gain_from_kappa(medium, root.K0),
    })
    return 0


def cmd_find_nss(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg.require("eta")
    nl = cfg.nonlinearity()
    result = find_nonlinear_singularity(
        cfg.eta, nl.sigma if nl.kind is not NonlinearityKind.NONE else 0.0,
        cfg.n_plus, cfg.thickness_a, cfg.mode, cfg.shooting(),
        tol=cfg.tol or 1e-10)
    _record(cfg, "find-nss", {
        "eta_star": result.eta,
        "kappa_star": result.kappa_star,
        "K_star": result.K_star,
        "k_star": result.K_star / cfg.thickness_a,
        "n_plus_re": result.n_plus.real,
        "n_plus_im": result.n_plus.imag,
        "intensity": 0.5 * abs(result.n_plus) ** 2,
        "residual": result.residual,
        "iterations": result.iterations,
        "seed_origin": result.seed_origin.value,
        "g": result.gain.g,
        "g0": result.gain.g0,
        "excess": result.gain.excess,
    })
    return 0


def cmd_intensity(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg.require("eta")
    nl = cfg.nonlinearity()
    if nl.kind is NonlinearityKind.NONE or nl.sigma <= 0.0:
        raise InvalidParameterError("intensity requires a Kerr nonlinearity: set sigma > 0")
    a = cfg.thickness_a
    root = find_linear_singularity(cfg.eta, cfg.mode, tol=1e-12)
    g0 = -2.0 * root.K0 * root.kappa0 / a
    target = args.gain
    closed = emitted_intensity(cfg.eta, target, g0, nl.sigma)
    if closed.below_threshold:
        _record(cfg, "intensity", {
            "gain": target, "g0": g0, "intensity_closed_form": 0.0,
            "intensity_finder": 0.0, "rel_gap": 0.0, "validity_gauge": 0.0,
            "status": "below-threshold",
        })
        return 4
    intensity2, result = intensity_for_gain(
        cfg.eta, nl.sigma, target, a, cfg.mode, cfg.shooting(),
        finder_tol=cfg.tol or 1e-10)
    finder_half = 0.5 * intensity2
    _record(cfg, "intensity", {
        "gain": target,
        "g0": g0,
        "intensity_closed_form": closed.intensity,
        "intensity_finder": finder_half,
        "rel_gap": abs(finder_half - closed.intensity) / finder_half,
        "validity_gauge": nl.sigma * intensity2,
        "residual": result.residual,
        "status": "ok",
    })
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg.require("eta")
    nl = cfg.nonlinearity()
    axis = {"n-plus": "n_plus", "mode": "mode"}.get(args.axis)
    if axis is None:
        raise InvalidParameterError(f"--axis must be n-plus or mode, got {args.axis!r}")
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise InvalidParameterError(f"--values: cannot parse {args.values!r}")
    elif args.points is not None:
        if args.start is None or args.stop is None or args.points < 0:
            raise InvalidParameterError("--start/--stop/--points must be given together")
        if args.points == 0:
            values = []
        elif args.points == 1:
            values = [args.start]
        else:
            step = (args.stop - args.start) / (args.points - 1)
            values = [args.start + i * step for i in range(args.points)]
    else:
        raise InvalidParameterError("sweep needs --values or --start/--stop/--points")
    if axis == "mode":
        bad = [v for v in values if v != int(v) or v < 1]
        if bad:
            raise InvalidParameterError(f"mode sweep values must be integers >= 1: {bad}")
    sigma = nl.sigma if nl.kind is not NonlinearityKind.NONE else 0.0
    points = sweep(cfg.eta, sigma, cfg.thickness_a, cfg.mode, axis, values,
                   cfg.shooting(), n_plus=cfg.n_plus, tol=cfg.tol or 1e-10)
    n_failed = sum(1 for p in points if p.result is None)
    log.info("sweep finished: %d points, %d failed", len(points), n_failed)
    if cfg.format == "csv":
        buf = io.StringIO()
        sweep_to_csv(points, buf, status_column=True)
        _emit(cfg, buf.getvalue())
    else:
        rows = []
        for p in points:
            if p.result is None:
                rows.append({"value": p.value, "status": p.status})
                continue
            r = p.result
            rows.append({
                "value": p.value, "status": p.status, "eta": r.eta,
                "kappa_star": r.kappa_star, "K_star": r.K_star,
                "N_plus_re": r.n_plus.real, "N_plus_im": r.n_plus.imag,
                "intensity": 0.5 * abs(r.n_plus) ** 2, "g": r.gain.g,
                "g0": r.gain.g0, "residual": r.residual,
                "iterations": r.iterations,
            })
        payload = {"schema": SCHEMA, "command": "sweep", "axis": args.axis,
                   "rows": rows}
        _emit(cfg, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_field_profile(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cfg.require("eta", "kappa")
    medium = cfg.medium()
    nl = cfg.nonlinearity()
    wave = cfg.wave_point()
    gamma = nl.gamma(wave.K)
    shooting = ShootingConfig(steps=cfg.steps, record_trajectory=True)
    res = integrate_field(medium.n, wave.K, gamma, nl.f, cfg.n_plus, shooting)
    amps = assemble_amplitudes(face_terms(res.state, wave.K), wave.K, cfg.n_plus)
    meta = {
        "eta": medium.eta, "kappa": medium.kappa, "thickness_a": medium.thickness_a,
        "K": wave.K, "k": wave.k, "gamma": gamma,
        "n_plus_re": amps.n_plus.real, "n_plus_im": amps.n_plus.imag,
        "n_minus_re": amps.n_minus.real, "n_minus_im": amps.n_minus.imag,
        "n_minus_tilde_re": amps.n_minus_tilde.real,
        "n_minus_tilde_im": amps.n_minus_tilde.imag,
        "steps": cfg.steps,
    }
    if cfg.format == "csv":
        buf = io.StringIO()
        for key, value in meta.items():
            buf.write(f"# {key} = {_fmt(value) if isinstance(value, float) else value}\n")
        res.trajectory.write_csv(buf)
        _emit(cfg, buf.getvalue())
    else:
        payload = {
            "schema": SCHEMA, "command": "field-profile", **meta,
            "x": list(res.trajectory.x),
            "re_psi": [p.real for p in res.trajectory.psi],
            "im_psi": [p.imag for p in res.trajectory.psi],
            "re_dpsi": [d.real for d in res.trajectory.dpsi],
            "im_dpsi": [d.imag for d in res.trajectory.dpsi],
        }
        _emit(cfg, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def _add_common(p: argparse.ArgumentParser, wavenumber: bool = False) -> None:
    p.add_argument("--config", help="flat key = value parameter file")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default json)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--eta", type=float, help="real part of the refractive index")
    p.add_argument("--kappa", type=float, help="imaginary part of the refractive index")
    p.add_argument("--thickness", type=float, help="slab thickness in cm (default 1)")
    p.add_argument("--sigma", type=float, help="Kerr coefficient in cm^2/W")
    p.add_argument("--kind", choices=("none", "kerr"), help="nonlinearity kind")
    p.add_argument("--n-plus", dest="n_plus", help="transmitted amplitude (complex ok)")
    p.add_argument("--mode", type=int, help="branch index of the linear root (default 1)")
    p.add_argument("--steps", type=int, help="RK4 step count (default 2048)")
    p.add_argument("--tol", type=float, help="solver tolerance")
    if wavenumber:
        p.add_argument("--k", type=float, help="physical wavenumber in 1/cm")
        p.add_argument("--K", type=float, help="dimensionless wavenumber a*k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specsing",
        description="Spectral singularities and lasing threshold of a nonlinear slab")
    parser.add_argument("--version", action="version",
                        version=f"specsing {__version__} ({backend_name()} kernel)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="linear lasing threshold of a branch")
    _add_common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("find-ss", help="locate a linear spectral singularity")
    _add_common(p)
    p.set_defaults(func=cmd_find_ss)

    p = sub.add_parser("find-nss", help="locate a nonlinear spectral singularity")
    _add_common(p)
    p.set_defaults(func=cmd_find_nss)

    p = sub.add_parser("intensity", help="emitted intensity at a given gain")
    _add_common(p)
    p.add_argument("--gain", type=float, required=True,
                   help="pump gain g in 1/cm (must exceed the threshold)")
    p.set_defaults(func=cmd_intensity)

    p = sub.add_parser("sweep", help="continuation sweep; plot-ready table with "
                                     "columns eta..iterations plus a status flag")
    _add_common(p)
    p.add_argument("--axis", required=True, choices=("n-plus", "mode"),
                   help="sweep the transmitted amplitude or the branch ladder")
    p.add_argument("--values", help="comma-separated grid values")
    p.add_argument("--start", type=float, help="grid start (with --stop/--points)")
    p.add_argument("--stop", type=float, help="grid end")
    p.add_argument("--points", type=int, help="number of grid points")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("field-profile", help="interior field trajectory as CSV")
    _add_common(p, wavenumber=True)
    p.set_defaults(func=cmd_field_profile)

    return parser


_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("SPECSING_LOG", "warn").strip().lower()
    logging.basicConfig(stream=sys.stderr,
                        level=_LOG_LEVELS.get(level, logging.WARNING),
                        format="specsing %(levelname)s: %(message)s")


def main(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BelowThresholdError as exc:
        print(f"below threshold: {exc}", file=sys.stderr)
        return 4
    except (ConvergenceError, BlowUpError, QuadratureError,
            DegenerateParameterError, SingularityProximityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except SpecsingError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
