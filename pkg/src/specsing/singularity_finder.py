"""Non-perturbative location of nonlinear spectral singularities.

The outgoing-left mismatch g_plus, computed by direct RK4 integration of the
nonlinear interior problem, is driven to zero by a damped 2-D Newton
iteration with a finite-difference Jacobian.  Two search manifolds are
supported:

* FIX_WAVENUMBER (default): the wavelength is pinned to the linear branch
  root K0 and the full complex index (eta, kappa) adjusts.  On this manifold
  the required gain grows linearly in sigma*|n_plus|^2, which is the regime
  the closed-form threshold and emitted-intensity laws describe.
* FIX_REAL_INDEX: eta is pinned and (kappa, K) adjust.  The nonlinearity then
  mostly detunes the resonance; the gain excess is a higher-order effect,
  orders of magnitude below the fixed-wavelength one.

The scalar inverse problem (gain -> emitted intensity) wraps the finder in a
secant iteration on |n_plus|^2, and ``sweep`` runs continuation along a
parameter grid.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import (BelowThresholdError, ConvergenceError,
                     InvalidParameterError, SpecsingError)
from .linear_scattering import LinearSingularity, find_linear_singularity
from .nonlinear_bvp import ShootingConfig, face_terms, integrate_field
from .perturbation import ShiftConstraint, emitted_intensity, solve_shift
from .slab_model import GainReport, kerr_law

__all__ = [
    "SeedOrigin",
    "FinderConstraint",
    "SingularityResult",
    "SweepPoint",
    "find_nonlinear_singularity",
    "intensity_for_gain",
    "sweep",
    "sweep_to_csv",
    "SWEEP_CSV_HEADER",
]


class SeedOrigin(Enum):
    LINEAR_ROOT = "linear_root"
    PERTURBATIVE_SHIFT = "perturbative_shift"
    USER_SUPPLIED = "user_supplied"


class FinderConstraint(Enum):
    FIX_WAVENUMBER = "fix_wavenumber"
    FIX_REAL_INDEX = "fix_real_index"


@dataclass(frozen=True)
class SingularityResult:
    """A converged nonlinear spectral singularity.

    ``residual`` is |g_plus| normalized by |n_plus|*K; ``gain.g0`` is the
    linear threshold of the same branch, so ``gain.excess`` is the extra gain
    the nonlinearity demands.
    """

    eta: float
    kappa_star: float
    K_star: float
    n_plus: complex
    residual: float
    gain: GainReport
    iterations: int
    seed_origin: SeedOrigin
    mode_index: int
    constraint: FinderConstraint


def _mismatch(eta: float, kappa: float, K: float, sigma: float,
              f: Callable[[float], float], n_plus: complex,
              cfg: ShootingConfig) -> complex:
    gamma = -K * K * sigma
    res = integrate_field(complex(eta, kappa), K, gamma,
                          f if gamma != 0.0 else None, n_plus, cfg)
    g_plus, _ = face_terms(res.state, K)
    return g_plus / (abs(n_plus) * K)


def find_nonlinear_singularity(eta: float, sigma: float, n_plus: complex,
                               a: float = 1.0, mode_index: int = 1,
                               cfg: ShootingConfig | None = None, *,
                               f: Optional[Callable[[float], float]] = None,
                               constraint: FinderConstraint = FinderConstraint.FIX_WAVENUMBER,
                               tol: float = 1e-10, max_iter: int = 60,
                               fd_step: float = 1e-7,
                               seed: Optional[tuple[float, float]] = None,
                               linear_root: Optional[LinearSingularity] = None) -> SingularityResult:
    """Drive the directly integrated outgoing-left mismatch to zero.

    Parameters
    ----------
    eta, sigma, n_plus : float, float, complex
        Real index of the branch, physical nonlinearity strength (cm^2/W for
        Kerr; the amplitude law defaults to Kerr, override with ``f``), and
        transmitted amplitude (sets the intensity scale, in sqrt(W/cm^2)).
    a : float
        Slab thickness in cm (enters only the gain report).
    mode_index : int
        Linear branch used for seeding and for the threshold reference.
    seed : (float, float), optional
        Starting point for the Newton iteration: (eta, kappa) under
        FIX_WAVENUMBER, (kappa, K) under FIX_REAL_INDEX.
    linear_root : LinearSingularity, optional
        Reuse an already-computed branch root (continuation).

    Raises
    ------
    ConvergenceError
        If the normalized residual does not reach ``tol``; carries the
        iterate history.
    """
    if abs(n_plus) == 0.0 and sigma != 0.0:
        raise InvalidParameterError("n_plus must be nonzero to set the intensity scale")
    cfg = cfg or ShootingConfig()
    law = kerr_law if f is None else f
    root = linear_root or find_linear_singularity(eta, mode_index)
    g0 = -2.0 * root.K0 * root.kappa0 / a

    origin = SeedOrigin.LINEAR_ROOT
    if seed is not None:
        u = [float(seed[0]), float(seed[1])]
        origin = SeedOrigin.USER_SUPPLIED
    elif sigma == 0.0:
        u = ([eta, root.kappa0] if constraint is FinderConstraint.FIX_WAVENUMBER
             else [root.kappa0, root.K0])
    else:
        gamma0 = -root.K0 ** 2 * sigma
        try:
            if constraint is FinderConstraint.FIX_WAVENUMBER:
                shift = solve_shift(root.n0, root.K0, n_plus, law,
                                    ShiftConstraint.FIX_WAVENUMBER)
                n_seed = root.n0 + gamma0 * shift.n1
                u = [n_seed.real, n_seed.imag]
            else:
                shift = solve_shift(root.n0, root.K0, n_plus, law,
                                    ShiftConstraint.FIX_REAL_INDEX)
                u = [root.kappa0 + gamma0 * shift.kappa1,
                     root.K0 + gamma0 * shift.K1]
            origin = SeedOrigin.PERTURBATIVE_SHIFT
        except SpecsingError:
            u = ([eta, root.kappa0] if constraint is FinderConstraint.FIX_WAVENUMBER
                 else [root.kappa0, root.K0])

    if constraint is FinderConstraint.FIX_WAVENUMBER:
        def residual_fn(v):
            return _mismatch(v[0], v[1], root.K0, sigma, law, n_plus, cfg)
    else:
        def residual_fn(v):
            return _mismatch(eta, v[0], v[1], sigma, law, n_plus, cfg)

    history = []
    F = residual_fn(u)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        res = abs(F)
        history.append((tuple(u), res))
        if res <= tol:
            break
        jac = np.empty((2, 2))
        for col in range(2):
            up = list(u)
            dn = list(u)
            up[col] += fd_step
            dn[col] -= fd_step
            dF = (residual_fn(up) - residual_fn(dn)) / (2.0 * fd_step)
            jac[0, col] = dF.real
            jac[1, col] = dF.imag
        try:
            step = np.linalg.solve(jac, [-F.real, -F.imag])
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian: {exc}",
                                   history=history[::-1]) from exc
        lam = 1.0
        while True:
            trial = [u[0] + lam * step[0], u[1] + lam * step[1]]
            F_trial = residual_fn(trial)
            if abs(F_trial) < res or lam <= 2 ** -16:
                break
            lam *= 0.5
        u = trial
        F = F_trial
    else:
        raise ConvergenceError(
            f"nonlinear singularity search stalled at residual {abs(F):.3e} "
            f"(tol {tol:g})", history=history[::-1])

    if constraint is FinderConstraint.FIX_WAVENUMBER:
        eta_star, kappa_star, K_star = u[0], u[1], root.K0
    else:
        eta_star, kappa_star, K_star = eta, u[0], u[1]
    g = -2.0 * K_star * kappa_star / a
    return SingularityResult(
        eta=eta_star, kappa_star=kappa_star, K_star=K_star, n_plus=n_plus,
        residual=abs(F), gain=GainReport(g=g, g0=g0), iterations=iterations,
        seed_origin=origin, mode_index=mode_index, constraint=constraint)


def intensity_for_gain(eta: float, sigma: float, g_target: float, a: float = 1.0,
                       mode_index: int = 1, cfg: ShootingConfig | None = None, *,
                       f: Optional[Callable[[float], float]] = None,
                       tol_rel: float = 1e-9, max_iter: int = 40,
                       finder_tol: float = 1e-10) -> tuple[float, SingularityResult]:
    """Intensity scale |n_plus|^2 at which the slab lases with gain g_target.

    Secant iteration on |n_plus|^2; each evaluation converges the
    fixed-wavelength finder and reads off the gain.  The initial bracket
    comes from the closed-form emitted-intensity law.

    Raises
    ------
    BelowThresholdError
        If ``g_target`` does not exceed the branch's linear threshold.
    """
    if sigma <= 0.0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    root = find_linear_singularity(eta, mode_index)
    g0 = -2.0 * root.K0 * root.kappa0 / a
    if g_target <= g0:
        raise BelowThresholdError(
            f"requested gain {g_target:.9g} does not exceed the linear "
            f"threshold {g0:.9g} of branch {mode_index}")

    est = emitted_intensity(eta, g_target, g0, sigma).intensity * 2.0

    def gain_at(intensity2: float) -> tuple[float, SingularityResult]:
        result = find_nonlinear_singularity(
            eta, sigma, math.sqrt(intensity2), a, mode_index, cfg, f=f,
            tol=finder_tol, linear_root=root)
        return result.gain.g, result

    gtol = tol_rel * max(abs(g_target), g0)
    i_prev, i_cur = 0.7 * est, 1.3 * est
    g_prev, _ = gain_at(i_prev)
    g_cur, result = gain_at(i_cur)
    history = [((i_prev,), abs(g_prev - g_target)), ((i_cur,), abs(g_cur - g_target))]
    for _ in range(max_iter):
        if abs(g_cur - g_target) <= gtol:
            return i_cur, result
        denom = g_cur - g_prev
        if denom == 0.0:
            raise ConvergenceError("secant stalled: flat gain response",
                                   history=history[::-1])
        i_next = i_cur - (g_cur - g_target) * (i_cur - i_prev) / denom
        if i_next <= 0.0:
            i_next = 0.5 * i_cur
        i_prev, g_prev = i_cur, g_cur
        i_cur = i_next
        g_cur, result = gain_at(i_cur)
        history.append(((i_cur,), abs(g_cur - g_target)))
    raise ConvergenceError(
        f"intensity search stalled at |g - g_target| = {abs(g_cur - g_target):.3e}",
        history=history[::-1])


@dataclass(frozen=True)
class SweepPoint:
    """One sweep entry: the swept value, the result (None on failure) and a
    status string ('ok' or the error message)."""

    value: float
    result: Optional[SingularityResult]
    status: str


def sweep(eta: float, sigma: float, a: float = 1.0, mode_index: int = 1,
          axis: str = "n_plus", values: Sequence[float] = (),
          cfg: ShootingConfig | None = None, *,
          f: Optional[Callable[[float], float]] = None,
          n_plus: complex = 1.0, tol: float = 1e-10) -> list[SweepPoint]:
    """Continuation sweep of nonlinear singularities along a parameter grid.

    ``axis='n_plus'`` sweeps the transmitted amplitude |n_plus| at a fixed
    branch, seeding each solve from the previous converged point;
    ``axis='mode'`` walks the branch ladder at fixed amplitude ``n_plus``.
    Per-point failures are recorded and the sweep continues.
    """
    if axis not in ("n_plus", "mode"):
        raise InvalidParameterError(f"axis must be 'n_plus' or 'mode', got {axis!r}")
    points: list[SweepPoint] = []
    if axis == "n_plus":
        root = find_linear_singularity(eta, mode_index)
        prev: Optional[SingularityResult] = None
        for value in values:
            try:
                seed = None
                if prev is not None:
                    seed = (prev.eta, prev.kappa_star)
                result = find_nonlinear_singularity(
                    eta, sigma, float(value), a, mode_index, cfg, f=f, tol=tol,
                    seed=seed, linear_root=root)
                prev = result
                points.append(SweepPoint(float(value), result, "ok"))
            except SpecsingError as exc:
                points.append(SweepPoint(float(value), None, f"error: {exc}"))
    else:
        for value in values:
            try:
                result = find_nonlinear_singularity(
                    eta, sigma, n_plus, a, int(value), cfg, f=f, tol=tol)
                points.append(SweepPoint(float(value), result, "ok"))
            except SpecsingError as exc:
                points.append(SweepPoint(float(value), None, f"error: {exc}"))
    return points


SWEEP_CSV_HEADER = ("eta,kappa_star,K_star,N_plus_re,N_plus_im,"
                    "intensity,g,g0,residual,iterations")


def sweep_to_csv(points: Iterable[SweepPoint], stream, status_column: bool = False) -> None:
    """Write sweep results as CSV; failed points become NaN rows.

    ``status_column`` appends a per-row status field (used by the CLI).
    """
    header = SWEEP_CSV_HEADER + (",status" if status_column else "")
    stream.write(header + "\n")
    for p in points:
        if p.result is not None:
            r = p.result
            fields = [r.eta, r.kappa_star, r.K_star, r.n_plus.real, r.n_plus.imag,
                      0.5 * abs(r.n_plus) ** 2, r.gain.g, r.gain.g0, r.residual,
                      r.iterations]
            row = ",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                           for v in fields)
        else:
            row = ",".join(["nan"] * 9 + ["0"])
        if status_column:
            row += "," + p.status.replace(",", ";")
        stream.write(row + "\n")
