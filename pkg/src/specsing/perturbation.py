"""First-order perturbation theory for weakly nonlinear spectral singularities.

Expanding the interior field in the scaled nonlinearity strength gamma turns
the outgoing-left mismatch into

    g_plus(n, K) ~= g0_plus(n, K) + gamma * g1_plus(n, K),

where g0_plus has a closed form and g1_plus reduces, at a round-trip root, to
a single integral over the slab (with a closed form for the Kerr law).
Requiring the first-order mismatch to vanish under a small shift of (n, K)
yields the corrected location of the singularity, the gain needed to support
it, and for a Kerr medium the emitted-intensity law: intensity grows linearly
in the gain excess over the linear threshold.

Conventions: gamma = -K^2 * sigma < 0 for a self-focusing (sigma > 0) Kerr
medium, and the shift of the root is parameterized per unit gamma, so the
physical correction is gamma * (n1, K1).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import (DegenerateParameterError, InvalidParameterError,
                     InvalidRegimeError, QuadratureError, SingularParameterError)
from .linear_scattering import linear_field, round_trip_mismatch, threshold_gain_weak_absorption
from .nonlinear_bvp import ShootingConfig, assemble_amplitudes, face_terms, integrate_field
from .slab_model import FieldState, GainReport, kerr_law

__all__ = [
    "ShiftConstraint",
    "FirstOrderShift",
    "IntensityResult",
    "green_kernel",
    "first_order_field",
    "first_order_face_term",
    "first_order_face_term_kerr",
    "first_order_face_term_kerr_weak_absorption",
    "face_term_derivatives",
    "face_term_derivatives_weak_absorption",
    "solve_shift",
    "modified_gain",
    "kerr_threshold",
    "emitted_intensity",
    "left_emission_check",
    "adaptive_quad",
]

#: tolerance on the root condition |e^{-inK} - (n-1)/(n+1)| below which the
#: simplified first-order formulas are valid
ROOT_RESIDUAL_TOL = 1e-10

#: first-order validity guard for the modified-gain report
SHIFT_GUARD = 0.1

#: flag threshold on the dimensionless gauge sigma*|n_plus|^2
VALIDITY_GAUGE_FLAG = 1e-3

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


class ShiftConstraint(Enum):
    """Closure for the underdetermined first-order shift equation.

    One complex equation in three real unknowns (Re n1, Im n1, K1) needs a
    constraint: FIX_WAVENUMBER pins K1 = 0 (singularity kept at the linear
    root's wavelength); FIX_REAL_INDEX pins Re n1 = 0 (real part of the
    medium untouched); CUSTOM_RATIO pins K1 = ratio * Im(n1).
    """

    FIX_WAVENUMBER = "fix_wavenumber"
    FIX_REAL_INDEX = "fix_real_index"
    CUSTOM_RATIO = "custom_ratio"


@dataclass(frozen=True)
class FirstOrderShift:
    """Root shift per unit gamma: n -> n0 + gamma*n1, K -> K0 + gamma*K1."""

    n1: complex
    K1: float
    constraint: ShiftConstraint
    ratio: Optional[float] = None
    residual: float = 0.0

    @property
    def kappa1(self) -> float:
        return self.n1.imag


@dataclass(frozen=True)
class IntensityResult:
    """Emitted intensity |n_plus|^2 / 2 (W/cm^2) with validity bookkeeping.

    ``validity_gauge`` is the dimensionless product sigma*|n_plus|^2 that the
    first-order analysis requires to be small; ``warning`` is set when it
    exceeds the flag threshold.
    """

    intensity: float
    validity_gauge: float
    below_threshold: bool = False
    warning: Optional[str] = None


def adaptive_quad(func: Callable[[float], complex], a: float, b: float,
                  rel_tol: float = 1e-11, abs_tol: float = 1e-11,
                  initial_panels: int = 64, max_refinements: int = 6) -> complex:
    """Composite 20-point Gauss-Legendre quadrature with panel doubling.

    The integrands here are entire, so convergence under doubling is rapid;
    refinement stops when successive estimates agree to the tolerances.
    """

    def composite(panels: int) -> complex:
        edges = np.linspace(a, b, panels + 1)
        total = 0.0 + 0.0j
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (lo + hi)
            half = 0.5 * (hi - lo)
            for t, w in zip(_GL_NODES, _GL_WEIGHTS):
                total += half * w * func(mid + half * t)
        return total

    if a == b:
        return 0.0 + 0.0j
    prev = composite(initial_panels)
    panels = initial_panels
    for _ in range(max_refinements):
        panels *= 2
        cur = composite(panels)
        if abs(cur - prev) <= max(abs_tol, rel_tol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not settle after {panels} panels", estimate=prev)


def green_kernel(u: float, n: complex, K: float) -> complex:
    """Response kernel sin(nKu)/(nK) of the interior equation.

    Satisfies G'' + (nK)^2 G = 0 with G(0) = 0, G'(0) = 1.  The caller must
    keep nK away from zero; no removable-singularity expansion is applied.
    """
    nK = n * K
    if nK == 0:
        raise SingularParameterError("green_kernel requires n*K != 0")
    return cmath.sin(nK * u) / nK


def first_order_field(x: float, n: complex, K: float, n_plus: complex,
                      f: Optional[Callable[[float], float]]) -> FieldState:
    """First-order field correction (per unit gamma) at position x.

    Quadrature of the kernel convolution of f(|psi0|) psi0 from the right
    face down to x; the derivative uses the kernel derivative cos(nK(x-y))
    under the integral.
    """
    if not (0.0 <= x <= 1.0):
        raise InvalidParameterError(f"x must lie in [0, 1], got {x}")
    if f is None or n_plus == 0:
        return FieldState(x=x, psi=0.0j, dpsi=0.0j)
    nK = n * K

    def source(y: float) -> complex:
        psi0 = linear_field(y, n, K, n_plus).psi
        return f(abs(psi0)) * psi0

    val = adaptive_quad(lambda y: cmath.sin(nK * (x - y)) / nK * source(y), 1.0, x)
    der = adaptive_quad(lambda y: cmath.cos(nK * (x - y)) * source(y), 1.0, x)
    return FieldState(x=x, psi=val, dpsi=der)


def _require_root(n0: complex, K0: float) -> None:
    r = (n0 - 1.0) / (n0 + 1.0)
    mismatch = abs(cmath.exp(-1j * n0 * K0) - r)
    if mismatch > ROOT_RESIDUAL_TOL * max(1.0, abs(r)):
        raise InvalidRegimeError(
            "simplified first-order formulas are only valid at a round-trip "
            f"root; residual |L| = {abs(round_trip_mismatch(n0, K0)):.3e}",
            residual=abs(round_trip_mismatch(n0, K0)))


def first_order_face_term(n0: complex, K0: float, n_plus: complex,
                          f: Optional[Callable[[float], float]],
                          check: bool = True) -> complex:
    """First-order outgoing-left mismatch g1_plus at a round-trip root.

    At the root the zero-order field collapses to
    psi0 = n_plus e^{iK0} c h(x) with c = (n0+1)/(2 n0) and
    h(x) = e^{i n0 K0 (x-1)} + e^{-i n0 K0 x}, and the kernel convolution
    reduces to

        g1_plus = -n_plus e^{iK0} c^2 * integral_0^1 f(|n_plus c h|) h^2 dx,

    valid for an arbitrary amplitude law f.
    """
    if check:
        _require_root(n0, K0)
    if f is None:
        return 0.0 + 0.0j
    c = (n0 + 1.0) / (2.0 * n0)

    def h(x: float) -> complex:
        return cmath.exp(1j * n0 * K0 * (x - 1.0)) + cmath.exp(-1j * n0 * K0 * x)

    integral = adaptive_quad(lambda x: f(abs(n_plus * c * h(x))) * h(x) ** 2, 0.0, 1.0)
    return -n_plus * cmath.exp(1j * K0) * c * c * integral


def first_order_face_term_kerr(n0: complex, K0: float, n_plus: complex,
                               check: bool = True) -> complex:
    """Closed form of the first-order mismatch for the Kerr law f = |psi|^2:

        g1_plus = 8i |n_plus|^2 n_plus e^{iK0} (4 n0^2 - conj(n0)^2 - 3)
                  / (K0 (9 n0^4 + conj(n0)^4 - 10 |n0|^4)).
    """
    if check:
        _require_root(n0, K0)
    nb = n0.conjugate()
    den = K0 * (9.0 * n0 ** 4 + nb ** 4 - 10.0 * abs(n0) ** 4)
    scale = K0 * 20.0 * max(1.0, abs(n0)) ** 4
    if abs(den) < 1e-14 * scale:
        raise DegenerateParameterError(
            f"Kerr closed form degenerates: denominator {abs(den):.3e}")
    num = 8j * abs(n_plus) ** 2 * n_plus * cmath.exp(1j * K0) * (4.0 * n0 ** 2 - nb ** 2 - 3.0)
    return num / den


def first_order_face_term_kerr_weak_absorption(eta0: float, kappa0: float, K0: float,
                                               n_plus: complex) -> complex:
    """Leading small-kappa0 behaviour of the Kerr mismatch:
    3 |n_plus|^2 n_plus e^{iK0} (eta0^2-1) / (4 eta0^3 K0 kappa0)."""
    if kappa0 == 0.0:
        raise DegenerateParameterError("weak-absorption form diverges at kappa0 = 0")
    return (3.0 * abs(n_plus) ** 2 * n_plus * cmath.exp(1j * K0) * (eta0 ** 2 - 1.0)
            / (4.0 * eta0 ** 3 * K0 * kappa0))


def face_term_derivatives(n0: complex, K0: float, n_plus: complex,
                          check: bool = True) -> tuple[complex, complex]:
    """Derivatives of the zero-order mismatch at a round-trip root.

    Returns (d/dn, d/dK) of g0_plus, which at the root simplify to

        d/dn g0_plus = n_plus e^{iK0} K0 [(n0^2-1) K0 - 2i] / n0,
        d/dK g0_plus = n_plus e^{iK0} K0 (n0^2 - 1).
    """
    if check:
        _require_root(n0, K0)
    pre = n_plus * cmath.exp(1j * K0) * K0
    return pre * ((n0 * n0 - 1.0) * K0 - 2j) / n0, pre * (n0 * n0 - 1.0)


def face_term_derivatives_weak_absorption(eta0: float, K0: float,
                                          n_plus: complex) -> tuple[complex, complex]:
    """Small-kappa0 limit of :func:`face_term_derivatives` (n0 -> eta0)."""
    pre = n_plus * cmath.exp(1j * K0) * K0
    return pre * ((eta0 ** 2 - 1.0) * K0 - 2j) / eta0, pre * (eta0 ** 2 - 1.0)


def solve_shift(n0: complex, K0: float, n_plus: complex,
                f: Optional[Callable[[float], float]],
                constraint: ShiftConstraint = ShiftConstraint.FIX_WAVENUMBER,
                ratio: Optional[float] = None, check: bool = True) -> FirstOrderShift:
    """Solve the first-order root-shift equation

        (d/dn g0_plus) n1 + (d/dK g0_plus) K1 + g1_plus = 0

    for (n1, K1) under the chosen closure.  The Kerr closed form is used when
    ``f`` is the shared Kerr law; any other law goes through quadrature.

    Raises
    ------
    DegenerateParameterError
        If the constrained linear system is degenerate.
    """
    if f is None:
        return FirstOrderShift(n1=0.0j, K1=0.0, constraint=constraint, ratio=ratio)
    if f is kerr_law:
        g1 = first_order_face_term_kerr(n0, K0, n_plus, check=check)
    else:
        g1 = first_order_face_term(n0, K0, n_plus, f, check=check)
    dg_dn, dg_dK = face_term_derivatives(n0, K0, n_plus, check=check)
    scale = (abs(dg_dn) + abs(dg_dK)) ** 2

    if constraint is ShiftConstraint.FIX_WAVENUMBER:
        if abs(dg_dn) ** 2 < 1e-14 * scale:
            raise DegenerateParameterError("index derivative vanishes; cannot fix K")
        n1 = -g1 / dg_dn
        K1 = 0.0
    else:
        if constraint is ShiftConstraint.FIX_REAL_INDEX:
            col2 = dg_dK
            ratio_used = None
        else:
            if ratio is None:
                raise InvalidParameterError("CUSTOM_RATIO requires a ratio")
            col2 = 1j * dg_dn + ratio * dg_dK
            ratio_used = ratio
        col1 = 1j * dg_dn if constraint is ShiftConstraint.FIX_REAL_INDEX else dg_dn
        mat = np.array([[col1.real, col2.real], [col1.imag, col2.imag]])
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        if abs(det) < 1e-14 * scale:
            raise DegenerateParameterError(
                f"shift system degenerate under {constraint.value} (det = {det:.3e})")
        u = np.linalg.solve(mat, [-g1.real, -g1.imag])
        if constraint is ShiftConstraint.FIX_REAL_INDEX:
            n1 = 1j * u[0]
            K1 = float(u[1])
        else:
            n1 = complex(u[0], u[1])
            K1 = ratio_used * u[1]
        ratio = ratio_used

    residual = abs(dg_dn * n1 + dg_dK * K1 + g1)
    return FirstOrderShift(n1=n1, K1=K1, constraint=constraint, ratio=ratio,
                           residual=residual)


def modified_gain(shift: FirstOrderShift, n0: complex, K0: float, a: float,
                  gamma: float) -> GainReport:
    """Gain needed to support the shifted singularity:

        g = g0 [1 + gamma (kappa1/kappa0 + K1/K0)],   g0 = -2 K0 kappa0 / a.

    A warning is attached when |gamma| * max(|kappa1/kappa0|, |K1/K0|)
    exceeds the first-order validity guard.
    """
    kappa0 = n0.imag
    if kappa0 == 0.0:
        raise DegenerateParameterError("modified gain undefined at kappa0 = 0")
    if not (a > 0.0):
        raise InvalidParameterError(f"thickness must be positive, got {a}")
    g0 = -2.0 * K0 * kappa0 / a
    rel_kappa = shift.kappa1 / kappa0
    rel_K = shift.K1 / K0
    g = g0 * (1.0 + gamma * (rel_kappa + rel_K))
    warning = None
    gauge = abs(gamma) * max(abs(rel_kappa), abs(rel_K))
    if gauge > SHIFT_GUARD:
        warning = (f"first-order shift outside validity guard: "
                   f"|gamma|*max(|kappa1/kappa0|, |K1/K0|) = {gauge:.3g} > {SHIFT_GUARD}")
    return GainReport(g=g, g0=g0, warning=warning)


def kerr_threshold(eta0: float, K0: float, sigma: float, n_plus_mag: float,
                   a: float = 1.0, *, simplified: bool = True) -> float:
    """Kerr-corrected lasing threshold (1/cm).

    With ``simplified`` (default) the wavenumber drops out:

        g ~= g0 [1 + (3/2) sigma |n_plus|^2
                  / (eta0^2 (eta0^2-1) ln^2((eta0+1)/(eta0-1)))],

    which is the algebraic inverse of :func:`emitted_intensity`.  With
    ``simplified=False`` the subleading (eta0^2-1)^2 K0^2 vs 4 competition in
    the denominator is retained.
    """
    if not (eta0 > 1.0):
        raise InvalidParameterError(f"eta0 must exceed 1, got {eta0}")
    g0 = threshold_gain_weak_absorption(eta0, a)
    log_lam = math.log((eta0 + 1.0) / (eta0 - 1.0))
    if simplified:
        bracket = 1.5 * sigma * n_plus_mag ** 2 / (eta0 ** 2 * (eta0 ** 2 - 1.0) * log_lam ** 2)
    else:
        k2 = (eta0 ** 2 - 1.0) ** 2 * K0 ** 2
        bracket = (1.5 * (eta0 ** 2 - 1.0) * K0 ** 2 * sigma * n_plus_mag ** 2
                   / (eta0 ** 2 * (k2 + 4.0) * log_lam ** 2))
    return g0 * (1.0 + bracket)


def emitted_intensity(eta0: float, g: float, g0: float, sigma: float) -> IntensityResult:
    """Intensity |n_plus|^2 / 2 emitted by a Kerr slab pumped above threshold:

        |n_plus|^2 / 2 = ((g - g0) / (3 sigma g0))
                         * eta0^2 (eta0^2 - 1) ln^2((eta0+1)/(eta0-1)).

    Linear in the gain excess.  Returns a flagged zero-intensity result when
    g <= g0 (the slab does not emit below threshold).
    """
    if sigma <= 0.0:
        raise InvalidRegimeError(
            f"emitted-intensity law requires sigma > 0, got {sigma}")
    if not (eta0 > 1.0):
        raise InvalidParameterError(f"eta0 must exceed 1, got {eta0}")
    if g <= g0:
        return IntensityResult(intensity=0.0, validity_gauge=0.0, below_threshold=True)
    log_lam = math.log((eta0 + 1.0) / (eta0 - 1.0))
    intensity = ((g - g0) / (3.0 * sigma * g0)) * eta0 ** 2 * (eta0 ** 2 - 1.0) * log_lam ** 2
    gauge = sigma * 2.0 * intensity
    warning = None
    if gauge > VALIDITY_GAUGE_FLAG:
        warning = (f"sigma*|n_plus|^2 = {gauge:.3g} exceeds the first-order "
                   f"reliability flag {VALIDITY_GAUGE_FLAG}")
    return IntensityResult(intensity=intensity, validity_gauge=gauge, warning=warning)


def left_emission_check(n: complex, K: float, gamma: float,
                        f: Optional[Callable[[float], float]], n_plus: complex,
                        cfg: ShootingConfig | None = None) -> float:
    """Relative asymmetry |n_minus / (n_plus e^{iK}) - 1| of the two emitted
    waves.

    Zero (to solver precision) at a spectral singularity: the slab emits
    identical waves from both faces.  At parameters only perturbatively close
    to a singularity the deviation measures the residual detuning.
    """
    res = integrate_field(n, K, gamma, f, n_plus, cfg)
    amps = assemble_amplitudes(face_terms(res.state, K), K, n_plus)
    return abs(amps.n_minus / (n_plus * cmath.exp(1j * K)) - 1.0)
