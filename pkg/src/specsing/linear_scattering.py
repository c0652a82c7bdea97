"""Closed-form scattering of the linear (gamma = 0) slab.

Everything here follows from the interior solution of psi'' = -(nK)^2 psi
pinned to a purely outgoing wave of amplitude ``n_plus`` on the right face.
The left-face combinations psi'(0) -/+ i*K*psi(0) then encode the incoming
and outgoing content on the left; their closed forms give reflection and
transmission, and the zero set of the round-trip mismatch locates the
spectral singularities (zero-width resonances, i.e. lasing at threshold).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConvergenceError, InvalidParameterError, PoleError,
                     SingularityProximityError, SingularParameterError)
from .slab_model import FieldState, NonlinearitySpec

__all__ = [
    "LinearSingularity",
    "linear_field",
    "linear_face_terms",
    "round_trip_mismatch",
    "reflection_transmission",
    "find_linear_singularity",
    "threshold_gain",
    "threshold_gain_weak_absorption",
]

#: below this magnitude of the outgoing-left mismatch, reflection and
#: transmission are reported as a singularity-proximity error instead of
#: dividing through
G_PLUS_FLOOR = 1e-300


@dataclass(frozen=True)
class LinearSingularity:
    """A root of the round-trip condition: the slab lases at this point.

    ``mode_index`` counts roots of the symmetric branch family within the
    weak-absorption regime |kappa0| <= (eta0 - 1)/20 (the regime where the
    threshold-gain formulas are meaningful); ``residual`` is the round-trip
    mismatch left by the solver.
    """

    eta0: float
    kappa0: float
    K0: float
    mode_index: int
    residual: float

    @property
    def n0(self) -> complex:
        return complex(self.eta0, self.kappa0)


def linear_field(x: float, n: complex, K: float, n_plus: complex = 1.0) -> FieldState:
    """Interior field of the linear slab with outgoing-right normalization.

    Closed form of the solution of psi'' = -(nK)^2 psi satisfying
    psi(1) = n_plus*e^{iK}, psi'(1) = iK*n_plus*e^{iK}.

    Parameters
    ----------
    x : float
        Scaled position in [0, 1].
    n : complex
        Refractive index of the slab; must be nonzero.
    K : float
        Scaled wavenumber, positive.
    n_plus : complex
        Transmitted-wave amplitude.
    """
    if n == 0:
        raise SingularParameterError("refractive index must be nonzero")
    if not (K > 0.0):
        raise InvalidParameterError(f"K must be positive, got {K}")
    pre = n_plus * cmath.exp(1j * K) / (2.0 * n)
    up = cmath.exp(1j * n * K * (x - 1.0))
    dn = cmath.exp(-1j * n * K * (x - 1.0))
    psi = pre * ((n + 1.0) * up + (n - 1.0) * dn)
    dpsi = pre * 1j * n * K * ((n + 1.0) * up - (n - 1.0) * dn)
    return FieldState(x=x, psi=psi, dpsi=dpsi)


def linear_face_terms(n: complex, K: float, n_plus: complex = 1.0) -> tuple[complex, complex]:
    """Left-face combinations psi'(0) -/+ iK psi(0) of the linear field.

    Returns ``(g_minus, g_plus)``.  ``g_plus`` is proportional to the
    round-trip mismatch, so it vanishes exactly at a spectral singularity;
    ``g_minus`` fixes the left-side outgoing amplitude.
    """
    if n == 0:
        raise SingularParameterError("refractive index must be nonzero")
    if not (K > 0.0):
        raise InvalidParameterError(f"K must be positive, got {K}")
    g_minus = n_plus * cmath.exp(1j * K) * K * (n * n - 1.0) * cmath.sin(n * K) / n
    g_plus = (1j * n_plus * K * cmath.exp(1j * (n + 1.0) * K) * (n + 1.0) ** 2
              / (2.0 * n)) * round_trip_mismatch(n, K)
    return g_minus, g_plus


def round_trip_mismatch(n: complex, K: float) -> complex:
    """Fabry-Perot balance function e^{-2inK} - ((n-1)/(n+1))^2.

    Zero exactly when one round trip through the slab (propagation phase and
    amplification against two face reflections) reproduces the wave: the
    condition for a spectral singularity.
    """
    if n == -1:
        raise PoleError("round-trip mismatch has a pole at n = -1")
    r = (n - 1.0) / (n + 1.0)
    return cmath.exp(-2j * n * K) - r * r


def reflection_transmission(n: complex, K: float, nl: NonlinearitySpec | None = None,
                            n_plus: complex = 1.0, cfg=None) -> tuple[complex, complex]:
    """Left-incidence reflection and transmission amplitudes.

    For a linear medium these follow from the closed-form face terms; with a
    nonlinearity the interior problem is integrated numerically and the
    coefficients become amplitude dependent (``n_plus`` matters).

    Raises
    ------
    SingularityProximityError
        If the outgoing-left mismatch is below ``G_PLUS_FLOOR``; the
        coefficients diverge at a spectral singularity.
    """
    gamma = nl.gamma(K) if nl is not None else 0.0
    if gamma == 0.0:
        g_minus, g_plus = linear_face_terms(n, K, n_plus)
    else:
        from .nonlinear_bvp import face_terms, integrate_field

        res = integrate_field(n, K, gamma, nl.f, n_plus, cfg)
        g_plus, g_minus = face_terms(res.state, K)
    if abs(g_plus) < G_PLUS_FLOOR:
        raise SingularityProximityError(
            "scattering coefficients diverge at a spectral singularity",
            g_plus_abs=abs(g_plus))
    refl = -g_minus / g_plus
    trans = 2j * K * n_plus / g_plus
    return refl, trans


def _branch_base(eta0: float) -> int:
    # first symmetric-branch index with |kappa0| <= (eta0 - 1)/20
    lam = (eta0 + 1.0) / (eta0 - 1.0)
    return max(1, math.ceil(10.0 * eta0 * math.log(lam) / (math.pi * (eta0 - 1.0)) - 1e-9))


def _seed(eta0: float, j: int) -> tuple[float, float]:
    lam = (eta0 + 1.0) / (eta0 - 1.0)
    K = 2.0 * math.pi * j / eta0
    kappa = -math.log(lam) / K
    # one refinement with the complex face reflection
    r = (complex(eta0, kappa) - 1.0) / (complex(eta0, kappa) + 1.0)
    K = (2.0 * math.pi * j - cmath.phase(r)) / eta0
    kappa = math.log(abs(r)) / K
    return kappa, K


def find_linear_singularity(eta0: float, mode_index: int = 1,
                            tol: float = 1e-12, max_iter: int = 100) -> LinearSingularity:
    """Locate a linear spectral singularity (kappa0, K0) for a slab of real
    index ``eta0``.

    Damped 2-D Newton iteration on the real and imaginary parts of the
    round-trip mismatch over (kappa, K).  Branches are indexed within the
    symmetric family, whose spacing in K is 2*pi/eta0, starting from the
    first root inside the weak-absorption regime |kappa0| <= (eta0 - 1)/20.

    Raises
    ------
    ConvergenceError
        If the residual does not reach ``tol`` within ``max_iter``
        iterations; the error carries the iterate history.
    """
    if not (eta0 > 1.0):
        raise InvalidParameterError(f"eta0 must exceed 1, got {eta0}")
    if not (isinstance(mode_index, int) and mode_index >= 1):
        raise InvalidParameterError(f"mode_index must be an integer >= 1, got {mode_index}")
    j = _branch_base(eta0) + mode_index - 1
    kappa, K = _seed(eta0, j)

    history = []
    res = abs(round_trip_mismatch(complex(eta0, kappa), K))
    for _ in range(max_iter):
        n = complex(eta0, kappa)
        F = round_trip_mismatch(n, K)
        res = abs(F)
        history.append((kappa, K, res))
        if res <= tol:
            break
        e2 = cmath.exp(-2j * n * K)
        dL_dn = -2j * K * e2 - 4.0 * (n - 1.0) / (n + 1.0) ** 3
        dL_dkappa = 1j * dL_dn
        dL_dK = -2j * n * e2
        jac = np.array([[dL_dkappa.real, dL_dK.real],
                        [dL_dkappa.imag, dL_dK.imag]])
        step = np.linalg.solve(jac, [-F.real, -F.imag])
        lam = 1.0
        while lam > 2 ** -20:
            trial = abs(round_trip_mismatch(complex(eta0, kappa + lam * step[0]),
                                            K + lam * step[1]))
            if trial < res:
                break
            lam *= 0.5
        kappa += lam * step[0]
        K += lam * step[1]
    else:
        raise ConvergenceError(
            f"linear root search did not reach |mismatch| <= {tol:g} "
            f"(last residual {res:.3e})", history=history[::-1])

    n0 = complex(eta0, kappa)
    branch = cmath.exp(-1j * n0 * K) * (n0 + 1.0) / (n0 - 1.0)
    if branch.real <= 0.0:
        raise ConvergenceError(
            "root search landed on the antisymmetric branch; "
            "seed or mode_index out of range", history=history[::-1])
    if kappa >= 0.0:
        raise ConvergenceError(
            f"root has non-negative kappa0 = {kappa:g}; not a gain medium",
            history=history[::-1])
    return LinearSingularity(eta0=eta0, kappa0=kappa, K0=K,
                             mode_index=mode_index, residual=res)


def threshold_gain(eta0: float, kappa0: float, a: float = 1.0) -> float:
    """Exact lasing threshold (1/cm): g0 = ln(1/|r|^2)/a with the face
    reflection r = (n0-1)/(n0+1).

    At a round-trip root this equals -2*K0*kappa0/a identically, because the
    modulus of the round-trip condition ties kappa0*K0 to ln|r|.
    """
    if not (a > 0.0):
        raise InvalidParameterError(f"thickness must be positive, got {a}")
    r = (complex(eta0, kappa0) - 1.0) / (complex(eta0, kappa0) + 1.0)
    return math.log(1.0 / abs(r) ** 2) / a


def threshold_gain_weak_absorption(eta0: float, a: float = 1.0) -> float:
    """Weak-absorption approximation of the threshold:
    g0 ~= (2/a) ln((eta0+1)/(eta0-1)), accurate to O(kappa0^2)."""
    if not (eta0 > 1.0):
        raise InvalidParameterError(f"eta0 must exceed 1, got {eta0}")
    if not (a > 0.0):
        raise InvalidParameterError(f"thickness must be positive, got {a}")
    return 2.0 * math.log((eta0 + 1.0) / (eta0 - 1.0)) / a
