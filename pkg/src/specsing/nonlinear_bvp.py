"""Direct numerical solution of the slab interior with a nonlinear index.

The field equation inside the slab,

    psi'' = -(nK)^2 psi + gamma * f(|psi|) * psi,

is integrated backward from x = 1, where the outgoing (or, for absorber
studies, incoming) plane-wave data is known exactly, down to the left face.
The left-face combinations psi'(0) +/- iK psi(0) then determine the full
piecewise scattering solution.  Fixed-step RK4 keeps the step count as the
single reproducibility knob; the hot loop lives in a compiled kernel with a
pure-Python fallback (see specsing._backend).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._backend import rk4_shoot
from .errors import BlowUpError, InvalidParameterError
from .slab_model import FieldState, kerr_law

__all__ = [
    "ShootingConfig",
    "ScatteringAmplitudes",
    "FieldTrajectory",
    "ShootingResult",
    "integrate_field",
    "face_terms",
    "assemble_amplitudes",
]


@dataclass(frozen=True)
class ShootingConfig:
    """Integration knobs: RK4 step count, trajectory recording, and an
    optional step-halving error estimate."""

    steps: int = 2048
    record_trajectory: bool = False
    richardson_check: bool = False

    def __post_init__(self):
        if not (isinstance(self.steps, int) and self.steps >= 16):
            raise InvalidParameterError(f"steps must be an integer >= 16, got {self.steps}")


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Plane-wave amplitudes of the left-incidence solution.

    ``n_minus = i*g_minus/(2K)`` and ``n_minus_tilde = -i*g_plus/(2K)`` hold
    exactly as stored.  At a spectral singularity ``n_minus_tilde`` vanishes:
    nothing enters the slab and ``n_minus``/``n_plus`` are the amplitudes
    emitted to the left/right.
    """

    n_plus: complex
    n_minus: complex
    n_minus_tilde: complex
    g_plus: complex
    g_minus: complex


@dataclass(frozen=True)
class FieldTrajectory:
    """Sampled interior field: arrays x, psi(x), psi'(x), ascending in x."""

    x: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    def write_csv(self, stream) -> None:
        """Write columns x, Re(psi), Im(psi), Re(dpsi), Im(dpsi)."""
        stream.write("x,re_psi,im_psi,re_dpsi,im_dpsi\n")
        for x, p, d in zip(self.x, self.psi, self.dpsi):
            stream.write(f"{x:.17g},{p.real:.17g},{p.imag:.17g},"
                         f"{d.real:.17g},{d.imag:.17g}\n")


@dataclass(frozen=True)
class ShootingResult:
    state: FieldState
    trajectory: Optional[FieldTrajectory] = None
    error_estimate: Optional[float] = None


def _kind_of(gamma: float, f: Optional[Callable[[float], float]]) -> int:
    if gamma == 0.0 or f is None:
        return 0
    if f is kerr_law:
        return 1
    if not callable(f):
        raise InvalidParameterError("nonlinearity law must be callable")
    return 2


def integrate_field(n: complex, K: float, gamma: float,
                    f: Optional[Callable[[float], float]],
                    n_plus: complex, cfg: ShootingConfig | None = None,
                    *, incoming: bool = False, x_end: float = 0.0) -> ShootingResult:
    """Shoot the interior field from the right face down to ``x_end``.

    Terminal data at x = 1 is the exact plane-wave state
    ``psi(1) = n_plus*e^{isK}``, ``psi'(1) = isK*psi(1)`` with s = +1 for an
    outgoing wave (default) or s = -1 for an incoming one (time-reversed,
    absorber configuration).

    Returns the state at ``x_end`` (the left face by default), optionally the
    sampled trajectory, and, with ``richardson_check``, an error estimate
    obtained by repeating the integration at twice the step count.

    Raises
    ------
    BlowUpError
        If the state leaves the representable range; the error records the
        position x at which this happened.
    """
    cfg = cfg or ShootingConfig()
    if not (K > 0.0):
        raise InvalidParameterError(f"K must be positive, got {K}")
    if not (0.0 <= x_end < 1.0):
        raise InvalidParameterError(f"x_end must lie in [0, 1), got {x_end}")
    if not math.isfinite(gamma):
        raise InvalidParameterError(f"gamma must be finite, got {gamma}")
    kind = _kind_of(gamma, f)
    s = -1.0 if incoming else 1.0
    psi1 = n_plus * cmath.exp(1j * s * K)
    dpsi1 = 1j * s * K * psi1

    psi_nodes = dpsi_nodes = None
    if cfg.record_trajectory:
        psi_nodes = np.empty(cfg.steps + 1, dtype=np.complex128)
        dpsi_nodes = np.empty(cfg.steps + 1, dtype=np.complex128)

    psi0, dpsi0, blowup_x = rk4_shoot(n, K, gamma, kind, f, psi1, dpsi1,
                                      cfg.steps, x_end, psi_nodes, dpsi_nodes)
    if blowup_x >= 0.0:
        raise BlowUpError(
            f"field integration blew up at x = {blowup_x:.6f} "
            f"(n = {n}, K = {K}, gamma = {gamma:g}, |n_plus| = {abs(n_plus):g})",
            x=blowup_x)

    trajectory = None
    if cfg.record_trajectory:
        xs = np.linspace(x_end, 1.0, cfg.steps + 1)
        trajectory = FieldTrajectory(x=xs, psi=psi_nodes, dpsi=dpsi_nodes)

    error_estimate = None
    if cfg.richardson_check:
        psi0_fine, dpsi0_fine, blow2 = rk4_shoot(n, K, gamma, kind, f, psi1, dpsi1,
                                                 2 * cfg.steps, x_end, None, None)
        if blow2 >= 0.0:
            raise BlowUpError(
                f"refined integration blew up at x = {blow2:.6f}", x=blow2)
        error_estimate = max(abs(psi0 - psi0_fine),
                             abs(dpsi0 - dpsi0_fine) / max(K, 1.0))

    state = FieldState(x=x_end, psi=psi0, dpsi=dpsi0)
    return ShootingResult(state=state, trajectory=trajectory,
                          error_estimate=error_estimate)


def face_terms(state0: FieldState, K: float) -> tuple[complex, complex]:
    """Left-face combinations (g_plus, g_minus) = psi'(0) +/- iK psi(0).

    ``g_plus`` vanishes exactly when the field is purely outgoing on the
    left, i.e. at a spectral singularity.  The state must sit at x = 0.
    """
    if state0.x != 0.0:
        raise InvalidParameterError(
            f"face terms require the state at x = 0, got x = {state0.x}")
    if not (K > 0.0):
        raise InvalidParameterError(f"K must be positive, got {K}")
    return state0.dpsi + 1j * K * state0.psi, state0.dpsi - 1j * K * state0.psi


def assemble_amplitudes(g_pair: tuple[complex, complex], K: float,
                        n_plus: complex) -> ScatteringAmplitudes:
    """Fill the exterior plane-wave amplitudes from the face terms.

    ``g_pair`` is ``(g_plus, g_minus)`` as returned by :func:`face_terms`.
    """
    if not (K > 0.0):
        raise InvalidParameterError(f"K must be positive, got {K}")
    g_plus, g_minus = g_pair
    return ScatteringAmplitudes(
        n_plus=n_plus,
        n_minus=1j * g_minus / (2.0 * K),
        n_minus_tilde=-1j * g_plus / (2.0 * K),
        g_plus=g_plus,
        g_minus=g_minus,
    )
