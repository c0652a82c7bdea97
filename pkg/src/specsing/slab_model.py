"""Domain types and unit scaling for a planar slab of gain or loss medium.

Physical setup: a homogeneous slab of thickness ``a`` (cm) with complex
refractive index ``n = eta + i*kappa`` (``kappa < 0`` for gain), illuminated
at normal incidence.  All field computations use the scaled coordinate
``x = z/a`` in [0, 1] and the dimensionless wavenumber ``K = a*k``.

Units: lengths in cm, wavenumbers and gain coefficients in 1/cm, the Kerr
coefficient ``sigma`` in cm^2/W, field intensities ``|psi|^2`` in W/cm^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .errors import InvalidParameterError

__all__ = [
    "NonlinearityKind",
    "SlabMedium",
    "WavePoint",
    "NonlinearitySpec",
    "FieldState",
    "GainReport",
    "kerr_law",
    "scale_to_dimensionless",
    "gain_from_kappa",
    "time_reverse_to_cpa",
]


def kerr_law(amplitude: float) -> float:
    """Intensity response of a Kerr medium: f(|psi|) = |psi|^2.

    Passing this exact function object to the integrator selects the fast
    compiled path; an equivalent lambda would run through the generic
    callback route.
    """
    return amplitude * amplitude


class NonlinearityKind(Enum):
    NONE = "none"
    KERR = "kerr"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SlabMedium:
    """Complex refractive index and thickness of the slab.

    ``eta >= 1`` (dielectric); ``eta == 1`` is the empty-slab limit used by
    sanity checks.  ``kappa < 0`` means gain, ``kappa > 0`` loss.
    """

    eta: float
    kappa: float
    thickness_a: float

    def __post_init__(self):
        if not (self.eta >= 1.0) or not math.isfinite(self.eta):
            raise InvalidParameterError(f"eta must be >= 1, got {self.eta}")
        if not math.isfinite(self.kappa):
            raise InvalidParameterError(f"kappa must be finite, got {self.kappa}")
        if not (self.thickness_a > 0.0) or not math.isfinite(self.thickness_a):
            raise InvalidParameterError(
                f"thickness_a must be positive, got {self.thickness_a}")

    @property
    def n(self) -> complex:
        """Complex refractive index eta + i*kappa."""
        return complex(self.eta, self.kappa)


@dataclass(frozen=True)
class WavePoint:
    """Spectral coordinate: physical wavenumber k (1/cm) and K = a*k."""

    k: float
    K: float

    def __post_init__(self):
        if not (self.k > 0.0 and self.K > 0.0):
            raise InvalidParameterError("wavenumbers must be positive")

    @classmethod
    def from_k(cls, medium: SlabMedium, k: float) -> "WavePoint":
        if not (k > 0.0):
            raise InvalidParameterError(f"k must be positive, got {k}")
        return cls(k=k, K=medium.thickness_a * k)

    @classmethod
    def from_K(cls, medium: SlabMedium, K: float) -> "WavePoint":
        if not (K > 0.0):
            raise InvalidParameterError(f"K must be positive, got {K}")
        return cls(k=K / medium.thickness_a, K=K)


@dataclass(frozen=True)
class NonlinearitySpec:
    """Nonlinear index response: none, Kerr, or a custom law f(|psi|).

    ``sigma`` is the physical strength (cm^2/W for Kerr).  The scaled
    strength ``gamma = -K^2 * sigma`` is recomputed per spectral point and
    never cached across K values.  A custom law must return a finite real
    number for every sampled amplitude; smoothness is not verified.
    """

    kind: NonlinearityKind = NonlinearityKind.NONE
    sigma: float = 0.0
    custom_f: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if not math.isfinite(self.sigma):
            raise InvalidParameterError(f"sigma must be finite, got {self.sigma}")
        if self.kind is NonlinearityKind.CUSTOM and not callable(self.custom_f):
            raise InvalidParameterError("custom nonlinearity requires a callable")

    @property
    def f(self) -> Optional[Callable[[float], float]]:
        """The amplitude law, or None when the medium is linear."""
        if self.kind is NonlinearityKind.NONE:
            return None
        if self.kind is NonlinearityKind.KERR:
            return kerr_law
        return self.custom_f

    def gamma(self, K: float) -> float:
        """Scaled strength -K^2 * sigma; identically zero for kind NONE."""
        if self.kind is NonlinearityKind.NONE:
            return 0.0
        return -K * K * self.sigma


@dataclass(frozen=True)
class FieldState:
    """Field value and derivative at a scaled position inside the slab."""

    x: float
    psi: complex
    dpsi: complex

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0):
            raise InvalidParameterError(f"x must lie in [0, 1], got {self.x}")


@dataclass(frozen=True)
class GainReport:
    """Gain coefficient g, linear threshold g0 (both 1/cm) and their excess."""

    g: float
    g0: float
    excess: float = field(default=None)  # type: ignore[assignment]
    warning: Optional[str] = None

    def __post_init__(self):
        if self.excess is None:
            object.__setattr__(self, "excess", self.g - self.g0)


def scale_to_dimensionless(medium: SlabMedium, k: float,
                           nl: NonlinearitySpec) -> tuple[float, complex, float]:
    """Map physical parameters to the scaled triple (K, z, gamma).

    Returns
    -------
    K : float
        Dimensionless wavenumber a*k.
    z : complex
        Barrier strength K^2 * (1 - n^2) of the equivalent scattering
        potential.
    gamma : float
        Scaled nonlinearity strength -K^2 * sigma.
    """
    if not (k > 0.0) or not math.isfinite(k):
        raise InvalidParameterError(f"k must be positive, got {k}")
    K = medium.thickness_a * k
    z = K * K * (1.0 - medium.n ** 2)
    return K, z, nl.gamma(K)


def gain_from_kappa(medium: SlabMedium, K: float) -> float:
    """Gain coefficient g = -2*K*kappa/a (1/cm); positive for a gain medium.

    Linear in both kappa and K, so doubling either doubles g exactly.
    """
    if not (K > 0.0):
        raise InvalidParameterError(f"K must be positive, got {K}")
    return -2.0 * K * medium.kappa / medium.thickness_a


def time_reverse_to_cpa(medium: SlabMedium) -> SlabMedium:
    """Map gain to loss (and back): the time-reversed slab.

    A slab lasing at gain g absorbs perfectly, at the same wavelength and
    incident intensity, once kappa is negated so the loss coefficient equals
    g.  Involutive: applying it twice returns the original medium.
    """
    return SlabMedium(eta=medium.eta, kappa=-medium.kappa,
                      thickness_a=medium.thickness_a)
