"""Pure-Python RK4 shooting kernel.

Reference implementation of the hot loop; the Cython module ``_shoot``
compiles the same algorithm.  Which one is active is decided in
``specsing._backend``.
"""
from __future__ import annotations

import math

BACKEND_NAME = "python"

_BLOWUP_LIMIT = 1e150


def rk4_shoot(n, K, gamma, kind, f, psi1, dpsi1, steps, x_end=0.0,
              psi_nodes=None, dpsi_nodes=None):
    """Integrate psi'' = -(nK)^2 psi + gamma*f(|psi|)*psi backward from x = 1.

    Classical fixed-step RK4 on the first-order system (psi, psi'), starting
    from the terminal data (psi1, dpsi1) at x = 1 and ending at ``x_end``.

    Parameters
    ----------
    n, K, gamma : complex, float, float
        Refractive index, scaled wavenumber, scaled nonlinearity strength.
    kind : int
        0 linear, 1 Kerr (f = |psi|^2, evaluated without a square root),
        2 custom law (``f`` called with float |psi|).
    psi_nodes, dpsi_nodes : buffers of complex, length steps + 1, optional
        Filled in ascending x order: index i holds the state at
        x = x_end + i*(1 - x_end)/steps.

    Returns
    -------
    (psi_end, dpsi_end, blowup_x)
        State at ``x_end``; ``blowup_x`` is -1.0 normally, otherwise the x
        at which the state left the representable range.
    """
    h = (x_end - 1.0) / steps
    c = -(n * K) * (n * K)
    psi = complex(psi1)
    dpsi = complex(dpsi1)
    record = psi_nodes is not None
    if record:
        psi_nodes[steps] = psi
        dpsi_nodes[steps] = dpsi

    if kind == 0:
        def accel(p):
            return c * p
    elif kind == 1:
        def accel(p):
            return (c + gamma * (p.real * p.real + p.imag * p.imag)) * p
    else:
        def accel(p):
            return (c + gamma * f(abs(p))) * p

    half = 0.5 * h
    sixth = h / 6.0
    for i in range(steps):
        k1p = dpsi
        k1d = accel(psi)
        p2 = psi + half * k1p
        k2p = dpsi + half * k1d
        k2d = accel(p2)
        p3 = psi + half * k2p
        k3p = dpsi + half * k2d
        k3d = accel(p3)
        p4 = psi + h * k3p
        k4p = dpsi + h * k3d
        k4d = accel(p4)
        psi = psi + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        dpsi = dpsi + sixth * (k1d + 2.0 * (k2d + k3d) + k4d)

        mag = abs(psi.real) + abs(psi.imag) + abs(dpsi.real) + abs(dpsi.imag)
        if not (mag < _BLOWUP_LIMIT) or not math.isfinite(mag):
            return psi, dpsi, 1.0 + (i + 1) * h
        if record:
            j = steps - (i + 1)
            psi_nodes[j] = psi
            dpsi_nodes[j] = dpsi

    return psi, dpsi, -1.0
