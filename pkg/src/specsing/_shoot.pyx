# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 shooting kernel; mirrors specsing._shoot_py.rk4_shoot."""

from libc.math cimport fabs, isfinite, sqrt

BACKEND_NAME = "cython"

cdef double _BLOWUP_LIMIT = 1e150


def rk4_shoot(double complex n, double K, double gamma, int kind, object f,
              double complex psi1, double complex dpsi1, int steps,
              double x_end=0.0, psi_nodes=None, dpsi_nodes=None):
    """See specsing._shoot_py.rk4_shoot; identical contract."""
    cdef double h = (x_end - 1.0) / steps
    cdef double complex c = -(n * K) * (n * K)
    cdef double complex psi = psi1
    cdef double complex dpsi = dpsi1
    cdef double complex k1p, k1d, k2p, k2d, k3p, k3d, k4p, k4d, p2, p3, p4
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0
    cdef double mag, amp
    cdef int i, j
    cdef bint record = psi_nodes is not None
    cdef double complex[::1] pn
    cdef double complex[::1] dn

    if record:
        pn = psi_nodes
        dn = dpsi_nodes
        pn[steps] = psi
        dn[steps] = dpsi

    for i in range(steps):
        k1p = dpsi
        k1d = _accel(psi, c, gamma, kind, f)
        p2 = psi + half * k1p
        k2p = dpsi + half * k1d
        k2d = _accel(p2, c, gamma, kind, f)
        p3 = psi + half * k2p
        k3p = dpsi + half * k2d
        k3d = _accel(p3, c, gamma, kind, f)
        p4 = psi + h * k3p
        k4p = dpsi + h * k3d
        k4d = _accel(p4, c, gamma, kind, f)
        psi = psi + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        dpsi = dpsi + sixth * (k1d + 2.0 * (k2d + k3d) + k4d)

        mag = fabs(psi.real) + fabs(psi.imag) + fabs(dpsi.real) + fabs(dpsi.imag)
        if not (mag < _BLOWUP_LIMIT) or not isfinite(mag):
            return psi, dpsi, 1.0 + (i + 1) * h
        if record:
            j = steps - (i + 1)
            pn[j] = psi
            dn[j] = dpsi

    return psi, dpsi, -1.0


cdef inline double complex _accel(double complex p, double complex c,
                                  double gamma, int kind, object f):
    cdef double amp
    if kind == 0:
        return c * p
    if kind == 1:
        return (c + gamma * (p.real * p.real + p.imag * p.imag)) * p
    amp = sqrt(p.real * p.real + p.imag * p.imag)
    return (c + gamma * <double> f(amp)) * p
