# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Mirrors ``_core_py`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, log, sqrt, fabs, M_PI

cnp.import_array()

BACKEND = "compiled"

cdef double _RESCALE = 1e100


def trig_series(modes, coeffs, x):
    cdef const double[::1] m = np.ascontiguousarray(modes, dtype=np.float64)
    cdef const double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t nx = xs.shape[0], nm = m.shape[0], i, j
    out = np.empty(nx, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double re, im, ph, cr, ci
    for i in range(nx):
        re = 0.0
        im = 0.0
        for j in range(nm):
            ph = m[j] * xs[i]
            cr = cos(ph)
            ci = sin(ph)
            re += c[j].real * cr - c[j].imag * ci
            im += c[j].real * ci + c[j].imag * cr
        o[i] = re + 1j * im
    return out


def legendre_column(int m, int lmax, double x):
    out = np.zeros(lmax - m + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s2 = (1.0 - x) * (1.0 + x)
    if s2 < 0.0:
        s2 = 0.0
    if s2 == 0.0 and m > 0:
        return out
    cdef double logp = log((2.0 * m + 1.0) / (4.0 * M_PI))
    cdef int k, l
    for k in range(1, m + 1):
        logp += log((2.0 * k - 1.0) / (2.0 * k))
    logp *= 0.5
    if m > 0:
        logp += 0.5 * m * log(s2)
    cdef double sign = -1.0 if m % 2 else 1.0
    cdef double p_prev2 = 0.0, p_prev = sign, p, a, b
    cdef double scale = logp
    cdef double log_rescale = log(_RESCALE)
    o[0] = sign * exp(scale)
    for l in range(m + 1, lmax + 1):
        a = sqrt((4.0 * l * l - 1.0) / (<double>l * l - <double>m * m))
        if l == m + 1:
            p = a * x * p_prev
        else:
            b = sqrt(((l - 1.0) * (l - 1.0) - <double>m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0))
            p = a * (x * p_prev - b * p_prev2)
        p_prev2 = p_prev
        p_prev = p
        if fabs(p) > _RESCALE:
            p_prev /= _RESCALE
            p_prev2 /= _RESCALE
            scale += log_rescale
        if scale > -745.0:
            o[l - m] = p_prev * exp(scale)
    return out


cdef inline double complex _cpow(double s, double complex e) nogil:
    cdef double ls = log(s)
    cdef double mag = exp(e.real * ls)
    cdef double ph = e.imag * ls
    return mag * cos(ph) + 1j * mag * sin(ph)


def arc_integrals(lengths, ref_r, ref_w, double complex e_left, double complex e_right,
                  double tail_eps):
    cdef const double[::1] ls = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef const double[::1] r = np.ascontiguousarray(ref_r, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(ref_w, dtype=np.float64)
    cdef Py_ssize_t nl = ls.shape[0], nr = r.shape[0], i, j
    out = np.empty(nl, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double ell, comp, ln_near, ln_far, arg, sin_ell, d, re, im, mag
    cdef double aL = e_left.real, bL = e_left.imag, aR = e_right.real, bR = e_right.imag
    cdef double complex acc
    with nogil:
        for i in range(nl):
            ell = ls[i]
            comp = M_PI - ell
            acc = 0.0
            for j in range(nr):
                ln_near = log(sin(ell * r[j]))
                arg = ell * (1.0 - r[j])
                if arg <= 0.5 * M_PI:
                    ln_far = log(sin(arg))
                else:
                    ln_far = log(sin(comp + ell * r[j]))
                # near^eL far^eR + far^eL near^eR, one exponential per term
                re = aL * ln_near + aR * ln_far
                im = bL * ln_near + bR * ln_far
                mag = w[j] * exp(re)
                acc = acc + (mag * cos(im) + 1j * mag * sin(im))
                re = aL * ln_far + aR * ln_near
                im = bL * ln_far + bR * ln_near
                mag = w[j] * exp(re)
                acc = acc + (mag * cos(im) + 1j * mag * sin(im))
            acc = acc * ell
            if tail_eps > 0.0:
                if ell <= 0.5 * M_PI:
                    sin_ell = sin(ell)
                else:
                    sin_ell = sin(comp)
                d = ell * tail_eps
                acc = acc + _cpow(sin_ell, e_right) * _cpow(d, e_left + 1.0) / (e_left + 1.0)
                acc = acc + _cpow(sin_ell, e_left) * _cpow(d, e_right + 1.0) / (e_right + 1.0)
            o[i] = acc
    return out
