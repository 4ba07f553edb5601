"""Pure numpy implementations of the hot kernels.

Same signatures as the compiled ``_core`` extension; used when the extension
is not built or when CASIMIR_RESTRICT_PURE=1 is set.
"""
import numpy as np

BACKEND = "python"

_RESCALE = 1e100
_LOG_RESCALE = np.log(_RESCALE)


def trig_series(modes, coeffs, x):
    """sum_j coeffs[j] * exp(1j * modes[j] * x) at every point of x."""
    modes = np.asarray(modes, dtype=np.float64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape[0], dtype=np.complex128)
    # chunk to bound the size of the phase matrix
    step = max(1, 2_000_000 // max(1, modes.shape[0]))
    for i in range(0, x.shape[0], step):
        ph = np.exp(1j * np.outer(x[i:i + step], modes))
        out[i:i + step] = ph @ coeffs
    return out


def legendre_column(m, lmax, x):
    """Fully normalized P_l^m(x), l = m..lmax, with the Condon-Shortley phase.

    Normalized so that |P_l^m(cos t)|^2 integrates to 1/(2 pi) against sin t dt,
    i.e. Y_l^m = P_l^m(cos t) e^{i m phi} has unit L2 norm on the sphere.
    The sectoral start is carried in log form and the column recurrence is
    rescaled whenever it grows past 1e100, so deep underflow of sin^m is harmless.
    """
    m = int(m)
    lmax = int(lmax)
    x = float(x)
    out = np.zeros(lmax - m + 1)
    s2 = max(0.0, (1.0 - x) * (1.0 + x))
    if s2 == 0.0 and m > 0:
        return out
    # log of sqrt((2m+1)/(4pi) prod_{k=1}^m (2k-1)/(2k)) * sin^m
    k = np.arange(1, m + 1, dtype=np.float64)
    logp = 0.5 * (np.log((2 * m + 1) / (4 * np.pi)) + np.sum(np.log((2 * k - 1) / (2 * k))))
    if m > 0:
        logp += 0.5 * m * np.log(s2)
    sign = -1.0 if m % 2 else 1.0
    p_prev2 = 0.0
    p_prev = sign
    scale = logp
    out[0] = sign * np.exp(scale)
    for l in range(m + 1, lmax + 1):
        a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        if l == m + 1:
            p = a * x * p_prev
        else:
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p = a * (x * p_prev - b * p_prev2)
        p_prev2, p_prev = p_prev, p
        if abs(p) > _RESCALE:
            p_prev /= _RESCALE
            p_prev2 /= _RESCALE
            scale += _LOG_RESCALE
        out[l - m] = p_prev * np.exp(scale) if scale > -745.0 else 0.0
    return out


def _pow(s, e):
    """s**e for positive real arrays s and complex e."""
    return np.exp(e * np.log(s))


def arc_integrals(lengths, ref_r, ref_w, e_left, e_right, tail_eps):
    """Graded Gauss-Legendre rule for arcs of the projective circle.

    For every arc length l in (0, pi) returns
        int_0^l sin(s)^e_left * sin(l - s)^e_right ds
    using a reference mesh on [tail_eps, 1/2] graded toward 0, mirrored for
    the right half.  The pieces [0, l*tail_eps] at both ends are added from
    the leading power term, which requires Re e > -1.
    """
    lengths = np.asarray(lengths, dtype=np.float64)
    r = np.asarray(ref_r, dtype=np.float64)[None, :]
    w = np.asarray(ref_w, dtype=np.float64)[None, :]
    ell = lengths[:, None]
    comp = np.pi - ell
    near = np.sin(ell * r)
    # sin(l (1 - r)) evaluated from the nearer endpoint of [0, pi]
    arg = ell * (1.0 - r)
    far = np.where(arg <= np.pi / 2, np.sin(arg), np.sin(comp + ell * r))
    body = _pow(near, e_left) * _pow(far, e_right) + _pow(far, e_left) * _pow(near, e_right)
    total = lengths * np.sum(w * body, axis=1)
    if tail_eps > 0.0:
        sin_ell = np.where(lengths <= np.pi / 2, np.sin(lengths), np.sin(np.pi - lengths))
        d = lengths * tail_eps
        total = total + _pow(sin_ell, e_right) * _pow(d, e_left + 1.0) / (e_left + 1.0)
        total = total + _pow(sin_ell, e_left) * _pow(d, e_right + 1.0) / (e_right + 1.0)
    return total
