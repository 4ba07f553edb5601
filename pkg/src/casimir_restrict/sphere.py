"""Spherical harmonics on S^2 and the equator norms of the V_{1/4} eigenspace.

On S^2 x S^1 the functions y = Y_l^m(s) e^{i(2l+1)t} / sqrt(2 pi) all satisfy

    (Delta_{S^2} - Delta_{S^1} / 4) y = (l(l+1) - (2l+1)^2 / 4) y = -y / 4

with nonnegative Laplacians, so that eigenspace is infinite dimensional, and
the highest-weight harmonics Y_l^l concentrate on the equator with
L^2(equator) norm growing like l^(1/2).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from . import _kernels

CIRCUMFERENCE = 2 * np.pi
NORMALIZER = 1 / np.sqrt(CIRCUMFERENCE)   # the constant c in y = c Y e^{i(2l+1)t}


def _check(l: int, m: int):
    if int(l) != l or l < 0:
        raise ValueError("degree must be a nonnegative integer")
    if int(m) != m or abs(m) > l:
        raise ValueError(f"need |m| <= l, got l={l}, m={m}")


def legendre_normalized(l: int, m: int, x) -> np.ndarray:
    """sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x) for m >= 0, Condon-Shortley phase."""
    _check(l, m)
    if m < 0:
        raise ValueError("use m >= 0; negative orders follow from conjugation")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([_kernels.legendre_column(int(m), int(l), float(v))[l - m] for v in x.ravel()]).reshape(x.shape)


def sph_harm(l: int, m: int, colatitude, azimuth):
    """Unit-normalized Y_l^m(colatitude, azimuth), with Y_l^{-m} = (-1)^m conj(Y_l^m)."""
    _check(l, m)
    theta = np.asarray(colatitude, dtype=float)
    phi = np.asarray(azimuth, dtype=float)
    theta, phi = np.broadcast_arrays(theta, phi)
    # sin(pi/2 - theta) is exactly 0 on the (floating-point) equator, cos(theta) is not
    p = legendre_normalized(l, abs(m), np.sin(np.pi / 2 - theta))
    val = p * np.exp(1j * abs(m) * phi)
    if m < 0:
        val = (-1) ** abs(m) * np.conj(val)
    return complex(val.ravel()[0]) if theta.ndim == 0 else val


def equator_norm(l: int, m: int) -> float:
    """int_0^{2 pi} |Y_l^m(pi/2, phi)|^2 dphi = 2 pi |Y_l^m(pi/2, 0)|^2 (exactly 0 for l + m odd)."""
    _check(l, m)
    if (l + m) % 2:
        return 0.0
    return float(CIRCUMFERENCE * legendre_normalized(l, abs(m), 0.0)[0] ** 2)


def _equator_column(m: int, l_max: int) -> np.ndarray:
    """2 pi |Y_l^m(pi/2)|^2 for l = m..l_max, parity zeros set exactly."""
    col = _kernels.legendre_column(int(m), int(l_max), 0.0)
    out = CIRCUMFERENCE * col ** 2
    out[1::2] = 0.0
    return out


def laplacian_eigenvalue(l: int, m: int, size: int | None = None) -> float:
    """Eigenvalue of Delta_{S^2} on Y_l^m by spectral differentiation in the colatitude.

    Along a full great circle through the poles, P_l^m(cos t) times sign(sin t)^m
    is a trigonometric polynomial of degree l, so FFT derivatives are exact up
    to rounding.  The returned value is the least-squares ratio
    <-f'' - cot f' + m^2 f / sin^2, f> / <f, f> over interior nodes.
    """
    _check(l, m)
    m = abs(m)
    size = size or max(64, 4 * (l + 1))
    t = 2 * np.pi * np.arange(size) / size
    f = legendre_normalized(l, m, np.cos(t)) * np.sign(np.sin(t)) ** m
    freq = np.fft.fftfreq(size, 1.0 / size)
    F = np.fft.fft(f)
    d1 = np.fft.ifft(1j * freq * F).real
    d2 = np.fft.ifft(-(freq ** 2) * F).real
    s = np.sin(t)
    keep = np.abs(s) > 0.2
    lap = -d2[keep] - np.cos(t[keep]) / s[keep] * d1[keep] + m * m * f[keep] / s[keep] ** 2
    return float(np.dot(lap, f[keep]) / np.dot(f[keep], f[keep]))


def circle_laplacian_eigenvalue(freq: int, size: int = 256) -> float:
    """Eigenvalue of Delta_{S^1} = -d^2/dt^2 on e^{i freq t}, by FFT."""
    if size <= 2 * abs(freq):
        size = 4 * abs(freq) + 4
    t = CIRCUMFERENCE * np.arange(size) / size
    e = np.exp(1j * freq * t)
    k = np.fft.fftfreq(size, 1.0 / size)
    second = np.fft.ifft(-(k ** 2) * np.fft.fft(e))
    return float(np.real(np.vdot(e, -second) / np.vdot(e, e)))


def casimir_eigen_check(l: int, spectral: bool = False, m: int = 0):
    """Eigenvalue of Delta_{S^2} - Delta_{S^1}/4 on Y_l^m e^{i(2l+1)t}.

    Exact arithmetic (a Fraction, always -1/4) by default; with
    ``spectral=True`` both Laplacians are applied numerically and a float is
    returned.
    """
    if int(l) != l or l < 0:
        raise ValueError("degree must be a nonnegative integer")
    if not spectral:
        return Fraction(l * (l + 1)) - Fraction((2 * l + 1) ** 2, 4)
    return laplacian_eigenvalue(l, m) - circle_laplacian_eigenvalue(2 * l + 1) / 4


@dataclass
class SharpnessReport:
    ls: list
    top: list           # m = l family
    zonal: list         # m = 0 family
    best: list          # max over m
    best_m: list
    fits: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def to_csv(self, header: str | None = None) -> str:
        lines = [header.rstrip("\n")] if header else []
        lines.append("l,m,equator_norm")
        for l, a, b, c, mc in zip(self.ls, self.top, self.zonal, self.best, self.best_m):
            rows = {(l, l): a, (l, 0): b, (l, mc): c}
            for (ll, mm), v in sorted(rows.items(), key=lambda kv: kv[0][1]):
                lines.append(f"{ll},{mm},{v!r}")
        return "\n".join(lines) + "\n"


def _fit(ls, vals) -> dict:
    res = stats.linregress(np.log(ls), np.log(vals))
    return {"exponent": float(res.slope), "stderr": float(res.stderr)}


def sharpness_experiment(l_max: int, l_min: int = 50, step: int = 10) -> SharpnessReport:
    """Equator norms for even l = l_min, l_min + step, ..., l_max.

    Every row depends on its own l only, so a larger l_max extends the report
    without changing earlier rows.  The "derivative_loss" entry is the fitted
    growth exponent of the worst-case family; the hyperbolic target is 0.
    """
    if l_max < l_min or l_min < 2:
        raise ValueError("need l_max >= l_min >= 2")
    if l_min % 2 or step % 2:
        raise ValueError("l_min and step must be even (odd l have P_l(0) = 0)")
    ls = list(range(l_min, l_max + 1, step))
    best = np.zeros(len(ls))
    best_m = np.zeros(len(ls), dtype=int)
    for m in range(l_max + 1):
        col = _equator_column(m, l_max)
        for i, l in enumerate(ls):
            if l >= m and col[l - m] > best[i]:
                best[i], best_m[i] = col[l - m], m
    top = [equator_norm(l, l) for l in ls]
    zonal = [equator_norm(l, 0) for l in ls]
    fits = {"top": _fit(ls, top), "zonal": _fit(ls, zonal), "best": _fit(ls, best)}
    fits["derivative_loss"] = fits["best"]["exponent"]
    return SharpnessReport(ls, [float(v) for v in top], [float(v) for v in zonal],
                           [float(v) for v in best], [int(v) for v in best_m], fits)
