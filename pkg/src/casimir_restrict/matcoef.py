"""Matrix coefficients d_k(e_n) = <e_n, pi(g^-1) e_k> of principal series.

On the circle the coefficient is an oscillatory integral

    d_k(e_n) = sign(det g)^eps * conj( (1/pi) int_0^pi A(theta) exp(i (k gamma(theta) - n theta)) dtheta )

where gamma(theta) is the direction of g (cos theta, sin theta) and
A = |gamma'|^((1 - lam)/2).  The integrand is entire and pi-periodic, so the
trapezoid rule converges geometrically once the grid resolves the phase.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .circle_model import RepParameter, apply, inner, ktype
from .mobius import DELTA, GroupElement, circle_map, map_bound

REGULAR, RESONANCE, CUTOFF = "Regular", "Resonance", "Cutoff"
OVERSAMPLE = 8


class GridTooCoarse(ValueError):
    """The quadrature grid cannot resolve the requested band."""


def _pow2_at_least(x: float) -> int:
    return 1 << max(4, int(np.ceil(np.log2(max(x, 16.0)))))


def required_grid(k_band: float, n_band: float, M: float) -> int:
    """Smallest power-of-two grid oversampling the phase by OVERSAMPLE.

    Besides the phase band |k| M + |n|, the amplitude |g'|^s has Fourier
    coefficients decaying like ((M - 1)/(M + 1))^j, which needs about 20 M
    modes to reach double precision.
    """
    return _pow2_at_least(OVERSAMPLE * (abs(k_band) * M + abs(n_band)) / 2 + 40 * M + 64)


def _check_principal(p: RepParameter):
    if p.series == "discrete":
        raise ValueError("matrix coefficients are implemented for the induced series only")


def _check_even(*idx):
    for v in idx:
        if int(v) != v or v % 2:
            raise ValueError(f"K-type indices are even integers, got {v}")


def _amplitude_phase(g: GroupElement, p: RepParameter, size: int):
    theta = np.arange(size) * (np.pi / size)
    gamma, jac = circle_map(g.inverse(), theta)
    amp = np.exp(((1 - p.lam) / 2) * np.log(jac))
    return theta, gamma, amp


def coefficient(k: int, n: int, p: RepParameter, g: GroupElement, size: int | None = None) -> complex:
    """d_k(e_n) by the trapezoid rule on the oscillatory integral."""
    _check_principal(p)
    _check_even(k, n)
    M = map_bound(g)
    need = required_grid(k, n, M)
    if size is None:
        size = need
    elif size < need:
        raise GridTooCoarse(f"grid {size} too coarse for k={k}, n={n}, M={M:.4g}; need {need}")
    theta, gamma, amp = _amplitude_phase(g, p, size)
    val = np.mean(amp * np.exp(1j * (k * gamma - n * theta)))
    return complex(g.det_sign ** p.eps * np.conj(val))


def coefficient_via_action(k: int, n: int, p: RepParameter, g: GroupElement,
                           size: int | None = None) -> complex:
    """d_k(e_n) as the inner product <e_n, pi(g^-1) e_k> built from the group action."""
    _check_principal(p)
    _check_even(k, n)
    if size is None:
        size = required_grid(k, n, map_bound(g))
    ek = ktype(k, _pow2_at_least(2 * abs(k) + 2))
    return inner(ktype(n, size), apply(g.inverse(), p, ek, size=size))


def coefficient_row(n: int, p: RepParameter, g: GroupElement, k_max: int,
                    size: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """All d_k(e_n) for even |k| <= k_max at once.

    Substituting phi = gamma(theta) turns the integral into the Fourier
    coefficient at -k of F(phi) = |G'(phi)|^((1 + lam)/2) exp(-i n G(phi)),
    where G = gamma^-1 is the angle map of g.  Returns (ks, values).
    """
    _check_principal(p)
    _check_even(n, k_max)
    M = map_bound(g)
    need = required_grid(n, k_max / M, M)
    if size is None:
        size = need
    elif size < need:
        raise GridTooCoarse(f"grid {size} too coarse for n={n}, k_max={k_max}; need {need}")
    phi = np.arange(size) * (np.pi / size)
    G, jac = circle_map(g, phi)
    F = np.exp(((1 + p.lam) / 2) * np.log(jac) - 1j * n * G)
    Fh = np.fft.fft(F) / size
    ks = np.arange(-k_max, k_max + 1, 2)
    vals = Fh[(-ks // 2) % size]
    return ks, g.det_sign ** p.eps * np.conj(vals)


def coefficient_column(k: int, p: RepParameter, g: GroupElement, n_max: int,
                       size: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """All d_k(e_n) for even |n| <= n_max: Fourier coefficients of A exp(i k gamma)."""
    _check_principal(p)
    _check_even(k, n_max)
    M = map_bound(g)
    need = required_grid(k, n_max, M)
    if size is None:
        size = need
    elif size < need:
        raise GridTooCoarse(f"grid {size} too coarse for k={k}, n_max={n_max}; need {need}")
    theta, gamma, amp = _amplitude_phase(g, p, size)
    Fh = np.fft.fft(amp * np.exp(1j * k * gamma)) / size
    ns = np.arange(-n_max, n_max + 1, 2)
    return ns, g.det_sign ** p.eps * np.conj(Fh[(ns // 2) % size])


# ---------------------------------------------------------------- regimes

def classify_regime(k: int, n: int, M: float, lo: float = 0.9, hi: float = 1.1) -> str:
    """Regime of d_k(e_n) for a map with derivative range [1/M, M].

    Regular when two separated critical points exist (hi n/M <= k <= lo M n),
    Cutoff when there are none (k <= lo n/M or k >= hi M n), Resonance in the
    two transition windows.  Signs are reduced by the DELTA symmetry; k and n
    of opposite sign (or exactly one of them zero) have no critical points.
    """
    if (k > 0 > n) or (k < 0 < n) or ((k == 0) != (n == 0)):
        return CUTOFF
    k, n = abs(k), abs(n)
    if k == 0:
        return REGULAR
    if k <= lo * n / M or k >= hi * M * n:
        return CUTOFF
    if hi * n / M <= k <= lo * M * n:
        return REGULAR
    return RESONANCE


# ---------------------------------------------------------------- Airy models

def airy_ai(x):
    """The Airy function Ai."""
    out = special.airy(np.asarray(x, dtype=float))[0]
    return float(out) if np.ndim(out) == 0 else out


def airy_model(k: int, n: int, M: float) -> float:
    """Crude resonance model |k|^(-1/3) Ai(k^(-1/3) (k - M n)).

    The argument is oriented so the model decays on the cutoff side k > M n.
    """
    if k == 0:
        raise ValueError("the Airy model needs k != 0")
    ak = abs(k)
    return float(ak ** (-1 / 3) * airy_ai(ak ** (-1 / 3) * (ak - M * abs(n))))


def _quadratic_form(g: GroupElement):
    a, b, c, d = g.a, g.b, g.c, g.d
    alpha = (a * a + b * b + c * c + d * d) / 2
    beta = (a * a + c * c - b * b - d * d) / 2
    delta = a * b + c * d
    return alpha, np.hypot(beta, delta), 0.5 * np.arctan2(delta, beta)


def _uniform_pieces(k: int, n: int, p: RepParameter, g: GroupElement):
    """Cubic normal-form data (rho, zeta, g0, orientation) of the phase pair."""
    alpha, R, phi = _quadratic_form(g)
    if R < 1e-12:
        raise ValueError("rotations have no critical-point pair")
    nu = n / k
    x = (1 / nu - alpha) / R
    # |g u_theta|^2 = alpha + sigma R cos 2(theta - center) around the nearer extremum
    sigma = 1 if x >= 0 else -1
    center = phi if sigma > 0 else phi + np.pi / 2
    kappa = np.sqrt((alpha - sigma * R) / (alpha + sigma * R))
    t = 0.5 * np.arccos(complex(sigma * x))
    # phase difference between the two critical points, oriented to be positive/imag
    diff = sigma * (2 * nu * t - 2 * np.arctan(kappa * np.tan(t)))
    gamma_c, _ = circle_map(g.inverse(), center)
    rho = gamma_c - nu * center
    if abs(t.imag) <= abs(t.real):
        zeta = (0.75 * abs(diff.real)) ** (2 / 3)
        s = np.sqrt(zeta)
        fpp = 2 * R * nu * nu * np.sin(2 * t)
    else:
        zeta = -(0.75 * abs(diff.imag)) ** (2 / 3)
        s = 1j * np.sqrt(-zeta)
        fpp = 2 * R * nu * nu * np.sin(2 * t)
        # pair s with the root where sqrt(2 s / f'') has positive real part
        if (2 * s / fpp).real < 0:
            fpp = -fpp
    # the amplitude Q^(-(1-lam)/2) equals nu^((1-lam)/2) at both critical points and
    # |f''| agrees there, so the linear term of the amplitude expansion vanishes
    amp = nu ** ((1 - p.lam) / 2) if sigma > 0 else np.conj(nu ** ((1 - p.lam) / 2))
    g0 = amp * np.sqrt(2 * s / fpp)
    return rho, zeta, g0, sigma


def uniform_airy_model(k: int, n: int, p: RepParameter, g: GroupElement) -> complex:
    """Uniform Airy approximation of d_k(e_n) across a coalescing critical-point pair.

    The phase k (gamma(theta) - (n/k) theta) is mapped onto the cubic
    u^3/3 - zeta u, giving
        d ~ conj( 2 e^{i k rho} g0 k^(-1/3) Ai(-k^(2/3) zeta) )
    with zeta > 0 when the critical points are real and zeta < 0 past the
    turning point.  Valid for k, n of equal sign; the error is O(k^(-4/3)).
    """
    _check_principal(p)
    _check_even(k, n)
    if k == 0 or n == 0 or (k > 0) != (n > 0):
        raise ValueError("the uniform model needs k and n nonzero and of equal sign")
    if g.det_sign < 0:
        # pi(g^-1) = pi(DELTA) pi((g DELTA)^-1) and pi(DELTA) e_n = (-1)^eps e_-n
        raise ValueError("orientation-reversing g has no critical points for k n > 0")
    if k < 0:
        return uniform_airy_model(-k, -n, p, DELTA @ g @ DELTA)
    nu0 = n / k
    rho, zeta, g0, sigma = _uniform_pieces(k, n, p, g)
    if not np.isfinite(g0) or abs(zeta) < 1e-12:
        # exact coalescence: average the two neighbours in nu
        h = 1e-6
        vals = [_eval_uniform(k, *_uniform_pieces(k, k * nu, p, g)) for nu in (nu0 - h, nu0 + h)]
        return complex(np.mean(vals))
    return _eval_uniform(k, rho, zeta, g0, sigma)


def _eval_uniform(k, rho, zeta, g0, sigma):
    z = -k ** (2 / 3) * zeta
    ai = special.airy(z)[0]
    core = 2 * g0 * k ** (-1 / 3) * ai
    I = np.exp(1j * k * rho) * (core if sigma > 0 else np.conj(core))
    return complex(np.conj(I))


# ---------------------------------------------------------------- tables

@dataclass
class CoefficientTable:
    rep: RepParameter
    g: GroupElement
    M: float
    ks: np.ndarray
    ns: np.ndarray
    entries: np.ndarray  # shape (len(ns), len(ks))
    regimes: np.ndarray = field(default=None)
    grid_size: int = 0

    def __post_init__(self):
        if self.regimes is None:
            self.regimes = np.array([[classify_regime(int(k), int(n), self.M) for k in self.ks]
                                     for n in self.ns], dtype=object)

    def row(self, n: int) -> np.ndarray:
        i = int(np.flatnonzero(self.ns == n)[0])
        return self.entries[i]

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(header)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "n", "re", "im", "abs", "regime"])
        for i, n in enumerate(self.ns):
            for j, k in enumerate(self.ks):
                v = self.entries[i, j]
                w.writerow([int(k), int(n), repr(float(v.real)), repr(float(v.imag)),
                            repr(float(abs(v))), self.regimes[i, j]])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "lambda": [self.rep.lam.real, self.rep.lam.imag],
            "eps": self.rep.eps,
            "g": [self.g.a, self.g.b, self.g.c, self.g.d],
            "M": self.M,
            "grid_size": self.grid_size,
            "k_range": [int(self.ks[0]), int(self.ks[-1])],
            "n_values": [int(n) for n in self.ns],
        }

    def to_json(self) -> str:
        data = self.metadata()
        data["entries"] = [[int(n), int(k), float(v.real), float(v.imag), self.regimes[i, j]]
                           for i, n in enumerate(self.ns) for j, k in enumerate(self.ks)
                           for v in [self.entries[i, j]]]
        return json.dumps(data, sort_keys=True)


def build_table(ns, k_max: int, p: RepParameter, g: GroupElement, workers: int = 1) -> CoefficientTable:
    """Rows for every n in ns over |k| <= k_max, one FFT per row."""
    ns = np.asarray(sorted(int(n) for n in ns))
    M = map_bound(g)
    size = required_grid(np.max(np.abs(ns)), k_max / M, M)

    def one(n):
        return coefficient_row(int(n), p, g, k_max, size=size)[1]

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one, ns))
    else:
        rows = [one(n) for n in ns]
    ks = np.arange(-k_max, k_max + 1, 2)
    return CoefficientTable(p, g, M, ks, ns, np.array(rows), grid_size=size)
