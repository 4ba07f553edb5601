"""The model trilinear kernel on three copies of the projective circle.

    K(theta, theta', theta'') = sgn^eps' |sin(theta - theta')|^e1
                                |sin(theta - theta'')|^e2 |sin(theta' - theta'')|^e3

with (e1, e2, e3) = ((-1 - tau)/2, (-1 - 2 lam + tau)/2, (-1 + 2 lam + tau)/2) for
the principal series.  Averaging over theta'' gives k_tau, a function of
x = theta - theta' only (mod pi); the factor |sin x|^e1 comes out of the integral
and what remains is an integral over the two arcs cut out by theta and theta':

    k_tau = |sin x|^e1 (1/pi) [ (-1)^eps' A(x; e3, e2) + A(pi - x; e2, e3) ],
    A(l; a, b) = int_0^l sin(s)^a sin(l - s)^b ds.

Two independent quadratures of A are provided: a geometrically graded
Gauss-Legendre mesh ("graded") and term-by-term integration of the Taylor
series of the regular factor at each endpoint ("split").
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from . import _kernels
from .circle_model import CircleFunction

SCHEMES = ("graded", "split")
_GL_NODES = 20
_TAIL_EPS = 1e-9


class QuadratureError(RuntimeError):
    """A singular quadrature failed its self-check; carries the error estimate."""

    def __init__(self, message, estimate):
        super().__init__(f"{message} (estimated error {estimate:.3g})")
        self.estimate = estimate


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of the trilinear kernel.

    variant "principal" pairs V_lam, V_-lam and V_tau; variant "discrete" uses
    the homogeneous spaces of degrees k - 2 and -k of an even weight k.
    """

    lam: complex = 0j
    tau: complex = 0j
    eps_prime: int = 0
    variant: str = "principal"
    weight: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "tau", complex(self.tau))
        if self.eps_prime not in (0, 1):
            raise ValueError("eps_prime must be 0 or 1")
        if self.variant not in ("principal", "discrete"):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "discrete":
            k = self.weight
            if k is None or int(k) != k or k < 2 or k % 2:
                raise ValueError("discrete variant needs an even weight >= 2")

    @property
    def exponents(self) -> tuple[complex, complex, complex]:
        tau, lam = self.tau, self.lam
        e1 = (-1 - tau) / 2
        if self.variant == "principal":
            return e1, (-1 - 2 * lam + tau) / 2, (-1 + 2 * lam + tau) / 2
        k = self.weight
        return e1, (-1 + tau) / 2 - k + 1, (-1 + tau) / 2 + k - 1

    def with_tau(self, tau) -> "KernelSpec":
        return KernelSpec(self.lam, tau, self.eps_prime, self.variant, self.weight)


def _reduce(theta):
    return np.mod(np.asarray(theta, dtype=float), np.pi)


def sign_invariant(theta, theta_p, theta_pp) -> int:
    """sgn((t - t')(t - t'')(t' - t'')) for representatives in [0, pi).

    This is the cyclic orientation of the three points on the projective
    circle, hence invariant under rotations.
    """
    a, b, c = (float(v) for v in (_reduce(theta), _reduce(theta_p), _reduce(theta_pp)))
    prod = (a - b) * (a - c) * (b - c)
    if prod == 0.0:
        raise ValueError("the three points must be pairwise distinct")
    return 1 if prod > 0 else -1


def _cpow(s, e):
    return np.exp(e * np.log(s))


def kernel_value(theta, theta_p, theta_pp, spec: KernelSpec):
    """K(theta, theta', theta''); vectorized over theta''."""
    e1, e2, e3 = spec.exponents
    a, b = float(_reduce(theta)), float(_reduce(theta_p))
    c = _reduce(theta_pp)
    prod = (a - b) * (a - c) * (b - c)
    if np.any(prod == 0.0):
        raise ValueError("the kernel is singular where two points coincide")
    val = (_cpow(abs(np.sin(a - b)), e1) * _cpow(np.abs(np.sin(a - c)), e2)
           * _cpow(np.abs(np.sin(b - c)), e3))
    if spec.eps_prime:
        val = val * np.sign(prod)
    return val if np.ndim(val) else complex(val)


# ---------------------------------------------------------------- graded mesh

@lru_cache(maxsize=64)
def _graded_reference(ratio: float, eps: float, nodes: int = _GL_NODES):
    """Gauss-Legendre nodes/weights on [eps, 1/2], panels shrinking by ``ratio`` toward 0."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = [0.5]
    while edges[-1] > eps:
        edges.append(max(edges[-1] * ratio, eps))
    edges = np.array(edges[::-1])
    lo, hi = edges[:-1, None], edges[1:, None]
    r = (lo + hi) / 2 + (hi - lo) / 2 * x[None, :]
    wr = (hi - lo) / 2 * w[None, :]
    r, wr = r.ravel(), wr.ravel()
    r.setflags(write=False)
    wr.setflags(write=False)
    return r, wr


def _panel_ratio(*exps, phase: float = 6.0) -> float:
    """Panel shrink ratio keeping the phase of s^(i b) below ``phase`` rad per panel."""
    beta = max(abs(complex(e).imag) for e in exps)
    return float(max(0.15, np.exp(-phase / beta))) if beta > 0 else 0.15


def _arc_graded(lengths, e_left, e_right):
    ratio = _panel_ratio(e_left, e_right)
    if min(e_left.real, e_right.real) > -1:
        # the tail on [0, l eps] freezes the far factor sin(l - s); near-closed arcs have
        # that factor vary on the scale pi - l, so eps shrinks with the reach (by decades,
        # so lengths still share meshes)
        reach = np.minimum(lengths, np.pi - lengths)
        decades = np.maximum(np.ceil(np.log10(lengths / reach) - 1e-12), 0).astype(int)
        out = np.empty(len(lengths), dtype=complex)
        for j in np.unique(decades):
            eps = _TAIL_EPS * 10.0 ** -j
            r, w = _graded_reference(round(ratio, 12), eps)
            idx = decades == j
            out[idx] = _kernels.arc_integrals(lengths[idx], r, w, e_left, e_right, eps)
        return out
    # non-integrable exponents: finite part, with series tails on [0, l r_min]
    out = np.empty(len(lengths), dtype=complex)
    for i, ell in enumerate(lengths):
        reach = min(ell, np.pi - ell)
        r_min = min(0.05, 0.3 * reach / ell)
        r, w = _graded_reference(round(ratio, 12), round(r_min, 15))
        body = _kernels.arc_integrals(np.array([ell]), r, w, e_left, e_right, 0.0)[0]
        d = ell * r_min
        out[i] = body + _endpoint_series(ell, e_left, e_right, d) \
            + _endpoint_series(ell, e_right, e_left, d)
    return out


# ---------------------------------------------------------------- series split

def _sin_from_end(ell, s):
    """sin(ell - s) for complex s, evaluated from the nearer end of [0, pi]."""
    return np.sin(ell - s) if ell <= np.pi / 2 else np.sin((np.pi - ell) + s)


def _taylor(ell, e_sing, e_other, radius, nfft=256):
    """Coefficients b_j of h(radius z) = sum b_j z^j, h(s) = (sin s / s)^e_sing sin(ell - s)^e_other.

    Working in the scaled variable keeps the coefficients O(1) however small
    the radius is.
    """
    s = radius * np.exp(2j * np.pi * np.arange(nfft) / nfft)
    logh = e_sing * np.log(np.sin(s) / s) + e_other * np.log(_sin_from_end(ell, s))
    return (np.fft.fft(np.exp(logh)) / nfft)[: nfft // 2]


def _endpoint_series(ell, e_sing, e_other, a):
    """Finite-part int_0^a s^e_sing h(s) ds from the Taylor series of h."""
    reach = min(ell, np.pi - ell)
    if a > 0.45 * reach:
        raise ValueError("series interval exceeds the radius of convergence")
    radius = min(2 * a, 0.9 * reach)
    coef = _taylor(ell, e_sing, e_other, radius)
    j = np.arange(coef.size)
    p = e_sing + j + 1
    return complex(np.exp(p[0] * np.log(a)) * np.sum(coef * (a / radius) ** j / p))


def _arc_split(lengths, e_left, e_right):
    x, w = np.polynomial.legendre.leggauss(24)
    out = np.empty(len(lengths), dtype=complex)
    for i, ell in enumerate(lengths):
        reach = min(ell, np.pi - ell)
        a = 0.4 * reach
        ends = _endpoint_series(ell, e_left, e_right, a) + _endpoint_series(ell, e_right, e_left, a)
        # middle [a, ell - a]: panels doubling away from each end
        edges = [a]
        while edges[-1] * 2 < ell / 2:
            edges.append(edges[-1] * 2)
        left = np.array(edges + [ell / 2])
        panels = np.concatenate([left, (ell - left[::-1])[1:]])
        lo, hi = panels[:-1, None], panels[1:, None]
        s = ((lo + hi) / 2 + (hi - lo) / 2 * x[None, :]).ravel()
        ws = ((hi - lo) / 2 * w[None, :]).ravel()
        far = np.where(ell - s <= np.pi / 2, np.sin(ell - s), np.sin(np.pi - ell + s))
        mid = np.sum(ws * _cpow(np.sin(s), e_left) * _cpow(far, e_right))
        out[i] = ends + mid
    return out


def _arc(lengths, e_left, e_right, scheme):
    lengths = np.atleast_1d(np.asarray(lengths, dtype=float))
    if scheme == "graded":
        return _arc_graded(lengths, e_left, e_right)
    if scheme == "split":
        return _arc_split(lengths, e_left, e_right)
    raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


# ---------------------------------------------------------------- averaged kernel

def arc_average(x, spec: KernelSpec, scheme: str = "graded"):
    """(1/pi) int_0^pi K(x, 0, theta'') dtheta'' / |sin x|^e1, for x in (0, pi)."""
    _, e2, e3 = spec.exponents
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((x <= 0) | (x >= np.pi)):
        raise ValueError("x must lie strictly inside (0, pi)")
    inner = _arc(x, e3, e2, scheme)
    outer = _arc(np.pi - x, e2, e3, scheme)
    sign = -1.0 if spec.eps_prime else 1.0
    return (sign * inner + outer) / np.pi


def averaged_kernel(c, spec: KernelSpec, scheme: str = "graded", check_tol: float | None = None):
    """k_tau(c), c = (theta - theta')/2.  Vectorized over c.

    With ``check_tol`` the other scheme is evaluated too and a QuadratureError
    carrying the largest disagreement is raised if it exceeds the tolerance.
    """
    c = np.asarray(c, dtype=float)
    x = np.mod(2 * c, np.pi)
    if np.any(np.minimum(x, np.pi - x) < 1e-300):
        raise ValueError("c lies on the singular set {0, pi/2} mod pi")
    e1 = spec.exponents[0]
    xs = np.atleast_1d(x)
    prefactor = _cpow(np.sin(xs), e1)
    vals = prefactor * arc_average(xs, spec, scheme)
    if check_tol is not None:
        other = "split" if scheme == "graded" else "graded"
        diff = float(np.max(np.abs(vals - prefactor * arc_average(xs, spec, other))))
        if diff > check_tol:
            raise QuadratureError(f"{scheme} and {other} schemes disagree", diff)
    return vals if c.ndim else complex(vals[0])


def averaged_kernel_at(theta, theta_p, spec: KernelSpec, tail: float = 1e-8):
    """(1/pi) int K(theta, theta', t) dt computed at the given representatives.

    A slower reference path: the graded mesh is laid out around the actual
    positions of theta and theta' and the kernel is evaluated pointwise, signs
    included, without using rotation invariance.
    """
    e1, e2, e3 = spec.exponents
    if min(e2.real, e3.real) <= -1:
        raise ValueError("pointwise evaluation needs integrable exponents")
    a, b = float(_reduce(theta)), float(_reduce(theta_p))
    lo, hi = min(a, b), max(a, b)
    total = 0j
    ratio = _panel_ratio(e2, e3)
    r, w = _graded_reference(round(ratio, 12), tail)
    for start, length in ((lo, hi - lo), (hi, np.pi - (hi - lo))):
        end = start + length
        for base, direction in ((start, 1.0), (end, -1.0)):
            nodes = base + direction * length * r
            total += length * np.sum(w * kernel_value(a, b, nodes, spec))
            # leading-order piece on [0, length * tail] next to the endpoint
            point = np.mod(base, np.pi)
            e_sing = e2 if abs(np.sin(point - a)) < abs(np.sin(point - b)) else e3
            mid = base + direction * length * tail
            d = length * tail
            local = kernel_value(a, b, np.array([mid]), spec)[0] / _cpow(abs(np.sin(mid - point)), e_sing)
            total += local * _cpow(d, e_sing + 1) / (e_sing + 1)
    return complex(total / np.pi)


# ---------------------------------------------------------------- sharp transform

def _leading_ends(spec: KernelSpec):
    """Coefficients of k_tau near x = 0 and x = pi.

    k ~ x^e1 (P0 + Q0 x^tau) near 0 and y^e1 (P1 + Q1 y^tau) near pi with
    y = pi - x.  P is the finite-part integral of sin^(e2+e3) over a full
    period.  Q collects the collapsing arc (a beta integral) and the two ends
    of the long arc, where one of the three points sits next to the
    coalescing pair: int_0^inf s^a (1 + s)^b ds = Gamma(a+1) Gamma(-tau) / Gamma(-b).
    """
    _, e2, e3 = spec.exponents
    lg = special.loggamma
    full = np.sqrt(np.pi) * np.exp(lg((e2 + e3 + 1) / 2) - lg((e2 + e3) / 2 + 1))
    beta = np.exp(lg(e2 + 1) + lg(e3 + 1) - lg(e2 + e3 + 2))
    tau = e2 + e3 + 1
    cluster = np.exp(lg(e2 + 1) + lg(-tau) - lg(-e3)) + np.exp(lg(e3 + 1) + lg(-tau) - lg(-e2))
    sign = -1.0 if spec.eps_prime else 1.0
    return (full / np.pi, sign * full / np.pi,
            (sign * beta + cluster) / np.pi, (beta + sign * cluster) / np.pi)


def _end_pieces(u0, u1, spec: KernelSpec, tail: float):
    """int over (0, tail) and (pi - tail, pi) of u k_tau from the leading behaviour of k."""
    e1 = spec.exponents[0]
    tau = spec.tau
    if abs(tau) < 1e-6:
        # P and Q have opposite poles at tau = 0; average two nearby points
        d = 1e-6j
        return 0.5 * (_end_pieces(u0, u1, spec.with_tau(d), tail)
                      + _end_pieces(u0, u1, spec.with_tau(-d), tail))
    p0, p1, q0, q1 = _leading_ends(spec)
    total = 0j
    for val, P, Q in ((u0, p0, q0), (u1, p1, q1)):
        total += val * (P * tail ** (e1 + 1) / (e1 + 1) + Q * tail ** (e1 + tau + 1) / (e1 + tau + 1))
    return total


@lru_cache(maxsize=32)
def _outer_mesh(support: float, width: float, ratio: float, eps: float, nodes: int = 16):
    """Nodes on (0, support] graded toward 0 with panel width capped at ``width``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = [support]
    while edges[-1] > eps:
        edges.append(max(edges[-1] * ratio, eps))
    edges = edges[::-1]
    fine = [edges[0]]
    for e in edges[1:]:
        m = int(np.ceil((e - fine[-1]) / width))
        fine.extend(np.linspace(fine[-1], e, m + 1)[1:])
    edges = np.array(fine)
    lo, hi = edges[:-1, None], edges[1:, None]
    pts = ((lo + hi) / 2 + (hi - lo) / 2 * x[None, :]).ravel()
    wts = ((hi - lo) / 2 * w[None, :]).ravel()
    return pts, wts


def _band(u) -> float:
    band = getattr(u, "band", None)
    if band is not None:
        return float(band)
    c = np.abs(u.coeffs)
    keep = c > 1e-17 * max(c.max(), 1e-300)
    return float(np.max(np.abs(u.modes[keep]))) if keep.any() else 0.0


def sharp_transform(u, spec: KernelSpec, scheme: str = "graded", support: float | None = None,
                    tail: float = 1e-6) -> complex:
    """u_sharp(tau) = (1/(2 pi^2)) int_0^pi u(x) k_tau(x/2) dx.

    ``u`` is a CircleFunction in the variable x = theta - theta' or any object
    with ``__call__`` and optional ``support`` (half-width of the support
    around x = 0 mod pi) and ``band`` (largest Fourier mode) attributes.
    """
    tau = spec.tau
    if abs(tau.real) > 1e-14:
        raise ValueError("the transform is only defined here for tau on the imaginary axis")
    if support is None:
        support = getattr(u, "support", None)
    if support is None:
        support = np.pi / 2
    support = float(min(support, np.pi / 2))
    band = _band(u)
    if isinstance(u, CircleFunction) and band == 0.0 and not np.any(u.coeffs):
        return 0j
    e1, e2, e3 = spec.exponents
    width = min(support / 4, 1.0 / max(band, 1.0))
    ratio = round(_panel_ratio(e1, e1 + e2 + e3 + 1), 12)
    pts, wts = _outer_mesh(round(support, 15), round(width, 15), ratio, tail)
    x = np.concatenate([pts, np.pi - pts[::-1]])
    w = np.concatenate([wts, wts[::-1]])
    vals = np.asarray(u(x), dtype=complex)
    k = _cpow(np.sin(x), e1) * arc_average(x, spec, scheme)
    total = np.sum(w * vals * k)
    total += _end_pieces(u(np.array([0.0]))[0], u(np.array([np.pi]))[0], spec, tail)
    return complex(total / (2 * np.pi ** 2))


# ---------------------------------------------------------------- discrete series

def gamma_coefficient(k: int, n: int, convention: str = "literal") -> float:
    """Weight of the K-type n in the invariant form F_k (zero for |n| < k).

    "literal":   Gamma(k + |n|) / Gamma(|n| - k), computed with log-Gamma;
                 it vanishes at |n| = k through the pole of the denominator.
    "invariant": Gamma((|n| + k)/2) / Gamma((|n| - k)/2 + 1), the weights for
                 which F_k is invariant under the degree k - 2 action.
    """
    n = abs(int(n))
    if n < k:
        return 0.0
    if convention == "literal":
        if n == k:
            return 0.0
        return float(np.exp(special.gammaln(k + n) - special.gammaln(n - k)))
    if convention == "invariant":
        return float(np.exp(special.gammaln((n + k) / 2) - special.gammaln((n - k) / 2 + 1)))
    raise ValueError(f"unknown convention {convention!r}")


def invariant_form_Fk(f: CircleFunction, g: CircleFunction, k: int, convention: str = "literal") -> complex:
    """F_k(f, g) = sum_{|n| >= k} gamma(k, n) f_n conj(g_n)."""
    if int(k) != k or k < 2 or k % 2:
        raise ValueError("weight must be an even integer >= 2")
    size = max(f.size, g.size)
    a, b = f.resized(size).coeffs, g.resized(size).coeffs
    modes = f.resized(size).modes
    gam = np.array([gamma_coefficient(k, n, convention) for n in modes])
    return complex(np.sum(gam * a * np.conj(b)))


def discrete_pairing(u: CircleFunction, v: CircleFunction, k: int, tol: float = 1e-12) -> complex:
    """Bilinear pairing sum_n u_n v_-n = (1/pi) int u v of degrees k-2 and -k.

    v must lie in the image of the discrete series, i.e. have no Fourier modes
    with |n| < k.
    """
    if int(k) != k or k < 2 or k % 2:
        raise ValueError("weight must be an even integer >= 2")
    low = np.abs(v.modes) < k
    scale = max(np.max(np.abs(v.coeffs)), 1e-300)
    if np.any(np.abs(v.coeffs[low]) > tol * scale):
        raise ValueError("v has Fourier modes with |n| < k and is not a discrete-series vector")
    size = max(u.size, v.size)
    us, vs = u.resized(size).samples, v.resized(size).samples
    return complex(np.mean(us * vs))
