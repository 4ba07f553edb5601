"""Principal series representations realized on even functions of the circle.

A function on the projective circle is a function of theta in [0, pi).  Its
Fourier modes are e_n(theta) = exp(i n theta) with n even, and the inner product
is the average (1/pi) int_0^pi u conj(v) dtheta, so the e_n are orthonormal.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .mobius import GroupElement, circle_map

DEFAULT_GRID = 2 ** 12
SERIES = ("principal", "complementary", "discrete")


@dataclass(frozen=True)
class RepParameter:
    """Spectral data of an irreducible representation.

    ``lam`` is the induction parameter (imaginary for the principal series,
    real in (0, 1) for the complementary series) and ``eps`` the parity of the
    determinant character.  Discrete series are labelled by an even ``weight``.
    """

    series: str
    lam: complex = 0j
    eps: int = 0
    weight: int | None = None

    def __post_init__(self):
        if self.series not in SERIES:
            raise ValueError(f"unknown series {self.series!r}")
        if self.eps not in (0, 1):
            raise ValueError("parity eps must be 0 or 1")
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        if self.series == "principal":
            if abs(lam.real) > 1e-14:
                raise ValueError("principal series needs purely imaginary lambda")
            object.__setattr__(self, "lam", complex(0.0, lam.imag))
        elif self.series == "complementary":
            if abs(lam.imag) > 1e-14 or not 0.0 < lam.real < 1.0:
                raise ValueError("complementary series needs real lambda in (0, 1)")
        else:
            k = self.weight
            if k is None or int(k) != k or k < 2 or k % 2:
                raise ValueError("discrete series weight must be an even integer >= 2")
            object.__setattr__(self, "weight", int(k))

    @classmethod
    def principal(cls, lam_imag: float, eps: int = 0) -> "RepParameter":
        return cls("principal", complex(0.0, lam_imag), eps)

    @classmethod
    def discrete(cls, weight: int) -> "RepParameter":
        return cls("discrete", 0j, 0, weight)

    @property
    def casimir(self) -> complex:
        if self.series == "discrete":
            k = self.weight
            return (k / 2) * (1 - k / 2)
        return (1 - self.lam ** 2) / 4


def _check_grid(size: int) -> int:
    size = int(size)
    if size < 2 or size & (size - 1):
        raise ValueError(f"grid size must be a power of two, got {size}")
    return size


def grid(size: int = DEFAULT_GRID) -> np.ndarray:
    size = _check_grid(size)
    return np.arange(size) * (np.pi / size)


def grid_modes(size: int) -> np.ndarray:
    """Even modes carried by a grid of the given size, in FFT order."""
    size = _check_grid(size)
    return np.rint(2 * np.fft.fftfreq(size) * size).astype(np.int64)


class CircleFunction:
    """An even function on the circle, stored as samples or Fourier coefficients.

    Exactly one representation is supplied at construction; the other is
    computed on first use and cached.  Instances should be treated as immutable.
    """

    def __init__(self, samples=None, coeffs=None):
        if (samples is None) == (coeffs is None):
            raise ValueError("give exactly one of samples or coeffs")
        data = samples if samples is not None else coeffs
        arr = np.array(data, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError("expected a one-dimensional array")
        self.size = _check_grid(arr.shape[0])
        arr.setflags(write=False)
        self._samples = arr if samples is not None else None
        self._coeffs = arr if coeffs is not None else None

    @functools.cached_property
    def samples(self) -> np.ndarray:
        if self._samples is not None:
            return self._samples
        out = np.fft.ifft(self._coeffs) * self.size
        out.setflags(write=False)
        return out

    @functools.cached_property
    def coeffs(self) -> np.ndarray:
        """Fourier coefficients in FFT order; mode of entry j is grid_modes(size)[j]."""
        if self._coeffs is not None:
            return self._coeffs
        out = np.fft.fft(self._samples) / self.size
        out.setflags(write=False)
        return out

    @property
    def modes(self) -> np.ndarray:
        return grid_modes(self.size)

    @property
    def theta(self) -> np.ndarray:
        return grid(self.size)

    def coeff(self, n: int) -> complex:
        n = int(n)
        if n % 2:
            return 0j
        if not -self.size <= n < self.size:
            return 0j
        return complex(self.coeffs[(n // 2) % self.size])

    def __call__(self, theta) -> np.ndarray:
        """Evaluate the trigonometric series at arbitrary angles."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        c = self.coeffs
        keep = np.abs(c) > 0
        return _kernels.trig_series(self.modes[keep], c[keep], theta.ravel()).reshape(theta.shape)

    def resized(self, size: int) -> "CircleFunction":
        """Zero-pad or truncate in Fourier space."""
        size = _check_grid(size)
        if size == self.size:
            return self
        out = np.zeros(size, dtype=np.complex128)
        for n, c in zip(self.modes, self.coeffs):
            if -size <= n < size:
                out[(n // 2) % size] = c
        return CircleFunction(coeffs=out)

    def __add__(self, other: "CircleFunction") -> "CircleFunction":
        size = max(self.size, other.size)
        return CircleFunction(coeffs=self.resized(size).coeffs + other.resized(size).coeffs)

    def __mul__(self, scalar) -> "CircleFunction":
        return CircleFunction(coeffs=complex(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __repr__(self):
        return f"CircleFunction(size={self.size})"


def ktype(n: int, size: int = DEFAULT_GRID) -> CircleFunction:
    """The unit vector e_n(theta) = exp(i n theta)."""
    if int(n) != n or n % 2:
        raise ValueError(f"K-types of the even model have even index, got {n}")
    size = _check_grid(size)
    if not -size <= n < size:
        raise ValueError(f"mode {n} does not fit on a grid of size {size}")
    c = np.zeros(size, dtype=np.complex128)
    c[(int(n) // 2) % size] = 1.0
    return CircleFunction(coeffs=c)


def fourier(u: CircleFunction) -> dict[int, complex]:
    """Nonzero Fourier coefficients keyed by (even) mode."""
    return {int(n): complex(c) for n, c in zip(u.modes, u.coeffs) if c != 0}


def synthesize(coeffs: Mapping[int, complex], size: int = DEFAULT_GRID) -> CircleFunction:
    size = _check_grid(size)
    out = np.zeros(size, dtype=np.complex128)
    for n, c in coeffs.items():
        n = int(n)
        if n % 2:
            raise ValueError(f"odd mode {n} in an even function")
        if not -size <= n < size:
            raise ValueError(f"mode {n} does not fit on a grid of size {size}")
        out[(n // 2) % size] = c
    return CircleFunction(coeffs=out)


def from_callable(f, size: int = DEFAULT_GRID) -> CircleFunction:
    return CircleFunction(samples=f(grid(size)))


def inner(u: CircleFunction, v: CircleFunction) -> complex:
    """(1/pi) int_0^pi u conj(v), by the trapezoid rule on the common grid."""
    size = max(u.size, v.size)
    us, vs = u.resized(size).samples, v.resized(size).samples
    return complex(np.mean(us * np.conj(vs)))


def norm(u: CircleFunction) -> float:
    return float(np.sqrt(max(inner(u, u).real, 0.0)))


def apply_homogeneous(g: GroupElement, degree: complex, parity: int, u: CircleFunction,
                      size: int | None = None) -> CircleFunction:
    """Action on homogeneous functions of the given degree restricted to the circle.

    (g f)(v) = f(g^-1 v) * sign(det g)^parity, with f(t v) = |t|^degree f(v).
    On the circle this is jac^(-degree/2) * u(theta') * sign^parity.
    The result is sampled on a grid of ``size`` points (default: that of u).
    """
    size = u.size if size is None else _check_grid(size)
    theta = grid(size)
    theta_p, jac = circle_map(g, theta)
    vals = u(theta_p) * np.exp((-complex(degree) / 2) * np.log(jac))
    if parity % 2 and g.det_sign < 0:
        vals = -vals
    return CircleFunction(samples=vals)


def apply(g: GroupElement, p: RepParameter, u: CircleFunction,
          size: int | None = None) -> CircleFunction:
    """pi_{lam,eps}(g) u.

    Rotation by alpha sends e_n to exp(-i n alpha) e_n, and DELTA sends u to
    (-1)^eps u(-theta).  The image of a band-limited u is generally not
    band-limited; pass a larger ``size`` to resolve it.
    """
    if p.series == "discrete":
        raise ValueError("the discrete series has no circle model; use apply_homogeneous")
    return apply_homogeneous(g, p.lam - 1, p.eps, u, size)
