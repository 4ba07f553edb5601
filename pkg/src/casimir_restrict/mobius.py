"""Elements of PGL2(R) acting on the upper half plane and on the projective circle.

Circle angles live in [0, pi): the projective line is the circle of lines
through the origin, so theta and theta + pi are the same point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 real matrix modulo scalars, stored with |det| = 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not np.isfinite(det) or det == 0.0:
            raise ValueError("singular matrix does not define a group element")
        s = 1.0 / np.sqrt(abs(det))
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)) * s)

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det_sign(self) -> int:
        return 1 if self.a * self.d - self.b * self.c > 0 else -1

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "GroupElement":
        # adjugate; the constructor renormalizes
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def act(self, z: complex) -> complex:
        """Isometric action on the upper half plane (antiholomorphic when det < 0)."""
        z = complex(z)
        if self.det_sign < 0:
            z = z.conjugate()
        return (self.a * z + self.b) / (self.c * z + self.d)

    def allclose(self, other: "GroupElement", atol: float = 1e-10) -> bool:
        """Equality in PGL2: entries agree up to an overall sign."""
        m, n = self.matrix, other.matrix
        return bool(np.allclose(m, n, atol=atol, rtol=0) or np.allclose(m, -n, atol=atol, rtol=0))


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)
DELTA = GroupElement(-1.0, 0.0, 0.0, 1.0)


def rotation(alpha: float) -> GroupElement:
    """Rotation of the plane by alpha; acts on circle angles by a shift of alpha."""
    c, s = np.cos(alpha), np.sin(alpha)
    return GroupElement(c, -s, s, c)


def diagonal(r: float) -> GroupElement:
    """The element a(r) = diag(e^{r/2}, e^{-r/2}), moving i to e^r i."""
    return GroupElement(np.exp(r / 2), 0.0, 0.0, np.exp(-r / 2))


def circle_map(g: GroupElement, theta):
    """Angle map theta -> theta' and its Jacobian for the action f -> f(g^-1 .).

    theta' is the direction of g^-1 (cos theta, sin theta) reduced mod pi and
    jac = |d theta'/d theta| = |g^-1 (cos theta, sin theta)|^-2.  Accepts arrays.
    The maps compose contravariantly: circle_map(g h) = circle_map(h) o circle_map(g).
    """
    theta = np.asarray(theta, dtype=float)
    # g^-1 is the adjugate since |det g| = 1 (up to the sign, irrelevant projectively)
    x = g.d * np.cos(theta) - g.b * np.sin(theta)
    y = -g.c * np.cos(theta) + g.a * np.sin(theta)
    theta_p = np.mod(np.arctan2(y, x), np.pi)
    jac = 1.0 / (x * x + y * y)
    if theta_p.ndim == 0:
        return float(theta_p), float(jac)
    return theta_p, jac


def map_bound(g: GroupElement) -> float:
    """M = max_theta |d theta'/d theta|; the minimum is 1/M.

    With |det| = 1 the extreme stretch of g^-1 on unit vectors is its largest
    singular value s, and max jac = s^2.
    """
    s = np.linalg.svd(g.matrix, compute_uv=False)
    return float(max(s[0] / s[1], 1.0))


def hyperbolic_distance(z: complex, w: complex) -> float:
    z, w = complex(z), complex(w)
    if z.imag <= 0 or w.imag <= 0:
        raise ValueError("points must lie in the upper half plane")
    # arcsinh form stays accurate for nearby points, where arccosh(1 + x) cancels
    return float(2.0 * np.arcsinh(abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag))))


@dataclass(frozen=True)
class CartanFactors:
    """g = rotation(k1) a(r) rotation(k2) DELTA^[det_sign < 0], up to sign."""

    k1: float
    r: float
    k2: float
    det_sign: int

    def reconstruct(self) -> GroupElement:
        g = rotation(self.k1) @ diagonal(self.r) @ rotation(self.k2)
        return g @ DELTA if self.det_sign < 0 else g


def _angle(rot: np.ndarray) -> float:
    return float(np.mod(np.arctan2(rot[1, 0], rot[0, 0]), np.pi))


def cartan_decompose(g: GroupElement, tol: float = 1e-12) -> CartanFactors:
    """KAK decomposition; r equals hyperbolic_distance(i, g i).

    Angles are reduced mod pi.  At r = 0 the decomposition is not unique and
    the whole rotation is put into k1 with k2 = 0.
    """
    sign = g.det_sign
    h = g @ DELTA if sign < 0 else g
    u, s, vt = np.linalg.svd(h.matrix)
    if np.linalg.det(u) < 0:
        flip = np.diag([1.0, -1.0])
        u, vt = u @ flip, flip @ vt
    r = float(2.0 * np.log(s[0] / np.sqrt(s[0] * s[1])))
    if r < tol:
        # h is a rotation; normalize so it is exactly orthogonal
        return CartanFactors(_angle(h.matrix), 0.0, 0.0, sign)
    return CartanFactors(_angle(u), r, _angle(vt), sign)


def geodesic_circle_element(r: float) -> GroupElement:
    """The element a(r) with d(i, a(r) i) = r, used to conjugate the rotation group."""
    if not r > 0:
        raise ValueError("radius must be positive")
    return diagonal(r)
