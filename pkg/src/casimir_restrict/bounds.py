"""Synthetic spectral data, the short-window inequality chain, and restriction norms.

Nothing here touches genuine automorphic data.  Spectra are drawn so that
the two dyadic mean-square bounds

    sum_{A <= |tau_i| <= 2A} |beta(i)|^2  <= a A^2,
    sum_{A <= |tau_i| <= 2A} |alpha(i)|^2 <= b A^2      (A >= 1)

hold by construction and are then re-verified exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .matcoef import CUTOFF, REGULAR, RESONANCE, CoefficientTable, uniform_airy_model

WEYL_DENSITY = 1.0 / (4.0 * np.pi)
MODES = ("independent", "correlated")


class InfeasibleSpectrum(ValueError):
    """A dyadic mean-square block is violated."""

    def __init__(self, which: str, A: float, total: float, bound: float):
        super().__init__(f"{which} block [{A:.6g}, {2 * A:.6g}] sums to {total:.6g} > {bound:.6g}")
        self.which, self.A, self.total, self.bound = which, A, total, bound


class ChainStepViolation(RuntimeError):
    """An intermediate inequality of the chain failed numerically."""

    def __init__(self, step: str, lhs: float, rhs: float):
        super().__init__(f"step {step}: {lhs:.12g} > {rhs:.12g}")
        self.step, self.lhs, self.rhs = step, lhs, rhs


class TableRangeError(ValueError):
    """A coefficient table stops before |d| has decayed below the threshold."""

    def __init__(self, n: int, k_max: int, required: int):
        super().__init__(f"table for n={n} stops at k_max={k_max}; need k_max >= {required}")
        self.n, self.k_max, self.required = n, k_max, required


# ---------------------------------------------------------------- spectra

@dataclass
class SyntheticSpectrum:
    taus: np.ndarray     # purely imaginary
    alphas: np.ndarray
    betas: np.ndarray
    height: float
    density: float
    a: float
    b: float
    seed: int
    mode: str = "independent"

    @property
    def gammas(self) -> np.ndarray:
        return self.alphas * self.betas

    def __len__(self):
        return len(self.taus)

    def block_sums(self, values: np.ndarray):
        """(A, sum over A <= |tau| <= 2A of |values|^2 / A^2) at every A where the ratio can peak."""
        t = np.abs(self.taus)
        w = np.abs(values) ** 2
        cand = np.unique(np.concatenate([t, t / 2, [1.0]]))
        cand = cand[cand >= 1.0]
        order = np.argsort(t)
        ts, cw = t[order], np.concatenate([[0.0], np.cumsum(w[order])])
        lo = np.searchsorted(ts, cand, side="left")
        hi = np.searchsorted(ts, 2 * cand, side="right")
        return cand, cw[hi] - cw[lo]

    def verify(self):
        """Raise InfeasibleSpectrum on the first violated dyadic block."""
        for which, values, const in (("beta", self.betas, self.a), ("alpha", self.alphas, self.b)):
            A, sums = self.block_sums(values)
            bad = np.nonzero(sums > const * A ** 2)[0]
            if bad.size:
                i = bad[0]
                raise InfeasibleSpectrum(which, float(A[i]), float(sums[i]), float(const * A[i] ** 2))

    def to_json(self) -> str:
        return json.dumps({
            "taus_imag": [float(t.imag) for t in self.taus],
            "alphas": [[float(z.real), float(z.imag)] for z in self.alphas],
            "betas": [[float(z.real), float(z.imag)] for z in self.betas],
            "height": self.height, "density": self.density, "a": self.a, "b": self.b,
            "seed": self.seed, "mode": self.mode,
        }, sort_keys=True)


def generate_spectrum(height: float = 200.0, density: float = WEYL_DENSITY, a: float = 1.0,
                      b: float = 1.0, seed: int = 0, level: float = 0.4,
                      mode: str = "independent") -> SyntheticSpectrum:
    """Seeded spectrum with counting function floor(density A^2) below height A.

    tau_j = i sqrt((j + 1 + U_j) / density) with U_j uniform in [0, 1), so at
    most density*A^2 points lie below A.  A dyadic block [A, 2A] then holds
    at most 3 density A^2 + 1 points; each |beta|^2 is level a / (3 density)
    times a uniform factor in [0.5, 1.5] (likewise alpha with b), which keeps
    every block under its bound for level <= 0.5.  "correlated" mode ties the
    phases and the magnitude profile of alpha and beta together.
    """
    for name, val in (("density", density), ("a", a), ("b", b), ("level", level)):
        if not val > 0:
            raise ValueError(f"{name} must be positive")
    if height < 0:
        raise ValueError("height must be nonnegative")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rng = np.random.default_rng(seed)
    count = max(int(np.floor(density * height ** 2)) - 1, 0)
    jitter = rng.random(count)
    t = np.sqrt((np.arange(count) + 1 + jitter) / density)
    keep = t <= height
    t, count = t[keep], int(keep.sum())
    shape_a = 0.5 + rng.random(count)
    phase_a = np.exp(2j * np.pi * rng.random(count))
    if mode == "independent":
        shape_b = 0.5 + rng.random(count)
        phase_b = np.exp(2j * np.pi * rng.random(count))
    else:
        shape_b, phase_b = shape_a, phase_a
    scale = level / (3 * density)
    alphas = np.sqrt(scale * b * shape_a) * phase_a
    betas = np.sqrt(scale * a * shape_b) * phase_b
    spec = SyntheticSpectrum(1j * t, alphas, betas, float(height), float(density), float(a),
                             float(b), int(seed), mode)
    spec.verify()
    return spec


# ---------------------------------------------------------------- coefficient sequences

@dataclass
class CoefficientSequence:
    """a_k on even k with |k| <= k_max, with its declared mean-value constant A."""

    values: np.ndarray   # index j <-> k = -k_max + 2 j
    k_max: int
    A: float
    descriptor: dict = field(default_factory=dict)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1, 2)

    def square(self, ks) -> np.ndarray:
        """|a_k|^2 for the requested even k (zero outside |k| <= k_max)."""
        ks = np.asarray(ks, dtype=int)
        if np.any(ks % 2):
            raise ValueError("a_k lives on even k")
        out = np.zeros(ks.shape)
        inside = np.abs(ks) <= self.k_max
        out[inside] = np.abs(self.values[(ks[inside] + self.k_max) // 2]) ** 2
        return out

    def __getitem__(self, k: int) -> complex:
        if k % 2 or abs(k) > self.k_max:
            return 0j
        return complex(self.values[(k + self.k_max) // 2])


def _even(k_max: int) -> int:
    k_max = int(k_max)
    return k_max - (k_max % 2)


def lindelof_sequence(k_max: int, seed: int = 0) -> CoefficientSequence:
    """|a_k| = 1 with random phases; sum_{|k|<=T} = 2 floor(T/2) + 1 <= 2T."""
    k_max = _even(k_max)
    rng = np.random.default_rng(seed)
    vals = np.exp(2j * np.pi * rng.random(k_max + 1))
    return CoefficientSequence(vals, k_max, 2.0, {"model": "lindelof", "seed": seed})


def heavy_tailed_sequence(k_max: int, seed: int = 0, A: float = 2.0, tail: float = 1.5) -> CoefficientSequence:
    """Pareto-distributed |a_k|^2 rescaled so max_T sum_{|k|<=T} |a_k|^2 / T equals A."""
    k_max = _even(k_max)
    rng = np.random.default_rng(seed)
    w = rng.pareto(tail, k_max + 1) + 1e-3
    ks = np.arange(-k_max, k_max + 1, 2)
    worst = _max_mean_ratio(ks, w)
    w *= A / worst
    vals = np.sqrt(w) * np.exp(2j * np.pi * rng.random(k_max + 1))
    return CoefficientSequence(vals, k_max, float(A), {"model": "heavy_tailed", "seed": seed, "tail": tail})


def zero_sequence(k_max: int) -> CoefficientSequence:
    k_max = _even(k_max)
    return CoefficientSequence(np.zeros(k_max + 1, dtype=complex), k_max, 0.0, {"model": "zero"})


def delta_sequence(k_max: int, k0: int) -> CoefficientSequence:
    """a_k = 1 at k = k0, zero elsewhere."""
    k_max = _even(k_max)
    if k0 % 2 or abs(k0) > k_max:
        raise ValueError("k0 must be even with |k0| <= k_max")
    vals = np.zeros(k_max + 1, dtype=complex)
    vals[(k0 + k_max) // 2] = 1.0
    return CoefficientSequence(vals, k_max, 1.0, {"model": "delta", "k0": int(k0)})


def _max_mean_ratio(ks, w) -> float:
    # sum_{|k|<=T} w / T is largest just as T reaches a new |k|
    order = np.argsort(np.abs(ks), kind="stable")
    absk, cw = np.abs(ks)[order], np.cumsum(w[order])
    last = np.r_[absk[1:] != absk[:-1], True]
    T = np.maximum(absk[last], 1)
    return float(np.max(cw[last] / T))


def check_mean_value(a: CoefficientSequence, T: float) -> tuple[bool, float]:
    """(sum_{|k|<=T} |a_k|^2 / T <= A, that ratio)."""
    if T < 1:
        raise ValueError("T must be at least 1")
    if T > a.k_max:
        raise ValueError(f"sequence stops at k_max={a.k_max} < T={T}")
    ks = a.ks
    ratio = float(np.sum(a.square(ks[np.abs(ks) <= T])) / T)
    return ratio <= a.A, ratio


def short_sum(a: CoefficientSequence, T: float, width: float | None = None) -> float:
    """sum over ||k| - T| <= width of |a_k|^2; width defaults to T^(2/3)."""
    if T < 1:
        raise ValueError("T must be at least 1")
    width = T ** (2 / 3) if width is None else float(width)
    if T + width > a.k_max:
        raise ValueError(f"sequence stops at k_max={a.k_max} < T + width")
    ks = a.ks
    return float(np.sum(a.square(ks[np.abs(np.abs(ks) - T) <= width])))


# ---------------------------------------------------------------- the chain

@dataclass
class ChainResult:
    N: int
    T: float
    eps: float
    alpha: float
    steps: dict          # step name -> value, in chain order
    constants: dict      # c_prime, C

    @property
    def bound(self) -> float:
        return self.steps["E4_closed_form"]

    def __float__(self):
        return float(self.bound)

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "T": self.T, "eps": self.eps, "alpha": self.alpha,
                           "steps": self.steps, "constants": self.constants}, sort_keys=True)


_DYADIC_K = 2 ** 1.5 / (2 ** 1.5 - 1)   # sum_{j<=J} 2^{3j/2} <= K 2^{3J/2}


def chain_bound(N: int, T: float, spectrum: SyntheticSpectrum, lemma_report, eps: float = 0.1,
                rtol: float = 1e-12) -> ChainResult:
    """Evaluate every line of the window chain with concrete data.

    E0  alpha T + sum |gamma_i| alpha env(tau_i)          (window properties (1), (4), (5))
    E1  envelope split into the |tau| <= N/T part and the full sum
    E2  |alpha beta| replaced by |alpha|^2 + |beta|^2
    E3  dyadic blocks [2^j, 2^(j+1)] bounded by (a + b) 4^j; empty blocks give 0
    E4  c' T + C T^(-1/2-eps) N^(1+eps)

    Each Ei <= E(i+1) is asserted (relative slack ``rtol``); a failure raises
    ChainStepViolation naming the step.  Points with |tau| < 1 (outside the
    range of the dyadic bounds) are carried exactly through E3 and E4.
    """
    if not N >= T >= 1:
        raise ValueError("need N >= T >= 1")
    alpha = float(getattr(lemma_report, "alpha", lemma_report))
    props = getattr(lemma_report, "properties", {})
    for key, prop in props.items():
        if not prop.get("pass", True):
            raise ChainStepViolation(f"window {key}", 1.0, 0.0)
    split = N / T
    t = np.abs(spectrum.taus)
    al2, be2 = np.abs(spectrum.alphas) ** 2, np.abs(spectrum.betas) ** 2
    gam = np.abs(spectrum.gammas)
    small = t <= split
    wsmall = T * N ** -0.5 * (1 + t) ** -0.5
    wall = T * (1 + t) ** -2.5
    env = np.where(small, wsmall + wall, wall)

    E0 = alpha * T + alpha * np.sum(gam * env)
    E1 = alpha * T + alpha * np.sum(wsmall[small] * gam[small]) + alpha * np.sum(wall * gam)
    mass = al2 + be2
    E2 = alpha * T + alpha * np.sum(wsmall[small] * mass[small]) + alpha * np.sum(wall * mass)

    low = t < 1
    ab = spectrum.a + spectrum.b
    high = t[~low]
    js = np.unique(np.floor(np.log2(high)).astype(int)) if high.size else np.array([], dtype=int)
    A = 2.0 ** js
    block_small = A <= split
    low_small = alpha * np.sum(wsmall[low & small] * mass[low & small])
    low_all = alpha * np.sum(wall[low] * mass[low])
    E3 = (alpha * T + low_small + low_all
          + alpha * T * N ** -0.5 * np.sum((1 + A[block_small]) ** -0.5 * ab * A[block_small] ** 2)
          + alpha * T * np.sum((1 + A) ** -2.5 * ab * A ** 2))

    # closed form: blocks with A <= N/T contribute at most K (a+b) (N/T)^(3/2+eps)
    D = float(np.sum((1 + A) ** -2.5 * ab * A ** 2))
    low_mass = float(np.sum(mass[low]))
    c_prime = alpha * (1 + D + 2 * low_mass)
    C = alpha * ab * _DYADIC_K if block_small.any() else 0.0
    E4 = c_prime * T + C * T ** (-0.5 - eps) * N ** (1 + eps)

    steps = {"E0_envelopes": float(E0), "E1_split": float(E1), "E2_cauchy_schwarz": float(E2),
             "E3_dyadic": float(E3), "E4_closed_form": float(E4)}
    names = list(steps)
    for lo_name, hi_name in zip(names, names[1:]):
        lhs, rhs = steps[lo_name], steps[hi_name]
        if lhs > rhs * (1 + rtol):
            raise ChainStepViolation(f"{lo_name} <= {hi_name}", lhs, rhs)
    return ChainResult(int(N), float(T), float(eps), alpha, steps, {"c_prime": c_prime, "C": C})


# ---------------------------------------------------------------- restriction norms

def required_k_max(n: int, table: CoefficientTable, threshold: float = 1e-12) -> int:
    """Smallest even k past which the uniform Airy model of |d_k(e_n)| stays below threshold."""
    M = table.M
    k = int(np.ceil(M * abs(n)))
    k += k % 2
    try:
        while abs(uniform_airy_model(k, abs(n), table.rep, table.g)) >= threshold:
            k += max(2, 2 * int(0.01 * M * abs(n)))
        return k
    except ValueError:
        return 2 * int(table.ks[-1])


def assemble_restriction_norm(n: int, a: CoefficientSequence, table: CoefficientTable,
                              threshold: float = 1e-12) -> tuple[float, dict]:
    """sum_k |a_k|^2 |d_k(e_n)|^2 and its split by regime."""
    if n not in set(int(v) for v in table.ns):
        raise ValueError(f"n={n} is not a row of the table")
    row = table.row(n)
    edge = max(abs(row[0]), abs(row[-1]))
    k_max = int(table.ks[-1])
    if edge > threshold:
        raise TableRangeError(n, k_max, max(required_k_max(n, table, threshold), k_max + 2))
    if a.k_max < k_max:
        raise ValueError(f"coefficient sequence stops at {a.k_max} < table k_max {k_max}")
    i = int(np.flatnonzero(table.ns == n)[0])
    terms = a.square(table.ks) * np.abs(row) ** 2
    labels = table.regimes[i]
    per = {name: float(np.sum(terms[labels == name])) for name in (REGULAR, RESONANCE, CUTOFF)}
    total = float(per[REGULAR] + per[RESONANCE] + per[CUTOFF])
    return total, per


def fit_growth_exponent(pairs) -> tuple[float, float]:
    """Log-log least-squares slope of value against n, with its standard error."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ValueError("need at least three points")
    n = np.array([p[0] for p in pairs], dtype=float)
    v = np.array([p[1] for p in pairs], dtype=float)
    if np.any(v <= 0) or np.any(n <= 0):
        raise ValueError("values and n must be positive")
    fit = stats.linregress(np.log(n), np.log(v))
    return float(fit.slope), float(fit.stderr)
