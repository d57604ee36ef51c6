"""Density of the limit law from its moments.

Moments -> three-term recurrence (Chebyshev algorithm, extended precision)
-> Gauss quadrature (Jacobi matrix eigenpairs) -> monotone cubic CDF -> density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.signal import find_peaks

from . import export
from .moments import m_sequence, moment_Lq

DEFAULT_ATOMS = 30
DEFAULT_PREC = 512


class NonPositiveBeta(ArithmeticError):
    """A recurrence coefficient ``beta_k <= 0``: the moments are invalid or the precision too low."""

    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"beta_{index} = {mpmath.nstr(value, 8)} is not positive")


class EigenNonConvergence(ArithmeticError):
    pass


@dataclass
class RecurrenceCoeffs:
    alpha: list  # alpha_0 .. alpha_{K-1}
    beta: list  # beta_0 = mu_0, beta_1 .. beta_{K-1}
    prec: int

    @property
    def K(self) -> int:
        return len(self.alpha)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "precision_bits": self.prec}


@dataclass
class QuadratureMeasure:
    atoms: list  # ascending, mpf
    weights: list
    prec: int

    @property
    def K(self) -> int:
        return len(self.atoms)

    def moment(self, k: int) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return mpmath.fsum(w * x**k for x, w in zip(self.atoms, self.weights))

    def as_float(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([float(x) for x in self.atoms]), np.array([float(w) for w in self.weights]))

    def to_csv(self, path):
        return export.write_csv(path, ["atom", "weight"], zip(self.atoms, self.weights))


@dataclass
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    integral: float
    min_value: float
    negative_mass: float
    clamped: bool = False

    def cdf(self) -> np.ndarray:
        inc = 0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid)
        return np.concatenate([[0.0], np.cumsum(inc)])

    def mode_count(self, prominence: float = 0.1) -> int:
        """Local maxima whose prominence exceeds ``prominence * max``."""
        peaks, _ = find_peaks(self.values, prominence=prominence * self.values.max())
        return int(peaks.size)

    def to_csv(self, path):
        return export.write_csv(path, ["x", "density"], zip(self.grid, self.values))


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def jacobi_from_moments(moments: Sequence, prec: int = DEFAULT_PREC, K: int | None = None,
                        rel_zero: float | None = None) -> RecurrenceCoeffs:
    """Recurrence coefficients of the measure with moments ``mu_0 .. mu_{2K-1}`` (Chebyshev algorithm).

    If some ``sigma_{k,k}`` vanishes to working accuracy the measure has only
    ``k`` support points and the coefficients are truncated there.  A clearly
    negative ``beta_k`` raises :class:`NonPositiveBeta`.
    """
    K = len(moments) // 2 if K is None else K
    if K < 1 or len(moments) < 2 * K:
        raise ValueError(f"need 2K = {2 * K} moments, got {len(moments)}")
    with mpmath.workprec(prec):
        mu = [_mp(x) for x in moments[: 2 * K]]
        if mu[0] <= 0:
            raise NonPositiveBeta(0, mu[0])
        tol = mpmath.mpf(2) ** (-(prec * 3) // 4) if rel_zero is None else mpmath.mpf(rel_zero)
        alpha = [mu[1] / mu[0]]
        beta = [mu[0]]
        prev = [mpmath.mpf(0)] * (2 * K)
        cur = list(mu)
        for k in range(1, K):
            nxt = [mpmath.mpf(0)] * (2 * K)
            for l in range(k, 2 * K - k):
                nxt[l] = cur[l + 1] - alpha[k - 1] * cur[l] - beta[k - 1] * prev[l]
            # size of sigma_{k,k} if no cancellation had occurred
            scale = abs(cur[k + 1]) + abs(alpha[k - 1] * cur[k]) + abs(beta[k - 1] * prev[k])
            if abs(nxt[k]) <= tol * scale:
                break
            b = nxt[k] / cur[k - 1]
            if b <= 0:
                raise NonPositiveBeta(k, b)
            alpha.append(nxt[k + 1] / nxt[k] - cur[k] / cur[k - 1])
            beta.append(b)
            prev, cur = cur, nxt
    return RecurrenceCoeffs(alpha, beta, prec)


def quadrature(coeffs: RecurrenceCoeffs) -> QuadratureMeasure:
    """Gauss quadrature from the symmetric tridiagonal Jacobi matrix."""
    K = coeffs.K
    with mpmath.workprec(coeffs.prec):
        if K == 1:
            return QuadratureMeasure([+coeffs.alpha[0]], [+coeffs.beta[0]], coeffs.prec)
        J = mpmath.zeros(K, K)
        for i in range(K):
            J[i, i] = coeffs.alpha[i]
        for i in range(1, K):
            J[i, i - 1] = J[i - 1, i] = mpmath.sqrt(coeffs.beta[i])
        try:
            E, Q = mpmath.eigsy(J)
        except (ValueError, RuntimeError) as exc:  # mpmath raises on its iteration cap
            raise EigenNonConvergence(str(exc)) from exc
        pairs = sorted((E[i], coeffs.beta[0] * Q[0, i] ** 2) for i in range(K))
    return QuadratureMeasure([x for x, _ in pairs], [w for _, w in pairs], coeffs.prec)


def limit_moments(a, q, count: int, prec: int = DEFAULT_PREC) -> list:
    """``E[L_q^k]`` for ``k = 0 .. count-1`` at ``prec`` bits."""
    table = m_sequence(a, count - 1, prec)
    return [moment_Lq(table, q, k) for k in range(count)]


def limit_quadrature(a, q, K: int = DEFAULT_ATOMS, prec: int = DEFAULT_PREC) -> QuadratureMeasure:
    return quadrature(jacobi_from_moments(limit_moments(a, q, 2 * K, prec), prec))


def default_grid(measure: QuadratureMeasure, points: int = 801, pad: float = 1.0) -> np.ndarray:
    x, _ = measure.as_float()
    span = x[-1] - x[0]
    return np.linspace(x[0] - pad * span / max(measure.K - 1, 1), x[-1] + pad * span / max(measure.K - 1, 1), points)


def smooth_density(measure: QuadratureMeasure, grid: Sequence[float] | None = None,
                   clamp: bool = False) -> DensityCurve:
    """Differentiate a monotone cubic interpolant of the quadrature CDF.

    The CDF of the atomic measure jumps by ``w_i`` at ``x_i``; it is sampled
    halfway between consecutive atoms, where it equals ``w_1 + ... + w_i``,
    and pinned to 0 and 1 half a spacing outside the extreme atoms.
    """
    if measure.K < 4:
        raise ValueError(f"need at least 4 atoms, got {measure.K}")
    x, w = measure.as_float()
    w = w / w.sum()
    lo = x[0] - (x[1] - x[0]) / 2
    hi = x[-1] + (x[-1] - x[-2]) / 2
    knots = np.concatenate([[lo], (x[1:] + x[:-1]) / 2, [hi]])
    vals = np.concatenate([[0.0], np.cumsum(w)[:-1], [1.0]])
    deriv = PchipInterpolator(knots, vals).derivative()
    g = default_grid(measure) if grid is None else np.asarray(grid, dtype=float)
    f = np.where((g >= lo) & (g <= hi), deriv(np.clip(g, lo, hi)), 0.0)
    neg = float(-np.trapezoid(np.minimum(f, 0.0), g)) if g.size > 1 else 0.0
    fmin = float(f.min())
    if clamp:
        f = np.maximum(f, 0.0)
        total = np.trapezoid(f, g)
        if total > 0:
            f = f / total
    return DensityCurve(g, f, float(np.trapezoid(f, g)), fmin, neg, clamp)


def sample_from_curve(curve: DensityCurve, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws from the piecewise-linear density on the curve grid."""
    F = curve.cdf()
    total = F[-1]
    u = rng.random(size) * total
    idx = np.clip(np.searchsorted(F, u, side="right") - 1, 0, len(F) - 2)
    g, f = curve.grid, curve.values
    h = g[idx + 1] - g[idx]
    f0, f1 = f[idx], f[idx + 1]
    target = u - F[idx]
    # solve f0 s + (f1 - f0) s^2 / (2h) = target for s in [0, h]
    A = (f1 - f0) / (2 * h)
    with np.errstate(divide="ignore", invalid="ignore"):
        s_lin = np.where(f0 > 0, target / f0, 0.0)
        disc = np.sqrt(np.maximum(f0 * f0 + 4 * A * target, 0.0))
        s_quad = np.where(np.abs(A) > 1e-14, (-f0 + disc) / (2 * A), s_lin)
    return g[idx] + np.clip(s_quad, 0.0, h)


def histogram_compare(samples: Sequence[float], curve: DensityCurve, bins: int | None = None) -> dict:
    """L1 and sup distance between a sample histogram and the bin-averaged curve, plus a KS statistic.

    Bins span the union of the sample range and the curve grid; the default
    count is Sturges' rule so that sampling noise stays small at a few hundred draws.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 100:
        raise ValueError("need at least 100 samples")
    nb = bins if bins is not None else int(math.ceil(math.log2(x.size))) + 1
    lo = min(x.min(), curve.grid[0])
    hi = max(x.max(), curve.grid[-1])
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, nb + 1)
    counts, _ = np.histogram(x, bins=edges)
    width = np.diff(edges)
    hist = counts / (x.size * width)
    Fc = curve.cdf()
    Fe = np.interp(edges, curve.grid, Fc, left=0.0, right=Fc[-1])
    avg = np.diff(Fe) / width
    # KS: compare the empirical CDF with the curve CDF at the sample points
    xs = np.sort(x)
    Fx = np.interp(xs, curve.grid, Fc, left=0.0, right=Fc[-1])
    k = np.arange(1, xs.size + 1) / xs.size
    ks = float(max(np.max(np.abs(k - Fx)), np.max(np.abs(k - 1 / xs.size - Fx))))
    return {
        "l1": float(np.sum(np.abs(hist - avg) * width)),
        "sup": float(np.max(np.abs(hist - avg))),
        "ks": ks,
        "bins": nb,
    }
