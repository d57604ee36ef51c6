"""Mean replacement spectrum, the cyclic matrix K and Krylov-space support analysis.

For ``w`` in ``R^{2d-1}`` the Krylov space ``span{w, Kw, ..., K^{2d-2} w}`` loses one
dimension for every ``j in 1..2d-1`` with

    u_j = (1/2d) * sum_k w_k (eta^{jk} - 1) = 0,     eta = exp(i pi / d).

For rational ``w`` this is decided exactly: ``u_j = 0`` iff the cyclotomic
polynomial of the order of ``eta^j`` divides ``sum_k w_k x^k - sum_k w_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Sequence

import mpmath
import numpy as np
import sympy

from .exact_linalg import exact_det, exact_rank
from .walk import exponent

FLOAT_ZERO = 1e-20  # relative |u_j| below which a float input counts as an exact zero
FLOAT_BORDER = 1e-8  # relative |u_j| below which a float zero test is confirmed exactly
SVD_GAP = 1e3


class AmbiguousRank(ArithmeticError):
    """The singular values of a floating-point Krylov block show no clear gap."""


class UnclassifiedDimension(ValueError):
    """Support classes are only enumerated for d = 2 and d = 3."""


@dataclass
class SpectrumReport:
    d: int
    p: float
    a: float
    eigenvalues: np.ndarray  # ascending
    expected: np.ndarray  # {a x (2d-1), 1}, ascending
    eigenvectors: np.ndarray  # columns v_1 .. v_2d
    residual: float  # max |E[A] v_i - lambda_i v_i|

    def to_dict(self) -> dict:
        return {"d": self.d, "p": self.p, "a": self.a, "eigenvalues": self.eigenvalues,
                "expected": self.expected, "residual": self.residual}


def mean_replacement(d: int, p) -> np.ndarray:
    n = 2 * d
    p = float(p)
    return p * np.eye(n) + (1 - p) / (n - 1) * (np.ones((n, n)) - np.eye(n))


def mean_replacement_spectrum(d: int, p) -> SpectrumReport:
    """Eigenvalues of ``E[A]`` with the eigenvectors ``v_1 = (1/2d) sum e_i`` and ``v_i = (e_1 - e_i)/2``."""
    if d < 1:
        raise ValueError("d must be positive")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    n = 2 * d
    A = mean_replacement(d, p)
    a = float(exponent(d, p))
    V = np.zeros((n, n))
    V[:, 0] = 1.0 / n
    for i in range(1, n):
        V[0, i] = 0.5
        V[i, i] = -0.5
    lam = np.array([1.0] + [a] * (n - 1))
    residual = float(np.max(np.abs(A @ V - V * lam)))
    if residual > 1e-12:
        raise ArithmeticError(f"eigenvector residual {residual:.3g} exceeds 1e-12")
    return SpectrumReport(d, float(p), a, np.sort(np.linalg.eigvalsh(A)), np.sort(lam), V, residual)


@dataclass(frozen=True)
class CompanionK:
    d: int
    matrix: tuple  # rows of Python ints

    @property
    def size(self) -> int:
        return 2 * self.d - 1

    def power(self, k: int) -> list[list[int]]:
        return _int_power(self.matrix, k % (2 * self.d))

    def apply(self, w: Sequence) -> list:
        return [sum(r * x for r, x in zip(row, w)) for row in self.matrix]

    def eigenvalues(self) -> list[complex]:
        return [complex(np.exp(1j * np.pi * k / self.d)) for k in range(1, 2 * self.d)]


def _int_matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _int_power(M, k: int):
    n = len(M)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(k):
        out = _int_matmul(out, M)
    return out


def build_K(d: int) -> CompanionK:
    """First row all ``-1``, ones on the subdiagonal; checks ``K^{2d} = I`` and ``det(K - I) != 0`` exactly."""
    if d < 1:
        raise ValueError("d must be positive")
    m = 2 * d - 1
    rows = [[-1] * m] + [[int(j == i - 1) for j in range(m)] for i in range(1, m)]
    ident = [[int(i == j) for j in range(m)] for i in range(m)]
    if _int_power(rows, 2 * d) != ident:
        raise ArithmeticError("K^{2d} != I")
    if exact_det([[rows[i][j] - ident[i][j] for j in range(m)] for i in range(m)]) == 0:
        raise ArithmeticError("1 is an eigenvalue of K")
    return CompanionK(d, tuple(tuple(r) for r in rows))


def krylov_block(w: Sequence, d: int) -> list[list]:
    """Matrix with columns ``w, Kw, ..., K^{2d-2} w`` (as a list of rows)."""
    K = build_K(d)
    if len(w) != K.size:
        raise ValueError(f"w must have length {K.size}")
    cols = [list(w)]
    for _ in range(K.size - 1):
        cols.append(K.apply(cols[-1]))
    return [list(r) for r in zip(*cols)]


# --------------------------------------------------------------- u coordinates


def _eta(d: int):
    return mpmath.expjpi(mpmath.mpf(1) / d)


def u_coordinates(w: Sequence, d: int, prec: int = 128) -> list:
    """``u = P^{-1} w`` in extended precision; ``u[j-1]`` is ``u_j``."""
    m = 2 * d - 1
    if len(w) != m:
        raise ValueError(f"w must have length {m}")
    with mpmath.workprec(prec):
        wm = [_to_mpf(x) for x in w]
        eta = _eta(d)
        u = [mpmath.fsum(wk * (eta ** (j * k) - 1) for k, wk in enumerate(wm, start=1)) / (2 * d)
             for j in range(1, 2 * d)]
        scale = max((abs(x) for x in wm), default=mpmath.mpf(0)) or mpmath.mpf(1)
        tol = mpmath.mpf(2) ** (-(prec * 3) // 4) * scale * m
        for j in range(1, d):
            if abs(u[j - 1] - mpmath.conj(u[2 * d - j - 1])) > tol:
                raise ArithmeticError(f"u_{j} and u_{2 * d - j} are not conjugate")
    return u


def p_matrix(d: int, prec: int = 128):
    """Columns ``z_k = (eta^{-k}, ..., eta^{-(2d-1)k})``: eigenvectors of ``K``."""
    m = 2 * d - 1
    with mpmath.workprec(prec):
        eta = _eta(d)
        return mpmath.matrix([[eta ** (-(j * k)) for k in range(1, m + 1)] for j in range(1, m + 1)])


def p_inverse(d: int, prec: int = 128):
    """Rows ``(conj(z_k) - 1)^T / 2d``."""
    m = 2 * d - 1
    with mpmath.workprec(prec):
        eta = _eta(d)
        return mpmath.matrix([[(eta ** (j * k) - 1) / (2 * d) for j in range(1, m + 1)] for k in range(1, m + 1)])


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@lru_cache(maxsize=None)
def _cyclotomic(order: int) -> tuple:
    """Coefficients of the cyclotomic polynomial, highest degree first."""
    x = sympy.Symbol("x")
    return tuple(int(c) for c in sympy.Poly(sympy.cyclotomic_poly(order, x), x).all_coeffs())


def _poly_rem(num: list, den: tuple) -> list:
    """Remainder of ``num / den`` (coefficients highest first, ``den`` monic)."""
    r = list(num)
    while len(r) >= len(den):
        lead = r[0]
        if lead:
            for i, c in enumerate(den):
                r[i] -= lead * c
        r.pop(0)
    return r


def u_zero_exact(w: Sequence, d: int, j: int) -> bool:
    """``u_j == 0`` for rational ``w``, decided by cyclotomic divisibility."""
    w = [Fraction(x) for x in w]
    order = 2 * d // math.gcd(j, 2 * d)
    # sum_k w_k x^k - sum_k w_k, highest degree first
    coeffs = list(reversed(w)) + [-sum(w)]
    return not any(_poly_rem(coeffs, _cyclotomic(order)))


def _is_rational_vector(w: Sequence) -> bool:
    return all(isinstance(x, (Rational, np.integer)) and not isinstance(x, bool) for x in w)


def zero_set(w: Sequence, d: int, prec: int = 128) -> tuple[frozenset, list]:
    """Indices ``j`` (1-based) with ``u_j = 0`` plus the u-coordinates themselves.

    Rational input is decided exactly.  For floats, a relative ``|u_j|`` below
    ``FLOAT_ZERO`` counts as zero; anything below ``FLOAT_BORDER`` is re-checked
    exactly on the binary value of the input.
    """
    u = u_coordinates(w, d, prec)
    if _is_rational_vector(w):
        zs = {j for j in range(1, 2 * d) if u_zero_exact(w, d, j)}
        return frozenset(zs), u
    scale = max(abs(float(x)) for x in w) or 1.0
    zs = set()
    for j in range(1, 2 * d):
        rel = float(abs(u[j - 1])) / scale
        if rel < FLOAT_BORDER:
            exact = u_zero_exact([Fraction(float(x)) for x in w], d, j)
            if exact or rel < FLOAT_ZERO:
                zs.add(j)
    return frozenset(zs), u


# --------------------------------------------------------------- rank and reports


@dataclass
class KrylovReport:
    w: list
    d: int
    u: list
    zeros: frozenset  # 1-based j with u_j = 0
    dimension: int  # (2d - 1) - |zeros|
    rank: int  # rank of the Krylov block (exact or SVD)
    method: str
    gap: float | None = None

    @property
    def consistent(self) -> bool:
        return self.dimension == self.rank

    def to_dict(self) -> dict:
        return {"w": self.w, "d": self.d, "u": self.u, "zero_set": sorted(self.zeros),
                "dimension": self.dimension, "rank": self.rank, "method": self.method, "gap": self.gap,
                "consistent": self.consistent}


def float_rank(block: Sequence[Sequence[float]]) -> tuple[int, float]:
    """Rank by SVD with the largest relative gap; raises :class:`AmbiguousRank` below ``SVD_GAP``."""
    M = np.asarray(block, dtype=float)
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0, math.inf
    floor = s[0] * max(M.shape) * np.finfo(float).eps
    padded = np.concatenate([s, [floor]])
    ratios = padded[:-1] / np.maximum(padded[1:], floor)
    r = int(np.argmax(ratios)) + 1
    gap = float(ratios[r - 1])
    if gap < SVD_GAP:
        raise AmbiguousRank(f"singular values {s} show no gap above {SVD_GAP:g}")
    return r, gap


def krylov_dimension(w: Sequence, d: int, prec: int = 128) -> KrylovReport:
    """Krylov dimension from the u-zero count, cross-checked against the block rank."""
    zs, u = zero_set(w, d, prec)
    block = krylov_block(w, d)
    if _is_rational_vector(w):
        rank, method, gap = exact_rank(block), "exact", None
    else:
        rank, gap = float_rank(block)
        method = "svd"
    return KrylovReport(list(w), d, u, zs, 2 * d - 1 - len(zs), rank, method, gap)


def det_d2_formula(w: Sequence) -> Fraction:
    x, y, z = (Fraction(v) for v in w)
    return (x + z) * ((x + y) ** 2 + (y + z) ** 2)


def det_krylov(w: Sequence, d: int) -> Fraction:
    return exact_det(krylov_block([Fraction(v) for v in w], d))


# Support classes keyed by the zero set of u (1-based indices).
SUPPORT_CLASSES = {
    2: {
        frozenset(): ("R^3", [[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
        frozenset({1, 3}): ("Span{f1-f2+f3}", [[1, -1, 1]]),
        frozenset({2}): ("Span{f2, f1-f3}", [[0, 1, 0], [1, 0, -1]]),
    },
    3: {
        frozenset({1, 2, 4, 5}): ("(i)", [[1, -1, 1, -1, 1]]),
        frozenset({1, 3, 5}): ("(ii)", [[0, 1, -1, 0, 1], [-1, 0, 1, -1, 0]]),
        frozenset({2, 3, 4}): ("(iii)", [[0, 1, 1, 0, -1], [-1, 0, 1, 1, 0]]),
        frozenset({1, 5}): ("(iv)", [[0, 0, 1, -2, 2], [-1, 0, 0, 1, -2], [2, -1, 0, 0, 1]]),
        frozenset({2, 4}): ("(v)", [[0, 0, 1, 0, 0], [-1, 0, 0, 1, 0], [0, -1, 0, 0, 1]]),
        frozenset({3}): ("(vi)", [[0, 1, 0, 0, 0], [-1, 0, 1, 0, 0], [0, -1, 0, 1, 0], [0, 0, -1, 0, 1]]),
        frozenset(): ("(vii)", [[int(i == j) for j in range(5)] for i in range(5)]),
    },
}


@dataclass
class SupportClass:
    d: int
    label: str
    spanning: list
    zeros: frozenset
    dimension: int

    def to_dict(self) -> dict:
        return {"d": self.d, "label": self.label, "spanning": self.spanning,
                "zero_set": sorted(self.zeros), "dimension": self.dimension}


def classify_support(w: Sequence, d: int, prec: int = 128) -> SupportClass:
    """Smallest support class (d = 2 or 3) compatible with ``w`` lying in the support."""
    if d not in SUPPORT_CLASSES:
        raise UnclassifiedDimension(f"no enumerated support classes for d={d}; use krylov_dimension")
    if not any(w):
        raise ValueError("w must be non-zero")
    zs, _ = zero_set(w, d, prec)
    label, span = SUPPORT_CLASSES[d][zs]
    return SupportClass(d, label, span, zs, 2 * d - 1 - len(zs))


@dataclass
class SupportEvidence:
    d: int
    samples: int
    full_fraction: float  # share of samples whose Krylov space is all of R^{2d-1}
    min_rel_u: list  # per j: smallest |u_j| / ||w|| over the samples
    median_rel_u: list
    mean: np.ndarray  # empirical mean of W
    mean_se: np.ndarray
    equal_means: bool  # all coordinates of E[W] agree within 4 SE

    def to_dict(self) -> dict:
        return {"d": self.d, "samples": self.samples, "full_fraction": self.full_fraction,
                "min_rel_u": self.min_rel_u, "median_rel_u": self.median_rel_u,
                "mean": self.mean, "mean_se": self.mean_se, "equal_means": self.equal_means}


def support_evidence_dimd(samples: np.ndarray, d: int, threshold: float = 1e-10) -> SupportEvidence:
    """Descriptive evidence about the support of ``W`` from sampled vectors (no verdict).

    A sample counts as full-dimensional when every ``|u_j| / ||w||`` exceeds
    ``threshold``.  The mean check looks for the equal-coordinate pattern that a
    lower-dimensional support would contradict.
    """
    W = np.asarray(samples, dtype=float)
    m = 2 * d - 1
    if W.ndim != 2 or W.shape[1] != m:
        raise ValueError(f"samples must have shape (N, {m})")
    k = np.arange(1, m + 1)
    eta = np.exp(1j * np.pi / d)
    Pinv = (eta ** np.outer(np.arange(1, 2 * d), k) - 1) / (2 * d)  # row j-1 gives u_j
    U = W @ Pinv.T
    norms = np.linalg.norm(W, axis=1)
    norms[norms == 0] = np.inf
    rel = np.abs(U) / norms[:, None]
    full = np.all(rel > threshold, axis=1)
    mean = W.mean(axis=0)
    se = W.std(axis=0, ddof=1) / math.sqrt(W.shape[0])
    spread = np.max(mean) - np.min(mean)
    equal = bool(spread <= 4 * math.sqrt(2) * np.max(se))
    return SupportEvidence(d, W.shape[0], float(full.mean()), rel.min(axis=0).tolist(),
                           np.median(rel, axis=0).tolist(), mean, se, equal)
