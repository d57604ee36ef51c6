"""Moment recursion for the superdiffusive limit and the bounds built on it.

For exponent ``a`` in ``(1/2, 1]`` the sequence

    m_1 = 1,   m_k = (k a - c_k)^{-1} * sum_{j=1}^{k-1} c_j m_j m_{k-j},

with ``c_k = 1`` for even ``k`` and ``c_k = a`` for odd ``k``, gives the moments
of ``L_1`` (limit with first step ``+1``) as ``mu_k = k! m_k / Gamma(k a + 1)``.
The ``m_k`` are rational in ``a``; Gamma is evaluated with mpmath at the
table's working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import export
from .exact_linalg import exact_det

DEFAULT_PREC = 256


def to_mpf(x) -> mpmath.mpf:
    """``mpf`` at the current precision; accepts ``Fraction`` exactly."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _check_exponent(a) -> None:
    if not (2 * a > 1 and a <= 1):
        raise ValueError(f"the moment recursion needs a in (1/2, 1], got {a}")


def parity_constant(a, k: int):
    return 1 if k % 2 == 0 else a


@dataclass
class MomentTable:
    a: object  # Fraction or mpf
    K: int
    m: list  # m[0] = 1, m[1] = 1, ..., m[K]
    prec: int
    exact: bool
    _mu: list = field(default_factory=list, repr=False)

    def c(self, k: int):
        return parity_constant(self.a, k)

    def m_mp(self, k: int) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            x = self.m[k]
            return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else +x

    def a_mp(self) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            a = self.a
            return to_mpf(a)

    @property
    def mu(self) -> list:
        """``mu[k] = E[L_1^k]`` for ``k = 0..K``, as mpf."""
        if len(self._mu) != self.K + 1:
            with mpmath.workprec(self.prec):
                a = self.a_mp()
                self._mu = [mpmath.factorial(k) * self.m_mp(k) / mpmath.gamma(k * a + 1)
                            for k in range(self.K + 1)]
        return self._mu

    def to_rows(self):
        for k in range(1, self.K + 1):
            mk = self.m[k]
            if self.exact:
                yield [k, mk.numerator, mk.denominator, self.m_mp(k), self.mu[k]]
            else:
                yield [k, "", "", mk, self.mu[k]]

    def to_csv(self, path):
        return export.write_csv(path, ["k", "m_numerator", "m_denominator", "m", "mu"], self.to_rows())

    def to_json(self, path):
        return export.write_json(path, {
            "a": self.a, "K": self.K, "exact": self.exact, "precision_bits": self.prec,
            "m": self.m[1:], "mu": self.mu[1:],
        })


def m_sequence(a, K: int, prec: int = DEFAULT_PREC) -> MomentTable:
    """Run the recursion to order ``K``; exact when ``a`` is an int or Fraction."""
    if K < 1:
        raise ValueError("K must be at least 1")
    exact = isinstance(a, (int, Fraction)) and not isinstance(a, bool)
    if exact:
        a = Fraction(a)
        _check_exponent(a)
        m = [Fraction(1), Fraction(1)]
        for k in range(2, K + 1):
            s = sum((parity_constant(a, j) * m[j] * m[k - j] for j in range(1, k)), Fraction(0))
            m.append(s / (k * a - parity_constant(a, k)))
        return MomentTable(a, K, m, prec, True)
    with mpmath.workprec(prec):
        a = to_mpf(a)
        _check_exponent(a)
        one = mpmath.mpf(1)
        m = [one, one]
        for k in range(2, K + 1):
            s = mpmath.fsum(parity_constant(a, j) * m[j] * m[k - j] for j in range(1, k))
            m.append(s / (k * a - parity_constant(a, k)))
    return MomentTable(a, K, m, prec, False)


def closed_form_m(a, k: int):
    """Closed forms of ``m_2, m_3, m_4`` (and ``m_1 = 1``)."""
    a = Fraction(a) if isinstance(a, (int, Fraction)) else a
    forms = {
        1: lambda: 1 + 0 * a,
        2: lambda: a / (2 * a - 1),
        3: lambda: (a + 1) / (2 * (2 * a - 1)),
        4: lambda: a * (2 * a**2 + 2 * a - 1) / ((4 * a - 1) * (2 * a - 1) ** 2),
    }
    if k not in forms:
        raise ValueError("closed forms exist for k <= 4 only")
    return forms[k]()


def moment_L1(table: MomentTable, k: int) -> mpmath.mpf:
    """``E[L_1^k] = k! m_k / Gamma(k a + 1)`` at the table precision."""
    if not 0 <= k <= table.K:
        raise ValueError(f"order {k} outside the table (K={table.K})")
    return table.mu[k]


def moment_Lq(table: MomentTable, q, k: int) -> mpmath.mpf:
    """``E[L_q^k] = (q + (-1)^k (1 - q)) E[L_1^k]`` where ``q = P(first step = +1)``."""
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    with mpmath.workprec(table.prec):
        qq = to_mpf(q)
        return (qq + (-1) ** k * (1 - qq)) * moment_L1(table, k)


def envelope_constant(table: MomentTable, second_moment=None) -> mpmath.mpf:
    """``C = Gamma(a + 1) sqrt(E W^2)``; ``E W^2`` defaults to ``E[L_1^2]``."""
    with mpmath.workprec(table.prec):
        s2 = moment_L1(table, 2) if second_moment is None else to_mpf(second_moment)
        return mpmath.gamma(table.a_mp() + 1) * mpmath.sqrt(s2)


def envelope(table: MomentTable, k: int, C=None) -> mpmath.mpf:
    """Right side ``C^k (2/a)^(k-1) / Gamma(k a + 1)`` of the moment envelope."""
    with mpmath.workprec(table.prec):
        C = envelope_constant(table) if C is None else to_mpf(C)
        a = table.a_mp()
        return C**k * (2 / a) ** (k - 1) / mpmath.gamma(k * a + 1)


@dataclass
class MGFValue:
    value: mpmath.mpf
    tail_bound: mpmath.mpf  # inf when the envelope series has not started to converge
    terms: int

    @property
    def converged(self) -> bool:
        return mpmath.isfinite(self.tail_bound)


def mgf_L1(table: MomentTable, t, terms: int | None = None) -> MGFValue:
    """Partial sum of ``E[exp(t L_1)] = sum_k m_k t^k / Gamma(k a + 1)`` with a rigorous tail bound.

    Term ``k`` is bounded by ``|t|^k C^k (2/a)^(k-1) / Gamma(k a + 1)``.  The ratio of
    consecutive envelope terms decreases in ``k`` (log-convexity of Gamma), so once
    it drops below 1 the remaining tail is dominated by a geometric series.
    """
    terms = table.K if terms is None else terms
    if not 0 <= terms <= table.K:
        raise ValueError(f"terms must lie in [0, K={table.K}]")
    with mpmath.workprec(table.prec):
        t = to_mpf(t)
        a = table.a_mp()
        val = mpmath.fsum(table.m_mp(k) * t**k / mpmath.gamma(k * a + 1) for k in range(terms + 1))
        C = envelope_constant(table)
        nxt = abs(t) ** (terms + 1) * envelope(table, terms + 1, C)
        ratio = abs(t) * C * (2 / a) * mpmath.gamma((terms + 1) * a + 1) / mpmath.gamma((terms + 2) * a + 1)
        tail = nxt / (1 - ratio) if ratio < 1 else mpmath.inf
        return MGFValue(val, tail, terms)


def mgf_Lq(table: MomentTable, q, t, terms: int | None = None) -> MGFValue:
    """MGF of ``L_q`` as the mixture ``q M(t) + (1 - q) M(-t)``."""
    plus, minus = mgf_L1(table, t, terms), mgf_L1(table, -t, terms)
    with mpmath.workprec(table.prec):
        q = to_mpf(q)
        return MGFValue(q * plus.value + (1 - q) * minus.value,
                        max(plus.tail_bound, minus.tail_bound), plus.terms)


@dataclass
class BoundCertificate:
    k: int
    left: float  # E|W|^k / k!
    right: float  # C^k (2/a)^(k-1) / Gamma(k a + 1)

    @property
    def holds(self) -> bool:
        return self.left <= self.right

    @property
    def margin(self) -> float:
        return self.right - self.left

    def to_dict(self) -> dict:
        return {"k": self.k, "left": self.left, "right": self.right, "holds": self.holds, "margin": self.margin}


def bound_check(a, K: int, mc_moments: Sequence[float], second_moment=None,
                prec: int = DEFAULT_PREC) -> list[BoundCertificate]:
    """Compare ``mc_moments[k-1] = E|W|^k`` (or ``E||Y||^k``) with the envelope for ``k = 1..K``.

    ``second_moment`` overrides ``E W^2`` inside ``C``; pass the vector second
    moment in dimension ``d >= 2``.
    """
    if len(mc_moments) < K:
        raise ValueError(f"need {K} absolute moments, got {len(mc_moments)}")
    table = m_sequence(a, 2, prec)
    C = envelope_constant(table, second_moment)
    out = []
    for k in range(1, K + 1):
        right = float(envelope(table, k, C))
        out.append(BoundCertificate(k, float(mc_moments[k - 1]) / math.factorial(k), right))
    return out


@dataclass
class CarlemanReport:
    terms: list  # (mu_{2k})^(-1/(2k)), k = 1..K
    partial_sums: list
    slope: float  # fitted exponent of terms against k

    def to_dict(self) -> dict:
        return {"terms": self.terms, "partial_sums": self.partial_sums, "slope": self.slope}


def carleman_diagnostic(table: MomentTable, K: int) -> CarlemanReport:
    """Partial sums of ``sum_k mu_{2k}^(-1/(2k))`` and the log-log slope over ``k in [K/2, K]``."""
    if K < 2:
        raise ValueError("K must be at least 2")
    if 2 * K > table.K:
        raise ValueError(f"need a table of order {2 * K}, have {table.K}")
    with mpmath.workprec(table.prec):
        terms = [float(table.mu[2 * k] ** (-mpmath.mpf(1) / (2 * k))) for k in range(1, K + 1)]
    sums = np.cumsum(terms).tolist()
    ks = np.arange(1, K + 1)
    sel = ks >= K // 2
    slope = float(np.polyfit(np.log(ks[sel]), np.log(np.asarray(terms)[sel]), 1)[0])
    return CarlemanReport(terms, sums, slope)


def hankel_signs(table: MomentTable, n: int | None = None) -> list[int]:
    """Signs of the Hankel determinants ``det[m_{i+j}]_{i,j<=r}`` for ``r = 0..n``.

    Exact for rational tables.  A moment sequence of a measure with infinite
    support would give all positive signs.
    """
    n = table.K // 2 if n is None else n
    if 2 * n > table.K:
        raise ValueError(f"need order {2 * n}, have {table.K}")
    signs = []
    for r in range(n + 1):
        if table.exact:
            det = exact_det([[table.m[i + j] for j in range(r + 1)] for i in range(r + 1)])
        else:
            with mpmath.workprec(table.prec):
                det = mpmath.det(mpmath.matrix([[table.m[i + j] for j in range(r + 1)] for i in range(r + 1)]))
        signs.append(int((det > 0) - (det < 0)))
    return signs


def square_mgf_ratios(table: MomentTable, t, K: int | None = None) -> list[float]:
    """Ratios ``term(k+1)/term(k)`` for ``sum_k |t|^k mu_{2k} / k!`` (MGF of ``L_1^2``)."""
    K = table.K // 2 if K is None else K
    if 2 * K > table.K:
        raise ValueError(f"need order {2 * K}, have {table.K}")
    with mpmath.workprec(table.prec):
        t = abs(to_mpf(t))
        terms = [t**k * table.mu[2 * k] / mpmath.factorial(k) for k in range(K + 1)]
        return [float(terms[k + 1] / terms[k]) for k in range(K)]
