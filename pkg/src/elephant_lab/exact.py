"""Exact laws of the walk at small horizons by dynamic programming over rationals."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np

from . import export

MAX_N_1D = 25
MAX_N_COUNTS = 12
MAX_D_COUNTS = 2


def _rational(x, name: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise TypeError(f"{name} must be an int or Fraction in exact mode, got {type(x).__name__}")
    return Fraction(x)


def _rational_vector(q, length: int) -> tuple:
    if isinstance(q, (int, Fraction)) and not isinstance(q, bool):
        if length != 2:
            raise ValueError("a scalar q is only allowed for two colours")
        q = (q, 1 - Fraction(q))
    q = tuple(_rational(x, "q entry") for x in q)
    if len(q) != length:
        raise ValueError(f"q must have {length} entries")
    if any(x < 0 for x in q) or sum(q) != 1:
        raise ValueError("q must be a probability vector (exactly)")
    return q


@dataclass(frozen=True)
class ExactLaw:
    """Finite law with rational masses; ``pmf`` maps support points to probabilities."""

    pmf: dict

    def __post_init__(self):
        if any(v < 0 for v in self.pmf.values()):
            raise ValueError("negative probability")
        if sum(self.pmf.values()) != 1:
            raise ValueError("probabilities do not sum to 1")

    @property
    def support(self) -> list:
        return sorted(self.pmf)

    def prob(self, x) -> Fraction:
        return self.pmf.get(x, Fraction(0))

    def pushforward(self, f: Callable[[Hashable], Hashable]) -> "ExactLaw":
        out: dict = defaultdict(Fraction)
        for x, w in self.pmf.items():
            out[f(x)] += w
        return ExactLaw(dict(out))

    def expectation(self, f: Callable = lambda x: x) -> Fraction:
        return sum((w * f(x) for x, w in self.pmf.items()), Fraction(0))

    def rows(self):
        for x in self.support:
            pt = list(x) if isinstance(x, tuple) else [x]
            w = self.pmf[x]
            yield [*pt, w.numerator, w.denominator]

    def to_csv(self, path, labels: Sequence[str] | None = None):
        x0 = self.support[0]
        width = len(x0) if isinstance(x0, tuple) else 1
        labels = list(labels) if labels else ([f"x{i + 1}" for i in range(width)] if width > 1 else ["x"])
        return export.write_csv(path, labels + ["numerator", "denominator"], self.rows())

    def to_json(self, path, meta: dict | None = None):
        pts = [{"point": list(x) if isinstance(x, tuple) else x, "probability": self.pmf[x]}
               for x in self.support]
        return export.write_json(path, {"meta": meta or {}, "law": pts})


def exact_law_1d(n: int, p, q) -> ExactLaw:
    """Law of ``S_n`` for the one-dimensional walk.

    ``q`` is ``P(X_1 = +1)`` or the pair ``(q, 1 - q)``.  The chain tracks the
    number ``r`` of ``+1`` steps among the first ``t``.
    """
    if not 1 <= n <= MAX_N_1D:
        raise ValueError(f"exact mode needs 1 <= n <= {MAX_N_1D}, got {n}")
    p = _rational(p, "p")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    q1, q2 = _rational_vector(q, 2)
    dist = {1: q1, 0: q2}
    for t in range(1, n):
        nxt: dict = defaultdict(Fraction)
        for r, w in dist.items():
            if w == 0:
                continue
            up = p * Fraction(r, t) + (1 - p) * Fraction(t - r, t)
            nxt[r + 1] += w * up
            nxt[r] += w * (1 - up)
        dist = nxt
    out: dict = defaultdict(Fraction)
    for r, w in dist.items():
        if w:
            out[2 * r - n] += w
    return ExactLaw(dict(out))


def law_1d_float(n: int, p: float, q: float) -> dict:
    """Same chain as :func:`exact_law_1d` in float64, for horizons beyond exact arithmetic.

    Every update is a convex combination, so rounding error stays at machine level.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError("p and q must lie in [0, 1]")
    p, q = float(p), float(q)
    dist = np.array([1.0 - q, q])  # index r = number of +1 steps
    for t in range(1, n):
        r = np.arange(t + 1)
        up = (p * r + (1.0 - p) * (t - r)) / t
        nxt = np.zeros(t + 2)
        nxt[1:] += dist * up
        nxt[:-1] += dist * (1.0 - up)
        dist = nxt
    return {2 * r - n: float(w) for r, w in enumerate(dist) if w > 0}


def exact_law_counts(n: int, d: int, p, q) -> ExactLaw:
    """Joint law of direction counts ``(N_1, ..., N_2d)`` after ``n`` steps."""
    if not 1 <= d <= MAX_D_COUNTS:
        raise ValueError(f"exact count mode supports d <= {MAX_D_COUNTS}")
    if not 1 <= n <= MAX_N_COUNTS:
        raise ValueError(f"exact count mode needs 1 <= n <= {MAX_N_COUNTS}, got {n}")
    p = _rational(p, "p")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    ncol = 2 * d
    q = _rational_vector(q, ncol)
    other = (1 - p) / (ncol - 1)
    dist: dict = {}
    for j, w in enumerate(q):
        if w:
            e = [0] * ncol
            e[j] = 1
            dist[tuple(e)] = w
    for t in range(1, n):
        nxt: dict = defaultdict(Fraction)
        for N, w in dist.items():
            for j in range(ncol):
                pj = p * Fraction(N[j], t) + other * Fraction(t - N[j], t)
                if pj:
                    M = list(N)
                    M[j] += 1
                    nxt[tuple(M)] += w * pj
        dist = nxt
    return ExactLaw(dict(dist))


def counts_to_position(counts: tuple) -> tuple:
    """Direction counts to lattice position ``(N_1 - N_2, N_3 - N_4, ...)``."""
    return tuple(counts[i] - counts[i + 1] for i in range(0, len(counts), 2))
