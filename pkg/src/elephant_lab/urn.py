"""Polya-type urns with random cyclic-shift replacement.

Colour ``c`` (0-based) corresponds to walk direction ``c`` in :mod:`walk`.
A drawn ball of colour ``c`` is returned with one new ball of colour
``c`` (probability ``p``) or ``(c + k) mod 2d`` with ``k`` uniform in
``1 .. 2d-1``; ``k`` is the power of the cyclic shift ``J`` applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Sequence

import numba
import numpy as np

from . import export
from .streams import run_blocks, stream
from .walk import exponent, first_step_vector, _check_probability_vector


@dataclass(frozen=True)
class UrnConfig:
    colors: int
    p: Real
    initial: tuple
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.colors < 2 or self.colors % 2:
            raise ValueError(f"colour count must be even and >= 2, got {self.colors}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        init = tuple(int(x) for x in self.initial)
        if len(init) != self.colors:
            raise ValueError(f"initial composition needs {self.colors} entries")
        if any(x < 0 for x in init):
            raise ValueError("initial composition has negative counts")
        if sum(init) == 0:
            raise ValueError("the urn must start with at least one ball")
        object.__setattr__(self, "initial", init)
        if self.n < 0:
            raise ValueError("number of draws must be nonnegative")

    @property
    def d(self) -> int:
        return self.colors // 2

    @property
    def a(self) -> Real:
        return exponent(self.d, self.p)


@dataclass
class UrnPath:
    compositions: np.ndarray  # (n+1, colors)
    drawn: np.ndarray  # (n,)
    shifts: np.ndarray  # (n,) power of J applied; 0 means repeat

    @property
    def n(self) -> int:
        return len(self.drawn)

    def totals(self) -> np.ndarray:
        return self.compositions.sum(axis=1)

    def to_csv(self, path):
        c = self.compositions.shape[1]
        header = ["t", "drawn", "shift"] + [f"U{i + 1}" for i in range(c)]
        rows = ([t, "" if t == 0 else int(self.drawn[t - 1]), "" if t == 0 else int(self.shifts[t - 1]),
                 *self.compositions[t]] for t in range(self.n + 1))
        return export.write_csv(path, header, rows)


@dataclass
class SubtreeSplit:
    times: np.ndarray  # t = 1 .. n+1, with D1(t) + D2(t) = t + 1
    D1: np.ndarray
    D2: np.ndarray


# ---------------------------------------------------------------- kernels


@numba.njit(nogil=True, cache=True)
def _draw(gen, counts, total, p):
    # floor(u*total) picks the ball, the fractional part picks the replacement
    x = gen.random() * total
    b = int(x)
    frac = x - b
    ncol = counts.size
    c = 0
    acc = counts[0]
    while acc <= b and c < ncol - 1:
        c += 1
        acc += counts[c]
    if frac < p:
        return c, 0
    k = 1 + int((frac - p) / (1.0 - p) * (ncol - 1))
    if k > ncol - 1:
        k = ncol - 1
    return c, k


@numba.njit(nogil=True, cache=True)
def _urn_path(gen, init, n, p, comps, drawn, shifts):
    ncol = init.size
    counts = init.copy()
    comps[0, :] = counts
    total = counts.sum()
    for t in range(n):
        c, k = _draw(gen, counts, total, p)
        counts[(c + k) % ncol] += 1
        total += 1
        drawn[t] = c
        shifts[t] = k
        comps[t + 1, :] = counts


@numba.njit(nogil=True, cache=True)
def _urn_final(gen, reps, ncol, n, p, qcum, fixed, out):
    counts = np.zeros(ncol, np.int64)
    for r in range(reps):
        counts[:] = 0
        if fixed >= 0:
            counts[fixed] = 1
        else:
            u = gen.random()
            c = 0
            while c < ncol - 1 and u >= qcum[c]:
                c += 1
            counts[c] = 1
        total = 1
        for _ in range(n):
            c, k = _draw(gen, counts, total, p)
            counts[(c + k) % ncol] += 1
            total += 1
        out[r, :] = counts


@numba.njit(nogil=True, cache=True)
def _split_paths(gen, reps, n, out):
    for r in range(reps):
        d1 = 1
        for t in range(n):
            if gen.random() * (t + 2) < d1:
                d1 += 1
        out[r] = d1


# ------------------------------------------------------------- operations


def simulate_urn(config: UrnConfig, replica: int = 0) -> UrnPath:
    """Simulate the full composition path; reproducible in ``(seed, replica)``."""
    gen = stream(config.seed, "urn.path", replica)
    init = np.asarray(config.initial, np.int64)
    comps = np.empty((config.n + 1, config.colors), np.int64)
    drawn = np.empty(config.n, np.int64)
    shifts = np.empty(config.n, np.int64)
    _urn_path(gen, init, config.n, float(config.p), comps, drawn, shifts)
    return UrnPath(comps, drawn, shifts)


def urn_to_walk_position(composition: Sequence[int]) -> np.ndarray:
    """``(U1 - U2, U3 - U4, ...)`` for one composition or a stack of them."""
    u = np.asarray(composition)
    if u.shape[-1] % 2:
        raise ValueError("composition length must be even")
    return u[..., 0::2] - u[..., 1::2]


def urn_ensemble(d: int, p, n: int, replicas: int, seed: int = 0, q=None, initial_color: int | None = None,
                 threads: int | None = None) -> np.ndarray:
    """Final compositions ``U(n)`` from single-ball starts, shape ``(replicas, 2d)``.

    The starting colour is ``initial_color`` if given, otherwise drawn from ``q``.
    With a colour drawn from ``q``, ``urn_to_walk_position(U(n))`` has the law of
    the walk position ``S_{n+1}``.
    """
    ncol = 2 * d
    if initial_color is None:
        if q is None:
            raise ValueError("supply q or initial_color")
        qv = first_step_vector(q, d)
        _check_probability_vector(qv, ncol)
        qcum = np.cumsum(np.asarray([float(x) for x in qv]))
        qcum[-1] = 1.0
        fixed = -1
    else:
        if not 0 <= initial_color < ncol:
            raise ValueError("initial colour out of range")
        qcum = np.ones(ncol)
        fixed = int(initial_color)
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    pf = float(p)

    def kernel(gen, count):
        out = np.zeros((count, ncol), np.int64)
        _urn_final(gen, count, ncol, n, pf, qcum, fixed, out)
        return out

    return run_blocks(kernel, replicas, seed, "urn.ensemble", threads)


def centred_urn(compositions: np.ndarray, a) -> np.ndarray:
    """``Y = (U(n) - n v1) / n^a`` where ``n`` is the number of draws from one ball."""
    u = np.asarray(compositions, dtype=float)
    n = u.sum(axis=-1, keepdims=True) - 1
    ncol = u.shape[-1]
    return (u - n / ncol) / n ** float(a)


def urn_limit_W(compositions: np.ndarray, a) -> np.ndarray:
    """Coordinates ``W = (W_2, ..., W_2d)`` of ``Y`` in the basis ``v_i = (e_1 - e_i)/2``."""
    return -2.0 * centred_urn(compositions, a)[..., 1:]


def simulate_subtree_split(n: int, seed: int = 0, replica: int = 0) -> SubtreeSplit:
    """Identity-replacement two-colour urn from ``(1, 1)``: leaf counts of the two subtrees.

    Entry ``t`` holds the split after ``t - 1`` draws, so ``(D1, D2)(1) = (1, 1)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    gen = stream(seed, "urn.split", replica)
    u = gen.random(n)
    d1 = np.empty(n + 1, np.int64)
    d1[0] = 1
    cur = 1
    for t in range(n):
        if u[t] * (t + 2) < cur:
            cur += 1
        d1[t + 1] = cur
    times = np.arange(1, n + 2)
    return SubtreeSplit(times, d1, times + 1 - d1)


def subtree_split_fractions(n: int, replicas: int, seed: int = 0, threads: int | None = None) -> np.ndarray:
    """``D1 / (n + 2)`` after ``n`` draws from ``(1, 1)``, over independent replicas (uniform in the limit)."""
    if n < 1:
        raise ValueError("n must be positive")

    def kernel(gen, count):
        out = np.zeros(count, np.int64)
        _split_paths(gen, count, n, out)
        return out

    return run_blocks(kernel, replicas, seed, "urn.split.ensemble", threads) / (n + 2)
