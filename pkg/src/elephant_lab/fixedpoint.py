"""Particle iteration of the distributional fixed-point maps of the limit laws.

Every map draws its randomness for step ``s`` from ``stream(seed, tag, s)``, so a
run is reproducible and independent of how the vectorised arithmetic is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from . import export
from .spectral import build_K
from .streams import stream
from .walk import memory_for_exponent

VARIANTS = ("L1", "W", "Y")


@dataclass
class ParticlePopulation:
    values: np.ndarray  # (N,) for L1, (N, 2d-1) for W, (N, 2d) for Y
    variant: str
    a: float
    d: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.values = np.asarray(self.values, dtype=float)
        expected = {"L1": None, "W": 2 * self.d - 1, "Y": 2 * self.d}[self.variant]
        if expected is None:
            if self.values.ndim != 1:
                raise ValueError("scalar populations must be one-dimensional arrays")
        elif self.values.ndim != 2 or self.values.shape[1] != expected:
            raise ValueError(f"{self.variant} particles must have dimension {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("population has non-finite entries")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> float:
        return float(memory_for_exponent(self.d, self.a))

    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def to_csv(self, path):
        v = self.values.reshape(self.size, -1)
        header = ["particle"] + [f"x{i + 1}" for i in range(v.shape[1])]
        return export.write_csv(path, header, ([i, *row] for i, row in enumerate(v)))


@dataclass
class ContractionReport:
    pre_distance: float
    post_distance: float
    ratio: float  # mean over trials of post/pre; nan when pre_distance is 0
    bound: float
    trials: int
    skipped: bool = False

    def to_dict(self) -> dict:
        return {"pre_distance": self.pre_distance, "post_distance": self.post_distance, "ratio": self.ratio,
                "bound": self.bound, "trials": self.trials, "skipped": self.skipped}


def contraction_bound(a: float) -> float:
    return math.sqrt(2.0 / (1.0 + 2.0 * a))


def _require(pop: ParticlePopulation, variant: str) -> None:
    if pop.variant != variant:
        raise ValueError(f"expected a {variant} population, got {pop.variant}")
    if not 0.5 < pop.a <= 1:
        raise ValueError(f"the maps need a in (1/2, 1], got {pop.a}")


def _recentre(new: np.ndarray, target: np.ndarray) -> np.ndarray:
    return new - new.mean(axis=0) + target


def _one_d_step(x: np.ndarray, a: float, p: float, rng: np.random.Generator):
    n = x.shape[0]
    i1 = rng.integers(0, n, n)
    i2 = rng.integers(0, n, n)
    V = rng.random(n)
    sign = np.where(rng.random(n) < p, 1.0, -1.0)
    return i1, i2, V**a, sign * (1.0 - V) ** a


def iterate_map_1d(pop: ParticlePopulation, steps: int, seed: int = 0,
                   recenter: bool = False) -> ParticlePopulation:
    """Apply ``x -> V^a x' + (2 xi_p - 1)(1 - V)^a x''`` with ``p = (1 + a)/2``."""
    _require(pop, "L1")
    x = pop.values
    target = x.mean()
    p = (1.0 + pop.a) / 2.0
    for s in range(steps):
        i1, i2, c1, c2 = _one_d_step(x, pop.a, p, stream(seed, "fixedpoint.1d", s))
        x = c1 * x[i1] + c2 * x[i2]
        if recenter:
            x = _recentre(x, target)
    return replace(pop, values=x)


def K_powers(d: int) -> np.ndarray:
    K = np.array(build_K(d).matrix, dtype=float)
    out = [np.eye(2 * d - 1)]
    for _ in range(2 * d - 1):
        out.append(K @ out[-1])
    return np.stack(out)


def iterate_map_W(pop: ParticlePopulation, steps: int, seed: int = 0,
                  recenter: bool = False) -> ParticlePopulation:
    """Apply ``w -> V^a w' + (1 - V)^a K^k w''`` with ``k = 0`` w.p. ``p``, else uniform on ``1..2d-1``."""
    _require(pop, "W")
    d = pop.d
    p = pop.p
    Kp = K_powers(d)
    w = pop.values
    target = w.mean(axis=0)
    n = w.shape[0]
    for s in range(steps):
        rng = stream(seed, "fixedpoint.W", s)
        i1 = rng.integers(0, n, n)
        i2 = rng.integers(0, n, n)
        V = rng.random(n)
        k = np.where(rng.random(n) < p, 0, rng.integers(1, 2 * d, n))
        rotated = np.einsum("nij,nj->ni", Kp[k], w[i2])
        w = (V**pop.a)[:, None] * w[i1] + ((1.0 - V) ** pop.a)[:, None] * rotated
        if recenter:
            w = _recentre(w, target)
    return replace(pop, values=w)


def iterate_map_Y(pops: Sequence[ParticlePopulation], steps: int, seed: int = 0,
                  recenter: bool = False) -> list[ParticlePopulation]:
    """Coupled update ``Y^j -> V^a Y^j' + (1 - V)^a A Y^j''`` for all ``j`` at once.

    ``pops[j]`` holds vectors ``(Y_{j,(1)}, ..., Y_{j,(2d)})`` indexed by the
    starting colour.  ``V``, ``A`` and the resampling indices are shared across
    ``j``: particle ``i`` of every population is one draw of the joint system.
    """
    if not pops:
        raise ValueError("no populations given")
    d = pops[0].d
    if len(pops) != 2 * d:
        raise ValueError(f"need {2 * d} populations for d={d}, got {len(pops)}")
    for pop in pops:
        _require(pop, "Y")
        if pop.d != d or pop.size != pops[0].size or pop.a != pops[0].a:
            raise ValueError("populations disagree in d, size or a")
    a, p = pops[0].a, pops[0].p
    Y = np.stack([pop.values for pop in pops])  # (2d, N, 2d)
    target = Y.mean(axis=1, keepdims=True)
    n = Y.shape[1]
    ncol = 2 * d
    cols = np.arange(ncol)
    for s in range(steps):
        rng = stream(seed, "fixedpoint.Y", s)
        i1 = rng.integers(0, n, n)
        i2 = rng.integers(0, n, n)
        V = rng.random(n)
        m = np.where(rng.random(n) < p, 0, rng.integers(1, ncol, n))
        second = Y[:, i2, :]
        # (A y)_k = y_{k-m}: the cyclic shift J^m acting on the colour index
        shifted = np.take_along_axis(second, ((cols[None, :] - m[:, None]) % ncol)[None, :, :], axis=2)
        if not np.array_equal(np.sort(np.abs(shifted), axis=2), np.sort(np.abs(second), axis=2)):
            raise AssertionError("replacement matrix is not an isometry")
        Y = (V**a)[None, :, None] * Y[:, i1, :] + ((1.0 - V) ** a)[None, :, None] * shifted
        if recenter:
            Y = Y - Y.mean(axis=1, keepdims=True) + target
    return [replace(pop, values=Y[j]) for j, pop in enumerate(pops)]


def wasserstein2_1d(x: Sequence[float], y: Sequence[float]) -> float:
    """Empirical W2 between equal-size samples via the sorted (quantile) coupling."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError(f"populations differ in size ({x.size} vs {y.size})")
    if x.size == 0:
        raise ValueError("empty populations")
    return float(np.sqrt(np.mean((np.sort(x) - np.sort(y)) ** 2)))


def coordinate_w2(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-coordinate W2 for vector populations."""
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    return np.array([wasserstein2_1d(x[:, j], y[:, j]) for j in range(x.shape[1])])


def energy_distance(x: np.ndarray, y: np.ndarray, max_points: int = 2000, seed: int = 0) -> float:
    """Energy distance ``2E|X-Y| - E|X-X'| - E|Y-Y'|`` on random subsamples."""
    rng = stream(seed, "fixedpoint.energy")
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    y = np.asarray(y, dtype=float).reshape(len(y), -1)
    if len(x) > max_points:
        x = x[rng.choice(len(x), max_points, replace=False)]
    if len(y) > max_points:
        y = y[rng.choice(len(y), max_points, replace=False)]
    return float(2 * cdist(x, y).mean() - cdist(x, x).mean() - cdist(y, y).mean())


def contraction_estimate(a: float, popA: Sequence[float], popB: Sequence[float], trials: int = 100,
                         seed: int = 0) -> ContractionReport:
    """Ratio ``W2(H A, H B) / W2(A, B)`` for one synchronously coupled step of the scalar map.

    Both populations are sorted so that index ``i`` pairs the ``i``-th order
    statistics (optimal coupling); each trial then shares ``V``, the sign and
    the resampling indices between the two images.
    """
    x = np.sort(np.asarray(popA, dtype=float))
    y = np.sort(np.asarray(popB, dtype=float))
    if x.size != y.size:
        raise ValueError("populations differ in size")
    if not 0.5 < a <= 1:
        raise ValueError("a must lie in (1/2, 1]")
    n = x.size
    se = math.sqrt((x.var(ddof=1) + y.var(ddof=1)) / n) if n > 1 else 0.0
    gap = abs(x.mean() - y.mean())
    if gap > 4 * se and gap > 1e-12:
        raise ValueError(f"population means differ by {gap:.3g} (> 4 SE = {4 * se:.3g}); "
                         "the contraction holds only between laws with equal means")
    pre = wasserstein2_1d(x, y)
    bound = contraction_bound(a)
    if pre == 0.0:
        return ContractionReport(0.0, 0.0, float("nan"), bound, 0, skipped=True)
    p = (1.0 + a) / 2.0
    ratios, posts = [], []
    for t in range(trials):
        i1, i2, c1, c2 = _one_d_step(x, a, p, stream(seed, "fixedpoint.contraction", t))
        post = wasserstein2_1d(c1 * x[i1] + c2 * x[i2], c1 * y[i1] + c2 * y[i2])
        posts.append(post)
        ratios.append(post / pre)
    return ContractionReport(pre, float(np.mean(posts)), float(np.mean(ratios)), bound, trials)


def empirical_moments(x: np.ndarray, kmax: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Raw moments ``E x^k`` for ``k = 1..kmax`` and their standard errors."""
    x = np.asarray(x, dtype=float)
    pw = np.stack([x**k for k in range(1, kmax + 1)])
    return pw.mean(axis=1), pw.std(axis=1, ddof=1) / math.sqrt(x.size)
