"""Elephant random walk on Z^d and estimators of its normalized limit.

Directions are coded ``0 .. 2d-1`` in the order ``+e1, -e1, +e2, -e2, ...``;
code ``c`` moves along axis ``c // 2`` with sign ``+1`` if ``c`` is even.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numba
import numpy as np

from . import export
from .streams import run_blocks, stream

MAX_DIM = 63  # direction codes are stored as int8


def exponent(d: int, p) -> Real:
    """Growth exponent ``(2dp - 1) / (2d - 1)``; exact when ``p`` is rational."""
    if isinstance(p, (int, Fraction)):
        return (2 * d * Fraction(p) - 1) / (2 * d - 1)
    return (2 * d * float(p) - 1) / (2 * d - 1)


def memory_for_exponent(d: int, a) -> Real:
    """Inverse of :func:`exponent`: the memory parameter giving exponent ``a``."""
    if isinstance(a, (int, Fraction)):
        return (Fraction(a) * (2 * d - 1) + 1) / (2 * d)
    return (float(a) * (2 * d - 1) + 1) / (2 * d)


def limit_mean(d: int, a: float, q) -> np.ndarray:
    """``E[L] = (q_1 - q_2, q_3 - q_4, ...) / Gamma(a + 1)``."""
    qv = np.asarray([float(x) for x in first_step_vector(q, d)])
    return (qv[0::2] - qv[1::2]) / math.gamma(float(a) + 1)


def limit_second_moment(d: int, a: float, q) -> np.ndarray:
    """``E[L L^T] = (D + I / (d (2a - 1))) / Gamma(2a + 1)`` with ``D = diag(q_1 + q_2, ...)``.

    Reduces to ``1 / ((2a - 1) Gamma(2a))`` for ``d = 1`` and to
    ``I / (d (2a - 1) Gamma(2a))`` for uniform ``q``.
    """
    a = float(a)
    qv = np.asarray([float(x) for x in first_step_vector(q, d)])
    D = np.diag(qv[0::2] + qv[1::2])
    return (D + np.eye(d) / (d * (2 * a - 1))) / math.gamma(2 * a + 1)


def first_step_vector(q, d: int) -> tuple:
    """Normalize a first-step specification to a length-2d tuple.

    For ``d == 1`` a scalar ``q`` means ``(q, 1 - q)``.
    """
    if isinstance(q, (int, float, Fraction)) and not isinstance(q, bool):
        if d != 1:
            raise ValueError("a scalar first-step probability only makes sense for d=1")
        return (q, 1 - q)
    return tuple(q)


def _check_probability_vector(q: Sequence, length: int) -> None:
    if len(q) != length:
        raise ValueError(f"q must have {length} entries, got {len(q)}")
    if any(x < 0 for x in q):
        raise ValueError("q has negative entries")
    if abs(float(sum(q)) - 1.0) > 1e-12:
        raise ValueError(f"q must sum to 1 (got {float(sum(q))!r})")


@dataclass(frozen=True)
class WalkConfig:
    d: int
    p: Real
    q: tuple
    n: int
    seed: int = 0
    a: Real = field(init=False)
    superdiffusive: bool = field(init=False)

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        if self.d > MAX_DIM:
            raise ValueError(f"dimension above {MAX_DIM} is not supported")
        if not 0 <= self.p <= 1:
            raise ValueError(f"memory parameter p must lie in [0, 1], got {self.p}")
        q = first_step_vector(self.q, self.d)
        _check_probability_vector(q, 2 * self.d)
        object.__setattr__(self, "q", q)
        if self.n < 1:
            raise ValueError("horizon n must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        a = exponent(self.d, self.p)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "superdiffusive", a > Fraction(1, 2))

    @property
    def q_cumulative(self) -> np.ndarray:
        q = np.asarray([float(x) for x in self.q])
        c = np.cumsum(q / q.sum())
        c[-1] = 1.0
        return c

    def check_exponent(self, a) -> None:
        """Raise if ``a`` disagrees with the exponent derived from ``(d, p)``."""
        if abs(float(a) - float(self.a)) > 1e-12:
            raise ValueError(f"exponent a={a} inconsistent with d={self.d}, p={self.p} (a={self.a})")

    def to_dict(self) -> dict:
        return {"d": self.d, "p": self.p, "q": list(self.q), "n": self.n, "seed": self.seed,
                "a": self.a, "superdiffusive": self.superdiffusive}


@dataclass
class Trajectory:
    d: int
    steps: np.ndarray  # int8 direction codes, length n
    positions: np.ndarray | None = None  # (n+1, d), S_0 .. S_n

    @property
    def n(self) -> int:
        return len(self.steps)

    def endpoint(self) -> np.ndarray:
        counts = np.bincount(self.steps, minlength=2 * self.d)
        return counts[0::2] - counts[1::2]

    def materialize(self) -> np.ndarray:
        if self.positions is None:
            inc = np.zeros((self.n + 1, self.d), dtype=np.int64)
            axis = self.steps // 2
            sign = 1 - 2 * (self.steps % 2)
            inc[np.arange(1, self.n + 1), axis] = sign
            self.positions = np.cumsum(inc, axis=0)
        return self.positions

    def to_csv(self, path):
        pos = self.materialize()
        rows = ([t, "" if t == 0 else int(self.steps[t - 1]), *pos[t]] for t in range(self.n + 1))
        header = ["t", "step"] + [f"x{i + 1}" for i in range(self.d)]
        return export.write_csv(path, header, rows)


@dataclass
class LimitEnsemble:
    values: np.ndarray  # (replicas, d), S_n / n^a
    a: float
    n: int

    @property
    def replicas(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path):
        header = ["replica"] + [f"L{i + 1}" for i in range(self.d)]
        return export.write_csv(path, header, ([r, *v] for r, v in enumerate(self.values)))


@dataclass
class MomentEstimate:
    mean: np.ndarray
    mean_se: np.ndarray
    second: np.ndarray  # empirical E[L L^T]
    second_se: np.ndarray
    replicas: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "mean_se": self.mean_se, "second": self.second,
                "second_se": self.second_se, "replicas": self.replicas}


@dataclass
class FluctuationSample:
    values: np.ndarray
    n: int
    N: int
    a: float
    bias_factor: float  # 1 - (n/N)^(2a-1), variance shrinkage from the proxy

    @property
    def target_variance(self) -> float:
        return self.bias_factor / (2 * self.a - 1)


# ---------------------------------------------------------------- kernels


@numba.njit(nogil=True, cache=True)
def _first_step(gen, qcum):
    u = gen.random()
    c = 0
    while c < qcum.size - 1 and u >= qcum[c]:
        c += 1
    return c


@numba.njit(nogil=True, cache=True)
def _next_step(gen, t, p, two_d, steps):
    # One uniform serves both draws: floor(u*t) is the recalled time and the
    # fractional part is an independent uniform (t << 2^53).
    x = gen.random() * t
    k = int(x)
    frac = x - k
    prev = steps[k]
    if frac < p:
        return prev
    j = 1 + int((frac - p) / (1.0 - p) * (two_d - 1))
    if j > two_d - 1:
        j = two_d - 1
    return (prev + j) % two_d


@numba.njit(nogil=True, cache=True)
def _fill_path(gen, n, d, p, qcum, steps):
    two_d = 2 * d
    steps[0] = _first_step(gen, qcum)
    for t in range(1, n):
        steps[t] = _next_step(gen, t, p, two_d, steps)


@numba.njit(nogil=True, cache=True)
def _checkpoint_kernel(gen, reps, N, d, p, qcum, checkpoints, out):
    two_d = 2 * d
    steps = np.empty(N, np.int8)
    pos = np.zeros(d, np.int64)
    for r in range(reps):
        pos[:] = 0
        c = _first_step(gen, qcum)
        steps[0] = c
        pos[c // 2] += 1 - 2 * (c % 2)
        ci = 0
        while ci < checkpoints.size and checkpoints[ci] == 1:
            out[r, ci, :] = pos
            ci += 1
        for t in range(1, N):
            c = _next_step(gen, t, p, two_d, steps)
            steps[t] = c
            pos[c // 2] += 1 - 2 * (c % 2)
            while ci < checkpoints.size and checkpoints[ci] == t + 1:
                out[r, ci, :] = pos
                ci += 1


# ------------------------------------------------------------- operations


def simulate_walk(config: WalkConfig, replica: int = 0, materialize: bool = False) -> Trajectory:
    """Simulate one trajectory; bit-reproducible in ``(config.seed, replica)``."""
    gen = stream(config.seed, "walk.path", replica)
    steps = np.empty(config.n, np.int8)
    _fill_path(gen, config.n, config.d, float(config.p), config.q_cumulative, steps)
    traj = Trajectory(config.d, steps)
    if materialize:
        traj.materialize()
    return traj


def normalized_endpoint(traj: Trajectory, a) -> np.ndarray:
    """``S_n / n^a`` as a float vector."""
    if not 0 < a <= 1:
        raise ValueError(f"exponent a must lie in (0, 1], got {a}")
    if traj.n == 0:
        raise ValueError("empty trajectory")
    return traj.endpoint() / float(traj.n) ** float(a)


def walk_checkpoints(config: WalkConfig, replicas: int, checkpoints: Sequence[int],
                     threads: int | None = None, tag: str = "walk.ensemble") -> np.ndarray:
    """Positions ``S_t`` at the given times for independent replicas.

    Returns an int64 array of shape ``(replicas, len(checkpoints), d)``.
    Paths are simulated to ``config.n`` with the full step history stored.
    """
    cps = np.asarray(sorted(checkpoints), dtype=np.int64)
    if cps.size == 0 or cps[0] < 1 or cps[-1] > config.n:
        raise ValueError("checkpoints must lie in [1, n]")
    p, qcum = float(config.p), config.q_cumulative

    def kernel(gen, count):
        out = np.zeros((count, cps.size, config.d), np.int64)
        _checkpoint_kernel(gen, count, config.n, config.d, p, qcum, cps, out)
        return out

    return run_blocks(kernel, replicas, config.seed, tag, threads)


def walk_endpoints(config: WalkConfig, replicas: int, threads: int | None = None) -> np.ndarray:
    """Integer endpoints ``S_n`` with shape ``(replicas, d)``."""
    return walk_checkpoints(config, replicas, [config.n], threads)[:, 0, :]


def walk_ensemble(config: WalkConfig, replicas: int, a=None, threads: int | None = None) -> LimitEnsemble:
    """Ensemble of normalized endpoints ``S_n / n^a``."""
    if a is None:
        a = config.a
    else:
        config.check_exponent(a)
    if not config.superdiffusive:
        warnings.warn(f"a={float(config.a):.6g} <= 1/2: S_n/n^a has no superdiffusive limit",
                      stacklevel=2)
    ends = walk_endpoints(config, replicas, threads)
    return LimitEnsemble(ends / float(config.n) ** float(a), float(a), config.n)


def estimate_limit_moments(ensemble: LimitEnsemble) -> MomentEstimate:
    """Empirical mean and ``E[L L^T]`` with per-entry standard errors."""
    x = np.asarray(ensemble.values, dtype=float)
    r = x.shape[0]
    if r < 2:
        raise ValueError("need at least two replicas")
    outer = x[:, :, None] * x[:, None, :]
    return MomentEstimate(
        mean=x.mean(axis=0),
        mean_se=x.std(axis=0, ddof=1) / math.sqrt(r),
        second=outer.mean(axis=0),
        second_se=outer.std(axis=0, ddof=1) / math.sqrt(r),
        replicas=r,
    )


def fluctuation_sample(config: WalkConfig, n: int, N: int, replicas: int,
                       threads: int | None = None) -> FluctuationSample:
    """``sqrt(n^(2a-1)) (S_n/n^a - S_N/N^a)`` per replica, ``S_N/N^a`` standing in for the limit."""
    if config.d != 1:
        raise ValueError("fluctuation sampling is one-dimensional")
    if not n < N:
        raise ValueError(f"need n < N, got n={n}, N={N}")
    a = float(config.a)
    if a <= 0.5:
        raise ValueError("fluctuations around the limit need a > 1/2")
    cfg = WalkConfig(config.d, config.p, config.q, N, config.seed)
    pos = walk_checkpoints(cfg, replicas, [n, N], threads, tag="walk.fluctuation")[:, :, 0]
    vals = math.sqrt(n ** (2 * a - 1)) * (pos[:, 0] / n**a - pos[:, 1] / N**a)
    return FluctuationSample(vals, n, N, a, 1.0 - (n / N) ** (2 * a - 1))
