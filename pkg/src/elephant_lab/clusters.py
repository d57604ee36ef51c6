"""Cluster representation of the one-dimensional limit.

Nodes ``0 .. n-1`` of a random recursive tree attach to a uniform earlier node and
each edge survives with probability ``a``.  Giving every percolation cluster an
independent sign (the cluster of node 0 uses ``P(+1) = q``) and summing signed
cluster sizes yields a walk position with the law of ``S_n`` for memory
``p = (1 + a)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from . import export
from .streams import run_blocks, stream


def _check_a(a: float, closed: bool = False) -> None:
    ok = (0 <= a <= 1) if closed else (0 < a < 1)
    if not ok:
        raise ValueError(f"a must lie in {'[0, 1]' if closed else '(0, 1)'}, got {a}")


def sample_mittag_leffler(a: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Mittag-Leffler(a) draws, ``E[M^k] = k! / Gamma(1 + k a)`` (Kanter's representation).

    ``M = S^{-a}`` for ``S`` positive ``a``-stable with Laplace transform ``exp(-t^a)``;
    with ``U`` uniform and ``E`` standard exponential, ``M = (E / A(U))^{1-a}`` where
    ``A(u) = (sin(a pi u)/sin(pi u))^{1/(1-a)} sin((1-a) pi u) / sin(a pi u)``.
    """
    _check_a(a)
    u = rng.random(size)
    e = rng.standard_exponential(size)
    log_A = (np.log(np.sin(a * np.pi * u)) - np.log(np.sin(np.pi * u))) / (1 - a) \
        + np.log(np.sin((1 - a) * np.pi * u)) - np.log(np.sin(a * np.pi * u))
    return np.exp((1 - a) * (np.log(e) - log_A))


@dataclass
class ClusterSample:
    a: float
    q: float
    tau: np.ndarray  # (size, J), tau[:, 0] = 1
    C: np.ndarray  # (size, J)
    Z: np.ndarray  # (size, J) signs
    marginal_faithful: bool = True  # the C_j are drawn independently; only marginals are right

    @property
    def J(self) -> int:
        return self.C.shape[1]

    def partial_sum(self) -> np.ndarray:
        return np.sum(self.C * self.Z, axis=1)


def sample_cluster_series(a: float, q: float, J: int, rng: np.random.Generator, size: int = 1) -> ClusterSample:
    """Truncated series ``sum_{j<=J} C_j Z_j`` with each ``C_j`` drawn from its marginal law.

    ``tau_j = tau_{j-1} + G_j`` with ``G_j`` geometric on ``{1, 2, ...}`` (success
    probability ``1 - a``), ``C_j = M_j * beta_j^a`` with ``M_j`` Mittag-Leffler and
    ``beta_j ~ Beta(1, tau_j - 1)`` (the constant 1 when ``tau_j = 1``).
    """
    _check_a(a)
    if J < 1:
        raise ValueError("J must be at least 1")
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    gaps = rng.geometric(1 - a, size=(size, J))
    gaps[:, 0] = 1
    tau = np.cumsum(gaps, axis=1)
    beta = np.ones((size, J))
    later = tau > 1
    beta[later] = rng.beta(1.0, (tau[later] - 1).astype(float))
    C = sample_mittag_leffler(a, rng, (size, J)) * beta**a
    Z = np.where(rng.random((size, J)) < 0.5, 1, -1)
    Z[:, 0] = np.where(rng.random(size) < q, 1, -1)
    return ClusterSample(a, q, tau, C, Z)


@dataclass
class PercolatedRRT:
    parent: np.ndarray  # parent[0] = -1
    kept: np.ndarray  # kept[i]: edge (i, parent[i]) survives; kept[0] = False
    root: np.ndarray  # root of the cluster containing each node
    a: float

    @property
    def n(self) -> int:
        return self.parent.size

    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.root == np.arange(self.n))

    def cluster_sizes(self) -> np.ndarray:
        """Sizes of clusters, ordered by increasing root label."""
        return np.bincount(self.root, minlength=self.n)[self.roots()]

    def to_csv(self, path):
        rows = ([i, int(self.parent[i]), int(self.kept[i]), int(self.root[i])] for i in range(self.n))
        return export.write_csv(path, ["node", "parent", "kept", "root"], rows)


@numba.njit(nogil=True, cache=True)
def _percolate(gen, n, a, parent, kept, root):
    parent[0] = -1
    kept[0] = False
    root[0] = 0
    for i in range(1, n):
        par = int(gen.random() * i)
        parent[i] = par
        k = gen.random() < a
        kept[i] = k
        root[i] = root[par] if k else i


def simulate_rrt_percolation(n: int, a: float, seed: int = 0, replica: int = 0) -> PercolatedRRT:
    """Random recursive tree on ``n`` nodes with Bernoulli(a) bond percolation."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_a(a, closed=True)
    gen = stream(seed, "clusters.tree", replica)
    parent = np.empty(n, np.int64)
    kept = np.empty(n, np.bool_)
    root = np.empty(n, np.int64)
    _percolate(gen, n, float(a), parent, kept, root)
    return PercolatedRRT(parent, kept, root, float(a))


def reconstruct_walk_from_clusters(tree: PercolatedRRT, q: float, seed: int = 0, replica: int = 0) -> int:
    """Signed sum of cluster sizes: node 0's cluster gets ``+1`` w.p. ``q``, others fair signs."""
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    rng = stream(seed, "clusters.signs", replica)
    sizes = tree.cluster_sizes()
    signs = np.where(rng.random(sizes.size) < 0.5, 1, -1)
    signs[0] = 1 if rng.random() < q else -1
    return int(np.dot(signs, sizes))


@numba.njit(nogil=True, cache=True)
def _rrt_walk_kernel(gen, reps, n, a, q, out_walk, out_root):
    root = np.empty(n, np.int64)
    sign = np.empty(n, np.int64)
    for r in range(reps):
        root[0] = 0
        sign[0] = 1 if gen.random() < q else -1
        s = sign[0]
        root_size = 1
        for i in range(1, n):
            par = int(gen.random() * i)
            if gen.random() < a:
                root[i] = root[par]
            else:
                root[i] = i
                sign[i] = 1 if gen.random() < 0.5 else -1
            s += sign[root[i]]
            if root[i] == 0:
                root_size += 1
        out_walk[r] = s
        out_root[r] = root_size


def rrt_walk_ensemble(n: int, a: float, q: float, replicas: int, seed: int = 0,
                      threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per replica: the reconstructed ``S_n`` and the size of node 0's cluster."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_a(a, closed=True)

    def kernel(gen, count):
        out = np.zeros((count, 2), np.int64)
        w = np.zeros(count, np.int64)
        c = np.zeros(count, np.int64)
        _rrt_walk_kernel(gen, count, n, float(a), float(q), w, c)
        out[:, 0] = w
        out[:, 1] = c
        return out

    res = run_blocks(kernel, replicas, seed, "clusters.ensemble", threads)
    return res[:, 0], res[:, 1]


def expected_tau_minus_one(a: float, j: int) -> float:
    """``E[tau_j - 1] = (j - 1)/(1 - a)`` for geometric gaps on ``{1, 2, ...}``."""
    return (j - 1) / (1 - a)
