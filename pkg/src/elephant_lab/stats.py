"""Goodness-of-fit helpers comparing Monte Carlo samples with exact laws."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

MIN_EXPECTED = 5.0


@dataclass
class ChiSquareResult:
    statistic: float
    pvalue: float
    dof: int
    outside_support: int  # samples the exact law gives probability 0

    @property
    def in_support(self) -> bool:
        return self.outside_support == 0

    def to_dict(self) -> dict:
        return {"statistic": self.statistic, "pvalue": self.pvalue, "dof": self.dof,
                "outside_support": self.outside_support}


def pooled_chisquare(samples: Sequence, pmf: Mapping, min_expected: float = MIN_EXPECTED) -> ChiSquareResult:
    """Pearson test of ``samples`` against ``pmf``, pooling the rarest cells until each expects ``min_expected``.

    Samples are integers or integer rows (matched against tuple keys).  A sample
    outside the support of ``pmf`` makes the p-value 0.
    """
    keys = list(pmf)
    index = {k: i for i, k in enumerate(keys)}
    counts = np.zeros(len(keys))
    arr = np.asarray(samples)
    values, freq = np.unique(arr, axis=0, return_counts=True) if arr.size else (arr, np.zeros(0, int))
    outside = 0
    total = int(freq.sum())
    for v, f in zip(values, freq):
        key = tuple(int(x) for x in v) if np.ndim(v) else int(v)
        i = index.get(key)
        if i is None:
            outside += int(f)
        else:
            counts[i] += f
    if total == 0:
        raise ValueError("no samples")
    probs = np.array([float(pmf[k]) for k in keys])
    if outside:
        return ChiSquareResult(float("inf"), 0.0, 0, outside)
    order = np.argsort(probs)
    exp_sorted = probs[order] * total
    obs_sorted = counts[order]
    # merge cells from the rare end until the pooled cell is large enough
    cut = 0
    pooled_e = 0.0
    while cut < len(order) and pooled_e < min_expected:
        pooled_e += exp_sorted[cut]
        cut += 1
    if pooled_e >= min_expected and cut < len(order):
        obs = np.concatenate([[obs_sorted[:cut].sum()], obs_sorted[cut:]])
        exp = np.concatenate([[pooled_e], exp_sorted[cut:]])
    else:
        obs, exp = obs_sorted, exp_sorted
        if cut == len(order):  # everything pooled into a single cell
            return ChiSquareResult(0.0, 1.0, 0, 0)
    exp = exp * obs.sum() / exp.sum()
    stat, pval = stats.chisquare(obs, exp)
    return ChiSquareResult(float(stat), float(pval), int(obs.size - 1), 0)


def standard_error(x: np.ndarray, axis: int = 0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x.std(axis=axis, ddof=1) / np.sqrt(x.shape[axis])
