"""Size, average-degree and privacy-rate estimators over walk records.

The size estimators average indicator and weight terms over all ordered
index pairs (k, l) with |k - l| >= m, where the gap threshold m discards
pairs too close along the walk to be treated as independent:

  collision mean        mean of [node_k == node_l]
  prior weight mean     mean of pubdeg_k / pubdeg_l
  proposed weight mean  mean of degree_k / pubdeg_l

and each size estimate is a weight mean over the collision mean. The
prior pair weights need exact public degrees; the proposed weights put
the plain degree in the numerator so they work with cheap hidden-model
sampling, at the price of converging to a slightly rescaled target.

Both average-degree estimators are harmonic sample means: the prior one
over public degrees, the proposed one over plain degrees.

All pair sums run in O(r log r) via prefix sums over the banded index
set; results match the literal O(r^2) double loop to within rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .walk import WalkRecord


class NoCollisionError(RuntimeError):
    """No node collision among the admissible index pairs; size undefined."""


class SizeEstimates(NamedTuple):
    collision_mean: float
    weight_mean_prior: float
    weight_mean_proposed: float
    size_nc: float
    size_proposed: float


@dataclass(frozen=True)
class EstimateReport:
    """Every estimate computable from one walk record."""

    collision_mean: float
    weight_mean_prior: float
    weight_mean_proposed: float
    size_nc: float
    size_proposed: float
    avg_degree_smooth: float
    avg_degree_proposed: float
    privacy_rate_size: float
    privacy_rate_avg_degree: float
    gap_threshold: int
    sample_count: int


def default_gap_threshold(r: int) -> int:
    """Default index-pair gap: 2.5% of the walk length, at least 1."""
    return max(1, math.ceil(0.025 * r))


def _pair_count(r: int, m: int) -> int:
    # ordered pairs (k, l), k != l, |k - l| >= m
    span = r - m
    return span * (span + 1)


def _collision_pairs(nodes: np.ndarray, m: int) -> int:
    """Count ordered index pairs with equal nodes and gap >= m."""
    order = np.argsort(nodes, kind="stable")  # ties keep ascending positions
    svals = nodes[order]
    change = np.nonzero(np.diff(svals))[0] + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [svals.size]))
    total = 0
    for s, e in zip(starts, ends):
        if e - s < 2:
            continue
        pos = order[s:e]
        total += int(np.searchsorted(pos, pos - m, side="right").sum())
    return 2 * total


def size_estimates(record: WalkRecord, m: int) -> SizeEstimates:
    """Collision mean, both weight means, and both size estimates.

    Raises :class:`NoCollisionError` when no admissible pair collides.
    """
    r = record.r
    if not 1 <= m < r:
        raise ValueError(f"gap threshold must satisfy 1 <= m < r, got m={m}, r={r}")
    dstar = record.public_degrees
    if np.any(dstar <= 0):
        raise ValueError("every sample needs a positive public-degree value")
    d = record.degrees.astype(np.float64)

    pairs = _pair_count(r, m)
    collisions = _collision_pairs(record.nodes, m)

    # sum over far-away partners via prefix sums: for index k the partners
    # are everything outside the window [k-m+1, k+m-1]
    inv = 1.0 / dstar
    csum = np.concatenate(([0.0], np.cumsum(inv)))
    k_idx = np.arange(r)
    near = csum[np.minimum(k_idx + m, r)] - csum[np.maximum(k_idx - m + 1, 0)]
    far = csum[-1] - near

    psi_prior = float(dstar @ far) / pairs
    psi_proposed = float(d @ far) / pairs

    if collisions == 0:
        raise NoCollisionError(
            f"no node collision among pairs with gap >= {m} in {r} samples"
        )
    phi = collisions / pairs
    return SizeEstimates(phi, psi_prior, psi_proposed, psi_prior / phi, psi_proposed / phi)


def avg_degree_estimates(record: WalkRecord) -> tuple[float, float]:
    """Harmonic-mean average-degree estimates: (prior, proposed)."""
    if np.any(record.degrees <= 0):
        raise ValueError("every sample needs a positive degree")
    dstar = record.public_degrees
    if np.any(dstar <= 0):
        raise ValueError("every sample needs a positive public-degree value")
    r = record.r
    smooth = r / float(np.sum(1.0 / dstar))
    proposed = r / float(np.sum(1.0 / record.degrees))
    return smooth, proposed


def estimate_privacy_rate(report: EstimateReport) -> tuple[float, float]:
    """Privacy-rate estimates from the size pair and the degree pair.

    Raw values: no clamping to [0, 1], so sampling noise can push either
    estimate slightly negative.
    """
    if report.size_proposed <= 0 or report.avg_degree_proposed <= 0:
        raise ValueError("privacy rate needs positive proposed estimates")
    p_from_size = 1.0 - report.size_nc / report.size_proposed
    p_from_avg = 1.0 - report.avg_degree_smooth / report.avg_degree_proposed
    return p_from_size, p_from_avg


def build_report(record: WalkRecord, m: int | None = None) -> EstimateReport:
    """Compute all estimates of one record; ``m`` defaults to 2.5% of r."""
    if m is None:
        m = default_gap_threshold(record.r)
    size = size_estimates(record, m)
    smooth, proposed = avg_degree_estimates(record)
    report = EstimateReport(
        collision_mean=size.collision_mean,
        weight_mean_prior=size.weight_mean_prior,
        weight_mean_proposed=size.weight_mean_proposed,
        size_nc=size.size_nc,
        size_proposed=size.size_proposed,
        avg_degree_smooth=smooth,
        avg_degree_proposed=proposed,
        privacy_rate_size=1.0 - size.size_nc / size.size_proposed,
        privacy_rate_avg_degree=1.0 - smooth / proposed,
        gap_threshold=m,
        sample_count=record.r,
    )
    return report
