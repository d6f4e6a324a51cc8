"""Binary similarity measures and pairwise similarity matrices.

All measures are "Type 1": they score only positive co-occurrences of
tags and ignore shared absences, so appending all-zero columns to both
vectors never changes a value. Every measure maps a vector pair into
[0, 1] and is symmetric in its arguments.

With a = shared positive tags, b = positives only in the first vector
and c = positives only in the second:

    cosine          a / sqrt((a + b) * (a + c))
    dice            2a / (2a + b + c)
    jaccard         a / (a + b + c)
    lancewilliams   1 - (b + c) / (2a + b + c)     (identical to dice)
    sorgenfrei      a^2 / ((a + b) * (a + c))      (= cosine^2)
    mintest         min(a / (b + c), a + b + c) / (a + b + c)

``mintest`` is a deliberately insensitive control measure: it grows
minimally as two vectors approach each other. When b + c = 0 the first
argument of the min is taken as +inf, so identical non-empty vectors
score exactly 1.

A vector with no positive tags carries no similarity evidence; every
measure scores such pairs 0 (and matrix construction warns, naming the
risk id).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from ._seeds import SENSITIVITY, derive_rng
from .register import RiskRegister


class Measure(str, Enum):
    COSINE = "cosine"
    DICE = "dice"
    JACCARD = "jaccard"
    LANCE_WILLIAMS = "lancewilliams"
    SORGENFREI = "sorgenfrei"
    MINIMAL_TEST = "mintest"

    def __str__(self) -> str:  # argparse/report friendliness
        return self.value


@dataclass(frozen=True)
class MatchCounts:
    """Positive-match decomposition of a binary vector pair."""

    a: int
    b: int
    c: int


def match_counts(u, v) -> MatchCounts:
    """Count shared positives (a) and one-sided positives (b, c)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != v.shape:
        raise ValueError(f"vector length mismatch: {u.shape} vs {v.shape}")
    a = int(np.sum((u == 1) & (v == 1)))
    b = int(np.sum((u == 1) & (v == 0)))
    c = int(np.sum((u == 0) & (v == 1)))
    return MatchCounts(a=a, b=b, c=c)


def similarity_from_counts(counts: MatchCounts, measure: Measure) -> float:
    """Evaluate one measure on a match-count triple."""
    a, b, c = counts.a, counts.b, counts.c
    a = float(a)
    if a + b == 0 or a + c == 0:
        # At least one vector has no positive tags: no evidence, score 0.
        return 0.0
    measure = Measure(measure)
    if measure is Measure.COSINE:
        return a / math.sqrt((a + b) * (a + c))
    if measure in (Measure.DICE, Measure.LANCE_WILLIAMS):
        return 2.0 * a / (2.0 * a + b + c)
    if measure is Measure.JACCARD:
        return a / (a + b + c)
    if measure is Measure.SORGENFREI:
        return a * a / ((a + b) * (a + c))
    if measure is Measure.MINIMAL_TEST:
        total = a + b + c
        ratio = a / (b + c) if b + c > 0 else math.inf
        return min(ratio, total) / total
    raise ValueError(f"unknown measure {measure!r}")


def similarity(u, v, measure: Measure) -> float:
    """Similarity of two equal-length binary vectors under ``measure``."""
    return similarity_from_counts(match_counts(u, v), measure)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric pairwise similarity matrix with zero diagonal."""

    values: np.ndarray
    measure: Measure
    risk_ids: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("similarity matrix must be square")
        if len(self.risk_ids) != v.shape[0]:
            raise ValueError("risk_ids length must match matrix size")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _pair_components(tags: np.ndarray):
    """Vectorized (a, s_i, s_j) grids for all row pairs of a tag matrix."""
    x = tags.astype(np.float64)
    shared = x @ x.T
    sizes = x.sum(axis=1)
    return shared, sizes[:, None], sizes[None, :]


def similarity_matrix(register: RiskRegister, measure: Measure) -> SimilarityMatrix:
    """All pairwise similarities of a register's risks.

    The diagonal is zero: the network carries no self-similarity links.
    Warns once per risk whose characteristic vector is all-zero.
    """
    if register.n == 0:
        raise ValueError("register is empty")
    measure = Measure(measure)
    tags = register.tag_matrix()
    a, si, sj = _pair_components(tags)

    with np.errstate(divide="ignore", invalid="ignore"):
        if measure is Measure.COSINE:
            values = a / np.sqrt(si * sj)
        elif measure in (Measure.DICE, Measure.LANCE_WILLIAMS):
            values = 2.0 * a / (si + sj)
        elif measure is Measure.JACCARD:
            values = a / (si + sj - a)
        elif measure is Measure.SORGENFREI:
            values = a * a / (si * sj)
        elif measure is Measure.MINIMAL_TEST:
            total = si + sj - a
            bc = total - a
            ratio = np.where(bc > 0, a / np.where(bc > 0, bc, 1.0), np.inf)
            values = np.minimum(ratio, total) / total
        else:
            raise ValueError(f"unknown measure {measure!r}")

    degenerate = tags.sum(axis=1) == 0
    if degenerate.any():
        ids = [register.risks[row].risk_id for row in np.flatnonzero(degenerate)]
        warnings.warn(
            f"risk(s) {ids} have no positive tags; their similarities are set to 0",
            stacklevel=2,
        )
        values[degenerate, :] = 0.0
        values[:, degenerate] = 0.0
    np.fill_diagonal(values, 0.0)
    values = np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)
    return SimilarityMatrix(values=values, measure=measure, risk_ids=register.risk_ids)


def sensitivity_curve(
    length: int,
    measure: Measure,
    trials: int = 1,
    seed: int = 0,
) -> list[tuple[int, float]]:
    """Mean similarity as a growing vector approaches an all-ones target.

    Starting from the all-zero vector, one randomly chosen zero entry is
    flipped to 1 per step until the target is reached; the similarity to
    the target is recorded at every step and averaged over trials.
    Deterministic under ``seed``. The curve starts at 0 and ends at 1
    for every measure.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    measure = Measure(measure)
    rng = derive_rng(seed, SENSITIVITY)
    target = np.ones(length, dtype=np.int64)
    totals = np.zeros(length + 1, dtype=np.float64)
    for _ in range(trials):
        current = np.zeros(length, dtype=np.int64)
        totals[0] += similarity(current, target, measure)
        for step, position in enumerate(rng.permutation(length), start=1):
            current[position] = 1
            totals[step] += similarity(current, target, measure)
    means = totals / trials
    return [(step, float(means[step])) for step in range(length + 1)]


def write_similarity_csv(sim: SimilarityMatrix, path: str | Path) -> None:
    """Export an n x n similarity matrix headered by risk_id."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["risk_id"] + [str(rid) for rid in sim.risk_ids])
        for row, rid in enumerate(sim.risk_ids):
            writer.writerow([str(rid)] + [repr(float(v)) for v in sim.values[row]])
