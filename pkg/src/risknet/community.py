"""Weighted-modularity community detection and partition statistics.

Modules are found by greedy modularity maximization (local node moves
followed by graph aggregation, repeated until no improvement), restarted
from multiple randomized sweep orders. The quality function is the
weighted Newman-Girvan modularity

    Q = (1/2m) * sum_ij (A(i,j) - k_i k_j / 2m) * delta(c_i, c_j)

with weighted degrees k_i and total weight m. Partitions from ensemble
members are combined into a consensus by majority vote after greedy
maximum-overlap label alignment, and validated against a null model
(degree condition k_max < sqrt(2L)), the resolution condition
(l_s >= sqrt(2L) per module) and random planted-partition baselines
compared by normalized mutual information.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._seeds import BASELINE, CONSENSUS, MODULE_DETECTION, derive_rng
from ._parallel import parallel_map
from .network import GraphEnsemble, WeightedGraph, graph_stats

# Local moves must beat this margin; guards against float-noise cycling
# while keeping "strictly positive gain" semantics.
_GAIN_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every node to exactly one module.

    Module ids are contiguous integers from 1, ordered by descending
    module size. ``confidence`` carries per-node assignment frequencies
    when the partition is an ensemble consensus.
    """

    assignment: np.ndarray  # (n,) int64, ids 1..M
    q: float
    confidence: np.ndarray | None = None

    def __post_init__(self):
        labels = np.unique(self.assignment)
        if labels.size and not np.array_equal(labels, np.arange(1, labels.size + 1)):
            raise ValueError("module ids must be contiguous from 1")

    @property
    def n(self) -> int:
        return int(self.assignment.shape[0])

    @property
    def num_modules(self) -> int:
        return int(self.assignment.max()) if self.n else 0

    def module_sizes(self) -> dict[int, int]:
        ids, counts = np.unique(self.assignment, return_counts=True)
        return {int(i): int(c) for i, c in zip(ids, counts)}

    def members(self, module_id: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == module_id)


def _labels(partition_or_labels) -> np.ndarray:
    if isinstance(partition_or_labels, Partition):
        return partition_or_labels.assignment
    return np.asarray(partition_or_labels, dtype=np.int64)


def _seed_path(seed) -> tuple[int, ...]:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def modularity(g: WeightedGraph, assignment) -> float:
    """Weighted modularity Q of an assignment on graph g.

    Raises on graphs without edges (m = 0), where Q is undefined.
    """
    labels = _labels(assignment)
    if labels.shape[0] != g.n:
        raise ValueError("assignment must cover every node")
    m = float(g.weights.sum())
    if g.num_edges == 0 or m <= 0.0:
        raise ValueError("modularity undefined for a graph with no edges")
    _, idx = np.unique(labels, return_inverse=True)
    num = idx.max() + 1
    degrees = g.weighted_degrees()
    deg_tot = np.bincount(idx, weights=degrees, minlength=num)
    i, j = g.edges[:, 0], g.edges[:, 1]
    same = idx[i] == idx[j]
    internal = np.bincount(idx[i][same], weights=g.weights[same], minlength=num)
    return float(np.sum(internal / m - (deg_tot / (2.0 * m)) ** 2))


def internal_link_counts(g: WeightedGraph, assignment) -> dict[int, int]:
    """Unweighted internal edge count l_s per module id."""
    labels = _labels(assignment)
    counts: dict[int, int] = {int(mod): 0 for mod in np.unique(labels)}
    for i, j in g.edges:
        if labels[i] == labels[j]:
            counts[int(labels[i])] += 1
    return counts


def _relabel_by_size(labels: np.ndarray) -> np.ndarray:
    """Contiguous ids from 1, descending size, ties by first member."""
    uniq = np.unique(labels)
    order = sorted(
        uniq,
        key=lambda c: (-int(np.sum(labels == c)), int(np.flatnonzero(labels == c)[0])),
    )
    mapping = {int(old): new for new, old in enumerate(order, start=1)}
    return np.array([mapping[int(c)] for c in labels], dtype=np.int64)


def _local_moves(b: np.ndarray, m: float, labels: np.ndarray, rng) -> bool:
    """One level of greedy node moves; mutates labels, returns move flag.

    Candidate modules are the neighboring communities, scanned in
    ascending id so equal gains resolve to the lowest module id.
    """
    size = b.shape[0]
    k = b.sum(axis=1)
    comm_tot = np.bincount(labels, weights=k, minlength=size)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for node in rng.permutation(size):
            row = b[node]
            own = labels[node]
            link = np.bincount(labels, weights=row, minlength=size)
            base = link[own] - row[node]
            ki = k[node]
            tot_own = comm_tot[own] - ki
            best_gain = _GAIN_EPS
            best_comm = -1
            for cand in np.flatnonzero(link > 0):
                if cand == own:
                    continue
                gain = (link[cand] - base) / m - ki * (comm_tot[cand] - tot_own) / (
                    2.0 * m * m
                )
                if gain > best_gain:
                    best_gain = gain
                    best_comm = int(cand)
            if best_comm >= 0:
                labels[node] = best_comm
                comm_tot[own] -= ki
                comm_tot[best_comm] += ki
                moved_any = True
                improved = True
    return moved_any


def _louvain(adjacency: np.ndarray, rng) -> np.ndarray:
    """Multi-level greedy maximization; returns per-node labels."""
    n = adjacency.shape[0]
    m = adjacency.sum() / 2.0
    node_map = np.arange(n)
    b = adjacency
    while True:
        labels = np.arange(b.shape[0])
        moved = _local_moves(b, m, labels, rng)
        if not moved:
            break
        uniq, inv = np.unique(labels, return_inverse=True)
        if uniq.size == b.shape[0]:
            break
        node_map = inv[node_map]
        onehot = np.zeros((b.shape[0], uniq.size))
        onehot[np.arange(b.shape[0]), inv] = 1.0
        b = onehot.T @ b @ onehot
    return node_map


def singleton_partition(n: int) -> Partition:
    """Every node its own module; the neutral partition for edgeless graphs."""
    return Partition(assignment=np.arange(1, n + 1, dtype=np.int64), q=0.0)


def detect_modules(g: WeightedGraph, seed, restarts: int = 10) -> Partition:
    """Best-of-``restarts`` greedy modularity maximization.

    Deterministic under ``seed``; restarts differ only in their
    randomized sweep orders. Module ids are relabeled contiguous from 1
    by descending size. Edgeless graphs yield the singleton partition
    (q = 0.0 by convention).
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if g.num_edges == 0:
        return singleton_partition(g.n)
    path = _seed_path(seed)
    adjacency = g.adjacency
    best_labels = None
    best_q = -math.inf
    for restart in range(restarts):
        rng = derive_rng(*path, MODULE_DETECTION, restart)
        labels = _louvain(adjacency, rng)
        q = modularity(g, labels)
        if q > best_q:
            best_q = q
            best_labels = labels
    if best_q < 0.0:
        # All restarts stalled below the trivial all-in-one partition;
        # fall back to it so Q >= 0 always holds. One-module Q is
        # identically zero, so pin it rather than keep rounding noise.
        best_labels = np.zeros(g.n, dtype=np.int64)
        best_q = 0.0
    return Partition(assignment=_relabel_by_size(best_labels), q=float(best_q))


def nmi(p1, p2) -> float:
    """Normalized mutual information of two partitions of one node set.

    Mutual information normalized by the arithmetic mean of the two
    partition entropies; 1 for identical partitions (up to relabeling),
    near 0 for independent ones.
    """
    a = _labels(p1)
    b = _labels(p2)
    if a.shape != b.shape:
        raise ValueError("partitions must cover the same node set")
    n = a.shape[0]
    if n == 0:
        raise ValueError("empty partitions")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    na, nb = ai.max() + 1, bi.max() + 1
    if na == 1 and nb == 1:
        return 1.0
    confusion = np.zeros((na, nb), dtype=np.float64)
    np.add.at(confusion, (ai, bi), 1.0)
    pij = confusion / n
    pa = pij.sum(axis=1)
    pb = pij.sum(axis=0)
    nonzero = pij > 0
    mutual = float(
        np.sum(pij[nonzero] * np.log(pij[nonzero] / np.outer(pa, pb)[nonzero]))
    )
    entropy_a = -float(np.sum(pa[pa > 0] * np.log(pa[pa > 0])))
    entropy_b = -float(np.sum(pb[pb > 0] * np.log(pb[pb > 0])))
    denom = 0.5 * (entropy_a + entropy_b)
    if denom <= 0.0:
        return 0.0
    return float(min(max(mutual / denom, 0.0), 1.0))


def align_labels(labels, reference) -> np.ndarray:
    """Relabel ``labels`` onto ``reference``'s label space.

    Greedy maximum-overlap matching: repeatedly bind the (source,
    reference) module pair sharing the most nodes; sources left without
    a positive-overlap partner get fresh labels above the reference
    range, in ascending source order.
    """
    src = _labels(labels)
    ref = _labels(reference)
    if src.shape != ref.shape:
        raise ValueError("partitions must cover the same node set")
    src_ids = [int(v) for v in np.unique(src)]
    ref_ids = [int(v) for v in np.unique(ref)]
    overlaps = []
    for s in src_ids:
        mask = src == s
        for r in ref_ids:
            count = int(np.sum(ref[mask] == r))
            if count > 0:
                overlaps.append((-count, r, s))
    overlaps.sort()
    mapping: dict[int, int] = {}
    used_ref: set[int] = set()
    for neg_count, r, s in overlaps:
        if s in mapping or r in used_ref:
            continue
        mapping[s] = r
        used_ref.add(r)
    fresh = (max(ref_ids) if ref_ids else 0) + 1
    for s in src_ids:
        if s not in mapping:
            mapping[s] = fresh
            fresh += 1
    return np.array([mapping[int(v)] for v in src], dtype=np.int64)


def _detect_member(item) -> Partition:
    graph, seed_path, restarts = item
    return detect_modules(graph, seed_path, restarts)


def consensus_partition(
    ensemble: GraphEnsemble, seed, restarts: int = 10, threads: int = 1
) -> Partition:
    """Majority-vote partition across an ensemble's member partitions.

    Member partitions are label-aligned to the highest-Q member, then
    every node takes its most frequent aligned module (ties to the
    lowest label). Per-node frequencies are reported as confidence.
    The consensus q is the mean modularity of the consensus assignment
    over members that have edges (0.0 if none do).
    """
    path = _seed_path(seed)
    items = [
        (graph, (*path, CONSENSUS, index), restarts)
        for index, graph in enumerate(ensemble.graphs)
    ]
    partitions = parallel_map(_detect_member, items, threads)

    best_index = 0
    for index, part in enumerate(partitions):
        if part.q > partitions[best_index].q:
            best_index = index
    reference = partitions[best_index]

    aligned = np.stack(
        [align_labels(part.assignment, reference.assignment) for part in partitions]
    )
    n = ensemble.n
    consensus = np.zeros(n, dtype=np.int64)
    confidence = np.zeros(n, dtype=np.float64)
    for node in range(n):
        votes, counts = np.unique(aligned[:, node], return_counts=True)
        winner = votes[np.argmax(counts)]  # np.unique sorts: ties -> lowest label
        consensus[node] = winner
        confidence[node] = counts.max() / ensemble.size

    q_values = [
        modularity(graph, consensus)
        for graph in ensemble.graphs
        if graph.num_edges > 0
    ]
    q = float(np.mean(q_values)) if q_values else 0.0
    return Partition(
        assignment=_relabel_by_size(consensus), q=q, confidence=confidence
    )


def random_modular_baseline(reference: Partition, g: WeightedGraph, seed) -> WeightedGraph:
    """Planted-partition random graph matched to an observed network.

    Keeps the reference's module count and sizes, matches g's observed
    intra- and inter-module link densities in expectation, and draws
    edge weights uniformly from g's weight multiset. Deterministic
    under ``seed``.
    """
    if reference.n != g.n:
        raise ValueError("reference partition and graph sizes differ")
    if reference.num_modules < 1:
        raise ValueError("reference must have at least one module")
    rng = derive_rng(*_seed_path(seed), BASELINE)
    labels = reference.assignment
    n = g.n
    iu, ju = np.triu_indices(n, k=1)
    same = labels[iu] == labels[ju]
    intra_pairs = int(same.sum())
    inter_pairs = int(same.size - intra_pairs)
    if g.num_edges:
        edge_same = labels[g.edges[:, 0]] == labels[g.edges[:, 1]]
        intra_edges = int(edge_same.sum())
        inter_edges = g.num_edges - intra_edges
    else:
        intra_edges = inter_edges = 0
    p_intra = intra_edges / intra_pairs if intra_pairs else 0.0
    p_inter = inter_edges / inter_pairs if inter_pairs else 0.0
    probs = np.where(same, p_intra, p_inter)
    present = rng.random(probs.shape[0]) < probs
    count = int(present.sum())
    if count and g.num_edges:
        weights = rng.choice(g.weights, size=count, replace=True)
    else:
        weights = np.ones(count, dtype=np.float64)
    edges = np.column_stack([iu[present], ju[present]])
    return WeightedGraph(n=n, edges=edges, weights=weights)


@dataclass(frozen=True)
class SuitabilityCheck:
    k_max: float
    sqrt_2l: float
    passed: bool


@dataclass(frozen=True)
class ModuleResolution:
    module_id: int
    internal_links: int
    sqrt_2l: float
    self_consistent: bool


@dataclass(frozen=True)
class BaselineComparison:
    mean: float
    stddev: float
    ensemble_size: int


@dataclass(frozen=True)
class ValidationReport:
    suitability: SuitabilityCheck
    resolution: tuple[ModuleResolution, ...]
    nmi_vs_random: BaselineComparison | None = None

    def to_dict(self) -> dict:
        payload: dict = {
            "suitability": {
                "k_max": self.suitability.k_max,
                "sqrt_2L": self.suitability.sqrt_2l,
                "pass": self.suitability.passed,
            },
            "resolution": [
                {
                    "module": entry.module_id,
                    "l_s": entry.internal_links,
                    "sqrt_2L": entry.sqrt_2l,
                    "self_consistent": entry.self_consistent,
                }
                for entry in self.resolution
            ],
        }
        if self.nmi_vs_random is not None:
            payload["nmi_vs_random"] = {
                "mean": self.nmi_vs_random.mean,
                "stddev": self.nmi_vs_random.stddev,
                "ensemble_size": self.nmi_vs_random.ensemble_size,
            }
        return payload


def validate(
    g: WeightedGraph,
    partition: Partition,
    baseline_samples: int = 0,
    seed: int = 0,
    restarts: int = 10,
) -> ValidationReport:
    """Null-model suitability, resolution-limit and baseline checks.

    The degree condition passes iff k_max < sqrt(2L). A module is
    self-consistent iff its internal link count l_s >= sqrt(2L);
    modules below that scale may hide sub-modules. When
    ``baseline_samples`` > 0, that many planted-partition baselines are
    generated, re-clustered and compared to ``partition`` by NMI.
    """
    stats = graph_stats(g)
    sqrt_2l = math.sqrt(2.0 * stats.L)
    suitability = SuitabilityCheck(
        k_max=stats.k_max, sqrt_2l=sqrt_2l, passed=stats.k_max < sqrt_2l
    )
    internal = internal_link_counts(g, partition)
    resolution = tuple(
        ModuleResolution(
            module_id=module_id,
            internal_links=count,
            sqrt_2l=sqrt_2l,
            self_consistent=count >= sqrt_2l,
        )
        for module_id, count in sorted(internal.items())
    )
    comparison = None
    if baseline_samples > 0:
        values = []
        for index in range(baseline_samples):
            baseline = random_modular_baseline(partition, g, (seed, index))
            found = detect_modules(baseline, (seed, BASELINE, index), restarts)
            values.append(nmi(found, partition))
        comparison = BaselineComparison(
            mean=float(np.mean(values)),
            stddev=float(np.std(values)),
            ensemble_size=baseline_samples,
        )
    return ValidationReport(
        suitability=suitability, resolution=resolution, nmi_vs_random=comparison
    )


def write_partition_csv(
    partition: Partition, risk_ids: tuple[int, ...], path: str | Path
) -> None:
    """Export ``risk_id,module_id,confidence`` rows."""
    import csv

    if len(risk_ids) != partition.n:
        raise ValueError("risk_ids length must match partition size")
    confidence = partition.confidence
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["risk_id", "module_id", "confidence"])
        for node, rid in enumerate(risk_ids):
            conf = 1.0 if confidence is None else float(confidence[node])
            writer.writerow([rid, int(partition.assignment[node]), repr(conf)])


def write_validation_json(report: ValidationReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
