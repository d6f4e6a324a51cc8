"""Monte Carlo Susceptible-Infected cascades and systemic-impact scoring.

A cascade starts from one materialized seed risk. Newly materialized
risks attempt to materialize each still-susceptible neighbor once per
connecting edge, succeeding with probability equal to the edge weight;
the process stops when no new risk materializes. One attempt per edge
makes a cascade equivalent to reachability in a bond-percolated graph,
which gives exact small-instance expectations by enumerating edge
subsets.

Systemic impact of a risk is its mean cascade size (materialized risks,
seed excluded) over independent runs. In the default per-run-resample
mode every run draws a fresh ensemble member; fixed-graph mode replays
one network. Mean impacts are ranked and folded into High/Medium/Low
classes whose sizes copy the register's independent-impact counts.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._parallel import parallel_map
from ._seeds import CASCADE, derive_rng
from .network import GraphEnsemble, WeightedGraph
from .register import IMPACT_LEVELS, IMPACT_RANK, RiskRegister


@dataclass(frozen=True)
class CascadeConfig:
    runs: int = 1000
    base_seed: int = 0
    ensemble_mode: str = "resample"  # "resample" or "fixed"

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.ensemble_mode not in ("resample", "fixed"):
            raise ValueError("ensemble_mode must be 'resample' or 'fixed'")


@dataclass(frozen=True, eq=False)
class CascadeSummary:
    """Per-risk mean impacts, ranks and (optionally) qualitative classes.

    Arrays follow node order. ``trigger_counts`` is the (n, n) matrix of
    mean direct triggering events per run (u materialized v), present
    when the cascades were traced.
    """

    risk_ids: tuple[int, ...]
    mean_impact: np.ndarray
    rank: np.ndarray
    config: CascadeConfig
    systemic_class: tuple[str, ...] | None = None
    trigger_counts: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.risk_ids)

    def by_rank(self) -> np.ndarray:
        """Node indices ordered rank 1, 2, ..., n."""
        return np.argsort(self.rank, kind="stable")


def _seed_path(seed) -> tuple[int, ...]:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def _spread(g: WeightedGraph, seed_risk: int, rng, events: list | None = None) -> int:
    """One cascade; returns materialized count excluding the seed.

    Frontier nodes are processed in ascending node id, and each node
    attempts its still-susceptible neighbors in ascending id, drawing
    one uniform variate per attempted edge. Order fixes the PRNG stream
    only; the outcome distribution is order-free.
    """
    materialized = np.zeros(g.n, dtype=bool)
    materialized[seed_risk] = True
    frontier = [seed_risk]
    total = 0
    neighbors = g.neighbors
    while frontier:
        next_frontier = []
        for node in frontier:
            targets, weights = neighbors[node]
            for target, weight in zip(targets.tolist(), weights.tolist()):
                if materialized[target]:
                    continue
                if rng.random() < weight:
                    materialized[target] = True
                    next_frontier.append(target)
                    total += 1
                    if events is not None:
                        events.append((node, target))
        next_frontier.sort()
        frontier = next_frontier
    return total


def run_cascade(g: WeightedGraph, seed_risk: int, seed) -> int:
    """Count of risks materialized by one cascade from seed_risk.

    Deterministic under ``seed``. An isolated seed yields 0.
    """
    if not 0 <= seed_risk < g.n:
        raise ValueError(f"unknown node id {seed_risk}")
    rng = derive_rng(*_seed_path(seed), CASCADE)
    return _spread(g, seed_risk, rng)


def sample_cascade_sizes(
    g: WeightedGraph, seed_risk: int, runs: int, seed
) -> np.ndarray:
    """Vectorized batch of cascade sizes from one seed risk.

    Draws all per-edge activations for a run at once and measures
    reachability in the percolated graph, which has the same outcome
    distribution as the sequential cascade (one attempt per edge).
    Intended for bulk statistics on small graphs; memory grows with
    runs x edges.
    """
    if not 0 <= seed_risk < g.n:
        raise ValueError(f"unknown node id {seed_risk}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    rng = derive_rng(*_seed_path(seed), CASCADE)
    n = g.n
    num_edges = g.num_edges
    if num_edges == 0:
        return np.zeros(runs, dtype=np.int64)
    sizes = np.empty(runs, dtype=np.int64)
    hops = max(1, int(np.ceil(np.log2(max(n - 1, 1)))))
    chunk = max(1, 10_000_000 // num_edges)
    start = 0
    while start < runs:
        count = min(chunk, runs - start)
        active = rng.random((count, num_edges)) < g.weights
        reach = np.zeros((count, n, n), dtype=np.float32)
        reach[:, np.arange(n), np.arange(n)] = 1.0
        i, j = g.edges[:, 0], g.edges[:, 1]
        reach[:, i, j] = active
        reach[:, j, i] = active
        for _ in range(hops):
            reach = (reach @ reach > 0).astype(np.float32)
        sizes[start : start + count] = (
            reach[:, seed_risk, :].sum(axis=1).astype(np.int64) - 1
        )
        start += count
    return sizes


def _graph_for_run(graphs, mode: str, run: int) -> WeightedGraph:
    if isinstance(graphs, GraphEnsemble):
        if mode == "resample":
            return graphs.graphs[run % graphs.size]
        return graphs.graphs[0]
    if mode == "resample":
        raise ValueError("per-run resampling requires a GraphEnsemble")
    return graphs


def _cascade_block(item):
    """All cascades for a contiguous run range; returns integer sums."""
    graphs, config, run_range, record_events = item
    lo, hi = run_range
    some = _graph_for_run(graphs, config.ensemble_mode, lo)
    n = some.n
    counts = np.zeros(n, dtype=np.int64)
    triggers = np.zeros((n, n), dtype=np.int64) if record_events else None
    for run in range(lo, hi):
        g = _graph_for_run(graphs, config.ensemble_mode, run)
        for risk in range(n):
            rng = derive_rng(config.base_seed, CASCADE, risk, run)
            events: list | None = [] if record_events else None
            counts[risk] += _spread(g, risk, rng, events)
            if record_events:
                for u, v in events:
                    triggers[u, v] += 1
    return counts, triggers


def systemic_impact(
    graphs: GraphEnsemble | WeightedGraph,
    config: CascadeConfig,
    risk_ids: tuple[int, ...] | None = None,
    record_events: bool = False,
    threads: int = 1,
) -> CascadeSummary:
    """Mean cascade size and rank per risk over config.runs cascades.

    Every (risk, run) pair owns a PRNG stream derived from
    (base_seed, risk, run), so results are independent of execution
    order and thread count. Ranks are assigned by descending mean,
    ties by ascending risk_id. In resample mode runs cycle through the
    ensemble members; fixed mode replays a single graph (an ensemble's
    first member if an ensemble is passed).
    """
    first = _graph_for_run(graphs, config.ensemble_mode, 0)
    n = first.n
    if risk_ids is None:
        if isinstance(graphs, GraphEnsemble) and graphs.risk_ids:
            risk_ids = graphs.risk_ids
        else:
            risk_ids = tuple(range(n))
    if len(risk_ids) != n:
        raise ValueError("risk_ids length must match graph size")

    blocks = min(max(1, threads * 2), config.runs)
    bounds = np.linspace(0, config.runs, blocks + 1).astype(int)
    items = [
        (graphs, config, (int(lo), int(hi)), record_events)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    results = parallel_map(_cascade_block, items, threads)

    counts = np.zeros(n, dtype=np.int64)
    triggers = np.zeros((n, n), dtype=np.int64) if record_events else None
    for block_counts, block_triggers in results:
        counts += block_counts
        if record_events:
            triggers += block_triggers

    mean_impact = counts / float(config.runs)
    order = np.lexsort((np.asarray(risk_ids), -mean_impact))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(1, n + 1)
    trigger_counts = triggers / float(config.runs) if record_events else None
    return CascadeSummary(
        risk_ids=tuple(int(r) for r in risk_ids),
        mean_impact=mean_impact,
        rank=rank,
        config=config,
        trigger_counts=trigger_counts,
    )


def single_risk_impact(
    graphs: GraphEnsemble | WeightedGraph, config: CascadeConfig, risk_index: int
) -> float:
    """Mean cascade size for one seed risk; the what-if entry point.

    Uses the same per-(risk, run) streams as systemic_impact, so the
    value matches that risk's entry in the full summary.
    """
    first = _graph_for_run(graphs, config.ensemble_mode, 0)
    if not 0 <= risk_index < first.n:
        raise ValueError(f"unknown node id {risk_index}")
    total = 0
    for run in range(config.runs):
        g = _graph_for_run(graphs, config.ensemble_mode, run)
        rng = derive_rng(config.base_seed, CASCADE, risk_index, run)
        total += _spread(g, risk_index, rng)
    return total / float(config.runs)


def classify(summary: CascadeSummary, impact_counts: dict[str, int]) -> CascadeSummary:
    """Fold ranked risks into classes sized by the register's counts.

    The count(High) best-ranked risks become High, the next
    count(Medium) become Medium, the rest Low. Count-preserving by
    construction; boundaries inherit the rank tie-breaks.
    """
    total = sum(impact_counts.get(level, 0) for level in IMPACT_LEVELS)
    if total != summary.n:
        raise ValueError(
            f"class counts sum to {total}, expected {summary.n}"
        )
    classes = [""] * summary.n
    ordered = summary.by_rank()
    cursor = 0
    for level in IMPACT_LEVELS:
        for node in ordered[cursor : cursor + impact_counts.get(level, 0)]:
            classes[int(node)] = level
        cursor += impact_counts.get(level, 0)
    return dataclasses.replace(summary, systemic_class=tuple(classes))


@dataclass(frozen=True)
class MismatchCounts:
    systemic_ge_independent: int
    systemic_lt_independent: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.systemic_ge_independent, self.systemic_lt_independent)


def mismatch_table(summary: CascadeSummary, register: RiskRegister) -> MismatchCounts:
    """Ordinal comparison of systemic vs independent classes (Low < Medium < High)."""
    if summary.systemic_class is None:
        raise ValueError("classify must run before mismatch_table")
    if summary.n != register.n:
        raise ValueError("summary and register sizes differ")
    ge = 0
    for node, risk in enumerate(register.risks):
        if IMPACT_RANK[summary.systemic_class[node]] >= IMPACT_RANK[risk.independent_impact]:
            ge += 1
    return MismatchCounts(
        systemic_ge_independent=ge, systemic_lt_independent=summary.n - ge
    )


def _mismatch_word(systemic: str, independent: str) -> str:
    delta = IMPACT_RANK[systemic] - IMPACT_RANK[independent]
    if delta > 0:
        return "greater"
    if delta < 0:
        return "less"
    return "equal"


def write_summary_csv(
    summary: CascadeSummary, register: RiskRegister, path: str | Path
) -> None:
    """Per-risk impact table, one row per risk in register order."""
    if summary.systemic_class is None:
        raise ValueError("classify must run before export")
    if summary.n != register.n:
        raise ValueError("summary and register sizes differ")
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "risk_id",
                "title",
                "firm_id",
                "mean_systemic_impact",
                "rank",
                "systemic_class",
                "independent_impact",
                "mismatch",
            ]
        )
        for node, risk in enumerate(register.risks):
            writer.writerow(
                [
                    risk.risk_id,
                    risk.title,
                    risk.firm_id,
                    repr(float(summary.mean_impact[node])),
                    int(summary.rank[node]),
                    summary.systemic_class[node],
                    risk.independent_impact,
                    _mismatch_word(
                        summary.systemic_class[node], risk.independent_impact
                    ),
                ]
            )
