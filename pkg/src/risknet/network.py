"""Probabilistic weighted networks sampled from a similarity matrix.

For each unordered node pair (i, j), an edge is present independently
with probability equal to the pair's similarity, and a present edge
carries that similarity as its weight (proportionality constant 1).
Pair-level randomness is consumed in fixed i < j lexicographic order
from a per-graph stream, so sampling is schedule-independent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from ._seeds import GRAPH_SAMPLING, derive_rng
from .register import RiskRegister
from .similarity import Measure, SimilarityMatrix


@dataclass
class WeightedGraph:
    """Undirected weighted graph on nodes 0..n-1, stored as an edge list.

    Edges are (i, j) with i < j, weights in (0, 1]. Instances are
    treated as immutable once built.
    """

    n: int
    edges: np.ndarray  # (L, 2) int64, i < j, lexicographically sorted
    weights: np.ndarray  # (L,) float64

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if self.edges.shape[0] != self.weights.shape[0]:
            raise ValueError("edges and weights must have equal length")
        if self.edges.size:
            i, j = self.edges[:, 0], self.edges[:, 1]
            if (i >= j).any() or (i < 0).any() or (j >= self.n).any():
                raise ValueError("edges must satisfy 0 <= i < j < n")
            keys = i * self.n + j
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edges")
            if (self.weights <= 0).any() or (self.weights > 1).any():
                raise ValueError("weights must lie in (0, 1]")

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency with zero diagonal."""
        a = np.zeros((self.n, self.n), dtype=np.float64)
        if self.edges.size:
            i, j = self.edges[:, 0], self.edges[:, 1]
            a[i, j] = self.weights
            a[j, i] = self.weights
        return a

    @cached_property
    def neighbors(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-node (neighbor ids, edge weights), neighbors ascending."""
        lists: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for (i, j), w in zip(self.edges, self.weights):
            lists[i].append((int(j), float(w)))
            lists[j].append((int(i), float(w)))
        out = []
        for entries in lists:
            entries.sort()
            if entries:
                ids, ws = zip(*entries)
            else:
                ids, ws = (), ()
            out.append((np.array(ids, dtype=np.int64), np.array(ws, dtype=np.float64)))
        return out

    def weighted_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


@dataclass
class GraphEnsemble:
    """Independent samples drawn from one similarity matrix."""

    graphs: list[WeightedGraph]
    measure: Measure
    base_seed: int
    risk_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("ensemble must contain at least one graph")
        sizes = {g.n for g in self.graphs}
        if len(sizes) != 1:
            raise ValueError("all ensemble members must share the node count")

    @property
    def size(self) -> int:
        return len(self.graphs)

    @property
    def n(self) -> int:
        return self.graphs[0].n


@dataclass(frozen=True)
class GraphStats:
    L: int  # number of stored (undirected) edges
    k_max: float  # maximum weighted degree
    m: float  # total edge weight (half the adjacency sum)


def sample_graph(sim: SimilarityMatrix, seed: int) -> WeightedGraph:
    """Draw one network: each pair linked with probability = similarity."""
    rng = derive_rng(seed)
    n = sim.n
    iu, ju = np.triu_indices(n, k=1)
    probs = sim.values[iu, ju]
    present = rng.random(probs.shape[0]) < probs
    edges = np.column_stack([iu[present], ju[present]])
    return WeightedGraph(n=n, edges=edges, weights=probs[present])


def sample_ensemble(sim: SimilarityMatrix, size: int, base_seed: int) -> GraphEnsemble:
    """Draw ``size`` independent networks with member seeds derived
    deterministically from ``base_seed``."""
    if size < 1:
        raise ValueError("ensemble size must be >= 1")
    graphs = []
    for k in range(size):
        edges, weights = _sample_member(sim, base_seed, k)
        graphs.append(WeightedGraph(n=sim.n, edges=edges, weights=weights))
    return GraphEnsemble(
        graphs=graphs, measure=sim.measure, base_seed=base_seed, risk_ids=sim.risk_ids
    )


def _sample_member(sim: SimilarityMatrix, base_seed: int, index: int):
    rng = derive_rng(base_seed, GRAPH_SAMPLING, index)
    iu, ju = np.triu_indices(sim.n, k=1)
    probs = sim.values[iu, ju]
    present = rng.random(probs.shape[0]) < probs
    return np.column_stack([iu[present], ju[present]]), probs[present]


def graph_stats(g: WeightedGraph) -> GraphStats:
    """Link count L, maximum weighted degree and total weight m."""
    degrees = g.weighted_degrees()
    k_max = float(degrees.max()) if g.n else 0.0
    return GraphStats(L=g.num_edges, k_max=k_max, m=float(g.weights.sum()))


def write_edgelist_csv(
    g: WeightedGraph, path: str | Path, risk_ids: tuple[int, ...] | None = None
) -> None:
    """Weighted edge list as ``source,target,weight`` rows.

    Nodes are labeled by risk_id when provided, node index otherwise.
    """
    label = (lambda v: str(risk_ids[v])) if risk_ids else str
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["source", "target", "weight"])
        for (i, j), w in zip(g.edges, g.weights):
            writer.writerow([label(int(i)), label(int(j)), repr(float(w))])


def write_graphml(
    g: WeightedGraph,
    path: str | Path,
    register: RiskRegister | None = None,
    module_ids: np.ndarray | None = None,
    systemic_classes: list[str] | None = None,
) -> None:
    """GraphML export with node attributes for external visualization.

    Node attributes: risk_id, title, firm_id, independent_impact (when a
    register is given), module (when a partition assignment is given)
    and systemic_class (when cascade classes are given).
    """
    keys: list[tuple[str, str, str]] = []  # (key id, attr name, type)
    if register is not None:
        keys += [
            ("d_rid", "risk_id", "long"),
            ("d_title", "title", "string"),
            ("d_firm", "firm_id", "string"),
            ("d_indep", "independent_impact", "string"),
        ]
    if module_ids is not None:
        keys.append(("d_module", "module", "long"))
    if systemic_classes is not None:
        keys.append(("d_sys", "systemic_class", "string"))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
    ]
    for key_id, name, attr_type in keys:
        lines.append(
            f'  <key id="{key_id}" for="node" attr.name="{name}" attr.type="{attr_type}"/>'
        )
    lines.append('  <key id="e_w" for="edge" attr.name="weight" attr.type="double"/>')
    lines.append('  <graph id="G" edgedefault="undirected">')
    for node in range(g.n):
        data = []
        if register is not None:
            risk = register.risks[node]
            data += [
                f'<data key="d_rid">{risk.risk_id}</data>',
                f'<data key="d_title">{escape(risk.title)}</data>',
                f'<data key="d_firm">{escape(risk.firm_id)}</data>',
                f'<data key="d_indep">{risk.independent_impact}</data>',
            ]
        if module_ids is not None:
            data.append(f'<data key="d_module">{int(module_ids[node])}</data>')
        if systemic_classes is not None:
            data.append(f'<data key="d_sys">{systemic_classes[node]}</data>')
        if data:
            lines.append(f'    <node id="n{node}">' + "".join(data) + "</node>")
        else:
            lines.append(f'    <node id="n{node}"/>')
    for (i, j), w in zip(g.edges, g.weights):
        lines.append(
            f'    <edge source="n{int(i)}" target="n{int(j)}">'
            f'<data key="e_w">{float(w)!r}</data></edge>'
        )
    lines += ["  </graph>", "</graphml>", ""]
    Path(path).write_text("\n".join(lines), encoding="utf-8")
