"""Independent brute-force oracles used by the test suite.

Everything here is deliberately naive: exhaustive enumeration over edge
subsets for cascade expectations and over all set partitions for
maximum modularity. The library must match these, not the other way
around.
"""

from __future__ import annotations

import itertools

import numpy as np

from risknet import WeightedGraph


def graph_from_edges(n: int, edges, weights) -> WeightedGraph:
    edge_array = np.array(edges, dtype=np.int64).reshape(-1, 2)
    weight_array = np.array(weights, dtype=np.float64)
    return WeightedGraph(n=n, edges=edge_array, weights=weight_array)


def _reachable(n: int, active_edges, start: int) -> set[int]:
    adjacency: dict[int, list[int]] = {v: [] for v in range(n)}
    for i, j in active_edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for other in adjacency[node]:
            if other not in seen:
                seen.add(other)
                stack.append(other)
    return seen


def exact_expected_cascade_size(g: WeightedGraph, seed_risk: int) -> float:
    """Expectation by summing over all 2^E edge-activation subsets.

    A one-shot cascade equals reachability in the percolated graph, so
    the expected materialized count (seed excluded) is the probability-
    weighted mean of |reachable| - 1 over every subset.
    """
    num_edges = g.num_edges
    if num_edges > 20:
        raise ValueError("exhaustive oracle limited to 20 edges")
    edge_list = [(int(i), int(j)) for i, j in g.edges]
    total = 0.0
    for mask in range(1 << num_edges):
        probability = 1.0
        active = []
        for position in range(num_edges):
            if (mask >> position) & 1:
                probability *= g.weights[position]
                active.append(edge_list[position])
            else:
                probability *= 1.0 - g.weights[position]
        total += probability * (len(_reachable(g.n, active, seed_risk)) - 1)
    return total


def is_connected(n: int, edges) -> bool:
    if n <= 1:
        return True
    return len(_reachable(n, list(edges), 0)) == n


def connected_graphs(n: int):
    """All connected labeled graphs on n nodes, as edge tuples."""
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        edges = tuple(pairs[k] for k in range(len(pairs)) if (bits >> k) & 1)
        if is_connected(n, edges):
            yield edges


def set_partitions(n: int):
    """Every partition of range(n), via restricted growth strings."""
    labels = [0] * n
    while True:
        yield list(labels)
        position = n - 1
        while position > 0:
            if labels[position] <= max(labels[:position]):
                break
            position -= 1
        if position == 0:
            return
        labels[position] += 1
        for rest in range(position + 1, n):
            labels[rest] = 0


def brute_force_modularity(g: WeightedGraph, labels) -> float:
    """Direct evaluation of Q, independent of the library's code path."""
    labels = np.asarray(labels)
    m = float(g.weights.sum())
    degrees = np.zeros(g.n)
    for (i, j), w in zip(g.edges, g.weights):
        degrees[i] += w
        degrees[j] += w
    q = 0.0
    for module in set(labels.tolist()):
        members = set(np.flatnonzero(labels == module).tolist())
        internal = sum(
            w
            for (i, j), w in zip(g.edges, g.weights)
            if int(i) in members and int(j) in members
        )
        degree_sum = sum(degrees[v] for v in members)
        q += internal / m - (degree_sum / (2.0 * m)) ** 2
    return q


def brute_force_max_modularity(g: WeightedGraph) -> tuple[float, list[int]]:
    """Global maximum of Q over all set partitions of the node set."""
    best_q = -np.inf
    best_labels: list[int] = []
    for labels in set_partitions(g.n):
        q = brute_force_modularity(g, labels)
        if q > best_q:
            best_q = q
            best_labels = list(labels)
    return best_q, best_labels
