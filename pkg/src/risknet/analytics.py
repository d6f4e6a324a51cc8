"""Firm-level derived products and the cross-measure robustness harness.

Horizon-scanning coverage asks how much of each network module a firm's
own register reaches. The liability network redraws cascade traces at
the firm level: a directed firm-to-firm weight counts how often one
firm's risks directly materialized another firm's risks, normalized by
the triggering firm's register size. The emerging-risk report surfaces
the top systemic risks next to their independent assessments. The
robustness suite reruns the whole pipeline per similarity measure under
identical seeds and compares outcomes against the Cosine reference.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cascade import CascadeSummary, MismatchCounts, _mismatch_word
from .community import Partition, align_labels
from .register import RiskRegister
from .similarity import Measure, sensitivity_curve


@dataclass(frozen=True, eq=False)
class HorizonTable:
    """Per-firm share of reported risks landing in each module.

    ``percentages`` is unrounded; display rounding to one decimal place
    is applied only at export time.
    """

    firms: tuple[str, ...]
    modules: tuple[int, ...]
    counts: np.ndarray  # (F, M) int64
    percentages: np.ndarray  # (F, M) float64, rows sum to 100

    def coverage(self, firm: str) -> np.ndarray:
        return self.percentages[self.firms.index(firm)]


def horizon_table(register: RiskRegister, partition: Partition) -> HorizonTable:
    """Cross-tabulate firms against consensus modules, as percentages."""
    if partition.n != register.n:
        raise ValueError("partition must cover every risk in the register")
    modules = tuple(range(1, partition.num_modules + 1))
    firm_index = register.firm_codes()
    firms = register.firms
    counts = np.zeros((len(firms), len(modules)), dtype=np.int64)
    for node in range(register.n):
        counts[firm_index[node], partition.assignment[node] - 1] += 1
    totals = counts.sum(axis=1)
    keep = totals > 0
    if not keep.all():
        dropped = [firm for firm, ok in zip(firms, keep) if not ok]
        warnings.warn(f"firms with no reported risks excluded: {dropped}")
        firms = tuple(firm for firm, ok in zip(firms, keep) if ok)
        counts = counts[keep]
        totals = totals[keep]
    percentages = counts / totals[:, None] * 100.0
    return HorizonTable(
        firms=firms, modules=modules, counts=counts, percentages=percentages
    )


def coverage_gaps(table: HorizonTable) -> dict[str, list[int]]:
    """Module ids with zero identified risks, per firm."""
    gaps: dict[str, list[int]] = {}
    for row, firm in enumerate(table.firms):
        gaps[firm] = [
            module
            for column, module in enumerate(table.modules)
            if table.counts[row, column] == 0
        ]
    return gaps


@dataclass(frozen=True, eq=False)
class LiabilityNetwork:
    """Directed firm-to-firm triggering rates from cascade traces.

    ``weights`` keeps the full matrix including the within-firm
    diagonal; degree sums and tabular exports exclude self-links.
    """

    firms: tuple[str, ...]
    weights: np.ndarray  # (F, F) float64

    def _off_diagonal(self) -> np.ndarray:
        out = self.weights.copy()
        np.fill_diagonal(out, 0.0)
        return out

    def out_degree(self) -> np.ndarray:
        return self._off_diagonal().sum(axis=1)

    def in_degree(self) -> np.ndarray:
        return self._off_diagonal().sum(axis=0)

    def within_firm(self) -> np.ndarray:
        return np.diagonal(self.weights).copy()


def liability_network(
    register: RiskRegister, summary: CascadeSummary
) -> LiabilityNetwork:
    """Aggregate direct triggering events to firm level.

    weight(i -> j) = mean count of events where a risk reported by firm
    i materialized a risk reported by firm j, divided by the number of
    risks firm i reported.
    """
    if summary.trigger_counts is None:
        raise ValueError("summary lacks cascade traces; rerun with record_events")
    if summary.n != register.n:
        raise ValueError("summary and register sizes differ")
    firms = register.firms
    firm_index = register.firm_codes()
    num = len(firms)
    totals = np.zeros((num, num), dtype=np.float64)
    np.add.at(
        totals,
        (firm_index[:, None], firm_index[None, :]),
        summary.trigger_counts,
    )
    reported = np.bincount(firm_index, minlength=num).astype(np.float64)
    weights = totals / reported[:, None]
    return LiabilityNetwork(firms=firms, weights=weights)


@dataclass(frozen=True)
class EmergingRisk:
    rank: int
    risk_id: int
    title: str
    firm_id: str
    systemic_class: str
    mean_impact: float
    independent_impact: str
    mismatch: str


def emerging_risk_report(
    summary: CascadeSummary, register: RiskRegister, top_k: int
) -> list[EmergingRisk]:
    """Top risks by systemic rank, with their independent assessments."""
    if summary.systemic_class is None:
        raise ValueError("classify must run before the emerging-risk report")
    if summary.n != register.n:
        raise ValueError("summary and register sizes differ")
    if top_k < 0:
        raise ValueError("top_k must be >= 0")
    if top_k > summary.n:
        warnings.warn(f"top_k {top_k} clamped to register size {summary.n}")
        top_k = summary.n
    rows = []
    for node in summary.by_rank()[:top_k]:
        node = int(node)
        risk = register.risks[node]
        rows.append(
            EmergingRisk(
                rank=int(summary.rank[node]),
                risk_id=risk.risk_id,
                title=risk.title,
                firm_id=risk.firm_id,
                systemic_class=summary.systemic_class[node],
                mean_impact=float(summary.mean_impact[node]),
                independent_impact=risk.independent_impact,
                mismatch=_mismatch_word(
                    summary.systemic_class[node], risk.independent_impact
                ),
            )
        )
    return rows


@dataclass(frozen=True)
class MeasureOutcome:
    measure: Measure
    mismatch: MismatchCounts
    match_fraction: float


@dataclass(frozen=True, eq=False)
class RobustnessReport:
    """Cross-measure comparison against the Cosine reference."""

    outcomes: tuple[MeasureOutcome, ...]
    reference: Measure
    sensitivity: dict[str, list[tuple[int, float]]]

    def to_dict(self) -> dict:
        return {
            "reference": str(self.reference),
            "outcomes": [
                {
                    "measure": str(item.measure),
                    "systemic_ge_independent": item.mismatch.systemic_ge_independent,
                    "systemic_lt_independent": item.mismatch.systemic_lt_independent,
                    "match_fraction": item.match_fraction,
                }
                for item in self.outcomes
            ],
            "sensitivity": {
                name: [[step, value] for step, value in curve]
                for name, curve in self.sensitivity.items()
            },
        }


def robustness_suite(register: RiskRegister, measures, config) -> RobustnessReport:
    """Rerun the full pipeline per measure under identical seeds.

    The Cosine measure is always evaluated first as the alignment
    reference. Every measure shares the same base seed, so measures
    with identical similarity matrices produce identical statistics.
    """
    from .pipeline import run_measure_pipeline  # deferred: avoids an import cycle

    ordered: list[Measure] = [Measure.COSINE]
    for item in measures:
        measure = Measure(item)
        if measure not in ordered:
            ordered.append(measure)

    reference_partition: Partition | None = None
    outcomes = []
    sensitivity: dict[str, list[tuple[int, float]]] = {}
    for measure in ordered:
        result = run_measure_pipeline(register, measure, config)
        if reference_partition is None:
            reference_partition = result.partition
            match = 1.0
        else:
            aligned = align_labels(result.partition, reference_partition)
            match = float(
                np.mean(aligned == reference_partition.assignment)
            )
        outcomes.append(
            MeasureOutcome(
                measure=measure, mismatch=result.mismatch, match_fraction=match
            )
        )
        sensitivity[str(measure)] = sensitivity_curve(
            register.num_tags, measure, seed=config.base_seed
        )
    return RobustnessReport(
        outcomes=tuple(outcomes),
        reference=Measure.COSINE,
        sensitivity=sensitivity,
    )


def write_horizon_csv(table: HorizonTable, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["firm_id"] + [f"module_{m}" for m in table.modules])
        for row, firm in enumerate(table.firms):
            writer.writerow(
                [firm] + [repr(float(v)) for v in table.percentages[row]]
            )


def write_horizon_json(table: HorizonTable, path: str | Path) -> None:
    """Unrounded percentages, raw counts and coverage gaps per firm."""
    gaps = coverage_gaps(table)
    payload = {
        "modules": list(table.modules),
        "firms": {
            firm: {
                "counts": [int(v) for v in table.counts[row]],
                "percentages": [float(v) for v in table.percentages[row]],
                "uncovered_modules": gaps[firm],
            }
            for row, firm in enumerate(table.firms)
        },
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_horizon_markdown(table: HorizonTable, path: str | Path) -> None:
    """Display table with percentages rounded to one decimal place."""
    lines = [
        "| Firm | " + " | ".join(f"Module {m}" for m in table.modules) + " |",
        "| --- | " + " | ".join("---" for _ in table.modules) + " |",
    ]
    for row, firm in enumerate(table.firms):
        cells = " | ".join(f"{v:.1f}" for v in table.percentages[row])
        lines.append(f"| {firm} | {cells} |")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_liability_csv(network: LiabilityNetwork, path: str | Path) -> None:
    """Directed firm-to-firm edges; self-links excluded."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["source_firm", "target_firm", "weight"])
        for i, source in enumerate(network.firms):
            for j, target in enumerate(network.firms):
                if i == j or network.weights[i, j] <= 0.0:
                    continue
                writer.writerow([source, target, repr(float(network.weights[i, j]))])


def write_liability_json(network: LiabilityNetwork, path: str | Path) -> None:
    payload = {
        "firms": list(network.firms),
        "links": [
            {
                "source": source,
                "target": target,
                "weight": float(network.weights[i, j]),
            }
            for i, source in enumerate(network.firms)
            for j, target in enumerate(network.firms)
            if i != j and network.weights[i, j] > 0.0
        ],
        "within_firm": {
            firm: float(value)
            for firm, value in zip(network.firms, network.within_firm())
        },
        "in_degree": {
            firm: float(value)
            for firm, value in zip(network.firms, network.in_degree())
        },
        "out_degree": {
            firm: float(value)
            for firm, value in zip(network.firms, network.out_degree())
        },
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_emerging_csv(rows: list[EmergingRisk], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "rank",
                "risk_id",
                "title",
                "firm_id",
                "systemic_class",
                "mean_systemic_impact",
                "independent_impact",
                "mismatch",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row.rank,
                    row.risk_id,
                    row.title,
                    row.firm_id,
                    row.systemic_class,
                    repr(row.mean_impact),
                    row.independent_impact,
                    row.mismatch,
                ]
            )


def write_robustness_csvs(report: RobustnessReport, out_dir: str | Path) -> list[Path]:
    """Plot-ready tables: mismatch counts, match fractions, sensitivity curves."""
    out = Path(out_dir)
    mismatch_path = out / "robustness_mismatch.csv"
    with mismatch_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["measure", "systemic_ge_independent", "systemic_lt_independent"]
        )
        for item in report.outcomes:
            writer.writerow(
                [
                    str(item.measure),
                    item.mismatch.systemic_ge_independent,
                    item.mismatch.systemic_lt_independent,
                ]
            )
    match_path = out / "robustness_module_match.csv"
    with match_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["measure", "match_fraction"])
        for item in report.outcomes:
            writer.writerow([str(item.measure), repr(item.match_fraction)])
    curves_path = out / "robustness_sensitivity.csv"
    with curves_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["measure", "flipped_bits", "similarity"])
        for name in sorted(report.sensitivity):
            for step, value in report.sensitivity[name]:
                writer.writerow([name, step, repr(float(value))])
    return [mismatch_path, match_path, curves_path]


def write_robustness_json(report: RobustnessReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
