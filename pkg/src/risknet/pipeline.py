"""End-to-end orchestration: register in, reproducible artifacts out.

The pipeline per measure is: similarity matrix, probabilistic graph
ensemble, consensus module partition, Monte Carlo cascades, qualitative
classification, mismatch counts. ``analyze`` additionally validates the
partition, derives the firm-level products and writes every artifact
plus a manifest with content hashes. Identical (input, config, seed)
produce byte-identical artifacts.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .analytics import (
    emerging_risk_report,
    horizon_table,
    liability_network,
    write_emerging_csv,
    write_horizon_csv,
    write_horizon_json,
    write_horizon_markdown,
    write_liability_csv,
    write_liability_json,
)
from .cascade import (
    CascadeConfig,
    CascadeSummary,
    MismatchCounts,
    classify,
    mismatch_table,
    systemic_impact,
    write_summary_csv,
)
from .community import (
    Partition,
    consensus_partition,
    validate,
    write_partition_csv,
    write_validation_json,
)
from .network import GraphEnsemble, sample_ensemble, write_edgelist_csv, write_graphml
from .register import RiskRegister, impact_counts
from .similarity import Measure, SimilarityMatrix, similarity_matrix, write_similarity_csv


class StageError(RuntimeError):
    """A pipeline stage failed; the message names the stage."""


def _run_stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(f"stage '{stage}' failed: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Knobs for a reproducible pipeline run."""

    measure: Measure = Measure.COSINE
    ensemble_size: int = 1000
    cascade_runs: int = 1000
    restarts: int = 10
    base_seed: int = 0
    ensemble_mode: str = "resample"
    threads: int = 1
    top_k: int = 5
    baseline_samples: int = 0

    def __post_init__(self):
        object.__setattr__(self, "measure", Measure(self.measure))
        for field in ("ensemble_size", "cascade_runs", "restarts", "threads"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        if self.top_k < 0 or self.baseline_samples < 0:
            raise ValueError("top_k and baseline_samples must be >= 0")
        if self.ensemble_mode not in ("resample", "fixed"):
            raise ValueError("ensemble_mode must be 'resample' or 'fixed'")

    def to_dict(self) -> dict:
        payload = dataclasses.asdict(self)
        payload["measure"] = str(self.measure)
        return payload


@dataclass(frozen=True, eq=False)
class PipelineResult:
    """One measure's full chain of intermediate and final products."""

    measure: Measure
    similarity: SimilarityMatrix
    ensemble: GraphEnsemble
    partition: Partition
    summary: CascadeSummary
    mismatch: MismatchCounts


def run_measure_pipeline(
    register: RiskRegister,
    measure: Measure,
    config: RunConfig,
    record_events: bool = False,
) -> PipelineResult:
    """Similarity -> ensemble -> consensus -> cascades -> classes.

    Every stage consumes streams derived from config.base_seed alone,
    so two measures with identical similarity matrices yield identical
    downstream results.
    """
    sim = _run_stage("similarity", similarity_matrix, register, Measure(measure))
    ensemble = _run_stage(
        "graph sampling", sample_ensemble, sim, config.ensemble_size, config.base_seed
    )
    partition = _run_stage(
        "module detection",
        consensus_partition,
        ensemble,
        config.base_seed,
        restarts=config.restarts,
        threads=config.threads,
    )
    cascade_config = CascadeConfig(
        runs=config.cascade_runs,
        base_seed=config.base_seed,
        ensemble_mode=config.ensemble_mode,
    )
    summary = _run_stage(
        "cascades",
        systemic_impact,
        ensemble,
        cascade_config,
        risk_ids=register.risk_ids,
        record_events=record_events,
        threads=config.threads,
    )
    summary = _run_stage("classification", classify, summary, impact_counts(register))
    return PipelineResult(
        measure=Measure(measure),
        similarity=sim,
        ensemble=ensemble,
        partition=partition,
        summary=summary,
        mismatch=_run_stage("mismatch", mismatch_table, summary, register),
    )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out_dir: str | Path, config: RunConfig, files: list[Path]) -> dict:
    """Record config, seed and content hashes; no timestamps, stable bytes."""
    out = Path(out_dir)
    manifest = {
        "config": config.to_dict(),
        "seed": config.base_seed,
        "measure": str(config.measure),
        "files": {path.name: _sha256(path) for path in sorted(files)},
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


def analyze(register: RiskRegister, config: RunConfig, out_dir: str | Path) -> dict:
    """Full single-measure analysis; writes all artifacts, returns the manifest.

    The exported network, its statistics and the validation report use
    the first ensemble member as the representative sampled graph; the
    partition and cascade statistics aggregate the whole ensemble.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = run_measure_pipeline(register, config.measure, config, record_events=True)

    representative = result.ensemble.graphs[0]
    report = _run_stage(
        "validation",
        validate,
        representative,
        result.partition,
        baseline_samples=config.baseline_samples,
        seed=config.base_seed,
        restarts=config.restarts,
    )
    horizon = _run_stage("horizon table", horizon_table, register, result.partition)
    liability = _run_stage(
        "liability network", liability_network, register, result.summary
    )
    emerging = _run_stage(
        "emerging-risk report", emerging_risk_report, result.summary, register,
        config.top_k,
    )

    files = []

    def emit(name: str, writer, *args) -> None:
        path = out / name
        _run_stage(f"export {name}", writer, *args, path)
        files.append(path)

    emit("similarity.csv", write_similarity_csv, result.similarity)
    path = out / "network_edges.csv"
    write_edgelist_csv(representative, path, risk_ids=register.risk_ids)
    files.append(path)
    path = out / "network.graphml"
    write_graphml(
        representative,
        path,
        register=register,
        module_ids=result.partition.assignment,
        systemic_classes=result.summary.systemic_class,
    )
    files.append(path)
    emit("partition.csv", write_partition_csv, result.partition, register.risk_ids)
    emit("validation.json", write_validation_json, report)
    emit("cascade_summary.csv", write_summary_csv, result.summary, register)
    emit("horizon.csv", write_horizon_csv, horizon)
    emit("horizon.json", write_horizon_json, horizon)
    emit("horizon.md", write_horizon_markdown, horizon)
    emit("liability.csv", write_liability_csv, liability)
    emit("liability.json", write_liability_json, liability)
    emit("emerging_risks.csv", write_emerging_csv, emerging)
    return write_manifest(out, config, files)
