"""Command line entry point.

Subcommands mirror the four analysis activities: ``analyze`` runs the
full single-measure pipeline, ``robustness`` sweeps similarity
measures, ``synth`` generates block-structured registers, ``cascade``
answers a single-risk what-if. Progress and warnings go to standard
error; data goes to files or standard output. Exit codes: 0 success,
1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cascade import CascadeConfig, single_risk_impact
from .network import sample_ensemble
from .pipeline import RunConfig, StageError, analyze, write_manifest
from .register import RegisterError, SyntheticSpec, load_register, save_register, synthesize_register
from .similarity import Measure, similarity_matrix


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors must map to exit code 1
        raise _UsageError(message)


def _progress(message: str) -> None:
    print(f"[risknet] {message}", file=sys.stderr)


def _measure_choices() -> list[str]:
    return [measure.value for measure in Measure]


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="register CSV path")
    parser.add_argument(
        "--measure", default=Measure.COSINE.value, choices=_measure_choices()
    )
    parser.add_argument("--ensemble-size", type=int, default=1000)
    parser.add_argument("--cascade-runs", type=int, default=1000)
    parser.add_argument("--restarts", type=int, default=10)
    parser.add_argument("--seed", type=int, required=True, help="base PRNG seed")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--ensemble-mode", default="resample", choices=["resample", "fixed"]
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="risknet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_analyze = sub.add_parser("analyze", help="full pipeline on one measure")
    _add_run_flags(p_analyze)
    p_analyze.add_argument("--out", default="out", help="output directory")
    p_analyze.add_argument("--top-k", type=int, default=5)
    p_analyze.add_argument(
        "--baseline-samples",
        type=int,
        default=0,
        help="random-baseline partitions for the validation report",
    )

    p_rob = sub.add_parser("robustness", help="cross-measure comparison")
    _add_run_flags(p_rob)
    p_rob.add_argument("--out", default="out", help="output directory")
    p_rob.add_argument(
        "--measures",
        default=",".join(_measure_choices()),
        help="comma-separated measure list (cosine reference always included)",
    )

    p_synth = sub.add_parser("synth", help="generate a block-structured register")
    p_synth.add_argument("--out", required=True, help="register CSV to write")
    p_synth.add_argument("--modules", type=int, default=5)
    p_synth.add_argument("--risks-per-module", type=int, default=10)
    p_synth.add_argument("--tags-per-module", type=int, default=4)
    p_synth.add_argument("--noise", type=float, default=0.05)
    p_synth.add_argument("--firms", type=int, default=5)
    p_synth.add_argument("--total-tags", type=int, default=None)
    p_synth.add_argument("--seed", type=int, default=0)

    p_cascade = sub.add_parser("cascade", help="what-if: mean impact of one risk")
    _add_run_flags(p_cascade)
    p_cascade.add_argument("--risk", type=int, required=True, help="seed risk_id")
    return parser


def _run_config(args: argparse.Namespace, **extra) -> RunConfig:
    return RunConfig(
        measure=Measure(args.measure),
        ensemble_size=args.ensemble_size,
        cascade_runs=args.cascade_runs,
        restarts=args.restarts,
        base_seed=args.seed,
        ensemble_mode=args.ensemble_mode,
        threads=args.threads,
        **extra,
    )


def _cmd_analyze(args: argparse.Namespace) -> int:
    register = load_register(args.input)
    config = _run_config(
        args, top_k=args.top_k, baseline_samples=args.baseline_samples
    )
    _progress(
        f"analyze: {register.n} risks, measure={config.measure}, "
        f"seed={config.base_seed}"
    )
    manifest = analyze(register, config, args.out)
    _progress(f"analyze: wrote {len(manifest['files'])} artifacts to {args.out}")
    return 0


def _cmd_robustness(args: argparse.Namespace) -> int:
    from .analytics import robustness_suite, write_robustness_csvs, write_robustness_json

    register = load_register(args.input)
    config = _run_config(args)
    measures = [Measure(name.strip()) for name in args.measures.split(",") if name.strip()]
    if not measures:
        raise _UsageError("--measures must name at least one measure")
    _progress(f"robustness: {len(measures)} measures, seed={config.base_seed}")
    report = robustness_suite(register, measures, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = write_robustness_csvs(report, out)
    json_path = out / "robustness.json"
    write_robustness_json(report, json_path)
    files.append(json_path)
    write_manifest(out, config, files)
    _progress(f"robustness: wrote {len(files)} artifacts to {args.out}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        num_modules=args.modules,
        risks_per_module=args.risks_per_module,
        tags_per_module=args.tags_per_module,
        noise_rate=args.noise,
        firms=args.firms,
        seed=args.seed,
        total_tags=args.total_tags,
    )
    register = synthesize_register(spec)
    save_register(register, args.out)
    _progress(f"synth: wrote {register.n} risks to {args.out}")
    return 0


def _cmd_cascade(args: argparse.Namespace) -> int:
    register = load_register(args.input)
    if args.risk not in register.risk_ids:
        raise RegisterError(f"unknown risk_id {args.risk}")
    risk_index = register.risk_ids.index(args.risk)
    config = _run_config(args)
    sim = similarity_matrix(register, config.measure)
    ensemble = sample_ensemble(sim, config.ensemble_size, config.base_seed)
    cascade_config = CascadeConfig(
        runs=config.cascade_runs,
        base_seed=config.base_seed,
        ensemble_mode=config.ensemble_mode,
    )
    _progress(f"cascade: risk_id={args.risk}, runs={cascade_config.runs}")
    mean = single_risk_impact(ensemble, cascade_config, risk_index)
    print(repr(mean))
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "robustness": _cmd_robustness,
    "synth": _cmd_synth,
    "cascade": _cmd_cascade,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"risknet: error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (_UsageError, RegisterError, FileNotFoundError) as exc:
        print(f"risknet: input error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"risknet: input error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"risknet: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive catch-all
        print(f"risknet: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
