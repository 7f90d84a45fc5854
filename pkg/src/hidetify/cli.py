"""Command-line front end: detect, simulate, compare.

Configuration precedence: command-line flags > --config JSON file
(keys mirror the RammParams field names) > the HIDETIFY_SEED
environment variable (seed only) > built-in defaults. The HIM and MIP
detector names force the expectile sequence to (0.5,).

Exit codes: 0 ok, 2 input/parameter validation, 3 numerical degeneracy,
4 non-convergence.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .dataio import (
    load_dataset,
    report_rows,
    write_benchmark,
    write_report,
)
from .downstream import BenchmarkRecord, compare_pipelines
from .errors import (
    DegenerateColumn,
    HidetifyError,
    NoConvergence,
)
from .influence import DataMatrix, derive_seed
from .ramm import DETECTORS, RammParams, run_detector
from .simgen import MODELS, ContaminationSpec, contaminate, detection_metrics, generate_clean

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_NO_CONVERGENCE = 4

_PARAM_FLAGS = {
    "m": "m",
    "nk": "n_k",
    "omega": "omega",
    "alpha_min": "alpha_min",
    "alpha_max": "alpha_max",
    "alpha_valid": "alpha_valid",
    "taus": "taus",
    "max_iters": "max_outer_iters",
    "seed": "seed",
}


@dataclass
class RunConfig:
    input: str
    response: str
    detector: str
    params: RammParams
    out: str
    threads: int = 1
    drop_degenerate: bool = False


def _parse_taus(text):
    return tuple(float(t) for t in str(text).split(","))


def _add_param_flags(parser):
    parser.add_argument("--config", help="JSON file with RammParams overrides")
    parser.add_argument("--taus", help="comma-separated expectile levels, e.g. 0.25,0.5,0.75")
    parser.add_argument("--m", type=int, help="number of subsets per observation")
    parser.add_argument("--nk", type=int, help="subset size (default n // 2)")
    parser.add_argument("--omega", type=float, help="min-step cap fraction")
    parser.add_argument("--alpha-min", type=float, dest="alpha_min")
    parser.add_argument("--alpha-max", type=float, dest="alpha_max")
    parser.add_argument("--alpha-valid", type=float, dest="alpha_valid")
    parser.add_argument("--max-iters", type=int, dest="max_iters")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int, default=1)


def build_params(args) -> RammParams:
    """Merge defaults, config file, environment seed, and flags."""
    values = {}
    env_seed = os.environ.get("HIDETIFY_SEED")
    if env_seed is not None:
        values["seed"] = int(env_seed)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
        known = {f.name for f in fields(RammParams)}
        for key, value in config.items():
            if key not in known:
                raise HidetifyError(f"unknown config key {key!r}")
            values[key] = tuple(value) if key == "taus" else value
    for flag, field_name in _PARAM_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[field_name] = _parse_taus(value) if field_name == "taus" else value
    return RammParams(**values)


def cmd_detect(config: RunConfig) -> int:
    data, names, response_name = load_dataset(config.input, config.response)
    dropped = []
    if config.drop_degenerate:
        keep = data.values.min(axis=0) != data.values.max(axis=0)
        dropped = [names[j] for j in np.nonzero(~keep)[0]]
        if dropped:
            print(f"warning: dropping constant columns: {', '.join(dropped)}", file=sys.stderr)
            data = DataMatrix(data.values[:, keep], data.response)
            names = [nm for nm, k in zip(names, keep) if k]
    result = run_detector(config.detector, data, config.params, threads=config.threads)
    metadata = {
        "version": __version__,
        "command": "detect",
        "input": str(config.input),
        "response": response_name,
        "detector": config.detector,
        "n": data.n,
        "p": data.p,
        "dropped_columns": dropped,
        "params": _params_dict(config.params),
        "iterations_used": result.iterations_used,
        "n_influential": len(result.influential),
    }
    write_report(config.out, report_rows(result, data.n), metadata)
    print(f"{len(result.influential)} influential of {data.n} rows -> {config.out}")
    return EXIT_OK


def _params_dict(params: RammParams):
    return {f.name: getattr(params, f.name) for f in fields(RammParams)}


def cmd_simulate(model, mu, n, p, fraction, replications, seed, out, detectors, params, threads=1) -> int:
    records = []
    for rep in range(replications):
        clean = generate_clean(n, p, derive_seed(seed, rep, 0))
        spec = ContaminationSpec(model=model, mu=mu, fraction=fraction, seed=derive_seed(seed, rep, 1))
        sample = contaminate(clean, spec)
        for di, name in enumerate(detectors):
            det_params = replace(params, seed=derive_seed(seed, rep, 2 + di))
            flagged = run_detector(name, sample.data, det_params, threads=threads).influential
            metrics = detection_metrics(sample.truth, flagged, n)
            for metric, value in (("tpr_inf", metrics.tpr_inf), ("fpr_inf", metrics.fpr_inf)):
                records.append(
                    BenchmarkRecord(
                        method=name, model=model, mu=mu, replication=rep, metric=metric, value=value
                    )
                )
    metadata = {
        "version": __version__,
        "command": "simulate",
        "model": model,
        "mu": mu,
        "n": n,
        "p": p,
        "fraction": fraction,
        "replications": replications,
        "seed": seed,
        "detectors": list(detectors),
        "params": _params_dict(params),
    }
    write_benchmark(out, records, metadata)
    print(f"{len(records)} benchmark rows -> {out}")
    return EXIT_OK


def cmd_compare(model, mu, n, p, fraction, replications, seed, out, methods, params, folds, threads=1) -> int:
    spec = ContaminationSpec(model=model, mu=mu, fraction=fraction, seed=seed)
    comparison = compare_pipelines(
        spec,
        methods,
        replications,
        seed,
        n=n,
        p=p,
        params=params,
        folds=folds,
        threads=threads,
    )
    metadata = {
        "version": __version__,
        "command": "compare",
        "model": model,
        "mu": mu,
        "n": n,
        "p": p,
        "fraction": fraction,
        "replications": replications,
        "seed": seed,
        "methods": list(methods),
        "folds": folds,
        "params": _params_dict(params),
    }
    write_benchmark(out, comparison.records, metadata)
    print(f"{len(comparison.records)} comparison rows -> {out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hidetify",
        description="Detect multiple influential observations in high-dimensional regression data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="score a dataset and write an influence report")
    det.add_argument("--input", required=True, help="dataset CSV")
    det.add_argument("--response", default="y", help="response column name or 0-based index")
    det.add_argument("--detector", default="asymMIP", choices=DETECTORS)
    det.add_argument("--drop-degenerate", action="store_true", dest="drop_degenerate")
    det.add_argument("--out", required=True, help="report CSV path")
    _add_param_flags(det)

    sim = sub.add_parser("simulate", help="benchmark detectors on synthetic contaminated data")
    sim.add_argument("--model", required=True, choices=MODELS)
    sim.add_argument("--mu", type=float, required=True)
    sim.add_argument("--n", type=int, default=100)
    sim.add_argument("--p", type=int, default=300)
    sim.add_argument("--fraction", type=float, default=0.15)
    sim.add_argument("--replications", type=int, default=10)
    sim.add_argument("--detectors", default="asymMIP", help="comma-separated detector names")
    sim.add_argument("--out", required=True)
    _add_param_flags(sim)

    cmp_ = sub.add_parser("compare", help="raw-vs-cleaned lasso comparison on synthetic data")
    cmp_.add_argument("--model", required=True, choices=MODELS)
    cmp_.add_argument("--mu", type=float, required=True)
    cmp_.add_argument("--n", type=int, default=100)
    cmp_.add_argument("--p", type=int, default=300)
    cmp_.add_argument("--fraction", type=float, default=0.15)
    cmp_.add_argument("--replications", type=int, default=10)
    cmp_.add_argument("--methods", default="RawData,asymMIP", help="comma-separated method names")
    cmp_.add_argument("--folds", type=int, default=5)
    cmp_.add_argument("--out", required=True)
    _add_param_flags(cmp_)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = build_params(args)
        if args.command == "detect":
            config = RunConfig(
                input=args.input,
                response=args.response,
                detector=args.detector,
                params=params,
                out=args.out,
                threads=args.threads,
                drop_degenerate=args.drop_degenerate,
            )
            return cmd_detect(config)
        if args.command == "simulate":
            return cmd_simulate(
                args.model,
                args.mu,
                args.n,
                args.p,
                args.fraction,
                args.replications,
                params.seed,
                args.out,
                [d.strip() for d in args.detectors.split(",") if d.strip()],
                params,
                threads=args.threads,
            )
        return cmd_compare(
            args.model,
            args.mu,
            args.n,
            args.p,
            args.fraction,
            args.replications,
            params.seed,
            args.out,
            [m.strip() for m in args.methods.split(",") if m.strip()],
            params,
            args.folds,
            threads=args.threads,
        )
    except DegenerateColumn as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NoConvergence as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (HidetifyError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
