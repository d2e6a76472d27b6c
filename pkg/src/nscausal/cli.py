"""Command-line front end: simulate, fit, eval, bench, effects."""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, io
from .bench import (EFFECT_FIELDS, RAW_FIELDS, SUMMARY_FIELDS, nscg,
                    report_effects, run_scenario, scenario, scenario_truth,
                    spec_from_dict, _sample)
from .graph import EdgeSet, metrics
from .optimizer import FitConfig, fit, fit_baseline
from .scm import BernoulliNoise, GaussianNoise


class _ValidationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ValidationError(message)


def _log(message):
    print(message, file=sys.stderr)


def _meta(args, resolved: dict) -> dict:
    return {
        "command": args.command,
        "version": __version__,
        "resolved": resolved,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def _load_fit_config(args) -> FitConfig:
    overrides = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            doc = json.load(fh)
        overrides = doc.get("fit", {})
        unknown = set(overrides) - set(FitConfig.__dataclass_fields__)
        if unknown:
            raise _ValidationError(f"unknown fit config keys: {sorted(unknown)}")
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return FitConfig(**overrides)


def _noise_from_args(args):
    if args.noise == "gaussian":
        return GaussianNoise(args.sigma)
    return BernoulliNoise(args.noise_p)


def _scenario_from_args(args):
    overrides = {"noise": _noise_from_args(args), "link": args.link}
    if args.scenario == "custom":
        overrides.update(p=args.p, graph_model=args.model,
                         expected_degree=args.degree)
    elif args.model != "er":
        overrides["graph_model"] = args.model
    return scenario(args.scenario, sample_sizes=(args.n,), replications=1,
                    seed_base=args.seed, **overrides)


def cmd_simulate(args):
    spec = _scenario_from_args(args)
    graph_ss, data_ss = np.random.SeedSequence(spec.seed_base).spawn(2)
    truth = scenario_truth(spec, graph_ss)
    data = _sample(spec, truth, args.n, data_ss)
    os.makedirs(args.out, exist_ok=True)
    io.write_graph_csv(truth, os.path.join(args.out, "truth.csv"))
    io.write_graph_csv(nscg(truth), os.path.join(args.out, "nscg.csv"))
    io.write_dataset_csv(data, os.path.join(args.out, "data.csv"))
    io.write_json(_meta(args, {"scenario": args.scenario, "n": args.n,
                               "seed": spec.seed_base, "p": spec.p,
                               "link": spec.link}),
                  os.path.join(args.out, "meta.json"))
    _log(f"wrote truth, nscg and {args.n} observations to {args.out}")


def cmd_fit(args):
    data = io.load_csv(args.data, args.outcome)
    config = _load_fit_config(args)
    if args.method == "baseline":
        result = fit_baseline(data, config)
    else:
        kind = "te" if args.method == "nscsl-te" else "de"
        result = fit(data, FitConfig(**{**io.config_to_dict(config),
                                        "effect_kind": kind}))
    io.write_fit_dir(result, args.out,
                     _meta(args, {"data": args.data, "outcome": str(args.outcome),
                                  "method": args.method}))
    state = "converged" if result.converged else "stopped before tolerance"
    kept = int(np.sum(result.selected))
    _log(f"fit {state}; {kept} feature(s) selected; results in {args.out}")


def cmd_eval(args):
    estimated = io.read_graph_csv(args.estimated)
    truth = io.read_graph_csv(args.truth)
    m = metrics(EdgeSet.from_dag(estimated, args.threshold),
                EdgeSet.from_dag(truth))
    rows = [{"fdr": m.fdr, "tpr": m.tpr, "shd": float(m.shd)}]
    _write_table(rows, ("fdr", "tpr", "shd"), args.out)
    if args.out:
        io.write_json(_meta(args, {"estimated": args.estimated,
                                   "truth": args.truth,
                                   "threshold": args.threshold}),
                      args.out + ".meta.json")


def cmd_bench(args):
    with open(args.spec) as fh:
        spec = spec_from_dict(json.load(fh))
    report = run_scenario(spec, _load_fit_config(args), threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    io.write_rows_csv(report.rows, RAW_FIELDS, os.path.join(args.out, "raw.csv"))
    io.write_rows_csv(report.summary, SUMMARY_FIELDS,
                      os.path.join(args.out, "summary.csv"))
    io.write_json(_meta(args, {"spec": args.spec, "threads": args.threads,
                               "scenario": spec.id,
                               "replications": spec.replications,
                               "sample_sizes": list(spec.sample_sizes),
                               "methods": list(spec.methods),
                               "seed_base": spec.seed_base}),
                  os.path.join(args.out, "meta.json"))
    _log(f"benchmark complete: {len(report.rows)} rows in {args.out}")


def cmd_effects(args):
    loaded = io.read_fit_dir(args.fit)
    rows = report_effects(loaded)
    _write_table(rows, EFFECT_FIELDS, args.out)
    if args.out:
        io.write_json(_meta(args, {"fit": args.fit}), args.out + ".meta.json")


def _write_table(rows, fields, out):
    if out:
        io.write_rows_csv(rows, fields, out)
    else:
        import csv

        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([repr(row[f]) if isinstance(row[f], float) else row[f]
                             for f in fields])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nscausal",
                     description="causal structure learning benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="emit a truth graph and sampled data")
    sim.add_argument("--scenario", default="s1")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.add_argument("--p", type=int, default=10, help="nodes (custom scenario)")
    sim.add_argument("--model", choices=("er", "sf"), default="er")
    sim.add_argument("--degree", type=float, default=2.0)
    sim.add_argument("--link", choices=("linear", "rounded-log"), default="linear")
    sim.add_argument("--noise", choices=("bernoulli", "gaussian"), default="bernoulli")
    sim.add_argument("--noise-p", type=float, default=0.5)
    sim.add_argument("--sigma", type=float, default=1.0)
    sim.set_defaults(func=cmd_simulate)

    fit_p = sub.add_parser("fit", help="learn a graph from a data CSV")
    fit_p.add_argument("--data", required=True)
    fit_p.add_argument("--outcome", required=True,
                       help="outcome column label or index")
    fit_p.add_argument("--method", choices=("nscsl-te", "nscsl-de", "baseline"),
                       default="nscsl-te")
    fit_p.add_argument("--out", required=True)
    fit_p.add_argument("--config", help="JSON file with a 'fit' section")
    fit_p.add_argument("--seed", type=int)
    fit_p.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="score an estimated graph against a truth")
    ev.add_argument("--estimated", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--threshold", type=float, default=0.0)
    ev.add_argument("--out")
    ev.set_defaults(func=cmd_eval)

    bench_p = sub.add_parser("bench", help="run a scenario file end to end")
    bench_p.add_argument("--spec", required=True, help="scenario JSON file")
    bench_p.add_argument("--out", required=True)
    bench_p.add_argument("--threads", type=int, default=1)
    bench_p.add_argument("--config", help="JSON file with a 'fit' section")
    bench_p.add_argument("--seed", type=int)
    bench_p.set_defaults(func=cmd_bench)

    eff = sub.add_parser("effects", help="effect table from a fit directory")
    eff.add_argument("--fit", required=True)
    eff.add_argument("--out")
    eff.set_defaults(func=cmd_effects)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
        return 0
    except SystemExit as exc:
        return int(exc.code or 0)
    except (_ValidationError, FileNotFoundError, ValueError) as exc:
        _log(f"error: {exc}")
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 2
        _log(f"runtime failure: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
