"""
The ``ht-secrecy`` commands: region sweeps, single-point evaluation and scheme simulation.

Each ``cmd_*`` function takes a parsed :py:class:`~cli.config.RunConfig`, writes its
results and returns them; :py:func:`main` wires them to the command line and maps errors to
exit codes (``0`` success, ``2`` configuration or usage error, ``3`` numerical failure).
"""
import argparse
import json
import math
import pathlib as pt
import sys
import time

import pandas as pd

from pyHTSecrecy.cli.config import SCHEMA_VERSION, load_aux, load_config
from pyHTSecrecy.probcore import Hypothesis
from pyHTSecrecy.region import Baseline, RegionEvaluator, evaluate_point, sweep_rate_curve
from pyHTSecrecy.scheme import (
    SchemeParams,
    generate_codebook,
    lift_to_full,
    simulate_blocklength,
)
from pyHTSecrecy.utility.exceptions import HTSecrecyError, ModelModeError, NumericalError
from pyHTSecrecy.utility.utils import EHalo, mylog

#: Float format of every CSV (9 significant digits).
FLOAT_FORMAT = "%.9g"
REGION_COLUMNS = {
    Baseline.OPTIMAL: ("theta_optimal", "status_optimal"),
    Baseline.EPS_ZERO_H0_ONLY: ("theta_eps0", "status_eps0"),
    Baseline.NO_SECURITY: ("theta_nosec", "status_nosec"),
}
SIMULATE_COLUMNS = (
    "n",
    "alpha_hat",
    "alpha_ci",
    "beta_hat",
    "beta_ci",
    "beta_exponent",
    "equiv_h0",
    "equiv_h1",
    "tv_ideal",
    "exact_flag",
    "seed",
)


def _json_number(value):
    value = float(value)
    return value if math.isfinite(value) else None


def _write_csv(frame: pd.DataFrame, path):
    path = pt.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="nan"
    )
    return path


def _write_json(summary, path):
    path = pt.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _output_dir(config, out_dir):
    return pt.Path(out_dir if out_dir is not None else config.output.directory)


def _caps(ev: RegionEvaluator):
    return {
        "h_x": ev.h_x,
        "h_p_x_given_z": ev.h_p_x_given_z,
        "h_q_x_given_z": ev.h_q_x_given_z,
        "i_xy": ev.i_xy,
    }


# ---------------------------------------------------------------------------------------#
# Commands                                                                               #
# ---------------------------------------------------------------------------------------#
def cmd_region(config, out_dir=None):
    """
    Sweep the optimal exponent and its baselines over the configured rates.

    Writes ``<prefix>_region.csv`` (``rate``, then ``theta_*`` and ``status_*`` for each
    configured baseline) and ``<prefix>_region.json`` (caps, argmax channels, wall time).

    Returns
    -------
    frame: pandas.DataFrame
    summary: dict
    """
    block = config.block("region")
    ev = RegionEvaluator(config.model)
    start = time.perf_counter()
    with EHalo(text=f"Sweeping {len(block.rates)} rates on {config.model.name}..."):
        rows = sweep_rate_curve(
            config.model, block.rates, block.delta0, block.delta1, block.epsilon, config.optimizer
        )
    wall = time.perf_counter() - start

    attr = {Baseline.OPTIMAL: "optimal", Baseline.EPS_ZERO_H0_ONLY: "eps0", Baseline.NO_SECURITY: "nosec"}
    records = []
    for row in rows:
        record = {"rate": row.rate}
        for baseline in block.baselines:
            theta_col, status_col = REGION_COLUMNS[baseline]
            result = getattr(row, attr[baseline])
            record[theta_col] = result.theta
            record[status_col] = result.status.value
        records.append(record)
    columns = ["rate"] + [c for b in block.baselines for c in REGION_COLUMNS[b]]
    frame = pd.DataFrame.from_records(records, columns=columns)

    argmax = {}
    for baseline in block.baselines:
        feasible = [getattr(r, attr[baseline]) for r in rows if getattr(r, attr[baseline]).feasible]
        if not feasible:
            argmax[baseline.value] = None
            continue
        best = max(feasible, key=lambda res: res.theta)
        argmax[baseline.value] = {
            "rate": best.query.rate,
            "theta": best.theta,
            "aux": best.aux.matrix.tolist(),
        }

    directory = _output_dir(config, out_dir)
    csv_path = _write_csv(frame, directory / f"{config.prefix}_region.csv")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "region",
        "model": config.model.name,
        "query": block.to_dict(),
        "caps": _caps(ev),
        "argmax": argmax,
        "nesting_violations": sum(not r.nesting_ok for r in rows),
        "wall_time_s": wall,
        "csv": str(csv_path),
    }
    _write_json(summary, directory / f"{config.prefix}_region.json")
    mylog.info(f"Wrote {csv_path}.")
    return frame, summary


def cmd_evaluate(config, aux):
    """
    Region quantities of one auxiliary channel.

    Returns
    -------
    dict
        ``schema_version``, the model name, the channel and every
        :py:class:`~region.evaluation.RegionPoint` field.
    """
    block = config.block("evaluate")
    point = evaluate_point(config.model, aux, block.epsilon)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "evaluate",
        "model": config.model.name,
        "aux": aux.matrix.tolist(),
    }
    summary.update(point.to_dict())
    return summary


def cmd_simulate(config, out_dir=None):
    """
    Simulate the coding scheme at every configured blocklength and seed.

    MARGINAL models are first lifted to FULL mode with
    :py:func:`scheme.construction.lift_to_full`; the outcome is recorded in the summary.
    Writes ``<prefix>_simulate.csv`` and ``<prefix>_simulate.json``.

    Returns
    -------
    frame: pandas.DataFrame
    summary: dict
    """
    block = config.block("simulate")
    model = config.model
    lifted = not model.is_full
    if lifted:
        model = lift_to_full(model)
        if model is None:
            raise ModelModeError(
                f"Simulating {config.model.name} (no P_Z|XY reproduces its marginals)"
            )

    point = evaluate_point(model, block.aux, 0.0)
    rate = block.rate if block.rate is not None else point.rate_needed + block.rate_margin
    mylog.info(
        f"Simulating at R={rate:.6g} (I_P(U;X)={point.rate_needed:.6g}), eps={block.epsilon}."
    )

    records = []
    for n in block.n:
        params = SchemeParams(model, block.aux, rate, block.epsilon, n, block.mu)
        for seed in block.seeds:
            cb = generate_codebook(params.pu, n, rate, seed)
            report = simulate_blocklength(params, cb, block.trials, seed, method=block.method)
            record = report.to_dict()
            record["exact_flag"] = int(record.pop("exact"))
            records.append(record)
    frame = pd.DataFrame.from_records(records, columns=list(SIMULATE_COLUMNS))

    eps = block.epsilon
    directory = _output_dir(config, out_dir)
    csv_path = _write_csv(frame, directory / f"{config.prefix}_simulate.csv")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "model": config.model.name,
        "lifted_to_full": lifted,
        "pzxy": model.pzxy.matrix.tolist(),
        "rate": rate,
        "rate_needed": point.rate_needed,
        "exponent": point.exponent,
        "equivocation_caps": {
            Hypothesis.H0.name: (1 - eps) * point.h_p_x_given_uz + eps * point.h_p_x_given_z,
            Hypothesis.H1.name: (1 - eps) * point.h_q_x_given_uz + eps * point.h_q_x_given_z,
        },
        "epsilon": eps,
        "trials": block.trials,
        "csv": str(csv_path),
    }
    _write_json(summary, directory / f"{config.prefix}_simulate.json")
    mylog.info(f"Wrote {csv_path}.")
    return frame, summary


# ---------------------------------------------------------------------------------------#
# Entry point                                                                            #
# ---------------------------------------------------------------------------------------#
def build_parser():
    parser = argparse.ArgumentParser(
        prog="ht-secrecy",
        description="Exponent regions and finite-blocklength simulation of hypothesis "
        "testing against independence under equivocation constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    region = sub.add_parser("region", help="Sweep the optimal exponent and its baselines.")
    region.add_argument("--config", required=True, help="Run configuration (YAML).")
    region.add_argument("--out", default=None, help="Output directory.")

    evaluate = sub.add_parser("evaluate", help="Evaluate one auxiliary channel.")
    evaluate.add_argument("--config", required=True, help="Run configuration (YAML).")
    evaluate.add_argument("--aux", required=True, help="P_U|X matrix (YAML).")
    evaluate.add_argument("--out", default=None, help="Also write the JSON to this file.")

    simulate = sub.add_parser("simulate", help="Simulate the coding scheme.")
    simulate.add_argument("--config", required=True, help="Run configuration (YAML).")
    simulate.add_argument("--out", default=None, help="Output directory.")
    return parser


def _run(args):
    config = load_config(args.config)
    if args.command == "region":
        cmd_region(config, args.out)
    elif args.command == "evaluate":
        aux = load_aux(args.aux, config.model.x_size)
        summary = cmd_evaluate(config, aux)
        text = json.dumps(
            {k: _json_number(v) if isinstance(v, float) else v for k, v in summary.items()},
            indent=2,
            sort_keys=True,
        )
        if args.out is not None:
            pt.Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(text)
    else:
        cmd_simulate(config, args.out)


def main(argv=None):
    """
    Command line entry point.

    Returns
    -------
    int
        The exit code.
    """
    args = build_parser().parse_args(argv)
    try:
        _run(args)
    except NumericalError as er:
        mylog.error(f"Numerical failure: {er.message}")
        return 3
    except HTSecrecyError as er:
        mylog.error(er.message)
        return 2
    except FloatingPointError as er:
        mylog.error(f"Numerical failure: {er}")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
