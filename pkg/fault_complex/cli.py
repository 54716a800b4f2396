"""
Fault Complex Toolkit CLI
==========================

Command-line interface for building and analyzing fault complexes,
running Monte Carlo batches and fitting thresholds.

Usage:
    fxc build --code toric:3:3 --rep rep:full:4 --out F.json
    fxc analyze F.json --out report.json
    fxc simulate --config runs/sustainable.yaml --out results.csv --workers 8
    fxc fit results.csv --model tanh --out fit.json --collapse collapse.csv

Exit codes: 0 success, 2 bad input/config, 3 invalid complex,
4 decoder inconsistency, 5 fit failure.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from joblib import cpu_count

from .errors import FaultComplexError, FitDataError, SpecError, exit_code_for

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fxc",
        description="Fault complex toolkit: foliated QEC codes, decoding and thresholds",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    def add_log_level(sub: argparse.ArgumentParser) -> None:
        sub.add_argument(
            "--log-level",
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
            default="INFO",
            help="Logging level",
        )

    # ─── build command ───
    build_parser_ = subparsers.add_parser("build", help="Build a fault complex R × C")
    build_parser_.add_argument("--code", required=True,
                               help="Base code, e.g. toric:3:4 or surface:rs:5")
    build_parser_.add_argument("--rep", required=True,
                               help="Repetition factor, rep:full:δ or rep:cyclic:δ")
    build_parser_.add_argument("--grade", type=int, default=None,
                               help="Primal grade (default: the code's qubit grade)")
    build_parser_.add_argument("--out", "-o", default=None,
                               help="Write the fault complex JSON here")
    add_log_level(build_parser_)

    # ─── analyze command ───
    analyze_parser = subparsers.add_parser(
        "analyze", help="Künneth counts, distances and representatives of a stored complex",
    )
    analyze_parser.add_argument("path", help="Fault complex or chain complex JSON")
    analyze_parser.add_argument("--out", "-o", default=None, help="Write the report JSON here")
    analyze_parser.add_argument("--exact-cutoff", type=int, default=None,
                                help="Largest kernel dimension searched exhaustively")
    add_log_level(analyze_parser)

    # ─── simulate command ───
    simulate_parser = subparsers.add_parser("simulate", help="Run Monte Carlo batches from a config")
    simulate_parser.add_argument("--config", "-c", required=True,
                                 help="Run config (JSON or YAML)")
    simulate_parser.add_argument("--out", "-o", default=None,
                                 help="Result CSV (default: output.csv from the config)")
    simulate_parser.add_argument("--seed", type=int, default=None, help="Master seed")
    simulate_parser.add_argument("--workers", type=int, default=cpu_count(),
                                 help="Parallel workers (default: all CPUs)")
    simulate_parser.add_argument("--trials", type=int, default=None,
                                 help="Override the configured trial count")
    add_log_level(simulate_parser)

    # ─── fit command ───
    fit_parser = subparsers.add_parser("fit", help="Fit a threshold to experiment results")
    fit_parser.add_argument("csv", help="Result CSV written by 'fxc simulate'")
    fit_parser.add_argument("--model", choices=["quadratic", "tanh"], default="tanh")
    fit_parser.add_argument("--out", "-o", default=None, help="Write the fit JSON here")
    fit_parser.add_argument("--collapse", default=None, help="Write the collapse CSV here")
    fit_parser.add_argument("--resamples", type=int, default=1000, help="Bootstrap resamples")
    fit_parser.add_argument("--seed", type=int, default=None, help="Bootstrap seed")
    fit_parser.add_argument("--k", type=int, default=1, help="Logical qubits (saturation a = 1 - 0.5^k)")
    fit_parser.add_argument("--rounds", type=int, default=None,
                            help="Fit only rows with this rounds value")
    fit_parser.add_argument("--workers", type=int, default=cpu_count(),
                            help="Parallel bootstrap workers (default: all CPUs)")
    add_log_level(fit_parser)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(1)

    log_level = getattr(args, "log_level", "INFO")
    logging.basicConfig(
        level=getattr(logging, log_level),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    commands = {"build": cmd_build, "analyze": cmd_analyze,
                "simulate": cmd_simulate, "fit": cmd_fit}
    try:
        commands[args.command](args)
    except FaultComplexError as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(exit_code_for(e))
    return 0


def _banner(title: str, lines: List[str]) -> None:
    print("=" * 60)
    print(f"  {title}")
    print("=" * 60)
    for line in lines:
        print(f"  {line}")
    print("=" * 60)


def _weight(value) -> str:
    return "inf" if value == float("inf") else str(value)


def cmd_build(args):
    """Build R × C and write its JSON."""
    from .codes import parse_code, parse_repetition, repetition
    from .foliation import product
    from .storage import atomic_write_json

    handle = parse_code(args.code)
    rep = parse_repetition(args.rep)
    grade = handle.qubit_grade if args.grade is None else args.grade
    F = product(repetition(rep), handle.complex, grade)
    if args.out:
        atomic_write_json(args.out, F.to_dict())

    _banner(f"Fault complex {rep.name} × {handle.name}", [
        f"Dims:        {list(F.complex.dims)}",
        f"Primal:      {F.n_primal} faults, {F.D_X.rows} detectors",
        f"Dual:        {F.n_dual} faults, {F.D_Z.rows} detectors",
        f"k primal:    {F.kunneth.k_primal}",
        f"k dual:      {F.kunneth.k_dual}",
        f"d primal:    {_weight(F.d_primal)}",
        f"d dual:      {_weight(F.d_dual)}",
        f"Rounds:      {F.n_rounds}",
        f"Output:      {args.out or '-'}",
    ])


def cmd_analyze(args):
    """Report homology and distances of a stored complex."""
    from .chain import ChainComplex, betti_numbers
    from .foliation import FaultComplex
    from .storage import atomic_write_json

    try:
        with open(args.path) as f:
            data = json.load(f)
    except OSError as e:
        raise SpecError(f"Cannot read {args.path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"{args.path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise SpecError(f"{args.path} does not hold a JSON object")

    if "factors" in data:
        kwargs = {} if args.exact_cutoff is None else {"distance_cutoff": args.exact_cutoff}
        F = FaultComplex.from_dict(data, **kwargs)
        report = F.analysis()
        summary = [
            f"Dims:        {report['dims']}",
            f"k primal:    {report['kunneth']['k_primal']}",
            f"k dual:      {report['kunneth']['k_dual']}",
            f"d primal:    {_weight(F.d_primal)} (exact={F.primal_distance.exact})",
            f"d dual:      {_weight(F.d_dual)} (exact={F.dual_distance.exact})",
            f"Single-shot: {report['single_shot_blocks']}",
        ]
    else:
        C = ChainComplex.from_dict(data)
        C.check()
        report = {"dims": list(C.dims), "betti": betti_numbers(C)}
        summary = [f"Dims:        {report['dims']}", f"Betti:       {report['betti']}"]

    if args.out:
        atomic_write_json(args.out, report)
    _banner(f"Analysis of {args.path}", summary)


def cmd_simulate(args):
    """Run every batch of a config and write the result CSV."""
    from .config import load_config, resolve_seed
    from .experiment import CSV_COLUMNS, run_spec
    from .storage import write_csv_rows

    config = load_config(args.config)
    seed = resolve_seed(args.seed, config)
    if args.workers < 1:
        raise SpecError(f"--workers must be >= 1, got {args.workers}")
    if args.trials is not None and args.trials < 1:
        raise SpecError(f"--trials must be >= 1, got {args.trials}")
    out = args.out or config.output.csv

    rows = []
    for spec, rounds_list in config.experiment_specs(seed, workers=args.workers, trials=args.trials):
        for batch in run_spec(spec, rounds_list):
            rows.append(batch.to_row())
            print(f"  {batch.code:<16} rounds={batch.rounds:<3} noise={batch.noise_param:<8} "
                  f"{batch.failures}/{batch.trials} rate={batch.rate:.4g}")
    if out:
        write_csv_rows(out, CSV_COLUMNS, rows, append=True)

    _banner(f"Simulation '{config.experiment.name}' finished", [
        f"Batches:     {len(rows)}",
        f"Seed:        {seed}",
        f"Output:      {out or '-'}",
    ])


def cmd_fit(args):
    """Fit thresholds to a result CSV."""
    import os

    from .config import resolve_seed
    from .fit import (FitInput, collapse_rows, fit_threshold, fits_by_rounds,
                      plateau_report, points_from_rows, residual_diagnostics)
    from .storage import atomic_write_json, read_csv_rows, write_csv_rows

    rows = read_csv_rows(args.csv)
    if not rows:
        raise FitDataError(f"{args.csv} holds no result rows")
    seed = resolve_seed(args.seed, None, os.environ)
    distinct = sorted({int(row["rounds"]) for row in rows})

    if args.rounds is None and len(distinct) > 1:
        fits = fits_by_rounds(rows, args.model, k=args.k, bootstrap_n=args.resamples,
                              seed=seed, workers=args.workers)
        plateau = plateau_report(fits)
        payload = {
            "model": args.model,
            "fits": {str(r): fit.to_dict() for r, fit in fits.items()},
            "plateau": [entry.to_dict() for entry in plateau],
        }
        summary = [f"rounds={e.rounds:<4} p_th={e.p_th:.6g} converged={e.converged}"
                   for e in plateau]
        if args.collapse:
            last = distinct[-1]
            data = FitInput(points_from_rows(rows, last), k=args.k)
            write_csv_rows(args.collapse, ["x", "rate", "model_value"],
                           collapse_rows(fits[last], data))
    else:
        data = FitInput(points_from_rows(rows, args.rounds), k=args.k)
        result = fit_threshold(data, model=args.model, bootstrap_n=args.resamples,
                               seed=seed, workers=args.workers)
        diagnostics = residual_diagnostics(result)
        payload = result.to_dict()
        payload["diagnostics"] = {"chi2_dof": diagnostics.chi2_dof,
                                  "max_abs_pull": diagnostics.max_abs_pull,
                                  "acceptable": diagnostics.acceptable}
        if not diagnostics.acceptable:
            logger.warning(f"{args.model} model fits poorly (chi2/dof={diagnostics.chi2_dof:.3g})")
        summary = [
            f"p_th:        {result.p_th:.6g}",
            f"99% CI:      [{result.ci_low:.6g}, {result.ci_high:.6g}]",
            f"chi2/dof:    {result.chi2_dof:.3g}",
        ]
        if args.collapse:
            write_csv_rows(args.collapse, ["x", "rate", "model_value"], collapse_rows(result, data))

    if args.out:
        atomic_write_json(args.out, payload)
    _banner(f"{args.model} threshold fit of {args.csv}", summary)


if __name__ == "__main__":
    main()
