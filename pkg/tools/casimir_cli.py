#!/usr/bin/env python3
"""
Casimir Free Energy Tool

Computes free energies, thermal corrections and entropies of two parallel
metal plates, runs resumable parameter sweeps, and checks the low-temperature
laws against numerics.

Examples:
    python tools/casimir_cli.py compute configs/example.yml
    python tools/casimir_cli.py sweep configs/example.yml --set output.path=sweep.csv
    python tools/casimir_cli.py verify-nernst configs/example.yml
    python tools/casimir_cli.py fit sweep.csv --column dF_J_per_m2 --model nonlocal-drude --expected 1.5

Exit codes: 0 ok, 2 configuration error, 3 convergence failure,
4 verification failure.

Environment:
    LIFSHITZ_THREADS     worker threads (speed only, results do not change)
    LIFSHITZ_LOG_LEVEL   default log level (INFO)
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv
from tabulate import tabulate

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from casimir.lib import nernst
from casimir.lib.asymptotics import fit_power_law
from casimir.lib.config_loader import load_run_config
from casimir.lib.errors import (
    EXIT_CONFIG,
    EXIT_CONVERGENCE,
    EXIT_OK,
    EXIT_VERIFICATION,
    ConfigError,
    ConvergenceFailure,
    DegenerateModel,
    DomainError,
    InsufficientData,
    SignMixture,
)
from casimir.lib.output import (
    STATUS_OK,
    ResultRow,
    ResumableCsv,
    config_hash,
    provenance,
    read_rows,
    write_results,
)
from casimir.lib.runner import compute_rows

logger = logging.getLogger("casimir_cli")


def _summary(rows):
    table = [
        [f"{r.a_m:.4e}", f"{r.T_K:.4e}", r.model,
         "" if r.F_J_per_m2 is None else f"{r.F_J_per_m2:.8e}",
         "" if r.S_J_per_K_m2 is None else f"{r.S_J_per_K_m2:.4e}",
         r.status]
        for r in rows
    ]
    print(tabulate(table, headers=["a [m]", "T [K]", "model", "F [J/m^2]", "S [J/(K m^2)]", "status"],
                   tablefmt="plain"))


def _exit_for(rows) -> int:
    return EXIT_OK if all(r.status == STATUS_OK for r in rows) else EXIT_CONVERGENCE


def cmd_compute(args):
    """Compute one row per (a, T, model) and write the result file atomically"""
    config = load_run_config(args.config, args.set or [])
    hash_value = config_hash(config)
    rows = compute_rows(config, hash_value)
    out = config.output
    write_results(rows, out.format, out.path, out.precision, provenance(config), hash_value)
    _summary(rows)
    return _exit_for(rows)


def cmd_sweep(args):
    """Cartesian sweep with per-row append; rerunning resumes where it stopped"""
    config = load_run_config(args.config, args.set or [])
    hash_value = config_hash(config)
    out = config.output
    prov = provenance(config)
    checkpoint = out.path if out.format == "csv" else f"{out.path}.partial.csv"
    writer = ResumableCsv(checkpoint, out.precision, prov, hash_value)
    new_rows = compute_rows(config, hash_value, skip=writer.is_done, on_row=writer.append)
    logger.info(f"Sweep computed {len(new_rows)} new row(s)")

    all_rows = read_rows(checkpoint)
    if out.format != "csv":
        write_results([ResultRow(**r) for r in all_rows], out.format, out.path,
                      out.precision, prov, hash_value)
    failed = [r for r in all_rows if r["status"] != STATUS_OK]
    print(f"{len(all_rows)} row(s) in {checkpoint}, {len(failed)} flagged")
    return EXIT_OK if not failed else EXIT_CONVERGENCE


def cmd_verify_nernst(args):
    """Fit low-temperature sweeps and compare with the closed-form laws"""
    config = load_run_config(args.config, args.set or [])
    report = nernst.verify(config)
    table = [
        [f"{c.a_m:.3e}", c.model, c.label,
         "" if c.fitted_exponent is None else f"{c.fitted_exponent:.4f}",
         "" if c.expected_exponent is None else f"{c.expected_exponent:g}",
         "" if c.fitted_amplitude is None or not c.expected_amplitude
         else f"{c.fitted_amplitude / c.expected_amplitude:.4f}",
         "" if c.spread is None else f"{c.spread:.2e}",
         "PASS" if c.passed else "FAIL"]
        for c in report.checks
    ]
    print(tabulate(table, headers=["a [m]", "model", "law", "exponent", "expected", "amp ratio", "spread", "result"],
                   tablefmt="grid"))
    report_path = config.nernst.report_path or str(Path(config.output.path).with_suffix(".nernst.json"))
    nernst.write_report(report, report_path)
    return EXIT_OK if report.passed else EXIT_VERIFICATION


def cmd_fit(args):
    """Power-law fit of one column of an existing result file"""
    rows = read_rows(args.results)
    if args.model:
        rows = [r for r in rows if r["model"] == args.model]
    if args.a is not None:
        rows = [r for r in rows if r["a_m"] is not None and abs(r["a_m"] / args.a - 1.0) < 1e-9]
    samples = [(r["T_K"], r[args.column]) for r in rows
               if r.get(args.column) is not None and r["status"] == STATUS_OK]
    samples.sort()
    report = fit_power_law(samples, expected_exponent=args.expected)
    table = [
        ["exponent", f"{report.fitted_exponent:.6f}"],
        ["amplitude", f"{report.fitted_amplitude:.6e}"],
        ["r_squared", f"{report.r_squared:.8f}"],
        ["window", f"[{report.window[0]:.4e}, {report.window[1]:.4e}] K"],
        ["residual_max", f"{report.residual_max:.3e}"],
        ["samples", report.n_samples],
    ]
    if report.pinned_amplitude is not None:
        table.append([f"amplitude (exponent {args.expected:g})", f"{report.pinned_amplitude:.6e}"])
    print(tabulate(table, tablefmt="plain"))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        description="Casimir free energy and entropy of parallel metal plates",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    def add_config_args(sub):
        sub.add_argument("config", help="Run configuration (YAML)")
        sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="Override a config value, e.g. quadrature.rel_tol=1e-9")

    compute_parser = subparsers.add_parser("compute", help="Compute all grid points")
    add_config_args(compute_parser)
    compute_parser.set_defaults(func=cmd_compute)

    sweep_parser = subparsers.add_parser("sweep", help="Resumable sweep over the grid")
    add_config_args(sweep_parser)
    sweep_parser.set_defaults(func=cmd_sweep)

    verify_parser = subparsers.add_parser("verify-nernst", help="Check low-temperature laws")
    add_config_args(verify_parser)
    verify_parser.set_defaults(func=cmd_verify_nernst)

    fit_parser = subparsers.add_parser("fit", help="Fit a power law to a result column")
    fit_parser.add_argument("results", help="CSV, JSON or XLSX result file")
    fit_parser.add_argument("--column", default="dF_J_per_m2", help="Column to fit against T")
    fit_parser.add_argument("--model", help="Only rows of this model")
    fit_parser.add_argument("--a", type=float, help="Only rows at this separation (m)")
    fit_parser.add_argument("--expected", type=float, help="Also fit the amplitude at this exponent")
    fit_parser.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else os.getenv("LIFSHITZ_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if not args.command:
        parser.print_help()
        return EXIT_CONFIG

    try:
        return args.func(args)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except (DomainError, DegenerateModel, InsufficientData, SignMixture) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_CONFIG
    except ConvergenceFailure as e:
        logger.error(f"Convergence failure: {e}")
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
