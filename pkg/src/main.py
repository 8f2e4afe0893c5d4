import argparse
import csv
import json
import logging
import math
import sys
import time

import os
import numpy as np
import psutil

from pathlib import Path
from pydantic import ValidationError
from typing import Any, Callable, Dict, List, Optional, Tuple

from engines.bessel import (asymptotic_constant, bessel_bound_constant, kernel_shifted_sum, mellin_grid,
                            residue_formula_error, square_moment, theorem_b5_grid)
from engines.dirichlet import (characters_mod_q, equidistribution_spread, progression_error_exponent,
                               progression_eta_sum, smoothed_dyadic_sum)
from engines.eulerprod import (M_factor, ab_scan, ems_inequality_margin, fourth_moment_check, gamma_u,
                               hecke_power_residuals, lemma41_check, partial_sym_power, poly_inequality_margin,
                               rankin_selberg_local_check, sieve_cutoff)
from engines.hecke import build_delta_table, dump_eigenvalue_table, load_eigenvalue_table, multiplicativity_defect
from engines.shiftsums import (calibrate_rankin_selberg, decay_slope, gcd_split, partition_sums, sieve_bound,
                               theorem1_decay_table, theorem1_experiment)
from engines.sieveweights import (default_level, density_g_double_prime, density_g_prime, linear_sieve_weights,
                                  make_context, theoremA_bound, upper_bound_residuals)
from exceptions import ConfigError, ConsistencyError, ShiftSieveError
from kernels.summation import thread_scope
from models.bessel import BesselEvaluator, TestFunction
from models.eigenvalue_table import EigenvalueTable
from models.euler import DELTA_CEILING, ZETA2, GammaFactor
from models.experiment_config import ExperimentConfig, FormSource, OutputFormat
from models.shifted import DecayRow, EtaFunction, RankinSelbergCalibration
from settings import settings

logging_level = {
    "ERROR": logging.ERROR,
    "WARN": logging.WARN,
    "INFO": logging.INFO,
    "DEBUG": logging.DEBUG
}
logger = logging.getLogger(__name__)
logging.basicConfig(level=logging_level.get(settings.log_level.upper()), format='%(asctime)s %(levelname)s: %(message)s')

process = psutil.Process(os.getpid())

MIN_TABLE = 10_000
EIGEN_ROWS = 1000
AUDIT_LIMIT = 10_000
BOUND_YS = np.geomspace(0.5, 50.0, 25)
MOMENT_SIGMAS = (0.5, 1.0, 1.5)
MARGIN_GRID = np.linspace(-2.0, 2.0, 40001)

Tables = Dict[str, List[Dict[str, Any]]]

class RunContext:
    """Table, eta and calibration shared by one run."""
    config: ExperimentConfig
    table: EigenvalueTable
    gamma: GammaFactor
    calibration: RankinSelbergCalibration
    _etafn: Optional[EtaFunction]

    def __init__(self, config: ExperimentConfig, needed: int):
        self.config = config
        self.table = load_table(config, needed)
        self._etafn = None
        self.gamma = gamma_u(self.table)
        self.calibration = calibrate_rankin_selberg(self.table, etafn=self.etafn, gamma=self.gamma)

    @property
    def etafn(self) -> EtaFunction:
        if self._etafn is None:
            self._etafn = EtaFunction.create(self.table)
        return self._etafn

    def cutoff(self, x: float) -> float:
        return self.config.z if self.config.z is not None else sieve_cutoff(x, self.config.c)

    def exponents(self) -> Dict[str, float]:
        return {
            "cutoff": self.config.cutoff_exponent,
            "sieve_level": self.config.level_exponent,
            "decay": settings.decay_exponent,
            "mertens_decay": 1 / 6,
            "lemma41_power": 1 / 18
        }

def load_table(config: ExperimentConfig, needed: int) -> EigenvalueTable:
    if config.source == FormSource.FILE:
        return load_eigenvalue_table(config.table, max(needed, 2))
    limit = max(needed, MIN_TABLE)
    if config.source == FormSource.ONES:
        return EigenvalueTable.ones(limit)
    return build_delta_table(limit, config.threads)

def _largest_shift(config: ExperimentConfig) -> int:
    return max(abs(ell) for ell in config.ells)

def run_eigen(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    n = config.n or int(config.xs[-1])
    run = RunContext(config, n)
    table = run.table
    dumped = dump_eigenvalue_table(table, Path(config.out) / "eigen_table.txt")
    rows = [{"n": k, "lambda": table(k), "eta": float(run.etafn.values[k])} for k in range(1, min(n, EIGEN_ROWS) + 1)]
    summary = {
        "limit": table.limit,
        "source": table.source,
        "bound_violations": table.bound_violations(),
        "multiplicativity_defect": multiplicativity_defect(table, min(table.limit, AUDIT_LIMIT)),
        "max_abs_lambda_p": float(np.abs(table.values[table.primes()]).max()),
        "table_file": dumped.name
    }
    return {"eigen": rows}, summary, run

def run_sums(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    run = RunContext(config, int(config.xs[-1]) + _largest_shift(config))
    tables, per_shift = {}, {}
    x = config.xs[-1]
    for ell in config.ells:
        rows = theorem1_decay_table(run.table, ell, config.xs)
        tables[f"sums_ell{ell}"] = [row.__json__() for row in rows]
        entry = {"decay_slope": decay_slope(rows) if len(rows) > 1 else None}
        if config.z is not None or x >= 16:
            z = run.cutoff(x)
            entry["partition"] = partition_sums(run.table, ell, x, z, config.cutoff_exponent).__json__()
            entry["gcd_split"] = {str(v): s for v, s in
                                  gcd_split(run.table, ell, x, z, config.cutoff_exponent).items()}
        per_shift[str(ell)] = entry
    return tables, {"shifts": per_shift}, run

def run_sieve(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    x = config.xs[-1]
    ell = config.ells[0]
    run = RunContext(config, int(x) + _largest_shift(config))
    z = run.cutoff(x)
    level = config.level if config.level is not None else default_level(x, config.level_exponent)
    if level <= 1:
        raise ConfigError(f"Sieve level {level} must exceed 1; pass --level")
    context = make_context(z)
    weights = linear_sieve_weights(context, level)
    limit = config.limit or AUDIT_LIMIT
    residuals = upper_bound_residuals(weights, limit)
    g_prime = density_g_prime(run.table, context, 1)
    g_double_prime = density_g_double_prime(run.table, context, 1, 1)
    summary = {
        "weights": weights.__json__(),
        "audit": {
            "limit": limit,
            "min_residual": int(residuals.min()),
            "negative": int(np.count_nonzero(residuals < 0)),
            "passed": bool(np.all(residuals >= 0))
        },
        "theorem_a": theoremA_bound(context, g_prime, g_double_prime, level, level).__json__(),
        "sieve_bound": sieve_bound(run.table, 1, 1, ell, x, z, level, run.calibration, run.etafn, run.gamma).__json__()
    }
    rows = [{"d": d, "weight": weights(d)} for d in weights.support]
    return {"sieve": rows}, summary, run

def run_euler(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    x = config.xs[-1]
    z = config.z if config.z is not None else sieve_cutoff(x, config.c)
    run = RunContext(config, max(int(math.ceil(z)), int(x)))
    table = run.table
    tables = {"euler": [partial_sym_power(table, m, z).__json__() for m in range(1, 9)]}
    if config.ab_scan:
        tables["euler_ab_scan"] = [row.__json__() for row in ab_scan()]
    residuals = [hecke_power_residuals(table, int(p)) for p in table.primes(z)]
    summary = {
        "z": z,
        "M": M_factor(table, x, config.c, run.gamma).__json__() if x >= 16 else None,
        "lemma41": lemma41_check(table, z).__json__(),
        "fourth_moment": fourth_moment_check(table, x).__json__(),
        "poly_margin_min": float(np.min(poly_inequality_margin(-1 / 9, 1 / 36, MARGIN_GRID))),
        "ems_margin_min": float(np.min(ems_inequality_margin(MARGIN_GRID))),
        "hecke_power_residual_max": max((r.worst() for r in residuals), default=0.0),
        "rankin_selberg_local_gap": rankin_selberg_local_check(table, z),
        "delta_ceiling": DELTA_CEILING
    }
    return tables, summary, run

def run_dirichlet(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    x = config.xs[-1]
    run = RunContext(config, int(x))
    etafn = run.etafn
    rows, per_modulus = [], {}
    for q in config.qs:
        for m in range(1, q + 1):
            if math.gcd(m, q) == 1:
                rows.append(progression_eta_sum(etafn, m, q, x, run.calibration, run.gamma).__json__())
        per_modulus[str(q)] = {
            "characters": len(characters_mod_q(q)),
            "orthogonality_error": characters_mod_q(q).orthogonality_error(),
            "spread": equidistribution_spread(etafn, q, x)
        }
    summary: Dict[str, Any] = {"moduli": per_modulus}
    if len(config.xs) > 1:
        summary["error_exponent"] = progression_error_exponent(etafn, 1, config.qs[0], config.xs, run.calibration,
                                                               run.gamma)
    dyadic = math.floor(x / 3)
    if dyadic >= 1:
        residue = run.calibration.gamma_u * run.calibration.L_hat / ZETA2
        summary["smoothed"] = smoothed_dyadic_sum(etafn.values, dyadic, max(1.0, dyadic ** 0.75), residue).__json__()
    return {"dirichlet": rows}, summary, run

def run_bessel(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    run = RunContext(config, 100)
    evaluator = BesselEvaluator()
    g = TestFunction(lower=1.0, upper=2.0)
    grid = theorem_b5_grid(g, config.w_grid, config.r_grid, evaluator)
    checks = mellin_grid(evaluator)
    moments = [square_moment(r, sigma, evaluator) for r in config.r_grid for sigma in MOMENT_SIGMAS]
    summary = {
        "mellin": [check.__json__() for check in checks],
        "mellin_max_rel_err": max(check.rel_err for check in checks),
        "bound_constant_max": max(bessel_bound_constant(r, float(y), evaluator) for r in config.r_grid
                                  for y in BOUND_YS),
        "asymptotic_constant_max": max(asymptotic_constant(r, k * (1 + r ** 2), evaluator) for r in config.r_grid
                                       for k in (1, 2, 4)),
        "residue_errors": {str(r): residue_formula_error(g, r, evaluator) for r in config.r_grid if r >= 2},
        "square_moment_normalized_max": max(m.normalized for m in moments),
        "theorem_b5": grid.__json__(),
        "test_function_decay": g.decay_constant([1 + 1j * t for t in range(0, 41, 4)]),
        "kernel_sum": kernel_shifted_sum(run.table, 5.0, 10.0, config.ells[0], TestFunction(lower=0.5, upper=1.5),
                                         g, evaluator=evaluator)
    }
    return {"bessel": [entry.__json__() for entry in grid.entries]}, summary, run

def run_theorem1(config: ExperimentConfig) -> Tuple[Tables, Dict[str, Any], RunContext]:
    run = RunContext(config, int(config.xs[-1]) + _largest_shift(config))
    rows = theorem1_experiment(run.table, config.ells, config.xs, config.c, run.calibration, config.z,
                               config.cutoff_exponent, run.gamma)
    per_shift = {}
    for ell in config.ells:
        own = [row for row in rows if row.ell == ell]
        decay = [DecayRow(ell=ell, x=row.x, S=row.S, S_over_x=row.S_over_x, S_norm=row.S_norm) for row in own]
        ratios = [row.lemma13_ratio for row in own]
        per_shift[str(ell)] = {
            "strictly_decreasing": all(b.S_over_x < a.S_over_x for a, b in zip(own, own[1:])),
            "decay_slope": decay_slope(decay) if len(decay) > 1 else None,
            "lemma13_spread": max(ratios) / min(ratios) if min(ratios) > 0 else None
        }
    return {"theorem1": [row.__json__() for row in rows]}, {"shifts": per_shift}, run

COMMANDS: Dict[str, Callable[[ExperimentConfig], Tuple[Tables, Dict[str, Any], RunContext]]] = {
    "eigen": run_eigen,
    "sums": run_sums,
    "sieve": run_sieve,
    "euler": run_euler,
    "dirichlet": run_dirichlet,
    "bessel": run_bessel,
    "theorem1": run_theorem1
}

def _cell(value: Any) -> Any:
    return "" if value is None else value

def write_rows(path: Path, rows: List[Dict[str, Any]], output_format: OutputFormat) -> Path:
    if output_format == OutputFormat.JSON:
        path = path.with_suffix(".json")
        path.write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
        return path
    path = path.with_suffix(".csv")
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        header = list(rows[0]) if rows else []
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row[key]) for key in header])
    return path

def run(command: str, config: ExperimentConfig) -> List[Path]:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    start_mem = process.memory_info().rss
    start_time = time.monotonic()
    try:
        with thread_scope(config.threads):
            tables, results, context = COMMANDS[command](config)
    except ValidationError as error:
        raise ConsistencyError(f"{command}: engine result failed validation: {error}")
    written = [write_rows(out / stem, rows, config.output_format) for stem, rows in tables.items()]
    summary = {
        "command": command,
        "input": config.echo(),
        "table": {"source": context.table.source, "limit": context.table.limit},
        "calibration": context.calibration.__json__(),
        "exponents": context.exponents(),
        "results": results
    }
    summary_path = out / f"{command}_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    written.append(summary_path)
    diff_mem = process.memory_info().rss - start_mem
    logger.info(f"{command}: wrote {', '.join(path.name for path in written)}")
    logger.debug(f"Memory diff: {diff_mem}")
    logger.debug(f"Elapsed time: {time.monotonic() - start_time}")
    return written

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--source", choices=[source.value for source in FormSource])
    common.add_argument("--table", help="eigenvalue file for --source file")
    common.add_argument("--ell", dest="ells", help="comma-separated non-zero shifts")
    common.add_argument("--x", dest="xs", help="comma-separated x grid")
    common.add_argument("--z", type=float, help="explicit sieve cutoff z")
    common.add_argument("--c", type=float, help="c in z = x^(1/(c log log x))")
    common.add_argument("--cutoff-exp", dest="cutoff_exponent", type=float)
    common.add_argument("--level-exp", dest="level_exponent", type=float)
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int)
    common.add_argument("--format", dest="output_format", choices=[fmt.value for fmt in OutputFormat])
    common.add_argument("--log-level", dest="log_level", choices=list(logging_level))
    return common

def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="shiftsieve", description="Sieve experiments on shifted sums of Hecke eigenvalues.")
    commands = parser.add_subparsers(dest="command", required=True)
    eigen = commands.add_parser("eigen", parents=[common], help="build and dump an eigenvalue table")
    eigen.add_argument("--n", type=int)
    commands.add_parser("sums", parents=[common], help="shifted sums, partition and decay tables")
    sieve = commands.add_parser("sieve", parents=[common], help="linear sieve weights, residual audit, upper-bound factors")
    sieve.add_argument("--level", type=float)
    sieve.add_argument("--limit", type=int)
    euler = commands.add_parser("euler", parents=[common], help="partial Euler products and inequality checks")
    euler.add_argument("--ab-scan", dest="ab_scan", action="store_true", default=None)
    dirichlet = commands.add_parser("dirichlet", parents=[common], help="progression sums through characters")
    dirichlet.add_argument("--q", dest="qs")
    bessel = commands.add_parser("bessel", parents=[common], help="K-Bessel audit")
    bessel.add_argument("--r-grid", dest="r_grid")
    bessel.add_argument("--w-grid", dest="w_grid")
    experiment = commands.add_parser("experiment", parents=[common], help="full pipelines")
    experiment.add_argument("name", choices=["theorem1"])
    return parser

def load_config(args: Dict[str, Any], config_file: Optional[str]) -> ExperimentConfig:
    try:
        return ExperimentConfig.create(args, config_file)
    except ValidationError as error:
        raise ConfigError(str(error))

def main(argv: Optional[List[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    if command == "experiment":
        command = args.pop("name")
    config_file = args.pop("config")
    try:
        config = load_config(args, config_file)
        logging.getLogger().setLevel(logging_level.get(config.log_level.upper(), logging.INFO))
        run(command, config)
    except ShiftSieveError as error:
        print(json.dumps(error.__json__()), file=sys.stderr)
        return error.exit_code
    return 0

if __name__ == "__main__":
    sys.exit(main())
