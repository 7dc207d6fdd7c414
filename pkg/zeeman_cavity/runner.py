"""
Executes a resolved RunConfig: dispatches to the protocol, serializes the
result and maps failures onto exit codes.
"""

import asyncio
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, TypeVar

from .config import RunConfig
from .dynamics import closed_form_errors, evolve
from .errors import ConfigError, ToleranceError, ZeemanCavityError
from .feedback import feedback_cycle
from .models import Picture, QuantumState
from .protocols import audit_report, epr_generate, exchange_report, transfer
from .serialization import (
    document,
    emit,
    evolve_rows_to_csv,
    serialize_to_bytes,
    serialize_to_json,
    state_rows,
    verify_rows_to_csv,
)
from .state_space import conserved_number, parse_basis_state, sector_basis

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_IO = 4


@dataclass
class RunResult:
    """Serialized output of one run plus the verdict of any tolerance check."""
    payload: bytes
    passed: bool = True
    summary: Dict[str, Any] = field(default_factory=dict)


async def sweep_async(fn: Callable[[T], R], points: Sequence[T]) -> List[R]:
    """Evaluate fn over points in worker threads; results keep the input order."""
    return list(await asyncio.gather(*(asyncio.to_thread(fn, point) for point in points)))


def sweep(fn: Callable[[T], R], points: Sequence[T], parallel: bool = False) -> List[R]:
    if parallel:
        return asyncio.run(sweep_async(fn, points))
    return [fn(point) for point in points]


def _run_verify(config: RunConfig) -> RunResult:
    params = config.params
    grid = config.time_grid()
    logger.info(f"Verifying closed forms on {len(grid)} points in [{grid[0]}, {grid[-1]}]")
    rows = sweep(lambda gt: (gt, *closed_form_errors(gt, params)), grid, config.parallel)
    max_n0 = max(row[1] for row in rows)
    max_nm1 = max(row[2] for row in rows)
    passed = max_n0 < config.tolerance and max_nm1 < config.tolerance
    logger.info(f"Max closed-form error: N=0 {max_n0:.3e}, N=-1 {max_nm1:.3e} (tolerance {config.tolerance:.1e})")
    summary = {"max_abs_err_eq8": max_n0, "max_abs_err_eq14": max_nm1, "tolerance": config.tolerance,
               "passed": passed}
    if config.format == "csv":
        payload = verify_rows_to_csv(rows)
    else:
        table = [{"gt": gt, "max_abs_err_eq8": e8, "max_abs_err_eq14": e14} for gt, e8, e14 in rows]
        payload = serialize_to_bytes(document(config, protocol="verify", rows=table, **summary))
    return RunResult(payload, passed, summary)


def _run_evolve(config: RunConfig) -> RunResult:
    params = config.params
    initial_label = parse_basis_state(config.initial)
    sector = sector_basis(conserved_number(initial_label))
    initial = QuantumState.basis_vector(sector.basis, initial_label)
    picture = Picture(config.picture)
    grid = config.time_grid()
    logger.info(f"Evolving {initial_label.label} (N={sector.conserved_n}) over {len(grid)} points")
    states = sweep(lambda gt: evolve(initial, gt / params.g, params, picture), grid, config.parallel)
    if config.format == "csv":
        rows = [row for gt, state in zip(grid, states) for row in state_rows(gt, state)]
        payload = evolve_rows_to_csv(rows)
    else:
        table = [{"gt": gt, "state": state} for gt, state in zip(grid, states)]
        payload = serialize_to_bytes(document(config, protocol="evolve", rows=table))
    return RunResult(payload)


def _protocol_reports(config: RunConfig):
    params = config.params
    if config.protocol == "epr":
        return [epr_generate(config.n_period, params)]
    if config.protocol == "exchange":
        initial = parse_basis_state(config.exchange_input)
        return [exchange_report(initial, config.n_period, params, Picture(config.picture))]
    if config.protocol == "transfer":
        c1, c2 = config.coefficients()
        return [transfer(c1, c2, config.n_period, params)]
    if config.protocol == "feedback":
        return feedback_cycle(config.cycles, config.drift_model(), params, config.n_period)
    raise ConfigError("protocol", f"unknown protocol '{config.protocol}'")


def execute(config: RunConfig) -> RunResult:
    """Run the configured protocol and serialize its output."""
    if config.protocol == "verify":
        return _run_verify(config)
    if config.protocol == "evolve":
        return _run_evolve(config)
    reports = _protocol_reports(config)
    for report in reports:
        report.seed = config.seed
        audit_report(report)
    summary = {"figures_of_merit": [dict(r.figures_of_merit) for r in reports]}
    return RunResult(emit(reports, config.format, config), True, summary)


def write_output(payload: bytes, config: RunConfig) -> None:
    """
    Write the payload to config.output, or stdout when no path is set.

    CSV has no room for the resolved config, so it goes to a sidecar
    ``<output>.config.json``, or to the log (stderr) when writing to stdout.
    """
    if not config.output:
        if config.format == "csv":
            logger.info(f"Resolved config for CSV on stdout: {serialize_to_json(document(config))}")
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
        return
    with open(config.output, 'wb') as handle:
        handle.write(payload)
    if config.format == "csv":
        with open(f"{config.output}.config.json", 'wb') as handle:
            handle.write(serialize_to_bytes(document(config)))
    logger.info(f"Wrote {len(payload)} bytes to {config.output}")


def run(config: RunConfig) -> int:
    """Execute and write one run; returns the process exit status."""
    try:
        result = execute(config)
        write_output(result.payload, config)
        if not result.passed:
            raise ToleranceError(
                "Closed-form verification failed",
                max(result.summary["max_abs_err_eq8"], result.summary["max_abs_err_eq14"]),
                config.tolerance,
            )
        return EXIT_OK
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except ToleranceError as e:
        logger.error(f"Tolerance failure: {e}")
        return EXIT_TOLERANCE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except (ZeemanCavityError, ValueError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_ERROR
