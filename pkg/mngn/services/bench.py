"""
Repeated solves from random starting points and their aggregate statistics.

- Trial t draws its start from a generator keyed by (seed, t[, stream_key]),
  so results do not depend on execution order or the number of workers.
- Averages are taken over converged trials only.
- Summaries export to an aligned text table, CSV or JSON.
"""

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Iterable, List, Optional, Sequence
import numpy as np
from mngn import config
from mngn.exceptions import InvalidInputError, SolverError
from mngn.schemas.bench import BenchRow, BenchSummary, OutputFormat, TrialRecord, TrialSpec
from mngn.schemas.problems import RegularizerSpec, TestProblem
from mngn.schemas.solver import FailureReason, SolveOptions
from mngn.services.problems import build_problem, build_regularizer
from mngn.services.solver import solve
from mngn.utils import render_template, trial_rng

logger = logging.getLogger(__name__)

CSV_HEADER = ["method", "iterations", "norm", "success"]


def _solve_options(spec: TrialSpec, L: Optional[np.ndarray]) -> SolveOptions:
    return SolveOptions(
        method=spec.method,
        stop_tol=spec.stop_tol,
        max_iter=spec.max_iter,
        model_profile=None if spec.model_profile is None else np.asarray(spec.model_profile, dtype=float),
        regularizer=L,
        fixed_eta=spec.fixed_eta,
    )


def _start_point(spec: TrialSpec, n: int, trial: int) -> np.ndarray:
    if spec.x0 is not None:
        return np.asarray(spec.x0, dtype=float)
    rng = trial_rng(spec.seed, trial, spec.stream_key)
    return rng.uniform(spec.x0_low, spec.x0_high, n)


def _run_one(test_problem: TestProblem, spec: TrialSpec, options: SolveOptions,
             L: Optional[np.ndarray], trial: int) -> TrialRecord:
    x0 = _start_point(spec, test_problem.problem.n, trial)
    try:
        result = solve(test_problem.problem, x0, options)
    except SolverError as exc:
        logger.warning("trial %d of %s failed: %s", trial, spec.label, exc)
        return TrialRecord(seed_index=trial, x0=x0.tolist(), converged=False, iterations=0,
                           failure_reason=FailureReason.factorization_error)

    norm = None
    if result.converged:
        x = result.x_final
        norm = float(np.linalg.norm(x if L is None else L @ x))
    else:
        logger.warning("trial %d of %s did not converge: %s", trial, spec.label, result.failure_reason.value)
    return TrialRecord(
        seed_index=trial,
        x0=x0.tolist(),
        converged=result.converged,
        iterations=result.iterations,
        norm=norm,
        failure_reason=result.failure_reason,
    )


def run_trials(spec: TrialSpec, jobs: int = config.JOBS) -> BenchSummary:
    """
    Solve `spec.n_trials` times and summarize.

    Per-trial failures are recorded; the batch is never aborted. `jobs` > 1
    runs trials in a thread pool without changing the result.
    """
    test_problem = build_problem(spec.problem, spec.params)
    n = test_problem.problem.n
    L = None
    if spec.regularizer is not None:
        L = build_regularizer(RegularizerSpec(kind=spec.regularizer, size=n))
    if spec.x0 is not None and len(spec.x0) != n:
        raise InvalidInputError(f"x0 must have length {n}")
    if spec.model_profile is not None and len(spec.model_profile) != n:
        raise InvalidInputError(f"model_profile must have length {n}")
    options = _solve_options(spec, L)

    logger.info("running %d trials of %s on %s", spec.n_trials, spec.label, spec.problem.value)
    if jobs <= 1:
        records = [_run_one(test_problem, spec, options, L, t) for t in range(spec.n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(_run_one, test_problem, spec, options, L, t): t
                       for t in range(spec.n_trials)}
            ordered = [(futures[fut], fut.result()) for fut in as_completed(futures)]
        ordered.sort(key=lambda item: item[0])
        records = [record for _, record in ordered]

    avg_iterations, avg_norm, n_success = summarize(records)
    return BenchSummary(
        spec=spec,
        avg_iterations=avg_iterations,
        avg_norm=avg_norm,
        n_success=n_success,
        trials=records,
    )


def summarize(records: Sequence[TrialRecord]) -> tuple[Optional[float], Optional[float], int]:
    """(average iterations, average norm, success count) over converged records."""
    if not records:
        raise InvalidInputError("cannot summarize an empty set of trials")
    ok = [rec for rec in records if rec.converged]
    if not ok:
        return None, None, 0
    avg_iterations = float(np.mean([rec.iterations for rec in ok]))
    avg_norm = float(np.mean([rec.norm for rec in ok]))
    return avg_iterations, avg_norm, len(ok)


def _fmt(value: Optional[float], digits: int) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def _table(summaries: List[BenchSummary], title: Optional[str]) -> str:
    rows = []
    for summary in summaries:
        row = summary.row()
        rows.append({
            "method": row.method,
            "iterations": _fmt(None if row.iterations is None else round(row.iterations), 0),
            "norm": _fmt(row.norm, 4),
            "success": str(row.success),
        })
    with_l = any(s.spec.regularizer is not None for s in summaries)
    norm_label = "||Lx||" if with_l else "||x||"
    widths = {
        "method": max([len("method")] + [len(r["method"]) for r in rows]),
        "iterations": len("iterations"),
        "norm": max([len(norm_label)] + [len(r["norm"]) for r in rows]),
        "success": len("#success"),
    }
    total = sum(widths.values()) + 2 * (len(widths) - 1)
    return render_template(
        "bench_table.txt.j2",
        title=title, rows=rows, widths=widths, total_width=total, norm_label=norm_label,
    )


def _csv(summaries: List[BenchSummary]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for summary in summaries:
        row = summary.row()
        writer.writerow([
            row.method,
            "" if row.iterations is None else repr(row.iterations),
            "" if row.norm is None else repr(row.norm),
            row.success,
        ])
    return buffer.getvalue()


def _json(summaries: List[BenchSummary]) -> str:
    payload = {
        "spec": [s.spec.model_dump(mode="json") for s in summaries],
        "rows": [s.row().model_dump(mode="json") for s in summaries],
        "trials": [
            {"method": s.spec.label, **rec.model_dump(mode="json")}
            for s in summaries for rec in s.trials
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def export(summaries: BenchSummary | Iterable[BenchSummary], fmt: OutputFormat | str,
           title: Optional[str] = None) -> bytes:
    """
    Render one or more summaries.

    - **Raises:**
        - InvalidInputError for an unknown format
    """
    if isinstance(summaries, BenchSummary):
        summaries = [summaries]
    summaries = list(summaries)
    try:
        fmt = OutputFormat(fmt)
    except ValueError:
        valid = ", ".join(f.value for f in OutputFormat)
        raise InvalidInputError(f"unknown output format '{fmt}' (valid: {valid})")
    if fmt == OutputFormat.table:
        text = _table(summaries, title)
    elif fmt == OutputFormat.csv:
        text = _csv(summaries)
    else:
        text = _json(summaries)
    return text.encode("utf-8")


def load_summaries(data: bytes | str) -> List[BenchSummary]:
    """Parse the JSON export back into summaries."""
    payload = json.loads(data)
    try:
        specs = [TrialSpec.model_validate(spec) for spec in payload["spec"]]
        rows = [BenchRow.model_validate(row) for row in payload["rows"]]
        trials = payload["trials"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"not a bench JSON export: {exc}")
    # Trials are written summary by summary, n_trials each.
    summaries = []
    start = 0
    for spec, row in zip(specs, rows):
        chunk = trials[start:start + spec.n_trials]
        start += spec.n_trials
        records = [
            TrialRecord.model_validate({k: v for k, v in trial.items() if k != "method"})
            for trial in chunk
        ]
        summaries.append(BenchSummary(
            spec=spec,
            avg_iterations=row.iterations,
            avg_norm=row.norm,
            n_success=row.success,
            trials=records,
        ))
    return summaries
