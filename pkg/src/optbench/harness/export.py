"""CSV export and re-import of experiment results."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from ..core import fmt_float, read_trace_csv, timestamps, write_trace_csv
from .experiment import RunResult

SUMMARY_HEADER = ("function", "algorithm", "te", "seed", "final_best", "total_comp_time_s", "switch_point")
SUMMARY_FILE = "summary.csv"
PARAMS_FILE = "parameters.json"


def trace_filename(function: str, algorithm: str, seed: int) -> str:
    return f"trace_{function}_{algorithm.replace(':', '-')}_seed{seed}.csv"


def summary_rows(results: Sequence[RunResult], eval_times: Sequence[float]) -> list[dict]:
    rows = []
    for r in results:
        if not r.ok:
            continue
        for te in eval_times:
            rows.append(
                {
                    "function": r.function,
                    "algorithm": r.algorithm,
                    "te": fmt_float(te),
                    "seed": str(r.seed),
                    "final_best": fmt_float(r.final_best()),
                    "total_comp_time_s": fmt_float(timestamps(r.trace, te)[-1]),
                    "switch_point": "" if r.switch_point is None else str(r.switch_point),
                }
            )
    return rows


def export_csv(
    results: Sequence[RunResult],
    out_dir: str | Path,
    eval_times: Sequence[float] = (1.0,),
    parameters: dict | None = None,
) -> list[Path]:
    """Write one trace CSV per successful run plus ``summary.csv``; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    for r in results:
        if r.ok:
            written.append(write_trace_csv(r.trace, out / trace_filename(r.function, r.algorithm, r.seed)))
    summary = out / SUMMARY_FILE
    try:
        with summary.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SUMMARY_HEADER, lineterminator="\n")
            writer.writeheader()
            writer.writerows(summary_rows(results, eval_times))
    except OSError as exc:
        raise OSError(f"cannot write summary file {summary}: {exc}") from exc
    written.append(summary)
    if parameters is not None:
        params = out / PARAMS_FILE
        params.write_text(json.dumps(parameters, indent=2, sort_keys=True) + "\n")
        written.append(params)
    failures = [r for r in results if not r.ok]
    if failures:
        failed = out / "failures.csv"
        with failed.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("function", "algorithm", "seed", "error"))
            for r in failures:
                writer.writerow((r.function, r.algorithm, r.seed, r.error))
        written.append(failed)
    return written


def read_summary(path: str | Path) -> list[dict]:
    """Rows of ``summary.csv`` with numeric columns parsed."""
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SUMMARY_HEADER:
            raise ValueError(f"{path}: unexpected summary header {reader.fieldnames}")
        rows = []
        for row in reader:
            rows.append(
                {
                    "function": row["function"],
                    "algorithm": row["algorithm"],
                    "te": float(row["te"]),
                    "seed": int(row["seed"]),
                    "final_best": float(row["final_best"]),
                    "total_comp_time_s": float(row["total_comp_time_s"]),
                    "switch_point": int(row["switch_point"]) if row["switch_point"] else None,
                }
            )
    return rows


def load_results(in_dir: str | Path) -> list[RunResult]:
    """Rebuild results from a directory written by :func:`export_csv`."""
    base = Path(in_dir)
    rows = read_summary(base / SUMMARY_FILE)
    seen = {}
    for row in rows:
        key = (row["function"], row["algorithm"], row["seed"])
        if key in seen:
            continue
        trace = read_trace_csv(base / trace_filename(*key), seed=row["seed"], algorithm=row["algorithm"])
        seen[key] = RunResult(*key, trace=trace, switch_point=row["switch_point"])
    return list(seen.values())


def eval_times_in(in_dir: str | Path) -> list[float]:
    rows = read_summary(Path(in_dir) / SUMMARY_FILE)
    return sorted({row["te"] for row in rows})
