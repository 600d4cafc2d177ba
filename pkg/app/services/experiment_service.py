"""
Paired GPC-SA / GPC-WP experiments over synthetic datasets or repeated seeds.
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import CalibrationError
from app.core.rng_factory import RUN, RandomStream, get_stream
from app.engines.orchestrator import CalibrationOrchestrator
from app.posteriors.dataset import Dataset
from app.schemas.calibration import CalibrationResult
from app.schemas.experiment import REPORT_COLUMNS, ExperimentReport, ReportRow, SynthConfig
from app.schemas.run_config import RunConfig
from app.services.calibration_service import build_model
from app.utils.bootstrap import make_plan
from app.utils.synthetic import gen_linreg_data

logger = logging.getLogger(__name__)

SUMMARY_METRICS = ["wall_ms", "outer_iterations", "eta_hat"]


def truth_covered(result: CalibrationResult, truth: Sequence[float]) -> int:
    """1 when the original-data box at eta_hat contains the true parameter on every covered coordinate."""
    point = np.asarray(truth, dtype=float)[result.coverage_coords]
    lo, hi = np.asarray(result.box_lo), np.asarray(result.box_hi)
    return int(np.all((lo <= point) & (point <= hi)))


def run_paired_experiment(
    config: RunConfig,
    dataset: Optional[Dataset] = None,
    synth: Optional[SynthConfig] = None,
) -> ExperimentReport:
    """
    Run every selected method on each dataset (linreg) or seed (svm).

    Args:
        config: run configuration; n_datasets counts datasets or seeds
        dataset: fixed dataset, required for svm and optional for linreg
        synth: generator settings for linreg (default: N = config.n_rows,
            true coefficients (1, 1, 2, -1), seeded by config.seed)

    Returns:
        ExperimentReport with one row per (dataset_id, method) that finished;
        runs that raised are listed under failures
    """
    root = get_stream(config.seed)
    if config.model == "svm" and dataset is None:
        raise ValueError("svm experiments need a dataset")
    if dataset is None:
        synth = synth or SynthConfig(n_rows=config.n_rows, seed=root.master_seed)
    cfg = config.to_calibration_config()
    workers = settings.resolve_workers(config.workers)

    report = ExperimentReport(
        model=config.model,
        n_rows=dataset.n_rows if dataset is not None else synth.n_rows,
        workers=workers,
    )
    for dataset_id in range(config.n_datasets):
        data = dataset if dataset is not None else gen_linreg_data(synth, dataset_id)
        run_seed = root.spawn(dataset_id, RUN).derive_seed()
        plan = make_plan(data.n_rows, config.n_bootstrap, run_seed)
        model = build_model(config.model, data)

        for method in config.methods:
            try:
                result = CalibrationOrchestrator(method).run(model, data, plan, cfg, RandomStream(run_seed))
            except CalibrationError as e:
                logger.error("dataset %d, %s failed: %s", dataset_id, method, e)
                report.failures.append(f"{dataset_id}/{method}: {e}")
                continue
            report.rows.append(ReportRow(
                dataset_id=dataset_id,
                method=method,
                eta_hat=result.eta_hat,
                converged=int(result.converged),
                outer_iterations=result.outer_iterations,
                wall_ms=result.wall_ms,
                truth_covered=truth_covered(result, synth.beta_true) if synth is not None else None,
                seed=run_seed,
            ))
        logger.info("dataset %d/%d done", dataset_id + 1, config.n_datasets)
    return report


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    """Report rows as a DataFrame with the CSV column order."""
    return pd.DataFrame([row.model_dump() for row in report.rows], columns=REPORT_COLUMNS)


def summarize_report(report: ExperimentReport) -> Dict[str, Any]:
    """
    Median and interquartile range of time, iterations and eta_hat per method,
    plus truth coverage, convergence rate and the paired wall-time win rate of
    wp over sa.
    """
    frame = report_frame(report)
    summary: Dict[str, Any] = {
        "model": report.model,
        "n_rows": report.n_rows,
        "workers": report.workers,
        "failures": len(report.failures),
        "methods": {},
    }
    if frame.empty:
        return summary

    for method, group in frame.groupby("method", sort=True):
        stats: Dict[str, Any] = {"runs": int(len(group)), "converged": float(group["converged"].mean())}
        for metric in SUMMARY_METRICS:
            q25, q50, q75 = group[metric].quantile([0.25, 0.5, 0.75]).tolist()
            stats[metric] = {"median": q50, "q25": q25, "q75": q75}
        covered = group["truth_covered"].dropna()
        stats["truth_coverage"] = float(covered.mean()) if len(covered) else None
        summary["methods"][method] = stats

    paired = frame.pivot_table(index="dataset_id", columns="method", values="wall_ms")
    if {"sa", "wp"} <= set(paired.columns):
        paired = paired.dropna()
        summary["wp_faster_fraction"] = float((paired["wp"] < paired["sa"]).mean()) if len(paired) else None
    return summary


def format_summary(summary: Dict[str, Any]) -> List[str]:
    """Table lines: per method median [q25, q75] of wall time and iterations."""
    lines = [f"model={summary['model']} N={summary['n_rows']} workers={summary['workers']}"]
    lines.append(f"{'method':<8}{'runs':>6}  {'wall_ms median [IQR]':<30}{'iterations median [IQR]':<26}{'coverage':>8}")
    for method, stats in summary["methods"].items():
        wall, iters = stats["wall_ms"], stats["outer_iterations"]
        coverage = "-" if stats["truth_coverage"] is None else f"{stats['truth_coverage']:.3f}"
        wall_col = f"{wall['median']:.1f} [{wall['q25']:.1f}, {wall['q75']:.1f}]"
        iter_col = f"{iters['median']:.1f} [{iters['q25']:.1f}, {iters['q75']:.1f}]"
        lines.append(f"{method:<8}{stats['runs']:>6}  {wall_col:<30}{iter_col:<26}{coverage:>8}")
    if summary.get("wp_faster_fraction") is not None:
        lines.append(f"wp faster than sa in {summary['wp_faster_fraction']:.0%} of paired runs")
    return lines
