from typing import Dict, Optional

from app.core.rng_factory import RandomStream, get_stream
from app.engines.orchestrator import CalibrationOrchestrator
from app.posteriors.base import PosteriorModel
from app.posteriors.dataset import Dataset
from app.posteriors.linreg import LinearRegressionModel
from app.posteriors.svm import SupportVectorModel
from app.schemas.calibration import CalibrationResult
from app.schemas.run_config import RunConfig
from app.utils.bootstrap import BootstrapPlan, make_plan


def build_model(kind: str, dataset: Dataset) -> PosteriorModel:
    """Construct the posterior model of the given kind for a dataset."""
    if kind == "linreg":
        return LinearRegressionModel(dataset.n_features)
    if kind == "svm":
        if not dataset.classification:
            raise ValueError("svm calibration needs a classification dataset (responses -1 / +1)")
        return SupportVectorModel(dataset.scales)
    raise ValueError(f"unknown model kind {kind!r}")


def run_calibration(
    config: RunConfig,
    dataset: Dataset,
    plan: Optional[BootstrapPlan] = None,
    rng: Optional[RandomStream] = None,
) -> Dict[str, CalibrationResult]:
    """
    Calibrate a dataset with every method the config selects.

    All methods share the bootstrap plan and the root stream, so their runs
    are seed-matched.

    Args:
        config: validated run configuration
        dataset: data to calibrate on
        plan: bootstrap plan (default: made from the config seed)
        rng: root stream of the runs (default: the config seed)

    Returns:
        Dict mapping method name to its CalibrationResult
    """
    rng = rng or get_stream(config.seed)
    plan = plan or make_plan(dataset.n_rows, config.n_bootstrap, rng.master_seed)
    model = build_model(config.model, dataset)
    cfg = config.to_calibration_config()

    results: Dict[str, CalibrationResult] = {}
    for method in config.methods:
        orchestrator = CalibrationOrchestrator(method)
        results[method] = orchestrator.run(model, dataset, plan, cfg, rng)
    return results
