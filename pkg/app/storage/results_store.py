"""
File outputs of the CLI: result JSON, plan sidecars, report CSV, summary JSON
and generated datasets. Everything is written UTF-8.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pandas as pd

from app.core.config import settings
from app.posteriors.dataset import Dataset
from app.schemas.calibration import CalibrationResult
from app.schemas.experiment import ExperimentReport
from app.utils.bootstrap import BootstrapPlan

logger = logging.getLogger(__name__)


class ResultsStore:
    """Writes run artifacts below one output directory."""

    def __init__(self, out_dir: Optional[Union[str, Path]] = None):
        self.out_dir = Path(out_dir or settings.GPC_OUT_DIR)

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def _write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self._path(name)
        path.write_text(json.dumps(payload, indent=2, allow_nan=False), encoding="utf-8")
        logger.info("wrote %s", path)
        return path

    def save_result(self, result: CalibrationResult, prefix: str = "result") -> Path:
        """Write result_<method>.json."""
        return self._write_json(f"{prefix}_{result.method}.json", result.model_dump(mode="json"))

    def save_plan(self, plan: BootstrapPlan) -> Path:
        """Write the plan sidecar (seed and dimensions)."""
        return self._write_json("plan.json", plan.to_sidecar())

    def load_plan(self) -> BootstrapPlan:
        payload = json.loads((self.out_dir / "plan.json").read_text(encoding="utf-8"))
        return BootstrapPlan.from_sidecar(payload)

    def save_report(self, frame: pd.DataFrame, name: str = "report.csv") -> Path:
        """Report CSV (RFC 4180 quoting, header first)."""
        path = self._path(name)
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\r\n")
        logger.info("wrote %s (%d rows)", path, len(frame))
        return path

    def save_summary(self, summary: Dict[str, Any], name: str = "summary.json") -> Path:
        return self._write_json(name, summary)

    def save_experiment(self, report: ExperimentReport, name: str = "experiment.json") -> Path:
        """Full report including failures."""
        return self._write_json(name, report.model_dump(mode="json"))

    def save_dataset(self, dataset: Dataset, path: Union[str, Path]) -> Path:
        """Write a dataset as `y,x1,...` CSV (intercept column omitted)."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(dataset.X[:, 1:], columns=dataset.feature_names[1:])
        frame.insert(0, "y", dataset.y)
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\r\n", float_format="%.17g")
        logger.info("wrote %s", path)
        return path
