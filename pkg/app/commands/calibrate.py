import argparse
import logging

from app.commands.common import EXIT_NOT_CONVERGED, EXIT_OK, add_run_flags, resolve_run_config
from app.core.rng_factory import get_stream
from app.services.calibration_service import run_calibration
from app.storage.results_store import ResultsStore
from app.utils.bootstrap import make_plan
from app.utils.dataset_loader import load_dataset

logger = logging.getLogger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("calibrate", help="Calibrate the learning rate on a dataset")
    parser.add_argument("dataset_path", help="CSV file (generic `y` layout or the heart disease data)")
    add_run_flags(parser)
    parser.set_defaults(handler=cmd_calibrate)


def cmd_calibrate(args: argparse.Namespace) -> int:
    """
    Run the selected methods and write result_<method>.json plus plan.json.

    Returns:
        0 when every method converged, 2 when any exhausted its budget
    """
    config = resolve_run_config(args)
    dataset = load_dataset(args.dataset_path, config.model)
    rng = get_stream(config.seed)
    plan = make_plan(dataset.n_rows, config.n_bootstrap, rng.master_seed)

    results = run_calibration(config, dataset, plan=plan, rng=rng)

    store = ResultsStore(config.out_dir)
    store.save_plan(plan)
    for method, result in results.items():
        store.save_result(result)
        print(f"{method}: {result.summary_line()}")

    return EXIT_OK if all(r.converged for r in results.values()) else EXIT_NOT_CONVERGED
