import argparse

from pydantic import ValidationError

from app.commands.common import EXIT_OK, ConfigError, format_validation_error
from app.core.config import settings
from app.schemas.experiment import SynthConfig
from app.storage.results_store import ResultsStore
from app.utils.synthetic import gen_linreg_data


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("gen-data", help="Write a synthetic heteroskedastic regression dataset")
    parser.add_argument("output_path", help="CSV file to write (columns y,x1,x2,x3)")
    parser.add_argument("--n", type=int, default=100, help="Sample size (default: 100)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: GPC_DEFAULT_SEED)")
    parser.add_argument("--dataset-id", type=int, default=0, help="Dataset index under the seed (default: 0)")
    parser.set_defaults(handler=cmd_gen_data)


def cmd_gen_data(args: argparse.Namespace) -> int:
    seed = settings.GPC_DEFAULT_SEED if args.seed is None else args.seed
    try:
        cfg = SynthConfig(n_rows=args.n, seed=seed)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from e
    dataset = gen_linreg_data(cfg, args.dataset_id)
    path = ResultsStore().save_dataset(dataset, args.output_path)
    print(f"wrote {path} (N={dataset.n_rows})")
    return EXIT_OK
