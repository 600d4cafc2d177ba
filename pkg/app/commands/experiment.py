import argparse

from app.commands.common import EXIT_ERROR, EXIT_OK, add_run_flags, resolve_run_config
from app.services.experiment_service import (
    format_summary,
    report_frame,
    run_paired_experiment,
    summarize_report,
)
from app.storage.results_store import ResultsStore
from app.utils.dataset_loader import load_dataset


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "experiment",
        help="Paired sa / wp runs over synthetic datasets (linreg) or seeds (svm)",
    )
    parser.add_argument("dataset_path", nargs="?", default=None,
                        help="Fixed dataset; required for svm, linreg generates data when omitted")
    add_run_flags(parser)
    parser.add_argument("--n", type=int, default=None, help="Synthetic sample size (default: 100)")
    parser.add_argument("--datasets", type=int, default=None, help="Datasets or seeds (default: 50)")
    parser.set_defaults(handler=cmd_experiment)


def cmd_experiment(args: argparse.Namespace) -> int:
    """
    Write report.csv, summary.json and experiment.json and print the summary table.

    Returns:
        0 when every run produced a row, 1 otherwise
    """
    config = resolve_run_config(args)
    dataset = load_dataset(args.dataset_path, config.model) if args.dataset_path else None

    report = run_paired_experiment(config, dataset=dataset)
    summary = summarize_report(report)

    store = ResultsStore(config.out_dir)
    store.save_report(report_frame(report))
    store.save_summary(summary)
    store.save_experiment(report)

    for line in format_summary(summary):
        print(line)
    for failure in report.failures:
        print(f"failed: {failure}")
    return EXIT_OK if not report.failures else EXIT_ERROR
