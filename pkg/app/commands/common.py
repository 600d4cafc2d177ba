"""
Flags and config resolution shared by the sub-commands.

Precedence: command-line flag > JSON config file (--config) > RunConfig default.
"""
import argparse
import json
from pathlib import Path
from typing import Any, Dict

from pydantic import ValidationError

from app.schemas.run_config import RunConfig

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

# flag destination -> RunConfig field
FLAG_FIELDS = {
    "model": "model",
    "method": "method",
    "alpha": "alpha",
    "eps": "eps",
    "B": "n_bootstrap",
    "M": "n_draws",
    "warmup": "warmup",
    "eta0": "eta0",
    "ess_frac": "ess_frac",
    "seed": "seed",
    "max_outer": "max_outer",
    "max_inner": "max_inner",
    "kesten_variant": "kesten_variant",
    "reset_kesten": "reset_kesten_each_round",
    "workers": "workers",
    "out_dir": "out_dir",
    "n": "n_rows",
    "datasets": "n_datasets",
}


class ConfigError(Exception):
    """Configuration could not be read or validated."""


def add_run_flags(parser: argparse.ArgumentParser) -> None:
    """Flags shared by calibrate and experiment. Defaults live in RunConfig."""
    parser.add_argument("--config", type=str, default=None, help="JSON file with RunConfig fields")
    parser.add_argument("--model", choices=["linreg", "svm"], default=None, help="Model (default: linreg)")
    parser.add_argument("--method", choices=["sa", "wp", "both"], default=None, help="Calibration method (default: both)")
    parser.add_argument("--alpha", type=float, default=None, help="Credible level is 1 - alpha (default: 0.05)")
    parser.add_argument("--eps", type=float, default=None, help="Coverage tolerance (default: 0.005)")
    parser.add_argument("--B", type=int, default=None, help="Bootstrap replicates (default: 100)")
    parser.add_argument("--M", type=int, default=None, help="Posterior draws kept per replicate (default: 1000 linreg, 2000 svm)")
    parser.add_argument("--warmup", type=int, default=None, help="Warmup sweeps per replicate (default: 500)")
    parser.add_argument("--eta0", type=float, default=None, help="Initial learning rate (default: 1)")
    parser.add_argument("--ess-frac", type=float, default=None, help="minESS* threshold as a fraction of M (default: 0.25)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: GPC_DEFAULT_SEED)")
    parser.add_argument("--max-outer", type=int, default=None, help="MCMC round budget (default: 50)")
    parser.add_argument("--max-inner", type=int, default=None, help="Reweighting trials per round (default: 100)")
    parser.add_argument("--kesten-variant", choices=["figure", "text"], default=None,
                        help="Direction-change rule; 'text' also requires c_hat < 1 (default: figure)")
    parser.add_argument("--reset-kesten", action="store_true", default=None,
                        help="Reset the Kesten counter at every reweighting loop")
    parser.add_argument("--workers", type=int, default=None, help="Replicate workers (default: GPC_WORKERS or all cores)")
    parser.add_argument("--out-dir", type=str, default=None, help="Output directory (default: GPC_OUT_DIR)")


def format_validation_error(error: ValidationError, prefix: str = "invalid config") -> str:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "config"
    return f"{prefix}: {field}: {first['msg']}"


def _read_config_file(path: str) -> Dict[str, Any]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return payload


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file with the flags that were given and validate."""
    values: Dict[str, Any] = _read_config_file(args.config) if getattr(args, "config", None) else {}
    for flag, field in FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[field] = value
    try:
        return RunConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(format_validation_error(e)) from e
