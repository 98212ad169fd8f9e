"""Run configuration"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import DataError
from .series import BoundaryPolicy
from ..analysis.criteria import Criterion


class RunConfig(BaseSettings):
    """
    Resolved settings of one run.

    Values come from, in increasing priority: defaults, TENDEX_* environment
    variables, a JSON config file, command-line flags.
    """
    model_config = SettingsConfigDict(env_prefix="TENDEX_", extra="forbid")

    boundary: BoundaryPolicy = BoundaryPolicy.FREE
    criterion: Criterion = Criterion.STC
    p_star: float = Field(0.05, gt=0.0, lt=1.0)
    n_lags: int = Field(1, ge=0)
    hp_lambda: float = Field(1600.0, ge=0.0, allow_inf_nan=False)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    output_dir: str = "out"
    max_bin: int = Field(250, ge=1)
    log_level: str = Field("INFO", pattern="^(DEBUG|INFO|WARNING|ERROR)$")

    def merged(self, **overrides: Any) -> "RunConfig":
        """Copy with every non-None override applied and re-validated"""
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.model_validate(values)

    def manifest_view(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    """Environment defaults, overlaid with a JSON file when given"""
    try:
        config = RunConfig()
        if path is None:
            return config
        with open(path, 'r') as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise DataError(f"{path}: config must be a JSON object")
        return config.merged(**data)
    except ValidationError as e:
        raise DataError(f"invalid run configuration: {e}") from e
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: {e}") from e
