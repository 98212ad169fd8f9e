import json
import logging

import pytest
from pydantic import ValidationError

from src.analysis.criteria import Criterion
from src.core.config import RunConfig, load_run_config
from src.core.errors import DataError, NumericalError, ParseError, RankDeficient, SeriesTooShort, TendexError
from src.core.series import BoundaryPolicy
from src.utils.logging import get_logger, set_level


class TestRunConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("TENDEX_SEED", raising=False)
        config = RunConfig()
        assert config.boundary is BoundaryPolicy.FREE
        assert config.criterion is Criterion.STC
        assert (config.p_star, config.n_lags, config.hp_lambda) == (0.05, 1, 1600.0)
        assert (config.seed, config.max_bin, config.log_level) == (0, 250, "INFO")

    def test_seed_from_environment(self, monkeypatch):
        monkeypatch.setenv("TENDEX_SEED", "42")
        assert RunConfig().seed == 42

    def test_merged_skips_unset_overrides(self):
        config = RunConfig(p_star=0.1).merged(p_star=None, n_lags=3)
        assert config.p_star == 0.1
        assert config.n_lags == 3

    @pytest.mark.parametrize("field, value", [("p_star", 1.0), ("n_lags", -1), ("hp_lambda", -5.0), ("log_level", "LOUD")])
    def test_validation(self, field, value):
        with pytest.raises(ValidationError):
            RunConfig().merged(**{field: value})

    def test_manifest_view_is_json_ready(self):
        view = RunConfig(boundary="periodic").manifest_view()
        assert view["boundary"] == "periodic"
        json.dumps(view)


class TestLoadRunConfig:
    def test_file_overrides_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TENDEX_SEED", "5")
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"criterion": "maxep", "hp_lambda": 100.0}))
        config = load_run_config(path)
        assert config.criterion is Criterion.MAXEP
        assert config.hp_lambda == 100.0
        assert config.seed == 5

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"p_star": 0.05, "colour": "red"}))
        with pytest.raises(DataError):
            load_run_config(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(DataError):
            load_run_config(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(DataError):
            load_run_config(path)


def test_error_exit_codes():
    assert SeriesTooShort("x").exit_code == 2
    assert isinstance(ParseError("bad", 4), ValueError)
    assert str(ParseError("bad", 4)) == "line 4: bad"
    assert RankDeficient("x").exit_code == 3
    assert isinstance(RankDeficient("x"), (NumericalError, ArithmeticError, TendexError))


def test_loggers_share_namespace():
    logger = get_logger("itd")
    assert logger.name == "tendex.itd"
    assert get_logger("tendex.cli").name == "tendex.cli"
    set_level("DEBUG")
    assert logger.level == logging.DEBUG
    set_level("INFO")
    assert logger.level == logging.INFO
