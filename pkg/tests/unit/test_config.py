"""
Unit tests for run configuration loading.
"""

import pytest

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from src.sato_tate.config import RunConfig, load_config, read_config_file, settings_from_env
from src.sato_tate.errors import ConfigError

CURVE = {"curve": "y^2=x^3+x"}


@pytest.mark.unit
class TestDefaults:
    """Test field defaults."""

    def test_defaults(self):
        config = load_config(overrides=CURVE, environ={})
        assert config.mode == "compare"
        assert config.bound == 1000
        assert config.n == 100000
        assert config.seed == 0
        assert config.workers == 1
        assert config.candidates is None
        assert config.out_dir == Path("output")

    def test_frozen(self):
        config = load_config(overrides=CURVE, environ={})
        with pytest.raises(Exception):
            config.bound = 10


@pytest.mark.unit
class TestPrecedence:
    """Test env < file < overrides."""

    def test_environment(self):
        config = load_config(environ={"SATO_TATE_BOUND": "500", "SATO_TATE_CURVE": "y^2=x^3+x"})
        assert config.bound == 500

    def test_unrelated_variables_ignored(self):
        environ = {"PATH": "/bin", "SATO_TATE_UNKNOWN": "1", "SATO_TATE_SEED": "4"}
        assert settings_from_env(environ) == {"seed": "4"}

    def test_file_over_environment(self, temp_dir):
        path = temp_dir / "run.env"
        path.write_text("BOUND=700\nCURVE=y^2=x^3+x+1\n")
        config = load_config(path, environ={"SATO_TATE_BOUND": "500", "SATO_TATE_CURVE": "y^2=x^3+x"})
        assert config.bound == 700
        assert config.curve == "y^2=x^3+x+1"

    def test_overrides_win(self, temp_dir):
        path = temp_dir / "run.env"
        path.write_text("BOUND=700\n")
        config = load_config(path, overrides={**CURVE, "bound": 900, "seed": None}, environ={"SATO_TATE_SEED": "3"})
        assert config.bound == 900
        assert config.seed == 3

    def test_prefixed_file_keys(self, temp_dir):
        path = temp_dir / "run.env"
        path.write_text("SATO_TATE_MODE=count\nSATO_TATE_CURVE=y^2=x^3+x\n")
        assert read_config_file(path) == {"mode": "count", "curve": "y^2=x^3+x"}

    def test_shipped_configs(self, data_dir):
        for path in sorted((data_dir / "configs").glob("*.env")):
            assert isinstance(load_config(path, environ={}), RunConfig)


@pytest.mark.unit
class TestValidation:
    """Test rejected configurations."""

    @pytest.mark.parametrize(
        "overrides",
        [
            {**CURVE, "bound": 2},
            {**CURVE, "n": 500},
            {**CURVE, "seed": -1},
            {**CURVE, "workers": 0},
            {**CURVE, "bound": "many"},
            {**CURVE, "mode": "plot"},
            {**CURVE, "log_level": "LOUD"},
            {"mode": "count"},
            {"mode": "identify"},
            {"mode": "sample"},
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ConfigError):
            load_config(overrides=overrides, environ={})

    def test_small_n_outside_compare(self):
        config = load_config(overrides={"mode": "sample", "candidates": "SU2", "n": 10}, environ={})
        assert config.n == 10

    def test_unknown_file_key(self, temp_dir):
        path = temp_dir / "run.env"
        path.write_text("COLOUR=blue\n")
        with pytest.raises(ConfigError):
            load_config(path, environ={})

    def test_missing_file(self, temp_dir):
        with pytest.raises(ConfigError):
            load_config(temp_dir / "absent.env", environ={})


@pytest.mark.unit
class TestFieldParsing:
    """Test value coercion."""

    def test_candidates_split(self):
        config = load_config(overrides={**CURVE, "candidates": "SU2, N(U1) ,,U1"}, environ={})
        assert config.candidates == ["SU2", "N(U1)", "U1"]

    def test_log_level_upper(self):
        assert load_config(overrides={**CURVE, "log_level": "debug"}, environ={}).log_level == "DEBUG"
