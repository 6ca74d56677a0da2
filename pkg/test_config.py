#!/usr/bin/env python3
"""
Tests for configuration loading and canonical report encoding
"""

import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.core.tensor3 import Verdict
from src.utils.config import BASE_DIR, VerifierConfig, load_config
from src.utils.serialization import dumps_canonical, to_jsonable, write_canonical


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("CIRCULANT_CONFIG", "CIRCULANT_LOG_LEVEL", "CIRCULANT_SEED"):
        monkeypatch.delenv(name, raising=False)


def write_config(tmp_path, data) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestVerifierConfig:
    """Defaults, file loading and overrides"""

    def test_defaults(self):
        config = VerifierConfig()
        tol = config.tolerance()
        assert (tol.eps_rel, tol.eps_abs, tol.borderline_factor) == (1e-9, 1e-12, 10.0)
        assert config.phi_grid_points == 50
        assert config.log_file() is None

    def test_from_file(self, tmp_path):
        path = write_config(tmp_path, {"eps_rel": 1e-6, "limit_offsets": [1e-2, 1e-3], "logs_dir": "out/logs"})
        config = VerifierConfig.from_file(path)
        assert config.eps_rel == 1e-6
        assert config.eps_abs == 1e-12
        assert config.limit_offsets == (1e-2, 1e-3)
        assert config.logs_dir == BASE_DIR / "out" / "logs"

    def test_unknown_keys_are_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="eps_relative"):
            VerifierConfig.from_file(write_config(tmp_path, {"eps_relative": 1e-6}))

    def test_with_tolerance_copies(self):
        config = VerifierConfig(seed=9)
        tight = config.with_tolerance(1e-14)
        assert tight.eps_rel == tight.eps_abs == 1e-14
        assert tight.seed == 9
        assert config.eps_rel == 1e-9

    def test_log_file_follows_flag(self, tmp_path):
        config = VerifierConfig(log_to_file=True, logs_dir=tmp_path)
        assert config.log_file() == tmp_path / "circulant_verify.log"

    def test_environment_overrides(self, tmp_path, monkeypatch):
        path = write_config(tmp_path, {"seed": 1, "log_level": "INFO"})
        monkeypatch.setenv("CIRCULANT_LOG_LEVEL", "debug")
        monkeypatch.setenv("CIRCULANT_SEED", "123")
        config = load_config(str(path))
        assert config.log_level == "DEBUG"
        assert config.seed == 123

    def test_config_path_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CIRCULANT_CONFIG", str(write_config(tmp_path, {"verify_samples": 7})))
        assert load_config().verify_samples == 7

    def test_committed_config_loads(self):
        config = VerifierConfig.from_file(BASE_DIR / "config" / "verifier_config.json")
        assert config.to_dict()["eps_rel"] == config.eps_rel


class TestSerialization:
    """Canonical JSON output"""

    def test_values(self):
        data = {
            "b": Fraction(-1, 3),
            "a": np.array([1.5, 2.0]),
            "c": np.array([Fraction(1, 2), Fraction(2)], dtype=object),
            "d": Verdict.HOLDS,
            "e": np.int64(4),
            "f": float("nan"),
        }
        assert to_jsonable(data) == {
            "a": [1.5, 2.0], "b": "-1/3", "c": ["1/2", "2"], "d": "holds", "e": 4, "f": "nan",
        }

    def test_sorted_keys_and_trailing_newline(self):
        text = dumps_canonical({"z": 1, "a": 2})
        assert text.index('"a"') < text.index('"z"')
        assert text.endswith("\n")

    def test_write_creates_parents(self, tmp_path):
        target = tmp_path / "nested" / "report.json"
        text = write_canonical({"x": Fraction(3, 4)}, target)
        assert target.read_text(encoding="utf-8") == text
        assert json.loads(text) == {"x": "3/4"}

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            to_jsonable(object())


class TestLogging:
    """Library modules stay silent until the logger is set up"""

    SNIPPET = (
        "from src.core.lie_groups import family1, lie_geometry\n"
        "{setup}"
        "lie_geometry(family1(1, 0, 0))\n"
    )

    def run_snippet(self, setup: str) -> str:
        result = subprocess.run(
            [sys.executable, "-c", self.SNIPPET.format(setup=setup)],
            cwd=BASE_DIR, capture_output=True, text=True, check=True,
        )
        return result.stderr

    def test_silent_without_setup(self):
        assert self.run_snippet("") == ""

    def test_setup_enables_output(self):
        stderr = self.run_snippet("from src.utils.logger import setup_logger\nsetup_logger('DEBUG')\n")
        assert "Lie geometry of family1" in stderr
