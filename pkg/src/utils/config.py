"""
Configuration management for the circulant curvature verifier
"""

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

from ..core.tensor3 import Tolerance


BASE_DIR = Path(__file__).parent.parent.parent


@dataclass
class VerifierConfig:
    """Configuration class for the verifier"""

    # Application paths
    base_dir: Path = BASE_DIR
    config_dir: Path = BASE_DIR / "config"
    data_dir: Path = BASE_DIR / "data"
    golden_dir: Path = BASE_DIR / "data" / "golden"
    instances_dir: Path = BASE_DIR / "data" / "instances"
    logs_dir: Path = BASE_DIR / "logs"

    # Residual checks: |r| <= eps_abs + eps_rel * scale
    eps_rel: float = 1e-9
    eps_abs: float = 1e-12
    borderline_factor: float = 10.0

    # Sampling
    quantified_samples: int = 64
    verify_samples: int = 200
    seed: int = 42

    # Q-geometry
    phi_grid_points: int = 50
    limit_offsets: Tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
    limit_convergence: float = 1e-6

    # Logging
    log_level: str = "INFO"
    log_to_file: bool = False
    show_progress: bool = True

    def tolerance(self) -> Tolerance:
        """Tolerance record built from the configured thresholds"""
        return Tolerance(
            eps_rel=self.eps_rel,
            eps_abs=self.eps_abs,
            borderline_factor=self.borderline_factor,
        )

    def with_tolerance(self, value: float) -> "VerifierConfig":
        """Copy with both relative and absolute thresholds set to value"""
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["eps_rel"] = value
        data["eps_abs"] = value
        return VerifierConfig(**data)

    def get_golden_path(self, name: str) -> Path:
        """Get path to a golden file"""
        return self.golden_dir / f"{name}.json"

    def get_instance_path(self, name: str) -> Path:
        """Get path to a committed instance fixture"""
        return self.instances_dir / f"{name}.json"

    def log_file(self) -> Optional[Path]:
        return self.logs_dir / "circulant_verify.log" if self.log_to_file else None

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary"""
        result: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value)
            result[f.name] = value
        return result

    @classmethod
    def from_file(cls, config_path: Path) -> "VerifierConfig":
        """
        Load configuration from a JSON file

        Args:
            config_path: Path to the JSON configuration file

        Returns:
            Configuration with file values applied over the defaults
        """
        with open(config_path, "r", encoding="utf-8") as f:
            config_data = json.load(f)

        known = {f.name: f for f in fields(cls)}
        unknown = set(config_data) - set(known)
        if unknown:
            raise ValueError(f"Unknown configuration keys: {sorted(unknown)}")

        values: Dict[str, Any] = {}
        for key, value in config_data.items():
            if key.endswith("_dir") or key == "base_dir":
                path = Path(value)
                values[key] = path if path.is_absolute() else BASE_DIR / path
            elif key == "limit_offsets":
                values[key] = tuple(float(v) for v in value)
            else:
                values[key] = value
        return cls(**values)


def load_config(config_path: Optional[str] = None) -> VerifierConfig:
    """
    Resolve the active configuration

    Order: defaults, config file, environment (after loading .env).

    Args:
        config_path: Explicit config file path; falls back to
            CIRCULANT_CONFIG and then config/verifier_config.json

    Returns:
        Active configuration
    """
    load_dotenv()

    path_value = config_path or os.getenv("CIRCULANT_CONFIG")
    path = Path(path_value) if path_value else BASE_DIR / "config" / "verifier_config.json"
    config = VerifierConfig.from_file(path) if path.exists() else VerifierConfig()

    if os.getenv("CIRCULANT_LOG_LEVEL"):
        config.log_level = os.environ["CIRCULANT_LOG_LEVEL"].upper()
    if os.getenv("CIRCULANT_SEED"):
        config.seed = int(os.environ["CIRCULANT_SEED"])

    return config
