"""
数值容差配置模块
Numerical tolerance settings for the flag-coordinate kernel.

Values come from the environment (``FLAGCOORDS_TOL_<NAME>``), optionally
pre-loaded from a ``.env`` file, and fall back to the defaults below.
"""

import os
import logging
from dataclasses import dataclass, fields, replace
from typing import Optional

from dotenv import load_dotenv

from flagcoords.errors import ConfigurationError

logger = logging.getLogger(__name__)

ENV_PREFIX = "FLAGCOORDS_TOL_"


@dataclass(frozen=True)
class ToleranceConfig:
    """容差配置数据类"""
    herm: float = 1e-12            # Hermitian symmetry, imaginary residue of <v,v>
    null: float = 1e-10            # null-vector test, relative to |v|^2
    on_line: float = 1e-9          # point-on-line test, relative to |p||c|
    projective: float = 1e-8       # same point of CP^2
    isometry: float = 1e-9         # form preservation and det = 1
    constraint: float = 1e-8       # normalised decoration residuals
    compatibility: float = 1e-8    # m across a glued edge, relative
    degenerate_phi: float = 1e-6   # solver rejects |phi - 1| below this
    nondegenerate: float = 1e-8    # decoration marked degenerate below this
    relation: float = 1e-6         # surface-group relation residual
    cusp_mu: float = 1e-9          # ||mu| - 1| threshold
    cusp_k: float = 1e-9           # |K| threshold, scaled by max(1, sum |t_j|)

    def with_overrides(self, **overrides: Optional[float]) -> "ToleranceConfig":
        """Return a copy with the non-None overrides applied."""
        values = {k: v for k, v in overrides.items() if v is not None}
        for name, value in values.items():
            if value <= 0:
                raise ConfigurationError(f"tolerance '{name}' must be positive, got {value}")
        return replace(self, **values)


def _read_float(name: str, default: float) -> float:
    raw = os.getenv(f"{ENV_PREFIX}{name.upper()}")
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{ENV_PREFIX}{name.upper()} is not a number: {raw!r}") from exc
    if value <= 0:
        raise ConfigurationError(f"{ENV_PREFIX}{name.upper()} must be positive, got {value}")
    return value


def get_tolerance_config(dotenv_path: Optional[str] = None) -> ToleranceConfig:
    """获取容差配置 (environment first, then defaults)."""
    load_dotenv(dotenv_path=dotenv_path, override=False)
    defaults = ToleranceConfig()
    values = {f.name: _read_float(f.name, getattr(defaults, f.name)) for f in fields(ToleranceConfig)}
    config = ToleranceConfig(**values)
    if config != defaults:
        logger.info("Tolerance overrides from environment: %s",
                    {k: v for k, v in values.items() if v != getattr(defaults, k)})
    return config


DEFAULT_TOLERANCES = ToleranceConfig()
