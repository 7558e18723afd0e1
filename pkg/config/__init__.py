"""
配置模块
Tolerances, run configuration and project-wide constants."""

from .settings import (
    ToleranceConfig,
    DEFAULT_TOLERANCES,
    get_tolerance_config,
)

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOLERANCES",
    "get_tolerance_config",
]

# 配置版本
VERSION = "1.0.0"

# 默认配置
DEFAULT_SEED = 0
DEFAULT_RETRY_CAP = 10_000
SIGNIFICANT_DIGITS = 17

# (genus, punctures) pairs with a catalogued triangulation
SUPPORTED_SURFACES = {
    (1, 1): "standard_torus",
    (0, 3): "thrice_punctured_sphere",
}
