"""容差配置测试"""

import os
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import DEFAULT_RETRY_CAP, SUPPORTED_SURFACES, DEFAULT_TOLERANCES, get_tolerance_config
from config.settings import ToleranceConfig
from flagcoords.errors import ConfigurationError


class TestToleranceConfig:
    """容差配置测试类"""

    @pytest.fixture
    def clean_env(self):
        """清空容差相关环境变量"""
        env = {k: v for k, v in os.environ.items() if not k.startswith("FLAGCOORDS_TOL_")}
        with patch.dict(os.environ, env, clear=True):
            yield env

    def test_defaults(self, clean_env, tmp_path):
        config = get_tolerance_config(dotenv_path=str(tmp_path / "missing.env"))
        assert config == ToleranceConfig()
        assert config.constraint == 1e-8
        assert config.relation == 1e-6
        assert config.degenerate_phi == 1e-6

    def test_environment_override(self, clean_env, tmp_path):
        """测试环境变量覆盖"""
        with patch.dict(os.environ, {"FLAGCOORDS_TOL_CONSTRAINT": "1e-6", "FLAGCOORDS_TOL_CUSP_MU": "1e-7"}):
            config = get_tolerance_config(dotenv_path=str(tmp_path / "missing.env"))
        assert config.constraint == 1e-6
        assert config.cusp_mu == 1e-7
        assert config.herm == DEFAULT_TOLERANCES.herm

    def test_dotenv_file(self, clean_env, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text("FLAGCOORDS_TOL_RELATION=1e-5\n", encoding="utf-8")
        config = get_tolerance_config(dotenv_path=str(env_file))
        assert config.relation == 1e-5

    @pytest.mark.parametrize("raw", ["abc", "-1", "0"])
    def test_malformed_values(self, clean_env, tmp_path, raw):
        """测试非法取值"""
        with patch.dict(os.environ, {"FLAGCOORDS_TOL_NULL": raw}):
            with pytest.raises(ConfigurationError, match="FLAGCOORDS_TOL_NULL"):
                get_tolerance_config(dotenv_path=str(tmp_path / "missing.env"))

    def test_with_overrides(self):
        config = DEFAULT_TOLERANCES.with_overrides(constraint=1e-6, compatibility=None)
        assert config.constraint == 1e-6
        assert config.compatibility == DEFAULT_TOLERANCES.compatibility
        with pytest.raises(ConfigurationError, match="must be positive"):
            DEFAULT_TOLERANCES.with_overrides(relation=-1.0)

    def test_constants(self):
        assert DEFAULT_RETRY_CAP == 10_000
        assert set(SUPPORTED_SURFACES) == {(1, 1), (0, 3)}


if __name__ == "__main__":
    pytest.main([__file__])
