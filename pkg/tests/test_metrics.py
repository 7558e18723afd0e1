"""计算指标监控测试"""

import sys
from pathlib import Path

import pytest

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from flagcoords.errors import InvalidM
from monitoring import ComputationMetrics, track_computation


class TestComputationMetrics:
    """监控器测试类"""

    @pytest.fixture
    def metrics(self):
        return ComputationMetrics(namespace="test_flagcoords")

    def test_success_is_counted(self, metrics):
        @track_computation("square", metrics)
        def square(x):
            return x * x

        assert square(3) == 9
        assert square(4) == 16
        assert metrics.count("square") == 2
        assert metrics.count("square", "error") == 0

    def test_error_is_counted_and_reraised(self, metrics):
        """测试异常计数并重新抛出"""
        @metrics.track_computation("fails")
        def fails():
            raise InvalidM("m must differ from 0 and 1")

        with pytest.raises(InvalidM):
            fails()
        assert metrics.count("fails", "error") == 1
        value = metrics.registry.get_sample_value(
            "test_flagcoords_errors_total", {"operation": "fails", "error_type": "InvalidM"})
        assert value == 1

    def test_export_text(self, metrics):
        @metrics.track_computation("noop")
        def noop():
            return None

        noop()
        text = metrics.export_text()
        assert "test_flagcoords_operations_total" in text
        assert "test_flagcoords_operation_seconds" in text

    def test_wraps_preserves_name(self, metrics):
        @metrics.track_computation("named")
        def named_function():
            """docstring"""

        assert named_function.__name__ == "named_function"
        assert named_function.__doc__ == "docstring"


if __name__ == "__main__":
    pytest.main([__file__])
