"""文件格式测试套件"""

import json
import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from conftest import DATA_DIR, REFERENCE_M
from flagcoords.cusp_analysis import cusp_holonomy
from flagcoords.errors import FileFormatError
from flagcoords.io_formats import (
    DecorationFile,
    RunConfig,
    cusp_payload,
    format_complex,
    read_decoration,
    read_loops,
    read_mdecoration,
    read_triangulation,
    validation_payload,
    validation_text,
    write_model,
)
from flagcoords.representation_builder import TORUS_RELATION, standard_torus_loops
from flagcoords.surface_complex import is_standard_torus, validate_decoration


class TestShippedData:
    """随附数据文件测试类"""

    def test_torus_files(self):
        t = read_triangulation(DATA_DIR / "torus.json")
        assert is_standard_torus(t)
        d = read_decoration(DATA_DIR / "torus_decoration.json")
        assert validate_decoration(t, d).passed

    def test_sphere_files(self):
        t = read_triangulation(DATA_DIR / "sphere3.json")
        assert t.punctures == 3
        assert validate_decoration(t, read_decoration(DATA_DIR / "sphere3_decoration.json")).passed

    def test_mdecoration_file(self):
        md = read_mdecoration(DATA_DIR / "torus_mdecoration.json")
        assert md.m == pytest.approx(REFERENCE_M, rel=1e-12)

    def test_loops_file(self):
        loops = read_loops(DATA_DIR / "torus_loops.json")
        assert loops.loops() == standard_torus_loops()
        assert [tuple(letter) for letter in loops.relation] == list(TORUS_RELATION)


class TestReadErrors:
    """读取错误测试类"""

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileFormatError, match="cannot read"):
            read_triangulation(tmp_path / "absent.json")

    def test_syntax_error_has_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "genus": 1,\n  "punctures": \n}', encoding="utf-8")
        with pytest.raises(FileFormatError) as exc_info:
            read_triangulation(path)
        assert exc_info.value.line == 4
        assert exc_info.value.column is not None

    def test_schema_violation(self, tmp_path):
        """测试字段不符合模式时报错"""
        path = tmp_path / "decoration.json"
        path.write_text(json.dumps({"phi": [0.5, -1.0], "faces": []}), encoding="utf-8")
        with pytest.raises(FileFormatError, match="phi"):
            read_decoration(path)

    def test_unknown_field(self, tmp_path):
        path = tmp_path / "torus.json"
        data = json.loads((DATA_DIR / "torus.json").read_text(encoding="utf-8"))
        data["orientation"] = "positive"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(FileFormatError, match="orientation"):
            read_triangulation(path)

    def test_invalid_loop_direction(self, tmp_path):
        path = tmp_path / "loops.json"
        path.write_text(json.dumps({"generators": {"a": [[0, 2]]}}), encoding="utf-8")
        with pytest.raises(FileFormatError, match="direction"):
            read_loops(path)


class TestWriting:
    """写出测试类"""

    def test_decoration_survives_write(self, tmp_path, torus_instance):
        path = tmp_path / "out" / "decoration.json"
        write_model(path, DecorationFile.from_decoration(torus_instance.decoration))
        assert read_decoration(path) == torus_instance.decoration

    def test_format_complex(self):
        assert format_complex(1 - 2j) == "1-2i"
        assert format_complex(0.5) == "0.5+0i"

    def test_validation_reports(self, torus, torus_instance):
        report = validate_decoration(torus, torus_instance.decoration)
        payload = validation_payload(report)
        assert payload["passed"] is True
        assert len(payload["checks"]) == len(report.checks)
        assert validation_text(report).endswith("all constraints pass")

    def test_cusp_payload(self, torus, torus_instance):
        payload = cusp_payload(cusp_holonomy(torus, torus_instance.decoration, 0))
        assert payload["cusp_type"] == "Loxodromic"
        assert len(payload["steps"]) == 6
        json.dumps(payload)


class TestRunConfig:
    """运行配置测试类"""

    def test_defaults(self):
        config = RunConfig(command="validate")
        assert config.format == "text"
        assert config.tol is None

    @pytest.mark.parametrize("overrides", [
        {"command": "plot"},
        {"command": "solve", "branch": "012"},
        {"command": "solve", "branch": ""},
        {"command": "random", "tol": -1.0},
        {"command": "random", "retry_cap": 0},
    ])
    def test_rejects(self, overrides):
        with pytest.raises(ValidationError):
            RunConfig(**overrides)


if __name__ == "__main__":
    pytest.main([__file__])
