"""尖点和乐测试套件"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from conftest import REFERENCE_LHS, REFERENCE_RHS
from flagcoords.cusp_analysis import (
    CuspType,
    classify,
    cusp_holonomy,
    cusp_reports,
    peripheral_product,
    torus_parabolicity_check,
)
from flagcoords.elementary_isometries import TransferParams, flag_stabilizer
from flagcoords.errors import InvalidDecoration, WrongTriangulation
from flagcoords.hermitian_core import projective_matrix_distance, pu_distance
from flagcoords.random_instances import (
    engineered_parabolic_torus,
    engineered_screw_parabolic_torus,
    random_decoration,
    scale_delta,
)
from flagcoords.representation_builder import build_cocycle, holonomy


class TestPeripheralProduct:
    """外围乘积闭式测试类"""

    def test_pure_rotations(self):
        mu, K = peripheral_product([TransferParams(1, 0)] * 3)
        assert mu == pytest.approx(1)
        assert K == 0

    def test_matches_matrix_product(self, rng):
        """测试闭式 (mu, K) 与矩阵乘积一致"""
        params = [TransferParams(complex(*rng.normal(size=2)), float(rng.normal())) for _ in range(5)]
        matrix = np.eye(3, dtype=complex)
        for p in params:
            matrix = flag_stabilizer(p.mu, p.t) @ matrix
        mu, K = peripheral_product(params)
        assert mu == pytest.approx(matrix[0, 0], rel=1e-12)
        assert K == pytest.approx(matrix[0, 2], rel=1e-10, abs=1e-12)


class TestClassify:
    """尖点分类测试类"""

    @pytest.mark.parametrize("mu, K, expected", [
        (2, 0, CuspType.LOXODROMIC),
        (0.5j, 1, CuspType.LOXODROMIC),
        (1, 0, CuspType.COMPLEX_REFLECTION),
        (np.exp(0.3j), 1e-12, CuspType.COMPLEX_REFLECTION),
        (1j, 0.5, CuspType.SCREW_PARABOLIC),
    ])
    def test_classify(self, mu, K, expected):
        assert classify(mu, K, 1.0) is expected

    def test_k_threshold_scales_with_t(self):
        assert classify(1, 1e-8, 1.0) is CuspType.SCREW_PARABOLIC
        assert classify(1, 1e-8, 100.0) is CuspType.COMPLEX_REFLECTION


class TestCuspHolonomy:
    """尖点和乐测试类"""

    def test_reference_torus_is_loxodromic(self, torus, torus_instance):
        report = cusp_holonomy(torus, torus_instance.decoration, 0)
        assert report.cusp_type is CuspType.LOXODROMIC
        assert len(report.steps) == 6
        assert report.direct_residual < 1e-10
        assert abs(report.mu) == pytest.approx(REFERENCE_RHS / REFERENCE_LHS, rel=1e-9)

    def test_eigenvalue_moduli(self, torus, torus_instance):
        report = cusp_holonomy(torus, torus_instance.decoration, 0)
        moduli = sorted(np.abs(np.linalg.eigvals(report.matrix)))
        r = abs(report.mu)
        assert moduli == pytest.approx(sorted([r, 1.0, 1 / r]), rel=1e-9)

    def test_matches_cocycle_holonomy(self, torus, torus_instance):
        """测试与余链沿转移边的和乐一致"""
        report = cusp_holonomy(torus, torus_instance.decoration, 0)
        c = build_cocycle(torus, torus_instance.decoration)
        h = c.hexagonation
        path = [(h.transfer_edge(f, x), 1) for f, x in torus.cycle_of_puncture(0)]
        assert h.step_target(path[-1]) == h.step_source(path[0])
        assert pu_distance(holonomy(c, path).matrix, report.matrix) < 1e-9

    def test_sphere_reports(self, sphere, sphere_instance):
        reports = cusp_reports(sphere, sphere_instance.decoration)
        assert [r.puncture for r in reports] == [0, 1, 2]
        for report in reports:
            assert len(report.steps) == 2
            assert report.direct_residual < 1e-10

    def test_symmetric_sphere_is_complex_reflection(self, sphere, sphere_instance):
        """测试镜像球面的尖点均为复反射"""
        for report in cusp_reports(sphere, sphere_instance.decoration):
            assert report.cusp_type is CuspType.COMPLEX_REFLECTION

    @pytest.mark.parametrize("surface", ["torus", "sphere"])
    def test_random_classification_matches_matrix(self, request, rng, surface):
        """测试随机装饰的分类与直接矩阵乘积一致"""
        t = request.getfixturevalue(surface)
        for _ in range(100):
            d = random_decoration(t, rng).decoration
            c = build_cocycle(t, d)
            h = c.hexagonation
            for report in cusp_reports(t, d):
                assert report.direct_residual < 1e-9 * max(1.0, abs(report.mu), abs(report.K))
                path = [(h.transfer_edge(f, x), 1) for f, x in t.cycle_of_puncture(report.puncture)]
                assert projective_matrix_distance(holonomy(c, path).matrix, report.matrix) < 1e-8
                expected = classify(report.matrix[0, 0], report.matrix[0, 2], report.t_scale)
                assert report.cusp_type is expected

    def test_invalid_decoration(self, torus, torus_instance):
        broken = scale_delta(torus_instance.decoration, 0, 0, 1.05)
        with pytest.raises(InvalidDecoration):
            cusp_holonomy(torus, broken, 0)

    def test_unvalidated_perturbation(self, torus, torus_instance):
        """测试跳过校验的扰动装饰"""
        d = torus_instance.decoration
        base = cusp_holonomy(torus, d, 0)
        moved = cusp_holonomy(torus, scale_delta(d, 0, 0, 1.01), 0, validate=False)
        assert moved.cusp_type is CuspType.LOXODROMIC
        assert abs(moved.mu) == pytest.approx(abs(base.mu) / 1.01, rel=1e-9)


class TestTorusCriterion:
    """环面抛物判据测试类"""

    def test_reference_values(self, torus, torus_instance):
        check = torus_parabolicity_check(torus, torus_instance.decoration)
        assert check.lhs == pytest.approx(REFERENCE_LHS, rel=1e-10)
        assert check.rhs == pytest.approx(REFERENCE_RHS, rel=1e-10)
        assert check.lhs == pytest.approx(0.7363862, abs=1e-7)
        assert not check.satisfied
        assert not check.type_preserving
        assert check.mu_modulus == pytest.approx(check.rhs / check.lhs, rel=1e-9)

    def test_wrong_triangulation(self, sphere, sphere_instance):
        with pytest.raises(WrongTriangulation):
            torus_parabolicity_check(sphere, sphere_instance.decoration)

    def test_engineered_complex_reflection(self, rng):
        """测试构造的环面尖点为复反射"""
        instance = engineered_parabolic_torus(rng)
        t, d = instance.triangulation, instance.decoration
        report = cusp_holonomy(t, d, 0)
        assert report.mu_residual <= 1e-9
        assert report.cusp_type is CuspType.COMPLEX_REFLECTION
        check = torus_parabolicity_check(t, d)
        assert check.satisfied
        assert not check.type_preserving
        moved = cusp_holonomy(t, scale_delta(d, 0, 0, 1.01), 0, validate=False)
        assert moved.cusp_type is CuspType.LOXODROMIC

    def test_engineered_screw_parabolic(self, rng):
        """测试构造的环面尖点为螺旋抛物"""
        instance = engineered_screw_parabolic_torus(rng)
        t, d = instance.triangulation, instance.decoration
        report = cusp_holonomy(t, d, 0)
        assert report.mu_residual <= 1e-9
        assert report.cusp_type is CuspType.SCREW_PARABOLIC
        assert report.direct_residual < 1e-9 * max(1.0, abs(report.K))
        check = torus_parabolicity_check(t, d)
        assert check.satisfied
        assert check.type_preserving
        moved = cusp_holonomy(t, scale_delta(d, 0, 1, 1.01), 0, validate=False)
        assert moved.cusp_type is CuspType.LOXODROMIC


if __name__ == "__main__":
    pytest.main([__file__])
