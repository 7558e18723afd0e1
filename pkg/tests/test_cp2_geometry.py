"""复双曲平面几何测试套件"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from flagcoords.cp2_geometry import (
    ComplexLine,
    Flag,
    Isometry,
    RPlane,
    boundary_frame,
    boundary_point,
    complex_symmetry,
    distance,
    gram_of_flags,
    lagrangian_fix_one_swap_two,
    lagrangian_fix_p_preserve_two_lines,
    lagrangian_preserve_line_swap_points,
    lagrangian_swap_lines_and_points,
    random_isometry,
    random_null_vector,
)
from flagcoords.errors import (
    ConcyclicPoints,
    GeometryError,
    NotAnIsometry,
    NotInteriorPoint,
    PointNotOnLine,
    PointOnLine,
)
from flagcoords.hermitian_core import VectorClass, form_defect, herm, herm_norm, same_point, vector_class


class TestLinesAndFlags:
    """复直线与旗测试类"""

    def test_line_needs_positive_polar(self):
        with pytest.raises(GeometryError, match="positive"):
            ComplexLine(np.array([1, 0, 0], dtype=complex))

    def test_standard_flag(self):
        flag = Flag.standard()
        assert flag.line.contains_boundary_point(flag.point)
        assert same_point(flag.polar, [0, 1, 0])

    def test_flag_point_must_be_on_line(self):
        with pytest.raises(PointNotOnLine):
            Flag(ComplexLine(np.array([1, 1, 0], dtype=complex)), np.array([0, 0, 1], dtype=complex))

    def test_flag_point_must_be_null(self):
        with pytest.raises(GeometryError, match="null"):
            Flag(ComplexLine(np.array([0, 1, 0], dtype=complex)), np.array([1, 0, -1], dtype=complex))

    def test_same_flag_is_projective(self, reference_flags):
        f = reference_flags[1]
        scaled = Flag(ComplexLine(2j * f.polar), -3 * f.point)
        assert f.same_flag(scaled)
        assert not f.same_flag(reference_flags[2])

    def test_boundary_frame(self, reference_flags):
        """测试边界标架正交归一"""
        for flag in reference_flags:
            u, v = boundary_frame(flag.line)
            assert abs(herm_norm(u) - 1) < 1e-12
            assert abs(herm_norm(v) + 1) < 1e-12
            assert abs(herm(u, v)) < 1e-12
            assert abs(herm(u, flag.polar)) < 1e-12
            for angle in (0.0, 1.3, -2.5):
                p = boundary_point(flag.line, angle)
                assert vector_class(p) is VectorClass.NULL
                assert flag.line.contains_boundary_point(p)

    def test_gram_of_flags(self, reference_flags):
        g = gram_of_flags(*reference_flags)
        assert g.shape == (3, 3)
        assert np.allclose(g, g.conj().T)

    def test_random_null_vector(self, rng):
        for _ in range(20):
            assert vector_class(random_null_vector(rng)) is VectorClass.NULL


class TestIsometries:
    """等距变换测试类"""

    def test_rejects_non_isometry(self):
        with pytest.raises(NotAnIsometry):
            Isometry(np.diag([2.0, 1.0, 1.0]).astype(complex))

    def test_normalises_determinant(self):
        iso = Isometry(2 * np.eye(3, dtype=complex))
        assert abs(np.linalg.det(iso.matrix) - 1) < 1e-12

    @given(st.integers(min_value=0, max_value=2 ** 31))
    @settings(max_examples=25, deadline=None)
    def test_random_isometry_group_laws(self, seed):
        """测试随机等距的群运算"""
        rng = np.random.default_rng(seed)
        g = random_isometry(rng)
        h = random_isometry(rng)
        assert form_defect(g.matrix) < 1e-9
        assert g.compose(g.inverse()).equals(Isometry.identity())
        assert (g @ h).inverse().equals(h.inverse() @ g.inverse(), tol=1e-7)

    def test_apply_flag(self, rng, reference_flags):
        g = random_isometry(rng)
        image = g.apply_flag(reference_flags[0])
        assert image.line.contains_boundary_point(image.point)

    def test_conjugate_by(self, rng):
        g = random_isometry(rng)
        h = random_isometry(rng)
        expected = g.compose(h).compose(g.inverse())
        assert h.conjugate_by(g).equals(expected)

    def test_antiholomorphic_composition(self):
        conj = Isometry(np.eye(3, dtype=complex), antiholomorphic=True)
        assert conj.antiholomorphic
        assert conj.compose(conj).equals(Isometry.identity())
        assert not conj.compose(conj).antiholomorphic
        assert conj.distance_to(Isometry.identity()) == float("inf")

    def test_complex_symmetry(self, reference_flags):
        line = reference_flags[2].line
        s = complex_symmetry(line)
        assert s.compose(s).equals(Isometry.identity())
        assert same_point(s.apply(line.polar), line.polar)
        p = reference_flags[2].point
        assert same_point(s.apply(p), p)

    def test_distance(self):
        n = np.array([1, 0, -1], dtype=complex)
        assert distance(n, n) == 0
        m = np.array([2, 0, -1], dtype=complex)
        assert distance(n, m) > 0
        assert abs(distance(n, m) - distance(m, n)) < 1e-12
        with pytest.raises(NotInteriorPoint):
            distance(n, [0, 1, 0])


class TestLagrangianReflections:
    """拉格朗日反射测试类"""

    def test_fix_point_preserve_two_lines(self, reference_flags):
        f1, f2, _ = reference_flags
        r = lagrangian_fix_p_preserve_two_lines(f1.line, f2.line, f1.point)
        assert isinstance(r, RPlane)
        assert same_point(r.apply(f1.point), f1.point)
        assert r.apply_line(f1.line).same_line(f1.line)
        assert r.apply_line(f2.line).same_line(f2.line)

    def test_swap_lines_and_points(self, reference_flags):
        """测试交换两条直线及其点"""
        f1, f2, _ = reference_flags
        r = lagrangian_swap_lines_and_points(f1.line, f2.line, f1.point, f2.point)
        assert same_point(r.apply(f1.point), f2.point)
        assert same_point(r.apply(f2.point), f1.point)
        assert r.apply_line(f1.line).same_line(f2.line)
        assert r.apply_line(f2.line).same_line(f1.line)

    def test_swap_requires_points_on_lines(self, reference_flags):
        f1, f2, _ = reference_flags
        with pytest.raises(PointNotOnLine):
            lagrangian_swap_lines_and_points(f1.line, f2.line, f2.point, f2.point)

    def test_preserve_line_swap_points(self, reference_flags):
        f1, f2, f3 = reference_flags
        r = lagrangian_preserve_line_swap_points(f1.line, f2.point, f3.point)
        assert same_point(r.apply(f2.point), f3.point)
        assert same_point(r.apply(f3.point), f2.point)
        assert r.apply_line(f1.line).same_line(f1.line)

    def test_preserve_line_rejects_point_on_line(self, reference_flags):
        f1, f2, _ = reference_flags
        with pytest.raises(PointOnLine):
            lagrangian_preserve_line_swap_points(f1.line, f1.point, f2.point)

    def test_fix_one_swap_two(self, reference_flags):
        p1, p2, p3 = (f.point for f in reference_flags)
        r = lagrangian_fix_one_swap_two(p1, p2, p3)
        assert same_point(r.apply(p1), p1)
        assert same_point(r.apply(p2), p3)
        assert same_point(r.apply(p3), p2)

    def test_fix_one_swap_two_rejects_chain(self):
        """测试同一复直线边界上的三点"""
        line = ComplexLine(np.array([0, 1, 0], dtype=complex))
        points = [boundary_point(line, angle) for angle in (0.0, 1.0, 2.0)]
        with pytest.raises(ConcyclicPoints):
            lagrangian_fix_one_swap_two(*points)

    def test_composition_of_reflections_is_holomorphic(self, reference_flags):
        f1, f2, f3 = reference_flags
        a = lagrangian_fix_p_preserve_two_lines(f1.line, f2.line, f1.point)
        b = lagrangian_preserve_line_swap_points(f1.line, f2.point, f3.point)
        product = a.compose(b)
        assert not product.antiholomorphic
        assert form_defect(product.matrix) < 1e-9


if __name__ == "__main__":
    pytest.main([__file__])
