"""旗不变量测试套件"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from conftest import REFERENCE_DELTA, REFERENCE_M, REFERENCE_PHI, REFERENCE_PHI_TRIPLE, SQRT2, SQRT3
from flagcoords.cp2_geometry import ComplexLine, Flag, random_isometry
from flagcoords.errors import InvalidInvariants, NonGenericPair, NonGenericTriple
from flagcoords.invariants import (
    DELTA_ORDER,
    LinePosition,
    PairLineInvariant,
    TripleFlagInvariant,
    TripleLineInvariant,
    all_relabelings,
    circle_residual,
    constraint_jacobian_corank,
    constraint_residuals,
    delta_gram,
    delta_invariant,
    m_invariant,
    pair_invariant,
    phi_from_m,
    phi_invariant,
    Phi_invariant,
    reconstruct_flags,
    reconstruct_lines,
    triple_invariants,
    validate_triple_record,
)
from flagcoords.random_instances import random_generic_triple


def relative_gap(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0)))


class TestReferenceTriple:
    """参考三元组的闭式不变量测试"""

    def test_line_invariants(self, reference_flags):
        l1, l2, l3 = (f.line for f in reference_flags)
        assert phi_invariant(l1, l2) == pytest.approx(REFERENCE_PHI[0], abs=1e-12)
        assert phi_invariant(l2, l3) == pytest.approx(REFERENCE_PHI[1], abs=1e-12)
        assert phi_invariant(l3, l1) == pytest.approx(REFERENCE_PHI[2], abs=1e-12)
        assert Phi_invariant(l1, l2, l3) == pytest.approx(REFERENCE_PHI_TRIPLE, abs=1e-12)
        assert delta_gram(l1, l2, l3) == pytest.approx(-1 / 24, abs=1e-12)

    def test_stored_deltas(self, reference_flags):
        f1, f2, f3 = reference_flags
        assert delta_invariant(f1, f2.line, f3.line) == pytest.approx(REFERENCE_DELTA[0], abs=1e-12)
        assert delta_invariant(f2, f3.line, f1.line) == pytest.approx(REFERENCE_DELTA[1], abs=1e-12)
        assert delta_invariant(f3, f1.line, f2.line) == pytest.approx(REFERENCE_DELTA[2], abs=1e-12)

    def test_reversed_deltas(self, reference_record):
        """测试反向 delta 满足乘积关系"""
        assert reference_record.delta_of(0, 2, 1) == pytest.approx(5 / 6, abs=1e-12)
        assert reference_record.delta_of(1, 0, 2) == pytest.approx(2 - 2 * SQRT2, abs=1e-12)
        assert reference_record.delta_of(2, 1, 0) == pytest.approx((SQRT3 + 1) / 8, abs=1e-12)

    def test_m_values(self, reference_flags, reference_record):
        f1, f2, f3 = reference_flags
        assert m_invariant(f1, f2) == pytest.approx(REFERENCE_M[0], abs=1e-12)
        assert m_invariant(f2, f3) == pytest.approx(REFERENCE_M[1], abs=1e-12)
        assert m_invariant(f3, f1) == pytest.approx(REFERENCE_M[2], abs=1e-12)
        assert reference_record.m_residual < 1e-12

    def test_phi_from_m(self):
        for m, phi in zip(REFERENCE_M, REFERENCE_PHI):
            assert phi_from_m(m) == pytest.approx(phi, rel=1e-12)

    def test_record_accessors(self, reference_record):
        assert reference_record.stored_deltas() == pytest.approx(REFERENCE_DELTA, abs=1e-12)
        assert reference_record.Delta == pytest.approx(-1 / 24, abs=1e-12)
        assert reference_record.m_of(1, 0) == pytest.approx(np.conj(REFERENCE_M[0]), abs=1e-12)
        assert reference_record.Phi_of(0, 2, 1) == pytest.approx(REFERENCE_PHI_TRIPLE, abs=1e-12)
        assert reference_record.as_vector().shape == (13,)


class TestGenericity:
    """非一般位置检测测试类"""

    @pytest.fixture
    def orthogonal_flag(self):
        return Flag(ComplexLine(np.array([1, 0, 1], dtype=complex)), np.array([1, SQRT2, -1], dtype=complex))

    def test_orthogonal_lines(self, reference_flags, orthogonal_flag):
        with pytest.raises(NonGenericTriple) as exc_info:
            triple_invariants(reference_flags[0], orthogonal_flag, reference_flags[2])
        assert exc_info.value.reason == "orthogonal-lines"

    def test_identical_lines(self, reference_flags):
        f1 = reference_flags[0]
        other = Flag(f1.line, np.array([0, 0, 1], dtype=complex))
        with pytest.raises(NonGenericTriple) as exc_info:
            triple_invariants(f1, other, reference_flags[2])
        assert exc_info.value.reason == "identical-lines"

    def test_point_on_other_line(self):
        """测试旗点落在另一条直线上"""
        f1 = Flag.standard()
        f2 = Flag(ComplexLine(np.array([1, 1, 0], dtype=complex)), np.array([1, 0, 0], dtype=complex))
        with pytest.raises(NonGenericPair) as exc_info:
            m_invariant(f1, f2)
        assert exc_info.value.reason == "point-on-line"


class TestPairLineInvariant:
    """直线对相对位置测试类"""

    def test_reference_positions(self, reference_flags):
        l1, l2, l3 = (f.line for f in reference_flags)
        first, second, third = pair_invariant(l1, l2), pair_invariant(l2, l3), pair_invariant(l3, l1)
        assert first.position() is LinePosition.INTERSECTING
        assert first.angle == pytest.approx(np.pi / 4, abs=1e-12)
        assert second.position() is LinePosition.DISJOINT
        assert second.distance == pytest.approx(2 * np.arccosh(5 / np.sqrt(24)), abs=1e-12)
        assert third.position() is LinePosition.INTERSECTING
        assert third.distance == 0.0

    @pytest.mark.parametrize("phi, position", [
        (0.0, LinePosition.INTERSECTING),
        (1.0, LinePosition.ASYMPTOTIC),
        (1 + 1e-12, LinePosition.ASYMPTOTIC),
        (4.0, LinePosition.DISJOINT),
    ])
    def test_position(self, phi, position):
        assert PairLineInvariant(phi).position() is position

    def test_orthogonal_lines_meet_at_right_angle(self):
        assert PairLineInvariant(0.0).angle == pytest.approx(np.pi / 2)

    def test_negative_phi(self):
        with pytest.raises(InvalidInvariants, match="phi"):
            PairLineInvariant(-0.1)

    def test_triple_pairs(self, reference_record):
        """测试三元组的三个直线对"""
        pairs = reference_record.line_invariant().pairs
        assert [pair.phi for pair in pairs] == pytest.approx(REFERENCE_PHI, abs=1e-12)
        with pytest.raises(InvalidInvariants, match="phi"):
            TripleLineInvariant(0.5, -1.0, 1 / 3, 0.5).validate()


class TestRecordConstraints:
    """不变量约束测试类"""

    def test_reference_constraints(self, reference_record):
        residuals = constraint_residuals(reference_record)
        assert residuals.pop("gram-determinant") < 0
        assert max(residuals.values()) < 1e-10
        validate_triple_record(reference_record)

    def test_random_triples_satisfy_constraints(self, rng):
        """测试随机三元组满足全部关系, 包括 m 的不变量表达式"""
        for _ in range(1000):
            _, record = random_generic_triple(rng)
            assert record.m_residual < 1e-6
            residuals = constraint_residuals(record)
            assert residuals.pop("gram-determinant") < 0
            for name, value in residuals.items():
                assert value < (1e-8 if name.startswith(("delta-product", "circle")) else 1e-6), name

    def test_circle_violation_is_reported(self, reference_record):
        stored = list(reference_record.stored_deltas())
        stored[0] *= 1.5
        broken = TripleFlagInvariant.from_face_data(reference_record.phi, reference_record.Phi, stored)
        assert circle_residual(broken, 0, 1, 2) > 1e-3
        with pytest.raises(InvalidInvariants) as exc_info:
            validate_triple_record(broken)
        assert exc_info.value.constraint.startswith(("circle", "m["))

    def test_positive_gram_determinant(self):
        lines = TripleLineInvariant(0.5, 0.5, 0.5, np.sqrt(0.125))
        assert lines.Delta > 0
        with pytest.raises(InvalidInvariants, match="gram-determinant"):
            lines.validate()

    def test_modulus_violation(self):
        with pytest.raises(InvalidInvariants, match="modulus"):
            TripleLineInvariant(0.5, 25 / 24, 1 / 3, 0.5).validate()

    def test_jacobian_corank(self, reference_record):
        """测试约束雅可比矩阵的余秩"""
        assert constraint_jacobian_corank(reference_record) == 7

    def test_random_jacobian_corank(self, rng):
        checked = 0
        while checked < 20:
            _, record = random_generic_triple(rng)
            moduli = [abs(d) for d in record.delta]
            if not (0.1 <= min(moduli) and max(moduli) <= 10 and 0.1 <= min(record.phi) and max(record.phi) <= 10):
                continue
            assert constraint_jacobian_corank(record) == 7
            checked += 1


class TestRecordAlgebra:
    """不变量记录代数测试类"""

    def test_from_face_data_reproduces_m(self, reference_record):
        rebuilt = TripleFlagInvariant.from_face_data(
            reference_record.phi, reference_record.Phi, reference_record.stored_deltas())
        assert relative_gap(rebuilt.as_vector(), reference_record.as_vector()) < 1e-10

    def test_permuted_matches_relabelled_flags(self, reference_flags, reference_record):
        for perm, record in all_relabelings(reference_record).items():
            direct = triple_invariants(*(reference_flags[i] for i in perm))
            assert relative_gap(record.as_vector(), direct.as_vector()) < 1e-10

    def test_isometry_invariance(self, rng, reference_flags, reference_record):
        g = random_isometry(rng)
        moved = triple_invariants(*(g.apply_flag(f) for f in reference_flags))
        assert relative_gap(moved.as_vector(), reference_record.as_vector()) < 1e-7

    def test_reconstruct_lines(self, reference_record):
        lines = reconstruct_lines(reference_record.line_invariant())
        assert phi_invariant(lines[0], lines[1]) == pytest.approx(REFERENCE_PHI[0], rel=1e-10)
        assert Phi_invariant(*lines) == pytest.approx(REFERENCE_PHI_TRIPLE, rel=1e-10)

    def test_reconstruct_flags_round_trip(self, rng, reference_record):
        """测试从不变量重建旗三元组"""
        records = [reference_record] + [random_generic_triple(rng)[1] for _ in range(1000)]
        for record in records:
            rebuilt = triple_invariants(*reconstruct_flags(record))
            assert relative_gap(rebuilt.as_vector(), record.as_vector()) < 1e-6

    def test_delta_order_covers_all_corners(self):
        assert sorted(DELTA_ORDER) == sorted(
            (i, j, k) for i in range(3) for j in range(3) for k in range(3) if len({i, j, k}) == 3)


if __name__ == "__main__":
    pytest.main([__file__])
