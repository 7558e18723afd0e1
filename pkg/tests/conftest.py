"""测试公共夹具"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from flagcoords.invariants import triple_invariants  # noqa: E402
from flagcoords.random_instances import reference_instance, reference_triple  # noqa: E402
from flagcoords.surface_complex import standard_torus, thrice_punctured_sphere  # noqa: E402

DATA_DIR = Path(__file__).parent.parent / "data"

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
SQRT6 = np.sqrt(6.0)

# closed-form invariants of the reference triple
REFERENCE_PHI = (0.5, 25 / 24, 1 / 3)
REFERENCE_PHI_TRIPLE = 5 / 12
REFERENCE_DELTA = (1.25, -(1 + SQRT2) / 6, 2 * SQRT3 - 2)
REFERENCE_M = (-1 - SQRT2, 25 - 10 * SQRT6, -(1 + SQRT3) / 2)
# both torus faces carry stored deltas of the same moduli
REFERENCE_LHS = float(np.prod(np.abs(REFERENCE_DELTA)))
REFERENCE_RHS = float(np.prod(REFERENCE_PHI)) / REFERENCE_LHS


@pytest.fixture
def rng():
    """固定种子的随机数生成器"""
    return np.random.default_rng(20240501)


@pytest.fixture
def reference_flags():
    return reference_triple()


@pytest.fixture
def reference_record(reference_flags):
    return triple_invariants(*reference_flags)


@pytest.fixture
def torus():
    return standard_torus()


@pytest.fixture
def sphere():
    return thrice_punctured_sphere()


@pytest.fixture
def torus_instance(torus):
    return reference_instance(torus)


@pytest.fixture
def sphere_instance(sphere):
    return reference_instance(sphere)
