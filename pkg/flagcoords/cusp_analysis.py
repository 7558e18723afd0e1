"""
尖点分析模块
Holonomy around a puncture, read off from the decoration.

Walking the corners around a puncture crosses only transfer edges, so the
peripheral holonomy is a product of flag stabilisers D_mu U_t. The product is
upper triangular with top-left entry mu = prod mu_j and corner entry

    K = i sum_j t_j (prod_{l >= j} mu_l) / (prod_{l < j} conj(mu_l)).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from config.settings import DEFAULT_TOLERANCES, ToleranceConfig
from flagcoords.elementary_isometries import TransferParams, flag_stabilizer, transfer_params
from flagcoords.errors import InvalidDecoration, WrongTriangulation
from flagcoords.surface_complex import Corner, Decoration, Triangulation, is_standard_torus, validate_decoration

logger = logging.getLogger(__name__)


class CuspType(str, Enum):
    LOXODROMIC = "Loxodromic"
    SCREW_PARABOLIC = "ScrewParabolic"
    COMPLEX_REFLECTION = "ComplexReflection"


@dataclass(frozen=True)
class CuspStep:
    corner: Corner
    mu: complex
    t: float


@dataclass(frozen=True)
class CuspReport:
    puncture: int
    mu: complex
    K: complex
    cusp_type: CuspType
    steps: Tuple[CuspStep, ...]
    matrix: np.ndarray
    direct_residual: float

    @property
    def mu_residual(self) -> float:
        return abs(abs(self.mu) - 1)

    @property
    def t_scale(self) -> float:
        return max(1.0, sum(abs(step.t) for step in self.steps))


@dataclass(frozen=True)
class TorusCheck:
    """Both sides of the torus parabolicity criterion."""
    satisfied: bool
    lhs: float
    rhs: float
    K: complex
    mu_modulus: float
    type_preserving: bool


def peripheral_product(params: List[TransferParams]) -> Tuple[complex, complex]:
    """(mu, K) of T_k ... T_1 in closed form."""
    mus = [p.mu for p in params]
    K = 0j
    for j, step in enumerate(params):
        K += step.t * np.prod(mus[j:]) / np.prod(np.conj(mus[:j]))
    return complex(np.prod(mus)), complex(1j * K)


def classify(mu: complex, K: complex, t_scale: float,
             tolerances: Optional[ToleranceConfig] = None) -> CuspType:
    tol = tolerances or DEFAULT_TOLERANCES
    if abs(abs(mu) - 1) >= tol.cusp_mu:
        return CuspType.LOXODROMIC
    if abs(K) < tol.cusp_k * t_scale:
        return CuspType.COMPLEX_REFLECTION
    return CuspType.SCREW_PARABOLIC


def _require_valid(t: Triangulation, d: Decoration, tolerances: Optional[ToleranceConfig]) -> None:
    report = validate_decoration(t, d, tolerances)
    if not report.passed:
        first = report.failures()[0]
        raise InvalidDecoration(f"{first.name} fails at {first.location} (residual {first.residual:.3e})")


def cusp_holonomy(t: Triangulation, d: Decoration, puncture: int,
                  tolerances: Optional[ToleranceConfig] = None, validate: bool = True) -> CuspReport:
    """Peripheral holonomy of ``puncture`` with its classification."""
    if validate:
        _require_valid(t, d, tolerances)
    cycle = t.cycle_of_puncture(puncture)
    steps, params = [], []
    for f, x in cycle:
        p = transfer_params(d.face_record(t, f), (x, (x + 1) % 3, (x + 2) % 3))
        params.append(p)
        steps.append(CuspStep((f, x), p.mu, p.t))
    mu, K = peripheral_product(params)

    matrix = np.eye(3, dtype=complex)
    for p in params:
        matrix = flag_stabilizer(p.mu, p.t) @ matrix
    direct_residual = max(abs(matrix[0, 0] - mu), abs(matrix[0, 2] - K))
    t_scale = max(1.0, sum(abs(p.t) for p in params))
    cusp_type = classify(mu, K, t_scale, tolerances)
    logger.info("puncture %d: |mu| = %.17g, |K| = %.3e -> %s",
                puncture, abs(mu), abs(K), cusp_type.value)
    return CuspReport(puncture, mu, K, cusp_type, tuple(steps), matrix, float(direct_residual))


def cusp_reports(t: Triangulation, d: Decoration,
                 tolerances: Optional[ToleranceConfig] = None) -> List[CuspReport]:
    _require_valid(t, d, tolerances)
    return [cusp_holonomy(t, d, p, tolerances, validate=False) for p in range(t.punctures)]


def torus_parabolicity_check(t: Triangulation, d: Decoration,
                             tolerances: Optional[ToleranceConfig] = None) -> TorusCheck:
    """Compare the delta products of the two faces of the standard torus.

    The cusp holonomy has |mu| = rhs / lhs where lhs is the modulus of the
    product of the stored deltas of face 0 and rhs is the same product for
    the reversed deltas of face 1.
    """
    if not is_standard_torus(t):
        raise WrongTriangulation("the criterion applies to the standard two-face torus only")
    tol = tolerances or DEFAULT_TOLERANCES
    lhs = float(abs(np.prod(d.delta[0])))
    rhs = float(np.prod(d.phi) / abs(np.prod(d.delta[1])))
    report = cusp_holonomy(t, d, 0, tolerances)
    satisfied = abs(lhs - rhs) < tol.cusp_mu * max(lhs, rhs)
    type_preserving = satisfied and abs(report.K) >= tol.cusp_k * report.t_scale
    logger.info("torus criterion: lhs = %.17g, rhs = %.17g, satisfied = %s", lhs, rhs, satisfied)
    return TorusCheck(bool(satisfied), lhs, rhs, report.K, abs(report.mu), bool(type_preserving))
