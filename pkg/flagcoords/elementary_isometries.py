"""
初等等距变换
Standard position of a (flag, line) pair and the explicit SU(2,1) matrices
attached to a triple of flags: the transfer and exchange isometries, the
cube-root branch ``theta`` and Heisenberg translations.

The explicit matrices live in the frame where the first flag is
p = (1,0,0), c = (0,1,0) and the second line has polar (a, sqrt 2, 1);
the ``*_isometry`` functions return their world-frame conjugates.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from flagcoords.cp2_geometry import (
    ComplexLine,
    Flag,
    Isometry,
    complex_symmetry,
    lagrangian_fix_one_swap_two,
    lagrangian_fix_p_preserve_two_lines,
    lagrangian_preserve_line_swap_points,
    lagrangian_swap_lines_and_points,
)
from flagcoords.errors import AsymptoticLines, InvalidM, NonGenericPair
from flagcoords.hermitian_core import herm, herm_norm, same_point
from flagcoords.invariants import (
    LinePosition,
    TripleFlagInvariant,
    m_invariant,
    pair_invariant,
    phi_invariant,
    triple_invariants,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class StandardPair:
    """A (flag, line) pair and the isometry carrying it to standard position."""
    a: float
    normalizer: Isometry

    @property
    def phi(self) -> float:
        return 1.0 / (1.0 + self.a)


@dataclass(frozen=True)
class TransferParams:
    mu: complex
    t: float

    def __post_init__(self):
        if self.mu == 0:
            raise ValueError("transfer parameter mu must be non-zero")


def theta(z: complex) -> complex:
    """rho e^{i theta} -> rho e^{i theta / 3}, theta in (-pi, pi]."""
    z = complex(z)
    if z == 0:
        return 0j
    arg = np.angle(z)
    if arg <= -np.pi:
        arg = np.pi
    return abs(z) * np.exp(1j * arg / 3)


def flag_stabilizer(lam: complex, t: float) -> np.ndarray:
    """D_lambda U_t: the stabiliser of the standard flag with parameters (lambda, t)."""
    lam = complex(lam)
    return np.array([
        [lam, 0, 1j * t * lam],
        [0, np.conj(lam) / lam, 0],
        [0, 0, 1 / np.conj(lam)],
    ], dtype=complex)


def heisenberg_translation(w: complex, tau: float) -> Isometry:
    """Unipotent translation of the Heisenberg group fixing (1,0,0)."""
    w = complex(w)
    return Isometry(np.array([
        [1, -np.conj(w) * SQRT2, -abs(w) ** 2 + 1j * tau],
        [0, 1, w * SQRT2],
        [0, 0, 1],
    ], dtype=complex))


def _flag_frame(flag: Flag) -> np.ndarray:
    """Inverse of the basis (p, c, q) with Gram J, sending the flag to (e1, e2)."""
    p = flag.point
    c = flag.line.unit_polar()
    best = None
    for v in np.eye(3, dtype=complex):
        w = v - herm(v, c) * c
        score = abs(herm(w, p))
        if best is None or score > best[0]:
            best = (score, w)
    w = best[1]
    wp = herm(w, p)
    q = (w - herm_norm(w) / (2 * np.conj(wp)) * p) / wp
    return np.linalg.inv(np.column_stack([p, c, q]))


def normalize_to_standard(f1: Flag, line2: ComplexLine) -> StandardPair:
    """The unique isometry sending f1 to the standard flag and line2 to (a, sqrt 2, 1)."""
    if f1.line.same_line(line2):
        raise NonGenericPair("identical", "the two lines coincide")
    if phi_invariant(f1.line, line2) <= 1e-10:
        raise NonGenericPair("orthogonal", "the two lines are orthogonal")
    if line2.contains_boundary_point(f1.point):
        raise NonGenericPair("point-on-line", "the flag point lies on the second line")
    n0 = _flag_frame(f1)
    c2 = n0 @ line2.polar
    c2 = c2 / c2[2]
    a_raw, b = c2[0], c2[1]
    t = -a_raw.imag
    lam = SQRT2 * theta(b) / abs(b) ** 2
    a = 2 * a_raw.real / abs(b) ** 2
    normalizer = Isometry(flag_stabilizer(lam, t) @ n0)
    return StandardPair(float(a), normalizer)


# -- transfer ---------------------------------------------------------------

def transfer_params(inv: TripleFlagInvariant, corners: Sequence[int] = (0, 1, 2)) -> TransferParams:
    """(mu, t) of the transfer at corner x from line y to line z."""
    x, y, z = corners
    d = inv.delta_of(x, y, z)
    mu = theta(inv.Phi_of(x, y, z) / (d * inv.phi_of(x, z)))
    t = (2 * d * (inv.phi_of(y, z) - inv.Phi_of(x, z, y)) / (inv.phi_of(x, y) * inv.phi_of(y, z))).imag
    return TransferParams(mu, float(t))


def transfer_matrix(inv: TripleFlagInvariant, corners: Sequence[int] = (0, 1, 2)) -> Isometry:
    """Transfer isometry in the standard frame of (F_x, C_y).

    Fixes the standard flag and carries C_z to standard position.
    """
    params = transfer_params(inv, corners)
    return Isometry(flag_stabilizer(params.mu, params.t))


def transfer_isometry(f1: Flag, f2: Flag, f3: Flag) -> Isometry:
    """World-frame transfer of f1 from line C2 to line C3."""
    inv = triple_invariants(f1, f2, f3)
    normalizer = normalize_to_standard(f1, f2.line).normalizer
    return transfer_matrix(inv).conjugate_by(normalizer.inverse())


def transfer_isometry_geometric(f1: Flag, f2: Flag, f3: Flag) -> Isometry:
    """The same transfer as a product of two Lagrangian reflections.

    When the complex symmetries of C2 and C3 send p1 to the same point, the
    transfer fixes that point as well as F1 and is the identity.
    """
    p1 = f1.point
    r2 = complex_symmetry(f2.line).apply(p1)
    r3 = complex_symmetry(f3.line).apply(p1)
    if same_point(r2, r3):
        logger.debug("reflected points coincide, transfer is the identity")
        return Isometry.identity()
    first = lagrangian_preserve_line_swap_points(f1.line, r3, r2)
    second = lagrangian_fix_one_swap_two(r2, p1, first.apply(p1))
    return second.compose(first)


# -- exchange ---------------------------------------------------------------

def exchange_matrix(m12: complex) -> Isometry:
    """Exchange isometry in the standard frame of (F_1, C_2), for the pair invariant m12."""
    m12 = complex(m12)
    if abs(m12) < 1e-14 or abs(m12 - 1) < 1e-14:
        raise InvalidM(f"m must differ from 0 and 1, got {m12}")
    z = 1 / np.conj(m12)
    zz = z * (z - 1)
    if abs(zz) < 1e-14:
        raise InvalidM(f"degenerate exchange parameter z = {z}")
    lam = 2 * theta(zz)
    lamb = np.conj(lam)
    zb = np.conj(z)
    n2 = abs(z) ** 2
    d = 4 * abs(zz) ** 2
    w = z - zb - n2
    e = np.array([
        [lam * w / d,
         SQRT2 * zb * lam * w / d + lam / (SQRT2 * (z - 1)),
         lam / (1 - z) + lam * w ** 2 / d],
        [lamb / (SQRT2 * lam * (zb - 1)),
         lamb / (lam * (zb - 1)),
         lamb * (n2 - z - zb) / (lam * (zb - 1) * SQRT2)],
        [1 / lamb,
         SQRT2 * zb / lamb,
         (-n2 + z - zb) / lamb],
    ], dtype=complex)
    return Isometry(e)


def standard_partner(a: float, m12: complex) -> Tuple[np.ndarray, np.ndarray]:
    """Polar of C_2 and the point p_2 of the pair with invariant m12 in standard position."""
    z = 1 / np.conj(complex(m12))
    c2 = np.array([a, SQRT2, 1], dtype=complex)
    p2 = np.array([-abs(z) ** 2 - z + np.conj(z), SQRT2 * z, 1], dtype=complex)
    return c2, p2


def exchange_from_m(f1: Flag, line2: ComplexLine, m12: complex) -> Isometry:
    """World-frame exchange for the pair (f1, (line2, p2)) where p2 is fixed by m12."""
    normalizer = normalize_to_standard(f1, line2).normalizer
    return exchange_matrix(m12).conjugate_by(normalizer.inverse())


def exchange_isometry(f1: Flag, f2: Flag) -> Isometry:
    """World-frame exchange: swaps the two lines and sends p2 to p1."""
    return exchange_from_m(f1, f2.line, m_invariant(f1, f2))


def exchange_isometry_geometric(f1: Flag, f2: Flag) -> Isometry:
    """The exchange as I_1 . I_2 with I_2 fixing p1 and I_1 swapping the flags."""
    if pair_invariant(f1.line, f2.line).position(1e-8) is LinePosition.ASYMPTOTIC:
        raise AsymptoticLines("exchange needs non-asymptotic lines")
    m_invariant(f1, f2)
    fix = lagrangian_fix_p_preserve_two_lines(f1.line, f2.line, f1.point)
    swap = lagrangian_swap_lines_and_points(f1.line, f2.line, f1.point, fix.apply(f2.point))
    return swap.compose(fix)
