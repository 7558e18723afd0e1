"""
不变量计算模块
Invariants of complex lines and flags.

* ``phi`` of a pair of lines, ``Phi`` and ``Delta`` of a triple of lines;
* ``m`` of a pair of flags and ``delta`` of a flag against two lines;
* the complete record of a generic triple of flags and the reconstruction of
  a triple (up to isometry) from such a record.

Corners of a triple are numbered 0, 1, 2. The relation between the two
delta values at a corner is ``delta^i_jk * delta^i_kj = phi_jk`` and the
circle relation ends with ``phi_jk (1 - phi_ij)``; both follow from expanding
the definitions in the anti-dual basis.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import permutations
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from config.settings import DEFAULT_TOLERANCES, ToleranceConfig
from flagcoords.cp2_geometry import ComplexLine, Flag, boundary_frame
from flagcoords.errors import (
    DegenerateBasis,
    DegenerateTriple,
    InvalidInvariants,
    NonGenericPair,
    NonGenericTriple,
)
from flagcoords.hermitian_core import (
    anti_dual_basis,
    gram_matrix,
    herm,
    herm_norm,
    standard_frame,
)

logger = logging.getLogger(__name__)

# order in which the six delta values of a triple are stored
DELTA_ORDER: Tuple[Tuple[int, int, int], ...] = (
    (0, 1, 2), (0, 2, 1),
    (1, 2, 0), (1, 0, 2),
    (2, 0, 1), (2, 1, 0),
)
# the positively oriented ordering at each corner
STORED_ORDER: Tuple[Tuple[int, int, int], ...] = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

PAIR_INDEX = {(0, 1): 0, (1, 2): 1, (2, 0): 2}


def _pair_slot(i: int, j: int) -> Tuple[int, bool]:
    """Slot of the unordered pair {i, j} and whether (i, j) is reversed."""
    if (i, j) in PAIR_INDEX:
        return PAIR_INDEX[(i, j)], False
    if (j, i) in PAIR_INDEX:
        return PAIR_INDEX[(j, i)], True
    raise ValueError(f"({i}, {j}) is not a pair of distinct corners")


def _is_cyclic(i: int, j: int, k: int) -> bool:
    return (i, j, k) in STORED_ORDER


class LinePosition(str, Enum):
    INTERSECTING = "intersecting"
    ASYMPTOTIC = "asymptotic"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class PairLineInvariant:
    """phi of a pair of complex lines.

    phi = cos^2(angle) for intersecting lines and cosh^2(distance / 2) for
    disjoint ones; phi = 1 covers asymptotic and identical lines.
    """
    phi: float

    def __post_init__(self):
        if self.phi < 0:
            raise InvalidInvariants("phi", f"phi must be non-negative, got {self.phi}")

    def position(self, tol: Optional[float] = None) -> LinePosition:
        tol = DEFAULT_TOLERANCES.nondegenerate if tol is None else tol
        if abs(self.phi - 1) <= tol:
            return LinePosition.ASYMPTOTIC
        return LinePosition.DISJOINT if self.phi > 1 else LinePosition.INTERSECTING

    @property
    def distance(self) -> float:
        """Distance between the lines, zero unless they are disjoint."""
        return 2 * float(np.arccosh(np.sqrt(self.phi))) if self.phi > 1 else 0.0

    @property
    def angle(self) -> float:
        """Angle at the intersection point, zero unless the lines intersect."""
        return float(np.arccos(np.sqrt(self.phi))) if self.phi < 1 else 0.0


@dataclass(frozen=True)
class TripleLineInvariant:
    """phi of the three pairs and Phi_123 of a triple of lines."""
    phi12: float
    phi23: float
    phi31: float
    Phi123: complex

    @property
    def Delta(self) -> float:
        return 1 - self.phi12 - self.phi23 - self.phi31 + 2 * complex(self.Phi123).real

    def modulus_residual(self) -> float:
        product = self.phi12 * self.phi23 * self.phi31
        scale = max(product, abs(self.Phi123) ** 2, 1e-300)
        return abs(abs(self.Phi123) ** 2 - product) / scale

    @property
    def pairs(self) -> Tuple[PairLineInvariant, PairLineInvariant, PairLineInvariant]:
        return tuple(PairLineInvariant(phi) for phi in (self.phi12, self.phi23, self.phi31))

    def validate(self, tol: Optional[float] = None) -> None:
        """Raise InvalidInvariants unless the modulus and Gram relations hold."""
        tol = DEFAULT_TOLERANCES.constraint if tol is None else tol
        for name, pair in zip(("phi12", "phi23", "phi31"), self.pairs):
            if pair.phi == 0:
                raise InvalidInvariants("phi", f"{name} must be positive")
        residual = self.modulus_residual()
        if residual > tol:
            raise InvalidInvariants("modulus", f"|Phi|^2 differs from the phi product (residual {residual:.3e})")
        if self.Delta >= 0:
            raise InvalidInvariants("gram-determinant", f"Delta = {self.Delta:.17g} is not negative")


@dataclass(frozen=True)
class TripleFlagInvariant:
    """Complete invariant record of a generic triple of flags.

    ``phi`` holds (phi_01, phi_12, phi_20), ``Phi`` is Phi_012, ``delta``
    follows :data:`DELTA_ORDER` and ``m`` holds (m_01, m_12, m_20).
    """
    phi: Tuple[float, float, float]
    Phi: complex
    delta: Tuple[complex, complex, complex, complex, complex, complex]
    m: Tuple[complex, complex, complex]
    m_residual: float = field(default=0.0, compare=False)

    @classmethod
    def from_face_data(cls, phi: Sequence[float], Phi: complex,
                       stored_delta: Sequence[complex]) -> "TripleFlagInvariant":
        """Build the record from three stored deltas (one per corner).

        The reversed deltas come from the product relation and m from the
        invariant expression.
        """
        phi = tuple(float(x) for x in phi)
        values: Dict[Tuple[int, int, int], complex] = {}
        for (i, j, k), d in zip(STORED_ORDER, stored_delta):
            d = complex(d)
            if d == 0:
                raise InvalidInvariants("delta", f"delta^{i}_{j}{k} vanishes")
            values[(i, j, k)] = d
            values[(i, k, j)] = phi[_pair_slot(j, k)[0]] / d
        delta = tuple(values[key] for key in DELTA_ORDER)
        partial = cls(phi, complex(Phi), delta, (0j, 0j, 0j))
        m = tuple(m_from_invariants(partial, i, j) for (i, j) in PAIR_INDEX)
        return replace(partial, m=m)

    @property
    def Delta(self) -> float:
        return 1 - sum(self.phi) + 2 * self.Phi.real

    def phi_of(self, i: int, j: int) -> float:
        return self.phi[_pair_slot(i, j)[0]]

    def Phi_of(self, i: int, j: int, k: int) -> complex:
        return self.Phi if _is_cyclic(i, j, k) else self.Phi.conjugate()

    def delta_of(self, i: int, j: int, k: int) -> complex:
        return self.delta[DELTA_ORDER.index((i, j, k))]

    def m_of(self, i: int, j: int) -> complex:
        slot, reversed_ = _pair_slot(i, j)
        return self.m[slot].conjugate() if reversed_ else self.m[slot]

    def stored_deltas(self) -> Tuple[complex, complex, complex]:
        return tuple(self.delta_of(*key) for key in STORED_ORDER)

    def line_invariant(self) -> TripleLineInvariant:
        return TripleLineInvariant(self.phi[0], self.phi[1], self.phi[2], self.Phi)

    def permuted(self, perm: Sequence[int]) -> "TripleFlagInvariant":
        """Record of the triple (F_perm[0], F_perm[1], F_perm[2])."""
        phi = tuple(self.phi_of(perm[i], perm[j]) for (i, j) in PAIR_INDEX)
        delta = tuple(self.delta_of(perm[i], perm[j], perm[k]) for (i, j, k) in DELTA_ORDER)
        m = tuple(self.m_of(perm[i], perm[j]) for (i, j) in PAIR_INDEX)
        return TripleFlagInvariant(phi, self.Phi_of(*perm), delta, m, self.m_residual)

    def as_vector(self) -> NDArray[np.complex128]:
        return np.array([*self.phi, self.Phi, *self.delta, *self.m], dtype=complex)


# -- lines ------------------------------------------------------------------

def phi_invariant(line1: ComplexLine, line2: ComplexLine) -> float:
    """|<c1,c2>|^2 / (<c1,c1><c2,c2>)."""
    g = herm(line1.polar, line2.polar)
    return float(abs(g) ** 2 / (herm_norm(line1.polar) * herm_norm(line2.polar)))


def pair_invariant(line1: ComplexLine, line2: ComplexLine) -> PairLineInvariant:
    return PairLineInvariant(phi_invariant(line1, line2))


def _polar_gram(*lines: ComplexLine) -> NDArray[np.complex128]:
    polars = [line.unit_polar() for line in lines]
    rows = np.array(polars)
    if abs(np.linalg.det(rows / np.linalg.norm(rows, axis=1, keepdims=True))) <= 1e-12:
        raise DegenerateTriple("dependent-polars", "polar vectors do not form a basis")
    return gram_matrix(*polars)


def Phi_invariant(line1: ComplexLine, line2: ComplexLine, line3: ComplexLine) -> complex:
    """<c1,c2><c2,c3><c3,c1> / (<c1,c1><c2,c2><c3,c3>)."""
    g = _polar_gram(line1, line2, line3)
    return complex(g[0, 1] * g[1, 2] * g[2, 0])


def delta_gram(line1: ComplexLine, line2: ComplexLine, line3: ComplexLine) -> float:
    """Delta = 1 - phi12 - phi23 - phi31 + 2 Re Phi123, the normalised Gram determinant."""
    g = _polar_gram(line1, line2, line3)
    return float(np.linalg.det(g).real)


# -- flags ------------------------------------------------------------------

def _pair_genericity(f1: Flag, f2: Flag) -> None:
    if f1.line.same_line(f2.line):
        raise NonGenericPair("identical", "the two lines coincide")
    if phi_invariant(f1.line, f2.line) <= 1e-10:
        raise NonGenericPair("orthogonal", "the two lines are orthogonal")
    if f2.line.contains_boundary_point(f1.point) or f1.line.contains_boundary_point(f2.point):
        raise NonGenericPair("point-on-line", "a flag point lies on the other line")


def m_invariant(f1: Flag, f2: Flag) -> complex:
    """<c1,c2><p1,p2> / (<c1,p2><p1,c2>)."""
    _pair_genericity(f1, f2)
    c1, c2, p1, p2 = f1.polar, f2.polar, f1.point, f2.point
    return herm(c1, c2) * herm(p1, p2) / (herm(c1, p2) * herm(p1, c2))


def phi_from_m(m: complex) -> float:
    return float(abs(m / (m - 1)) ** 2)


def delta_invariant(f1: Flag, line2: ComplexLine, line3: ComplexLine) -> complex:
    """<c2,c3><p1,c2> / (<c2,c2><p1,c3>), a coordinate of p1 on its line."""
    p1 = f1.point
    for line in (line2, line3):
        if line.contains_boundary_point(p1):
            raise NonGenericTriple("point-on-line", "the flag point lies on another line")
    if line2.same_line(line3):
        raise NonGenericTriple("identical-lines", "the two lines coincide")
    c2, c3 = line2.polar, line3.polar
    return herm(c2, c3) * herm(p1, c2) / (herm_norm(c2) * herm(p1, c3))


def m_from_invariants(inv: TripleFlagInvariant, i: int, j: int) -> complex:
    """m_ij expressed through phi, Phi and the deltas of the triple."""
    k = 3 - i - j
    phi_ij, phi_ik, phi_jk = inv.phi_of(i, j), inv.phi_of(i, k), inv.phi_of(j, k)
    Phi = inv.Phi_of(i, j, k)
    d_i = inv.delta_of(i, k, j)
    d_j = np.conj(inv.delta_of(j, k, i))
    numerator = (phi_ik * phi_jk * (Phi - phi_ij)
                 + phi_ik * (phi_ij * phi_jk - Phi) * d_i
                 + phi_jk * (phi_ij * phi_ik - Phi) * d_j
                 + Phi * (1 - phi_ij) * d_i * d_j)
    return complex(numerator / (inv.Delta * phi_ik * phi_jk))


def triple_genericity(flags: Sequence[Flag]) -> None:
    """Raise NonGenericTriple with the first failed condition."""
    for a, b in ((0, 1), (1, 2), (2, 0)):
        if flags[a].line.same_line(flags[b].line):
            raise NonGenericTriple("identical-lines", f"lines {a} and {b} coincide")
        if phi_invariant(flags[a].line, flags[b].line) <= 1e-10:
            raise NonGenericTriple("orthogonal-lines", f"lines {a} and {b} are orthogonal")
    try:
        _polar_gram(*(f.line for f in flags))
    except DegenerateTriple as exc:
        raise NonGenericTriple("dependent-polars", "polar vectors do not form a basis") from exc
    for a in range(3):
        for b in range(3):
            if a != b and flags[b].line.contains_boundary_point(flags[a].point):
                raise NonGenericTriple("point-on-line", f"point {a} lies on line {b}")


def triple_invariants(f1: Flag, f2: Flag, f3: Flag) -> TripleFlagInvariant:
    flags = (f1, f2, f3)
    triple_genericity(flags)
    lines = [f.line for f in flags]
    phi = tuple(phi_invariant(lines[i], lines[j]) for (i, j) in PAIR_INDEX)
    Phi = Phi_invariant(*lines)
    delta = tuple(delta_invariant(flags[i], lines[j], lines[k]) for (i, j, k) in DELTA_ORDER)
    m = tuple(m_invariant(flags[i], flags[j]) for (i, j) in PAIR_INDEX)
    record = TripleFlagInvariant(phi, Phi, delta, m)
    formula = [m_from_invariants(record, i, j) for (i, j) in PAIR_INDEX]
    residual = max(abs(a - b) / abs(a) for a, b in zip(m, formula))
    if residual > 1e-8:
        logger.warning("m disagrees with its invariant expression (residual %.3e)", residual)
    logger.debug("triple invariants: phi=%s Phi=%s Delta=%.6g", phi, Phi, record.Delta)
    return replace(record, m_residual=float(residual))


# -- constraints ------------------------------------------------------------

def circle_residual(inv: TripleFlagInvariant, i: int, j: int, k: int) -> float:
    """Circle relation at delta^i_jk, normalised by its largest term."""
    d = inv.delta_of(i, j, k)
    phi_ik, phi_jk, phi_ij = inv.phi_of(i, k), inv.phi_of(j, k), inv.phi_of(i, j)
    terms = (
        (1 - phi_ik) * abs(d) ** 2,
        2 * ((inv.Phi_of(i, k, j) - phi_jk) * d).real,
        phi_jk * (1 - phi_ij),
    )
    scale = max(max(abs(t) for t in terms), 1e-300)
    return abs(sum(terms)) / scale


def constraint_residuals(inv: TripleFlagInvariant) -> Dict[str, float]:
    """Every relation of a triple record with its normalised residual.

    ``gram-determinant`` is reported as Delta itself (valid when negative).
    """
    residuals = {
        "modulus": inv.line_invariant().modulus_residual(),
        "gram-determinant": inv.Delta,
    }
    for (i, j, k) in STORED_ORDER:
        phi_jk = inv.phi_of(j, k)
        product = inv.delta_of(i, j, k) * inv.delta_of(i, k, j)
        residuals[f"delta-product[{i}]"] = abs(product - phi_jk) / phi_jk
    for (i, j, k) in DELTA_ORDER:
        residuals[f"circle[{i}{j}{k}]"] = circle_residual(inv, i, j, k)
    for (i, j) in PAIR_INDEX:
        stored = inv.m_of(i, j)
        residuals[f"m[{i}{j}]"] = abs(m_from_invariants(inv, i, j) - stored) / max(abs(stored), 1e-300)
    return residuals


def validate_triple_record(inv: TripleFlagInvariant, tol: Optional[float] = None) -> None:
    """Raise InvalidInvariants naming the first violated relation."""
    tol = DEFAULT_TOLERANCES.constraint if tol is None else tol
    for name, value in constraint_residuals(inv).items():
        if name == "gram-determinant":
            if value >= 0:
                raise InvalidInvariants(name, f"Delta = {value:.17g} is not negative")
        elif value > tol:
            raise InvalidInvariants(name, f"residual {value:.3e} exceeds {tol:.1e}")


def constraint_jacobian_corank(inv: TripleFlagInvariant, step: float = 1e-6,
                               rel_threshold: float = 1e-6) -> int:
    """Corank of the real constraint system at ``inv``.

    Parameters: 3 phi, Re/Im Phi and Re/Im of the six deltas (17 reals).
    Constraints: modulus, three complex delta products, three circles (10 reals).
    """
    def unpack(x: NDArray) -> Tuple[Dict, complex, Dict]:
        phi = {key: x[n] for n, key in enumerate(PAIR_INDEX)}
        Phi = x[3] + 1j * x[4]
        delta = {key: x[5 + 2 * n] + 1j * x[6 + 2 * n] for n, key in enumerate(DELTA_ORDER)}
        return phi, Phi, delta

    def ph(phi, a, b):
        return phi[(a, b)] if (a, b) in phi else phi[(b, a)]

    def system(x: NDArray) -> NDArray:
        phi, Phi, delta = unpack(x)
        out = [abs(Phi) ** 2 - phi[(0, 1)] * phi[(1, 2)] * phi[(2, 0)]]
        for (i, j, k) in STORED_ORDER:
            r = delta[(i, j, k)] * delta[(i, k, j)] - ph(phi, j, k)
            out.extend([r.real, r.imag])
        for (i, j, k) in STORED_ORDER:
            Phi_ikj = np.conj(Phi)
            d = delta[(i, j, k)]
            out.append((1 - ph(phi, i, k)) * abs(d) ** 2
                       + 2 * ((Phi_ikj - ph(phi, j, k)) * d).real
                       + ph(phi, j, k) * (1 - ph(phi, i, j)))
        return np.array(out, dtype=float)

    x0 = np.array([*inv.phi, inv.Phi.real, inv.Phi.imag,
                   *[v for d in inv.delta for v in (d.real, d.imag)]], dtype=float)
    jac = np.empty((10, x0.size))
    for n in range(x0.size):
        e = np.zeros_like(x0)
        e[n] = step * max(1.0, abs(x0[n]))
        jac[:, n] = (system(x0 + e) - system(x0 - e)) / (2 * e[n])
    sigma = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(sigma > rel_threshold * sigma[0]))
    return x0.size - rank


# -- reconstruction ---------------------------------------------------------

def reconstruct_lines(inv: TripleLineInvariant) -> Tuple[ComplexLine, ComplexLine, ComplexLine]:
    """Three lines with the given phi and Phi, unique up to isometry."""
    inv.validate()
    s12 = np.sqrt(inv.phi12)
    s23 = np.sqrt(inv.phi23)
    h31 = complex(inv.Phi123) / (s12 * s23)
    h = np.array([
        [1, s12, np.conj(h31)],
        [s12, 1, s23],
        [h31, s23, 1],
    ], dtype=complex)
    try:
        frame = standard_frame(h)
    except DegenerateBasis as exc:
        raise InvalidInvariants("gram-determinant", str(exc)) from exc
    return tuple(ComplexLine(row) for row in frame)


def _snap_to_boundary(line: ComplexLine, p: NDArray) -> NDArray[np.complex128]:
    """Nearest null vector to p inside the orthogonal complement of the polar."""
    u, v = boundary_frame(line)
    a = herm(p, u)
    b = -herm(p, v)
    if abs(a) <= 1e-300 or abs(b) <= 1e-300:
        raise InvalidInvariants("circle", "reconstructed point is far from the boundary")
    return a * u + (abs(a) / abs(b)) * b * v


def reconstruct_flags(inv: TripleFlagInvariant,
                      tolerances: Optional[ToleranceConfig] = None) -> Tuple[Flag, Flag, Flag]:
    """Three flags realising ``inv``, unique up to isometry."""
    tol = (tolerances or DEFAULT_TOLERANCES).constraint
    validate_triple_record(inv, tol)
    lines = reconstruct_lines(inv.line_invariant())
    polars = [line.polar for line in lines]
    g = gram_matrix(*polars)
    d = anti_dual_basis(*polars)
    flags = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        p = g[k, j] * d[j] + g[k, k] * inv.delta_of(i, k, j) * d[k]
        flags.append(Flag(lines[i], _snap_to_boundary(lines[i], p)))
    logger.debug("reconstructed flags for Delta=%.6g", inv.Delta)
    return tuple(flags)


def all_relabelings(inv: TripleFlagInvariant):
    """The six relabelled records, keyed by permutation."""
    return {perm: inv.permuted(perm) for perm in permutations(range(3))}
