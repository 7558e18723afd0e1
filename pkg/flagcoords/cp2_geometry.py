"""
复双曲平面几何对象
Geometric objects of the complex hyperbolic plane: complex lines, flags,
holomorphic and antiholomorphic isometries, Lagrangian reflections and the
Bergman distance.

Antiholomorphic maps are stored as a matrix ``M`` acting by ``v -> M conj(v)``.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import null_space

from config.settings import DEFAULT_TOLERANCES
from flagcoords.errors import (
    AsymptoticLines,
    ConcyclicPoints,
    DegenerateBasis,
    GeometryError,
    NotAnIsometry,
    NotInteriorPoint,
    OrthogonalLines,
    PointNotOnLine,
    PointOnLine,
)
from flagcoords.hermitian_core import (
    J,
    STANDARD_FORM,
    HForm,
    VectorClass,
    as_hvector,
    form_defect,
    gram_matrix,
    herm,
    herm_norm,
    hermitian_cross,
    projective_matrix_distance,
    same_point,
    standard_frame,
    to_su21,
    vector_class,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexLine:
    """A complex line, encoded by its positive polar vector."""
    polar: NDArray[np.complex128]
    form: HForm = field(default=STANDARD_FORM, compare=False, repr=False)

    def __post_init__(self):
        c = as_hvector(self.polar)
        if vector_class(c, self.form) is not VectorClass.POSITIVE:
            raise GeometryError("polar vector of a complex line must be positive")
        object.__setattr__(self, "polar", c)

    def unit_polar(self) -> NDArray[np.complex128]:
        """Polar rescaled so that <c, c> = 1."""
        return self.polar / np.sqrt(herm_norm(self.polar, self.form))

    def contains_boundary_point(self, p: ArrayLike, tol: Optional[float] = None) -> bool:
        tol = DEFAULT_TOLERANCES.on_line if tol is None else tol
        p = as_hvector(p)
        return abs(herm(p, self.polar, self.form)) < tol * np.linalg.norm(p) * np.linalg.norm(self.polar)

    def same_line(self, other: "ComplexLine") -> bool:
        return same_point(self.polar, other.polar)


@dataclass(frozen=True)
class Flag:
    """A complex line together with a boundary point of that line."""
    line: ComplexLine
    point: NDArray[np.complex128]

    def __post_init__(self):
        p = as_hvector(self.point)
        if vector_class(p, self.line.form) is not VectorClass.NULL:
            raise GeometryError("flag point must be a null vector")
        if not self.line.contains_boundary_point(p):
            raise PointNotOnLine("flag point is not on the boundary of its line")
        object.__setattr__(self, "point", p)

    @classmethod
    def standard(cls) -> "Flag":
        """The flag p = (1,0,0), c = (0,1,0)."""
        return cls(ComplexLine(np.array([0, 1, 0], dtype=complex)), np.array([1, 0, 0], dtype=complex))

    @property
    def polar(self) -> NDArray[np.complex128]:
        return self.line.polar

    def same_flag(self, other: "Flag") -> bool:
        return self.line.same_line(other.line) and same_point(self.point, other.point)


@dataclass(frozen=True)
class Isometry:
    """An element of PU(2,1), or an antiholomorphic isometry, as an SU(2,1) lift.

    The matrix is rescaled at construction so that det = 1, then checked for
    form preservation.
    """
    matrix: NDArray[np.complex128]
    antiholomorphic: bool = False

    def __post_init__(self):
        m = to_su21(np.asarray(self.matrix, dtype=complex))
        if m.shape != (3, 3):
            raise NotAnIsometry(f"expected a 3x3 matrix, got {m.shape}")
        defect = form_defect(m, self.antiholomorphic)
        if defect > DEFAULT_TOLERANCES.isometry:
            raise NotAnIsometry(f"matrix does not preserve the form (defect {defect:.3e})")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(np.eye(3, dtype=complex))

    def apply(self, v: ArrayLike) -> NDArray[np.complex128]:
        v = as_hvector(v)
        return self.matrix @ (np.conj(v) if self.antiholomorphic else v)

    def apply_line(self, line: ComplexLine) -> ComplexLine:
        return ComplexLine(self.apply(line.polar))

    def apply_flag(self, flag: Flag) -> Flag:
        return Flag(self.apply_line(flag.line), self.apply(flag.point))

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        right = np.conj(other.matrix) if self.antiholomorphic else other.matrix
        return Isometry(self.matrix @ right, self.antiholomorphic != other.antiholomorphic)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        inv = np.linalg.inv(self.matrix)
        return Isometry(np.conj(inv) if self.antiholomorphic else inv, self.antiholomorphic)

    def conjugate_by(self, g: "Isometry") -> "Isometry":
        """g . self . g^-1"""
        return g.compose(self).compose(g.inverse())

    def distance_to(self, other: "Isometry") -> float:
        if self.antiholomorphic != other.antiholomorphic:
            return float("inf")
        return projective_matrix_distance(self.matrix, other.matrix)

    def equals(self, other: "Isometry", tol: float = 1e-8) -> bool:
        """Equality as maps of CP^2."""
        return self.distance_to(other) < tol


@dataclass(frozen=True)
class RPlane(Isometry):
    """Lagrangian reflection: an antiholomorphic involution with M conj(M) = Id."""
    antiholomorphic: bool = True

    def __post_init__(self):
        if not self.antiholomorphic:
            raise NotAnIsometry("a Lagrangian reflection is antiholomorphic")
        super().__post_init__()
        m = self.matrix
        residual = float(np.max(np.abs(m @ np.conj(m) - np.eye(3))))
        if residual > DEFAULT_TOLERANCES.isometry * max(1.0, float(np.max(np.abs(m))) ** 2):
            raise NotAnIsometry(f"M conj(M) differs from the identity by {residual:.3e}")


def _line_phi(c1: NDArray, c2: NDArray) -> float:
    g = herm(c1, c2)
    return abs(g) ** 2 / (herm_norm(c1) * herm_norm(c2))


def _check_line_pair(line1: ComplexLine, line2: ComplexLine) -> float:
    phi = _line_phi(line1.polar, line2.polar)
    if phi <= 1e-10:
        raise OrthogonalLines(f"lines are orthogonal (phi = {phi:.3e})")
    if abs(phi - 1) <= DEFAULT_TOLERANCES.nondegenerate:
        raise AsymptoticLines(f"lines are asymptotic or identical (phi = {phi:.12g})")
    return phi


def _reflection_from_basis(basis: NDArray, a: NDArray) -> RPlane:
    """World matrix of the map x -> A conj(x) written in the columns of ``basis``."""
    m = basis @ a @ np.conj(np.linalg.inv(basis))
    return RPlane(m)


def distance(m: ArrayLike, n: ArrayLike) -> float:
    """Bergman distance between two negative vectors."""
    m = as_hvector(m)
    n = as_hvector(n)
    for v in (m, n):
        if vector_class(v) is not VectorClass.NEGATIVE:
            raise NotInteriorPoint("distance needs two negative vectors")
    cosh2 = (herm(m, n) * herm(n, m)).real / (herm_norm(m) * herm_norm(n))
    return float(2 * np.arccosh(np.sqrt(max(cosh2, 1.0))))


def complex_symmetry(line: ComplexLine) -> Isometry:
    """Holomorphic involution fixing ``line`` pointwise."""
    c = line.polar
    reflection = np.eye(3, dtype=complex) - 2 * np.outer(c, J @ np.conj(c)) / herm_norm(c)
    return Isometry(reflection)


def boundary_frame(line: ComplexLine) -> Tuple[NDArray, NDArray]:
    """Vectors u, v spanning c^perp with <u,u> = 1, <v,v> = -1, <u,v> = 0."""
    row = (J @ np.conj(line.polar)).reshape(1, 3)
    x = null_space(row)
    k = x.T @ J @ np.conj(x)
    eigval, eigvec = np.linalg.eigh((k + k.conj().T) / 2)
    if not (eigval[0] < 0 < eigval[1]):
        raise DegenerateBasis("orthogonal complement of the polar is not of signature (1,1)")
    v = x @ np.conj(eigvec[:, 0]) / np.sqrt(-eigval[0])
    u = x @ np.conj(eigvec[:, 1]) / np.sqrt(eigval[1])
    return u, v


def boundary_point(line: ComplexLine, angle: float) -> NDArray[np.complex128]:
    """The boundary point u + exp(i angle) v of ``line``."""
    u, v = boundary_frame(line)
    return u + np.exp(1j * angle) * v


def lagrangian_fix_p_preserve_two_lines(line1: ComplexLine, line2: ComplexLine,
                                        p1: ArrayLike) -> RPlane:
    """Reflection preserving both lines and fixing ``p1`` on the boundary of line1."""
    _check_line_pair(line1, line2)
    p1 = as_hvector(p1)
    if not line1.contains_boundary_point(p1):
        raise PointNotOnLine("p1 is not on the boundary of line1")
    c1 = line1.unit_polar()
    c2 = line2.unit_polar()
    g12 = herm(c1, c2)
    c2 = c2 * g12 / abs(g12)
    gp = herm(p1, c2)
    p1 = p1 * np.conj(gp) / abs(gp)
    basis = np.column_stack([p1, c1, c2])
    return _reflection_from_basis(basis, np.eye(3, dtype=complex))


def lagrangian_swap_lines_and_points(line1: ComplexLine, line2: ComplexLine,
                                     p1: ArrayLike, p2: ArrayLike) -> RPlane:
    """Reflection exchanging the flags (line1, p1) and (line2, p2)."""
    _check_line_pair(line1, line2)
    p1 = as_hvector(p1)
    p2 = as_hvector(p2)
    if not line1.contains_boundary_point(p1):
        raise PointNotOnLine("p1 is not on the boundary of line1")
    if not line2.contains_boundary_point(p2):
        raise PointNotOnLine("p2 is not on the boundary of line2")
    c1 = line1.unit_polar()
    c2 = line2.unit_polar()
    g12 = herm(c1, c2)
    c2 = c2 * g12 / abs(g12)
    d = hermitian_cross(c1, c2)
    basis = np.column_stack([c1, c2, d])
    inv = np.linalg.inv(basis)
    x1 = inv @ p1
    x2 = inv @ p2
    s1 = x1[2] / x1[1]
    s2 = x2[2] / x2[0]
    gamma = s2 / np.conj(s1)
    a = np.array([[0, 1, 0], [1, 0, 0], [0, 0, gamma]], dtype=complex)
    return _reflection_from_basis(basis, a)


def _antidiagonal_reflection(m: NDArray, n: NDArray, fixed: NDArray) -> Tuple[NDArray, NDArray]:
    """Basis (m, c, n) with Gram J, and the matrix fixing ``fixed`` in it."""
    c = hermitian_cross(m, n)
    c = c / np.sqrt(herm_norm(c))
    n = n / np.conj(herm(m, n))
    basis = np.column_stack([m, c, n])
    alpha, beta, gamma = np.linalg.inv(basis) @ fixed
    return basis, np.array([alpha, beta, gamma])


def lagrangian_preserve_line_swap_points(line1: ComplexLine, m: ArrayLike, n: ArrayLike) -> RPlane:
    """Reflection preserving line1 and exchanging the boundary points m and n."""
    m = as_hvector(m)
    n = as_hvector(n)
    for p in (m, n):
        if line1.contains_boundary_point(p):
            raise PointOnLine("swapped points must lie off the boundary of line1")
    if same_point(m, n):
        raise DegenerateBasis("swapped points coincide")
    basis, (alpha, beta, gamma) = _antidiagonal_reflection(m, n, line1.unit_polar())
    scale = max(abs(alpha), abs(beta), abs(gamma))
    if abs(beta) <= 1e-12 * scale:
        raise OrthogonalLines("line1 is orthogonal to the line through m and n")
    a = np.array([
        [0, 0, alpha / np.conj(gamma)],
        [0, beta / np.conj(beta), 0],
        [gamma / np.conj(alpha), 0, 0],
    ], dtype=complex)
    return _reflection_from_basis(basis, a)


def lagrangian_fix_one_swap_two(p1: ArrayLike, p2: ArrayLike, p3: ArrayLike) -> RPlane:
    """Reflection fixing the boundary point p1 and exchanging p2 and p3."""
    p1, p2, p3 = (as_hvector(p) for p in (p1, p2, p3))
    triple = herm(p1, p2) * herm(p2, p3) * herm(p3, p1)
    if abs(triple) <= 1e-300 or abs(2 * triple.real) / abs(triple) < 1e-9:
        raise ConcyclicPoints("the three points lie on the boundary of one complex line")
    basis, (alpha, beta, gamma) = _antidiagonal_reflection(p2, p3, p1)
    a = np.array([
        [0, 0, alpha / np.conj(gamma)],
        [0, beta / np.conj(beta), 0],
        [gamma / np.conj(alpha), 0, 0],
    ], dtype=complex)
    return _reflection_from_basis(basis, a)


def random_isometry(rng: np.random.Generator, max_condition: float = 1e3) -> Isometry:
    """A seeded element of SU(2,1) with bounded condition number."""
    while True:
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        if np.linalg.cond(a) > 50:
            continue
        frame = standard_frame(a @ J @ a.conj().T)
        m = (np.linalg.inv(a) @ frame).T
        if np.linalg.cond(m) <= max_condition:
            return Isometry(m)


def random_null_vector(rng: np.random.Generator) -> NDArray[np.complex128]:
    """A boundary point of the ball, from a uniformly random direction."""
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z = z / np.linalg.norm(z)
    # unit sphere of the ball model, carried to J-coordinates
    return np.array([(1 + z[0]) / np.sqrt(2), z[1], (z[0] - 1) / np.sqrt(2)], dtype=complex)


def gram_of_flags(*flags: Flag) -> NDArray[np.complex128]:
    """Gram matrix of the polar vectors of the given flags."""
    return gram_matrix(*(f.polar for f in flags))
