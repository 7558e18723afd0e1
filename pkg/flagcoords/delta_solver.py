"""
delta 求解模块
Recovering the delta coordinates of a triangle from (m, Phi) data, and the
2^N lifts of an m-decoration to full decorations.

Each m_ij determines an isometry H_ij exchanging C_i and C_j and carrying any
point of the boundary of C_i to its partner on C_j. Admissible triples are
the fixed points on the boundary of C_1 of H_31 H_23 H_12.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import bisect

from config.settings import DEFAULT_TOLERANCES, ToleranceConfig
from flagcoords.cp2_geometry import ComplexLine, Flag, Isometry, boundary_frame, boundary_point
from flagcoords.elementary_isometries import exchange_from_m
from flagcoords.errors import (
    DegenerateInput,
    FlagCoordsError,
    InvalidInvariants,
    InvalidM,
    NoAdmissibleSolution,
    NonGenericPair,
    SolverError,
)
from flagcoords.hermitian_core import J, herm_norm
from flagcoords.invariants import (
    TripleFlagInvariant,
    TripleLineInvariant,
    phi_from_m,
    reconstruct_lines,
    triple_invariants,
)
from flagcoords.surface_complex import Decoration, MDecoration, Triangulation
from monitoring.metrics import track_computation

logger = logging.getLogger(__name__)

ORACLE_SAMPLES = 10_000
ORACLE_XTOL = 1e-10
# relative error allowed between the input m and the m of a candidate triple
M_TOLERANCE = 1e-7
_EIGEN_SPLIT = 1e-8
_TRIAL_ANGLES = (0.3, 1.7, 2.9, -1.1, -2.3)


@dataclass(frozen=True)
class TriangleSolveInput:
    m12: complex
    m23: complex
    m31: complex
    Phi123: complex

    def __post_init__(self):
        for name in ("m12", "m23", "m31", "Phi123"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for name in ("m12", "m23", "m31"):
            value = getattr(self, name)
            if abs(value) < 1e-14 or abs(value - 1) < 1e-14:
                raise InvalidM(f"{name} must differ from 0 and 1, got {value}")

    @property
    def m(self) -> Tuple[complex, complex, complex]:
        return (self.m12, self.m23, self.m31)

    @property
    def phi(self) -> Tuple[float, float, float]:
        return tuple(phi_from_m(m) for m in self.m)

    def line_invariant(self) -> TripleLineInvariant:
        return TripleLineInvariant(*self.phi, self.Phi123)

    @property
    def Delta(self) -> float:
        return self.line_invariant().Delta

    def check(self, tolerances: Optional[ToleranceConfig] = None) -> None:
        tol = tolerances or DEFAULT_TOLERANCES
        for name, phi in zip(("phi12", "phi23", "phi31"), self.phi):
            if abs(phi - 1) < tol.degenerate_phi:
                raise DegenerateInput(f"{name} = {phi:.17g} is too close to 1")
        self.line_invariant().validate(tol.constraint)

    @classmethod
    def from_record(cls, record: TripleFlagInvariant) -> "TriangleSolveInput":
        return cls(record.m_of(0, 1), record.m_of(1, 2), record.m_of(2, 0), record.Phi)


@dataclass(frozen=True)
class TriangleSolutions:
    """Admissible delta triples (delta^1_23, delta^2_31, delta^3_12), sorted."""
    solutions: Tuple[Tuple[complex, complex, complex], ...]
    records: Tuple[TripleFlagInvariant, ...] = field(compare=False)
    fixed_points: Tuple[NDArray, ...] = field(compare=False, repr=False)
    method: str = "eigen"

    def __len__(self) -> int:
        return len(self.solutions)


def _realising_flag(line: ComplexLine, other: ComplexLine) -> Flag:
    for angle in _TRIAL_ANGLES:
        point = boundary_point(line, angle)
        if not other.contains_boundary_point(point):
            return Flag(line, point)
    raise NonGenericPair("point-on-line", "no probe point avoids the other line")


def pair_isometry(line_i: ComplexLine, line_j: ComplexLine, m_ij: complex) -> Isometry:
    """H_ij: swaps C_i and C_j and sends each boundary point of C_i to its m_ij partner."""
    return exchange_from_m(_realising_flag(line_i, line_j), line_j, m_ij).inverse()


def circle_map_restriction(composite: Isometry, line: ComplexLine) -> NDArray[np.complex128]:
    """2x2 matrix of ``composite`` on the span of the boundary frame of ``line``."""
    u, v = boundary_frame(line)
    x = np.column_stack([u, v])
    return np.linalg.pinv(x) @ composite.matrix @ x


def _angle_of(points: NDArray, u: NDArray, v: NDArray) -> NDArray:
    """Angles theta with points ~ u + e^{i theta} v (columns of ``points``)."""
    a = points.T @ J @ np.conj(u)
    b = -(points.T @ J @ np.conj(v))
    return np.angle(b / a)


def _wrap(angle: NDArray) -> NDArray:
    return (angle + np.pi) % (2 * np.pi) - np.pi


def circle_defect(composite: Isometry, line: ComplexLine):
    """theta -> wrap(theta' - theta) where theta' is the image angle."""
    u, v = boundary_frame(line)
    m = composite.matrix

    def defect(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        points = u[:, None] + np.exp(1j * theta)[None, :] * v[:, None]
        return _wrap(_angle_of(m @ points, u, v) - theta)

    return defect


def bisection_fixed_points(composite: Isometry, line: ComplexLine,
                           samples: int = ORACLE_SAMPLES, xtol: float = ORACLE_XTOL) -> List[NDArray]:
    """Fixed boundary points by sampling the circle map and bisecting sign changes."""
    defect = circle_defect(composite, line)
    grid = np.linspace(-np.pi, np.pi, samples + 1)
    values = defect(grid)
    roots = []
    for k in range(samples):
        lo, hi = values[k], values[k + 1]
        if lo == 0:
            roots.append(grid[k])
            continue
        if lo * hi < 0 and abs(hi - lo) < np.pi:
            roots.append(bisect(lambda x: float(defect(x)[0]), grid[k], grid[k + 1], xtol=xtol))
    logger.debug("bisection oracle found %d fixed points", len(roots))
    return [boundary_point(line, theta) for theta in roots]


def eigen_fixed_points(composite: Isometry, line: ComplexLine) -> Optional[List[NDArray]]:
    """Null eigenvectors of the restriction; None when the eigenvalues do not split."""
    y = circle_map_restriction(composite, line)
    values, vectors = np.linalg.eig(y)
    if abs(values[0] - values[1]) <= _EIGEN_SPLIT * max(abs(values[0]), abs(values[1])):
        return None
    u, v = boundary_frame(line)
    points = []
    for n in range(2):
        point = vectors[0, n] * u + vectors[1, n] * v
        if abs(herm_norm(point)) <= 1e-7 * np.linalg.norm(point) ** 2:
            points.append(point)
    logger.debug("eigenvalues %s, %d null eigenvectors", values, len(points))
    return points


def _m_error(record: TripleFlagInvariant, target: Sequence[complex]) -> float:
    found = (record.m_of(0, 1), record.m_of(1, 2), record.m_of(2, 0))
    return max(abs(a - b) / abs(b) for a, b in zip(found, target))


@track_computation("solve_triangle")
def solve_triangle(data: TriangleSolveInput,
                   tolerances: Optional[ToleranceConfig] = None,
                   method: str = "eigen") -> TriangleSolutions:
    """The (generically two) delta triples compatible with the input m and Phi."""
    tol = tolerances or DEFAULT_TOLERANCES
    data.check(tol)
    lines = reconstruct_lines(data.line_invariant())
    h12 = pair_isometry(lines[0], lines[1], data.m12)
    h23 = pair_isometry(lines[1], lines[2], data.m23)
    h31 = pair_isometry(lines[2], lines[0], data.m31)
    composite = h31.compose(h23).compose(h12)

    points = eigen_fixed_points(composite, lines[0]) if method == "eigen" else None
    used = "eigen"
    if points is None:
        if method == "eigen":
            logger.warning("restriction to C1 has a repeated eigenvalue, using the bisection oracle")
        points = bisection_fixed_points(composite, lines[0])
        used = "bisection"

    candidates = []
    for p1 in points:
        p2 = h12.apply(p1)
        p3 = h23.apply(p2)
        try:
            record = triple_invariants(Flag(lines[0], p1), Flag(lines[1], p2), Flag(lines[2], p3))
        except FlagCoordsError as exc:
            logger.debug("discarding fixed point: %s", exc)
            continue
        error = _m_error(record, data.m)
        if error > M_TOLERANCE:
            logger.debug("discarding fixed point with m error %.3e", error)
            continue
        candidates.append((record, p1))
    if not candidates:
        raise NoAdmissibleSolution("no admissible fixed point on the boundary of C1")

    candidates.sort(key=lambda item: (item[0].delta_of(0, 1, 2).real, item[0].delta_of(0, 1, 2).imag))
    logger.info("triangle solved with %d solution(s) via %s", len(candidates), used)
    return TriangleSolutions(
        solutions=tuple(record.stored_deltas() for record, _ in candidates),
        records=tuple(record for record, _ in candidates),
        fixed_points=tuple(p for _, p in candidates),
        method=used,
    )


def face_input(t: Triangulation, md: MDecoration, f: int) -> TriangleSolveInput:
    return TriangleSolveInput(md.face_m(t, f, 0, 1), md.face_m(t, f, 1, 2), md.face_m(t, f, 2, 0), md.Phi[f])


def _solve_faces(t: Triangulation, md: MDecoration,
                 tolerances: Optional[ToleranceConfig]) -> List[TriangleSolutions]:
    solved = []
    for f in range(t.num_faces):
        try:
            solved.append(solve_triangle(face_input(t, md, f), tolerances))
        except DegenerateInput as exc:
            raise DegenerateInput(f"face {f}: {exc}", face=f) from exc
        except NoAdmissibleSolution as exc:
            raise NoAdmissibleSolution(f"face {f}: {exc}", face=f) from exc
        except (InvalidInvariants, InvalidM) as exc:
            raise SolverError(f"face {f}: {exc}") from exc
    return solved


def _assemble(md: MDecoration, solved: Sequence[TriangleSolutions], branch: Sequence[int]) -> Decoration:
    delta = []
    for f, (solutions, bit) in enumerate(zip(solved, branch)):
        if bit >= len(solutions):
            raise NoAdmissibleSolution(f"face {f} has no solution {bit}", face=f)
        delta.append(solutions.solutions[bit])
    return Decoration(phi=md.phi, Phi=md.Phi, delta=tuple(delta))


def parse_branch(bits: Sequence[int], num_faces: int) -> Tuple[int, ...]:
    branch = tuple(int(b) for b in bits)
    if len(branch) != num_faces or any(b not in (0, 1) for b in branch):
        raise ValueError(f"branch must be {num_faces} bits, got {bits!r}")
    return branch


@track_computation("lift_mdecoration")
def lift_mdecoration(t: Triangulation, md: MDecoration, branch: Sequence[int],
                     tolerances: Optional[ToleranceConfig] = None) -> Decoration:
    """The decoration over ``md`` picking solution ``branch[f]`` on face f."""
    branch = parse_branch(branch, t.num_faces)
    return _assemble(md, _solve_faces(t, md, tolerances), branch)


def enumerate_lifts(t: Triangulation, md: MDecoration,
                    tolerances: Optional[ToleranceConfig] = None) -> Iterator[Tuple[Tuple[int, ...], Decoration]]:
    """Every available branch with its decoration, in lexicographic order."""
    solved = _solve_faces(t, md, tolerances)
    for branch in product((0, 1), repeat=t.num_faces):
        if all(bit < len(s) for bit, s in zip(branch, solved)):
            yield branch, _assemble(md, solved, branch)
