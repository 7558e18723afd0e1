"""
曲面三角剖分与装饰
Ideal triangulations of punctured surfaces, their hexagonation and the
decoration data attached to them.

A side of a face is addressed by a slot: slot ``s`` of face ``f`` runs from
corner ``s`` to corner ``s + 1``. A gluing ``((f, s), (g, r))`` identifies
corner ``s`` of f with corner ``r + 1`` of g and corner ``s + 1`` of f with
corner ``r`` of g, so glued sides always have opposite orientations.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config.settings import DEFAULT_TOLERANCES, ToleranceConfig
from flagcoords.errors import IncompatibleDecoration, InvalidComplex, InvalidInvariants
from flagcoords.invariants import (
    STORED_ORDER,
    TripleFlagInvariant,
    circle_residual,
    phi_from_m,
)

logger = logging.getLogger(__name__)

Slot = Tuple[int, int]
Corner = Tuple[int, int]
Gluing = Tuple[Slot, Slot]
# (face, x, y): the hexagon vertex of face f near corner x on the side towards y
HexLabel = Tuple[int, int, int]
Step = Tuple[int, int]


@dataclass(frozen=True)
class Triangulation:
    """Oriented quasi-simplicial ideal triangulation of a punctured surface."""
    genus: int
    punctures: int
    faces: Tuple[Tuple[int, int, int], ...]
    gluings: Tuple[Gluing, ...]

    def __post_init__(self):
        object.__setattr__(self, "faces", tuple(tuple(int(v) for v in face) for face in self.faces))
        object.__setattr__(self, "gluings", tuple(
            ((int(a[0]), int(a[1])), (int(b[0]), int(b[1]))) for a, b in self.gluings))
        self._validate()

    def _validate(self) -> None:
        if self.genus < 0 or self.punctures < 1:
            raise InvalidComplex(f"need genus >= 0 and punctures >= 1, got ({self.genus}, {self.punctures})")
        if self.euler_characteristic >= 0:
            raise InvalidComplex(f"2 - 2g - p = {self.euler_characteristic} is not negative")
        seen: Dict[Slot, int] = {}
        for e, (a, b) in enumerate(self.gluings):
            for slot in (a, b):
                f, s = slot
                if not (0 <= f < len(self.faces) and 0 <= s < 3):
                    raise InvalidComplex("slot out of range", slot)
                if slot in seen:
                    raise InvalidComplex(f"slot used by gluings {seen[slot]} and {e}", slot)
                seen[slot] = e
            (f, s), (g, r) = a, b
            if (self.faces[f][s] != self.faces[g][(r + 1) % 3]
                    or self.faces[f][(s + 1) % 3] != self.faces[g][r]):
                raise InvalidComplex("glued sides do not reverse orientation", a)
        for f in range(len(self.faces)):
            for s in range(3):
                if (f, s) not in seen:
                    raise InvalidComplex("side is not glued", (f, s))
        chi = len(self.faces) - len(self.gluings)
        if chi != self.euler_characteristic:
            raise InvalidComplex(f"F - E = {chi} but 2 - 2g - p = {self.euler_characteristic}")
        cycles = self.corner_cycles
        labels = sorted(self.faces[f][x] for f, x in (cycle[0] for cycle in cycles))
        if labels != list(range(self.punctures)):
            raise InvalidComplex(f"corner cycles carry puncture labels {labels}, "
                                 f"expected 0..{self.punctures - 1}")

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - self.punctures

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_edges(self) -> int:
        return len(self.gluings)

    @cached_property
    def slot_edge(self) -> Dict[Slot, Tuple[int, int]]:
        """slot -> (gluing index, side 0 or 1)."""
        table = {}
        for e, (a, b) in enumerate(self.gluings):
            table[a] = (e, 0)
            table[b] = (e, 1)
        return table

    def partner(self, slot: Slot) -> Slot:
        e, side = self.slot_edge[slot]
        return self.gluings[e][1 - side]

    def next_corner(self, corner: Corner) -> Corner:
        """Next corner around the same puncture."""
        f, x = corner
        return self.partner((f, (x + 2) % 3))

    @cached_property
    def corner_cycles(self) -> List[List[Corner]]:
        """Corners grouped by puncture, each cycle in walking order."""
        cycles, visited = [], set()
        for f in range(len(self.faces)):
            for x in range(3):
                if (f, x) in visited:
                    continue
                cycle, corner = [], (f, x)
                while corner not in visited:
                    visited.add(corner)
                    cycle.append(corner)
                    corner = self.next_corner(corner)
                cycles.append(cycle)
        return cycles

    def cycle_of_puncture(self, puncture: int) -> List[Corner]:
        for cycle in self.corner_cycles:
            f, x = cycle[0]
            if self.faces[f][x] == puncture:
                return cycle
        raise InvalidComplex(f"no corner carries puncture {puncture}")


def corner_cycles(t: Triangulation) -> List[List[Corner]]:
    return t.corner_cycles


def standard_torus() -> Triangulation:
    """Two faces, three edges, one puncture."""
    return Triangulation(
        genus=1, punctures=1,
        faces=((0, 0, 0), (0, 0, 0)),
        gluings=(((0, 0), (1, 2)), ((0, 1), (1, 0)), ((0, 2), (1, 1))),
    )


def thrice_punctured_sphere() -> Triangulation:
    return Triangulation(
        genus=0, punctures=3,
        faces=((0, 1, 2), (0, 2, 1)),
        gluings=(((0, 0), (1, 2)), ((0, 1), (1, 1)), ((0, 2), (1, 0))),
    )


def is_standard_torus(t: Triangulation) -> bool:
    reference = standard_torus()
    return (t.genus, t.punctures, t.faces, t.gluings) == (
        reference.genus, reference.punctures, reference.faces, reference.gluings)


# -- hexagonation -----------------------------------------------------------

class EdgeKind(str, Enum):
    EXCHANGE = "exchange"   # V_xy -> V_yx
    TRANSFER = "transfer"   # V_xy -> V_xz


@dataclass(frozen=True)
class HTEdge:
    kind: EdgeKind
    source: int
    target: int
    face: int
    corners: Tuple[int, ...]


@dataclass(frozen=True)
class Hexagonation:
    """The hexagonal refinement of a triangulation.

    Exchange edge ``e`` belongs to gluing ``e``; transfer edge ``E + 3f + x``
    runs from V_{x,x+1} to V_{x,x+2} in face f.
    """
    triangulation: Triangulation
    labels: Dict[HexLabel, int]
    edges: Tuple[HTEdge, ...]
    hexagons: Tuple[Tuple[Step, ...], ...]

    @property
    def num_vertices(self) -> int:
        return 2 * self.triangulation.num_edges

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - len(self.edges) + len(self.hexagons)

    def vertex(self, face: int, x: int, y: int) -> int:
        return self.labels[(face, x, y)]

    def transfer_edge(self, face: int, x: int) -> int:
        return self.triangulation.num_edges + 3 * face + x

    def step_source(self, step: Step) -> int:
        edge = self.edges[step[0]]
        return edge.source if step[1] > 0 else edge.target

    def step_target(self, step: Step) -> int:
        edge = self.edges[step[0]]
        return edge.target if step[1] > 0 else edge.source

    def exchange_step(self, face: int, x: int, y: int) -> Step:
        """Step V_xy -> V_yx in the given face."""
        source = self.vertex(face, x, y)
        for side in range(3):
            e, _ = self.triangulation.slot_edge[(face, side)]
            edge = self.edges[e]
            if edge.source == source and edge.target == self.vertex(face, y, x):
                return (e, 1)
            if edge.target == source and edge.source == self.vertex(face, y, x):
                return (e, -1)
        raise InvalidComplex(f"no exchange edge from V_{x}{y}", (face, x))

    def transfer_step(self, face: int, x: int, y: int) -> Step:
        """Step V_xy -> V_xz in the given face."""
        return (self.transfer_edge(face, x), 1 if y == (x + 1) % 3 else -1)

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.num_vertices))
        for index, edge in enumerate(self.edges):
            g.add_edge(edge.source, edge.target, key=index, kind=edge.kind.value)
        return g

    def path_to(self, start: int, target: int, tree: Optional[nx.MultiGraph] = None) -> List[Step]:
        """Oriented steps along a shortest path, inside ``tree`` if given."""
        g = self.graph() if tree is None else tree
        nodes = nx.shortest_path(g, start, target)
        steps = []
        for u, v in zip(nodes, nodes[1:]):
            key = min(g[u][v])
            edge = self.edges[key]
            steps.append((key, 1 if (edge.source, edge.target) == (u, v) else -1))
        return steps


def build_hexagonation(t: Triangulation) -> Hexagonation:
    """Hexagon vertices are shared across glued sides."""
    labels: Dict[HexLabel, int] = {}
    edges: List[HTEdge] = []
    for e, ((f, s), (g, r)) in enumerate(t.gluings):
        s1, r1 = (s + 1) % 3, (r + 1) % 3
        labels[(f, s, s1)] = labels[(g, r1, r)] = 2 * e
        labels[(f, s1, s)] = labels[(g, r, r1)] = 2 * e + 1
        edges.append(HTEdge(EdgeKind.EXCHANGE, 2 * e, 2 * e + 1, f, (s, s1)))
    for f in range(t.num_faces):
        for x in range(3):
            y, z = (x + 1) % 3, (x + 2) % 3
            edges.append(HTEdge(EdgeKind.TRANSFER, labels[(f, x, y)], labels[(f, x, z)], f, (x, y, z)))
    hexagonation = Hexagonation(t, labels, tuple(edges), ())
    hexagons = tuple(_hexagon_boundary(hexagonation, f) for f in range(t.num_faces))
    hexagonation = Hexagonation(t, labels, tuple(edges), hexagons)
    logger.debug("hexagonation: %d vertices, %d edges, %d hexagons",
                 hexagonation.num_vertices, len(edges), len(hexagons))
    return hexagonation


def _hexagon_boundary(h: Hexagonation, f: int) -> Tuple[Step, ...]:
    """V01 -> V10 -> V12 -> V21 -> V20 -> V02 -> V01."""
    return (
        h.exchange_step(f, 0, 1), h.transfer_step(f, 1, 0),
        h.exchange_step(f, 1, 2), h.transfer_step(f, 2, 1),
        h.exchange_step(f, 2, 0), h.transfer_step(f, 0, 2),
    )


def hexagon_boundary(h: Hexagonation, f: int) -> Tuple[Step, ...]:
    return h.hexagons[f]


# -- decorations ------------------------------------------------------------

@dataclass(frozen=True)
class Decoration:
    """Point of X(T): phi per edge, Phi_012 per face and one delta per corner.

    ``delta[f][x]`` is delta^x_{x+1,x+2} in face f.
    """
    phi: Tuple[float, ...]
    Phi: Tuple[complex, ...]
    delta: Tuple[Tuple[complex, complex, complex], ...]

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        object.__setattr__(self, "Phi", tuple(complex(x) for x in self.Phi))
        object.__setattr__(self, "delta", tuple(tuple(complex(x) for x in d) for d in self.delta))

    def face_phi(self, t: Triangulation, f: int) -> Tuple[float, float, float]:
        return tuple(self.phi[t.slot_edge[(f, s)][0]] for s in range(3))

    def face_record(self, t: Triangulation, f: int) -> TripleFlagInvariant:
        return TripleFlagInvariant.from_face_data(self.face_phi(t, f), self.Phi[f], self.delta[f])

    def is_degenerate(self, tol: Optional[float] = None) -> bool:
        tol = DEFAULT_TOLERANCES.nondegenerate if tol is None else tol
        return any(abs(p - 1) < tol for p in self.phi)


@dataclass(frozen=True)
class MDecoration:
    """Point of M(T): m per edge (oriented as the first side of its gluing) and Phi per face."""
    m: Tuple[complex, ...]
    Phi: Tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(complex(x) for x in self.m))
        object.__setattr__(self, "Phi", tuple(complex(x) for x in self.Phi))

    @property
    def phi(self) -> Tuple[float, ...]:
        return tuple(phi_from_m(m) for m in self.m)

    def face_m(self, t: Triangulation, f: int, x: int, y: int) -> complex:
        """m_xy seen from face f."""
        s = x if y == (x + 1) % 3 else y
        e, side = t.slot_edge[(f, s)]
        value = self.m[e] if side == 0 else self.m[e].conjugate()
        return value if s == x else value.conjugate()

    def Delta(self, t: Triangulation, f: int) -> float:
        phi = self.phi
        face = [phi[t.slot_edge[(f, s)][0]] for s in range(3)]
        return 1 - sum(face) + 2 * self.Phi[f].real


def face_m(t: Triangulation, d: Decoration, f: int, s: int) -> complex:
    """m_{s,s+1} of face f, from the face's own invariants."""
    return d.face_record(t, f).m_of(s, (s + 1) % 3)


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    location: str
    residual: float
    threshold: float
    passed: bool


@dataclass
class ValidationReport:
    checks: List[ConstraintCheck] = field(default_factory=list)
    degenerate: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[ConstraintCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, location: str, residual: float, threshold: float,
            passed: Optional[bool] = None) -> None:
        ok = residual <= threshold if passed is None else passed
        self.checks.append(ConstraintCheck(name, location, float(residual), threshold, bool(ok)))
        if not ok:
            logger.debug("constraint %s at %s failed: %.3e", name, location, residual)

    def max_residual(self, name: str) -> float:
        values = [c.residual for c in self.checks if c.name == name]
        return max(values) if values else 0.0


def validate_decoration(t: Triangulation, d: Decoration,
                        tolerances: Optional[ToleranceConfig] = None) -> ValidationReport:
    """Every per-face and per-edge constraint of a decoration with its residual."""
    tol = tolerances or DEFAULT_TOLERANCES
    report = ValidationReport()
    if len(d.phi) != t.num_edges or len(d.Phi) != t.num_faces or len(d.delta) != t.num_faces:
        report.add("shape", "decoration", 1.0, 0.0, passed=False)
        return report
    for e, value in enumerate(d.phi):
        report.add("phi-positive", f"edge {e}", value, 0.0, passed=value > 0)
    if not all(value > 0 for value in d.phi):
        return report

    face_records: Dict[int, TripleFlagInvariant] = {}
    for f in range(t.num_faces):
        where = f"face {f}"
        try:
            record = d.face_record(t, f)
        except InvalidInvariants as exc:
            report.add(exc.constraint, where, float("inf"), tol.constraint, passed=False)
            continue
        report.add("modulus", where, record.line_invariant().modulus_residual(), tol.constraint)
        report.add("gram-determinant", where, record.Delta, 0.0, passed=record.Delta < 0)
        for (i, j, k) in STORED_ORDER:
            report.add("circle", f"{where} corner {i}", circle_residual(record, i, j, k), tol.constraint)
        if record.Delta < 0:
            face_records[f] = record

    for e, ((f, s), (g, r)) in enumerate(t.gluings):
        if f not in face_records or g not in face_records:
            continue
        m_f = face_records[f].m_of(s, (s + 1) % 3)
        m_g = face_records[g].m_of((r + 1) % 3, r)
        residual = abs(m_f - m_g) / max(abs(m_f), abs(m_g), 1e-300)
        report.add("compatibility", f"edge {e}", residual, tol.compatibility)

    report.degenerate = d.is_degenerate(tol.nondegenerate)
    logger.info("validated decoration: %d checks, %d failures%s", len(report.checks),
                len(report.failures()), " (degenerate)" if report.degenerate else "")
    return report


def project_to_m(d: Decoration, t: Triangulation,
                 tolerances: Optional[ToleranceConfig] = None) -> MDecoration:
    """Forget delta, keep m per edge and Phi per face."""
    tol = (tolerances or DEFAULT_TOLERANCES).compatibility
    m = []
    for e, ((f, s), (g, r)) in enumerate(t.gluings):
        m_f = face_m(t, d, f, s)
        m_g = d.face_record(t, g).m_of((r + 1) % 3, r)
        residual = abs(m_f - m_g) / max(abs(m_f), abs(m_g), 1e-300)
        if residual > tol:
            raise IncompatibleDecoration(e, residual)
        m.append((m_f + m_g) / 2)
    return MDecoration(tuple(m), d.Phi)


def iter_face_sides(t: Triangulation) -> Iterator[Tuple[int, int, int]]:
    """(edge, face, slot) for every side of every face."""
    for f in range(t.num_faces):
        for s in range(3):
            yield t.slot_edge[(f, s)][0], f, s


def relabel_faces(t: Triangulation, order: Sequence[int]) -> Triangulation:
    """The same triangulation with face ``order[i]`` renamed to ``i``."""
    new_index = {old: new for new, old in enumerate(order)}
    return Triangulation(
        genus=t.genus, punctures=t.punctures,
        faces=tuple(t.faces[old] for old in order),
        gluings=tuple(((new_index[a[0]], a[1]), (new_index[b[0]], b[1])) for a, b in t.gluings),
    )


def decoration_vector(d: Decoration) -> np.ndarray:
    return np.array([*d.phi, *d.Phi, *[x for face in d.delta for x in face]], dtype=complex)
