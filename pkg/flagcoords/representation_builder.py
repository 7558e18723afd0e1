"""
表示构造模块
From decorations to representations and back.

Each hexagon vertex V_xy carries the frame in which (F_x, C_y) is in standard
position. The matrix of an edge maps the frame of its source to the frame
of its target, so the holonomy of a path s_1 ... s_k is A_{s_k} ... A_{s_1}.
Exchange edges V_xy -> V_yx carry E(m_xy), transfer edges V_xy -> V_xz
carry the transfer at corner x from line y to line z.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config.settings import DEFAULT_TOLERANCES, ToleranceConfig
from flagcoords.cp2_geometry import Flag, Isometry
from flagcoords.elementary_isometries import exchange_matrix, transfer_matrix
from flagcoords.errors import (
    DisconnectedPath,
    IncompatibleDecoration,
    InvalidDecoration,
    InvalidInvariants,
    NonGenericTriple,
    RelationViolation,
)
from flagcoords.hermitian_core import pu_distance
from flagcoords.invariants import TripleFlagInvariant, triple_invariants
from flagcoords.surface_complex import (
    Decoration,
    EdgeKind,
    Hexagonation,
    Step,
    Triangulation,
    build_hexagonation,
    validate_decoration,
)
from monitoring.metrics import track_computation

logger = logging.getLogger(__name__)

Word = Sequence[Tuple[str, int]]
FaceFlags = Tuple[Flag, Flag, Flag]

TORUS_RELATION: Tuple[Tuple[str, int], ...] = (("a", 1), ("b", 1), ("a", -1), ("b", -1), ("c", 1))


@dataclass(frozen=True)
class Cocycle:
    """SU(2,1) lifts on the oriented edges of a hexagonation."""
    hexagonation: Hexagonation
    forward: Tuple[Isometry, ...]
    backward: Tuple[Isometry, ...]

    @property
    def assignment(self) -> Dict[Step, Isometry]:
        table = {(e, 1): iso for e, iso in enumerate(self.forward)}
        table.update({(e, -1): iso for e, iso in enumerate(self.backward)})
        return table

    def step_matrix(self, step: Step) -> np.ndarray:
        edge, direction = step
        return (self.forward if direction > 0 else self.backward)[edge].matrix

    def hexagon_residual(self, face: int) -> float:
        product = _path_product(self, self.hexagonation.hexagons[face])
        return pu_distance(product, np.eye(3))

    def reversal_residual(self, edge: int) -> float:
        return pu_distance(self.forward[edge].matrix @ self.backward[edge].matrix, np.eye(3))


@dataclass(frozen=True)
class SurfaceRepresentation:
    """Generator images of rho, based at an HT vertex, with the relation residual.

    ``face_flags`` holds the corner flags of one lift of every face in the
    frame of the base vertex, the seed of the equivariant flag map.
    """
    base_vertex: int
    generator_loops: Dict[str, Tuple[Step, ...]]
    generator_images: Dict[str, Isometry]
    relation_residual: float
    relation: Optional[Tuple[Tuple[str, int], ...]] = None
    face_flags: Tuple[FaceFlags, ...] = ()

    def word_image(self, word: Word) -> np.ndarray:
        """Image of a word whose first letter is traversed first."""
        product = np.eye(3, dtype=complex)
        for name, power in word:
            image = self.generator_images[name].matrix
            product = (image if power > 0 else np.linalg.inv(image)) @ product
        return product


def _face_records(t: Triangulation, d: Decoration) -> List[TripleFlagInvariant]:
    return [d.face_record(t, f) for f in range(t.num_faces)]


def build_cocycle(t: Triangulation, d: Decoration,
                  tolerances: Optional[ToleranceConfig] = None) -> Cocycle:
    """Elementary matrix on every oriented edge of the hexagonation."""
    report = validate_decoration(t, d, tolerances)
    if not report.passed:
        first = report.failures()[0]
        if first.name == "compatibility":
            raise IncompatibleDecoration(int(first.location.split()[-1]), first.residual)
        raise InvalidDecoration(f"{first.name} fails at {first.location} (residual {first.residual:.3e})")
    hexagonation = build_hexagonation(t)
    records = _face_records(t, d)
    forward, backward = [], []
    for edge in hexagonation.edges:
        record = records[edge.face]
        if edge.kind is EdgeKind.EXCHANGE:
            x, y = edge.corners
            forward.append(exchange_matrix(record.m_of(x, y)))
            backward.append(exchange_matrix(record.m_of(y, x)))
        else:
            x, y, z = edge.corners
            forward.append(transfer_matrix(record, (x, y, z)))
            backward.append(transfer_matrix(record, (x, z, y)))
    cocycle = Cocycle(hexagonation, tuple(forward), tuple(backward))
    for f in range(t.num_faces):
        logger.debug("hexagon %d residual %.3e", f, cocycle.hexagon_residual(f))
    return cocycle


def _check_connected(h: Hexagonation, path: Sequence[Step]) -> None:
    for previous, step in zip(path, path[1:]):
        if h.step_target(previous) != h.step_source(step):
            raise DisconnectedPath(f"step {step} does not start where {previous} ends")


def _path_product(c: Cocycle, path: Sequence[Step]) -> np.ndarray:
    product = np.eye(3, dtype=complex)
    for step in path:
        product = c.step_matrix(step) @ product
    return product


def holonomy(c: Cocycle, path: Sequence[Step]) -> Isometry:
    """A_{s_k} ... A_{s_1}; the empty path gives the identity."""
    path = [(int(e), 1 if s > 0 else -1) for e, s in path]
    _check_connected(c.hexagonation, path)
    return Isometry(_path_product(c, path))


def reverse_path(path: Sequence[Step]) -> List[Step]:
    return [(e, -s) for e, s in reversed(path)]


def is_closed(h: Hexagonation, path: Sequence[Step], base: int) -> bool:
    if not path:
        return True
    return h.step_source(path[0]) == base and h.step_target(path[-1]) == base


# -- generator loops --------------------------------------------------------

def spanning_tree(h: Hexagonation) -> nx.MultiGraph:
    graph = h.graph()
    tree = nx.MultiGraph()
    tree.add_nodes_from(graph.nodes)
    tree.add_edges_from(nx.minimum_spanning_edges(graph, keys=True, data=False))
    return tree


def spanning_tree_loops(h: Hexagonation, base: int = 0) -> Dict[str, Tuple[Step, ...]]:
    """One loop per edge outside a spanning tree, closed up through the tree."""
    tree = spanning_tree(h)
    tree_keys = {key for _, _, key in tree.edges(keys=True)}
    loops = {}
    for index, edge in enumerate(h.edges):
        if index in tree_keys:
            continue
        there = h.path_to(base, edge.source, tree) if edge.source != base else []
        back = h.path_to(edge.target, base, tree) if edge.target != base else []
        loops[f"g{index}"] = tuple(there + [(index, 1)] + back)
    return loops


def standard_torus_loops() -> Dict[str, Tuple[Step, ...]]:
    """Loops a, b, c at V_01 of face 0 with a b a^-1 b^-1 c null-homotopic."""
    return {
        "a": ((0, 1), (4, -1), (7, -1), (3, -1)),
        "b": ((3, 1), (7, 1), (4, 1), (8, 1), (5, 1), (1, -1), (7, -1), (3, -1)),
        "c": ((3, 1), (7, 1), (4, 1), (8, 1), (5, 1), (6, 1)),
    }


def concatenate(loops: Mapping[str, Sequence[Step]], word: Word) -> List[Step]:
    path: List[Step] = []
    for name, power in word:
        path.extend(loops[name] if power > 0 else reverse_path(loops[name]))
    return path


@track_computation("build_representation")
def build_representation(t: Triangulation, d: Decoration,
                         generator_loops: Optional[Mapping[str, Sequence[Step]]] = None,
                         relation: Optional[Word] = None,
                         tolerances: Optional[ToleranceConfig] = None,
                         cocycle: Optional[Cocycle] = None) -> SurfaceRepresentation:
    """Generator images by holonomy, with the defining relation checked.

    Without explicit loops, spanning-tree loops are used and the relation
    check is the hexagon identity on every face.
    """
    tol = tolerances or DEFAULT_TOLERANCES
    c = cocycle or build_cocycle(t, d, tol)
    h = c.hexagonation
    if generator_loops is None:
        generator_loops = spanning_tree_loops(h)
        relation = None
    loops = {name: tuple((int(e), int(s)) for e, s in path) for name, path in generator_loops.items()}
    base = h.step_source(next(iter(loops.values()))[0]) if loops and any(loops.values()) else 0
    for name, path in loops.items():
        if not is_closed(h, path, base):
            raise DisconnectedPath(f"loop {name} is not closed at vertex {base}")
    images = {name: holonomy(c, path) for name, path in loops.items()}
    if relation is not None:
        residual = pu_distance(_path_product(c, concatenate(loops, relation)), np.eye(3))
    else:
        residual = max(c.hexagon_residual(f) for f in range(t.num_faces))
    logger.info("representation with %d generators, relation residual %.3e", len(images), residual)
    if residual > tol.relation:
        raise RelationViolation(residual, tol.relation)
    return SurfaceRepresentation(base, loops, images, float(residual),
                                 tuple(relation) if relation is not None else None,
                                 tuple(developing_flags(c, base)))


def rebase(rep: SurfaceRepresentation, c: Cocycle, new_base: int) -> SurfaceRepresentation:
    """The same representation based at another hexagon vertex."""
    h = c.hexagonation
    to_old = h.path_to(new_base, rep.base_vertex) if new_base != rep.base_vertex else []
    loops = {name: tuple(to_old + list(path) + reverse_path(to_old))
             for name, path in rep.generator_loops.items()}
    images = {name: holonomy(c, path) for name, path in loops.items()}
    return SurfaceRepresentation(new_base, loops, images, rep.relation_residual, rep.relation,
                                 tuple(developing_flags(c, new_base)))


# -- flags ------------------------------------------------------------------

def developing_flags(c: Cocycle, base: int = 0) -> List[FaceFlags]:
    """Flags at the corners of one lift of every face, in the frame of ``base``."""
    h = c.hexagonation
    tree = spanning_tree(h)
    seed = Flag.standard()
    flags = []
    for f in range(h.triangulation.num_faces):
        start = h.vertex(f, 0, 1)
        gamma = h.path_to(base, start, tree) if start != base else []
        corner0 = holonomy(c, gamma)
        corner1 = holonomy(c, gamma + [h.exchange_step(f, 0, 1)])
        corner2 = holonomy(c, gamma + [h.transfer_step(f, 0, 1), h.exchange_step(f, 0, 2)])
        flags.append(tuple(g.inverse().apply_flag(seed) for g in (corner0, corner1, corner2)))
    return flags


def decorate_from_flags(t: Triangulation,
                        flag_assignment: Sequence[Sequence[Flag]],
                        tolerances: Optional[ToleranceConfig] = None) -> Decoration:
    """Decoration read off from the flags at the corners of every face.

    Raises InvalidInvariants when phi or m disagree across a glued edge.
    """
    tol = tolerances or DEFAULT_TOLERANCES
    records = []
    for f, corner_flags in enumerate(flag_assignment):
        try:
            records.append(triple_invariants(*corner_flags))
        except NonGenericTriple as exc:
            raise NonGenericTriple(exc.reason, "flags are not generic", face=f) from exc
    phi = []
    for e, ((f, s), (g, r)) in enumerate(t.gluings):
        here = records[f].phi_of(s, (s + 1) % 3)
        there = records[g].phi_of(r, (r + 1) % 3)
        residual = abs(here - there) / max(here, there)
        if residual > tol.compatibility:
            raise InvalidInvariants("phi", f"edge {e}: {here:.17g} vs {there:.17g}")
        m_f = records[f].m_of(s, (s + 1) % 3)
        m_g = records[g].m_of((r + 1) % 3, r)
        residual = abs(m_f - m_g) / max(abs(m_f), abs(m_g), 1e-300)
        if residual > tol.compatibility:
            raise InvalidInvariants("compatibility", f"edge {e}: m residual {residual:.3e}")
        phi.append(here)
    return Decoration(
        phi=tuple(phi),
        Phi=tuple(record.Phi for record in records),
        delta=tuple(record.stored_deltas() for record in records),
    )
