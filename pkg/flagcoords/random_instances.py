"""
随机实例生成
Seeded generators of flags, generic triples, m-decorations and decorated
surfaces.

Random decorations are lifts of random points of M(T), so both solver
branches of every face are reached. Symmetric decorations come from an
explicit flag witness instead: on the torus the second face carries the
complex conjugates of the first face's flags, on the thrice-punctured sphere
the same flags in the opposite order. The engineered tori realise the two
non-loxodromic cusp types.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from config import DEFAULT_RETRY_CAP, SUPPORTED_SURFACES
from config.settings import DEFAULT_TOLERANCES, ToleranceConfig
from flagcoords.cp2_geometry import ComplexLine, Flag, random_isometry
from flagcoords.cusp_analysis import CuspType, cusp_holonomy
from flagcoords.delta_solver import enumerate_lifts, face_input, solve_triangle
from flagcoords.errors import (
    DegenerateInput,
    FlagCoordsError,
    InvalidInvariants,
    RetryCapExhausted,
    UnsupportedSurface,
)
from flagcoords.invariants import (
    TripleFlagInvariant,
    circle_residual,
    m_invariant,
    phi_from_m,
    reconstruct_flags,
    triple_invariants,
)
from flagcoords.representation_builder import build_cocycle, decorate_from_flags, developing_flags
from flagcoords.surface_complex import (
    Decoration,
    MDecoration,
    Triangulation,
    is_standard_torus,
    standard_torus,
    thrice_punctured_sphere,
    validate_decoration,
)
from monitoring.metrics import track_computation

logger = logging.getLogger(__name__)

PHI_RANGE = (0.05, 20.0)
PHI_GAP = 0.05
DELTA_CEILING = -1e-3
DELTA_MODULUS_RANGE = (1e-3, 1e3)

FaceFlags = Tuple[Flag, Flag, Flag]


@dataclass(frozen=True)
class RandomInstance:
    """A decoration with flags realising it; ``branch`` is set for lifts of M(T)."""
    triangulation: Triangulation
    decoration: Decoration
    witness: Tuple[FaceFlags, ...]
    branch: Optional[Tuple[int, ...]] = None
    symmetric: bool = False


def random_flag(rng: np.random.Generator) -> Flag:
    return random_isometry(rng).apply_flag(Flag.standard())


def conjugate_flag(flag: Flag) -> Flag:
    """Image of a flag under complex conjugation of coordinates."""
    return Flag(ComplexLine(np.conj(flag.polar)), np.conj(flag.point))


def passes_gates(record: TripleFlagInvariant) -> bool:
    """Conditioning gates for random triples."""
    lo, hi = PHI_RANGE
    if not all(lo <= phi <= hi and abs(1 - phi) > PHI_GAP for phi in record.phi):
        return False
    if record.Delta >= DELTA_CEILING:
        return False
    dlo, dhi = DELTA_MODULUS_RANGE
    return all(dlo <= abs(d) <= dhi for d in record.delta)


def random_generic_pair(rng: np.random.Generator,
                        retry_cap: int = DEFAULT_RETRY_CAP) -> Tuple[Flag, Flag]:
    for _ in range(retry_cap):
        f1, f2 = random_flag(rng), random_flag(rng)
        try:
            m = m_invariant(f1, f2)
        except FlagCoordsError:
            continue
        if abs(m - 1) > PHI_GAP and abs(m) > PHI_GAP:
            return f1, f2
    raise RetryCapExhausted(retry_cap, "flag pair")


def random_generic_triple(rng: np.random.Generator,
                          retry_cap: int = DEFAULT_RETRY_CAP) -> Tuple[FaceFlags, TripleFlagInvariant]:
    """A generic triple of flags whose record passes the conditioning gates."""
    for attempt in range(retry_cap):
        flags = (random_flag(rng), random_flag(rng), random_flag(rng))
        try:
            record = triple_invariants(*flags)
        except FlagCoordsError:
            continue
        if passes_gates(record):
            if attempt:
                logger.debug("random triple accepted after %d rejections", attempt)
            return flags, record
    raise RetryCapExhausted(retry_cap, "flag triple")


def _mirror_face(t: Triangulation, flags: FaceFlags) -> FaceFlags:
    f0, f1, f2 = flags
    if is_standard_torus(t):
        return (conjugate_flag(f1), conjugate_flag(f2), conjugate_flag(f0))
    return (f0, f2, f1)


def catalogued_triangulation(genus: int, punctures: int) -> Triangulation:
    if 2 - 2 * genus - punctures >= 0:
        raise ValueError(f"2 - 2g - p must be negative, got g={genus}, p={punctures}")
    name = SUPPORTED_SURFACES.get((genus, punctures))
    if name is None:
        raise UnsupportedSurface(f"no catalogued triangulation for genus {genus} with {punctures} punctures")
    return standard_torus() if name == "standard_torus" else thrice_punctured_sphere()


def _face_phi(t: Triangulation, phi: Sequence[float], f: int) -> Tuple[float, float, float]:
    return tuple(phi[t.slot_edge[(f, s)][0]] for s in range(3))


def random_mdecoration(t: Triangulation, rng: np.random.Generator,
                       retry_cap: int = DEFAULT_RETRY_CAP) -> MDecoration:
    """A point of M(T): gated m per edge and a random-phase Phi per face with Delta < 0."""
    lo, hi = PHI_RANGE
    for _ in range(retry_cap):
        m = tuple(complex(*rng.normal(size=2) * 2) for _ in range(t.num_edges))
        if not all(abs(v) > PHI_GAP and abs(v - 1) > PHI_GAP for v in m):
            continue
        phi = [phi_from_m(v) for v in m]
        if not all(lo <= p <= hi and abs(1 - p) > PHI_GAP for p in phi):
            continue
        Phi = tuple(np.sqrt(np.prod(_face_phi(t, phi, f))) * np.exp(1j * rng.uniform(-np.pi, np.pi))
                    for f in range(t.num_faces))
        md = MDecoration(m, Phi)
        if all(md.Delta(t, f) < DELTA_CEILING for f in range(t.num_faces)):
            return md
    raise RetryCapExhausted(retry_cap, "m-decoration")


def _symmetric_decoration(t: Triangulation, rng: np.random.Generator, retry_cap: int,
                          tolerances: Optional[ToleranceConfig]) -> RandomInstance:
    for _ in range(retry_cap):
        flags, _ = random_generic_triple(rng, retry_cap)
        witness = (flags, _mirror_face(t, flags))
        try:
            d = decorate_from_flags(t, witness, tolerances)
        except FlagCoordsError:
            continue
        if validate_decoration(t, d, tolerances).passed:
            return RandomInstance(t, d, witness, symmetric=True)
    raise RetryCapExhausted(retry_cap, "symmetric decoration")


@track_computation("random_decoration")
def random_decoration(t: Triangulation, rng: np.random.Generator,
                      retry_cap: int = DEFAULT_RETRY_CAP,
                      symmetric: bool = False,
                      tolerances: Optional[ToleranceConfig] = None) -> RandomInstance:
    """A valid decoration of a catalogued triangulation.

    A point of M(T) is sampled until all 2^N lifts exist and one lift is
    picked at random. With ``symmetric`` the decoration is read off a
    mirrored flag witness instead.
    """
    if (t.genus, t.punctures) not in SUPPORTED_SURFACES or t.num_faces != 2:
        raise UnsupportedSurface(f"random decorations exist for {sorted(SUPPORTED_SURFACES)} only")
    if symmetric:
        return _symmetric_decoration(t, rng, retry_cap, tolerances)
    tol = tolerances or DEFAULT_TOLERANCES
    for attempt in range(retry_cap):
        md = random_mdecoration(t, rng, retry_cap)
        try:
            lifts = dict(enumerate_lifts(t, md, tol))
        except FlagCoordsError as exc:
            logger.debug("m-decoration rejected: %s", exc)
            continue
        if len(lifts) != 2 ** t.num_faces:
            continue
        branch = sorted(lifts)[int(rng.integers(len(lifts)))]
        d = lifts[branch]
        if not all(passes_gates(d.face_record(t, f)) for f in range(t.num_faces)):
            continue
        if not validate_decoration(t, d, tol).passed:
            continue
        witness = tuple(developing_flags(build_cocycle(t, d, tol)))
        logger.debug("random decoration on branch %s after %d rejections", branch, attempt)
        return RandomInstance(t, d, witness, branch=branch)
    raise RetryCapExhausted(retry_cap, "decoration")


def circle_solutions(record: TripleFlagInvariant, modulus: float) -> Sequence[complex]:
    """delta^0_12 of the given modulus satisfying the circle relation at corner 0."""
    a = 1 - record.phi_of(0, 2)
    b = record.Phi_of(0, 2, 1) - record.phi_of(1, 2)
    c = record.phi_of(1, 2) * (1 - record.phi_of(0, 1))
    cosine = -(a * modulus ** 2 + c) / (2 * modulus * abs(b))
    if abs(cosine) > 1:
        return ()
    base, spread = -np.angle(b), np.arccos(cosine)
    return tuple(modulus * np.exp(1j * (base + sign * spread)) for sign in (1, -1))


def _balanced_modulus(record: TripleFlagInvariant) -> float:
    """|delta^0_12| at which the three stored deltas multiply to sqrt(phi_01 phi_12 phi_20)."""
    others = abs(record.delta_of(1, 2, 0)) * abs(record.delta_of(2, 0, 1))
    return float(np.sqrt(np.prod(record.phi)) / others)


def _with_corner_delta(record: TripleFlagInvariant, d0: complex,
                       tol: ToleranceConfig) -> TripleFlagInvariant:
    stored = (d0, record.delta_of(1, 2, 0), record.delta_of(2, 0, 1))
    moved = TripleFlagInvariant.from_face_data(record.phi, record.Phi, stored)
    for key in ((0, 1, 2), (0, 2, 1)):
        residual = circle_residual(moved, *key)
        if residual > tol.constraint:
            raise InvalidInvariants("circle", f"corner 0 residual {residual:.3e}")
    return moved


def _mirror_deltas(stored: Sequence[complex]) -> Tuple[complex, complex, complex]:
    """Stored deltas of the conjugate face (f1, f2, f0) on the standard torus."""
    d0, d1, d2 = stored
    return (np.conj(d1), np.conj(d2), np.conj(d0))


@track_computation("engineered_parabolic_torus")
def engineered_parabolic_torus(rng: np.random.Generator,
                               retry_cap: int = DEFAULT_RETRY_CAP,
                               tolerances: Optional[ToleranceConfig] = None) -> RandomInstance:
    """A torus decoration whose cusp holonomy is a complex reflection.

    The delta at corner 0 of the first face is moved along its circle until
    the three stored deltas multiply to modulus sqrt(phi_01 phi_12 phi_20).
    The second face carries the conjugate invariants, which makes |mu| = 1
    and forces K = 0.
    """
    t = standard_torus()
    tol = tolerances or DEFAULT_TOLERANCES
    for _ in range(retry_cap):
        _, record = random_generic_triple(rng, retry_cap)
        candidates = circle_solutions(record, _balanced_modulus(record))
        if not candidates:
            continue
        try:
            face0 = _with_corner_delta(record, candidates[int(rng.integers(len(candidates)))], tol)
            flags = reconstruct_flags(face0, tol)
        except FlagCoordsError as exc:
            logger.debug("engineered candidate rejected: %s", exc)
            continue
        stored = face0.stored_deltas()
        d = Decoration(face0.phi, (face0.Phi, np.conj(face0.Phi)), (stored, _mirror_deltas(stored)))
        if not validate_decoration(t, d, tol).passed:
            continue
        if cusp_holonomy(t, d, 0, tol, validate=False).cusp_type is CuspType.COMPLEX_REFLECTION:
            return RandomInstance(t, d, (flags, _mirror_face(t, flags)), symmetric=True)
    raise RetryCapExhausted(retry_cap, "parabolic torus decoration")


def _twisted_torus(t: Triangulation, face0: TripleFlagInvariant, twist: float,
                   tol: ToleranceConfig) -> Decoration:
    """Face 0 as given; face 1 solved from the same m with Phi = conj(Phi_0) e^{i twist}."""
    md = MDecoration(face0.m, (face0.Phi, np.conj(face0.Phi) * np.exp(1j * twist)))
    if md.Delta(t, 1) >= DELTA_CEILING:
        raise DegenerateInput("twisted face has Delta above the ceiling", face=1)
    solved = solve_triangle(face_input(t, md, 1), tol)
    target = _mirror_deltas(face0.stored_deltas())
    delta1 = min(solved.solutions, key=lambda s: max(abs(a - b) for a, b in zip(s, target)))
    return Decoration(md.phi, md.Phi, (face0.stored_deltas(), delta1))


@track_computation("engineered_screw_parabolic_torus")
def engineered_screw_parabolic_torus(rng: np.random.Generator,
                                     retry_cap: int = DEFAULT_RETRY_CAP,
                                     tolerances: Optional[ToleranceConfig] = None) -> RandomInstance:
    """A torus decoration whose cusp holonomy is screw parabolic.

    The second face keeps the m-invariants of the first but has its Phi
    twisted away from the conjugate, so K stays non-zero. |delta^0_12| on the
    first face is then tuned along its circle until log|mu| = 0.
    """
    t = standard_torus()
    tol = tolerances or DEFAULT_TOLERANCES
    for _ in range(retry_cap):
        _, record = random_generic_triple(rng, retry_cap)
        twist = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 0.3))
        side = int(rng.integers(2))
        centre = _balanced_modulus(record)

        def decoration_at(modulus: float) -> Decoration:
            points = circle_solutions(record, modulus)
            if len(points) != 2:
                raise InvalidInvariants("circle", f"no delta of modulus {modulus:.6g} on the circle")
            return _twisted_torus(t, _with_corner_delta(record, points[side], tol), twist, tol)

        def log_mu(modulus: float) -> float:
            d = decoration_at(modulus)
            return float(np.log(abs(cusp_holonomy(t, d, 0, tol, validate=False).mu)))

        samples = []
        for modulus in centre * np.exp(np.linspace(-0.5, 0.5, 21)):
            try:
                samples.append((modulus, log_mu(modulus)))
            except FlagCoordsError:
                continue
        bracket = next(((a, b) for (a, ga), (b, gb) in zip(samples, samples[1:]) if ga * gb < 0), None)
        if bracket is None:
            continue
        try:
            root = brentq(log_mu, *bracket, xtol=1e-14 * centre)
            d = decoration_at(root)
        except (FlagCoordsError, ValueError, RuntimeError) as exc:
            logger.debug("screw-parabolic candidate rejected: %s", exc)
            continue
        if not validate_decoration(t, d, tol).passed:
            continue
        report = cusp_holonomy(t, d, 0, tol, validate=False)
        if report.cusp_type is CuspType.SCREW_PARABOLIC:
            logger.debug("screw parabolic torus: twist %.3f, |mu| - 1 = %.3e", twist, abs(report.mu) - 1)
            return RandomInstance(t, d, tuple(developing_flags(build_cocycle(t, d, tol))))
    raise RetryCapExhausted(retry_cap, "screw-parabolic torus decoration")


def scale_delta(d: Decoration, face: int, corner: int, factor: float) -> Decoration:
    """The decoration with one stored delta multiplied by ``factor``."""
    delta = [list(values) for values in d.delta]
    delta[face][corner] *= factor
    return Decoration(d.phi, d.Phi, tuple(tuple(values) for values in delta))


def reference_triple() -> FaceFlags:
    """A triple with closed-form invariants.

    phi = (1/2, 25/24, 1/3), Phi = 5/12, stored deltas (5/4, -(1+sqrt 2)/6, 2 sqrt 3 - 2).
    """
    s2, s3 = np.sqrt(2.0), np.sqrt(3.0)
    return (
        Flag(ComplexLine(np.array([0, 1, 0], dtype=complex)), np.array([1, 0, 0], dtype=complex)),
        Flag(ComplexLine(np.array([1, s2, 1], dtype=complex)), np.array([s2 - 1, s2, -1 - s2], dtype=complex)),
        Flag(ComplexLine(np.array([2, s2, 1], dtype=complex)), np.array([2 * s3 - 2, 2 * s2, -1 - s3], dtype=complex)),
    )


def reference_instance(t: Triangulation) -> RandomInstance:
    """The reference triple decorating a catalogued surface."""
    flags = reference_triple()
    witness = (flags, _mirror_face(t, flags))
    return RandomInstance(t, decorate_from_flags(t, witness), witness, symmetric=True)
