"""
文件格式模块
JSON file schemas (pydantic) and report serialisation.

Complex numbers are written as ``[re, im]`` pairs. Files are parsed with
``json.loads`` first so syntax errors carry a line and column, then checked
against the schema.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import DEFAULT_RETRY_CAP, DEFAULT_SEED, SIGNIFICANT_DIGITS
from flagcoords.cusp_analysis import CuspReport, TorusCheck
from flagcoords.errors import FileFormatError
from flagcoords.representation_builder import SurfaceRepresentation
from flagcoords.surface_complex import Decoration, MDecoration, Step, Triangulation, ValidationReport

logger = logging.getLogger(__name__)

ComplexPair = Tuple[float, float]
Model = TypeVar("Model", bound=BaseModel)


def to_pair(z: complex) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def from_pair(pair: Sequence[float]) -> complex:
    return complex(pair[0], pair[1])


def matrix_to_pairs(m: np.ndarray) -> List[List[List[float]]]:
    return [[to_pair(x) for x in row] for row in np.asarray(m)]


def format_float(x: float) -> str:
    return f"{x:.{SIGNIFICANT_DIGITS}g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and np.signbit(z.imag)) else "+"
    return f"{format_float(z.real)}{sign}{format_float(abs(z.imag))}i"


# -- schemas ----------------------------------------------------------------

class _Schema(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TriangulationFile(_Schema):
    """Triangulation file: faces carry puncture labels, gluings pair (face, slot) sides."""
    genus: int = Field(..., ge=0)
    punctures: int = Field(..., ge=1)
    faces: List[Tuple[int, int, int]] = Field(..., min_length=1)
    gluings: List[Tuple[Tuple[int, int], Tuple[int, int]]]

    def to_triangulation(self) -> Triangulation:
        return Triangulation(self.genus, self.punctures, tuple(self.faces), tuple(self.gluings))

    @classmethod
    def from_triangulation(cls, t: Triangulation) -> "TriangulationFile":
        return cls(genus=t.genus, punctures=t.punctures,
                   faces=[list(face) for face in t.faces],
                   gluings=[[list(a), list(b)] for a, b in t.gluings])


class FaceDecoration(_Schema):
    Phi: ComplexPair
    delta: Tuple[ComplexPair, ComplexPair, ComplexPair]


class DecorationFile(_Schema):
    """phi per edge (gluing index) and, per face, Phi_012 with the stored deltas."""
    phi: List[float]
    faces: List[FaceDecoration]

    @field_validator("phi")
    @classmethod
    def _positive(cls, values: List[float]) -> List[float]:
        if any(v <= 0 for v in values):
            raise ValueError("phi values must be positive")
        return values

    def to_decoration(self) -> Decoration:
        return Decoration(
            phi=tuple(self.phi),
            Phi=tuple(from_pair(face.Phi) for face in self.faces),
            delta=tuple(tuple(from_pair(d) for d in face.delta) for face in self.faces),
        )

    @classmethod
    def from_decoration(cls, d: Decoration) -> "DecorationFile":
        return cls(phi=list(d.phi), faces=[
            FaceDecoration(Phi=to_pair(Phi), delta=[to_pair(x) for x in delta])
            for Phi, delta in zip(d.Phi, d.delta)
        ])


class MDecorationFile(_Schema):
    """m per edge, oriented as the first side of its gluing, and Phi_012 per face."""
    m: List[ComplexPair]
    Phi: List[ComplexPair]

    def to_mdecoration(self) -> MDecoration:
        return MDecoration(tuple(from_pair(x) for x in self.m), tuple(from_pair(x) for x in self.Phi))

    @classmethod
    def from_mdecoration(cls, md: MDecoration) -> "MDecorationFile":
        return cls(m=[to_pair(x) for x in md.m], Phi=[to_pair(x) for x in md.Phi])


class LoopsFile(_Schema):
    """Generator loops as lists of (hexagonation edge, +1 | -1) steps."""
    generators: Dict[str, List[Tuple[int, int]]]
    relation: Optional[List[Tuple[str, int]]] = None

    @field_validator("generators")
    @classmethod
    def _directions(cls, value: Dict[str, List[Tuple[int, int]]]) -> Dict[str, List[Tuple[int, int]]]:
        for name, steps in value.items():
            if any(direction not in (1, -1) for _, direction in steps):
                raise ValueError(f"loop {name}: step directions must be +1 or -1")
        return value

    def loops(self) -> Dict[str, Tuple[Step, ...]]:
        return {name: tuple(tuple(step) for step in steps) for name, steps in self.generators.items()}


class RunConfig(_Schema):
    """One command-line run."""
    command: Literal["validate", "solve", "represent", "random", "cusp"]
    inputs: List[Path] = Field(default_factory=list)
    tol: Optional[float] = Field(default=None, gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    format: Literal["json", "text"] = "text"
    branch: Optional[str] = None
    retry_cap: int = Field(default=DEFAULT_RETRY_CAP, ge=1)

    @field_validator("branch")
    @classmethod
    def _bits(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value != "all" and (not value or set(value) - {"0", "1"}):
            raise ValueError("branch must be 'all' or a string of 0/1 bits")
        return value


# -- reading and writing ----------------------------------------------------

def read_model(path: Path, model: Type[Model]) -> Model:
    """Parse ``path`` as JSON and validate it against ``model``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(str(path), exc.msg, exc.lineno, exc.colno) from exc
    try:
        parsed = model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise FileFormatError(str(path), f"{where}: {first['msg']}") from exc
    logger.info("read %s from %s", model.__name__, path)
    return parsed


def read_triangulation(path: Path) -> Triangulation:
    return read_model(path, TriangulationFile).to_triangulation()


def read_decoration(path: Path) -> Decoration:
    return read_model(path, DecorationFile).to_decoration()


def read_mdecoration(path: Path) -> MDecoration:
    return read_model(path, MDecorationFile).to_mdecoration()


def read_loops(path: Path) -> LoopsFile:
    return read_model(path, LoopsFile)


def dumps(payload: Any) -> str:
    """JSON text; floats use repr so values round-trip exactly."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def write_model(path: Path, model: BaseModel) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(model.model_dump(mode="json")), encoding="utf-8")
    logger.info("wrote %s", path)


# -- reports ----------------------------------------------------------------

def validation_payload(report: ValidationReport) -> Dict[str, Any]:
    return {
        "passed": report.passed,
        "degenerate": report.degenerate,
        "checks": [
            {"name": c.name, "location": c.location, "residual": c.residual,
             "threshold": c.threshold, "passed": c.passed}
            for c in report.checks
        ],
    }


def validation_text(report: ValidationReport) -> str:
    lines = []
    for c in report.checks:
        mark = "ok  " if c.passed else "FAIL"
        lines.append(f"{mark} {c.name:<17} {c.location:<18} residual={format_float(c.residual)}")
    lines.append("all constraints pass" if report.passed else f"{len(report.failures())} constraint(s) fail")
    if report.degenerate:
        lines.append("decoration is degenerate (some phi = 1)")
    return "\n".join(lines)


def cusp_payload(report: CuspReport) -> Dict[str, Any]:
    return {
        "puncture": report.puncture,
        "mu": to_pair(report.mu),
        "abs_mu": abs(report.mu),
        "K": to_pair(report.K),
        "cusp_type": report.cusp_type.value,
        "direct_residual": report.direct_residual,
        "steps": [{"corner": list(s.corner), "mu": to_pair(s.mu), "t": s.t} for s in report.steps],
    }


def cusp_text(report: CuspReport) -> str:
    return (f"puncture {report.puncture}: {report.cusp_type.value}  "
            f"mu={format_complex(report.mu)}  |mu|={format_float(abs(report.mu))}  "
            f"K={format_complex(report.K)}")


def torus_check_payload(check: TorusCheck) -> Dict[str, Any]:
    return {
        "satisfied": check.satisfied,
        "lhs": check.lhs,
        "rhs": check.rhs,
        "K": to_pair(check.K),
        "abs_mu": check.mu_modulus,
        "type_preserving": check.type_preserving,
    }


def representation_payload(rep: SurfaceRepresentation) -> Dict[str, Any]:
    return {
        "base_vertex": rep.base_vertex,
        "relation_residual": rep.relation_residual,
        "generators": {
            name: {"loop": [list(step) for step in rep.generator_loops[name]],
                   "matrix": matrix_to_pairs(image.matrix)}
            for name, image in rep.generator_images.items()
        },
    }


def representation_text(rep: SurfaceRepresentation) -> str:
    lines = [f"base vertex {rep.base_vertex}, relation residual {format_float(rep.relation_residual)}"]
    for name, image in rep.generator_images.items():
        lines.append(f"rho({name}) =")
        for row in image.matrix:
            lines.append("  " + "  ".join(format_complex(x) for x in row))
    return "\n".join(lines)
