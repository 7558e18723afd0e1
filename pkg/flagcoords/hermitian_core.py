"""
Hermitian 线性代数核心
Complex linear algebra on C^{2,1}: the Hermitian form, Gram matrices,
signatures, anti-dual bases and the Hermitian cross product.

Vectors are plain ``numpy`` arrays of shape ``(3,)`` with complex dtype. The
default form is ``J`` (antidiagonal 1, 1, 1), so that
``<v, w> = v1*conj(w3) + v2*conj(w2) + v3*conj(w1)``.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from config.settings import DEFAULT_TOLERANCES
from flagcoords.errors import DegenerateBasis, NotHermitian

logger = logging.getLogger(__name__)

J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)

# eigenvectors of J ordered by eigenvalue (-1, +1, +1)
_J_EIGENBASIS = np.array([
    [1, 1, 0],
    [0, 0, np.sqrt(2)],
    [-1, 1, 0],
], dtype=complex) / np.sqrt(2)

CUBE_ROOTS_OF_UNITY = np.exp(2j * np.pi * np.arange(3) / 3)


def as_hvector(v: ArrayLike) -> NDArray[np.complex128]:
    """Coerce to a non-zero complex 3-vector."""
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"expected 3 coordinates, got shape {arr.shape}")
    if not np.any(arr):
        raise DegenerateBasis("the zero vector is not a point of CP^2")
    return arr


def _check_hermitian(m: NDArray, tol: float) -> None:
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > tol * scale:
        raise NotHermitian("matrix differs from its conjugate transpose")


@dataclass(frozen=True)
class HForm:
    """A Hermitian form of signature (2,1), given by its Gram matrix."""
    gram: NDArray[np.complex128] = field(default_factory=lambda: J.copy())

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=complex)
        if g.shape != (3, 3):
            raise ValueError(f"Gram matrix must be 3x3, got {g.shape}")
        _check_hermitian(g, DEFAULT_TOLERANCES.herm)
        if signature(g) != Sign3(2, 1, 0):
            raise NotHermitian(f"form must have signature (2,1), got {signature(g)}")
        object.__setattr__(self, "gram", g)

    @classmethod
    def standard(cls) -> "HForm":
        return STANDARD_FORM

    def __eq__(self, other) -> bool:
        return isinstance(other, HForm) and np.array_equal(self.gram, other.gram)

    def __hash__(self) -> int:
        return hash(self.gram.tobytes())


class Sign3(NamedTuple):
    n_pos: int
    n_neg: int
    n_zero: int


class VectorClass(str, Enum):
    NEGATIVE = "negative"
    NULL = "null"
    POSITIVE = "positive"


def herm(v: ArrayLike, w: ArrayLike, form: Optional[HForm] = None) -> complex:
    """<v, w> = v^T G conj(w)."""
    g = J if form is None else form.gram
    return complex(np.asarray(v) @ g @ np.conj(np.asarray(w)))


def herm_norm(v: ArrayLike, form: Optional[HForm] = None) -> float:
    """Real part of <v, v>."""
    return herm(v, v, form).real


def vector_class(v: ArrayLike, form: Optional[HForm] = None,
                 tol: Optional[float] = None) -> VectorClass:
    v = as_hvector(v)
    tol = DEFAULT_TOLERANCES.null if tol is None else tol
    scale = float(np.vdot(v, v).real)
    value = herm(v, v, form)
    if abs(value.imag) > DEFAULT_TOLERANCES.herm * scale:
        logger.warning("<v, v> has imaginary part %.3e, the form is not Hermitian", value.imag)
    q = value.real
    if abs(q) <= tol * scale:
        return VectorClass.NULL
    return VectorClass.POSITIVE if q > 0 else VectorClass.NEGATIVE


def gram_matrix(*vectors: ArrayLike, form: Optional[HForm] = None) -> NDArray[np.complex128]:
    """Entry (i, j) is <v_i, v_j>."""
    g = J if form is None else form.gram
    rows = np.array([as_hvector(v) for v in vectors])
    return rows @ g @ rows.conj().T


def signature(m: ArrayLike) -> Sign3:
    m = np.asarray(m, dtype=complex)
    _check_hermitian(m, DEFAULT_TOLERANCES.herm)
    eig = np.linalg.eigvalsh((m + m.conj().T) / 2)
    cutoff = 1e-10 * max(float(np.max(np.abs(eig))), np.finfo(float).tiny)
    n_pos = int(np.sum(eig > cutoff))
    n_neg = int(np.sum(eig < -cutoff))
    return Sign3(n_pos, n_neg, len(eig) - n_pos - n_neg)


def _basis_matrix(vectors: Sequence[ArrayLike]) -> NDArray[np.complex128]:
    rows = np.array([as_hvector(v) for v in vectors])
    scaled = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    if abs(np.linalg.det(scaled)) <= 1e-12:
        raise DegenerateBasis("vectors are not linearly independent")
    return rows


def anti_dual_basis(c1: ArrayLike, c2: ArrayLike, c3: ArrayLike,
                    form: Optional[HForm] = None) -> Tuple[NDArray, NDArray, NDArray]:
    """The basis (d_i) with <d_i, c_j> = delta_ij."""
    g = J if form is None else form.gram
    rows = _basis_matrix([c1, c2, c3])
    d = np.linalg.inv(g @ rows.conj().T)
    return d[0], d[1], d[2]


def hermitian_cross(v: ArrayLike, w: ArrayLike, form: Optional[HForm] = None) -> NDArray[np.complex128]:
    """A vector orthogonal to both v and w for the form."""
    g = J if form is None else form.gram
    a = g @ np.conj(as_hvector(v))
    b = g @ np.conj(as_hvector(w))
    u = np.cross(a, b)
    if np.linalg.norm(u) <= 1e-12 * np.linalg.norm(a) * np.linalg.norm(b):
        raise DegenerateBasis("hermitian cross product of parallel vectors")
    return u


def standard_frame(h: ArrayLike) -> NDArray[np.complex128]:
    """Rows v_1, v_2, v_3 in J-coordinates whose Gram matrix is ``h``.

    Diagonalises h and matches its eigenbasis against the eigenbasis of J,
    with the negative eigenvalue paired first.
    """
    h = np.asarray(h, dtype=complex)
    if signature(h) != Sign3(2, 1, 0):
        raise DegenerateBasis(f"Gram matrix has signature {signature(h)}, expected (2,1,0)")
    eigval, eigvec = np.linalg.eigh((h + h.conj().T) / 2)
    scale = np.diag(np.sqrt(np.abs(eigval)))
    return eigvec @ scale @ _J_EIGENBASIS.conj().T


def same_point(v: ArrayLike, w: ArrayLike, tol: Optional[float] = None) -> bool:
    """Projective equality after normalising by the largest coordinate of v."""
    tol = DEFAULT_TOLERANCES.projective if tol is None else tol
    v = as_hvector(v)
    w = as_hvector(w)
    k = int(np.argmax(np.abs(v)))
    if abs(w[k]) <= 1e-300:
        return False
    return bool(np.max(np.abs(v / v[k] - w / w[k])) < tol)


def to_su21(m: ArrayLike) -> NDArray[np.complex128]:
    """Divide by the cube root of det whose argument lies in (-pi/3, pi/3]."""
    m = np.asarray(m, dtype=complex)
    det = np.linalg.det(m)
    if abs(det) <= 1e-300:
        raise DegenerateBasis("singular matrix has no SU(2,1) lift")
    root = abs(det) ** (1 / 3) * np.exp(1j * np.angle(det) / 3)
    return m / root


def pu_distance(a: ArrayLike, b: ArrayLike) -> float:
    """Entrywise distance of two SU(2,1) lifts up to a cube root of unity."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(min(np.max(np.abs(a - w * b)) for w in CUBE_ROOTS_OF_UNITY))


def projective_matrix_distance(a: ArrayLike, b: ArrayLike) -> float:
    """Relative distance of a from the best scalar multiple of b."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    kappa = np.vdot(b, a) / np.vdot(b, b)
    return float(np.max(np.abs(a - kappa * b)) / max(np.max(np.abs(a)), 1e-300))


def form_defect(m: ArrayLike, antiholomorphic: bool = False,
                form: Optional[HForm] = None) -> float:
    """How far m is from preserving the form, relative to |m|^2."""
    g = J if form is None else form.gram
    m = np.asarray(m, dtype=complex)
    target = g.conj() if antiholomorphic else g
    scale = max(1.0, float(np.max(np.abs(m))) ** 2)
    return float(np.max(np.abs(m.T @ g @ m.conj() - target)) / scale)


STANDARD_FORM = HForm(J.copy())
