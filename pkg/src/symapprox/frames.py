"""Frames as synthesis matrices.

A frame of ``N`` vectors in ``C^d`` is stored as its ``d x N`` synthesis
matrix, column ``i`` being the ``i``-th frame vector.  Parseval frames are
exactly the frames whose synthesis matrix is a partial isometry.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import tolerances
from .errors import DegenerateFrameError, DimensionError, DomainError, NumericalInstabilityError
from .linalg import as_matrix, hs_distance, is_partial_isometry, is_projection, polar_decompose, svd

__all__ = [
    "Frame",
    "ParsevalFrame",
    "ProjectionPair",
    "as_frame",
    "as_parseval",
    "frame_bounds",
    "is_parseval",
    "canonical_parseval",
    "index_pair",
    "index_additivity_check",
    "weakly_similar",
    "quadratic_distance",
    "component_of",
]


@dataclasses.dataclass(frozen=True, eq=False)
class Frame:
    """A frame given by its synthesis matrix.

    Zero columns are allowed; an all-zero synthesis matrix is not, since it
    spans no subspace on which a positive lower frame bound could hold.
    """

    synthesis: np.ndarray
    label: str | None = None

    def __post_init__(self):
        F = as_matrix(self.synthesis)
        if F.shape[1] < 1:
            raise DimensionError("a frame needs at least one vector")
        if not np.any(F):
            raise DegenerateFrameError("synthesis matrix is identically zero")
        object.__setattr__(self, "synthesis", F)

    @property
    def shape(self) -> tuple:
        return self.synthesis.shape

    @property
    def vectors(self) -> list:
        return [self.synthesis[:, i] for i in range(self.synthesis.shape[1])]


@dataclasses.dataclass(frozen=True, eq=False)
class ParsevalFrame:
    """A Parseval frame; its synthesis matrix is a partial isometry.

    The zero matrix is a legal (empty-span) Parseval frame: zeroing out
    directions can remove every vector.
    """

    synthesis: np.ndarray

    def __post_init__(self):
        X = as_matrix(self.synthesis)
        if X.shape[1] < 1:
            raise DimensionError("a frame needs at least one vector")
        if not is_partial_isometry(X):
            raise DomainError("synthesis matrix is not a partial isometry")
        object.__setattr__(self, "synthesis", X)

    @property
    def shape(self) -> tuple:
        return self.synthesis.shape


@dataclasses.dataclass(frozen=True, eq=False)
class ProjectionPair:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p, q = as_matrix(self.p), as_matrix(self.q)
        if p.shape != q.shape:
            raise DimensionError(f"shape mismatch: {p.shape} vs {q.shape}")
        if not (is_projection(p) and is_projection(q)):
            raise DomainError("both operators must be orthogonal projections")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def as_frame(f) -> Frame:
    if isinstance(f, Frame):
        return f
    if isinstance(f, ParsevalFrame):
        return Frame(f.synthesis)
    return Frame(f)


def as_parseval(x) -> ParsevalFrame:
    if isinstance(x, ParsevalFrame):
        return x
    if isinstance(x, Frame):
        return ParsevalFrame(x.synthesis)
    return ParsevalFrame(x)


def _synthesis(f) -> np.ndarray:
    if isinstance(f, (Frame, ParsevalFrame)):
        return f.synthesis
    return as_matrix(f)


def frame_bounds(f) -> tuple:
    """Optimal frame bounds ``(A, B)`` on the span of the frame.

    ``A`` is the smallest nonzero squared singular value of the synthesis
    matrix and ``B`` the largest.
    """
    f = as_frame(f)
    s = svd(f.synthesis).nonzero
    return float(s[-1] ** 2), float(s[0] ** 2)


def is_parseval(f, tol: float | None = None) -> bool:
    return is_partial_isometry(_synthesis(f), tol)


def canonical_parseval(f) -> ParsevalFrame:
    """Canonical Parseval frame ``{U e_i}`` from the polar factor of ``F``."""
    f = as_frame(f)
    return ParsevalFrame(polar_decompose(f.synthesis).isometric)


def _rank(M) -> int:
    return svd(M).rank


def _intersection_dim(A: np.ndarray, B: np.ndarray) -> int:
    # dim(ran A ∩ ran B) for orthogonal projections A, B
    return _rank(A) + _rank(B) - _rank(np.hstack([A, B]))


def index_pair(pair, q=None) -> int:
    """Index of a pair of projections.

    ``dim(ker q ∩ ran p) - dim(ran q ∩ ker p)``, computed from subspace
    intersections and cross-checked against ``rank p - rank q``.

    Accepts either a :class:`ProjectionPair` or the two projections.
    """
    if q is not None:
        pair = ProjectionPair(pair, q)
    p, q = pair.p, pair.q
    eye = np.eye(p.shape[0])
    via_intersections = _intersection_dim(p, eye - q) - _intersection_dim(q, eye - p)
    via_ranks = _rank(p) - _rank(q)
    if via_intersections != via_ranks:
        raise NumericalInstabilityError(
            f"index routes disagree: intersections give {via_intersections}, ranks give {via_ranks}"
        )
    return via_ranks


def index_additivity_check(p, q, r) -> bool:
    return index_pair(p, r) == index_pair(p, q) + index_pair(q, r)


def weakly_similar(f, g) -> bool:
    """Equal synthesis kernels, i.e. related by an invertible map of spans."""
    F, G = _synthesis(f), _synthesis(g)
    if F.shape[1] != G.shape[1]:
        raise DimensionError(f"frames have different lengths: {F.shape[1]} vs {G.shape[1]}")
    rf, rg = _rank(F), _rank(G)
    return rf == rg == _rank(np.vstack([F, G]))


def quadratic_distance(f, g) -> float:
    """Sum of squared distances between corresponding frame vectors."""
    return hs_distance(_synthesis(f), _synthesis(g)) ** 2


def _restricted_index(X: np.ndarray, U: np.ndarray) -> int:
    # index of X U^* restricted to ran(U) -> ran(X)
    bk = svd(U).range_basis()
    bl = svd(X).range_basis()
    T = bl.conj().T @ X @ U.conj().T @ bk
    rt = _rank(T) if T.size else 0
    return (bk.shape[1] - rt) - (bl.shape[1] - rt)


def component_of(x, f) -> int:
    """Component label of a Parseval frame relative to a frame.

    Computes the index of the initial projections and checks it against the
    index of the final projections and the index of ``X U^*`` restricted to
    the span of ``f``.
    """
    X = as_parseval(x).synthesis
    f = as_frame(f)
    if X.shape != f.shape:
        raise DimensionError(f"shape mismatch: {X.shape} vs {f.shape}")
    U = polar_decompose(f.synthesis).isometric
    k_init = index_pair(U.conj().T @ U, X.conj().T @ X)
    k_final = index_pair(U @ U.conj().T, X @ X.conj().T)
    k_op = _restricted_index(X, U)
    if not k_init == k_final == k_op:
        raise NumericalInstabilityError(
            f"component characterizations disagree: {k_init}, {k_final}, {k_op}"
        )
    return k_init
