"""Dense linear-algebra kernel.

SVD with multiplicity grouping, polar decomposition, Hilbert-Schmidt
geometry, the unitary exponential/logarithm pair, simultaneous SVD of a
commuting (frame, partial isometry) pair, and weak submajorization.

All matrices are promoted to ``complex128``.  Tolerances default to
:func:`symapprox.tolerances.current`.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import tolerances
from .errors import DimensionError, DomainError, NumericalInstabilityError, NumericFailure, PreconditionError

__all__ = [
    "SVDFactorization",
    "PolarParts",
    "SimultaneousSVD",
    "as_matrix",
    "svd",
    "polar_decompose",
    "hs_norm",
    "hs_distance",
    "is_partial_isometry",
    "is_projection",
    "numerical_rank",
    "unitary_log",
    "matrix_exp",
    "simultaneous_svd",
    "submajorization_holds",
    "group_values",
]


def as_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite 2-D complex array."""
    A = np.asarray(M)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={A.ndim}")
    A = A.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    return A


def group_values(sigma, tol: float) -> tuple:
    """Partition a nonincreasing sequence into clusters of near-equal values.

    A cluster starts at its largest value and absorbs following values as
    long as they are within ``tol`` of that first value, so members of one
    cluster are pairwise within ``tol``.
    """
    groups = []
    start = 0
    n = len(sigma)
    for i in range(1, n + 1):
        if i == n or sigma[start] - sigma[i] > tol:
            groups.append(tuple(range(start, i)))
            start = i
    return tuple(g for g in groups if g)


@dataclasses.dataclass(frozen=True, eq=False)
class SVDFactorization:
    """``M = left @ diag(sigma) @ right^*`` with full unitary factors.

    ``sigma`` has length ``min(d, N)`` and is nonincreasing.  ``groups``
    partitions its indices into clusters of equal values (within
    ``tol_group``); ``tol_rank`` is the threshold separating nonzero
    singular values from zero.
    """

    left: np.ndarray
    right: np.ndarray
    sigma: np.ndarray
    groups: tuple
    tol_rank: float
    tol_group: float

    @property
    def shape(self) -> tuple:
        return (self.left.shape[0], self.right.shape[0])

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.sigma > self.tol_rank))

    @property
    def nonzero(self) -> np.ndarray:
        return self.sigma[: self.rank]

    def range_basis(self) -> np.ndarray:
        return self.left[:, : self.rank]

    def corange_basis(self) -> np.ndarray:
        """Orthonormal basis of ker(M)^perp (right singular vectors)."""
        return self.right[:, : self.rank]

    def kernel_basis(self) -> np.ndarray:
        return self.right[:, self.rank:]

    def cokernel_basis(self) -> np.ndarray:
        """Orthonormal basis of ran(M)^perp."""
        return self.left[:, self.rank:]

    def reconstruct(self) -> np.ndarray:
        d, n = self.shape
        p = len(self.sigma)
        return (self.left[:, :p] * self.sigma) @ self.right[:, :p].conj().T


def svd(M, tol_group: float | None = None) -> SVDFactorization:
    """Full singular value decomposition with multiplicity grouping.

    Singular values are nonnegative; each right singular vector is rotated
    so that its largest-modulus entry is real and positive, with the phase
    absorbed into the matching left vector.

    Parameters
    ----------
    M : (d, N) array_like
    tol_group : float, optional
        Absolute clustering tolerance.  Defaults to ``1e-8 * max(1, s_max)``.
    """
    A = as_matrix(M)
    tol = tolerances.current()
    d, n = A.shape
    if d == 0 or n == 0:
        return SVDFactorization(
            np.eye(d, dtype=complex), np.eye(n, dtype=complex), np.zeros(0), (), tol.rank_tol(0.0),
            tol.group_tol(0.0) if tol_group is None else tol_group,
        )
    try:
        u, s, vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"SVD did not converge: {exc}") from exc
    v = vh.conj().T
    p = len(s)
    # fix the phase freedom of each singular pair
    idx = np.argmax(np.abs(v), axis=0)
    piv = v[idx, np.arange(n)]
    absp = np.abs(piv)
    phase = np.ones(n, dtype=complex)
    phase[absp > 0] = piv[absp > 0] / absp[absp > 0]
    v = v * phase.conj()
    u = u.copy()
    u[:, :p] = u[:, :p] * phase[:p].conj()
    s_max = float(s[0]) if p else 0.0
    gtol = tol.group_tol(s_max) if tol_group is None else float(tol_group)
    return SVDFactorization(u, v, s, group_values(s, gtol), tol.rank_tol(s_max), gtol)


def numerical_rank(M) -> int:
    return svd(M).rank


@dataclasses.dataclass(frozen=True, eq=False)
class PolarParts:
    """``M = isometric @ modulus`` with ``ker(isometric) = ker(M)``."""

    isometric: np.ndarray
    modulus: np.ndarray


def polar_decompose(M) -> PolarParts:
    """Polar decomposition ``M = U |M|`` with the canonical partial isometry.

    ``U`` is obtained from the SVD by replacing every nonzero singular value
    by one, so it shares the kernel of ``M``.

    >>> import numpy as np
    >>> np.round(polar_decompose([[1.0, 1.0]]).isometric.real, 6)
    array([[0.707107, 0.707107]])
    """
    f = svd(M)
    r = f.rank
    g = f.corange_basis()
    U = f.range_basis() @ g.conj().T
    modulus = (g * f.sigma[:r]) @ g.conj().T
    return PolarParts(U, modulus)


def hs_norm(A) -> float:
    A = np.asarray(A)
    return float(np.sqrt(np.sum(A.real**2 + A.imag**2)))


def hs_distance(A, B) -> float:
    """Hilbert-Schmidt (Frobenius) distance between two matrices."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch: {A.shape} vs {B.shape}")
    return hs_norm(A - B)


def is_projection(P, tol: float | None = None) -> bool:
    P = as_matrix(P)
    if P.shape[0] != P.shape[1]:
        return False
    tol = tolerances.current().tol_unitary if tol is None else tol
    return hs_norm(P - P.conj().T) <= tol and hs_norm(P @ P - P) <= tol


def is_partial_isometry(M, tol: float | None = None) -> bool:
    """True iff ``M^* M`` is an orthogonal projection within ``tol``."""
    M = as_matrix(M)
    tol = tolerances.current().tol_unitary if tol is None else tol
    G = M.conj().T @ M
    return hs_norm(G @ G - G) <= tol


def _check_unitary(W: np.ndarray, tol: float) -> None:
    if W.shape[0] != W.shape[1]:
        raise DimensionError(f"expected a square matrix, got {W.shape}")
    resid = hs_norm(W.conj().T @ W - np.eye(W.shape[0]))
    if resid > tol:
        raise DomainError(f"matrix is not unitary (residual {resid:.3e} > {tol:.1e})")


def unitary_log(W) -> np.ndarray:
    """Principal logarithm of a unitary matrix.

    Returns a skew-Hermitian ``A`` with ``exp(A) = W`` whose eigenvalues are
    ``i*theta`` with ``theta`` in ``(-pi, pi]``.
    """
    W = as_matrix(W)
    _check_unitary(W, tolerances.current().tol_unitary)
    if W.shape[0] == 0:
        return W.copy()
    # W is normal, so its complex Schur form is diagonal
    T, Z = scipy.linalg.schur(W, output="complex")
    theta = np.angle(np.diag(T))
    theta = np.where(theta <= -np.pi, np.pi, theta)
    A = (Z * (1j * theta)) @ Z.conj().T
    return 0.5 * (A - A.conj().T)


def matrix_exp(A) -> np.ndarray:
    """Matrix exponential; exactly unitary output for skew-Hermitian input."""
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionError(f"expected a square matrix, got {A.shape}")
    if n == 0:
        return A.copy()
    if hs_norm(A + A.conj().T) <= 1e-12 * max(1.0, hs_norm(A)):
        H = -1j * A
        lam, Q = np.linalg.eigh(0.5 * (H + H.conj().T))
        return (Q * np.exp(1j * lam)) @ Q.conj().T
    return scipy.linalg.expm(A)


class SimultaneousSVD(NamedTuple):
    """Bases ``W`` (left) and ``V`` (right) diagonalizing both ``F`` and ``Y``.

    ``W^* F V`` is the rectangular diagonal of ``f_diag`` and ``W^* Y V``
    that of ``y_diag`` (entries in {-1, 0, 1}).
    """

    left: np.ndarray
    right: np.ndarray
    f_diag: np.ndarray
    y_diag: np.ndarray


def _rect_diag(D: np.ndarray) -> np.ndarray:
    p = min(D.shape)
    return D[np.arange(p), np.arange(p)]


def _offdiag_residual(D: np.ndarray) -> float:
    E = D.copy()
    p = min(D.shape)
    E[np.arange(p), np.arange(p)] = 1j * E[np.arange(p), np.arange(p)].imag
    return hs_norm(E)


def simultaneous_svd(F, Y) -> SimultaneousSVD:
    """Simultaneous SVD of a frame operator and a commuting partial isometry.

    Requires ``Y^* F = F^* Y`` and ``Y F^* = F Y^*``.  The construction
    writes ``A = F - Y`` in the singular bases of ``F``; commutation forces
    the off-diagonal blocks to vanish and the top-left block to be Hermitian
    and to commute with the singular values, so it is diagonalized inside
    each multiplicity cluster, while the kernel/cokernel block gets its own
    SVD.

    Raises
    ------
    PreconditionError
        If ``Y`` is not a partial isometry or the pair does not commute.
    NumericalInstabilityError
        If the resulting bases fail to diagonalize either operator.
    """
    F = as_matrix(F)
    Y = as_matrix(Y)
    if F.shape != Y.shape:
        raise DimensionError(f"shape mismatch: {F.shape} vs {Y.shape}")
    tol = tolerances.current()
    if not is_partial_isometry(Y, tol.tol_unitary):
        raise PreconditionError("Y is not a partial isometry")
    f_norm = hs_norm(F)
    ctol = tol.commute_tol(f_norm)
    res = max(hs_norm(Y.conj().T @ F - F.conj().T @ Y), hs_norm(Y @ F.conj().T - F @ Y.conj().T))
    if res > ctol:
        raise PreconditionError(f"Y and F do not commute (residual {res:.3e} > {ctol:.1e})")

    d, n = F.shape
    fs = svd(F)
    r = fs.rank
    P, Q = fs.left, fs.right
    M = P.conj().T @ (F - Y) @ Q
    B = M[:r, :r]
    E = M[r:, r:]

    R = np.zeros((r, r), dtype=complex)
    for g in group_values(fs.sigma[:r], fs.tol_group):
        sl = slice(g[0], g[-1] + 1)
        blk = B[sl, sl]
        _, vecs = np.linalg.eigh(0.5 * (blk + blk.conj().T))
        R[sl, sl] = vecs
    if E.size:
        try:
            x, _, zh = np.linalg.svd(E, full_matrices=True)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure(f"SVD did not converge: {exc}") from exc
        z = zh.conj().T
    else:
        x = np.eye(d - r, dtype=complex)
        z = np.eye(n - r, dtype=complex)

    W = P @ scipy.linalg.block_diag(R, x)
    V = Q @ scipy.linalg.block_diag(R, z)
    DF = W.conj().T @ F @ V
    DY = W.conj().T @ Y @ V
    f_diag = _rect_diag(DF).real
    y_raw = _rect_diag(DY).real
    y_diag = np.clip(np.rint(y_raw), -1, 1).astype(int)

    check = tol.tol_recon * max(1.0, f_norm)
    resid_f = _offdiag_residual(DF) + hs_norm(_rect_diag(DF).imag)
    resid_y = _offdiag_residual(DY) + hs_norm(_rect_diag(DY).imag) + hs_norm(y_raw - y_diag)
    if resid_f > check or resid_y > check:
        raise NumericalInstabilityError(
            f"simultaneous diagonalization failed (residuals {resid_f:.3e}, {resid_y:.3e})"
        )
    return SimultaneousSVD(W, V, f_diag, y_diag)


def submajorization_holds(x, y, tol: float = 0.0) -> bool:
    """Weak submajorization ``x <_w y``.

    Every partial sum of ``x`` sorted descending is at most the matching
    partial sum of ``y`` sorted descending, plus ``tol``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.shape} vs {y.shape}")
    cx = np.cumsum(np.sort(x)[::-1])
    cy = np.cumsum(np.sort(y)[::-1])
    return bool(np.all(cx <= cy + tol))
