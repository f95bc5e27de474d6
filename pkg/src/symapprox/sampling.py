"""Random unitaries and partial isometries for sampling-based checks.

Everything takes an explicit ``numpy.random.Generator`` so results are
reproducible for a fixed seed.  Batched variants return arrays with a
leading batch axis.
"""

from __future__ import annotations

import numpy as np


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _orthonormal_columns(G: np.ndarray) -> np.ndarray:
    # QR with the phase of R's diagonal moved into Q (Haar distributed)
    Q, R = np.linalg.qr(G)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    ph = np.where(np.abs(diag) > 0, diag / np.where(np.abs(diag) > 0, np.abs(diag), 1), 1)
    return Q * ph[..., None, :]


def random_unitary(n: int, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    shape = (n, n) if batch is None else (batch, n, n)
    if n == 0:
        return np.zeros(shape, dtype=complex)
    return _orthonormal_columns(_ginibre(rng, shape))


def random_isometry(n: int, m: int, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    """``n x m`` matrices with orthonormal columns (``m <= n``)."""
    shape = (n, m) if batch is None else (batch, n, m)
    if m == 0:
        return np.zeros(shape, dtype=complex)
    return _orthonormal_columns(_ginibre(rng, shape))


def random_partial_isometry(d: int, n: int, rank: int, rng: np.random.Generator,
                            batch: int | None = None) -> np.ndarray:
    if not 0 <= rank <= min(d, n):
        raise ValueError(f"rank {rank} impossible for a {d}x{n} matrix")
    A = random_isometry(d, rank, rng, batch)
    B = random_isometry(n, rank, rng, batch)
    return A @ np.conj(np.swapaxes(B, -1, -2))


def random_hermitian(n: int, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    shape = (n, n) if batch is None else (batch, n, n)
    G = _ginibre(rng, shape)
    return 0.5 * (G + np.conj(np.swapaxes(G, -1, -2)))


def small_unitary(n: int, scale, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    """``exp(i * scale * H)`` for random Hermitian ``H``; ``scale`` may be per-batch."""
    H = random_hermitian(n, rng, batch)
    lam, Q = np.linalg.eigh(H)
    scale = np.asarray(scale, dtype=float)
    if batch is not None and scale.ndim == 1:
        scale = scale[:, None]
    phases = np.exp(1j * scale * lam)
    return (Q * phases[..., None, :]) @ np.conj(np.swapaxes(Q, -1, -2))


def random_frame(d: int, n: int, rng: np.random.Generator, rank: int | None = None,
                 smax: float = 2.0) -> np.ndarray:
    """Random ``d x n`` synthesis matrix with singular values in ``(0, smax]``.

    ``rank`` defaults to ``min(d, n)``; lower ranks create kernel and
    cokernel directions.
    """
    p = min(d, n)
    rank = p if rank is None else rank
    s = np.zeros(p)
    s[:rank] = rng.uniform(0.0, smax, size=rank)
    s[:rank] = np.where(s[:rank] == 0.0, smax, s[:rank])
    U = random_unitary(d, rng)
    V = random_unitary(n, rng)
    S = np.zeros((d, n))
    S[np.arange(p), np.arange(p)] = s
    return U @ S @ V.conj().T


def sample_component(left: np.ndarray, right: np.ndarray, rank: int, center: np.ndarray,
                     count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` random partial isometries of the given rank, stacked.

    A third are uniformly random, a third are two-sided unitary
    perturbations of ``center`` at scales from ``1e-6`` to ``1``, and the
    rest pair random subsets of the columns of ``left`` and ``right`` (the
    singular bases of a reference frame) with random phases, then perturb
    them slightly.  All have rank ``rank`` exactly.
    """
    d, n = left.shape[0], right.shape[0]
    n_rand = count // 3
    n_pert = count // 3
    n_basis = count - n_rand - n_pert
    out = [random_partial_isometry(d, n, rank, rng, batch=n_rand)]

    scale = 10.0 ** rng.uniform(-6, 0, size=n_pert)
    out.append(small_unitary(d, scale, rng, n_pert) @ center @ small_unitary(n, scale, rng, n_pert))

    li = np.argsort(rng.random((n_basis, d)), axis=1)[:, :rank]
    ri = np.argsort(rng.random((n_basis, n)), axis=1)[:, :rank]
    aligned = rng.random(n_basis) < 0.5
    li[aligned] = np.sort(li[aligned], axis=1)
    ri[aligned] = np.sort(ri[aligned], axis=1)
    phase = np.exp(2j * np.pi * rng.random((n_basis, rank)))
    Ls = left.T[li]                 # (batch, rank, d)
    Rs = right.T[ri].conj()         # (batch, rank, n)
    X = np.einsum("bkd,bk,bkn->bdn", Ls, phase, Rs)
    eps = 10.0 ** rng.uniform(-8, -2, size=n_basis)
    out.append(small_unitary(d, eps, rng, n_basis) @ X @ small_unitary(n, eps, rng, n_basis))
    return np.concatenate(out, axis=0)
