"""Best Parseval approximations of a frame, per component and globally.

The Parseval frames quadratically close to a frame ``F`` split into
components labelled by ``k = rank F - rank X``.  This module computes

* the index set of nonempty components (:func:`component_report`),
* a closed-form minimizer of ``||F - X||_HS`` within one component and the
  shape of the minimizer family (:func:`approx_in_component`),
* the minimal squared distance to every component
  (:func:`distance_to_component`) and the overall best approximation with
  tie detection (:func:`global_approx`),
* explicit unitaries relating two frames of the same component together
  with a path between them (:func:`connect`).

Every minimizer has the form ``U (I - E)`` or ``U + S`` where ``F = U |F|``
is the polar decomposition, ``E`` projects onto right singular vectors of
the smallest nonzero singular values and ``S`` maps kernel directions of
``F`` onto directions orthogonal to its range.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import diagonal, sampling, tolerances
from .diagonal import INF, DiagonalModel
from .errors import (
    ComponentMismatchError,
    DimensionError,
    DomainError,
    InfeasibleComponentError,
    NumericalInstabilityError,
)
from .frames import Frame, ParsevalFrame, as_frame, as_parseval, component_of
from .linalg import SVDFactorization, hs_distance, hs_norm, matrix_exp, svd, unitary_log

__all__ = [
    "ComponentReport",
    "ApproximationResult",
    "ConnectionCertificate",
    "component_report",
    "approx_in_component",
    "distance_to_component",
    "global_approx",
    "global_diagonal",
    "connect",
    "verify_critical_point",
    "gap_check",
    "enumerate_family",
    "HALF_BOUNDARY_NOTE",
    "CRITERION_NOTE",
]

HALF_BOUNDARY_NOTE = (
    "boundary singular value 1/2: adjacent components tie; "
    "uniqueness classified by enumerating tied components"
)
CRITERION_NOTE = (
    "the criterion #{j : s_j = 1/2} <= 1 holds, yet the minimizer is not unique"
)


def _boundary_notes(halves: int, n_tied: int) -> tuple:
    if n_tied < 2:
        return ()
    return (HALF_BOUNDARY_NOTE, CRITERION_NOTE) if halves <= 1 else (HALF_BOUNDARY_NOTE,)


@dataclasses.dataclass(frozen=True)
class ComponentReport:
    """Dimensions of kernel, range and cokernel and the resulting index set.

    ``lower = -min(n1, n3)`` and ``upper = n2``; either may be infinite for
    a :class:`~symapprox.diagonal.DiagonalModel`.  ``nonempty`` is False when
    no Parseval frame is quadratically close to the input at all.
    """

    n1: int | float
    n2: int | float
    n3: int | float
    lower: int | float
    upper: int | float
    nonempty: bool = True

    def __contains__(self, k) -> bool:
        return self.nonempty and self.lower <= k <= self.upper

    def indices(self, window: int | None = None) -> list:
        """Indices in the set, clipped to ``[-window, window]`` when infinite."""
        if not self.nonempty:
            return []
        lo, hi = self.lower, self.upper
        if window is not None:
            lo, hi = max(lo, -window), min(hi, window)
        elif math.isinf(lo) or math.isinf(hi):
            raise DomainError("index set is infinite; pass a window")
        return list(range(int(lo), int(hi) + 1))

    def check(self, k: int) -> None:
        if not self.nonempty:
            raise DomainError("no Parseval frame is quadratically close to this model")
        if k not in self:
            raise InfeasibleComponentError(k, self.lower, self.upper)


@dataclasses.dataclass(frozen=True, eq=False)
class ApproximationResult:
    """A best approximation in component ``k`` and the family it belongs to.

    ``uniqueness`` is ``"unique"``, ``"finitelyMany"`` or ``"infinitelyMany"``
    with ``count`` the number of minimizers (``inf`` for a continuum).
    ``family`` describes the free choices; for ``k < 0`` it also carries the
    number ``diagonal_count`` of minimizers diagonal in the singular bases.

    Global results also set ``r`` (number of nonzero singular values
    ``<= 1/2``), ``boundary`` (some value was snapped to 1/2), ``tied``
    (the per-component results attaining the minimum) and ``notes``.
    """

    k: int
    minimizer: ParsevalFrame
    squared_distance: float
    uniqueness: str
    count: int | float
    family: dict
    flags: tuple = ()
    r: int | None = None
    boundary: bool = False
    tied: tuple = ()
    notes: tuple = ()

    @property
    def tied_components(self) -> tuple:
        return tuple(t.k for t in self.tied)


@dataclasses.dataclass(frozen=True, eq=False)
class ConnectionCertificate:
    """Unitaries with ``x = v y w^*`` and a sampled path from ``x`` to ``y``.

    The path is ``gamma(t) = exp(-t A) x exp(t B)`` with ``(A, B)`` the
    skew-Hermitian ``generators``, ``exp(A) = v`` and ``exp(B) = w``, so
    ``gamma(0) = x`` and ``gamma(1) = y``.
    """

    k: int
    v: np.ndarray
    w: np.ndarray
    generators: tuple
    samples: tuple
    residual: float
    path_residual: float
    endpoint_residual: float


# -- component index set ------------------------------------------------------

def component_report(f) -> ComponentReport:
    """Index set ``[-min(n1, n3), n2]`` of the components near ``f``.

    For a ``d x N`` frame ``n1 = N - rank``, ``n2 = rank``, ``n3 = d - rank``.
    For a diagonal model the dimensions come from its fields; a model with
    divergent ``sum (a_i - 1)^2`` has no nearby Parseval frame.

    Examples
    --------
    >>> component_report([[0.4, 0], [0, 0.6]]).indices()
    [0, 1, 2]
    """
    if isinstance(f, DiagonalModel):
        n1, n2, n3 = f.kernel_dim, f.rank, f.cokernel_dim
        nonempty = f.tail_converges
    else:
        F = as_frame(f).synthesis
        d, n = F.shape
        r = svd(F).rank
        n1, n2, n3 = n - r, r, d - r
        nonempty = True
    return ComponentReport(n1, n2, n3, -min(n1, n3), n2, nonempty)


# -- per-component minimizers -------------------------------------------------

@dataclasses.dataclass(frozen=True)
class _Selection:
    chosen: tuple      # svd indices zeroed out, ascending by value
    below: tuple       # indices with value below the threshold group
    at: tuple          # indices of the threshold group, ascending by value
    threshold: float
    ambiguous: bool


def _select_lowest(fs: SVDFactorization, k: int) -> _Selection:
    # the k smallest nonzero singular values, grouped under tol_group
    r = fs.rank
    groups = [g for g in (tuple(i for i in grp if i < r) for grp in fs.groups) if g]
    pos = r - k
    gi = next(i for i, g in enumerate(groups) if pos in g)
    at = tuple(reversed(groups[gi]))
    below = tuple(i for g in groups[gi + 1:] for i in g)
    need = k - len(below)
    chosen = tuple(reversed(below)) + at[:need]
    s = fs.sigma
    ambiguous = False
    tol = fs.tol_group
    if gi > 0 and s[groups[gi - 1][-1]] - s[groups[gi][0]] <= tol:
        ambiguous = True
    if gi + 1 < len(groups) and s[groups[gi][-1]] - s[groups[gi + 1][0]] <= tol:
        ambiguous = True
    return _Selection(chosen, below, at, float(s[pos]), ambiguous)


def _feasible(f, k: int):
    f = as_frame(f)
    if isinstance(k, bool) or int(k) != k:
        raise DomainError(f"component index must be an integer, got {k!r}")
    k = int(k)
    fs = svd(f.synthesis)
    d, n = f.shape
    r = fs.rank
    rep = ComponentReport(n - r, r, d - r, -min(n - r, d - r), r)
    rep.check(k)
    return f, fs, k


def _distance_from_svd(fs: SVDFactorization, k: int) -> float:
    s = fs.nonzero
    if k <= 0:
        return math.fsum((s - 1.0) ** 2) + (-k)
    chosen = set(_select_lowest(fs, k).chosen)
    terms = [x * x if i in chosen else (x - 1.0) ** 2 for i, x in enumerate(s)]
    return math.fsum(terms)


def distance_to_component(f, k: int) -> float:
    """Squared HS distance from ``f`` to the closest frame in component ``k``.

    ``sum (s_i - 1)^2`` over nonzero singular values, plus ``-k`` when
    ``k < 0``; for ``k > 0`` the ``k`` smallest values contribute ``s_i^2``
    instead of ``(s_i - 1)^2``.

    Raises
    ------
    InfeasibleComponentError
        If ``k`` is outside the index set.
    """
    _, fs, k = _feasible(f, k)
    return _distance_from_svd(fs, k)


def verify_critical_point(f, y) -> float:
    """``max(||Y^* F - F^* Y||, ||Y F^* - F Y^*||)`` in HS norm.

    Vanishes at every local minimizer of the distance to ``F``.
    """
    F = as_frame(f).synthesis
    Y = as_parseval(y).synthesis
    if F.shape != Y.shape:
        raise DimensionError(f"shape mismatch: {F.shape} vs {Y.shape}")
    a = Y.conj().T @ F
    b = Y @ F.conj().T
    return max(hs_norm(a - a.conj().T), hs_norm(b - b.conj().T))


def _check_result(f: Frame, k: int, Y: np.ndarray, value: float) -> None:
    tol = tolerances.current()
    if component_of(Y, f) != k:
        raise NumericalInstabilityError(f"minimizer for k={k} landed in another component")
    direct = hs_distance(f.synthesis, Y) ** 2
    if abs(direct - value) > 1e-9 * max(1.0, value):
        raise NumericalInstabilityError(f"closed-form distance {value} differs from direct {direct}")
    f_norm = float(np.linalg.norm(f.synthesis, 2))
    if verify_critical_point(f, Y) > tol.commute_tol(f_norm):
        raise NumericalInstabilityError("minimizer fails the commutation test")


def approx_in_component(f, k: int, check: bool = True) -> ApproximationResult:
    """Closest Parseval frame to ``f`` among those with ``rank F - rank X = k``.

    * ``k = 0``: the canonical Parseval frame ``U``, the unique minimizer.
    * ``k < 0``: ``U + S`` with ``S = C K^*`` mapping the first ``-k`` kernel
      vectors ``K`` of ``F`` onto the first ``-k`` vectors ``C`` orthogonal
      to its range.  Any rank ``-k`` partial isometry from ``ker F`` into
      ``ran(F)^perp`` works, so the family is a continuum.
    * ``k > 0``: ``U (I - E0 - E1)``.  ``E0`` projects onto the right
      singular vectors of values strictly below the ``k``-th smallest
      nonzero value ``t``; ``E1`` projects onto the first ``k - rank E0``
      vectors of the ``t``-eigenspace in ascending order.  Unique exactly
      when that eigenspace has dimension ``k - rank E0``.

    Parameters
    ----------
    f : Frame or array_like
    k : int
    check : bool
        Re-verify component membership, the distance formula and the
        commutation condition; raises ``NumericalInstabilityError`` if one
        fails.

    Raises
    ------
    InfeasibleComponentError
        If ``k`` is outside ``[-min(n1, n3), n2]``.
    """
    f, fs, k = _feasible(f, k)
    r = fs.rank
    U = fs.range_basis() @ fs.corange_basis().conj().T
    flags = ()
    if k == 0:
        Y = U
        uniqueness, count, family = "unique", 1, {}
    elif k < 0:
        m = -k
        K = fs.kernel_basis()
        C = fs.cokernel_basis()
        Y = U + C[:, :m] @ K[:, :m].conj().T
        n1 = K.shape[1]
        uniqueness, count = "infinitelyMany", INF
        family = {
            "kernel_basis": K,
            "cokernel_basis": C,
            "rank": m,
            "diagonal_count": 2**m * math.comb(n1, m),
        }
    else:
        sel = _select_lowest(fs, k)
        keep = [i for i in range(r) if i not in set(sel.chosen)]
        Y = fs.left[:, keep] @ fs.right[:, keep].conj().T
        g = fs.right
        E0 = g[:, list(sel.below)] @ g[:, list(sel.below)].conj().T
        need = k - len(sel.below)
        unique = len(sel.below) + len(sel.at) == k
        uniqueness, count = ("unique", 1) if unique else ("infinitelyMany", INF)
        family = {
            "E0": E0,
            "eigenspace_basis": g[:, list(sel.at)],
            "E1_rank": need,
            "threshold": sel.threshold,
            "diagonal_count": math.comb(len(sel.at), need),
        }
        if sel.ambiguous:
            flags = ("group_boundary_ambiguous",)
    value = _distance_from_svd(fs, k)
    if check:
        _check_result(f, k, Y, value)
    return ApproximationResult(k, ParsevalFrame(Y), value, uniqueness, count, family, flags)


# -- global approximation -----------------------------------------------------

def _snapped_distances(s: np.ndarray, ks, half_tol: float):
    snapped = np.where(np.abs(s - 0.5) <= half_tol, 0.5, s)
    asc = np.sort(snapped)
    out = {}
    for k in ks:
        if k <= 0:
            out[k] = math.fsum((asc - 1.0) ** 2) + (-k)
        else:
            out[k] = math.fsum(asc[:k] ** 2) + math.fsum((asc[k:] - 1.0) ** 2)
    return snapped, out


def global_approx(f, check: bool = True) -> ApproximationResult:
    """Closest Parseval frame to ``f`` over all components.

    ``r`` counts nonzero singular values ``<= 1/2`` (values within
    ``tol_half`` of 1/2 count as exactly 1/2 and set ``boundary``).  Every
    component is scanned; those within ``tol_tie`` of the minimum are all
    reported in ``tied`` and uniqueness is decided from them.  The returned
    representative is the raw minimizer, preferring component ``r`` on an
    exact tie.

    Examples
    --------
    >>> res = global_approx([[0.4, 0], [0, 0.6]])
    >>> res.k, round(res.squared_distance, 12), res.uniqueness
    (1, 0.32, 'unique')
    """
    f = as_frame(f)
    tol = tolerances.current()
    fs = svd(f.synthesis)
    rep = component_report(f)
    ks = rep.indices()
    s = fs.nonzero
    snapped, dsnap = _snapped_distances(s, ks, tol.tol_half)
    boundary = bool(np.any(np.abs(s - 0.5) <= tol.tol_half))
    r = int(np.count_nonzero(snapped <= 0.5))
    draw = {k: _distance_from_svd(fs, k) for k in ks}
    best = min(dsnap.values())
    tie_tol = tol.tol_tie * max(1.0, f.shape[0] ** 2)
    tied_ks = [k for k in ks if dsnap[k] - best <= tie_tol * max(1.0, best)]
    k_star = min(ks, key=lambda k: (draw[k], k != r, abs(k - r)))
    if k_star not in tied_ks:
        tied_ks = sorted(tied_ks + [k_star])
    tied = tuple(approx_in_component(f, k, check=check) for k in tied_ks)
    main = next(t for t in tied if t.k == k_star)
    if any(t.count == INF for t in tied):
        uniqueness, count = "infinitelyMany", INF
    elif len(tied) == 1:
        uniqueness, count = main.uniqueness, main.count
    else:
        uniqueness, count = "finitelyMany", sum(t.count for t in tied)
    halves = int(np.count_nonzero(snapped == 0.5))
    notes = _boundary_notes(halves, len(tied)) if boundary else ()
    flags = list(main.flags)
    if boundary:
        flags.append("half_boundary")
    if len(tied) > 1:
        flags.append("tie")
    return dataclasses.replace(
        main,
        squared_distance=draw[k_star],
        uniqueness=uniqueness,
        count=count,
        flags=tuple(flags),
        r=r,
        boundary=boundary,
        tied=tied,
        notes=notes,
    )


@dataclasses.dataclass(frozen=True)
class DiagonalGlobal:
    """Global minimization over sign sequences of a diagonal model."""

    r: int | float
    value: float
    tied: tuple          # component indices attaining the minimum
    families: dict       # k -> MinimizerFamily for the tied components
    uniqueness: str
    count: int | float
    boundary: bool
    notes: tuple


def global_diagonal(model, limit: int | None = None) -> DiagonalGlobal:
    """Best sign sequence over all indices for a finite-explicit diagonal model.

    Only components ``k`` with ``-n1 <= k <= r + 1`` can compete: further
    negative ``k`` add one per step and further positive ``k`` add
    ``2 s - 1 > 0`` per step.
    """
    if not isinstance(model, DiagonalModel):
        model = DiagonalModel.from_sequence(model)
    if not model.tail_converges:
        raise DomainError("sum (a_i - 1)^2 diverges: no sign sequence has finite objective")
    tol = tolerances.current()
    a = np.array([x for x in model.exceptional if x > 0])
    snapped = np.where(np.abs(a - 0.5) <= tol.tol_half, 0.5, a)
    r = int(np.count_nonzero(snapped <= 0.5))
    boundary = bool(np.any(np.abs(a - 0.5) <= tol.tol_half))
    lo = max(-1, -model.kernel_dim) if model.kernel_dim != INF else -1
    hi = min(r + 1, model.rank)
    values = {}
    fams = {}
    for k in range(int(lo), int(hi) + 1):
        fam = diagonal.minimize_k(model, k, limit)
        if fam.kind != "none":
            fams[k] = fam
            values[k] = fam.value
    best = min(values.values())
    tie_tol = tol.tol_tie * max(1.0, best)
    tied = tuple(k for k in sorted(values) if values[k] - best <= tie_tol)
    total = sum(fams[k].count for k in tied)
    if total == INF:
        uniqueness = "infinitelyMany"
    else:
        uniqueness = "unique" if total == 1 else "finitelyMany"
    halves = int(np.count_nonzero(snapped == 0.5))
    notes = _boundary_notes(halves, len(tied)) if boundary else ()
    return DiagonalGlobal(r, best, tied, {k: fams[k] for k in tied}, uniqueness, total, boundary, notes)


# -- connectivity -------------------------------------------------------------

def _align(dst: np.ndarray, src: np.ndarray) -> np.ndarray:
    # dst Omega src^* with Omega the unitary polar factor of dst^* src
    if src.shape[1] == 0:
        return np.zeros((dst.shape[0], src.shape[0]), dtype=complex)
    a, _, bh = np.linalg.svd(dst.conj().T @ src)
    return dst @ (a @ bh) @ src.conj().T


def connect(x, y, f=None, samples: int = 5) -> ConnectionCertificate:
    """Unitaries ``v``, ``w`` with ``x = v y w^*`` for frames of one component.

    ``w`` carries the initial space of ``y`` onto that of ``x`` through the
    closest unitary between chosen bases, and kernels onto kernels; ``v``
    then matches the final spaces.  When ``x = y`` both are the identity.

    Parameters
    ----------
    x, y : ParsevalFrame or array_like
    f : Frame, optional
        Reference frame for the component labels.  Without it the ranks of
        ``x`` and ``y`` are compared, which is equivalent.
    samples : int
        Number of equally spaced path points, endpoints included.

    Raises
    ------
    ComponentMismatchError
        If ``x`` and ``y`` are in different components.
    """
    X = as_parseval(x).synthesis
    Y = as_parseval(y).synthesis
    if X.shape != Y.shape:
        raise DimensionError(f"shape mismatch: {X.shape} vs {Y.shape}")
    sx, sy = svd(X), svd(Y)
    if f is not None:
        kx, ky = component_of(X, f), component_of(Y, f)
    else:
        kx, ky = -sx.rank, -sy.rank
    if kx != ky:
        raise ComponentMismatchError(kx, ky)
    if samples < 2:
        raise DomainError("need at least two path samples")

    bx, by = sx.corange_basis(), sy.corange_basis()
    w = _align(bx, by) + _align(sx.kernel_basis(), sy.kernel_basis())
    # w maps by onto bx @ omega; v must send y @ by to x @ bx @ omega
    mapped = w @ by
    v = (X @ mapped) @ (Y @ by).conj().T + _align(sx.cokernel_basis(), sy.cokernel_basis())
    if hs_distance(X, Y) == 0.0:
        v = np.eye(X.shape[0], dtype=complex)
        w = np.eye(X.shape[1], dtype=complex)
    residual = hs_distance(X, v @ Y @ w.conj().T)
    A, B = unitary_log(v), unitary_log(w)
    pts = []
    path_res = 0.0
    for t in np.linspace(0.0, 1.0, samples):
        G = matrix_exp(-t * A) @ X @ matrix_exp(t * B)
        P = G.conj().T @ G
        path_res = max(path_res, hs_norm(P @ P - P))
        pts.append((float(t), G))
    end_res = hs_distance(pts[-1][1], Y)
    return ConnectionCertificate(kx, v, w, (A, B), tuple(pts), residual, path_res, end_res)


# -- sampling checks ----------------------------------------------------------

def gap_check(f, trials: int = 100, seed: int = 0) -> float:
    """Smallest sampled HS distance between Parseval frames of distinct components.

    Pairs are drawn both at random and adversarially: two frames sharing
    all but a few singular directions, then independently perturbed.
    """
    f = as_frame(f)
    rep = component_report(f)
    ks = rep.indices()
    if len(ks) < 2:
        raise DomainError("index set has fewer than two components")
    rng = np.random.default_rng(seed)
    d, n = f.shape
    rank_f = rep.n2
    best = math.inf
    for _ in range(trials):
        k1, k2 = rng.choice(ks, size=2, replace=False)
        r1, r2 = rank_f - int(k1), rank_f - int(k2)
        top = max(r1, r2)
        P = sampling.random_isometry(d, top, rng)
        Q = sampling.random_isometry(n, top, rng)
        X1 = P[:, :r1] @ Q[:, :r1].conj().T
        X2 = P[:, :r2] @ Q[:, :r2].conj().T
        eps = rng.uniform(0.0, 0.3, size=2)
        X2 = sampling.small_unitary(d, eps[0], rng) @ X2 @ sampling.small_unitary(n, eps[1], rng)
        best = min(best, hs_distance(X1, X2))
        Z = sampling.random_partial_isometry(d, n, r2, rng)
        best = min(best, hs_distance(X1, Z))
    return best


def enumerate_family(result: ApproximationResult, f, limit: int, seed: int = 0) -> list:
    """Up to ``limit`` minimizers from the family of ``result``.

    The first entry is always the representative itself.  Further members
    of a continuum are drawn with ``numpy.random.default_rng(seed)``:
    random rank ``-k`` partial isometries between kernel and cokernel for
    ``k < 0``, random ``E1`` inside the threshold eigenspace for ``k > 0``.
    For a global result the tied components are visited in turn.
    """
    f = as_frame(f)
    rng = np.random.default_rng(seed)
    members = result.tied if result.tied else (result,)
    pools = [[(m.k, m.minimizer.synthesis)] for m in members]
    fs = svd(f.synthesis)
    U = fs.range_basis() @ fs.corange_basis().conj().T
    for pool, m in zip(pools, members):
        if m.count != INF:
            continue
        fam = m.family
        for _ in range(max(0, limit - 1)):
            if m.k < 0:
                K, C, rank = fam["kernel_basis"], fam["cokernel_basis"], fam["rank"]
                A = sampling.random_isometry(C.shape[1], rank, rng)
                B = sampling.random_isometry(K.shape[1], rank, rng)
                Y = U + C @ A @ B.conj().T @ K.conj().T
            else:
                G = fam["eigenspace_basis"]
                Q = G @ sampling.random_isometry(G.shape[1], fam["E1_rank"], rng)
                E = fam["E0"] + Q @ Q.conj().T
                Y = U - U @ E
            pool.append((m.k, Y))
    out = []
    for i in range(max(len(p) for p in pools)):
        out.extend(p[i] for p in pools if i < len(p))
    return out[:limit]
