"""Sequence-level optimization behind every closed-form minimizer.

A nonnegative sequence ``a`` (the singular values of a diagonal frame,
zeros marking kernel directions) is approximated by sign sequences
``b in {-1, 0, 1}`` with the index

    j(a, b) = #{i : b_i = 0, a_i > 0} - #{i : b_i != 0, a_i = 0}

held fixed at ``k``.  :func:`minimize_k` gives all minimizers of
``sum (a_i - b_i)^2`` in closed form; :func:`brute_force_oracle` finds them
by exhaustive enumeration for short finite sequences.

Infinite sequences are described by a :class:`DiagonalModel`: finitely many
explicit entries, then a (possibly infinite) run of zeros and a (possibly
infinite) run of ones.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import DomainError, InfeasibleComponentError, ResourceLimitError

__all__ = [
    "INF",
    "DiagonalModel",
    "SignSequence",
    "MinimizerFamily",
    "seq_index",
    "objective",
    "minimize_k",
    "brute_force_oracle",
    "brute_force_all",
    "model_index_bounds",
    "MAX_ORACLE_LENGTH",
]

INF = math.inf
MAX_ORACLE_LENGTH = 12
# representatives listed for an infinite family when no limit is given
DEFAULT_SAMPLE = 16
# hard cap on representatives listed for a finite family
MAX_LISTED = 200_000


def _extended_natural(x, name: str):
    if x == INF:
        return INF
    if isinstance(x, bool) or int(x) != x or x < 0:
        raise DomainError(f"{name} must be a natural number or infinity, got {x!r}")
    return int(x)


def _sorted_sum(terms) -> float:
    acc = 0.0
    for t in sorted(terms):
        acc += t
    return acc


@dataclasses.dataclass(frozen=True)
class DiagonalModel:
    """A diagonal frame operator described by its sequence of singular values.

    Parameters
    ----------
    exceptional : sequence of float
        Explicit entries ``a_0, ..., a_{m-1}`` (nonnegative, may contain zeros).
    tail_ones : int or INF
        Number of further entries equal to one.
    kernel_dim : int or INF, optional
        Total number of zero entries ``n1``, explicit zeros included.
        Defaults to the number of explicit zeros.
    cokernel_dim : int or INF, optional
        ``n3 = dim ran(F)^perp``.  Defaults to ``kernel_dim`` (a square
        diagonal operator).
    tail_converges : bool
        Declares ``sum_{a_i != 0} (a_i - 1)^2 < inf``.  When False no sign
        sequence has finite objective and optimization is refused.
    """

    exceptional: tuple
    tail_ones: int | float = 0
    kernel_dim: int | float | None = None
    cokernel_dim: int | float | None = None
    tail_converges: bool = True

    def __post_init__(self):
        a = tuple(float(x) for x in self.exceptional)
        if not all(math.isfinite(x) and x >= 0 for x in a):
            raise DomainError("exceptional entries must be finite and nonnegative")
        object.__setattr__(self, "exceptional", a)
        object.__setattr__(self, "tail_ones", _extended_natural(self.tail_ones, "tail_ones"))
        zeros = sum(1 for x in a if x == 0)
        n1 = zeros if self.kernel_dim is None else _extended_natural(self.kernel_dim, "kernel_dim")
        if n1 < zeros:
            raise DomainError(f"kernel_dim={n1} is smaller than the {zeros} explicit zeros")
        object.__setattr__(self, "kernel_dim", n1)
        n3 = n1 if self.cokernel_dim is None else _extended_natural(self.cokernel_dim, "cokernel_dim")
        object.__setattr__(self, "cokernel_dim", n3)

    @classmethod
    def from_sequence(cls, a) -> "DiagonalModel":
        return cls(tuple(a))

    @property
    def explicit_zeros(self) -> int:
        return sum(1 for x in self.exceptional if x == 0)

    @property
    def implicit_zeros(self):
        return self.kernel_dim - self.explicit_zeros

    @property
    def rank(self):
        return sum(1 for x in self.exceptional if x > 0) + self.tail_ones

    @property
    def is_finite(self) -> bool:
        return self.tail_ones != INF and self.kernel_dim != INF

    def materialize(self) -> np.ndarray:
        """Full sequence: explicit entries, implicit zeros, then tail ones."""
        if not self.is_finite:
            raise DomainError("cannot materialize an infinite model")
        return np.array(
            self.exceptional + (0.0,) * self.implicit_zeros + (1.0,) * self.tail_ones, dtype=float
        )


@dataclasses.dataclass(frozen=True)
class SignSequence:
    """A sign sequence that differs from the default rule at finitely many places.

    ``values`` covers the explicit entries of the model.  ``kernel_values``
    covers the leading implicit zero entries (the rest are 0) and
    ``tail_values`` the leading tail ones (the rest are +1).
    """

    values: tuple
    kernel_values: tuple = ()
    tail_values: tuple = ()

    def __post_init__(self):
        for name in ("values", "kernel_values", "tail_values"):
            v = tuple(int(x) for x in getattr(self, name))
            if any(x not in (-1, 0, 1) for x in v):
                raise DomainError(f"{name} must lie in {{-1, 0, 1}}")
            object.__setattr__(self, name, v)

    def as_array(self, model: DiagonalModel) -> np.ndarray:
        """The full sequence aligned with :meth:`DiagonalModel.materialize`."""
        _check_alignment(model, self)
        kz = self.kernel_values + (0,) * (model.implicit_zeros - len(self.kernel_values))
        tl = self.tail_values + (1,) * (model.tail_ones - len(self.tail_values))
        return np.array(self.values + kz + tl, dtype=int)


@dataclasses.dataclass(frozen=True)
class MinimizerFamily:
    """All minimizers of the objective inside one index class.

    ``kind`` is ``"unique"``, ``"finite"``, ``"infinite"`` or ``"none"``;
    ``count`` is exact (``INF`` for infinite families) and
    ``representatives`` lists every minimizer of a finite family, or a
    deterministic sample of an infinite one.  ``choices`` describes the
    free choices generating the family.
    """

    kind: str
    representatives: tuple
    count: int | float
    value: float
    choices: dict = dataclasses.field(default_factory=dict)


def _check_alignment(model: DiagonalModel, b: SignSequence) -> None:
    if len(b.values) != len(model.exceptional):
        raise DomainError(
            f"sign sequence has {len(b.values)} explicit entries, model has {len(model.exceptional)}"
        )
    if len(b.kernel_values) > model.implicit_zeros:
        raise DomainError("sign sequence addresses more kernel positions than the model has")
    if len(b.tail_values) > model.tail_ones:
        raise DomainError("sign sequence addresses more tail positions than the model has")
    if not model.tail_converges:
        raise DomainError("sum (a_i - 1)^2 diverges: every sign sequence has infinite objective")


def seq_index(model: DiagonalModel, b: SignSequence) -> int:
    """``#{b_i = 0, a_i > 0} - #{b_i != 0, a_i = 0}``.

    Finite because ``b`` departs from the default rule (``+1`` on the
    tail of ones, ``0`` on implicit zeros) at finitely many positions.
    """
    if not isinstance(model, DiagonalModel):
        model = DiagonalModel.from_sequence(model)
    _check_alignment(model, b)
    j = 0
    for x, y in zip(model.exceptional, b.values):
        if y == 0 and x > 0:
            j += 1
        elif y != 0 and x == 0:
            j -= 1
    j -= sum(1 for y in b.kernel_values if y != 0)
    j += sum(1 for y in b.tail_values if y == 0)
    return j


def objective(model: DiagonalModel, b: SignSequence) -> float:
    """``sum (a_i - b_i)^2``, summed over the sorted terms."""
    if not isinstance(model, DiagonalModel):
        model = DiagonalModel.from_sequence(model)
    _check_alignment(model, b)
    terms = [(x - y) * (x - y) for x, y in zip(model.exceptional, b.values)]
    terms += [float(y * y) for y in b.kernel_values]
    terms += [float((1 - y) * (1 - y)) for y in b.tail_values]
    return _sorted_sum(terms)


def model_index_bounds(model: DiagonalModel) -> tuple:
    """Bounds ``(-#zeros, #nonzeros)`` on the index of a sign sequence."""
    if not isinstance(model, DiagonalModel):
        model = DiagonalModel.from_sequence(model)
    return (-model.kernel_dim, model.rank)


def _baseline(model: DiagonalModel) -> list:
    return [1 if x > 0 else 0 for x in model.exceptional]


def _count(n, m: int):
    return INF if n == INF else math.comb(n, m)


def _take(it: Iterator, limit):
    return tuple(itertools.islice(it, limit)) if limit is not None else tuple(it)


def _negative(model: DiagonalModel, m: int):
    # m = -k sign flips placed on zero entries
    explicit = [("e", i) for i, x in enumerate(model.exceptional) if x == 0]
    n_implicit = model.implicit_zeros
    sample_implicit = n_implicit if n_implicit != INF else m + 1
    positions = explicit + [("k", j) for j in range(sample_implicit)]
    base = _baseline(model)

    def gen():
        for chosen in itertools.combinations(positions, m):
            for signs in itertools.product((1, -1), repeat=m):
                values = list(base)
                kernel = []
                for (where, i), s in zip(chosen, signs):
                    if where == "e":
                        values[i] = s
                    else:
                        kernel.extend([0] * (i + 1 - len(kernel)))
                        kernel[i] = s
                yield SignSequence(tuple(values), tuple(kernel))

    count = INF if model.kernel_dim == INF else 2 ** m * math.comb(model.kernel_dim, m)
    return count, gen(), {"choose": m, "among": "zero entries", "zeros": model.kernel_dim, "signs": "+-1"}


def _kth_lowest(model: DiagonalModel, k: int):
    nz = sorted(x for x in model.exceptional if x > 0)
    below = [x for x in nz if x < 1]
    ones = sum(1 for x in nz if x == 1) + model.tail_ones
    above = [x for x in nz if x > 1]
    if k <= len(below):
        return below[k - 1]
    if k <= len(below) + ones:
        return 1.0
    rest = k - len(below) - ones
    if rest <= len(above):
        return above[rest - 1]
    return None


def _positive(model: DiagonalModel, k: int):
    t = _kth_lowest(model, k)
    if t is None:
        return None
    lower = [i for i, x in enumerate(model.exceptional) if 0 < x < t]
    ties = [i for i, x in enumerate(model.exceptional) if x == t]
    tail_in_lower = t > 1  # then the tail is finite and lies entirely below t
    n_tail_lower = model.tail_ones if tail_in_lower else 0
    n_tail_ties = model.tail_ones if t == 1 else 0
    n_lower = len(lower) + n_tail_lower
    n_ties = len(ties) + n_tail_ties
    need = k - n_lower
    count = _count(n_ties, need)
    sample_tail = n_tail_ties if n_tail_ties != INF else need + 1
    tie_positions = [("e", i) for i in ties] + [("t", j) for j in range(sample_tail)]
    base = _baseline(model)
    for i in lower:
        base[i] = 0

    def gen():
        for chosen in itertools.combinations(tie_positions, need):
            values = list(base)
            tail = [0] * n_tail_lower
            for where, i in chosen:
                if where == "e":
                    values[i] = 0
                else:
                    tail.extend([1] * (i + 1 - len(tail)))
                    tail[i] = 0
            yield SignSequence(tuple(values), (), tuple(tail))

    choices = {"threshold": t, "below_threshold": n_lower, "at_threshold": n_ties, "choose": need}
    return count, gen(), choices


def minimize_k(model, k: int, limit: int | None = None) -> MinimizerFamily:
    """All minimizers of ``sum (a_i - b_i)^2`` among sign sequences of index ``k``.

    * ``k = 0``: unique minimizer, ``b_i = 1`` on nonzero entries and 0 on zeros.
    * ``k < 0``: additionally ``-k`` zero entries get a sign ``+-1``;
      ``2^{-k} C(#zeros, -k)`` minimizers, infinitely many if the kernel is infinite.
    * ``k > 0``: the ``k`` smallest nonzero entries are set to 0; several
      minimizers exist exactly when the ``k``-th smallest value is tied.

    Parameters
    ----------
    model : DiagonalModel or sequence of float
    k : int
    limit : int, optional
        Maximum number of representatives listed.  By default every member
        of a finite family is listed and a sample of an infinite one.

    Raises
    ------
    InfeasibleComponentError
        If ``k`` lies outside ``[-#zeros, #nonzeros]``.
    DomainError
        If the model declares a divergent tail.
    """
    if not isinstance(model, DiagonalModel):
        model = DiagonalModel.from_sequence(model)
    if not model.tail_converges:
        raise DomainError("sum (a_i - 1)^2 diverges: no sign sequence has finite objective")
    lower, upper = model_index_bounds(model)
    if not lower <= k <= upper:
        raise InfeasibleComponentError(k, lower, upper, "-#{a_i = 0}", "#{a_i > 0}")

    if k == 0:
        rep = SignSequence(tuple(_baseline(model)))
        return MinimizerFamily("unique", (rep,), 1, objective(model, rep), {})
    if k < 0:
        count, gen, choices = _negative(model, -k)
    else:
        res = _positive(model, k)
        if res is None:
            return MinimizerFamily("none", (), 0, INF, {"reason": "no k lowest nonzero values"})
        count, gen, choices = res

    if limit is None:
        limit = DEFAULT_SAMPLE if count == INF else min(count, MAX_LISTED)
    reps = _take(gen, limit)
    kind = "infinite" if count == INF else ("unique" if count == 1 else "finite")
    return MinimizerFamily(kind, reps, count, objective(model, reps[0]), choices)


def _family_from_codes(values, codes, n) -> MinimizerFamily:
    if len(codes) == 0:
        return MinimizerFamily("none", (), 0, INF)
    vmin = float(values[codes].min())
    best = codes[values[codes] == vmin]
    reps = tuple(SignSequence(tuple(row)) for row in _kernels.decode(best, n))
    kind = "unique" if len(reps) == 1 else "finite"
    return MinimizerFamily(kind, reps, len(reps), vmin)


def _enumerate(a, backend):
    a = np.asarray(a, dtype=float).ravel()
    if a.size > MAX_ORACLE_LENGTH:
        raise ResourceLimitError(f"brute force is capped at length {MAX_ORACLE_LENGTH}, got {a.size}")
    if np.any(~np.isfinite(a)) or np.any(a < 0):
        raise DomainError("sequence entries must be finite and nonnegative")
    return a, _kernels.enumerate_signs(a, backend)


def brute_force_oracle(a, k: int, backend: str | None = None) -> MinimizerFamily:
    """Exhaustive search over ``{-1, 0, 1}^n`` restricted to index ``k``.

    Returns kind ``"none"`` when no sign sequence has index ``k``.
    """
    a, (values, index) = _enumerate(a, backend)
    return _family_from_codes(values, np.flatnonzero(index == k), a.size)


def brute_force_all(a, backend: str | None = None) -> dict:
    """:func:`brute_force_oracle` for every attainable index at once."""
    a, (values, index) = _enumerate(a, backend)
    order = np.argsort(index, kind="stable")
    ks, starts = np.unique(index[order], return_index=True)
    bounds = list(starts[1:]) + [len(order)]
    return {
        int(kv): _family_from_codes(values, np.sort(order[s:e]), a.size)
        for kv, s, e in zip(ks, starts, bounds)
    }
