"""Combinatorics of symmetric index sets.

Canonical representative of a multi-index under mode permutation is its
nondecreasing sort; the canonical set for grid extent ``g`` and order ``m``
is the upper hypertriangle ``{i_0 <= i_1 <= .. <= i_{m-1}}``, of size
``C(g + m - 1, m)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .dense import DenseTensor, MultiIndex, Permutation
from .errors import ParameterError, ShapeError


@dataclass(frozen=True)
class CanonicalRef:
    """Redirection record: sorted representative plus the reordering back.

    ``applied.apply(canonical) == index`` for the index that produced this
    record; for an already-sorted index ``applied`` is the identity.
    """

    canonical: MultiIndex
    applied: Permutation


def canonicalize(idx: Iterable[int]) -> CanonicalRef:
    """Sort ``idx`` nondecreasing and record how to permute it back.

    When ``idx`` has repeated values several permutations reproduce it; the
    lexicographically smallest mapping is chosen so results are
    deterministic.
    """
    idx = tuple(idx)
    canonical = tuple(sorted(idx))
    if canonical == idx:
        return CanonicalRef(canonical, Permutation.identity(len(idx)))
    # First unused position of each value, scanned in index order, yields
    # the lexicographically smallest valid mapping.
    next_pos: dict[int, int] = {}
    mapping = []
    for value in idx:
        start = next_pos.get(value, 0)
        pos = canonical.index(value, start)
        mapping.append(pos)
        next_pos[value] = pos + 1
    return CanonicalRef(canonical, Permutation(tuple(mapping)))


def hypertriangle_iter(extent: int, m: int) -> Iterator[MultiIndex]:
    """Yield every nondecreasing m-tuple over ``0..extent-1`` in lex order."""
    if extent < 1 or m < 1:
        raise ParameterError("hypertriangle_iter requires extent >= 1 and m >= 1")
    return itertools.combinations_with_replacement(range(extent), m)


def simplex_count(n: int, m: int) -> int:
    """Number of nondecreasing m-tuples over ``0..n-1``: C(n + m - 1, m)."""
    if n < 1 or m < 1:
        raise ParameterError("simplex_count requires n >= 1 and m >= 1")
    return math.comb(n + m - 1, m)


def symmetry_violation(
    t: DenseTensor, modes: Iterable[int]
) -> tuple[float, MultiIndex, MultiIndex]:
    """Worst relative mismatch of ``t`` under transpositions within ``modes``.

    Returns ``(max_rel, idx, swapped_idx)`` where the two indices realize
    the maximum of ``|x - y| / max(|x|, |y|)`` over all adjacent
    transpositions of the sorted mode set (adjacent transpositions generate
    the full permutation group of the set, so this bounds every
    permutation).  A perfectly symmetric tensor yields ``(0.0, .., ..)``.
    """
    modes = sorted(set(modes))
    m = t.order
    for s in modes:
        if not 0 <= s < m:
            raise ShapeError(f"mode {s} out of range for order {m}")
    dims = {t.dims[s] for s in modes}
    if len(dims) > 1:
        raise ShapeError(f"modes {modes} have unequal dimensions {sorted(dims)}")
    worst = (0.0, (0,) * m, (0,) * m)
    for a, b in zip(modes, modes[1:]):
        swapped = np.swapaxes(t.array, a, b)
        diff = np.abs(t.array - swapped)
        scale = np.maximum(np.abs(t.array), np.abs(swapped))
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(diff > 0, diff / np.where(scale > 0, scale, 1.0), 0.0)
        flat = int(np.argmax(rel))
        val = float(rel.reshape(-1)[flat])
        if val > worst[0]:
            idx = tuple(int(i) for i in np.unravel_index(flat, t.dims))
            jdx = list(idx)
            jdx[a], jdx[b] = jdx[b], jdx[a]
            worst = (val, idx, tuple(jdx))
    return worst


def is_sym_in_modes(t: DenseTensor, modes: Iterable[int], tol: float = 0.0) -> bool:
    """True iff ``t`` is invariant (within ``tol``, relative) under every
    permutation of the modes in ``modes``."""
    modes = sorted(set(modes))
    for s in modes:
        if not 0 <= s < t.order:
            raise ShapeError(f"mode {s} out of range for order {t.order}")
    if len(modes) <= 1:
        return True
    return symmetry_violation(t, modes)[0] <= tol


@dataclass(frozen=True)
class ModePartition:
    """Disjoint, covering, nonempty groups of mode numbers.

    Describes which mode groups of an order-m tensor are interchangeable;
    a fully symmetric tensor has the single group ``{0, .., m-1}`` and an
    unstructured tensor has all singleton groups.
    """

    groups: tuple[frozenset[int], ...]

    def __post_init__(self):
        if not self.groups:
            raise ShapeError("mode partition needs at least one group")
        seen: set[int] = set()
        for g in self.groups:
            if not g:
                raise ShapeError("mode partition groups must be nonempty")
            if seen & g:
                raise ShapeError("mode partition groups must be disjoint")
            seen |= g
        m = len(seen)
        if seen != set(range(m)):
            raise ShapeError(f"mode partition must cover 0..{m - 1} exactly")

    @property
    def order(self) -> int:
        return sum(len(g) for g in self.groups)

    @staticmethod
    def leading_group(sym_modes: int, order: int) -> "ModePartition":
        """One symmetric group ``{0..sym_modes-1}`` plus singleton tails."""
        if not 0 < sym_modes <= order:
            raise ShapeError("leading group size must be in 1..order")
        groups = [frozenset(range(sym_modes))]
        groups += [frozenset((j,)) for j in range(sym_modes, order)]
        return ModePartition(tuple(groups))
