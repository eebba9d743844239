"""Change of basis for symmetric tensors: C = A x_0 X x_1 X ... x_{m-1} X.

Four routes to the same result, ordered by how much structure they exploit:

``sttsm_naive``
    Elementwise definition.  Each unique output entry (nondecreasing index)
    is a full m-fold contraction; the result is replicated to all index
    permutations.  Serves as the independent oracle for everything else.

``sttsm_scalar_temps``
    Triangular loop nest over output indices that reuses vector-contraction
    temporaries ``T(k) = T(k+1) x_k x_row`` to avoid recomputing shared
    partial sums.

``sttsm_dense_ttm``
    The dense baseline: m successive mode products against the full matrix,
    ignoring symmetry and blocking.

``sttsm_bcss``
    Algorithm-by-blocks over blocked compact symmetric storage.  Output
    blocks are produced once per canonical (nondecreasing) block index.
    Temporaries ``T(k)`` are symmetric in their leading ``k`` modes, so with
    ``reuse=True`` only their canonical blocks are computed and stored
    (redirected reads handle the rest); ``reuse=False`` materializes every
    temporary block, which matches the plain algorithm-by-blocks cost.

All four accept an :class:`~blocksym.counters.OpCounter`; flops count 2 per
multiply-add and memops count 2 per element moved by a permutation or copy.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce
from typing import Callable

import numpy as np

from .counters import OpCounter
from .dense import (
    DenseTensor,
    front_permutation,
    matmul_ref,
    mode_multiply,
)
from .errors import BlockDivisibilityError, ParameterError, ShapeError
from .indexing import hypertriangle_iter
from .storage import BcssTensor, PartialSymTensor, decompress_partial

TempHook = Callable[[int, object], None]


def _check_sttsm_args(a_dims: tuple[int, ...], x: np.ndarray) -> tuple[int, int, int]:
    m = len(a_dims)
    if m < 2:
        raise ParameterError("change of basis is defined for order >= 2")
    if len(set(a_dims)) > 1:
        raise ShapeError(f"tensor dims {a_dims} are not all equal")
    n = a_dims[0]
    if x.ndim != 2 or x.shape[1] != n:
        raise ShapeError(f"matrix shape {x.shape} does not contract dimension {n}")
    return m, n, x.shape[0]


def _replicate(out: np.ndarray, values: dict, counter: OpCounter | None) -> None:
    # One read of the unique value plus one write per placed element.
    written = 0
    for jt, v in values.items():
        for perm_idx in set(itertools.permutations(jt)):
            out[perm_idx] = v
            written += 1
    if counter is not None:
        counter.count_memops(2 * written)


def sttsm_naive(
    a: DenseTensor,
    x: np.ndarray,
    counter: OpCounter | None = None,
    full_nest: bool = False,
) -> DenseTensor:
    """Elementwise change of basis; the reference oracle.

    Entry ``(j_0..j_{m-1})`` is ``sum over all i of a[i] * prod_d
    x[j_d, i_d]``, evaluated with an explicit product-weight tensor rather
    than any mode-product machinery.  By default only nondecreasing output
    indices are computed and then replicated (valid because ``a`` is
    assumed symmetric); ``full_nest=True`` computes every entry
    independently and assumes nothing.
    """
    x = np.asarray(x, dtype=np.float64)
    m, n, p = _check_sttsm_args(a.dims, x)
    out = np.empty((p,) * m, dtype=np.float64, order="F")

    def entry(jt: tuple[int, ...]) -> float:
        weight = reduce(np.multiply.outer, [x[j] for j in jt])
        if counter is not None:
            # m multiplies and one accumulate per inner-nest term.
            counter.count_flops((m + 1) * n**m)
        return float(np.sum(a.array * weight))

    if full_nest:
        for jt in itertools.product(range(p), repeat=m):
            out[jt] = entry(jt)
        return DenseTensor(out)

    values = {jt: entry(jt) for jt in hypertriangle_iter(p, m)}
    _replicate(out, values, counter)
    return DenseTensor(out)


def sttsm_scalar_temps(
    a: DenseTensor, x: np.ndarray, counter: OpCounter | None = None
) -> DenseTensor:
    """Change of basis via row-vector temporaries.

    Walks the triangular output loop nest ``j_{m-1} >= .. >= j_1 >= j_0``;
    at depth ``k`` the running temporary is contracted with row ``j_k`` of
    ``x`` (kept as a 1 x n matrix so every contraction is a mode product).
    Only unique entries are computed, then replicated.
    """
    x = np.asarray(x, dtype=np.float64)
    m, n, p = _check_sttsm_args(a.dims, x)
    values: dict[tuple[int, ...], float] = {}

    def descend(k: int, t_next: DenseTensor, j_hi: int, suffix: tuple[int, ...]) -> None:
        for j in range(j_hi + 1):
            t_k = mode_multiply(t_next, k, x[j : j + 1, :], counter)
            if k == 0:
                values[(j,) + suffix] = float(t_k.data[0])
            else:
                descend(k - 1, t_k, j, (j,) + suffix)

    descend(m - 1, a, p - 1, ())
    out = np.empty((p,) * m, dtype=np.float64, order="F")
    _replicate(out, values, counter)
    return DenseTensor(out)


def sttsm_dense_ttm(
    a: DenseTensor, x: np.ndarray, counter: OpCounter | None = None
) -> DenseTensor:
    """Dense baseline: m mode products against the full matrix.

    Exploits neither symmetry nor blocking; its instrumented flop count is
    exactly ``2 * sum_d p^{d+1} n^{m-d}``.
    """
    x = np.asarray(x, dtype=np.float64)
    m, _, _ = _check_sttsm_args(a.dims, x)
    c = a
    for k in range(m):
        c = mode_multiply(c, k, x, counter)
    return c


class _DenseBlockTable:
    """Temporary with every block materialized (no symmetry reuse)."""

    def __init__(self, sym_modes: int, grid: int, blocks: dict):
        self.sym_modes = sym_modes
        self.grid = grid
        self.blocks = blocks
        self._identity = tuple(range(next(iter(blocks.values())).ndim))

    def stored_and_transform(self, sym_idx):
        return self.blocks[tuple(sym_idx)], self._identity


def temp_to_dense(temp) -> DenseTensor:
    """Assemble a blocked temporary (either storage flavor) densely."""
    if isinstance(temp, PartialSymTensor):
        return decompress_partial(temp)
    sample = next(iter(temp.blocks.values()))
    b = sample.shape[0]
    tail = sample.shape[temp.sym_modes :]
    out = np.empty((temp.grid * b,) * temp.sym_modes + tail, dtype=np.float64, order="F")
    tail_sl = tuple(slice(None) for _ in tail)
    for key, arr in temp.blocks.items():
        sl = tuple(slice(i * b, (i + 1) * b) for i in key)
        out[sl + tail_sl] = arr
    return DenseTensor(out)


def _level_product(
    t_in,
    k: int,
    jb: int,
    x: np.ndarray,
    b_a: int,
    b_c: int,
    m: int,
    reuse: bool,
    counter: OpCounter | None,
):
    """One temporary level: contract mode ``k`` of ``T(k+1)`` with block row
    ``jb`` of ``x``, block by block.

    For each produced block the summand blocks of ``T(k+1)`` are fetched
    through storage redirection, permuted once (redirection fused with the
    mode-fronting reorder), multiplied into an accumulator held in fronted
    layout, and the finished block is reordered back.  Returns the dict of
    produced blocks keyed by their symmetric-mode index tuple.
    """
    nbar = t_in.grid
    tail_in = (b_c,) * (m - 1 - k)
    front = front_permutation(k, m).mapping
    inv_front = [0] * m
    for d, f in enumerate(front):
        inv_front[f] = d
    inv_front = tuple(inv_front)
    rest = b_a**k * b_c ** (m - 1 - k)

    if reuse:
        keys = hypertriangle_iter(nbar, k) if k >= 1 else [()]
    else:
        keys = itertools.product(range(nbar), repeat=k)

    blocks = {}
    for key in keys:
        acc = np.zeros((b_c, rest), dtype=np.float64, order="F")
        for ib in range(nbar):
            stored, axes = t_in.stored_and_transform(key + (ib,))
            fused = tuple(axes[f] for f in front)
            pa = np.array(np.transpose(stored, fused), order="F", copy=True)
            if counter is not None:
                counter.count_memops(2 * pa.size)
            a_mat = pa.reshape((b_a, rest), order="F")
            xb = x[jb * b_c : (jb + 1) * b_c, ib * b_a : (ib + 1) * b_a]
            acc += matmul_ref(xb, a_mat, counter)
        fronted = acc.reshape((b_c,) + (b_a,) * k + tail_in, order="F")
        blk = np.array(np.transpose(fronted, inv_front), order="F", copy=True)
        if counter is not None:
            counter.count_memops(2 * blk.size)
        blocks[key] = blk
    return blocks


def sttsm_bcss(
    a: BcssTensor,
    x: np.ndarray,
    b_c: int,
    counter: OpCounter | None = None,
    reuse: bool = True,
    temp_hook: TempHook | None = None,
) -> BcssTensor:
    """Blocked change of basis over compact symmetric storage.

    Walks nondecreasing output block tuples ``jb_0 <= .. <= jb_{m-1}``;
    entering level ``k`` contracts the previous temporary's mode ``k`` with
    block row ``jb_k`` of ``x``, and the innermost level emits one output
    block per canonical tuple.  Each temporary ``T(k)`` is symmetric in its
    leading ``k`` modes; ``reuse`` selects whether that is exploited
    (canonical blocks only) or not (every block computed).

    ``temp_hook(k, temp)`` is called with each finished temporary, mainly
    so tests can audit the partial symmetry; see :func:`temp_to_dense`.
    """
    if not isinstance(a, BcssTensor):
        raise ShapeError("sttsm_bcss needs blocked compact symmetric input")
    x = np.asarray(x, dtype=np.float64)
    m, n, p = _check_sttsm_args(a.dims, x)
    b_a = a.b
    if p % b_c != 0:
        raise BlockDivisibilityError(f"output block dimension {b_c} does not divide {p}")
    pbar = p // b_c
    out_blocks: dict[tuple[int, ...], np.ndarray] = {}

    def descend(k: int, t_in, j_hi: int, suffix: tuple[int, ...]) -> None:
        for jb in range(j_hi + 1):
            produced = _level_product(t_in, k, jb, x, b_a, b_c, m, reuse, counter)
            if k == 0:
                out_blocks[(jb,) + suffix] = produced[()]
                continue
            if reuse:
                temp = PartialSymTensor(k, n, b_a, (b_c,) * (m - k), produced)
            else:
                temp = _DenseBlockTable(k, t_in.grid, produced)
            if temp_hook is not None:
                temp_hook(k, temp)
            descend(k - 1, temp, jb, (jb,) + suffix)

    descend(m - 1, a, pbar - 1, ())
    return BcssTensor(m, p, b_c, out_blocks)


def symmetrize(t: DenseTensor) -> DenseTensor:
    """Average over all mode permutations; exact symmetry up to rounding."""
    if len(set(t.dims)) > 1:
        raise ShapeError(f"tensor dims {t.dims} are not all equal")
    m = t.order
    acc = np.zeros(t.dims, dtype=np.float64, order="F")
    for perm in itertools.permutations(range(m)):
        acc += np.transpose(t.array, perm)
    return DenseTensor(acc / math.factorial(m))


def max_relative_error(result: DenseTensor, reference: DenseTensor) -> float:
    """max |result - reference| normalized by the reference magnitude."""
    if result.dims != reference.dims:
        raise ShapeError(f"dims differ: {result.dims} vs {reference.dims}")
    scale = float(np.max(np.abs(reference.array)))
    if scale == 0.0:
        return float(np.max(np.abs(result.array)))
    return float(np.max(np.abs(result.array - reference.array))) / scale
