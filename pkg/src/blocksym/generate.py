"""Reproducible random inputs.

Symmetric tensors are generated by drawing one uniform(-1, 1) value per
canonical (nondecreasing) index, in hypertriangle order, and replicating it
to all index permutations; the same seed therefore gives bit-identical
tensors on every platform, and the symmetry is exact by construction.
"""

from __future__ import annotations

import itertools

import numpy as np

from .dense import DenseTensor
from .errors import BlockDivisibilityError, ParameterError
from .indexing import hypertriangle_iter, simplex_count
from .storage import BcssTensor


def random_symmetric(m: int, n: int, seed: int) -> DenseTensor:
    """Seeded exactly-symmetric order-m tensor with dims ``(n,) * m``."""
    if m < 1 or n < 1:
        raise ParameterError("random_symmetric requires m >= 1 and n >= 1")
    rng = np.random.default_rng(seed)
    draws = rng.uniform(-1.0, 1.0, size=simplex_count(n, m))
    out = np.empty((n,) * m, dtype=np.float64, order="F")
    for value, idx in zip(draws, hypertriangle_iter(n, m)):
        for perm_idx in set(itertools.permutations(idx)):
            out[perm_idx] = value
    return DenseTensor(out)


def random_matrix(p: int, n: int, seed: int) -> np.ndarray:
    """Seeded uniform(-1, 1) change-of-basis matrix of shape (p, n)."""
    if p < 1 or n < 1:
        raise ParameterError("random_matrix requires p >= 1 and n >= 1")
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(p, n))


def _symmetrize_mode_group(arr: np.ndarray, modes: list[int]) -> np.ndarray:
    """Average over permutations of the given modes (other modes fixed)."""
    out = np.zeros_like(arr)
    perms = list(itertools.permutations(modes))
    for perm in perms:
        axes = list(range(arr.ndim))
        for src, dst in zip(modes, perm):
            axes[src] = dst
        out += np.transpose(arr, axes)
    return out / len(perms)


def random_bcss(m: int, n: int, b: int, seed: int) -> BcssTensor:
    """Seeded blocked compact symmetric tensor, built block by block.

    The dense equivalent never materializes, so this scales to shapes whose
    full tensor would not fit in memory.  Blocks whose index repeats a value
    are averaged over the repeated modes, which makes the represented tensor
    symmetric to rounding (about 1 ulp); use
    ``compress(random_symmetric(...))`` when bitwise symmetry matters.
    """
    if m < 2 or n < 1:
        raise ParameterError("random_bcss requires m >= 2 and n >= 1")
    if n % b != 0:
        raise BlockDivisibilityError(f"block dimension {b} does not divide {n}")
    rng = np.random.default_rng(seed)
    blocks = {}
    for key in hypertriangle_iter(n // b, m):
        arr = rng.uniform(-1.0, 1.0, size=(b,) * m)
        groups: dict[int, list[int]] = {}
        for mode, kb in enumerate(key):
            groups.setdefault(kb, []).append(mode)
        for modes in groups.values():
            if len(modes) > 1:
                arr = _symmetrize_mode_group(arr, modes)
        blocks[key] = np.asfortranarray(arr)
    return BcssTensor(m, n, b, blocks)
