"""Higher-order SVD, multilinear rank truncation, and low-rank generators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import mode_product, multi_mode_product, norm, unfold


@dataclass(frozen=True)
class TuckerDecomposition:
    """Core tensor plus one orthonormal-column factor matrix per mode."""

    core: np.ndarray
    factors: tuple[np.ndarray, ...]

    @property
    def rank(self) -> tuple[int, ...]:
        return self.core.shape

    def reconstruct(self) -> np.ndarray:
        return multi_mode_product(self.core, self.factors)


def _fix_signs(u: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    u = u.copy()
    lead = np.argmax(np.abs(u), axis=0)
    flip = u[lead, np.arange(u.shape[1])] < 0
    u[:, flip] *= -1.0
    return u


def hosvd(x) -> TuckerDecomposition:
    """Higher-order SVD: per-mode left singular vectors plus core tensor.

    The reconstruction equals ``x`` up to floating-point error, the core has
    the same Frobenius norm as ``x``, and its mode slices are mutually
    orthogonal.
    """
    x = np.asarray(x, dtype=np.float64)
    if norm(x) == 0.0:
        raise ValueError("HOSVD of the zero tensor is undefined")
    factors = tuple(
        _fix_signs(np.linalg.svd(unfold(x, mode), full_matrices=False)[0])
        for mode in range(x.ndim)
    )
    core = multi_mode_product(x, factors, transpose=True)
    return TuckerDecomposition(core=core, factors=factors)


def _validate_rank(rank, shape) -> tuple[int, ...]:
    rank = tuple(int(r) for r in rank)
    if len(rank) != len(shape):
        raise ValueError(f"rank {rank} has {len(rank)} entries for a {len(shape)}-mode tensor")
    for mode, (r, n) in enumerate(zip(rank, shape)):
        if not 1 <= r <= n:
            raise ValueError(f"rank[{mode}]={r} outside [1, {n}]")
    return rank


def truncate_rank(z, rank) -> np.ndarray:
    """Project ``z`` onto its top-``rank`` per-mode singular subspaces.

    Classical truncated HOSVD: each subspace comes from the unfolding of the
    input itself, then all mode projections are applied.  Inputs of
    multilinear rank at most ``rank`` are fixed points.
    """
    z = np.asarray(z, dtype=np.float64)
    rank = _validate_rank(rank, z.shape)
    out = z
    for mode in range(z.ndim):
        u = np.linalg.svd(unfold(z, mode), full_matrices=False)[0][:, : rank[mode]]
        out = mode_product(out, u @ u.T, mode)
    return out


def random_low_rank(shape, rank, seed) -> np.ndarray:
    """Seeded random tensor of multilinear rank at most ``rank``, unit norm.

    Gaussian core contracted with orthonormalized Gaussian factors, then
    scaled to unit Frobenius norm.
    """
    shape = tuple(int(n) for n in shape)
    rank = _validate_rank(rank, shape)
    rng = np.random.default_rng(seed)
    core = rng.standard_normal(rank)
    factors = []
    for n, r in zip(shape, rank):
        q, _ = np.linalg.qr(rng.standard_normal((n, r)))
        factors.append(q)
    x = multi_mode_product(core, factors)
    scale = norm(x)
    if scale == 0.0:
        raise ValueError("degenerate draw: zero core tensor")
    return x / scale


def check_orthogonal_subtensors(core, tol: float = 1e-8) -> bool:
    """True iff, for every mode, distinct slices have vanishing inner product."""
    core = np.asarray(core, dtype=np.float64)
    for mode in range(core.ndim):
        m = unfold(core, mode)
        gram = m @ m.T
        off = gram - np.diag(np.diag(gram))
        if np.max(np.abs(off)) > tol:
            return False
    return True


def multilinear_rank(x, rel_tol: float = 1e-12) -> tuple[int, ...]:
    """Per-mode rank of the unfoldings; singular values below
    ``rel_tol * sigma_1`` count as zero."""
    x = np.asarray(x, dtype=np.float64)
    ranks = []
    for mode in range(x.ndim):
        s = np.linalg.svd(unfold(x, mode), compute_uv=False)
        if s.size == 0 or s[0] == 0.0:
            ranks.append(0)
        else:
            ranks.append(int(np.sum(s > rel_tol * s[0])))
    return tuple(ranks)
