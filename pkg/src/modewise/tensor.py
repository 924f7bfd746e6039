"""Dense d-mode tensor algebra: mode products, unfoldings, and reshaping.

Tensors are plain ``numpy.ndarray`` values in C (row-major) order, last index
fastest.  All functions are pure: inputs are never mutated, so values may be
shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import prod

import numpy as np


def _as_tensor(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


def mode_product(x, u, mode: int) -> np.ndarray:
    """Contract mode ``mode`` of tensor ``x`` with the columns of matrix ``u``.

    The result replaces mode length ``n_mode`` by ``u.shape[0]``:
    ``out[i_1,..,l,..,i_d] = sum_k x[i_1,..,k,..,i_d] * u[l, k]``.
    """
    x = _as_tensor(x)
    u = _as_tensor(u)
    if u.ndim != 2:
        raise ValueError(f"mode_product expects a matrix, got ndim={u.ndim}")
    if not 0 <= mode < x.ndim:
        raise ValueError(f"mode {mode} out of range for a {x.ndim}-mode tensor")
    if u.shape[1] != x.shape[mode]:
        raise ValueError(
            f"matrix has {u.shape[1]} columns but mode {mode} has length {x.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(x, u, axes=([mode], [1])), -1, mode)


def multi_mode_product(x, matrices, transpose: bool = False) -> np.ndarray:
    """Apply one matrix per mode; ``transpose=True`` applies each ``u.T``."""
    x = _as_tensor(x)
    if len(matrices) != x.ndim:
        raise ValueError(f"need {x.ndim} matrices, got {len(matrices)}")
    out = x
    for mode, u in enumerate(matrices):
        out = mode_product(out, u.T if transpose else u, mode)
    return out


def outer_product(vectors) -> np.ndarray:
    """Outer product of 1-mode tensors: entry (i_1,..,i_d) = prod_k v_k[i_k]."""
    vectors = [_as_tensor(v) for v in vectors]
    if not vectors:
        raise ValueError("outer_product needs at least one vector")
    for v in vectors:
        if v.ndim != 1 or v.size == 0:
            raise ValueError("outer_product factors must be nonempty vectors")
    return reduce(np.multiply.outer, vectors)


def kron(u, v) -> np.ndarray:
    """Kronecker product of vectors, linearized consistently with ``vect``."""
    u = _as_tensor(u)
    v = _as_tensor(v)
    if u.ndim != 1 or v.ndim != 1:
        raise ValueError("kron operates on vectors")
    return np.kron(u, v)


def kron_all(vectors) -> np.ndarray:
    return reduce(kron, [_as_tensor(v) for v in vectors])


def vect(x) -> np.ndarray:
    """Row-major vectorization (last index fastest)."""
    return _as_tensor(x).reshape(-1)


def unvect(y, shape) -> np.ndarray:
    y = _as_tensor(y)
    if y.size != prod(shape):
        raise ValueError(f"cannot reshape length {y.size} into {tuple(shape)}")
    return y.reshape(tuple(shape))


@dataclass(frozen=True)
class ReshapePlan:
    """Grouping of every ``kappa`` consecutive modes of a tensor into one.

    Merges a d-mode tensor into a d/kappa-mode tensor whose i-th mode length
    is the product of the i-th group of source lengths.
    """

    source_shape: tuple[int, ...]
    kappa: int

    def __post_init__(self):
        object.__setattr__(self, "source_shape", tuple(int(n) for n in self.source_shape))
        if any(n < 1 for n in self.source_shape):
            raise ValueError("mode lengths must be >= 1")
        d = len(self.source_shape)
        if self.kappa < 1 or d % self.kappa != 0:
            raise ValueError(f"kappa={self.kappa} does not divide the mode count d={d}")

    @property
    def d(self) -> int:
        return len(self.source_shape)

    @property
    def d_prime(self) -> int:
        return self.d // self.kappa

    @property
    def target_shape(self) -> tuple[int, ...]:
        k = self.kappa
        return tuple(
            prod(self.source_shape[i * k : (i + 1) * k]) for i in range(self.d_prime)
        )


def reshape_flatten(x, plan: ReshapePlan) -> np.ndarray:
    """Merge every ``plan.kappa`` modes into one.

    In row-major order this is a pure relinearization, so on rank-one inputs
    the grouped modes come out as Kronecker products of the factors.
    """
    x = _as_tensor(x)
    if x.shape != plan.source_shape:
        raise ValueError(f"tensor shape {x.shape} does not match plan {plan.source_shape}")
    return x.reshape(plan.target_shape)


def reshape_unflatten(y, plan: ReshapePlan) -> np.ndarray:
    """Inverse of :func:`reshape_flatten`."""
    y = _as_tensor(y)
    if y.shape != plan.target_shape:
        raise ValueError(f"tensor shape {y.shape} does not match plan target {plan.target_shape}")
    return y.reshape(plan.source_shape)


def unfold(x, mode: int) -> np.ndarray:
    """Mode-``mode`` matricization, remaining modes in natural order."""
    x = _as_tensor(x)
    if not 0 <= mode < x.ndim:
        raise ValueError(f"mode {mode} out of range for a {x.ndim}-mode tensor")
    return np.moveaxis(x, mode, 0).reshape(x.shape[mode], -1)


def inner(x, y) -> float:
    """Trace inner product: sum of elementwise products."""
    x = _as_tensor(x)
    y = _as_tensor(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    return float(np.dot(x.reshape(-1), y.reshape(-1)))


def norm(x) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(_as_tensor(x).reshape(-1)))
