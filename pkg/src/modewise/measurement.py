"""Measurement ensembles and compression operators with exact adjoints.

Three operator variants share one interface:

* ``VectorizedOperator``: a single matrix applied to the vectorized tensor.
* ``ModewiseOperator``: reshape groups of modes together, then compress each
  remaining mode with its own matrix.
* ``TwoStageOperator``: modewise compression followed by vectorization and a
  second matrix compression.

Operators are immutable after construction; ``apply``/``adjoint`` are pure.
"""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from math import prod, sqrt

import numpy as np

from .tensor import (
    ReshapePlan,
    mode_product,
    norm,
    reshape_flatten,
    reshape_unflatten,
    unvect,
    vect,
)

#: Entry bound constant of the orthonormal DCT-II base: max |F_ij| = DELTA/sqrt(n).
DELTA_DCT = sqrt(2.0)


def make_gaussian(m: int, n: int, seed) -> np.ndarray:
    """m x n matrix of i.i.d. N(0, 1/m) entries, so E||Ax||^2 = ||x||^2."""
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, n)) / sqrt(m)


def dct_rows(n: int, rows) -> np.ndarray:
    """Selected rows of the n x n orthonormal type-II DCT matrix.

    Row k is ``c_k * cos(pi * k * (2j+1) / (2n))`` with ``c_0 = 1/sqrt(n)``
    and ``c_k = sqrt(2/n)`` otherwise; entries are bounded by sqrt(2/n).
    Only the requested rows are materialized.
    """
    rows = np.asarray(rows, dtype=np.int64)
    j = np.arange(n)
    out = np.cos(np.pi * rows[:, None] * (2 * j[None, :] + 1) / (2.0 * n))
    scale = np.where(rows == 0, sqrt(1.0 / n), sqrt(2.0 / n))
    return scale[:, None] * out


def dct_matrix(n: int) -> np.ndarray:
    """Full orthonormal type-II DCT matrix."""
    return dct_rows(n, np.arange(n))


@dataclass(frozen=True)
class SorsEnsemble:
    """Subsampled orthonormal matrix with random column signs.

    ``matrix = sqrt(n/m) * F[row_sample, :] @ diag(signs)`` where F is the
    orthonormal DCT-II base and the rows are a uniform random subset of size
    ``m`` (distinct rows whenever ``m <= n``).  The scaling makes
    E||Ax||^2 = ||x||^2.

    Repeated rows are avoided deliberately: at ``m`` close to ``n`` a draw
    with replacement skips a large fraction of the base directions and
    inflates the duplicated ones, which wrecks the restricted conditioning a
    fixed-step recovery loop needs.
    """

    m: int
    n: int
    seed: int
    row_sample: np.ndarray
    signs: np.ndarray
    delta: float
    matrix: np.ndarray


def make_sors(m: int, n: int, seed) -> SorsEnsemble:
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    rng = np.random.default_rng(seed)
    if m > n:
        warnings.warn(f"SORS with m={m} > n={n} does not compress", stacklevel=2)
        rows = rng.integers(0, n, size=m)
    else:
        rows = rng.choice(n, size=m, replace=False)
    signs = rng.choice(np.array([-1.0, 1.0]), size=n)
    matrix = sqrt(n / m) * dct_rows(n, rows) * signs[None, :]
    return SorsEnsemble(
        m=m, n=n, seed=seed, row_sample=rows, signs=signs, delta=DELTA_DCT, matrix=matrix
    )


class MeasurementOperator:
    """Linear map from d-mode tensors to measurement vectors."""

    input_shape: tuple[int, ...]
    output_length: int

    def apply(self, x) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self, y) -> np.ndarray:
        raise NotImplementedError

    def storage_entries(self) -> int:
        """Number of stored matrix entries."""
        raise NotImplementedError

    def _check_input(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.input_shape:
            raise ValueError(f"tensor shape {x.shape} does not match operator input {self.input_shape}")
        return x

    def _check_output(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if y.size != self.output_length:
            raise ValueError(f"measurement length {y.size} does not match operator output {self.output_length}")
        return y


def _as_matrix_payload(a) -> np.ndarray:
    if isinstance(a, SorsEnsemble):
        a = a.matrix
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("operator payloads must be matrices")
    return a


class VectorizedOperator(MeasurementOperator):
    """Single matrix acting on the row-major vectorization of the tensor."""

    def __init__(self, matrix, input_shape):
        self.matrix = _as_matrix_payload(matrix)
        self.input_shape = tuple(int(n) for n in input_shape)
        if self.matrix.shape[1] != prod(self.input_shape):
            raise ValueError(
                f"matrix has {self.matrix.shape[1]} columns, expected {prod(self.input_shape)}"
            )
        self.output_length = self.matrix.shape[0]

    def apply(self, x) -> np.ndarray:
        return self.matrix @ vect(self._check_input(x))

    def adjoint(self, y) -> np.ndarray:
        return unvect(self.matrix.T @ self._check_output(y), self.input_shape)

    def storage_entries(self) -> int:
        return int(self.matrix.size)


class ModewiseOperator(MeasurementOperator):
    """Reshape by ``plan`` then compress each remaining mode with one matrix."""

    def __init__(self, plan: ReshapePlan, matrices):
        self.plan = plan
        self.matrices = tuple(_as_matrix_payload(a) for a in matrices)
        if len(self.matrices) != plan.d_prime:
            raise ValueError(f"need {plan.d_prime} matrices, got {len(self.matrices)}")
        for i, (a, n) in enumerate(zip(self.matrices, plan.target_shape)):
            if a.shape[1] != n:
                raise ValueError(f"matrix {i} has {a.shape[1]} columns, expected {n}")
        self.input_shape = plan.source_shape
        self.compressed_shape = tuple(a.shape[0] for a in self.matrices)
        self.output_length = prod(self.compressed_shape)

    def apply(self, x) -> np.ndarray:
        z = reshape_flatten(self._check_input(x), self.plan)
        for mode, a in enumerate(self.matrices):
            z = mode_product(z, a, mode)
        return vect(z)

    def adjoint(self, y) -> np.ndarray:
        z = unvect(self._check_output(y), self.compressed_shape)
        for mode, a in enumerate(self.matrices):
            z = mode_product(z, a.T, mode)
        return reshape_unflatten(z, self.plan)

    def storage_entries(self) -> int:
        return int(sum(a.size for a in self.matrices))


class TwoStageOperator(MeasurementOperator):
    """Modewise compression, vectorization, then a second matrix compression."""

    def __init__(self, plan: ReshapePlan, matrices, second):
        self.first = ModewiseOperator(plan, matrices)
        self.second = _as_matrix_payload(second)
        if self.second.shape[1] != self.first.output_length:
            raise ValueError(
                f"second-stage matrix has {self.second.shape[1]} columns, "
                f"expected {self.first.output_length}"
            )
        self.plan = plan
        self.matrices = self.first.matrices
        self.input_shape = plan.source_shape
        self.output_length = self.second.shape[0]

    def apply(self, x) -> np.ndarray:
        return self.second @ self.first.apply(x)

    def adjoint(self, y) -> np.ndarray:
        return self.first.adjoint(self.second.T @ self._check_output(y))

    def storage_entries(self) -> int:
        return self.first.storage_entries() + int(self.second.size)


@dataclass(frozen=True)
class NoisyMeasurement:
    """Measurement vector plus the recorded noise magnitude."""

    y: np.ndarray
    noise_norm: float


def measure(op: MeasurementOperator, x, noise_norm: float = 0.0, seed=None) -> NoisyMeasurement:
    """Apply ``op`` and add noise of exactly ``noise_norm`` in a random direction."""
    if noise_norm < 0:
        raise ValueError("noise_norm must be nonnegative")
    y = op.apply(x)
    if noise_norm > 0.0:
        rng = np.random.default_rng(seed)
        e = rng.standard_normal(y.size)
        y = y + e * (noise_norm / norm(e))
    return NoisyMeasurement(y=y, noise_norm=float(noise_norm))


# Binary sidecar format: magic, version byte, variant tag byte, then 64-bit
# little-endian dimensions followed by float64 little-endian entries.
_MAGIC = b"MWOP"
_VERSION = 1
_TAG_VECTORIZED = 0
_TAG_MODEWISE = 1
_TAG_TWOSTAGE = 2


def _write_u64(fh, *values):
    fh.write(struct.pack("<" + "Q" * len(values), *values))


def _read_u64(fh, count):
    data = fh.read(8 * count)
    if len(data) != 8 * count:
        raise ValueError("truncated operator file")
    return struct.unpack("<" + "Q" * count, data)


def _write_matrix(fh, a):
    fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def _read_matrix(fh, rows, cols):
    data = fh.read(8 * rows * cols)
    if len(data) != 8 * rows * cols:
        raise ValueError("truncated operator file")
    return np.frombuffer(data, dtype="<f8").reshape(rows, cols).astype(np.float64)


def save_operator(op: MeasurementOperator, path) -> None:
    """Write an operator to its binary sidecar file."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<B", _VERSION))
        if isinstance(op, VectorizedOperator):
            fh.write(struct.pack("<B", _TAG_VECTORIZED))
            _write_u64(fh, len(op.input_shape), *op.input_shape, op.output_length)
            _write_matrix(fh, op.matrix)
        elif isinstance(op, TwoStageOperator):
            fh.write(struct.pack("<B", _TAG_TWOSTAGE))
            _write_u64(fh, len(op.input_shape), *op.input_shape, op.plan.kappa)
            _write_u64(fh, *(a.shape[0] for a in op.matrices))
            _write_u64(fh, op.output_length)
            for a in op.matrices:
                _write_matrix(fh, a)
            _write_matrix(fh, op.second)
        elif isinstance(op, ModewiseOperator):
            fh.write(struct.pack("<B", _TAG_MODEWISE))
            _write_u64(fh, len(op.input_shape), *op.input_shape, op.plan.kappa)
            _write_u64(fh, *(a.shape[0] for a in op.matrices))
            for a in op.matrices:
                _write_matrix(fh, a)
        else:
            raise ValueError(f"cannot serialize operator of type {type(op).__name__}")


def load_operator(path) -> MeasurementOperator:
    """Read an operator written by :func:`save_operator`."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not an operator sidecar file")
        (version,) = struct.unpack("<B", fh.read(1))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        (tag,) = struct.unpack("<B", fh.read(1))
        (d,) = _read_u64(fh, 1)
        shape = _read_u64(fh, d)
        if tag == _TAG_VECTORIZED:
            (m0,) = _read_u64(fh, 1)
            return VectorizedOperator(_read_matrix(fh, m0, prod(shape)), shape)
        if tag in (_TAG_MODEWISE, _TAG_TWOSTAGE):
            (kappa,) = _read_u64(fh, 1)
            plan = ReshapePlan(shape, kappa)
            row_counts = _read_u64(fh, plan.d_prime)
            m0 = _read_u64(fh, 1)[0] if tag == _TAG_TWOSTAGE else None
            matrices = [
                _read_matrix(fh, rows, cols)
                for rows, cols in zip(row_counts, plan.target_shape)
            ]
            if tag == _TAG_MODEWISE:
                return ModewiseOperator(plan, matrices)
            second = _read_matrix(fh, m0, prod(row_counts))
            return TwoStageOperator(plan, matrices, second)
        raise ValueError(f"{path}: unknown variant tag {tag}")
