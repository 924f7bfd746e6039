"""Tensor iterative hard thresholding with fixed unit step size.

Each sweep forms the gradient-style update
``Y = X + mu * adjoint(y - apply(X))`` and projects it back to low
multilinear rank with :func:`modewise.decomposition.truncate_rank`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomposition import random_low_rank, truncate_rank, _validate_rank
from .measurement import MeasurementOperator
from .tensor import norm

#: Abort once the error exceeds this multiple of the initial error.
DIVERGENCE_GUARD = 1e12


@dataclass(frozen=True)
class TihtConfig:
    rank: tuple[int, ...]
    max_iterations: int = 1000
    success_factor: float = 0.001
    step_size: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rank", tuple(int(r) for r in self.rank))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.success_factor < 1.0:
            raise ValueError("success_factor must lie in (0, 1)")
        if self.step_size <= 0.0:
            raise ValueError("step_size must be positive")


@dataclass
class TihtResult:
    """Recovered tensor with its error trace.

    ``error_trace[j]`` is the error after j update sweeps: distance to the
    truth when it was supplied, otherwise the measurement residual norm.
    """

    estimate: np.ndarray
    error_trace: list[float]
    iterations_used: int
    success: bool
    truth_known: bool


def tiht_recover(op: MeasurementOperator, y, config: TihtConfig, truth=None) -> TihtResult:
    """Recover a low multilinear rank tensor from measurements ``y``.

    Starts from a seeded random unit-norm tensor of the target rank and
    iterates until the error drops below ``success_factor`` times its initial
    value, the divergence guard trips, or ``max_iterations`` is reached.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != op.output_length:
        raise ValueError(f"measurement length {y.size} does not match operator output {op.output_length}")
    _validate_rank(config.rank, op.input_shape)
    if truth is not None:
        truth = np.asarray(truth, dtype=np.float64)
        if truth.shape != op.input_shape:
            raise ValueError(f"truth shape {truth.shape} does not match operator input {op.input_shape}")

    x = random_low_rank(op.input_shape, config.rank, config.seed)
    residual = y - op.apply(x)
    err = norm(x - truth) if truth is not None else norm(residual)
    trace = [err]
    success = False
    iterations = 0
    for _ in range(config.max_iterations):
        x = truncate_rank(x + config.step_size * op.adjoint(residual), config.rank)
        residual = y - op.apply(x)
        err = norm(x - truth) if truth is not None else norm(residual)
        trace.append(err)
        iterations += 1
        if err < config.success_factor * trace[0]:
            success = True
            break
        if not np.isfinite(err) or err > DIVERGENCE_GUARD * trace[0]:
            break
    return TihtResult(
        estimate=x,
        error_trace=trace,
        iterations_used=iterations,
        success=success,
        truth_known=truth is not None,
    )


@dataclass(frozen=True)
class ContractionReport:
    """Post-hoc check of the error trace against a geometric envelope."""

    rate: float
    fitted: bool
    holds_through: int
    envelope_holds: bool
    trace_length: int
    notes: str = field(default="envelope: trace[j] <= rate**j * trace[0]")


def contraction_certificate(result: TihtResult, rate: float | None = None) -> ContractionReport:
    """Report how far ``trace[j] <= rate**j * trace[0]`` holds.

    With ``rate=None`` the rate is fitted as the largest consecutive error
    ratio, so a converging trace always satisfies its own fitted envelope.
    Requires a recovery run where the truth was supplied.
    """
    if not result.truth_known:
        raise ValueError("contraction certificate requires an error trace against the truth")
    trace = np.asarray(result.error_trace, dtype=np.float64)
    fitted = rate is None
    if fitted:
        ratios = [
            trace[j + 1] / trace[j]
            for j in range(len(trace) - 1)
            if trace[j] > 0.0
        ]
        rate = max(ratios) if ratios else 0.0
    if rate < 0.0:
        raise ValueError("rate must be nonnegative")

    holds_through = 0
    envelope = trace[0]
    for j in range(1, len(trace)):
        envelope *= rate
        # tiny multiplicative slack absorbs round-off in the power
        if trace[j] <= envelope * (1.0 + 1e-9) or trace[j] == 0.0:
            holds_through = j
        else:
            break
    return ContractionReport(
        rate=float(rate),
        fitted=fitted,
        holds_through=holds_through,
        envelope_holds=holds_through == len(trace) - 1,
        trace_length=len(trace),
    )
