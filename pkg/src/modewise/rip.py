"""Empirical near-isometry audits and sample-size bound calculators.

The distortion estimates are sampled lower bounds on the true worst-case
distortion of an operator over a set; they can rule an operator out, never
certify it.  The bound evaluators compute the literal right-hand sides of the
sample-size formulas with caller-supplied constants (default 1), so they are
scaling calculators rather than certified thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import e, exp, log, prod, sqrt

import numpy as np
from scipy.integrate import quad

from .decomposition import random_low_rank
from .measurement import MeasurementOperator
from .tensor import kron, norm, unvect

DISTORTION_SETS = ("s1", "s2", "lowrank")
M_BOUND_FORMULAS = (
    "subgaussian_1stage",
    "sors_1stage",
    "subgaussian_2stage",
    "sors_2stage",
)


def _unit_sphere(rng, n: int) -> np.ndarray:
    while True:
        g = rng.standard_normal(n)
        s = np.linalg.norm(g)
        if s > 1e-12:
            return g / s


def sample_s1(n: int, kappa: int, seed=None) -> np.ndarray:
    """Kronecker product of ``kappa`` independent uniform unit-sphere vectors."""
    if n < 1 or kappa < 1:
        raise ValueError("n and kappa must be >= 1")
    rng = np.random.default_rng(seed)
    v = np.ones(1)
    for _ in range(kappa):
        v = kron(v, _unit_sphere(rng, n))
    return v


def sample_s2_pair(n: int, kappa: int, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Two orthogonal Kronecker-structured unit vectors.

    Orthogonality comes from projecting the first factor of the second vector
    against the first factor of the first; degenerate draws are resampled.
    """
    if n < 2:
        raise ValueError("n must be >= 2 to admit orthogonal pairs")
    rng = np.random.default_rng(seed)
    while True:
        u = [_unit_sphere(rng, n) for _ in range(kappa)]
        v = [_unit_sphere(rng, n) for _ in range(kappa)]
        w = v[0] - np.dot(v[0], u[0]) * u[0]
        s = np.linalg.norm(w)
        if s < 1e-8:
            continue
        v[0] = w / s
        x = np.ones(1)
        y = np.ones(1)
        for uk, vk in zip(u, v):
            x = kron(x, uk)
            y = kron(y, vk)
        if abs(np.dot(x, y)) <= 1e-10:
            return x, y


def sample_s2(n: int, kappa: int, seed=None) -> np.ndarray:
    """Normalized sum of two orthogonal Kronecker-structured unit vectors."""
    x, y = sample_s2_pair(n, kappa, seed)
    s = x + y
    return s / np.linalg.norm(s)


def relative_distortion(op: MeasurementOperator, x) -> float:
    """``| ||op(x)||^2 - ||x||^2 | / ||x||^2``."""
    nx2 = norm(x) ** 2
    if nx2 == 0.0:
        raise ValueError("distortion is undefined for the zero tensor")
    return abs(norm(op.apply(x)) ** 2 - nx2) / nx2


@dataclass(frozen=True)
class DistortionEstimate:
    """Max sampled relative distortion; a lower bound on the true worst case."""

    delta_hat: float
    sample_count: int
    set_label: str
    rank: tuple[int, ...] | None = None
    seed: int | None = None
    note: str = field(default="sampled lower bound on the worst-case distortion")

    def to_record(self) -> dict:
        return {
            "delta_hat": self.delta_hat,
            "sample_count": self.sample_count,
            "set_label": self.set_label,
            "rank": list(self.rank) if self.rank is not None else None,
            "seed": self.seed,
            "note": self.note,
        }


def estimate_distortion(
    op: MeasurementOperator, set_label: str, samples: int, seed=None, rank=None
) -> DistortionEstimate:
    """Max relative distortion of ``op`` over ``samples`` draws from a set.

    ``s1``/``s2`` draw Kronecker-structured unit vectors (the operator input
    must have all mode lengths equal); ``lowrank`` draws random unit-norm
    tensors of multilinear rank ``rank``.  Samples come from one sequential
    generator, so growing ``samples`` with a fixed seed extends the same
    stream and the estimate can only increase.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if set_label not in DISTORTION_SETS:
        raise ValueError(f"set_label must be one of {DISTORTION_SETS}")
    shape = op.input_shape
    if set_label == "lowrank":
        if rank is None:
            raise ValueError("the lowrank set needs a rank")
    else:
        if any(m != shape[0] for m in shape):
            raise ValueError(f"s1/s2 sampling needs equal mode lengths, got {shape}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        if set_label == "s1":
            x = unvect(sample_s1(shape[0], len(shape), rng), shape)
        elif set_label == "s2":
            x = unvect(sample_s2(shape[0], len(shape), rng), shape)
        else:
            x = random_low_rank(shape, rank, rng)
        worst = max(worst, relative_distortion(op, x))
    return DistortionEstimate(
        delta_hat=worst,
        sample_count=samples,
        set_label=set_label,
        rank=tuple(rank) if rank is not None else None,
        seed=seed if isinstance(seed, int) else None,
    )


def image_coherence(matrix, vectors) -> float:
    """Largest inner product between images of distinct input vectors."""
    v = np.column_stack([np.asarray(x, dtype=np.float64) for x in vectors])
    gram = v.T @ v
    if np.max(np.abs(gram - np.eye(v.shape[1]))) > 1e-10:
        raise ValueError("vectors must be pairwise orthonormal to 1e-10")
    img = np.asarray(matrix, dtype=np.float64) @ v
    g = img.T @ img
    np.fill_diagonal(g, 0.0)
    return float(np.max(np.abs(g)))


def coherence_check(matrix, vectors, eps: float) -> bool:
    """True iff images of orthonormal vectors stay ``eps``-nearly orthogonal."""
    return image_coherence(matrix, vectors) <= eps


@dataclass(frozen=True)
class BoundReport:
    """Literal evaluation of a sample-size lower-bound formula."""

    formula: str
    inputs: dict
    constants: dict
    m_bound: float
    m_second_bound: float | None = None

    def to_record(self) -> dict:
        return {
            "formula": self.formula,
            "inputs": dict(self.inputs),
            "constants": dict(self.constants),
            "m_bound": self.m_bound,
            "m_second_bound": self.m_second_bound,
        }


def _validate_bound_inputs(delta, r, d, kappa, n, eta):
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if r < 2:
        raise ValueError("r must be >= 2")
    if kappa < 1 or d % kappa != 0:
        raise ValueError(f"kappa={kappa} does not divide d={d}")
    if n < 1:
        raise ValueError("n must be >= 1")


def _first_stage_subgaussian(delta, r, d, kappa, n, eta, c, log_arg_scale):
    """C * delta^-2 * r^(2d) * max of the two complexity terms."""
    term1 = n * d**2 * log(kappa) / kappa
    term2 = (d**2 / kappa**2) * log(log_arg_scale * d / (kappa * eta))
    return c * delta**-2 * r ** (2 * d) * max(term1, term2)


def _first_stage_sors(delta, r, d, kappa, n, eta, c1, c2):
    base = r ** (2 * d) * n * d**2 * log(kappa) / kappa
    log_a = log(2 * d / (kappa * eta))
    # evaluate the nested logarithm argument in log space to dodge overflow
    ln_inner = log(c2) - 2 * log(delta) + log(base) + log(log_a)
    log_b = log(2 * e * d / (kappa * eta)) + kappa * log(n)
    big_l = log_a * log_b * ln_inner**2
    return c1 * delta**-2 * base * big_l


def _second_stage_bracket(delta, r, d, kappa, m):
    return (
        ((r**d * kappa + d * m * r**kappa) / kappa) * log(d / kappa + 1.0)
        + (d * m * r**kappa / kappa) * log(1.0 + delta * r**d)
        + d**2 * m * r**kappa * delta / kappa**2
    )


def eval_m_bound(formula: str, *, delta, r, d, kappa, n, eta, constants=None) -> BoundReport:
    """Evaluate one of the sample-size lower-bound formulas.

    Two-stage formulas first evaluate their own intermediate bound ``m`` and
    feed it, unrounded, into the second-stage expression.
    """
    if formula not in M_BOUND_FORMULAS:
        raise ValueError(f"formula must be one of {M_BOUND_FORMULAS}")
    _validate_bound_inputs(delta, r, d, kappa, n, eta)
    consts = {"C": 1.0, "C1": 1.0, "C2": 1.0, "c1": 1.0}
    consts.update(constants or {})
    inputs = {"delta": delta, "r": r, "d": d, "kappa": kappa, "n": n, "eta": eta}

    second = None
    if formula == "subgaussian_1stage":
        m = _first_stage_subgaussian(delta, r, d, kappa, n, eta, consts["C"], 1.0)
    elif formula == "sors_1stage":
        m = _first_stage_sors(delta, r, d, kappa, n, eta, consts["C1"], consts["C2"])
    elif formula == "subgaussian_2stage":
        m = _first_stage_subgaussian(delta, r, d, kappa, n, eta, consts["C"], 2.0)
        second = consts["C"] * delta**-2 * max(
            _second_stage_bracket(delta, r, d, kappa, m), log(2.0 / eta)
        )
    else:
        m = _first_stage_sors(delta, r, d, kappa, n, eta, consts["C1"], consts["C2"])
        bracket = _second_stage_bracket(delta, r, d, kappa, m)
        log_tail = log(consts["c1"] / delta**2) + log(log(4.0 / eta)) + log(bracket)
        tail_l = log_tail**2 * log(4.0 / eta) * log(4.0 * e * m / eta)
        second = consts["C"] * delta**-2 * bracket * tail_l
    return BoundReport(
        formula=formula,
        inputs=inputs,
        constants=consts,
        m_bound=float(m),
        m_second_bound=float(second) if second is not None else None,
    )


def s12_log_covering(n: int, kappa: int, t: float) -> float:
    """Log of the covering-number bound ``((6*kappa/t)**(kappa*n) + 1)**2``."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    return 2.0 * float(np.logaddexp(kappa * n * log(6.0 * kappa / t), 0.0))


def fancyb_log_covering(
    r: int, d: int, n: int, t: float, big_r: float = 1.0, mu: float = 0.0
) -> float:
    """Log covering bound for near-orthogonal rank-``r`` tensor families.

    With ``mu=0`` and ``big_r=1`` the bound tightens to
    ``(r**d + d*n*r) * ln(3*(d+1)/t)``.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if big_r < 1.0:
        raise ValueError("big_r must be >= 1")
    if not 0.0 <= mu < 1.0:
        raise ValueError("mu must lie in [0, 1)")
    if mu == 0.0 and big_r == 1.0:
        return (r**d + d * n * r) * log(3.0 * (d + 1) / t)
    return (
        (r**d + r * n * d) * log(6.0 * (d + 1) / t)
        + (r**d * d / 2.0) * log(big_r**2 + mu * r)
        + (d * n * r / 2.0) * log(big_r**2 + mu * r**d)
        + (d - 1) * d * n * r * log(big_r)
    )


def eval_covering_bound(set_name: str, t: float, **params) -> float:
    """Log-space covering-number upper bound for ``s12`` or ``fancyb``."""
    if set_name == "s12":
        return s12_log_covering(params["n"], params["kappa"], t)
    if set_name == "fancyb":
        return fancyb_log_covering(
            params["r"],
            params["d"],
            params["n"],
            t,
            big_r=params.get("big_r", 1.0),
            mu=params.get("mu", 0.0),
        )
    raise ValueError("set_name must be 's12' or 'fancyb'")


def dudley_integrand(set_name: str, t: float, **params) -> float:
    """``sqrt(max(ln N(t), 0))`` with the bound collapsed where it is vacuous.

    The Kronecker-product set lies on the unit sphere, so one point covers it
    for any ``t >= 2`` and the log covering number is zero there.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if set_name == "s12" and t >= 2.0:
        return 0.0
    return sqrt(max(eval_covering_bound(set_name, t, **params), 0.0))


def dudley_estimate(set_name: str, **params) -> float:
    """Numeric value of ``int_0^1 sqrt(ln N(t)) dt`` for the covering bound."""
    value, _ = quad(
        lambda t: dudley_integrand(set_name, t, **params),
        0.0,
        1.0,
        epsabs=1e-6,
        limit=200,
    )
    return float(value)
