"""Distortion sampling, coherence, and the bound calculators with
hand-computed cross-checks."""
import math

import numpy as np
import pytest

from modewise import (
    VectorizedOperator,
    coherence_check,
    dudley_estimate,
    dudley_integrand,
    estimate_distortion,
    eval_covering_bound,
    eval_m_bound,
    image_coherence,
    make_gaussian,
    multilinear_rank,
    relative_distortion,
    sample_s1,
    sample_s2,
    sample_s2_pair,
    unvect,
)


def test_sample_s1_norm_and_rank_one_structure():
    v = sample_s1(6, 3, seed=0)
    assert v.size == 216
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
    assert multilinear_rank(unvect(v, (6, 6, 6)), rel_tol=1e-10) == (1, 1, 1)

    single = sample_s1(9, 1, seed=1)
    assert single.size == 9
    assert np.linalg.norm(single) == pytest.approx(1.0, abs=1e-12)


def test_sample_s2_pair_orthogonal():
    x, y = sample_s2_pair(5, 2, seed=2)
    assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(y) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.dot(x, y)) <= 1e-10
    assert np.linalg.norm(x + y) == pytest.approx(math.sqrt(2.0), abs=1e-9)

    s = sample_s2(5, 2, seed=3)
    assert np.linalg.norm(s) == pytest.approx(1.0, abs=1e-12)


def test_distortion_zero_for_exact_isometry():
    rng = np.random.default_rng(4)
    q, _ = np.linalg.qr(rng.standard_normal((16, 16)))
    op = VectorizedOperator(q, (4, 4))
    for label in ("s1", "s2"):
        est = estimate_distortion(op, label, samples=50, seed=5)
        assert est.delta_hat <= 1e-10
    est = estimate_distortion(op, "lowrank", samples=20, seed=6, rank=(2, 2))
    assert est.delta_hat <= 1e-10


def test_distortion_monotone_in_samples():
    op = VectorizedOperator(make_gaussian(30, 64, seed=7), (8, 8))
    small = estimate_distortion(op, "s1", samples=40, seed=8)
    large = estimate_distortion(op, "s1", samples=200, seed=8)
    assert large.delta_hat >= small.delta_hat


def test_distortion_is_scale_invariant():
    rng = np.random.default_rng(9)
    op = VectorizedOperator(make_gaussian(20, 36, seed=10), (6, 6))
    x = rng.standard_normal((6, 6))
    assert relative_distortion(op, 7.5 * x) == pytest.approx(
        relative_distortion(op, x), rel=1e-10
    )


def test_distortion_validation():
    op = VectorizedOperator(make_gaussian(5, 12, seed=11), (3, 4))
    with pytest.raises(ValueError, match="equal mode lengths"):
        estimate_distortion(op, "s1", samples=5, seed=12)
    with pytest.raises(ValueError, match="rank"):
        estimate_distortion(op, "lowrank", samples=5, seed=13)
    with pytest.raises(ValueError, match="set_label"):
        estimate_distortion(op, "sparse", samples=5, seed=14)


def test_coherence_identity_and_scaling():
    vecs = list(np.eye(6)[:, :3].T)
    assert coherence_check(np.eye(6), vecs, eps=1e-12)
    assert coherence_check(2.0 * np.eye(6), vecs, eps=1e-12)
    with pytest.raises(ValueError, match="orthonormal"):
        coherence_check(np.eye(6), [np.ones(6), np.ones(6)], eps=0.5)


def test_coherence_bounded_by_pairwise_sum_distortion():
    # near-isometry on sums/differences of orthonormal vectors forces their
    # images to stay nearly orthogonal
    rng = np.random.default_rng(15)
    a = make_gaussian(90, 100, seed=16)
    q, _ = np.linalg.qr(rng.standard_normal((100, 10)))
    vecs = [q[:, i] for i in range(10)]
    eps = 0.0
    for i in range(10):
        for j in range(10):
            if i == j:
                continue
            for sign in (1.0, -1.0):
                w = vecs[i] + sign * vecs[j]
                dist = abs(np.linalg.norm(a @ w) ** 2 - np.linalg.norm(w) ** 2)
                eps = max(eps, dist / np.linalg.norm(w) ** 2)
    assert image_coherence(a, vecs) <= eps + 1e-12
    assert coherence_check(a, vecs, eps + 1e-12)


def test_m_bound_subgaussian_value():
    report = eval_m_bound(
        "subgaussian_1stage", delta=0.5, r=2, d=4, kappa=2, n=10, eta=0.01
    )
    # independent evaluation: 4 * 256 * max(10*16*ln2/2, 4*ln(4/(2*0.01)))
    expected = 4.0 * 256.0 * max(80.0 * math.log(2.0), 4.0 * math.log(200.0))
    assert report.m_bound == pytest.approx(expected, rel=1e-12)
    assert report.m_second_bound is None


def test_m_bound_delta_homogeneity():
    lo = eval_m_bound("subgaussian_1stage", delta=0.5, r=2, d=4, kappa=2, n=10, eta=0.1)
    hi = eval_m_bound("subgaussian_1stage", delta=0.25, r=2, d=4, kappa=2, n=10, eta=0.1)
    assert hi.m_bound == pytest.approx(4.0 * lo.m_bound, rel=1e-12)


def test_m_bound_constant_overrides_echoed():
    report = eval_m_bound(
        "subgaussian_1stage", delta=0.5, r=2, d=4, kappa=2, n=10, eta=0.1,
        constants={"C": 3.0},
    )
    base = eval_m_bound("subgaussian_1stage", delta=0.5, r=2, d=4, kappa=2, n=10, eta=0.1)
    assert report.m_bound == pytest.approx(3.0 * base.m_bound, rel=1e-12)
    assert report.constants["C"] == 3.0


def test_m_bound_two_stage_duplicate_arithmetic():
    delta, r, d, kappa, n, eta = 0.5, 2, 4, 4, 10, 0.05
    report = eval_m_bound(
        "subgaussian_2stage", delta=delta, r=r, d=d, kappa=kappa, n=n, eta=eta
    )
    # duplicate evaluation, written out separately
    m = (
        delta**-2
        * r ** (2 * d)
        * max(
            n * d**2 * math.log(kappa) / kappa,
            (d**2 / kappa**2) * math.log(2 * d / (kappa * eta)),
        )
    )
    bracket = (
        ((r**d * kappa + d * m * r**kappa) / kappa) * math.log(d / kappa + 1)
        + (d * m * r**kappa / kappa) * math.log(1 + delta * r**d)
        + d**2 * m * r**kappa * delta / kappa**2
    )
    expected = delta**-2 * max(bracket, math.log(2 / eta))
    assert report.m_bound == pytest.approx(m, rel=1e-12)
    assert report.m_second_bound == pytest.approx(expected, rel=1e-12)


def test_m_bound_sors_formulas_finite_and_positive():
    for formula in ("sors_1stage", "sors_2stage"):
        report = eval_m_bound(formula, delta=0.4, r=2, d=4, kappa=2, n=10, eta=0.01)
        assert math.isfinite(report.m_bound) and report.m_bound > 0
        if formula == "sors_2stage":
            assert math.isfinite(report.m_second_bound) and report.m_second_bound > 0


def test_m_bound_validation():
    with pytest.raises(ValueError, match="delta"):
        eval_m_bound("subgaussian_1stage", delta=1.5, r=2, d=4, kappa=2, n=10, eta=0.1)
    with pytest.raises(ValueError, match="r must"):
        eval_m_bound("subgaussian_1stage", delta=0.5, r=1, d=4, kappa=2, n=10, eta=0.1)
    with pytest.raises(ValueError, match="divide"):
        eval_m_bound("subgaussian_1stage", delta=0.5, r=2, d=4, kappa=3, n=10, eta=0.1)
    with pytest.raises(ValueError, match="formula"):
        eval_m_bound("bogus", delta=0.5, r=2, d=4, kappa=2, n=10, eta=0.1)


def test_covering_s12_collapse_point():
    assert eval_covering_bound("s12", 12.0, n=10, kappa=2) == math.log(4.0)


def test_covering_s12_log_space_value():
    got = eval_covering_bound("s12", 1.0, n=10, kappa=2)
    # ln(((12)^20 + 1)^2) evaluated independently
    expected = 2.0 * (20.0 * math.log(12.0) + math.log1p(12.0**-20))
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(2 * 20 * math.log(12.0), rel=1e-9)


def test_covering_s12_matches_direct_where_it_fits():
    for t in (2.0, 5.0, 9.0):
        direct = math.log(((12.0 / t) ** 6 + 1.0) ** 2)
        assert eval_covering_bound("s12", t, n=3, kappa=2) == pytest.approx(direct, rel=1e-9)


def test_covering_fancyb_remark_simplification():
    r, d, n, t = 2, 3, 5, 0.5
    got = eval_covering_bound("fancyb", t, r=r, d=d, n=n, big_r=1.0, mu=0.0)
    assert got == pytest.approx((r**d + d * n * r) * math.log(3 * (d + 1) / t), rel=1e-12)
    # the general bound is strictly looser than the tightened zero-mu form
    loose = eval_covering_bound("fancyb", t, r=r, d=d, n=n, big_r=1.0 + 1e-12, mu=0.0)
    assert loose > got


def test_covering_validation():
    with pytest.raises(ValueError, match="positive"):
        eval_covering_bound("s12", 0.0, n=4, kappa=2)
    with pytest.raises(ValueError, match="big_r"):
        eval_covering_bound("fancyb", 1.0, r=2, d=2, n=4, big_r=0.5)
    with pytest.raises(ValueError, match="mu"):
        eval_covering_bound("fancyb", 1.0, r=2, d=2, n=4, mu=1.5)


def test_dudley_integrand_collapses():
    assert dudley_integrand("s12", 12.0, n=10, kappa=2) == 0.0
    assert dudley_integrand("s12", 13.0, n=10, kappa=2) == 0.0
    assert dudley_integrand("s12", 0.5, n=10, kappa=2) > 0.0


def test_dudley_matches_riemann_sum():
    value = dudley_estimate("s12", n=10, kappa=2)
    points = 10_000
    ts = (np.arange(points) + 0.5) / points
    riemann = float(
        np.mean([dudley_integrand("s12", t, n=10, kappa=2) for t in ts])
    )
    assert value == pytest.approx(riemann, abs=1e-4)


def test_dudley_monotone_in_n():
    small = dudley_estimate("s12", n=5, kappa=2)
    large = dudley_estimate("s12", n=10, kappa=2)
    assert large > small
