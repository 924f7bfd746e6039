"""HOSVD and rank-truncation tests; the d=2 case is checked against a full
SVD oracle."""
import numpy as np
import pytest

from modewise import (
    check_orthogonal_subtensors,
    hosvd,
    multilinear_rank,
    norm,
    outer_product,
    random_low_rank,
    truncate_rank,
    unfold,
)


def test_hosvd_rank_one():
    u = np.array([3.0, 4.0])          # norm 5
    v = np.array([1.0, 2.0, 2.0])     # norm 3
    w = np.array([2.0, 0.0])          # norm 2
    c = 1.25
    x = c * outer_product([u, v, w])
    dec = hosvd(x)
    # numerically the tiny singular values are not exactly zero; the leading
    # core entry carries the full norm
    assert abs(abs(dec.core[0, 0, 0]) - c * 5 * 3 * 2) < 1e-10
    assert multilinear_rank(x, rel_tol=1e-10) == (1, 1, 1)


def test_hosvd_reconstruction_and_core_norm():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((5, 5, 5))
    dec = hosvd(x)
    assert norm(dec.reconstruct() - x) <= 1e-10 * norm(x)
    assert abs(norm(dec.core) - norm(x)) <= 1e-12 * norm(x)
    for u in dec.factors:
        assert np.max(np.abs(u.T @ u - np.eye(u.shape[1]))) < 1e-10


def test_hosvd_zero_tensor_rejected():
    with pytest.raises(ValueError, match="zero tensor"):
        hosvd(np.zeros((3, 3)))


def test_hosvd_core_has_orthogonal_subtensors():
    rng = np.random.default_rng(1)
    dec = hosvd(rng.standard_normal((4, 5, 6)))
    assert check_orthogonal_subtensors(dec.core, tol=1e-8)


def test_hosvd_is_projection():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((4, 4, 4))
    first = hosvd(x).reconstruct()
    second = hosvd(first).reconstruct()
    assert norm(second - first) <= 1e-10 * norm(first)


def test_hosvd_deterministic_signs():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((4, 5, 3))
    a = hosvd(x)
    b = hosvd(x.copy())
    for ua, ub in zip(a.factors, b.factors):
        assert np.array_equal(ua, ub)


def test_orthogonal_subtensor_examples():
    diag = np.zeros((2, 2, 2))
    diag[0, 0, 0] = 1.3
    diag[1, 1, 1] = -0.4
    assert check_orthogonal_subtensors(diag)

    ones = np.ones((2, 2))
    # mode slices have inner product 2, far from orthogonal
    assert unfold(ones, 0)[0] @ unfold(ones, 0)[1] == 2.0
    assert not check_orthogonal_subtensors(ones)


def test_truncate_fixed_point_and_zero():
    rng = np.random.default_rng(4)
    x = random_low_rank((6, 6, 6), (2, 2, 2), seed=rng)
    out = truncate_rank(x, (2, 2, 2))
    assert norm(out - x) <= 1e-10 * norm(x)

    rank_one = random_low_rank((5, 4, 3), (1, 1, 1), seed=rng)
    assert norm(truncate_rank(rank_one, (1, 1, 1)) - rank_one) <= 1e-10

    assert np.array_equal(truncate_rank(np.zeros((3, 3)), (1, 1)), np.zeros((3, 3)))


def test_truncate_idempotent_and_rank_bound():
    rng = np.random.default_rng(5)
    z = rng.standard_normal((5, 6, 7))
    once = truncate_rank(z, (2, 3, 2))
    twice = truncate_rank(once, (2, 3, 2))
    assert norm(twice - once) <= 1e-10 * norm(once)
    assert all(r <= t for r, t in zip(multilinear_rank(once, rel_tol=1e-10), (2, 3, 2)))


def test_truncate_rank_errors():
    with pytest.raises(ValueError, match="outside"):
        truncate_rank(np.ones((3, 3)), (4, 1))
    with pytest.raises(ValueError, match="entries"):
        truncate_rank(np.ones((3, 3)), (1, 1, 1))


def test_truncate_matrix_quasi_optimal_vs_svd_oracle():
    rng = np.random.default_rng(6)
    for _ in range(5):
        z = rng.standard_normal((4, 4))
        got = truncate_rank(z, (1, 1))
        u, s, vt = np.linalg.svd(z)
        best = s[0] * np.outer(u[:, 0], vt[0])
        best_err = norm(z - best)
        assert norm(z - got) <= np.sqrt(2.0) * best_err + 1e-12


def test_random_low_rank_properties():
    x = random_low_rank((8, 8, 8, 8), (2, 2, 2, 2), seed=123)
    assert norm(x) == pytest.approx(1.0, abs=1e-12)
    for mode in range(4):
        s = np.linalg.svd(unfold(x, mode), compute_uv=False)
        assert s[2] / s[0] <= 1e-10
    again = random_low_rank((8, 8, 8, 8), (2, 2, 2, 2), seed=123)
    assert np.array_equal(x, again)
    other = random_low_rank((8, 8, 8, 8), (2, 2, 2, 2), seed=124)
    assert not np.array_equal(x, other)
