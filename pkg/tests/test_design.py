import numpy as np
import pytest

from lrrfir.design import (RegressionProblem, assemble, build_toeplitz, column_rank,
                           cost_J1, cost_normalized, validate_weights)
from lrrfir.exceptions import ConfigError, RankError
from lrrfir.sim import DataRecord

from oracles import j1_double_entry, random_weights, toeplitz_loops


def _record(rng, N, q, sigma_y=0.1):
    u = rng.standard_normal(N + q - 1)
    y = rng.standard_normal(N) * sigma_y + np.convolve(u, rng.standard_normal(q), "valid")
    return DataRecord(u=u, u_tilde=u, y=y, N=N, q=q)


def test_toeplitz_small_example():
    a, b, c, d = 1.0, 2.0, 3.0, 4.0
    np.testing.assert_array_equal(build_toeplitz([a, b, c, d], 3, 2), [[b, a], [c, b], [d, c]])


def test_toeplitz_single_column():
    u = np.arange(1.0, 6.0)
    np.testing.assert_array_equal(build_toeplitz(u, 5, 1), u[:, None])


def test_toeplitz_matches_loops_and_structure(rng):
    u = rng.standard_normal(30)
    U = build_toeplitz(u, 21, 10)
    np.testing.assert_array_equal(U, toeplitz_loops(u, 21, 10))
    np.testing.assert_array_equal(U[:-1, :-1], U[1:, 1:])


def test_toeplitz_short_input():
    with pytest.raises(IndexError, match="missing"):
        build_toeplitz(np.ones(5), 4, 3)


def test_weights_validation():
    validate_weights([0.5, 0.5, 1.0])
    for bad in ([1.0, 0.5], [0.0, 1.0], [0.5, 0.9], []):
        with pytest.raises(ConfigError):
            validate_weights(bad)


def test_sigma_zero_normalization(rng):
    rec = _record(rng, 40, 5)
    p = assemble(rec, 0.0, 1.0)
    np.testing.assert_array_equal(p.A_bar[40:], 0.0)
    np.testing.assert_allclose(p.T, 1 / np.linalg.norm(p.U, axis=0), rtol=1e-14)


def test_augmented_column_norms(rng):
    rec = _record(rng, 1000, 8)
    p = assemble(rec, 0.03, 1.0)
    np.testing.assert_allclose(np.sum(p.A_bar ** 2, axis=0),
                               np.sum(p.U ** 2, axis=0) + 1000 * 0.0009, rtol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(p.A, axis=0), 1.0, atol=1e-12)


def test_normalization_idempotent(rng):
    p = assemble(_record(rng, 50, 6), 0.1, 1.0)
    A2 = p.A / np.linalg.norm(p.A, axis=0)
    np.testing.assert_allclose(A2, p.A, atol=1e-14)


def test_gram_and_corr_match_explicit(rng):
    p = assemble(_record(rng, 60, 7), 0.2, 1.0)
    np.testing.assert_allclose(p.gram, p.A.T @ p.A, atol=1e-12)
    np.testing.assert_allclose(p.corr, p.A.T @ p.b, atol=1e-12)


def test_cost_at_zero(rng):
    p = assemble(_record(rng, 30, 4), 0.05, 2.5)
    assert cost_J1(np.zeros(4), p) == pytest.approx(p.y @ p.y / 2.5, rel=1e-14)


def test_cost_forms_agree(rng):
    for _ in range(100):
        N, q = rng.integers(5, 40), rng.integers(1, 6)
        p = assemble(_record(rng, N, q), rng.uniform(0, 0.5), rng.uniform(0.01, 10),
                     random_weights(rng, q))
        xt = rng.standard_normal(q) * rng.integers(0, 2, q)
        a = cost_J1(p.T * xt, p)
        b = cost_normalized(xt, p)
        assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300)


def test_cost_double_entry(rng):
    rec = _record(rng, 25, 4)
    w = random_weights(rng, 4)
    p = assemble(rec, 0.07, 0.8, w)
    x = rng.standard_normal(4)
    ref = j1_double_entry(x, p.U, p.y, 25, 0.07, 0.8, w)
    assert cost_J1(x, p) == pytest.approx(ref, rel=1e-12)


def test_input_noise_gram_identity():
    # E[Delta^T Delta] / N = sigma_u^2 I for the Toeplitz noise matrix
    rng = np.random.default_rng(2024)
    N, q, s, draws = 50, 4, 0.3, 200
    M = np.empty((draws, q, q))
    for d in range(draws):
        D = build_toeplitz(s * rng.standard_normal(N + q - 1), N, q)
        M[d] = D.T @ D / N
    mean = M.mean(axis=0)
    se = M.std(axis=0, ddof=1) / np.sqrt(draws)
    assert np.all(np.abs(mean - s * s * np.eye(q)) <= 3 * se + 1e-15)


def test_zero_column_rejected():
    u = np.zeros(12)
    rec = DataRecord(u=u, u_tilde=u, y=np.ones(10), N=10, q=3)
    with pytest.raises(RankError):
        assemble(rec, 0.0, 1.0)
    assemble(rec, 0.1, 1.0)  # the ridge block makes it well posed


def test_rank_deficient_rejected():
    u = np.ones(12)  # constant input: all columns equal
    rec = DataRecord(u=u, u_tilde=u, y=np.ones(10), N=10, q=3)
    with pytest.raises(RankError):
        assemble(rec, 0.0, 1.0)


def test_bad_parameters(rng):
    rec = _record(rng, 10, 2)
    with pytest.raises(ConfigError):
        assemble(rec, 0.1, 0.0)
    with pytest.raises(ConfigError):
        assemble(rec, -0.1, 1.0)


def test_column_rank():
    assert column_rank(np.eye(3)) == 3
    assert column_rank(np.ones((4, 3))) == 1


def test_with_gamma_shares_caches(rng):
    p = assemble(_record(rng, 20, 3), 0.1, 1.0)
    G = p.gram
    p2 = p.with_gamma(3.0)
    assert p2.gamma == 3.0 and p2.gram is G
    assert isinstance(p2, RegressionProblem)
