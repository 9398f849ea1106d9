import numpy as np
import pytest

from lrrfir.baselines import solve_ls, solve_tls
from lrrfir.exceptions import RankError


def test_ls_identity(rng):
    y = rng.standard_normal(6)
    np.testing.assert_allclose(solve_ls(np.eye(6), y), y, atol=1e-15)


def test_ls_consistent_system(rng):
    U = rng.standard_normal((30, 5))
    h = rng.standard_normal(5)
    np.testing.assert_allclose(solve_ls(U, U @ h), h, atol=1e-10)


def test_ls_normal_equations(rng):
    U = rng.standard_normal((20, 5))
    y = rng.standard_normal(20)
    np.testing.assert_allclose(solve_ls(U, y), np.linalg.solve(U.T @ U, U.T @ y), atol=1e-10)


def test_ls_rank_error():
    with pytest.raises(RankError):
        solve_ls(np.ones((5, 2)), np.ones(5))


def test_tls_zero_sigma_is_ls(rng):
    U = rng.standard_normal((12, 4))
    y = rng.standard_normal(12)
    np.testing.assert_array_equal(solve_tls(U, y, 0.0), solve_ls(U, y))


def test_tls_identity_closed_form(rng):
    q, s = 7, 0.3
    y = rng.standard_normal(q)
    np.testing.assert_allclose(solve_tls(np.eye(q), y, s, N=q), y / (1 + q * s * s), atol=1e-14)


def test_tls_augmented_oracle(rng):
    U = rng.standard_normal((25, 6))
    y = rng.standard_normal(25)
    lam = 25 * 0.2 ** 2
    M = np.vstack([U, np.sqrt(lam) * np.eye(6)])
    ref = np.linalg.lstsq(M, np.concatenate([y, np.zeros(6)]), rcond=None)[0]
    np.testing.assert_allclose(solve_tls(U, y, 0.2), ref, atol=1e-10)


def test_tls_norm_nonincreasing_in_sigma(rng):
    U = rng.standard_normal((30, 8))
    y = rng.standard_normal(30)
    norms = [np.linalg.norm(solve_tls(U, y, s)) for s in np.linspace(0, 2, 15)]
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


def test_tls_rank_deficient():
    with pytest.raises(RankError):
        solve_tls(np.ones((5, 2)), np.ones(5), 0.0)
    solve_tls(np.ones((5, 2)), np.ones(5), 0.1)
    with pytest.raises(ValueError):
        solve_tls(np.eye(2), np.ones(2), -1.0)
