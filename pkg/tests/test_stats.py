import numpy as np
import pytest

from csu import (
    correlation_from_covariance,
    degenerate_gaussian_logpdf,
    instance_stats,
    make_feature_map,
    stats_covariance,
    sym_eig,
)
from csu.stats import LOG_2PI, StatsCovariance


def test_instance_stats_hand_example():
    fm = make_feature_map((1, 1, 2, 2), [1.0, 2.0, 3.0, 4.0])
    st = instance_stats(fm, eps=1e-300)
    assert st.mu[0, 0] == 2.5
    # population variance of 1..4 is 1.25; eps=1e-300 is absorbed exactly
    assert st.sigma[0, 0] == np.sqrt(1.25)


def test_constant_plane_sigma_is_eps_exactly():
    for c in (0.0, 5.0, -3.25, 1e6):
        fm = make_feature_map((1, 1, 2, 2), np.full(4, c))
        st = instance_stats(fm, eps=1e-6)
        assert st.mu[0, 0] == c
        assert st.sigma[0, 0] == 1e-6  # eps added after the sqrt


def test_instance_stats_shapes_and_dtype():
    rng = np.random.default_rng(0)
    fm = make_feature_map(
        (3, 5, 4, 2), rng.standard_normal(120).astype(np.float32)
    )
    st = instance_stats(fm, eps=1e-6)
    assert st.mu.shape == (3, 5) and st.sigma.shape == (3, 5)
    assert st.mu.dtype == np.float64 and st.sigma.dtype == np.float64


def test_sigma_floor():
    rng = np.random.default_rng(1)
    fm = make_feature_map((4, 3, 2, 2), rng.standard_normal(48) * 1e-9)
    st = instance_stats(fm, eps=1e-6)
    assert np.all(st.sigma >= 1e-6)


def test_instance_stats_matches_numpy_reference():
    rng = np.random.default_rng(2)
    data = rng.standard_normal((2, 4, 3, 5))
    fm = make_feature_map(data.shape, data.reshape(-1))
    st = instance_stats(fm, eps=1e-6)
    np.testing.assert_allclose(st.mu, data.mean(axis=(2, 3)), rtol=1e-14)
    np.testing.assert_allclose(
        st.sigma, data.std(axis=(2, 3)) + 1e-6, rtol=1e-12
    )


def test_eps_validation():
    fm = make_feature_map((1, 1, 1, 1), [0.0])
    with pytest.raises(ValueError, match="eps"):
        instance_stats(fm, eps=0.0)
    with pytest.raises(ValueError, match="eps"):
        instance_stats(fm, eps=-1e-6)


def test_stats_covariance_hand_example():
    sc = stats_covariance([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(sc.center, [2.0, 3.0])
    np.testing.assert_array_equal(sc.cov, [[1.0, 1.0], [1.0, 1.0]])
    assert sc.batch_size == 2


def test_stats_covariance_single_row_is_zero():
    sc = stats_covariance([[5.0, -2.0, 7.0]])
    np.testing.assert_array_equal(sc.cov, np.zeros((3, 3)))
    np.testing.assert_array_equal(sc.center, [5.0, -2.0, 7.0])


def test_stats_covariance_identical_rows_zero():
    sc = stats_covariance(np.tile([1.5, 2.5], (6, 1)))
    np.testing.assert_array_equal(sc.cov, np.zeros((2, 2)))


def test_stats_covariance_population_divisor():
    # Divisor is B, not B - 1: var of {0, 2} is 1, not 2.
    sc = stats_covariance([[0.0], [2.0]])
    assert sc.cov[0, 0] == 1.0


def test_covariance_bitwise_symmetric():
    rng = np.random.default_rng(3)
    for _ in range(10):
        sc = stats_covariance(rng.standard_normal((7, 12)))
        np.testing.assert_array_equal(sc.cov, sc.cov.T)


def test_covariance_is_psd():
    rng = np.random.default_rng(4)
    for b, c in [(2, 8), (16, 8), (5, 5)]:
        sc = stats_covariance(rng.standard_normal((b, c)) * 3.0)
        sym_eig(sc.cov, psd=True)  # must not raise


def test_covariance_rank_bound():
    rng = np.random.default_rng(5)
    for b, c in [(1, 6), (2, 6), (4, 6), (8, 6), (3, 3)]:
        sc = stats_covariance(rng.standard_normal((b, c)))
        rank = int(
            (sym_eig(sc.cov, psd=True).eigenvalues > 1e-10).sum()
        )
        assert rank <= min(b - 1, c)


def test_stats_covariance_validation():
    with pytest.raises(ValueError, match="2-D"):
        stats_covariance(np.zeros(4))
    with pytest.raises(ValueError, match="symmetric"):
        StatsCovariance(
            cov=np.array([[1.0, 0.5], [0.2, 1.0]]),
            center=np.zeros(2),
            batch_size=2,
        )


def test_correlation_hand_examples():
    sc = StatsCovariance(
        cov=np.array([[4.0, 2.0], [2.0, 1.0]]), center=np.zeros(2), batch_size=3
    )
    np.testing.assert_allclose(
        correlation_from_covariance(sc), [[1.0, 1.0], [1.0, 1.0]]
    )
    sc = StatsCovariance(
        cov=np.array([[4.0, -1.0], [-1.0, 1.0]]),
        center=np.zeros(2),
        batch_size=3,
    )
    np.testing.assert_allclose(
        correlation_from_covariance(sc), [[1.0, -0.5], [-0.5, 1.0]]
    )


def test_correlation_zero_variance_fallback():
    sc = StatsCovariance(
        cov=np.array([[1.0, 0.0], [0.0, 0.0]]), center=np.zeros(2), batch_size=4
    )
    np.testing.assert_array_equal(
        correlation_from_covariance(sc), np.eye(2)
    )
    # All-zero covariance (B = 1) degrades to the identity pattern.
    sc = stats_covariance([[1.0, 2.0, 3.0]])
    np.testing.assert_array_equal(
        correlation_from_covariance(sc), np.eye(3)
    )


def test_correlation_bounded():
    rng = np.random.default_rng(6)
    sc = stats_covariance(rng.standard_normal((20, 6)))
    corr = correlation_from_covariance(sc)
    assert np.abs(corr).max() <= 1.0 + 1e-12
    np.testing.assert_allclose(np.diagonal(corr), np.ones(6))


def test_logpdf_rank_one_hand_example():
    # cov [[1,1],[1,1]] has spectrum {2, 0}; at the center the density is
    # -(1/2) log(2 pi) - (1/2) log 2.
    sc = stats_covariance([[0.0, 0.0], [2.0, 2.0]])
    eig = sym_eig(sc.cov, psd=True)
    logpdf, resid = degenerate_gaussian_logpdf(sc.center, sc, eig)
    np.testing.assert_allclose(logpdf, -0.5 * LOG_2PI - 0.5 * np.log(2.0))
    assert resid == 0.0


def test_logpdf_full_rank_identity():
    sc = StatsCovariance(cov=np.eye(2), center=np.zeros(2), batch_size=9)
    eig = sym_eig(sc.cov, psd=True)
    logpdf, resid = degenerate_gaussian_logpdf(np.zeros(2), sc, eig)
    np.testing.assert_allclose(logpdf, -LOG_2PI)
    logpdf, _ = degenerate_gaussian_logpdf(np.array([1.0, 0.0]), sc, eig)
    np.testing.assert_allclose(logpdf, -LOG_2PI - 0.5)


def test_logpdf_off_support_residual():
    sc = stats_covariance([[0.0, 0.0], [2.0, 2.0]])
    eig = sym_eig(sc.cov, psd=True)
    # [1, -1]/sqrt(2) is orthogonal to the support direction [1, 1].
    x = sc.center + np.array([1.0, -1.0]) / np.sqrt(2.0)
    logpdf, resid = degenerate_gaussian_logpdf(x, sc, eig)
    np.testing.assert_allclose(resid, 1.0, rtol=1e-12)
    on_support, _ = degenerate_gaussian_logpdf(sc.center, sc, eig)
    np.testing.assert_allclose(logpdf, on_support)  # off-support part ignored


def test_logpdf_quadratic_form_against_lstsq():
    rng = np.random.default_rng(7)
    rows = rng.standard_normal((4, 6))  # rank <= 3 < C
    sc = stats_covariance(rows)
    eig = sym_eig(sc.cov, psd=True)
    logdet = float(
        np.log(eig.eigenvalues[eig.eigenvalues > eig.rank_tol]).sum()
    )
    k = int((eig.eigenvalues > eig.rank_tol).sum())
    for row in rows:
        logpdf, resid = degenerate_gaussian_logpdf(row, sc, eig)
        assert resid < 1e-18
        d = row - sc.center
        quad = float(d @ np.linalg.lstsq(sc.cov, d, rcond=None)[0])
        expected = -0.5 * (k * LOG_2PI + logdet + quad)
        np.testing.assert_allclose(logpdf, expected, rtol=1e-8)


def test_logpdf_rank_zero_errors():
    sc = stats_covariance([[1.0, 2.0]])
    eig = sym_eig(sc.cov, psd=True)
    with pytest.raises(ValueError, match="rank 0"):
        degenerate_gaussian_logpdf(sc.center, sc, eig)


def test_logpdf_shape_mismatch():
    sc = stats_covariance([[0.0, 0.0], [1.0, 1.0]])
    eig = sym_eig(sc.cov, psd=True)
    with pytest.raises(ValueError, match="shape"):
        degenerate_gaussian_logpdf(np.zeros(3), sc, eig)
