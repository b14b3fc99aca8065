import numpy as np
import pytest

from oracles import sk_direct
from skmors import kriging
from skmors.core import SampleStore
from skmors.errors import InsufficientReplicationsError, InvalidInputError
from skmors.kriging import KernelParams, fit, fit_arrays, kernel_cov, log_likelihood, predict


def test_kernel_cov_examples():
    p = KernelParams(1.0, [1.0])
    assert kernel_cov([0.3], [0.3], p) == 1.0
    assert kernel_cov([0.0], [1.0], p) == pytest.approx(np.exp(-1.0), abs=1e-12)
    far = [kernel_cov([0.0], [d], p) for d in (1, 2, 4, 8)]
    assert all(a > b for a, b in zip(far, far[1:])) and far[-1] < 1e-20
    q = KernelParams(2.0, [0.5, 3.0])
    assert kernel_cov([0, 1], [1, 0], q) == pytest.approx(kernel_cov([1, 0], [0, 1], q))


def test_kernel_params_validation():
    with pytest.raises(InvalidInputError):
        KernelParams(0.0, [1.0])
    with pytest.raises(InvalidInputError):
        KernelParams(1.0, [1.0, -1.0])


def _store(rng, n, m=1, reps=4, scale=1.0):
    st = SampleStore(n, m)
    for i in range(n):
        st.record(i, rng.normal(size=(reps, m)) * scale)
    return st


def test_intrinsic_cov(rng):
    st = SampleStore(2, 1)
    st.record(0, [[-1.0], [1.0], [-1.0], [1.0]])  # s^2 = 4/3
    st.record(1, [[2.0], [2.0], [2.0]])
    C = kriging.intrinsic_cov(st, 0)
    assert C[0, 0] == pytest.approx((4 / 3) / 4)
    assert C[1, 1] == 0.0 and C[0, 1] == 0.0
    big = _store(rng, 10, m=2)
    np.testing.assert_allclose(np.diag(kriging.intrinsic_cov(big, 1)), big.variances[:, 1] / big.counts)


def test_intrinsic_cov_needs_two_reps():
    st = SampleStore(2, 1)
    st.record(0, [[1.0], [2.0]])
    st.record(1, [[1.0]])
    with pytest.raises(InsufficientReplicationsError):
        kriging.intrinsic_cov(st, 0)


def test_fit_rejects_duplicate_or_single_design():
    with pytest.raises(InvalidInputError):
        fit_arrays([[0.5], [0.5]], [1.0, 2.0], [0.0, 0.0])
    with pytest.raises(InvalidInputError):
        fit_arrays([[0.5]], [1.0], [0.0])


def test_gradient_matches_finite_differences(rng):
    X = rng.random((12, 2))
    y = np.sin(3 * X[:, 0]) + X[:, 1]
    noise = rng.uniform(0.01, 0.1, 12)
    for theta in (np.array([0.2, -1.0, -0.5]), np.array([-0.5, 0.3, -1.5])):
        _, g = log_likelihood(theta, X, y, noise, grad=True)
        h = 1e-5
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            fd = (log_likelihood(theta + e, X, y, noise) - log_likelihood(theta - e, X, y, noise)) / (2 * h)
            assert g[k] == pytest.approx(fd, rel=1e-4, abs=1e-7)


def test_direct_solve_oracle(rng):
    X = np.sort(rng.random(5))[:, None]
    y = np.cos(4 * X[:, 0])
    noise = np.array([0.05, 0.02, 0.1, 0.03, 0.04])
    params = KernelParams(1.3, [0.4])
    model = fit_arrays(X, y, noise, params=params)
    Xnew = np.linspace(-0.2, 1.2, 15)[:, None]
    mu, var = model.predict(Xnew)
    mu_ref, var_ref = sk_direct(X, y, noise, 1.3, np.array([0.4]), Xnew)
    np.testing.assert_allclose(mu, mu_ref, atol=1e-9)
    np.testing.assert_allclose(var, var_ref, atol=1e-9)


def test_single_point_interpolation_and_far_field():
    X = np.array([[0.0], [1.0]])
    y = np.array([2.0, -1.0])
    model = fit_arrays(X, y, np.zeros(2), params=KernelParams(1.0, [0.3]))
    assert predict(model, [0.0])[0] == pytest.approx(2.0, abs=1e-8)
    assert predict(model, [1e3])[0] == pytest.approx(model.beta0, abs=1e-12)


def test_zero_noise_interpolates(rng):
    X = rng.random((25, 2))
    y = np.sin(5 * X[:, 0]) * np.cos(3 * X[:, 1])
    model = fit_arrays(X, y, np.zeros(25), rng=1)
    mu, var = model.predict(X)
    assert np.max(np.abs(mu - y)) <= 1e-6
    assert np.all(var >= 0)


def test_noise_breaks_interpolation(rng):
    X = np.linspace(0, 1, 12)[:, None]
    y = np.sin(6 * X[:, 0]) + rng.normal(0, 0.5, 12)
    model = fit_arrays(X, y, np.full(12, np.var(y)), rng=2)
    mu, _ = model.predict(X)
    assert np.max(np.abs(mu - y)) > 1e-3


def test_fitted_likelihood_beats_generating(rng):
    X = rng.random((40, 1))
    K = kriging.kernel_matrix(X, X, KernelParams(2.0, [0.5])) + 1e-8 * np.eye(40)
    y = np.linalg.cholesky(K) @ rng.normal(size=40)
    model = fit_arrays(X, y, np.zeros(40), rng=3)
    gen = fit_arrays(X, y, np.zeros(40), params=KernelParams(2.0, [0.5]))
    assert model.loglik >= gen.loglik - 1e-8


def test_variance_nonincreasing_in_replications(rng):
    X = np.linspace(0, 1, 8)[:, None]
    y = np.sin(4 * X[:, 0])
    s2 = np.full(8, 0.2)
    params = KernelParams(1.0, [0.3])
    prev = np.inf
    for r in (2, 4, 8, 16, 64):
        r_vec = np.full(8, 4.0)
        r_vec[3] = r
        model = fit_arrays(X, y, s2 / r_vec, params=params)
        _, var = model.predict(X[3:4])
        assert var[0] <= prev + 1e-12
        prev = var[0]


def test_permutation_invariance(rng):
    X = rng.random((10, 2))
    y = X[:, 0] ** 2 - X[:, 1]
    noise = rng.uniform(0.001, 0.01, 10)
    params = KernelParams(0.7, [0.4, 0.6])
    perm = rng.permutation(10)
    a = fit_arrays(X, y, noise, params=params)
    b = fit_arrays(X[perm], y[perm], noise[perm], params=params)
    Xnew = rng.random((6, 2))
    for u, v in zip(a.predict(Xnew), b.predict(Xnew)):
        np.testing.assert_allclose(u, v, atol=1e-10)


def test_fit_from_store_and_predict_all(rng):
    X = rng.random((15, 2))
    st = SampleStore(15, 2)
    for i in range(15):
        st.record(i, X[i] + 0.05 * rng.normal(size=(5, 2)))
    models = kriging.fit_all(X, st, rng=4)
    mu, var = kriging.predict_all(models, X)
    assert mu.shape == (15, 2) and var.shape == (15, 2)
    assert np.all(var >= 0)
    one = fit(X, st, 0, rng=4, n_starts=2)
    assert one.kernel.lengthscales.shape == (2,)


def test_warm_start_fit_runs(rng):
    X = rng.random((20, 2))
    y = X.sum(axis=1)
    first = fit_arrays(X, y, np.full(20, 1e-3), rng=5)
    again = fit_arrays(X, y, np.full(20, 1e-3), rng=6, warm_start=first.theta, n_starts=1)
    assert again.loglik >= first.loglik - 1e-6
