"""Stochastic kriging with a squared-exponential kernel and constant trend.

One model is fitted per objective from the sample means and the intrinsic
variances of those means (s^2 / r, no common random numbers). Inputs are
mapped to the unit box and outputs standardized before fitting; every
public quantity is reported back in original units.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize
from scipy.stats import qmc

from .core import SampleStore
from .errors import InsufficientReplicationsError, InvalidInputError, ModelFitError

JITTER_START = 1e-10
JITTER_MAX = 1e-4
LENGTH_BOUNDS = (1e-3, 1e3)
VARIANCE_BOUNDS = (1e-6, 1e3)
_LOG2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class KernelParams:
    variance: float
    lengthscales: np.ndarray

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=np.float64))
        object.__setattr__(self, "lengthscales", ls)
        if not self.variance > 0 or not np.all(ls > 0):
            raise InvalidInputError("kernel variance and length-scales must be positive")


def kernel_cov(xi, xh, p: KernelParams) -> float:
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    xh = np.atleast_1d(np.asarray(xh, dtype=np.float64))
    if xi.shape != xh.shape or xi.shape != p.lengthscales.shape:
        raise InvalidInputError("dimension mismatch between points and length-scales")
    return float(p.variance * np.exp(-np.sum(((xi - xh) / p.lengthscales) ** 2)))


def kernel_matrix(A, B, p: KernelParams) -> np.ndarray:
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    Z = (A[:, None, :] - B[None, :, :]) / p.lengthscales
    return p.variance * np.exp(-np.sum(Z * Z, axis=2))


def intrinsic_cov(store: SampleStore, j: int) -> np.ndarray:
    """Diagonal covariance of the sample means of objective ``j``."""
    if np.any(store.counts < 2):
        raise InsufficientReplicationsError("every design needs at least 2 replications")
    return np.diag(store.variances[:, j] / store.counts)


def _cholesky(K, base):
    """Cholesky of K + jitter*I with escalating jitter; returns (L, jitter) or (None, None)."""
    scale = max(float(np.mean(np.diag(K))), np.finfo(float).tiny)
    rel = base
    while rel <= JITTER_MAX * (1 + 1e-12):
        jitter = rel * scale
        try:
            L = linalg.cholesky(K + jitter * np.eye(K.shape[0]), lower=True, check_finite=False)
            return L, jitter
        except linalg.LinAlgError:
            rel *= 10.0
    return None, None


class _Likelihood:
    """Concentrated Gaussian log-likelihood in log hyperparameters.

    theta = (log v^2, log l_1, ..., log l_d); the trend constant is profiled
    out by generalized least squares at each theta.
    """

    def __init__(self, X, y, noise, jitter_start=JITTER_START):
        self.X = X
        self.y = y
        self.noise = noise
        self.n, self.d = X.shape
        self.sqdist = (X[:, None, :] - X[None, :, :]) ** 2  # (n, n, d)
        self.jitter_start = jitter_start

    def _cov(self, theta):
        v2 = np.exp(theta[0])
        ls = np.exp(theta[1:])
        C = v2 * np.exp(-np.sum(self.sqdist / ls**2, axis=2))
        return C, v2, ls

    def evaluate(self, theta, grad=True):
        C, v2, ls = self._cov(theta)
        K = C + np.diag(self.noise)
        L, jitter = _cholesky(K, self.jitter_start)
        if L is None:
            return None
        ones = np.ones(self.n)
        Ki1 = linalg.cho_solve((L, True), ones, check_finite=False)
        Kiy = linalg.cho_solve((L, True), self.y, check_finite=False)
        denom = ones @ Ki1
        beta0 = (ones @ Kiy) / denom
        alpha = Kiy - beta0 * Ki1
        resid = self.y - beta0
        ll = -0.5 * resid @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * self.n * _LOG2PI
        if not grad:
            return ll, None
        Kinv = linalg.cho_solve((L, True), np.eye(self.n), check_finite=False)
        W = np.outer(alpha, alpha) - Kinv
        g = np.empty(1 + self.d)
        g[0] = 0.5 * np.sum(W * C)
        WC = W * C
        g[1:] = np.einsum("ij,ijq->q", WC, self.sqdist) / ls**2
        return ll, g

    def negative(self, theta):
        out = self.evaluate(theta)
        if out is None:
            # factorization impossible here; steer the optimizer away
            return 1e10, np.zeros_like(theta)
        ll, g = out
        return -ll, -g


def log_likelihood(theta, X, y, noise, grad=False):
    """Concentrated log-likelihood (and gradient) for scaled data; used by tests and fit."""
    out = _Likelihood(np.asarray(X, float), np.asarray(y, float), np.asarray(noise, float)).evaluate(
        np.asarray(theta, float), grad=grad
    )
    if out is None:
        raise ModelFitError("covariance not positive definite", params=np.asarray(theta))
    return out if grad else out[0]


@dataclass
class SKModel:
    beta0: float
    kernel: KernelParams
    X: np.ndarray
    means: np.ndarray
    noise: np.ndarray
    jitter: float
    loglik: float
    theta: np.ndarray
    x_lo: np.ndarray = field(repr=False)
    x_span: np.ndarray = field(repr=False)
    y_center: float = field(repr=False)
    y_scale: float = field(repr=False)
    _chol: np.ndarray = field(repr=False)
    _alpha: np.ndarray = field(repr=False)
    _Ki1: np.ndarray = field(repr=False)
    _denom: float = field(repr=False)
    _scaled: KernelParams = field(repr=False)
    _Xs: np.ndarray = field(repr=False)
    _jitter_s: float = field(repr=False, default=0.0)

    def predict(self, Xnew):
        """Vectorized predictions; returns (means, variances) in original units."""
        Xnew = np.atleast_2d(np.asarray(Xnew, dtype=np.float64))
        if Xnew.shape[1] != self.X.shape[1]:
            raise InvalidInputError("prediction points have the wrong dimension")
        if not np.all(np.isfinite(Xnew)):
            raise InvalidInputError("prediction points must be finite")
        Zs = (Xnew - self.x_lo) / self.x_span
        c = kernel_matrix(Zs, self._Xs, self._scaled)  # (q, n)
        # the jitter is treated as a white component of the extrinsic field,
        # so a prediction exactly at a design point sees it too
        same = np.all(Zs[:, None, :] == self._Xs[None, :, :], axis=2)
        c = c + self._jitter_s * same
        prior = self._scaled.variance + self._jitter_s * same.any(axis=1)
        mean_s = self.beta0_scaled + c @ self._alpha
        V = linalg.cho_solve((self._chol, True), c.T, check_finite=False)  # (n, q)
        gamma = 1.0 - self._Ki1 @ c.T
        var_s = prior - np.sum(c.T * V, axis=0) + gamma**2 / self._denom
        var_s = np.maximum(var_s, 0.0)
        return mean_s * self.y_scale + self.y_center, var_s * self.y_scale**2

    @property
    def beta0_scaled(self):
        return (self.beta0 - self.y_center) / self.y_scale


def predict(model: SKModel, x):
    """Prediction and prediction variance at a single point."""
    mu, var = model.predict(np.atleast_1d(np.asarray(x, dtype=np.float64))[None, :])
    return float(mu[0]), float(var[0])


def _prepare(X, means, noise):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    means = np.asarray(means, dtype=np.float64).ravel()
    noise = np.asarray(noise, dtype=np.float64).ravel()
    n = X.shape[0]
    if means.shape[0] != n or noise.shape[0] != n:
        raise InvalidInputError("designs, means and noise must have matching lengths")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(means)) and np.all(np.isfinite(noise))):
        raise InvalidInputError("non-finite training data")
    if np.any(noise < 0):
        raise InvalidInputError("intrinsic variances must be nonnegative")
    if np.unique(X, axis=0).shape[0] < 2:
        raise InvalidInputError("need at least 2 distinct design points")
    if np.unique(X, axis=0).shape[0] < n:
        raise InvalidInputError("design points must be distinct")
    x_lo = X.min(axis=0)
    x_span = X.max(axis=0) - x_lo
    x_span = np.where(x_span > 0, x_span, 1.0)
    y_center = float(means.mean())
    y_scale = float(means.std())
    if not y_scale > 0:
        y_scale = 1.0
    return X, (X - x_lo) / x_span, means, noise, x_lo, x_span, y_center, y_scale


def _bounds(d):
    lo = np.r_[np.log(VARIANCE_BOUNDS[0]), np.full(d, np.log(LENGTH_BOUNDS[0]))]
    hi = np.r_[np.log(VARIANCE_BOUNDS[1]), np.full(d, np.log(LENGTH_BOUNDS[1]))]
    return lo, hi


def _starts(d, n_starts, rng, warm_start):
    lo, hi = _bounds(d)
    starts = []
    if warm_start is not None:
        starts.append(np.clip(np.asarray(warm_start, dtype=np.float64), lo, hi))
    else:
        # unit variance, length-scale a third of the unit box
        starts.append(np.r_[0.0, np.full(d, np.log(0.3))])
    n_lhs = max(n_starts - 1, 0)
    if n_lhs:
        sampler = qmc.LatinHypercube(d=d + 1, seed=rng)
        starts.extend(qmc.scale(sampler.random(n_lhs), lo, hi))
    return starts


def _assemble(theta, lik, X, means, noise, x_lo, x_span, y_center, y_scale, Xs):
    C, v2, ls = lik._cov(theta)
    K = C + np.diag(lik.noise)
    L, jitter = _cholesky(K, lik.jitter_start)
    if L is None:
        raise ModelFitError(
            "combined covariance not positive definite after maximum jitter", params=theta.copy()
        )
    ones = np.ones(len(means))
    Ki1 = linalg.cho_solve((L, True), ones, check_finite=False)
    Kiy = linalg.cho_solve((L, True), lik.y, check_finite=False)
    denom = float(ones @ Ki1)
    beta_s = float(ones @ Kiy) / denom
    alpha = Kiy - beta_s * Ki1
    resid = lik.y - beta_s
    ll = float(-0.5 * resid @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * len(means) * _LOG2PI)
    scaled = KernelParams(v2, ls)
    return SKModel(
        beta0=beta_s * y_scale + y_center,
        kernel=KernelParams(v2 * y_scale**2, ls * x_span),
        X=X,
        means=means,
        noise=noise,
        jitter=jitter * y_scale**2,
        loglik=ll,
        theta=np.asarray(theta, dtype=np.float64).copy(),
        x_lo=x_lo,
        x_span=x_span,
        y_center=y_center,
        y_scale=y_scale,
        _chol=L,
        _alpha=alpha,
        _Ki1=Ki1,
        _denom=denom,
        _scaled=scaled,
        _Xs=Xs,
        _jitter_s=jitter,
    )


def fit_arrays(
    X,
    means,
    noise,
    *,
    n_starts=8,
    rng=None,
    warm_start=None,
    params: KernelParams | None = None,
    jitter_start=JITTER_START,
) -> SKModel:
    """Fit a stochastic kriging model to means with intrinsic variances ``noise``.

    With ``params`` given (original units) the hyperparameters are fixed and
    only the trend and factorization are computed.
    """
    X, Xs, means, noise, x_lo, x_span, y_center, y_scale = _prepare(X, means, noise)
    y = (means - y_center) / y_scale
    lik = _Likelihood(Xs, y, noise / y_scale**2, jitter_start=jitter_start)
    d = X.shape[1]

    if params is not None:
        theta = np.r_[
            np.log(params.variance / y_scale**2), np.log(np.asarray(params.lengthscales) / x_span)
        ]
        return _assemble(theta, lik, X, means, noise, x_lo, x_span, y_center, y_scale, Xs)

    rng = np.random.default_rng(rng)
    lo, hi = _bounds(d)
    best_theta, best_val = None, np.inf
    for t0 in _starts(d, n_starts, rng, warm_start):
        res = optimize.minimize(
            lik.negative,
            t0,
            jac=True,
            method="L-BFGS-B",
            bounds=list(zip(lo, hi)),
            options={"maxiter": 200},
        )
        if res.fun < best_val and res.fun < 1e10:
            best_val, best_theta = float(res.fun), res.x
    if best_theta is None:
        raise ModelFitError("no start produced a positive definite covariance", params=None)
    return _assemble(best_theta, lik, X, means, noise, x_lo, x_span, y_center, y_scale, Xs)


def fit(designs, store: SampleStore, j: int, **kwargs) -> SKModel:
    """Fit the metamodel of objective ``j`` from a sample store."""
    noise = np.diag(intrinsic_cov(store, j))
    return fit_arrays(designs, store.means[:, j], noise, **kwargs)


def fit_all(designs, store: SampleStore, **kwargs) -> list[SKModel]:
    warm = kwargs.pop("warm_start", None) or [None] * store.m
    rng = np.random.default_rng(kwargs.pop("rng", None))
    return [fit(designs, store, j, rng=rng, warm_start=warm[j], **kwargs) for j in range(store.m)]


def predict_all(models, X):
    """Stack per-objective predictions into (n, m) means and variances."""
    outs = [mdl.predict(X) for mdl in models]
    return np.column_stack([o[0] for o in outs]), np.column_stack([o[1] for o in outs])
