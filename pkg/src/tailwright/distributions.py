"""Distribution models for waiting-time data.

Four models used throughout: exponential, Weibull, lognormal, and the
discrete power law tau^-alpha / zeta(alpha, tau_min) on integers
tau >= tau_min. Each model is a scikit-learn style estimator: constructor
arguments are optional fixed parameters (None means estimate from data),
``fit`` computes maximum-likelihood estimates into trailing-underscore
attributes, and ``pdf`` / ``cdf`` / ``sample`` evaluate the fitted or
fixed parameterization.
"""

import warnings

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_integer_values, as_values, check_positive_int
from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    InsufficientTailError,
)

__all__ = [
    "hurwitz_zeta",
    "Exponential",
    "Weibull",
    "Lognormal",
    "DiscretePowerLaw",
    "fit_exponential",
    "fit_weibull",
    "fit_lognormal",
    "fit_powerlaw_alpha",
]

# Euler-Maclaurin evaluation of the Hurwitz zeta: direct sum of the first
# _ZETA_HEAD_TERMS terms, then tail corrections through the B6 Bernoulli
# term. Relative error is at machine precision for alpha in (1, 20] and
# q >= 1 (validated against brute-force summation with analytic bounds).
_ZETA_HEAD_TERMS = 60

ALPHA_MIN = 1.0 + 1e-6
ALPHA_MAX = 20.0
_BRENT_XATOL = 1e-6


def hurwitz_zeta(alpha, tau_min):
    """Hurwitz zeta zeta(alpha, q) = sum_{n>=0} (n + q)^-alpha.

    Parameters
    ----------
    alpha : float
        Exponent, must exceed 1 (the series diverges at alpha <= 1).
    tau_min : int or float or ndarray
        Offset q >= 1. Vectorized; an array of offsets returns an array.

    Returns
    -------
    float or numpy.ndarray

    Raises
    ------
    DomainError
        If alpha <= 1 + 1e-8 or tau_min < 1.
    """
    alpha = float(alpha)
    if alpha <= 1.0 + 1e-8:
        raise DomainError(f"hurwitz_zeta requires alpha > 1, got {alpha}")
    if isinstance(tau_min, (int, float)):
        # scalar fast path: the exponent search evaluates this in a
        # tight loop where array machinery would dominate the cost
        q = float(tau_min)
        if q < 1:
            raise DomainError("hurwitz_zeta requires tau_min >= 1")
        neg = -alpha
        head = 0.0
        for j in range(_ZETA_HEAD_TERMS):
            head += (q + j) ** neg
        return head + _zeta_euler_maclaurin_tail(alpha, q + _ZETA_HEAD_TERMS)
    q = np.asarray(tau_min, dtype=np.float64)
    if q.size and q.min() < 1:
        raise DomainError("hurwitz_zeta requires tau_min >= 1")
    scalar = q.ndim == 0
    q = np.atleast_1d(q)
    j = np.arange(_ZETA_HEAD_TERMS, dtype=np.float64)
    head = ((q[..., None] + j) ** -alpha).sum(axis=-1)
    out = head + _zeta_euler_maclaurin_tail(alpha, q + _ZETA_HEAD_TERMS)
    return float(out[0]) if scalar else out


def _zeta_euler_maclaurin_tail(a, m):
    """Euler-Maclaurin remainder of the zeta series from offset m on."""
    tail = m ** (1.0 - a) / (a - 1.0) + 0.5 * m ** -a
    tail += a * m ** (-a - 1.0) / 12.0
    tail -= a * (a + 1) * (a + 2) * m ** (-a - 3.0) / 720.0
    tail += a * (a + 1) * (a + 2) * (a + 3) * (a + 4) * m ** (-a - 5.0) / 30240.0
    return tail


def _hurwitz_zeta_elementwise(alpha, q):
    """Zeta over matched arrays of exponents and offsets, no validation.

    Accumulates the head sum sequentially so no (size x head-terms)
    temporary is built; the tail scan calls this on long flattened arrays.
    """
    neg = -alpha
    head = q ** neg
    for j in range(1, _ZETA_HEAD_TERMS):
        head += (q + j) ** neg
    return head + _zeta_euler_maclaurin_tail(alpha, q + _ZETA_HEAD_TERMS)


_GOLD = 0.5 * (3.0 - np.sqrt(5.0))


def _brent_min(f, lo, hi, xatol=_BRENT_XATOL, maxiter=200):
    """Brent minimization (golden section + parabolic steps) on [lo, hi].

    Same algorithm as scipy.optimize.minimize_scalar(method="bounded") but
    without per-call setup overhead; the tail scan evaluates this for every
    cutoff candidate of every bootstrap replicate, so call cost matters.
    """
    a, b = lo, hi
    x = w = v = a + _GOLD * (b - a)
    fx = fw = fv = f(x)
    d = e = 0.0
    for _ in range(maxiter):
        mid = 0.5 * (a + b)
        if abs(x - mid) <= 2.0 * xatol - 0.5 * (b - a):
            break
        p = q = r = 0.0
        if abs(e) > xatol:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            r, e = e, d
        if abs(p) < abs(0.5 * q * r) and q * (a - x) < p < q * (b - x):
            d = p / q
            u = x + d
            if (u - a) < 2.0 * xatol or (b - u) < 2.0 * xatol:
                d = xatol if x < mid else -xatol
        else:
            e = b - x if x < mid else a - x
            d = _GOLD * e
        u = x + d if abs(d) >= xatol else x + (xatol if d > 0 else -xatol)
        fu = f(u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, w, x = w, x, u
            fv, fw, fx = fw, fx, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, w = w, u
                fv, fw = fw, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class _WaitingTimeModel(BaseEstimator):
    """Shared plumbing for the four distribution estimators."""

    discrete = False
    tag = None
    k_params = None

    def _check_params(self):
        pass

    def loglik(self, data):
        """Log-likelihood of ``data`` under the current parameters."""
        values = as_values(data)
        with np.errstate(divide="ignore"):
            return float(np.sum(np.log(self.pdf(values))))

    def _set_fit_meta(self, values):
        self.n_ = int(values.size)
        self.loglik_ = self.loglik(values)
        return self


class Exponential(_WaitingTimeModel):
    """Exponential waiting-time model, constant probability per unit time.

    Parameters
    ----------
    rate : float, optional
        Fixed rate (1/seconds). None means estimate by MLE in ``fit``
        (rate = 1 / sample mean).
    """

    discrete = False
    tag = "exponential"
    k_params = 1

    def __init__(self, rate=None):
        self.rate = rate

    def fit(self, X, y=None):
        values = as_values(X, min_n=1)
        self.rate_ = self.rate if self.rate is not None else 1.0 / values.mean()
        if self.rate_ <= 0:
            raise DomainError("rate must be positive")
        return self._set_fit_meta(values)

    @property
    def _rate(self):
        if self.rate is not None:
            return self.rate
        check_is_fitted(self, "rate_")
        return self.rate_

    def pdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if tau.size and tau.min() <= 0:
            raise DomainError("tau must be positive")
        r = self._rate
        return r * np.exp(-r * tau)

    def cdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if tau.size and tau.min() <= 0:
            raise DomainError("tau must be positive")
        return 1.0 - np.exp(-self._rate * tau)

    def sample(self, n, seed=None):
        check_positive_int(n, "n")
        return _as_rng(seed).exponential(1.0 / self._rate, size=n)


class Weibull(_WaitingTimeModel):
    """Weibull model with shape k and scale lambda.

    MLE solves the profile-likelihood equation for the shape by Newton
    iteration (the scale has a closed form given the shape). Iterates are
    converged when successive shape values differ by less than 1e-10.
    """

    discrete = False
    tag = "weibull"
    k_params = 2

    def __init__(self, shape=None, scale=None):
        self.shape = shape
        self.scale = scale

    def fit(self, X, y=None):
        values = as_values(X, min_n=2)
        if self.shape is not None and self.scale is not None:
            self.shape_, self.scale_ = float(self.shape), float(self.scale)
            return self._set_fit_meta(values)
        if np.all(values == values[0]):
            raise DegenerateDataError(
                "all values identical, Weibull shape diverges"
            )
        self.shape_, self.scale_ = self._mle(values)
        return self._set_fit_meta(values)

    @staticmethod
    def _mle(values, max_iter=200, tol=1e-10):
        log_t = np.log(values)
        mean_log = log_t.mean()
        # profile equation f(k) = sum(t^k log t)/sum(t^k) - 1/k - mean(log t)
        k = 1.0
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(max_iter):
                tk = values ** k
                s0 = tk.sum()
                s1 = (tk * log_t).sum()
                s2 = (tk * log_t * log_t).sum()
                f = s1 / s0 - 1.0 / k - mean_log
                fprime = (s2 * s0 - s1 * s1) / (s0 * s0) + 1.0 / (k * k)
                step = f / fprime
                k_new = k - step
                if not np.isfinite(k_new):
                    raise ConvergenceError(
                        "Weibull profile equation overflowed",
                        diagnostics={"last_shape": k, "n": values.size},
                    )
                if k_new <= 0:
                    k_new = k / 2.0  # keep the iterate in the positive domain
                if abs(k_new - k) < tol:
                    k = k_new
                    break
                k = k_new
            else:
                raise ConvergenceError(
                    "Weibull shape estimate did not converge",
                    diagnostics={"last_shape": k, "last_step": step, "n": values.size},
                )
        lam = (np.mean(values ** k)) ** (1.0 / k)
        return float(k), float(lam)

    def _params(self):
        if self.shape is not None and self.scale is not None:
            return float(self.shape), float(self.scale)
        check_is_fitted(self, "shape_")
        return self.shape_, self.scale_

    def pdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if tau.size and tau.min() <= 0:
            raise DomainError("tau must be positive")
        k, lam = self._params()
        z = tau / lam
        return (k / lam) * z ** (k - 1.0) * np.exp(-(z ** k))

    def cdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if tau.size and tau.min() <= 0:
            raise DomainError("tau must be positive")
        k, lam = self._params()
        return 1.0 - np.exp(-((tau / lam) ** k))

    def sample(self, n, seed=None):
        check_positive_int(n, "n")
        k, lam = self._params()
        return lam * _as_rng(seed).weibull(k, size=n)


class Lognormal(_WaitingTimeModel):
    """Lognormal model: mu and sigma are the moments of ln tau.

    The MLE is closed form, mu = mean(ln tau) and sigma the population
    standard deviation (divide by n) of ln tau.
    """

    discrete = False
    tag = "lognormal"
    k_params = 2

    def __init__(self, mu=None, sigma=None):
        self.mu = mu
        self.sigma = sigma

    def fit(self, X, y=None):
        values = as_values(X, min_n=2)
        if self.mu is not None and self.sigma is not None:
            self.mu_, self.sigma_ = float(self.mu), float(self.sigma)
            return self._set_fit_meta(values)
        if np.all(values == values[0]):
            raise DegenerateDataError("all values identical, sigma would be 0")
        log_t = np.log(values)
        self.mu_ = float(log_t.mean())
        self.sigma_ = float(log_t.std())  # population std, the exact MLE
        return self._set_fit_meta(values)

    def _params(self):
        if self.mu is not None and self.sigma is not None:
            return float(self.mu), float(self.sigma)
        check_is_fitted(self, "mu_")
        return self.mu_, self.sigma_

    def pdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        if tau.size and tau.min() <= 0:
            raise DomainError("tau must be positive")
        mu, sigma = self._params()
        z = (np.log(tau) - mu) / sigma
        return np.exp(-0.5 * z * z) / (tau * sigma * np.sqrt(2.0 * np.pi))

    def cdf(self, tau):
        from scipy.special import ndtr

        tau = np.asarray(tau, dtype=np.float64)
        if tau.size and tau.min() <= 0:
            raise DomainError("tau must be positive")
        mu, sigma = self._params()
        return ndtr((np.log(tau) - mu) / sigma)

    def sample(self, n, seed=None):
        check_positive_int(n, "n")
        mu, sigma = self._params()
        return np.exp(_as_rng(seed).normal(mu, sigma, size=n))


class DiscretePowerLaw(_WaitingTimeModel):
    """Discrete power law p(tau) = tau^-alpha / zeta(alpha, tau_min).

    Defined on integers tau >= tau_min. ``fit`` estimates alpha by
    maximizing the discrete log-likelihood with tau_min held fixed,
    using Brent search on alpha in (1 + 1e-6, 20] to tolerance 1e-6.

    Parameters
    ----------
    alpha : float, optional
        Fixed exponent; None means estimate in ``fit``.
    tau_min : int
        Lower cutoff, default 1.
    """

    discrete = True
    tag = "powerlaw"
    k_params = 2
    # inverse-CDF table size; draws past the table fall back to bisection
    _TABLE_SIZE = 65536

    def __init__(self, alpha=None, tau_min=1):
        self.alpha = alpha
        self.tau_min = tau_min

    def fit(self, X, y=None):
        tau_min = check_positive_int(self.tau_min, "tau_min")
        values = as_integer_values(X, min_n=1)
        tail = values[values >= tau_min]
        if self.alpha is not None:
            self.alpha_ = float(self.alpha)
            self.n_ = int(values.size)
            self.loglik_ = self.loglik(tail) if tail.size else 0.0
            return self
        if np.unique(tail).size < 2:
            raise InsufficientTailError(
                f"need at least 2 distinct values >= tau_min={tau_min}"
            )
        self.alpha_, self.loglik_ = _alpha_mle(
            float(np.log(tail).sum()), tail.size, tau_min, diagnose=True
        )
        self.n_ = int(tail.size)
        return self

    def _params(self):
        if self.alpha is not None:
            return float(self.alpha), int(self.tau_min)
        check_is_fitted(self, "alpha_")
        return self.alpha_, int(self.tau_min)

    def _check_tau(self, tau):
        arr = np.asarray(tau, dtype=np.float64)
        if arr.size and arr.min() <= 0:
            raise DomainError("tau must be positive")
        rounded = np.rint(arr)
        if arr.size and not np.all(np.abs(arr - rounded) < 1e-9):
            raise DomainError("discrete power law requires integer tau")
        _, tau_min = self._params()
        if arr.size and rounded.min() < tau_min:
            raise DomainError(f"tau below tau_min={tau_min}")
        return rounded

    def pdf(self, tau):
        tau = self._check_tau(tau)
        alpha, tau_min = self._params()
        return tau ** -alpha / hurwitz_zeta(alpha, tau_min)

    def cdf(self, tau):
        """cdf(tau) = 1 - zeta(alpha, tau + 1) / zeta(alpha, tau_min)."""
        tau = self._check_tau(tau)
        alpha, tau_min = self._params()
        return 1.0 - hurwitz_zeta(alpha, tau + 1.0) / hurwitz_zeta(alpha, tau_min)

    def sample(self, n, seed=None):
        """Exact draws by inverse-CDF search on the discrete masses."""
        check_positive_int(n, "n")
        alpha, tau_min = self._params()
        rng = _as_rng(seed)
        cum, z = self._cdf_table(alpha, tau_min)
        u = rng.random(n)
        idx = np.searchsorted(cum, u, side="left")
        out = tau_min + idx
        overflow = np.nonzero(idx >= cum.size)[0]
        for i in overflow:
            out[i] = self._inverse_cdf_bisect(u[i], alpha, tau_min, z)
        return out.astype(np.int64)

    def _cdf_table(self, alpha, tau_min):
        cached = getattr(self, "_table_cache", None)
        if cached is not None and cached[0] == (alpha, tau_min):
            return cached[1], cached[2]
        support = np.arange(tau_min, tau_min + self._TABLE_SIZE, dtype=np.float64)
        z = hurwitz_zeta(alpha, tau_min)
        cum = np.cumsum(support ** -alpha / z)
        self._table_cache = ((alpha, tau_min), cum, z)
        return cum, z

    @staticmethod
    def _inverse_cdf_bisect(u, alpha, tau_min, z):
        # beyond the table: integer bisection on the zeta-based CDF
        lo = tau_min + DiscretePowerLaw._TABLE_SIZE
        hi = lo * 2
        while 1.0 - hurwitz_zeta(alpha, float(hi + 1)) / z < u:
            if hi > 2**62:
                # quantile would not fit an int64; only reachable for
                # alpha barely above 1 at extreme u
                raise DomainError(
                    f"quantile for u={u} at alpha={alpha} exceeds the "
                    "representable integer range"
                )
            lo, hi = hi + 1, hi * 2
        while lo < hi:
            mid = (lo + hi) // 2
            if 1.0 - hurwitz_zeta(alpha, float(mid + 1)) / z >= u:
                hi = mid
            else:
                lo = mid + 1
        return lo


def _alpha_nll_factory(log_sum, n_tail, tau_min):
    tau_min = float(tau_min)

    def nll(alpha):
        return n_tail * np.log(hurwitz_zeta(alpha, tau_min)) + alpha * log_sum

    return nll


def _alpha_mle_batch(log_sums, n_tails, tau_mins):
    """Profile the power-law likelihood over alpha for many cutoffs at once.

    Runs the same Brent iteration as ``_brent_min`` in lockstep across all
    candidate cutoffs, with one vectorized zeta evaluation per step. Each
    lane follows its own golden/parabolic branching and freezes when its
    own interval converges, so per-lane results agree with the scalar
    search to within the shared xatol. Returns (alphas, logliks).
    """
    log_sums = np.asarray(log_sums, dtype=np.float64)
    n_tails = np.asarray(n_tails, dtype=np.float64)
    q0 = np.asarray(tau_mins, dtype=np.float64)
    lanes = log_sums.size
    if lanes == 0:
        return np.empty(0), np.empty(0)
    base = q0[:, None] + np.arange(_ZETA_HEAD_TERMS, dtype=np.float64)
    q_top = q0 + _ZETA_HEAD_TERMS

    def f(alpha):
        head = (base ** -alpha[:, None]).sum(axis=1)
        z = head + _zeta_euler_maclaurin_tail(alpha, q_top)
        return n_tails * np.log(z) + alpha * log_sums

    xatol = _BRENT_XATOL
    a = np.full(lanes, ALPHA_MIN)
    b = np.full(lanes, ALPHA_MAX)
    x = a + _GOLD * (b - a)
    w = x.copy()
    v = x.copy()
    fx = f(x)
    fw = fx.copy()
    fv = fx.copy()
    d = np.zeros(lanes)
    e = np.zeros(lanes)
    frozen = np.zeros(lanes, dtype=bool)
    for _ in range(200):
        mid = 0.5 * (a + b)
        frozen |= np.abs(x - mid) <= 2.0 * xatol - 0.5 * (b - a)
        act = ~frozen
        if not act.any():
            break
        # parabolic trial through (v, w, x); acceptance exactly as in the
        # scalar path, with r taking the pre-swap e
        elig = act & (np.abs(e) > xatol)
        r = (x - w) * (fx - fv)
        qq = (x - v) * (fx - fw)
        p = (x - v) * qq - (x - w) * r
        qq = 2.0 * (qq - r)
        p = np.where(qq > 0.0, -p, p)
        qq = np.abs(qq)
        accept = (
            elig
            & (np.abs(p) < np.abs(0.5 * qq * e))
            & (qq * (a - x) < p)
            & (p < qq * (b - x))
        )
        e_gold = np.where(x < mid, b - x, a - x)
        with np.errstate(divide="ignore", invalid="ignore"):
            d_para = p / qq
        new_e = np.where(accept, d, e_gold)
        new_d = np.where(accept, d_para, _GOLD * e_gold)
        u_try = x + new_d
        clamp = accept & (
            (u_try - a < 2.0 * xatol) | (b - u_try < 2.0 * xatol)
        )
        new_d = np.where(clamp, np.where(x < mid, xatol, -xatol), new_d)
        e = np.where(act, new_e, e)
        d = np.where(act, new_d, d)
        step = np.where(
            np.abs(d) >= xatol, d, np.where(d > 0.0, xatol, -xatol)
        )
        u = np.where(act, x + step, x)
        fu = f(u)
        imp = act & (fu <= fx)
        a = np.where(imp & (u >= x), x, a)
        b = np.where(imp & (u < x), x, b)
        v = np.where(imp, w, v)
        fv = np.where(imp, fw, fv)
        w = np.where(imp, x, w)
        fw = np.where(imp, fx, fw)
        x = np.where(imp, u, x)
        fx = np.where(imp, fu, fx)
        non = act & ~imp
        a = np.where(non & (u < x), u, a)
        b = np.where(non & (u >= x), u, b)
        c1 = non & ((fu <= fw) | (w == x))
        v = np.where(c1, w, v)
        fv = np.where(c1, fw, fv)
        w = np.where(c1, u, w)
        fw = np.where(c1, fu, fw)
        c2 = non & ~c1 & ((fu <= fv) | (v == x) | (v == w))
        v = np.where(c2, u, v)
        fv = np.where(c2, fu, fv)
    f_ceiling = f(np.full(lanes, ALPHA_MAX))
    at_ceiling = f_ceiling < fx
    x = np.where(at_ceiling, ALPHA_MAX, x)
    fx = np.where(at_ceiling, f_ceiling, fx)
    return x, -fx


def _alpha_mle(log_sum, n_tail, tau_min, diagnose=False):
    """Maximize the discrete power-law likelihood over the alpha bracket.

    Returns (alpha_hat, loglik). With diagnose=True, warns when the
    optimum sits at the bracket ceiling instead of silently clamping.
    """
    nll = _alpha_nll_factory(log_sum, n_tail, tau_min)
    alpha, fval = _brent_min(nll, ALPHA_MIN, ALPHA_MAX)
    if nll(ALPHA_MAX) < fval:
        alpha, fval = ALPHA_MAX, nll(ALPHA_MAX)
    if diagnose and alpha >= ALPHA_MAX - 2.0 * _BRENT_XATOL:
        warnings.warn(
            f"alpha estimate {alpha:.6f} sits at the search bracket ceiling "
            f"{ALPHA_MAX}; the true optimum may lie outside (1, {ALPHA_MAX}]",
            RuntimeWarning,
            stacklevel=3,
        )
    return float(alpha), float(-fval)


def fit_exponential(data):
    """MLE exponential fit: rate = 1 / sample mean. Returns the estimator."""
    return Exponential().fit(data)


def fit_weibull(data):
    """MLE Weibull fit by profile-likelihood Newton iteration."""
    return Weibull().fit(data)


def fit_lognormal(data):
    """MLE lognormal fit from the moments of ln tau."""
    return Lognormal().fit(data)


def fit_powerlaw_alpha(data, tau_min):
    """MLE of the discrete power-law exponent with tau_min held fixed.

    Requires at least 2 distinct data values >= tau_min. Returns a fitted
    DiscretePowerLaw carrying ``alpha_`` and ``loglik_``.
    """
    return DiscretePowerLaw(tau_min=tau_min).fit(data)
