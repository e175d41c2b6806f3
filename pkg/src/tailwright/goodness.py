"""Goodness-of-fit statistics and model selection.

Holds the empirical distribution type, K-L divergence with unit-width
integer binning, the K-S statistic (plain and tail-restricted), the
modified K-S statistic D* with 1/sqrt(P(1-P)) weighting, BIC, k-fold
cross-validated BIC model selection, and the PowerLawFit result bundle.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogorov

from ._validation import as_integer_values, as_values
from .errors import (
    ConfigError,
    DegenerateDataError,
    DomainError,
    InsufficientDataError,
)

__all__ = [
    "EmpiricalDist",
    "TabulatedMasses",
    "PowerLawFit",
    "ModelComparison",
    "empirical",
    "kl_divergence",
    "ks_statistic",
    "dstar_statistic",
    "asymptotic_ks_pvalue",
    "bic",
    "cross_validated_bic",
]


@dataclass
class EmpiricalDist:
    """Empirical distribution of integer waiting times.

    Attributes
    ----------
    support : numpy.ndarray
        Sorted distinct positive integers.
    pmf : numpy.ndarray
        Relative frequencies, summing to 1.
    cdf : numpy.ndarray
        Running sums of pmf; last entry is 1.
    n : int
        Sample count.
    """

    support: np.ndarray
    pmf: np.ndarray
    cdf: np.ndarray
    n: int

    @classmethod
    def from_data(cls, data):
        values = as_integer_values(data, min_n=1)
        support, counts = np.unique(values, return_counts=True)
        pmf = counts / values.size
        return cls(
            support=support, pmf=pmf, cdf=np.cumsum(pmf), n=int(values.size)
        )


def empirical(data):
    """Empirical pmf/cdf over the distinct values of ``data``."""
    return EmpiricalDist.from_data(data)


class TabulatedMasses:
    """A discrete distribution given directly as value -> mass pairs.

    Lets goodness-of-fit statistics score a sample against arbitrary
    binned masses (for example a uniform reference) rather than one of
    the fitted model families.
    """

    discrete = True
    tag = "tabulated"

    def __init__(self, masses):
        items = sorted(masses.items())
        self.support = np.asarray([k for k, _ in items], dtype=np.float64)
        self.masses = np.asarray([v for _, v in items], dtype=np.float64)
        if self.masses.size and self.masses.min() < 0:
            raise DomainError("masses must be non-negative")
        self._cum = np.cumsum(self.masses)

    def pdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        idx = np.searchsorted(self.support, tau)
        idx = np.clip(idx, 0, self.support.size - 1)
        hit = np.isclose(self.support[idx], tau)
        out = np.where(hit, self.masses[idx], 0.0)
        return out if out.ndim else float(out)

    def cdf(self, tau):
        tau = np.asarray(tau, dtype=np.float64)
        idx = np.searchsorted(self.support, tau, side="right")
        cum = np.concatenate([[0.0], self._cum])
        out = cum[idx]
        return out if out.ndim else float(out)


def _as_masses(model):
    return TabulatedMasses(model) if isinstance(model, dict) else model


def _bin_masses(model, support):
    """Model probability of each unit-width bin around integer support.

    Continuous models use cdf(tau + 0.5) - cdf(max(0.5, tau - 0.5));
    discrete models use the exact mass, with zero outside their domain.
    """
    model = _as_masses(model)
    support = np.asarray(support, dtype=np.float64)
    if getattr(model, "discrete", False):
        if isinstance(model, TabulatedMasses):
            return np.asarray(model.pdf(support), dtype=np.float64)
        tau_min = getattr(model, "tau_min", None)
        q = np.zeros(support.size)
        valid = np.abs(support - np.rint(support)) < 1e-9
        if tau_min is not None:
            valid &= support >= tau_min
        if valid.any():
            q[valid] = model.pdf(support[valid])
        return q
    lo = np.maximum(0.5, support - 0.5)
    return np.asarray(model.cdf(support + 0.5) - model.cdf(lo), dtype=np.float64)


def kl_divergence(sample, model):
    """K-L divergence sum p log2(p/q) of the sample from the model, in bits.

    ``sample`` is an EmpiricalDist (or raw integer data); ``q`` is the model
    probability of the unit-width bin [tau - 0.5, tau + 0.5) for continuous
    models and the exact mass for discrete models. A support point with
    zero model mass makes the divergence infinite (returned, not raised).

    Returns
    -------
    float, >= 0 up to rounding, possibly inf
    """
    if not isinstance(sample, EmpiricalDist):
        sample = EmpiricalDist.from_data(sample)
    q = _bin_masses(model, sample.support)
    p = sample.pmf
    if np.any((q <= 0.0) & (p > 0.0)):
        return float("inf")
    return float(np.sum(p * np.log2(p / q)))


def _tail_ecdf(sample, tau_min):
    """Distinct support and empirical CDF, optionally tail-restricted."""
    if isinstance(sample, EmpiricalDist):
        support = sample.support.astype(np.float64)
        counts = np.rint(sample.pmf * sample.n)
    else:
        values = as_values(sample)
        support, counts = np.unique(values.astype(np.float64), return_counts=True)
    if tau_min is not None:
        keep = support >= tau_min
        support, counts = support[keep], counts[keep]
        if support.size == 0:
            raise InsufficientDataError(f"no sample values >= tau_min={tau_min}")
    return support, np.cumsum(counts) / counts.sum()


def _tail_base(model, tau_min, discrete):
    """Model CDF mass strictly below the tail start."""
    if tau_min is None:
        return 0.0
    if discrete:
        model_floor = getattr(model, "tau_min", 1)
        return float(model.cdf(tau_min - 1)) if tau_min - 1 >= model_floor else 0.0
    return float(model.cdf(tau_min))


def _model_cdf_pair(model, support, discrete):
    """Model cdf and its left limit at each support point."""
    cdf = np.asarray(model.cdf(support), dtype=np.float64)
    if discrete:
        tau_min = getattr(model, "tau_min", None)
        left = np.zeros(support.size)
        prev = support - 1.0
        ok = prev >= (tau_min if tau_min is not None else 1)
        if ok.any():
            left[ok] = model.cdf(prev[ok])
        return cdf, left
    return cdf, cdf


def ks_statistic(sample, model, tau_min=None):
    """Kolmogorov-Smirnov distance max |P(tau) - Q(tau)|.

    Evaluates both one-sided gaps at every step point of the empirical
    CDF. With ``tau_min`` the sample is restricted to tau >= tau_min and
    the model CDF renormalized to that tail.

    Raises
    ------
    InsufficientDataError
        The restricted sample is empty.
    """
    model = _as_masses(model)
    support, ecdf = _tail_ecdf(sample, tau_min)
    discrete = bool(getattr(model, "discrete", False))
    cdf, cdf_left = _model_cdf_pair(model, support, discrete)
    base = _tail_base(model, tau_min, discrete)
    if tau_min is not None:
        rest = 1.0 - base
        if rest <= 0:
            raise DomainError("model places no mass on the requested tail")
        cdf = (cdf - base) / rest
        cdf_left = (cdf_left - base) / rest
    ecdf_left = np.concatenate([[0.0], ecdf[:-1]])
    return float(
        max(np.abs(ecdf - cdf).max(), np.abs(ecdf_left - cdf_left).max())
    )


def dstar_statistic(sample, model, tau_min=None):
    """Modified K-S statistic, uniformly sensitive across the range.

    D* = max |P(tau) - Q(tau)| / sqrt(P(tau) (1 - P(tau))) over the
    support, with P the empirical CDF (restricted and renormalized to
    tau >= tau_min when given). Support points where P is 0 or 1 are
    excluded (zero weight denominator).

    Raises
    ------
    DegenerateDataError
        Every tail point was excluded.
    """
    model = _as_masses(model)
    support, ecdf = _tail_ecdf(sample, tau_min)
    discrete = bool(getattr(model, "discrete", False))
    cdf, _ = _model_cdf_pair(model, support, discrete)
    base = _tail_base(model, tau_min, discrete)
    rest = 1.0 - base
    if rest <= 0:
        raise DomainError("model places no mass on the requested tail")
    cdf = (cdf - base) / rest
    keep = (ecdf > 0.0) & (ecdf < 1.0)
    if not keep.any():
        raise DegenerateDataError(
            "every tail point has empirical CDF 0 or 1, D* undefined"
        )
    p = ecdf[keep]
    return float(np.max(np.abs(p - cdf[keep]) / np.sqrt(p * (1.0 - p))))


def asymptotic_ks_pvalue(d_ks, n):
    """Asymptotic Kolmogorov p-value for a K-S distance at sample size n.

    Anti-conservative when model parameters were estimated from the same
    sample; adequate for the p ~ 0 regime it is used to demonstrate.
    """
    return float(kolmogorov(math.sqrt(n) * d_ks))


def bic(loglik, k_params, n):
    """Bayesian information criterion, -2 ln L + k ln n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return -2.0 * loglik + k_params * math.log(n)


@dataclass
class ModelComparison:
    """Per-model goodness columns and the selected winners."""

    models: dict
    winner_by_kl: str
    winner_by_bic: str
    folds: int
    seed: int


@dataclass
class PowerLawFit:
    """Result bundle of the discrete power-law tail fit.

    ``ks_distance`` is the selection statistic (plain tail K-S), ``dstar``
    the weighted variant reported as the goodness-of-fit column, and
    ``p_value`` the semi-parametric bootstrap p-value (None until the
    bootstrap runs). ``p_margin`` is the 95 percent half-width
    1.96 sqrt(p(1-p)/n_boot) recorded alongside.
    """

    alpha: float
    tau_min: int
    ks_distance: float
    dstar: float
    tail_fraction: float
    n_tail: int
    n: int
    p_value: float = None
    p_margin: float = None
    selection: str = "ks"

    def to_model(self):
        from .distributions import DiscretePowerLaw

        return DiscretePowerLaw(alpha=self.alpha, tau_min=self.tau_min)


_MODEL_TAGS = ("exponential", "weibull", "lognormal")


def _make_model(tag):
    from . import distributions as dist

    registry = {
        "exponential": dist.Exponential,
        "weibull": dist.Weibull,
        "lognormal": dist.Lognormal,
    }
    if tag not in registry:
        raise ConfigError(
            f"unknown model tag {tag!r}, expected one of {sorted(registry)}"
        )
    return registry[tag]()


def cross_validated_bic(data, models=_MODEL_TAGS, folds=5, seed=0):
    """K-fold cross-validated BIC model selection.

    The data is shuffled deterministically by ``seed`` and split into
    ``folds`` near-equal parts. For each fold, each model is fit by MLE on
    the remaining folds and BIC is computed from the held-out log-likelihood
    with n = test-set size and k = model parameter count; the reported
    value per model is the mean over folds. A test point with zero model
    density makes that fold's BIC infinite.

    Returns
    -------
    ModelComparison
        Per-model {fold_bics, bic_cv, kl_divergence, ks_p_value} plus
        winner_by_kl and winner_by_bic (argmin of their columns).

    Raises
    ------
    ConfigError
        Fewer data points than folds, folds < 2, or an unknown model tag.
    """
    values = as_values(data, min_n=1)
    folds = int(folds)
    if folds < 2:
        raise ConfigError("folds must be >= 2")
    if values.size < folds:
        raise ConfigError(f"n={values.size} is smaller than folds={folds}")
    models = list(models)
    for tag in models:
        _make_model(tag)  # validate tags before any work

    rng = np.random.default_rng(seed)
    perm = rng.permutation(values.size)
    parts = np.array_split(perm, folds)

    from .errors import TailwrightError

    fold_bics = {tag: [] for tag in models}
    for i in range(folds):
        test = values[parts[i]]
        train_idx = np.concatenate([parts[j] for j in range(folds) if j != i])
        train = values[train_idx]
        for tag in models:
            # a fold the model cannot be fit on scores like one it
            # cannot explain
            try:
                est = _make_model(tag).fit(train)
            except TailwrightError:
                fold_bics[tag].append(float("inf"))
                continue
            with np.errstate(divide="ignore"):
                ll = float(np.sum(np.log(est.pdf(test))))
            value = bic(ll, est.k_params, test.size) if np.isfinite(ll) else float("inf")
            fold_bics[tag].append(value)

    result = {}
    integral = np.all(np.abs(values - np.rint(values)) < 1e-9)
    emp = EmpiricalDist.from_data(values) if integral else None
    for tag in models:
        entry = {
            "fold_bics": fold_bics[tag],
            "bic_cv": float(np.mean(fold_bics[tag])),
            "kl_divergence": None,
            "ks_p_value": None,
        }
        try:
            est = _make_model(tag).fit(values)
        except TailwrightError:
            result[tag] = entry
            continue
        if emp is not None:
            entry["kl_divergence"] = kl_divergence(emp, est)
        entry["ks_p_value"] = asymptotic_ks_pvalue(
            ks_statistic(values, est), values.size
        )
        result[tag] = entry
    by_bic = min(models, key=lambda t: result[t]["bic_cv"])
    with_kl = [t for t in models if result[t]["kl_divergence"] is not None]
    by_kl = min(with_kl, key=lambda t: result[t]["kl_divergence"]) if with_kl else by_bic
    return ModelComparison(
        models=result,
        winner_by_kl=by_kl,
        winner_by_bic=by_bic,
        folds=folds,
        seed=int(seed),
    )
