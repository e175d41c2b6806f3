"""Discrete power-law tail estimation.

Implements the full tail procedure: for every admissible cutoff, fit the
exponent by maximum likelihood and keep the cutoff whose fitted tail has
the smallest K-S distance; then judge plausibility with a semi-parametric
bootstrap that re-runs the whole procedure on synthetic samples.
"""

import warnings

import numpy as np

from ._validation import as_integer_values, check_positive_int
from .distributions import (
    ALPHA_MAX,
    _BRENT_XATOL,
    DiscretePowerLaw,
    _alpha_mle_batch,
    _hurwitz_zeta_elementwise,
)
from .errors import ConfigError, InsufficientDataError, InsufficientTailError
from .goodness import PowerLawFit, dstar_statistic

__all__ = ["fit_powerlaw", "powerlaw_pvalue", "MIN_SAMPLE"]

MIN_SAMPLE = 50

# cap on the flattened (cutoff, support) rows evaluated at once, keeping
# the scan's working set small even when a sample has thousands of
# distinct values
_SCAN_BLOCK = 1 << 19


def _tail_scan(counts):
    """Scan tail cutoffs over the distinct values of a count vector.

    ``counts[v]`` is the number of observations equal to v. For each
    candidate cutoff (every distinct value whose tail keeps at least two
    points and two distinct values) the exponent is fit by MLE and the
    tail K-S distance evaluated with both one-sided gaps. Returns
    (alpha, tau_min, ks, n_tail) for the smallest K-S distance, ties
    resolved toward the smaller cutoff, or None if no candidate exists.
    """
    uniq = np.nonzero(counts)[0].astype(np.int64)
    if uniq.size and uniq[0] == 0:
        raise ValueError("count vector has mass at zero")
    cnt = counts[uniq].astype(np.int64)
    n_distinct = uniq.size
    tail_n = np.cumsum(cnt[::-1])[::-1]
    wlog = cnt * np.log(uniq.astype(np.float64))
    tail_logsum = np.cumsum(wlog[::-1])[::-1]

    # admissible cutoffs form a prefix: tail size only shrinks rightward
    admissible = (tail_n >= 2) & (n_distinct - np.arange(n_distinct) >= 2)
    n_cand = int(np.argmin(admissible)) if not admissible.all() else n_distinct
    if n_cand == 0:
        return None
    alphas, _ = _alpha_mle_batch(
        tail_logsum[:n_cand], tail_n[:n_cand], uniq[:n_cand]
    )
    z_at_cut = _hurwitz_zeta_elementwise(
        alphas, uniq[:n_cand].astype(np.float64)
    )

    # evaluate every candidate's tail K-S in one flattened pass per block;
    # rows are (cutoff index, support index >= cutoff) pairs
    suffix = np.concatenate([tail_n, [0]])
    seg_len = n_distinct - np.arange(n_cand)
    best_d = np.inf
    best_i = -1
    start = 0
    while start < n_cand:
        stop = start + 1
        total = int(seg_len[start])
        while stop < n_cand and total + seg_len[stop] <= _SCAN_BLOCK:
            total += int(seg_len[stop])
            stop += 1
        lens = seg_len[start:stop]
        offsets = np.concatenate([[0], np.cumsum(lens[:-1])])
        ci = np.repeat(np.arange(start, stop), lens)
        sj = np.arange(total) - np.repeat(offsets, lens) + ci
        af = alphas[ci]
        uj = uniq[sj].astype(np.float64)
        z_right = _hurwitz_zeta_elementwise(af, uj + 1.0)
        z = z_at_cut[ci]
        held = tail_n[ci]
        ecdf = (held - suffix[sj + 1]) / held
        ecdf_left = (held - suffix[sj]) / held
        cdf = 1.0 - z_right / z
        cdf_left = 1.0 - (z_right + uj ** -af) / z
        gaps = np.maximum(np.abs(ecdf - cdf), np.abs(ecdf_left - cdf_left))
        d_block = np.maximum.reduceat(gaps, offsets)
        rel = int(np.argmin(d_block))
        if d_block[rel] < best_d:
            best_d = float(d_block[rel])
            best_i = start + rel
        start = stop
    return (
        float(alphas[best_i]),
        int(uniq[best_i]),
        best_d,
        int(tail_n[best_i]),
    )


def fit_powerlaw(data):
    """Fit a discrete power-law tail with data-driven cutoff selection.

    Parameters
    ----------
    data : WaitingTimes or array-like of positive integers

    Returns
    -------
    PowerLawFit
        alpha, tau_min, the selection K-S distance, D* on the selected
        tail, tail fraction and counts. p_value stays None until
        ``powerlaw_pvalue`` runs.

    Raises
    ------
    InsufficientDataError
        Fewer than MIN_SAMPLE observations.
    InsufficientTailError
        No cutoff admits a fit (fewer than two distinct values).
    """
    values = as_integer_values(data, min_n=1)
    if values.size < MIN_SAMPLE:
        raise InsufficientDataError(
            f"tail estimation needs at least {MIN_SAMPLE} observations, "
            f"got {values.size}"
        )
    counts = np.bincount(values)
    best = _tail_scan(counts)
    if best is None:
        raise InsufficientTailError(
            "no admissible tail cutoff: need at least 2 distinct values"
        )
    alpha, tau_min, ks, n_tail = best
    if alpha >= ALPHA_MAX - 2.0 * _BRENT_XATOL:
        warnings.warn(
            f"selected tail exponent {alpha:.6f} sits at the search "
            f"bracket ceiling {ALPHA_MAX}",
            RuntimeWarning,
            stacklevel=2,
        )
    model = DiscretePowerLaw(alpha=alpha, tau_min=tau_min)
    dstar = dstar_statistic(values, model, tau_min=tau_min)
    return PowerLawFit(
        alpha=alpha,
        tau_min=tau_min,
        ks_distance=ks,
        dstar=dstar,
        tail_fraction=n_tail / values.size,
        n_tail=n_tail,
        n=int(values.size),
    )


def powerlaw_pvalue(data, fit, n_boot=1000, seed=0):
    """Semi-parametric bootstrap p-value for a fitted power-law tail.

    Each replicate draws n points: with probability n_tail/n an exact
    draw from the fitted discrete power law, otherwise a resample of the
    observed sub-cutoff values. The full cutoff scan is re-run on the
    replicate and the p-value is the fraction of replicates whose K-S
    distance is at least the observed one. Replicates are generated from
    independent child streams of ``seed``, so results do not depend on
    evaluation order and are reproducible.

    Raises
    ------
    ConfigError
        n_boot < 100 (too few replicates for a stable p-value), or the
        fit does not match the data.
    """
    n_boot = check_positive_int(n_boot, "n_boot")
    if n_boot < 100:
        raise ConfigError(f"n_boot must be >= 100, got {n_boot}")
    values = as_integer_values(data, min_n=1)
    n = int(values.size)
    counts = np.bincount(values)
    tau_min = int(fit.tau_min)
    body = counts[:tau_min].copy()
    n_body = int(body.sum())
    if n != fit.n or n - n_body != fit.n_tail:
        raise ConfigError(
            "fit does not describe this sample: size or tail count differs"
        )
    p_tail = 1.0 - n_body / n
    body_pmf = body / n_body if n_body else body.astype(np.float64)
    model = DiscretePowerLaw(alpha=fit.alpha, tau_min=tau_min)

    children = np.random.SeedSequence(seed).spawn(n_boot)
    observed = float(fit.ks_distance)
    n_at_least = 0
    for child in children:
        rng = np.random.default_rng(child)
        k = int(rng.binomial(n, p_tail)) if n_body else n
        rep = np.zeros(max(counts.size, tau_min + 4), dtype=np.int64)
        if n - k:
            rep[:tau_min] += rng.multinomial(n - k, body_pmf)
        if k:
            tail = model.sample(k, rng)
            top = int(tail.max())
            if top >= rep.size:
                rep = np.concatenate(
                    [rep, np.zeros(top + 1 - rep.size, dtype=np.int64)]
                )
            rep += np.bincount(tail, minlength=rep.size)
        result = _tail_scan(rep)
        stat = result[2] if result is not None else float("inf")
        if stat >= observed:
            n_at_least += 1
    return n_at_least / n_boot
