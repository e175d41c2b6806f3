"""Report building and table emission.

Per-series analysis reports are JSON documents tagged with a schema
version and a kind (fit, compare, powerlaw). The consolidation step
collects reports into three CSV tables with a fixed column order, each
accompanied by a JSON sidecar holding the full-precision values and the
metadata (seeds, sources) needed to reproduce it. Table cells round to 4
significant figures; sidecars do not round.
"""

import csv
import json
import math
import os
import warnings

import numpy as np

from .distributions import fit_exponential, fit_lognormal, fit_weibull
from .errors import (
    EmptyInputError,
    InsufficientDataError,
    InsufficientTailError,
    SchemaError,
    TailwrightError,
)
from .events import mean_interval, waiting_times
from .goodness import (
    asymptotic_ks_pvalue,
    empirical,
    kl_divergence,
    ks_statistic,
    cross_validated_bic,
)
from .tailfit import fit_powerlaw, powerlaw_pvalue

SCHEMA_VERSION = "1"
MODEL_ORDER = ("exponential", "weibull", "lognormal")
REPORT_KINDS = ("fit", "compare", "powerlaw")

_FITTERS = {
    "exponential": (fit_exponential, lambda est: {"rate": est.rate_}),
    "weibull": (
        fit_weibull,
        lambda est: {"shape": est.shape_, "scale": est.scale_},
    ),
    "lognormal": (fit_lognormal, lambda est: {"mu": est.mu_, "sigma": est.sigma_}),
}


def sig4(value):
    """Format one table cell at 4 significant figures."""
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Inf" if value > 0 else "-Inf"
    return f"{value:.4g}"


def _plain(obj):
    """Make an object JSON-serializable without Infinity literals."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "NaN"
        if math.isinf(obj):
            return "Inf" if obj > 0 else "-Inf"
        return obj
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _series_meta(series, wt):
    meta = {
        "schema_version": SCHEMA_VERSION,
        "pair_side": series.pair_side,
        "n": int(wt.values.size) if wt is not None else 0,
        "n_zero_collapsed": int(wt.n_zero_collapsed) if wt is not None else 0,
        "mean_interval": mean_interval(series),
    }
    if series.day is not None:
        meta["day"] = series.day
    return meta


def fit_report(series, models=MODEL_ORDER, seed=0):
    """Fit each model family to one series by MLE.

    Per model: parameters, log-likelihood, K-L divergence of the binned
    model from the empirical distribution, and the asymptotic K-S
    p-value. A model family that cannot be fit (degenerate data) gets an
    ``error`` entry instead of failing the series.
    """
    wt = waiting_times(series)
    emp = empirical(wt)
    report = _series_meta(series, wt)
    report["kind"] = "fit"
    report["seed"] = int(seed)
    fitted = {}
    for tag in models:
        fitter, params_of = _FITTERS[tag]
        try:
            est = fitter(wt)
            fitted[tag] = {
                "params": params_of(est),
                "loglik": float(est.loglik_),
                "kl_divergence": kl_divergence(emp, est),
                "ks_p_value": asymptotic_ks_pvalue(
                    ks_statistic(wt.values, est), wt.values.size
                ),
            }
        except TailwrightError as exc:
            fitted[tag] = {"error": str(exc)}
    report["models"] = fitted
    return report


def compare_report(series, models=MODEL_ORDER, folds=5, seed=0):
    """Cross-validated BIC comparison for one series."""
    wt = waiting_times(series)
    comparison = cross_validated_bic(wt.values, models=models, folds=folds, seed=seed)
    report = _series_meta(series, wt)
    report.update(
        {
            "kind": "compare",
            "seed": int(seed),
            "folds": int(comparison.folds),
            "models": comparison.models,
            "winner_by_bic": comparison.winner_by_bic,
            "winner_by_kl": comparison.winner_by_kl,
        }
    )
    return report


def powerlaw_report(series, n_boot=1000, seed=0):
    """Power-law tail fit with bootstrap p-value for one series.

    A series too short or too degenerate for the tail procedure yields a
    warning report (the table row stays, with blank statistics) rather
    than failing the whole run.
    """
    try:
        wt = waiting_times(series)
    except InsufficientDataError as exc:
        wt = None
        failure = exc
    else:
        failure = None
    report = _series_meta(series, wt)
    report["kind"] = "powerlaw"
    report["seed"] = int(seed)
    report["n_boot"] = int(n_boot)
    if failure is None:
        try:
            fit = fit_powerlaw(wt)
        except (InsufficientDataError, InsufficientTailError) as exc:
            failure = exc
    if failure is not None:
        warnings.warn(
            f"{series.pair_side}: {failure}", RuntimeWarning, stacklevel=2
        )
        report["warning"] = str(failure)
        return report
    p_value = powerlaw_pvalue(wt.values, fit, n_boot=n_boot, seed=seed)
    fit.p_value = p_value
    fit.p_margin = 1.96 * math.sqrt(p_value * (1.0 - p_value) / n_boot)
    tail = wt.values[wt.values >= fit.tau_min]
    kl_tail = kl_divergence(empirical(tail), fit.to_model())
    report.update(
        {
            "alpha": fit.alpha,
            "tau_min": int(fit.tau_min),
            "p_value": p_value,
            "p_margin": fit.p_margin,
            "dstar": fit.dstar,
            "ks_distance": fit.ks_distance,
            "tail_fraction": fit.tail_fraction,
            "n_tail": int(fit.n_tail),
            "kl_tail": kl_tail,
            "selection_statistic": fit.selection,
        }
    )
    return report


def diagnostic_points(wt):
    """Plot-ready point sets for one waiting-time sample.

    Returns a mapping of file stem to (header, rows):

    - ``ccdf_semilog``: tau against ln P(tau' >= tau); linear for an
      exponential sample.
    - ``ccdf_loglog``: ln tau against ln P(tau' >= tau); linear for a
      power-law tail.
    - ``weibull_plot``: ln tau against ln(-ln(1 - P(tau' <= tau)));
      linear with slope k for a Weibull sample. The last support point
      (P = 1) is excluded.

    All rows are finite.
    """
    values = np.sort(wt.values)
    support, counts = np.unique(values, return_counts=True)
    n = values.size
    cdf = np.cumsum(counts) / n
    # inclusive reverse cumulative: P(tau' >= tau), 1 at the smallest value
    ccdf = 1.0 - np.concatenate([[0.0], cdf[:-1]])
    ln_tau = np.log(support.astype(np.float64))
    out = {
        "ccdf_semilog": (
            ("tau", "ln_ccdf"),
            list(zip(support.tolist(), np.log(ccdf).tolist())),
        ),
        "ccdf_loglog": (
            ("ln_tau", "ln_ccdf"),
            list(zip(ln_tau.tolist(), np.log(ccdf).tolist())),
        ),
    }
    keep = cdf < 1.0
    weibull_y = np.log(-np.log(1.0 - cdf[keep]))
    out["weibull_plot"] = (
        ("ln_tau", "ln_neg_ln_sf"),
        list(zip(ln_tau[keep].tolist(), weibull_y.tolist())),
    )
    return out


def _slug(series):
    stem = series.pair_side
    if series.day is not None:
        stem = f"{stem}_{series.day}"
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in stem)


def write_diagnostics(outdir, series, wt):
    """Write the three point files for one series, returning their paths."""
    paths = []
    for stem, (header, rows) in diagnostic_points(wt).items():
        path = os.path.join(outdir, f"{_slug(series)}_{stem}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        paths.append(path)
    return paths


def read_report(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def collect_reports(paths):
    """Load analysis reports, ignoring JSON files of other kinds.

    Raises
    ------
    SchemaError
        Reports carry differing schema versions, naming both.
    EmptyInputError
        No analysis report found among the paths.
    """
    reports = []
    for path in sorted(paths):
        doc = read_report(path)
        if not isinstance(doc, dict) or doc.get("kind") not in REPORT_KINDS:
            continue
        doc["_source"] = os.path.basename(path)
        reports.append(doc)
    if not reports:
        raise EmptyInputError("no analysis reports among the inputs")
    versions = sorted({str(doc.get("schema_version")) for doc in reports})
    if len(versions) > 1:
        raise SchemaError(
            "mixed report schema versions: " + " vs ".join(versions)
        )
    if versions[0] != SCHEMA_VERSION:
        raise SchemaError(
            f"report schema version {versions[0]} does not match "
            f"supported version {SCHEMA_VERSION}"
        )
    return reports


def _model_columns(reports):
    tags = [t for t in MODEL_ORDER]
    for doc in reports:
        for tag in doc.get("models", {}):
            if tag not in tags:
                tags.append(tag)
    return tags


def build_table1(reports):
    """K-L divergence per model per series (fit reports)."""
    docs = [d for d in reports if d["kind"] == "fit"]
    tags = _model_columns(docs)
    header = ["pair_side", "n", "mean_interval"] + [f"kl_{t}" for t in tags]
    rows = []
    for doc in docs:
        row = [doc["pair_side"], doc["n"], doc["mean_interval"]]
        for tag in tags:
            entry = doc.get("models", {}).get(tag, {})
            row.append(entry.get("kl_divergence"))
        rows.append(row)
    meta = {
        "sources": [d["_source"] for d in docs],
        "seeds": sorted({int(d.get("seed", 0)) for d in docs}),
    }
    return header, rows, meta


def build_table2(reports):
    """Per-fold BIC per model per series (compare reports)."""
    docs = [d for d in reports if d["kind"] == "compare"]
    folds = max((int(d.get("folds", 0)) for d in docs), default=0)
    header = (
        ["pair_side", "model"]
        + [f"bic_fold_{i + 1}" for i in range(folds)]
        + ["bic_cv"]
    )
    rows = []
    winners = {}
    for doc in docs:
        tags = _model_columns([doc])
        winners[doc["pair_side"]] = {
            "winner_by_bic": doc.get("winner_by_bic"),
            "winner_by_kl": doc.get("winner_by_kl"),
        }
        for tag in tags:
            entry = doc.get("models", {}).get(tag)
            if entry is None:
                continue
            fold_bics = list(entry.get("fold_bics", []))
            fold_bics += [None] * (folds - len(fold_bics))
            rows.append(
                [doc["pair_side"], tag] + fold_bics + [entry.get("bic_cv")]
            )
    meta = {
        "sources": [d["_source"] for d in docs],
        "seeds": sorted({int(d.get("seed", 0)) for d in docs}),
        "winners": winners,
    }
    return header, rows, meta


def build_table3(reports):
    """Power-law tail columns per series, ascending by mean interval."""
    docs = [d for d in reports if d["kind"] == "powerlaw"]
    header = [
        "pair_side",
        "mean_interval",
        "alpha",
        "tau_min",
        "p_value",
        "dstar",
        "tail_fraction",
        "kl_tail",
    ]
    docs = sorted(docs, key=lambda d: (float(d["mean_interval"]), d["pair_side"]))
    rows = []
    notes = {}
    for doc in docs:
        if "warning" in doc:
            notes[doc["pair_side"]] = doc["warning"]
            rows.append(
                [doc["pair_side"], doc["mean_interval"]] + [None] * 6
            )
            continue
        rows.append(
            [
                doc["pair_side"],
                doc["mean_interval"],
                doc["alpha"],
                doc["tau_min"],
                doc["p_value"],
                doc["dstar"],
                doc["tail_fraction"],
                doc["kl_tail"],
            ]
        )
    meta = {
        "sources": [d["_source"] for d in docs],
        "seeds": sorted({int(d.get("seed", 0)) for d in docs}),
        "n_boot": sorted({int(d["n_boot"]) for d in docs if "n_boot" in d}),
        "warnings": notes,
    }
    return header, rows, meta


def write_table(outdir, name, header, rows, meta):
    """Write one table as rounded CSV plus full-precision JSON sidecar."""
    csv_path = os.path.join(outdir, f"{name}.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([sig4(cell) for cell in row])
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "kind": name,
        "columns": list(header),
        "rows": rows,
        "metadata": meta,
    }
    write_json(os.path.join(outdir, f"{name}.json"), sidecar)
    return csv_path


def write_tables(outdir, reports):
    """Emit every table whose report kind is present; returns paths."""
    written = []
    builders = {
        "fit": ("table1", build_table1),
        "compare": ("table2", build_table2),
        "powerlaw": ("table3", build_table3),
    }
    kinds = {doc["kind"] for doc in reports}
    for kind in REPORT_KINDS:
        if kind not in kinds:
            continue
        name, builder = builders[kind]
        header, rows, meta = builder(reports)
        written.append(write_table(outdir, name, header, rows, meta))
    return written
