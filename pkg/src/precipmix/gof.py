"""Goodness-of-fit tests and histogram-vs-model tables."""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    GammaParams,
    NegBinParams,
    ParetoGPDParams,
    ParetoLomaxParams,
    gamma_cdf,
    gamma_pdf,
    gpd_cdf,
    gpd_pdf,
    lomax_pdf,
    negbin_pmf,
    sample_gamma,
    sample_gpd,
    shifted_negbin_pmf,
)
from .errors import PrecipMixError, PreconditionError
from .special import chi2_sf

MIN_GOF_SAMPLE = 50
MIN_EXPECTED = 5.0
MIN_BINS = 4


@dataclass
class GofReport:
    test: str
    statistic: float
    p_value: float = None
    dof: int = None
    bootstrap_reps: int = None
    binning: str = ""
    table: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def to_dict(self):
        return {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "dof": self.dof,
            "bootstrap_reps": self.bootstrap_reps,
            "binning": self.binning,
            "table": self.table,
            "flags": self.flags,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def merge_bins(observed, expected, min_expected=MIN_EXPECTED):
    """Merge adjacent cells until every expected count reaches ``min_expected``.

    The tail is merged from the right first; remaining small interior cells
    are merged into their right neighbour. Returns the merged arrays and the
    index of the first original cell in each merged bin.
    """
    obs = [float(o) for o in observed]
    exp = [float(e) for e in expected]
    firsts = list(range(len(obs)))
    while len(exp) > 1 and exp[-1] < min_expected:
        tail_e, tail_o = exp.pop(), obs.pop()
        exp[-1] += tail_e
        obs[-1] += tail_o
        firsts.pop()
    i = 0
    while i < len(exp) - 1:
        if exp[i] < min_expected:
            small_e, small_o = exp.pop(i), obs.pop(i)
            exp[i] += small_e
            obs[i] += small_o
            firsts.pop(i + 1)
        else:
            i += 1
    return np.array(obs), np.array(exp), firsts


def chi_square_discrete(durations, fitted: NegBinParams, n_params=2):
    """Pearson chi-square of spell durations against a shifted NB.

    Cells are k = 1, 2, ... with the last the open tail, expected counts
    n * P(X = k); the tail cell absorbs the remaining probability so the
    expected counts sum to n.
    """
    x = np.asarray(durations, dtype=np.int64)
    n = x.shape[0]
    if n < MIN_GOF_SAMPLE:
        raise PreconditionError(f"chi-square test needs n >= {MIN_GOF_SAMPLE}, got {n}")
    if np.any(x < 1):
        raise PreconditionError("durations must be >= 1")
    kmax = int(x.max())
    ks = np.arange(1, kmax + 1)
    probs = shifted_negbin_pmf(fitted, ks)
    observed = np.bincount(x, minlength=kmax + 1)[1:].astype(float)
    expected = n * probs
    # open tail: k >= kmax (nothing observed above kmax)
    expected[-1] = n * max(0.0, 1.0 - float(np.sum(probs[:-1])))
    obs, exp, firsts = merge_bins(observed, expected)
    if len(exp) < MIN_BINS:
        raise PreconditionError(f"only {len(exp)} bins with expected count >= {MIN_EXPECTED}")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(exp) - 1 - n_params
    table = []
    for j, first in enumerate(firsts):
        last = firsts[j + 1] - 1 if j + 1 < len(firsts) else None
        label = f"{first + 1}+" if last is None else (
            str(first + 1) if last == first else f"{first + 1}-{last + 1}")
        table.append({"bin": label, "observed": float(obs[j]), "expected": float(exp[j])})
    return GofReport(
        test="chi-square",
        statistic=stat,
        p_value=chi2_sf(stat, dof) if dof > 0 else None,
        dof=dof,
        binning=f"k=1.. with tail merged so expected >= {MIN_EXPECTED:g}; {len(exp)} bins",
        table=table,
        flags=[] if dof > 0 else ["no degrees of freedom left"],
    )


def two_sample_chi_square(a, b):
    """Homogeneity chi-square for two integer samples (pooled-count binning)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    top = int(max(a.max(), b.max()))
    ca = np.bincount(a, minlength=top + 1).astype(float)
    cb = np.bincount(b, minlength=top + 1).astype(float)
    na, nb = ca.sum(), cb.sum()
    pooled = ca + cb
    # merge so every expected cell count is >= 5 in both samples
    scale = min(na, nb) / (na + nb)
    _, _, firsts = merge_bins(pooled, pooled * scale)
    edges = list(firsts) + [top + 1]
    ma = np.array([ca[edges[i]:edges[i + 1]].sum() for i in range(len(firsts))])
    mb = np.array([cb[edges[i]:edges[i + 1]].sum() for i in range(len(firsts))])
    tot = ma + mb
    ea = tot * na / (na + nb)
    eb = tot * nb / (na + nb)
    stat = float(np.sum((ma - ea) ** 2 / ea) + np.sum((mb - eb) ** 2 / eb))
    dof = len(firsts) - 1
    return GofReport(test="two-sample-chi-square", statistic=stat,
                     p_value=chi2_sf(stat, dof) if dof > 0 else None, dof=dof,
                     binning=f"{len(firsts)} pooled bins")


def ks_statistic(sample, cdf):
    """sup |F_n - F| for a continuous model CDF."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.shape[0]
    F = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def _model_cdf(params):
    if isinstance(params, ParetoGPDParams):
        return lambda v: gpd_cdf(params, np.clip(v, params.mu, params.upper))
    if isinstance(params, GammaParams):
        return lambda v: gamma_cdf(params, v)
    raise TypeError(f"unsupported model for KS: {type(params).__name__}")


def _refit(params, sample):
    from .fitting import fit_gamma, fit_gpd_volumes
    if isinstance(params, ParetoGPDParams):
        rep = fit_gpd_volumes(sample, threshold=params.mu)
    else:
        rep = fit_gamma(sample)
    return rep.params, rep.converged


def _simulate(params, n, seed):
    if isinstance(params, ParetoGPDParams):
        return sample_gpd(params, n, seed)
    return sample_gamma(params, n, seed)


def ks_continuous(depths, fitted, bootstrap_reps=200, seed=None):
    """Kolmogorov-Smirnov statistic with a parametric-bootstrap p-value.

    Each replicate draws n values from ``fitted``, refits the same family and
    recomputes the statistic against its own refit. Replicate streams are
    spawned from ``seed``. ``bootstrap_reps = 0`` reports the statistic only.
    """
    x = np.asarray(depths, dtype=float)
    n = x.shape[0]
    if n < MIN_GOF_SAMPLE:
        raise PreconditionError(f"KS test needs n >= {MIN_GOF_SAMPLE}, got {n}")
    stat = ks_statistic(x, _model_cdf(fitted))
    report = GofReport(test="ks-bootstrap", statistic=stat, bootstrap_reps=int(bootstrap_reps),
                       binning="none (empirical CDF)")
    if bootstrap_reps <= 0:
        report.flags.append("bootstrap disabled: p-value not computed")
        return report
    if seed is None:
        raise PreconditionError("a seed is required for the bootstrap")
    children = np.random.SeedSequence(seed).spawn(int(bootstrap_reps))
    exceed = 0
    failures = 0
    done = 0
    for child in children:
        sim = _simulate(fitted, n, child)
        try:
            refit, ok = _refit(fitted, sim)
        except PrecipMixError:
            failures += 1
            continue
        if not ok:
            failures += 1
        done += 1
        if ks_statistic(sim, _model_cdf(refit)) >= stat:
            exceed += 1
    report.p_value = (exceed + 1) / (done + 1)
    report.table = [{"replicates_used": done, "refit_failures": failures, "exceedances": exceed}]
    if failures > 0.1 * bootstrap_reps:
        report.flags.append(f"{failures} of {bootstrap_reps} bootstrap refits failed (> 10%)")
    return report


# ---------------------------------------------------------------------------
# histogram tables


@dataclass
class HistogramReport:
    kind: str
    rows: list
    curve: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        if not self.rows:
            return ""
        w = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def curve_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "model_density"])
        for row in self.curve:
            w.writerow([row["x"], row["model_density"]])
        return buf.getvalue()


def _model_density(params, x, shifted):
    if isinstance(params, NegBinParams):
        return shifted_negbin_pmf(params, x) if shifted else negbin_pmf(params, x)
    if isinstance(params, ParetoGPDParams):
        return gpd_pdf(params, x)
    if isinstance(params, GammaParams):
        return gamma_pdf(params, x)
    if isinstance(params, ParetoLomaxParams):
        return lomax_pdf(params, x)
    raise TypeError(type(params).__name__)


def histogram_report(sample, model, bins="fd", shifted=True, max_bins=1000, curve_points=256):
    """Plot-ready empirical-vs-model table.

    Discrete (NB model): one row per observed k up to the sample maximum,
    with relative frequency and model pmf (shifted by one when ``shifted``).
    Continuous: Freedman-Diaconis bins by default (capped at ``max_bins``),
    empirical density per bin and the model density on ``curve_points``
    points spanning the sample range.
    """
    x = np.asarray(sample)
    n = x.shape[0]
    if n == 0:
        raise PreconditionError("histogram of an empty sample")
    if isinstance(model, NegBinParams):
        x = x.astype(np.int64)
        lo = 1 if shifted else 0
        kmax = int(x.max())
        counts = np.bincount(x, minlength=kmax + 1)
        ks = np.arange(lo, kmax + 1)
        pmf = _model_density(model, ks, shifted)
        rows = [{"k": int(k), "count": int(counts[k]), "frequency": counts[k] / n, "model_pmf": float(q)}
                for k, q in zip(ks, pmf)]
        return HistogramReport("discrete", rows)

    x = x.astype(float)
    flags = []
    if n == 1:
        edges = np.array([x[0] - 0.5, x[0] + 0.5])
        flags.append("single observation: one unit-width bin")
    else:
        edges = np.histogram_bin_edges(x, bins=bins)
        if edges.shape[0] - 1 > max_bins:
            edges = np.linspace(x.min(), x.max(), max_bins + 1)
            flags.append(f"bin count capped at {max_bins}")
    counts, edges = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    dens = counts / (n * widths)
    mids = 0.5 * (edges[:-1] + edges[1:])
    try:
        mdens = _model_density(model, mids, shifted)
    except ValueError:
        mdens = np.full(mids.shape, np.nan)
    rows = [{"bin_left": float(a), "bin_right": float(b), "count": int(c), "density": float(d),
             "model_density_mid": float(m)}
            for a, b, c, d, m in zip(edges[:-1], edges[1:], counts, dens, mdens)]
    grid = np.linspace(max(edges[0], 1e-12), edges[-1], curve_points)
    try:
        curve_vals = _model_density(model, grid, shifted)
    except ValueError:
        curve_vals = np.full(grid.shape, np.nan)
    curve = [{"x": float(g), "model_density": float(v)} for g, v in zip(grid, curve_vals)]
    return HistogramReport("continuous", rows, curve, flags)
