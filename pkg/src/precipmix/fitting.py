"""Maximum-likelihood fits for spell durations and precipitation depths."""
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .distributions import GammaParams, NegBinParams, ParetoGPDParams
from .errors import DegenerateSampleError, PreconditionError
from .special import digamma, log_gamma, trigamma

MIN_SAMPLE = 30
R_BRACKET = (1e-3, 1e3)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class FitReport:
    family: str
    estimates: dict
    standard_errors: dict
    log_likelihood: float
    n: int
    converged: bool
    iterations: int
    initializer: dict
    convention: str = ""
    flags: list = field(default_factory=list)

    @property
    def params(self):
        if self.family == "negbin":
            return NegBinParams(self.estimates["r"], self.estimates["p"])
        if self.family == "gpd":
            return ParetoGPDParams(self.estimates["xi"], self.estimates["sigma"], self.estimates["mu"])
        if self.family == "gamma":
            return GammaParams(self.estimates["shape"], self.estimates["rate"])
        raise ValueError(self.family)

    def to_dict(self):
        return {
            "family": self.family,
            "estimates": self.estimates,
            "se": self.standard_errors,
            "loglik": self.log_likelihood,
            "n": self.n,
            "converged": self.converged,
            "iterations": self.iterations,
            "initializer": self.initializer,
            "convention": self.convention,
            "flags": self.flags,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def hessian(f, x, scale=None):
    """Central-difference Hessian of ``f`` at ``x``.

    Steps are eps^(1/3) times ``scale`` (default ``|x|``, floored at 1e-8),
    which gives second derivatives to roughly 1e-4 relative accuracy; ample
    for standard errors.
    """
    x = np.asarray(x, dtype=float)
    k = x.shape[0]
    scale = np.maximum(np.abs(x), 1e-8) if scale is None else np.asarray(scale, dtype=float)
    h = np.finfo(float).eps ** (1.0 / 3.0) * scale
    out = np.empty((k, k))
    f0 = f(x)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h[i]
        out[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(k)
            ej[j] = h[j]
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * h[i] * h[j])
            out[i, j] = out[j, i] = val
    return out


def _standard_errors(loglik, theta):
    H = hessian(loglik, theta)
    try:
        cov = np.linalg.inv(-H)
    except np.linalg.LinAlgError:
        return np.full(theta.shape[0], np.nan)
    diag = np.diag(cov)
    return np.where(diag > 0, np.sqrt(np.abs(diag)), np.nan)


# ---------------------------------------------------------------------------
# negative binomial durations


def negbin_loglik(r, p, values, counts):
    """Full NB log-likelihood from a table of distinct values and their counts."""
    n = counts.sum()
    total = float(values @ counts)
    body = float(counts @ (log_gamma(r + values) - log_gamma(values + 1.0))) - n * math.lgamma(r)
    return body + n * r * math.log(p) + total * math.log1p(-p)


def profile_loglik(r, values, counts, mean):
    """NB log-likelihood with p replaced by its conditional MLE r / (r + mean).

    The term -sum(log k!) is omitted (constant in r).
    """
    n = counts.sum()
    body = float(counts @ log_gamma(r + values)) - n * math.lgamma(r)
    p = r / (r + mean)
    return body + n * r * math.log(p) + n * mean * math.log1p(-p)


def _golden_max(f, lo, hi, tol):
    """Golden-section maximisation on [lo, hi]; returns (x, iterations)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol:
        it += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b), it


def fit_negbin_durations(durations):
    """Fit X = Y + 1, Y ~ NB(r, p), to spell durations by profile likelihood.

    For fixed r the MLE of p is r / (r + mean(Y)); ``r`` is found by a
    coarse scan followed by golden-section search over log r within
    ``R_BRACKET``. Standard errors come from the finite-difference observed
    information of the full two-parameter likelihood.
    """
    x = np.asarray(durations)
    if x.ndim != 1 or x.shape[0] < MIN_SAMPLE:
        raise PreconditionError(f"need at least {MIN_SAMPLE} durations, got {x.size}")
    if np.any(x < 1) or np.any(x != np.floor(x)):
        raise PreconditionError("durations must be integers >= 1")
    y = x.astype(np.int64) - 1
    if not np.any(y > 0):
        raise DegenerateSampleError("every spell lasts one day: the NB fit degenerates at p -> 1")
    values, counts = np.unique(y, return_counts=True)
    values = values.astype(float)
    counts = counts.astype(float)
    n = int(x.shape[0])
    mean = float(values @ counts) / n

    def prof(log_r):
        return profile_loglik(math.exp(log_r), values, counts, mean)

    lo, hi = math.log(R_BRACKET[0]), math.log(R_BRACKET[1])
    grid = np.linspace(lo, hi, 121)
    scan = np.array([prof(g) for g in grid])
    j = int(np.argmax(scan))
    a, b = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
    log_r, iters = _golden_max(prof, a, b, 1e-10)
    flags = []
    converged = True
    if j in (0, grid.size - 1) or abs(log_r - lo) < 1e-6 or abs(log_r - hi) < 1e-6:
        converged = False
        flags.append("r at search bracket edge (data may be under-dispersed)")
    r = math.exp(log_r)
    p = r / (r + mean)

    def full(theta):
        rr, pp = theta
        if rr <= 0 or not 0 < pp < 1:
            return -np.inf
        return negbin_loglik(rr, pp, values, counts)

    se = _standard_errors(full, np.array([r, p]))
    ll = float(negbin_loglik(r, p, values, counts))
    return FitReport(
        family="negbin",
        estimates={"r": r, "p": p},
        standard_errors={"r": float(se[0]), "p": float(se[1])},
        log_likelihood=ll,
        n=n,
        converged=converged and math.isfinite(ll),
        iterations=iters,
        initializer={"r": math.exp(grid[j]), "p": math.exp(grid[j]) / (math.exp(grid[j]) + mean)},
        convention="durations X = Y + 1 with Y ~ NB(r, p); P(Y=k) = G(r+k)/(G(r)k!) p^r (1-p)^k",
        flags=flags,
    )


# ---------------------------------------------------------------------------
# generalized Pareto volumes


def gpd_pwm(excess):
    """Probability-weighted-moment estimates of (xi, sigma) for excesses over 0."""
    z = np.sort(np.asarray(excess, dtype=float))
    n = z.shape[0]
    a0 = z.mean()
    plot = (np.arange(1, n + 1) - 0.35) / n
    a1 = float(np.mean((1.0 - plot) * z))
    denom = a0 - 2.0 * a1
    k = a0 / denom - 2.0
    sigma = 2.0 * a0 * a1 / denom
    return -k, sigma


def gpd_loglik(xi, sigma, excess):
    return -kernels.gpd_nll(float(xi), float(sigma), excess)


def fit_gpd_volumes(depths, threshold=0.0, xi_zero_tol=1e-6):
    """Fit GPD(xi, sigma, mu = threshold) to depths above the wet threshold.

    Starts from the probability-weighted-moment estimate and refines the
    two-parameter likelihood with Nelder-Mead over (xi, log sigma). If the
    refinement fails the PWM values are returned with a flag.
    """
    x = np.asarray(depths, dtype=float)
    if x.ndim != 1 or x.shape[0] < MIN_SAMPLE:
        raise PreconditionError(f"need at least {MIN_SAMPLE} depths, got {x.size}")
    if np.any(~np.isfinite(x)) or np.any(x <= threshold):
        raise PreconditionError("all depths must be finite and exceed the location (wet threshold)")
    z = x - threshold
    if np.ptp(z) == 0:
        raise DegenerateSampleError("all depths are equal: the GPD likelihood has no interior maximum")
    xi0, sigma0 = gpd_pwm(z)
    flags = []
    if not (math.isfinite(xi0) and sigma0 > 0):
        xi0, sigma0 = 0.1, float(z.mean())
        flags.append("PWM initializer invalid, started from (0.1, mean)")
    if xi0 == 0:
        xi0 = 1e-3

    def nll(theta):
        xi, log_s = theta
        if xi == 0 or not math.isfinite(log_s):
            return np.inf
        return kernels.gpd_nll(xi, math.exp(log_s), z)

    res = minimize(nll, np.array([xi0, math.log(sigma0)]), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-10, "maxiter": 4000, "maxfev": 8000})
    converged = bool(res.success) and math.isfinite(res.fun)
    if converged:
        xi, sigma = float(res.x[0]), math.exp(float(res.x[1]))
    else:
        xi, sigma = xi0, sigma0
        flags.append(f"MLE refinement failed ({res.message}); PWM estimate returned")
    if abs(xi) < xi_zero_tol:
        converged = False
        flags.append("xi estimate numerically zero: outside the xi != 0 family")
        xi = xi_zero_tol if xi >= 0 else -xi_zero_tol
    ll = gpd_loglik(xi, sigma, z)
    if not math.isfinite(ll):
        converged = False
        flags.append("log-likelihood not finite at the estimate")
        se = np.array([np.nan, np.nan])
    else:
        se = _standard_errors(lambda t: gpd_loglik(t[0], t[1], z) if t[1] > 0 else -np.inf,
                              np.array([xi, sigma]))
    return FitReport(
        family="gpd",
        estimates={"xi": xi, "sigma": sigma, "mu": float(threshold)},
        standard_errors={"xi": float(se[0]), "sigma": float(se[1]), "mu": 0.0},
        log_likelihood=float(ll) if math.isfinite(ll) else float("nan"),
        n=int(x.shape[0]),
        converged=converged,
        iterations=int(res.nit),
        initializer={"xi": float(xi0), "sigma": float(sigma0)},
        convention="location mu fixed at the wet threshold",
        flags=flags,
    )


# ---------------------------------------------------------------------------
# gamma


def gamma_loglik(shape, rate, n, sum_x, sum_log):
    return n * (shape * math.log(rate) - math.lgamma(shape)) + (shape - 1.0) * sum_log - rate * sum_x


def fit_gamma(sample, max_iter=100):
    """Gamma MLE: solve log(a) - psi(a) = log(mean) - mean(log x) for the shape.

    Newton steps from the Minka closed-form start, kept inside a shrinking
    bisection bracket; rate = shape / mean.
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1 or x.shape[0] < MIN_SAMPLE:
        raise PreconditionError(f"need at least {MIN_SAMPLE} values, got {x.size}")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise PreconditionError("gamma sample values must be positive and finite")
    if np.ptp(x) == 0:
        raise DegenerateSampleError("sample variance is zero")
    n = x.shape[0]
    mean = float(x.mean())
    mean_log = float(np.log(x).mean())
    target = math.log(mean) - mean_log
    if not target > 0:
        raise DegenerateSampleError("log(mean) - mean(log) is not positive")
    a = (3.0 - target + math.sqrt((target - 3.0) ** 2 + 24.0 * target)) / (12.0 * target)
    a_init = a
    lo, hi = 1e-12, 1e12
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g = math.log(a) - digamma(a) - target   # decreasing in a
        if g > 0:
            lo = max(lo, a)
        else:
            hi = min(hi, a)
        step = g / (1.0 / a - trigamma(a))
        nxt = a - step
        if not (lo < nxt < hi):
            nxt = math.sqrt(lo * hi) if hi < 1e12 else 2.0 * lo
        if abs(nxt - a) <= 1e-14 * a:
            a = nxt
            converged = True
            break
        a = nxt
    rate = a / mean
    sum_x = float(x.sum())
    sum_log = float(np.log(x).sum())
    se = _standard_errors(
        lambda t: gamma_loglik(t[0], t[1], n, sum_x, sum_log) if t[0] > 0 and t[1] > 0 else -np.inf,
        np.array([a, rate]))
    return FitReport(
        family="gamma",
        estimates={"shape": a, "rate": rate},
        standard_errors={"shape": float(se[0]), "rate": float(se[1])},
        log_likelihood=gamma_loglik(a, rate, n, sum_x, sum_log),
        n=int(n),
        converged=converged,
        iterations=it,
        initializer={"shape": a_init, "rate": a_init / mean},
        convention="rate parametrization",
        flags=[] if converged else ["Newton iteration did not converge"],
    )
