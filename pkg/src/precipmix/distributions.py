"""Distribution families used by the precipitation models.

Parameter bundles validate on construction. Every density is computed in
log space and exponentiated last. All evaluators accept scalars or numpy
arrays and return the same shape.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .errors import DomainError, ParameterError
from .special import log_gamma, regularized_gamma_p, regularized_gamma_p_array


def _finite(*values):
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class NegBinParams:
    """Negative binomial NB(r, p): P(Y=k) = C(r+k-1, k) p^r (1-p)^k, k >= 0."""

    r: float
    p: float

    def __post_init__(self):
        if not (_finite(self.r, self.p) and self.r > 0 and 0 < self.p < 1):
            raise ParameterError(f"NegBinParams needs r > 0 and 0 < p < 1, got r={self.r}, p={self.p}")

    @property
    def mean(self):
        return self.r * (1 - self.p) / self.p

    @property
    def mixing(self):
        """Gamma law of the Poisson intensity: shape r, rate p/(1-p)."""
        return GammaParams(self.r, self.p / (1 - self.p))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class GammaParams:
    """Gamma law with density rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (_finite(self.shape, self.rate) and self.shape > 0 and self.rate > 0):
            raise ParameterError(f"GammaParams needs shape > 0 and rate > 0, got {self.shape}, {self.rate}")

    @property
    def mean(self):
        return self.shape / self.rate

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ParetoGPDParams:
    """Generalized Pareto F(x) = 1 - (1 + xi (x - mu) / sigma)^(-1/xi), xi != 0."""

    xi: float
    sigma: float
    mu: float = 0.0

    def __post_init__(self):
        if not _finite(self.xi, self.sigma, self.mu):
            raise ParameterError("ParetoGPDParams must be finite")
        if self.sigma <= 0:
            raise ParameterError(f"GPD scale sigma must be positive, got {self.sigma}")
        if self.xi == 0:
            raise ParameterError("GPD shape xi = 0 (exponential limit) is excluded from the family")

    @property
    def upper(self):
        """Upper support end (inf for xi > 0)."""
        return math.inf if self.xi > 0 else self.mu - self.sigma / self.xi

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ParetoLomaxParams:
    """Lomax (Pareto II) density s mu^s (x + mu)^-(1+s) on x > 0."""

    s: float
    mu: float

    def __post_init__(self):
        if not (_finite(self.s, self.mu) and self.s > 0 and self.mu > 0):
            raise ParameterError(f"ParetoLomaxParams needs s > 0 and mu > 0, got {self.s}, {self.mu}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class GleserMixingParams:
    """Mixing law of exponential rates that reproduces gamma(r, theta), 0 < r < 1.

    Density theta^r (g - theta)^(-r) / (g Gamma(1-r) Gamma(r)) on g > theta.
    At r = 1 the law collapses to a point mass at theta; that case is not
    representable here, see :func:`gleser_degenerate_rate`.
    """

    r: float
    theta: float

    def __post_init__(self):
        if not _finite(self.r, self.theta):
            raise ParameterError("GleserMixingParams must be finite")
        if self.r == 1:
            raise ParameterError(
                "r = 1 is the degenerate case: the mixing law is a point mass at theta "
                "and the mixture is the exponential density itself")
        if not (0 < self.r < 1):
            raise ParameterError(f"Gleser representation needs 0 < r < 1, got r={self.r}")
        if self.theta <= 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")

    @property
    def target(self):
        """The gamma law this mixture reproduces."""
        return GammaParams(self.r, self.theta)

    def to_dict(self):
        return asdict(self)


def gleser_degenerate_rate(theta):
    """Rate of the point-mass mixing law at r = 1: the exponential rate itself."""
    if not theta > 0:
        raise ParameterError("theta must be positive")
    return float(theta)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(values, scalar):
    return float(values) if scalar else values


# ---------------------------------------------------------------------------
# negative binomial


def negbin_logpmf(params: NegBinParams, k):
    k_arr = np.asarray(k)
    if np.any(k_arr < 0) or np.any(np.asarray(k_arr, dtype=float) != np.floor(k_arr)):
        raise DomainError("negative binomial support is the nonnegative integers")
    kf, scalar = _as_array(k_arr)
    r, p = params.r, params.p
    if scalar:
        kv = float(kf)
        body = 0.0 if kv == 0 else math.lgamma(r + kv) - math.lgamma(r) - math.lgamma(kv + 1.0)
        return body + r * math.log(p) + kv * math.log1p(-p)
    body = np.where(kf == 0, 0.0,
                    log_gamma(r + kf) - math.lgamma(r) - log_gamma(kf + 1.0))
    return body + r * math.log(p) + kf * math.log1p(-p)


def negbin_pmf(params: NegBinParams, k):
    """P(Y = k) for Y ~ NB(r, p), k = 0, 1, 2, ..."""
    return np.exp(negbin_logpmf(params, k)) if np.ndim(k) else math.exp(negbin_logpmf(params, k))


def negbin_cdf(params: NegBinParams, k):
    """P(Y <= k), summing the pmf recurrence (exact for moderate k)."""
    k = int(k)
    if k < 0:
        return 0.0
    ks = np.arange(k + 1)
    return float(min(1.0, np.sum(negbin_pmf(params, ks))))


def shifted_negbin_pmf(params: NegBinParams, k):
    """P(X = k) for X = Y + 1, k >= 1. Identical to ``negbin_pmf(params, k - 1)``."""
    k_arr = np.asarray(k)
    if np.any(k_arr < 1):
        raise DomainError("shifted negative binomial support starts at 1 (durations are >= 1 day)")
    return negbin_pmf(params, k - 1)


def shifted_negbin_logpmf(params: NegBinParams, k):
    k_arr = np.asarray(k)
    if np.any(k_arr < 1):
        raise DomainError("shifted negative binomial support starts at 1")
    return negbin_logpmf(params, k - 1)


# ---------------------------------------------------------------------------
# gamma


def gamma_logpdf(params: GammaParams, x):
    x, scalar = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("gamma density is evaluated on x > 0 only")
    a, b = params.shape, params.rate
    out = a * math.log(b) + (a - 1.0) * np.log(x) - b * x - math.lgamma(a)
    return _ret(out, scalar)


def gamma_pdf(params: GammaParams, x):
    """Gamma density with the rate parametrization, x > 0."""
    return np.exp(gamma_logpdf(params, x)) if np.ndim(x) else math.exp(gamma_logpdf(params, x))


def gamma_cdf(params: GammaParams, x):
    x, scalar = _as_array(x)
    if scalar:
        return regularized_gamma_p(params.shape, params.rate * float(x)) if x > 0 else 0.0
    return regularized_gamma_p_array(params.shape, params.rate * np.maximum(x, 0.0))


# ---------------------------------------------------------------------------
# generalized Pareto


def _gpd_check_support(params, x):
    z = (x - params.mu) / params.sigma
    if np.any(z < 0):
        raise DomainError("GPD argument below the location parameter")
    if params.xi < 0 and np.any(params.xi * z < -1):
        raise DomainError("GPD argument above the upper support end mu - sigma/xi")
    return z


def gpd_cdf(params: ParetoGPDParams, x):
    """Distribution function 1 - (1 + xi (x - mu)/sigma)^(-1/xi) on the support."""
    x, scalar = _as_array(x)
    z = _gpd_check_support(params, x)
    with np.errstate(divide="ignore"):
        out = -np.expm1(-np.log1p(params.xi * z) / params.xi)
    return _ret(out, scalar)


def gpd_logpdf(params: ParetoGPDParams, x):
    x, scalar = _as_array(x)
    z = _gpd_check_support(params, x)
    with np.errstate(divide="ignore"):
        out = -math.log(params.sigma) - (1.0 + 1.0 / params.xi) * np.log1p(params.xi * z)
    return _ret(out, scalar)


def gpd_pdf(params: ParetoGPDParams, x):
    return np.exp(gpd_logpdf(params, x))


def gpd_quantile(params: ParetoGPDParams, u):
    u = np.asarray(u, dtype=float)
    return params.mu + params.sigma * np.expm1(-params.xi * np.log1p(-u)) / params.xi


# ---------------------------------------------------------------------------
# Lomax


def lomax_logpdf(params: ParetoLomaxParams, x):
    x, scalar = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("Lomax density is evaluated on x > 0 only")
    s, mu = params.s, params.mu
    out = math.log(s) + s * math.log(mu) - (1.0 + s) * np.log(x + mu)
    return _ret(out, scalar)


def lomax_pdf(params: ParetoLomaxParams, x):
    """Density s mu^s (x + mu)^-(1+s), x > 0."""
    return np.exp(lomax_logpdf(params, x)) if np.ndim(x) else math.exp(lomax_logpdf(params, x))


def lomax_cdf(params: ParetoLomaxParams, x):
    x, scalar = _as_array(x)
    if np.any(x < 0):
        raise DomainError("Lomax support is x >= 0")
    out = -np.expm1(-params.s * np.log1p(x / params.mu))
    return _ret(out, scalar)


def lomax_to_gpd(params: ParetoLomaxParams) -> ParetoGPDParams:
    """Rewrite Lomax(s, mu) as the equivalent GPD(xi=1/s, sigma=mu/s, location 0)."""
    return ParetoGPDParams(xi=1.0 / params.s, sigma=params.mu / params.s, mu=0.0)


# ---------------------------------------------------------------------------
# Gleser mixing density


def gleser_mixing_logpdf(params: GleserMixingParams, gamma):
    g, scalar = _as_array(gamma)
    if np.any(g == params.theta):
        raise DomainError("Gleser mixing density is infinite at gamma = theta")
    r, th = params.r, params.theta
    const = r * math.log(th) - math.lgamma(1.0 - r) - math.lgamma(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(g > th, const - r * np.log(g - th) - np.log(g), -np.inf)
    return _ret(out, scalar)


def gleser_mixing_pdf(params: GleserMixingParams, gamma):
    """Mixing density of exponential rates; zero below theta, singular at theta."""
    return np.exp(gleser_mixing_logpdf(params, gamma))


def gleser_mixing_cdf(params: GleserMixingParams, gamma):
    """Closed-form CDF via the representation gamma = theta / B, B ~ Beta(r, 1-r)."""
    from scipy.special import betainc
    g, scalar = _as_array(gamma)
    with np.errstate(divide="ignore"):
        b = np.clip(params.theta / np.where(g > params.theta, g, params.theta), 0.0, 1.0)
    out = np.where(g > params.theta, 1.0 - betainc(params.r, 1.0 - params.r, b), 0.0)
    return _ret(out, scalar)


# ---------------------------------------------------------------------------
# direct samplers


def _rng(seed):
    if seed is None:
        raise ParameterError("an explicit seed is required")
    return np.random.default_rng(seed)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def standard_gamma_draws(shape, n, rng):
    """Gamma(shape, 1) variates by Marsaglia-Tsang rejection.

    For shape < 1 a gamma(shape + 1) draw is multiplied by U^(1/shape),
    in log space to avoid underflow.
    """
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        batch = int(1.1 * (n - filled)) + 16
        normals = rng.standard_normal(batch)
        uniforms = rng.random(batch)
        filled = kernels.mt_fill(d, c, normals, uniforms, out, filled)
    if boost:
        u = rng.random(n)
        with np.errstate(divide="ignore"):
            out = np.exp(np.log(out) + np.log(u) / shape)
    return out


def sample_gamma(params: GammaParams, n, seed):
    n = _check_n(n)
    return standard_gamma_draws(params.shape, n, _rng(seed)) / params.rate


def sample_negbin(params: NegBinParams, n, seed):
    """Direct NB draws by sequential inverse-CDF search over k."""
    n = _check_n(n)
    if params.r * math.log(params.p) < -700:
        raise ParameterError("p^r underflows; parameters too extreme for the inverse-CDF sampler")
    u = _rng(seed).random(n)
    return kernels.negbin_inverse_cdf(u, float(params.r), float(params.p))


def sample_shifted_negbin(params: NegBinParams, n, seed):
    return sample_negbin(params, n, seed) + 1


def sample_gpd(params: ParetoGPDParams, n, seed):
    n = _check_n(n)
    return gpd_quantile(params, _rng(seed).random(n))


def sample_lomax(params: ParetoLomaxParams, n, seed):
    n = _check_n(n)
    u = _rng(seed).random(n)
    return params.mu * np.expm1(-np.log1p(-u) / params.s)
