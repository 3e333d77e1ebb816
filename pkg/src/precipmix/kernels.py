"""Hot inner loops, each in two flavours.

Every kernel exists as an explicit loop (``*_loop``, numba-compiled) and as a
vectorised numpy function (``*_numpy``). Both consume identical inputs and
return identical outputs (floating sums may differ in the last bits because
numpy sums pairwise), so callers may swap them freely; the public name
without suffix is bound to one of them according to
``PRECIPMIX_DISABLE_NUMBA`` (see ``_accel``).

Randomness never enters a kernel directly: callers pass pre-drawn uniform and
normal variates so that the two flavours are bit-compatible.
"""
import math

import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit

# ---------------------------------------------------------------------------
# Marsaglia-Tsang gamma rejection step


def _mt_fill_py(d, c, normals, uniforms, out, filled):
    n_out = out.shape[0]
    for i in range(normals.shape[0]):
        if filled >= n_out:
            break
        x = normals[i]
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = uniforms[i]
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2 or math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            out[filled] = d * v
            filled += 1
    return filled


def mt_fill_numpy(d, c, normals, uniforms, out, filled):
    """Accept candidate gamma(d + 1/3) draws into ``out[filled:]``.

    Attempt ``i`` uses ``normals[i]`` and ``uniforms[i]``; accepted values are
    written in attempt order. Returns the new fill count.
    """
    v = 1.0 + c * normals
    ok = v > 0.0
    v1 = np.where(ok, v, 1.0)
    v3 = v1 * v1 * v1  # same rounding as the loop, not pow
    x2 = normals * normals
    with np.errstate(divide="ignore"):
        squeeze = uniforms < 1.0 - 0.0331 * x2 * x2
        full = np.log(uniforms) < 0.5 * x2 + d * (1.0 - v3 + np.log(v3))
    accepted = (d * v3)[ok & (squeeze | full)]
    take = min(out.shape[0] - filled, accepted.shape[0])
    out[filled:filled + take] = accepted[:take]
    return filled + take


# ---------------------------------------------------------------------------
# Sequential inverse-CDF for the negative binomial


def _negbin_inverse_cdf_py(u, r, p):
    out = np.empty(u.shape[0], dtype=np.int64)
    q = 1.0 - p
    p0 = math.exp(r * math.log(p))
    for i in range(u.shape[0]):
        target = u[i]
        k = 0
        prob = p0
        cdf = prob
        while target > cdf:
            prob *= q * (r + k) / (k + 1.0)
            k += 1
            new = cdf + prob
            if new == cdf and cdf > 0.5:
                break
            cdf = new
        out[i] = k
    return out


def negbin_inverse_cdf_numpy(u, r, p):
    """Smallest ``k`` with ``F(k) >= u`` for NB(r, p), per element of ``u``.

    The CDF table is built with the same recurrence as the loop version and
    stops where the running sum saturates in double precision.
    """
    q = 1.0 - p
    probs = [math.exp(r * math.log(p))]
    cdfs = [probs[0]]
    k = 0
    while True:
        prob = probs[-1] * (q * (r + k) / (k + 1.0))
        k += 1
        new = cdfs[-1] + prob
        if new == cdfs[-1] and cdfs[-1] > 0.5:
            cdfs.append(new)
            break
        probs.append(prob)
        cdfs.append(new)
    table = np.array(cdfs)
    idx = np.searchsorted(table, u, side="left")
    return np.minimum(idx, table.shape[0] - 1).astype(np.int64)


# ---------------------------------------------------------------------------
# Run-length encoding of day states (0 dry, 1 wet, 2 missing)


def _run_lengths_py(states):
    n = states.shape[0]
    starts = np.empty(n, dtype=np.int64)
    lengths = np.empty(n, dtype=np.int64)
    values = np.empty(n, dtype=np.int8)
    m = 0
    i = 0
    while i < n:
        j = i + 1
        while j < n and states[j] == states[i]:
            j += 1
        starts[m] = i
        lengths[m] = j - i
        values[m] = states[i]
        m += 1
        i = j
    return starts[:m], lengths[:m], values[:m]


def run_lengths_numpy(states):
    """Maximal runs of equal values: ``(starts, lengths, values)``."""
    n = states.shape[0]
    if n == 0:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
                np.empty(0, dtype=np.int8))
    change = np.flatnonzero(states[1:] != states[:-1]) + 1
    starts = np.concatenate(([0], change)).astype(np.int64)
    lengths = np.diff(np.concatenate((starts, [n]))).astype(np.int64)
    return starts, lengths, states[starts].astype(np.int8)


# ---------------------------------------------------------------------------
# Window pattern counts for binary sequences with missing values (-1)


def _window_counts_py(symbols, length):
    counts = np.zeros(1 << length, dtype=np.int64)
    mask = (1 << length) - 1
    code = 0
    valid = 0
    for i in range(symbols.shape[0]):
        s = symbols[i]
        if s < 0:
            valid = 0
            code = 0
            continue
        code = ((code << 1) | s) & mask
        valid += 1
        if valid >= length:
            counts[code] += 1
    return counts


def window_counts_numpy(symbols, length):
    """Counts of every length-``length`` binary pattern among windows that
    contain no missing symbol. Pattern code is big-endian (oldest bit high)."""
    counts = np.zeros(1 << length, dtype=np.int64)
    if symbols.shape[0] < length:
        return counts
    windows = np.lib.stride_tricks.sliding_window_view(symbols, length)
    ok = np.all(windows >= 0, axis=1)
    weights = 1 << np.arange(length - 1, -1, -1, dtype=np.int64)
    codes = windows[ok].astype(np.int64) @ weights
    counts += np.bincount(codes, minlength=1 << length)
    return counts


# ---------------------------------------------------------------------------
# GPD negative log-likelihood of excesses


def _gpd_nll_py(xi, sigma, excess):
    if sigma <= 0.0:
        return np.inf
    total = 0.0
    a = xi / sigma
    for i in range(excess.shape[0]):
        w = a * excess[i]
        if w <= -1.0:
            return np.inf
        total += math.log1p(w)
    return excess.shape[0] * math.log(sigma) + (1.0 + 1.0 / xi) * total


def gpd_nll_numpy(xi, sigma, excess):
    """Negative log-likelihood of GPD(xi, sigma) for threshold excesses."""
    if sigma <= 0.0:
        return np.inf
    w = (xi / sigma) * excess
    if excess.size and w.min() <= -1.0:
        return np.inf
    return excess.shape[0] * math.log(sigma) + (1.0 + 1.0 / xi) * float(np.log1p(w).sum())


# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    mt_fill_loop = njit(_mt_fill_py)
    negbin_inverse_cdf_loop = njit(_negbin_inverse_cdf_py)
    run_lengths_loop = njit(_run_lengths_py)
    window_counts_loop = njit(_window_counts_py)
    gpd_nll_loop = njit(_gpd_nll_py)
else:  # pragma: no cover
    mt_fill_loop = _mt_fill_py
    negbin_inverse_cdf_loop = _negbin_inverse_cdf_py
    run_lengths_loop = _run_lengths_py
    window_counts_loop = _window_counts_py
    gpd_nll_loop = _gpd_nll_py

if USE_NUMBA:
    mt_fill = mt_fill_loop
    negbin_inverse_cdf = negbin_inverse_cdf_loop
    run_lengths = run_lengths_loop
    window_counts = window_counts_loop
    gpd_nll = gpd_nll_loop
else:
    mt_fill = mt_fill_numpy
    negbin_inverse_cdf = negbin_inverse_cdf_numpy
    run_lengths = run_lengths_numpy
    window_counts = window_counts_numpy
    gpd_nll = gpd_nll_numpy

KERNELS = {
    "mt_fill": (mt_fill_loop, mt_fill_numpy),
    "negbin_inverse_cdf": (negbin_inverse_cdf_loop, negbin_inverse_cdf_numpy),
    "run_lengths": (run_lengths_loop, run_lengths_numpy),
    "window_counts": (window_counts_loop, window_counts_numpy),
    "gpd_nll": (gpd_nll_loop, gpd_nll_numpy),
}
