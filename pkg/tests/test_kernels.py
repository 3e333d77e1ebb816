"""Loop (compiled) and numpy flavours of each kernel must agree."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from precipmix import _accel, kernels

LOOP, NUMPY = 0, 1
PY_LOOPS = {
    "mt_fill": kernels._mt_fill_py,
    "negbin_inverse_cdf": kernels._negbin_inverse_cdf_py,
    "run_lengths": kernels._run_lengths_py,
    "window_counts": kernels._window_counts_py,
    "gpd_nll": kernels._gpd_nll_py,
}


def flavours(name):
    loop, vec = kernels.KERNELS[name]
    return [loop, vec, PY_LOOPS[name]]


def test_public_binding_follows_flag():
    expected = LOOP if _accel.USE_NUMBA else NUMPY
    for name, pair in kernels.KERNELS.items():
        assert getattr(kernels, name) is pair[expected]
    assert _accel.backend_name() in ("numba", "numpy")


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 30.0), st.integers(1, 300), st.integers(0, 5))
@settings(max_examples=60, deadline=None)
def test_mt_fill_agree(seed, shape, n_out, prefilled):
    rng = np.random.default_rng(seed)
    a = max(shape, 1.0)
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    normals = rng.standard_normal(n_out + 20)
    uniforms = rng.random(n_out + 20)
    prefilled = min(prefilled, n_out)
    outs = []
    for fn in flavours("mt_fill"):
        out = np.full(n_out, -1.0)
        filled = fn(d, c, normals, uniforms, out, prefilled)
        outs.append((filled, out))
    for filled, out in outs[1:]:
        assert filled == outs[0][0]
        assert np.array_equal(out, outs[0][1])


@given(hnp.arrays(np.float64, st.integers(0, 200), elements=st.floats(0.0, 1.0, exclude_max=True)),
       st.floats(0.05, 20.0), st.floats(0.01, 0.99))
@settings(max_examples=80, deadline=None)
def test_negbin_inverse_cdf_agree(u, r, p):
    res = [fn(u, r, p) for fn in flavours("negbin_inverse_cdf")]
    for other in res[1:]:
        assert np.array_equal(other, res[0])


def test_negbin_inverse_cdf_extreme_uniforms():
    u = np.array([0.0, 1e-300, 0.5, 1 - 1e-16, np.nextafter(1.0, 0.0)])
    res = [fn(u, 0.3, 0.05) for fn in flavours("negbin_inverse_cdf")]
    for other in res[1:]:
        assert np.array_equal(other, res[0])
    assert res[0][0] == 0 and np.all(np.diff(res[0]) >= 0)


@given(hnp.arrays(np.int8, st.integers(0, 120), elements=st.integers(0, 2)))
@settings(max_examples=100, deadline=None)
def test_run_lengths_agree(states):
    res = [fn(states) for fn in flavours("run_lengths")]
    for other in res[1:]:
        for a, b in zip(other, res[0]):
            assert np.array_equal(a, b)
    starts, lengths, values = res[0]
    assert lengths.sum() == states.shape[0]
    assert np.all(values[1:] != values[:-1])


@given(hnp.arrays(np.int8, st.integers(0, 150), elements=st.integers(-1, 1)), st.integers(1, 5))
@settings(max_examples=100, deadline=None)
def test_window_counts_agree(symbols, length):
    res = [fn(symbols, length) for fn in flavours("window_counts")]
    for other in res[1:]:
        assert np.array_equal(other, res[0])


def test_window_counts_big_endian():
    counts = kernels.window_counts_numpy(np.array([1, 0, 0], dtype=np.int8), 3)
    assert counts[0b100] == 1 and counts.sum() == 1
    # a missing symbol breaks every window through it
    assert kernels.window_counts_loop(np.array([1, -1, 0, 1], dtype=np.int8), 2).tolist() == [0, 1, 0, 0]


@given(st.floats(-0.9, 3.0).filter(lambda v: abs(v) > 1e-4), st.floats(0.05, 10.0),
       hnp.arrays(np.float64, st.integers(0, 100), elements=st.floats(0.0, 50.0)))
@settings(max_examples=80, deadline=None)
def test_gpd_nll_agree(xi, sigma, excess):
    res = [fn(xi, sigma, excess) for fn in flavours("gpd_nll")]
    for other in res[1:]:
        if math.isinf(res[0]):
            assert math.isinf(other)
        else:
            assert other == pytest.approx(res[0], rel=1e-12, abs=1e-12)


def test_gpd_nll_outside_support():
    x = np.array([0.5, 3.0])
    for fn in flavours("gpd_nll"):
        assert fn(-0.5, 1.0, x) == math.inf
        assert fn(0.5, 0.0, x) == math.inf


_SAMPLER_SCRIPT = """
import hashlib, numpy as np
from precipmix.distributions import GammaParams, NegBinParams, sample_gamma, sample_negbin
from precipmix.ingest import DailySeries, extract_spells
from precipmix._accel import backend_name
a = sample_gamma(GammaParams(0.6, 1.3), 5000, 4)
b = sample_negbin(NegBinParams(0.876, 0.489), 5000, 4)
rng = np.random.default_rng(1)
d = np.where(rng.random(400) < 0.4, rng.exponential(3.0, 400), 0.0)
d[rng.random(400) < 0.05] = np.nan
s = extract_spells(DailySeries.from_depths(d.tolist()))
h = hashlib.sha256(a.tobytes() + b.tobytes() + s.wet_durations.tobytes() + s.dry_durations.tobytes())
print(backend_name(), h.hexdigest())
"""


def test_backends_produce_identical_samples():
    import os
    import subprocess
    import sys

    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, PRECIPMIX_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", _SAMPLER_SCRIPT], env=env,
                             capture_output=True, text=True, check=True)
        name, digest = res.stdout.split()
        outs[name] = digest
    assert set(outs) == {"numba", "numpy"}
    assert outs["numba"] == outs["numpy"]
