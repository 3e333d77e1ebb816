import math

import numpy as np
import pytest
from scipy import stats
from scipy.special import betainc

from precipmix.distributions import (
    GammaParams,
    GleserMixingParams,
    NegBinParams,
    ParetoLomaxParams,
    gamma_cdf,
    gleser_mixing_cdf,
    sample_lomax,
    sample_negbin,
)
from precipmix.errors import ParameterError
from precipmix.gof import two_sample_chi_square
from precipmix.mixtures import (
    IDENTITIES,
    default_suite,
    gleser_table,
    pareto_type_logpdf,
    sample_gleser_gamma,
    sample_gleser_mixing,
    sample_lomax_compound,
    sample_negbin_compound,
    verify_gamma_gamma_mixture,
    verify_gleser_representation,
    verify_lomax_mixture,
    verify_negbin_mixture,
)
from precipmix.quadrature import QuadratureSpec, integrate

# mpmath, 40 digits: Gamma(2.5) / (Gamma(2) Gamma(0.5)) / 2^2.5
PARETO_TYPE_REF = 0.1325825214724776608


class TestIdentities:
    def test_negbin_geometric_point(self):
        rep = verify_negbin_mixture(NegBinParams(1.0, 0.5), k_max=0)
        assert rep.quadrature[0] == pytest.approx(0.5, rel=1e-12)
        assert rep.passed

    @pytest.mark.parametrize("r,p", [(0.876, 0.489), (0.847, 0.322)])
    def test_negbin_station_values(self, r, p):
        rep = verify_negbin_mixture(NegBinParams(r, p), k_max=50)
        assert rep.passed and len(rep.grid) == 51
        assert rep.max_rel_error < 1e-8

    def test_gleser_point_value(self):
        rep = verify_gleser_representation(GleserMixingParams(0.5, 1.0), [1.0])
        assert rep.quadrature[0] == pytest.approx(math.exp(-1) / math.sqrt(math.pi), rel=1e-6)

    def test_gleser_elista_shape(self):
        rep = verify_gleser_representation(GleserMixingParams(0.876, 0.957), [0.1, 0.5, 1, 2, 5, 10])
        assert rep.passed and rep.max_rel_error < 1e-6

    def test_lomax_values(self):
        rep = verify_lomax_mixture(ParetoLomaxParams(1.0, 1.0), [1.0])
        assert rep.quadrature[0] == pytest.approx(0.25, rel=1e-8)
        rep = verify_lomax_mixture(ParetoLomaxParams(2.0, 3.0), [1.5])
        assert rep.quadrature[0] == pytest.approx(2 * 9 / 4.5 ** 3, rel=1e-8)
        rep = verify_lomax_mixture(ParetoLomaxParams(0.5, 2.0), np.logspace(-2, 2, 20))
        assert rep.passed

    def test_gamma_gamma_reduces_to_lomax(self):
        rep = verify_gamma_gamma_mixture(1.0, 1.0, 1.0, [1.0])
        assert rep.quadrature[0] == pytest.approx(0.25, rel=1e-8)
        assert rep.extra["lomax_max_rel_diff"] < 1e-14

    def test_pareto_type_closed_form(self):
        assert math.exp(pareto_type_logpdf(2.0, 0.5, 1.0, 1.0)) == pytest.approx(PARETO_TYPE_REF, rel=1e-14)
        dens = np.vectorize(lambda x: math.exp(pareto_type_logpdf(2.0, 0.5, 1.0, x)) if x > 0 else 0.0)
        assert integrate(dens, 0.0, math.inf).value == pytest.approx(1.0, abs=1e-9)

    def test_r_one_gleser_rejected(self):
        with pytest.raises(ValueError):
            verify_gleser_representation(GleserMixingParams(1.0, 1.0), [1.0])

    def test_corrupted_tolerance_reports_worst_point(self):
        rep = verify_lomax_mixture(ParetoLomaxParams(2.0, 1.0), [0.1, 1.0, 10.0], tolerance=1e-17)
        assert not rep.passed
        assert rep.worst_point in rep.grid
        assert rep.failures and all("rel_error" in f for f in rep.failures)

    def test_quadrature_failure_is_captured(self):
        starved = QuadratureSpec(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=2)
        rep = verify_negbin_mixture(NegBinParams(0.3, 0.322), k_max=3, quad=starved)
        assert not rep.passed
        assert any(f.get("worst_interval") for f in rep.failures)

    def test_default_suite_selection(self):
        only = default_suite("lomax")
        assert {r.identity for r in only} == {"lomax"}
        with pytest.raises(ParameterError):
            default_suite("nope")
        assert set(IDENTITIES) == {"negbin-mixture", "gleser", "lomax", "gamma-gamma"}

    def test_report_serialises(self):
        import json
        rep = verify_negbin_mixture(NegBinParams(2.0, 0.5), k_max=2)
        doc = json.loads(json.dumps(rep.to_dict()))
        assert doc["identity"] == "negbin-mixture" and doc["passed"]


class TestCompoundSamplers:
    def test_negbin_compound_mean_and_equivalence(self):
        geo = NegBinParams(1.0, 0.5)
        x = sample_negbin_compound(geo, 100_000, 1)
        assert abs(x.mean() - 1.0) < 0.03
        nb = NegBinParams(0.876, 0.489)
        p = two_sample_chi_square(sample_negbin_compound(nb, 100_000, 2), sample_negbin(nb, 100_000, 3)).p_value
        assert p > 0.01

    def test_lomax_compound(self):
        one = ParetoLomaxParams(1.0, 1.0)
        x = sample_lomax_compound(one, 100_000, 4)
        assert abs(np.median(x) - 1.0) < 0.02
        assert stats.ks_2samp(x, sample_lomax(one, 100_000, 5)).pvalue > 0.01

    def test_determinism(self):
        nb = NegBinParams(0.5, 0.3)
        assert np.array_equal(sample_negbin_compound(nb, 500, 9), sample_negbin_compound(nb, 500, 9))
        lx = ParetoLomaxParams(2.0, 1.0)
        assert np.array_equal(sample_lomax_compound(lx, 500, 9), sample_lomax_compound(lx, 500, 9))
        with pytest.raises(ParameterError):
            sample_lomax_compound(lx, 5, None)


class TestGleserSampling:
    @pytest.mark.parametrize("r,theta", [(0.3, 1.0), (0.5, 1.0), (0.876, 0.957)])
    def test_table_matches_beta_closed_form(self, r, theta):
        g = GleserMixingParams(r, theta)
        table = gleser_table(g)
        assert table.truncation_mass < 1e-9
        probe = theta * np.array([1.001, 1.1, 2.0, 10.0, 1e3])
        # mixing law is theta / B with B ~ Beta(r, 1 - r)
        exact = 1.0 - betainc(r, 1.0 - r, theta / probe)
        assert np.allclose(table.cdf_at(probe), exact, atol=1e-5)
        assert np.allclose(gleser_mixing_cdf(g, probe), exact, rtol=1e-12)

    def test_draws_above_theta_and_deterministic(self):
        g = GleserMixingParams(0.5, 2.0)
        x = sample_gleser_mixing(g, 10_000, 3)
        assert np.all(x > 2.0)
        assert np.array_equal(x, sample_gleser_mixing(g, 10_000, 3))
        y = sample_gleser_gamma(g, 1000, 3)
        assert np.array_equal(y, sample_gleser_gamma(g, 1000, 3))

    def test_two_stage_is_gamma(self):
        g = GleserMixingParams(0.5, 1.0)
        x = sample_gleser_gamma(g, 100_000, 7)
        assert stats.kstest(x, lambda v: gamma_cdf(GammaParams(0.5, 1.0), v)).pvalue > 0.01
