"""Mixed Poisson and mixed exponential models for daily precipitation.

Wet-spell durations are modelled as a shifted negative binomial (a
gamma-mixed Poisson law) and daily depths as a generalized Pareto law (a
gamma-mixed exponential). The package extracts spells from daily series,
fits both models, tests the fits, and checks the mixture identities behind
them by quadrature.
"""
__version__ = "0.1.0"

from ._accel import USE_NUMBA, backend_name
from .distributions import (
    GammaParams,
    GleserMixingParams,
    NegBinParams,
    ParetoGPDParams,
    ParetoLomaxParams,
)
from .fitting import FitReport, fit_gamma, fit_gpd_volumes, fit_negbin_durations
from .gof import GofReport, chi_square_discrete, histogram_report, ks_continuous
from .ingest import DailySeries, SpellSample, extract_spells, markov_order_test, parse_csv
from .mixtures import IdentityReport
from .quadrature import QuadratureSpec

__all__ = [
    "USE_NUMBA", "backend_name",
    "NegBinParams", "GammaParams", "ParetoGPDParams", "ParetoLomaxParams", "GleserMixingParams",
    "FitReport", "fit_negbin_durations", "fit_gpd_volumes", "fit_gamma",
    "GofReport", "chi_square_discrete", "ks_continuous", "histogram_report",
    "DailySeries", "SpellSample", "parse_csv", "extract_spells", "markov_order_test",
    "IdentityReport", "QuadratureSpec",
]
