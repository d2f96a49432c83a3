"""Asymptotic Gaussian laws of linear spectral statistics for spiked Wishart and F ensembles."""
from .clt import CltParams, clt_params, composed_statistic, predicted_distribution
from .closed_forms import (TestPowerInput, capacity_params, capacity_T, high_snr_power_offset, lrt_params,
                           multisample_params, normal_cdf, normal_ppf, test_power)
from .ensembles import (EnsembleSpec, Model, Regime, SpikeGeometry, SupportInterval, criticality_threshold,
                        spike_geometry, support_interval)
from .errors import (AnalyticityError, CriticalRegimeError, DomainError, NumericalError, SpikedCLTError,
                     UnsupportedStatisticError)
from .hypergeometric import hyp1f1_asymptotic, hyp1f1_series, hyp2f2_series, log_hyp1f1_series
from .identities import IDENTITY_KEYS, verify_identity
from .montecarlo import (EmpiricalReport, SampleConfig, empirical_statistic, ks_distance, run_experiment,
                         sample_ensemble, simulate_statistics)
from .quadrature import (ChebyshevSeries, QuadratureConfig, chebyshev_coefficients, log_kernel_equivalence,
                         mean_integral, spike_correction, variance_from_series, variance_pv_oracle)
from .statistics import LinearStatistic, check_domain, evaluate_statistic, make_statistic, parse_statistic

__version__ = "0.1.0"
