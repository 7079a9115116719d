"""MMSE of arbitrary inputs in Gaussian noise, its derivatives and information measures."""

from .distributions import (InputDistribution, MomentVector, affine, binary, convolve,
                            from_json, gaussian_plus_binary, make_discrete, make_gaussian,
                            mix, moment, moments, normalized_iid_sum, pam, point_mass)
from .errors import DistributionError, MmseLabError, QuadratureError, VerificationError
from .channel import (ChannelPoint, Posterior, PosteriorSummary, kernel_h, output_density,
                      posterior, posterior_mean, posterior_summary)
from .mmse import (MmseCurve, conditional_mmse, incremental_mmse, mmse, mmse_at,
                   mmse_bounds, mmse_curve)
from .calculus import (DerivativeReport, derivative_report, finite_difference, hermite,
                       mmse_derivative, taylor_eval, taylor_zero)
from .infotheory import (differential_entropy, discrete_entropy, mi_derivative,
                         mutual_information, mutual_information_direct)
from .analysis import CrossingReport, GridConfig, single_crossing
from .capacity import (broadcast_converse_check, broadcast_region, epi_gaussian_check,
                       secrecy_capacity, secrecy_gap)
from .oracle import McEstimate, mc_mmse, mc_moment, mc_mutual_information, mc_posterior_slice

__version__ = "0.1.0"
