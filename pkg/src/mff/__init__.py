"""Inhomogeneous multinomial measures on mixed symbolic spaces and their multifractal quantities."""
from .exceptions import (BoundaryError, ConfigError, DegeneracyError, DomainError, MFFError,
                         ResourceError, UnsupportedCodeError)
from .symbolic import Alphabet, EpochSchedule, common_prefix_len, distance, validate_word
from .params import ModelParams
from .measure import DigitMeasure, derive_rng
from .spectrum import (SpectrumDomain, SpectrumPoint, TauCurve, TiltedWeights, entropy_tilted,
                       legendre, partition_sum_bruteforce, phi, spectrum_domain, spectrum_point,
                       tau_curve, tau_limits, tau_n, theta, theta_prime, tilt_alpha, tilt_q)
from .projection import (IDENTITY, BasicInterval, IsometryCode, LogBracket, gamma_point,
                         gray_decode, gray_encode, interval_containing, interval_of_word,
                         neighbor_split_depth, neighbors, nu_log_mass_ball, nu_log_mass_interval,
                         word_of_index)
from .diagnostics import (DoublingConstants, constants, doubling_report, en_membership,
                          exhaustive_doubling, threshold)
from .experiments import (ball_exponent, coarse_spectrum, exponent_trace, mc_formalism_check,
                          tau_oscillation_study)
from .config import RunConfig, load_config

__version__ = "0.1.0"
