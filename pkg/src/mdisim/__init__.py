"""Simulation of measurement-device-independent QKD with arbitrary
photon-number-diagonal sources over linear lossy channels."""

from .channel import ChannelParams, apply_loss, effective_transmittance
from .conditionals import Polarization, p_event, p_event_x, p_event_z_orthogonal, \
    p_event_z_parallel
from .decoy import (DecoyBounds, GainTable, KeyRate, ThreeIntensityConfig, binary_entropy,
                    decoy_bounds, e11_upper_bound, gain_table, key_rate, optimize_mu_prime,
                    true_single_pair_values, y11_lower_bound)
from .detectors import SUCCESS_EVENTS, EventPair, event_prob_given_occupation, \
    event_prob_given_output_state
from .gains import (BasisStatistics, SourcePairContext, alignment_adjust, q_event,
                    x_basis_statistics, z_basis_statistics)
from .oracle import expand_output_state, oracle_event_prob
from .sources import (PhotonNumberDistribution, SourceSpec, fock_distribution,
                      heralded_poissonian, poisson_distribution, sub_poissonian_hsps,
                      vacuum_distribution)

__version__ = "0.1.0"
