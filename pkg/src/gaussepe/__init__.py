"""
Entanglement of purification estimates for fermionic Gaussian states.

The core objects are covariance matrices ``C = 2<a^dag a> - I`` on a set of
modes. :func:`epe` evaluates the channel-weighted entropy of a region against
another; :mod:`gaussepe.purify` rebuilds the same weights from an explicit
purification; :mod:`gaussepe.models` and :mod:`gaussepe.scans` supply the
lattice Hamiltonians and parameter sweeps.
"""

from .errors import DegeneracyError, EPEError, NumericalError, RegionError, ValidationError
from .gaussian import (
    CovarianceMatrix,
    Region,
    SingleParticleHamiltonian,
    as_region,
    binary_entropy,
    build_thermal_covariance,
    cross_block,
    ground_state_covariance,
    restrict,
    von_neumann_entropy,
)
from .epe import (
    DEFAULT_TAU,
    ChannelSet,
    channel_decomposition,
    channel_weights,
    epe,
    epe_by_regions,
    epe_channel_sum,
    epe_trace,
)
from .purify import PurifiedState, build_purification, oracle_weights, partner_modes, rotate_ancilla, verify_purity_blocks
from .models import (
    LatticeSpec,
    chain_1d,
    infinite_chain_covariance,
    interval_region,
    pi_flux,
    pi_flux_sectors,
    ssh_chain,
    strip_region,
)
from .analysis import (
    FitResult,
    ScanRecord,
    area_law_coefficient,
    collapse_dataset,
    fit_line,
    l_dirac,
    l_eff,
    mutual_information,
)

__version__ = "0.1.0"
