"""Decoherence of two exchange-coupled spins in an interacting spin-1/2 bath.

The full wavefunction is propagated exactly with a matrix-free Chebyshev
expansion; the coherence of the central pair is then analysed through its
reduced density matrix and decay-law fits.
"""
from .state import (
    PureState,
    SpinLayout,
    basis_state,
    inner_product,
    product_state,
    random_bath_state,
    split_seed,
)
from .model import (
    ConfigurationError,
    ModelSpec,
    apply_hamiltonian,
    build_model,
    build_topology,
    sample_bath_couplings,
    sample_ce_couplings,
    spectral_bound,
    spectral_interval,
)
from .propagator import (
    PropagationError,
    PropagatorPlan,
    evolve,
    evolve_step,
    evolve_trajectory,
    plan_for,
    plan_step,
    trotter_step,
)
from .observables import (
    ReducedDensityMatrix,
    SnapshotObservables,
    energies,
    loschmidt_echo,
    quadratic_entropy,
    reduce_central,
    reference_rdm,
    snapshot,
    to_pointer_basis,
)
from .fits import (
    Envelope,
    FitError,
    FitResult,
    compare_to_two_step,
    two_step_prediction,
    extract_envelope,
    fit_exponential,
    fit_rate_slope,
)
from .config import ConfigError, ScenarioConfig, SweepConfig, load_config
from .runner import read_series, run_scenario, run_sweep, write_series

__version__ = "0.1.0"
