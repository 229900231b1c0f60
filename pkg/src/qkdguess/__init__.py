"""Guessing-probability and entropic key-rate analysis for qubit QKD
over Bell-diagonal states."""

from .analysis import (
    CriticalReport,
    ScatterPoint,
    critical_eps_entropy,
    critical_eps_guessing,
    critical_rate_scan,
    critical_report,
    format_scatter_csv,
    format_table_csv,
    haar_unitary,
    random_spectrum,
    scatter,
    symmetric_pe_star_curve,
)
from .errors import (
    DimensionMismatch,
    DomainError,
    InfeasibleRates,
    NoCrossing,
    QkdGuessError,
    SingularDirection,
    SingularDirections,
)
from .guessing import (
    EveBasis,
    GuessResult,
    OptimizerOptions,
    Purification,
    analytic_optimal_v_bb84,
    analytic_optimal_v_sixstate,
    build_purification,
    closed_form_pe_bb84,
    closed_form_pe_sixstate,
    guessing_probability,
    maximize_guessing,
)
from .keyrate import (
    EntropyReport,
    binary_entropy,
    conditional_eigenvalues,
    holevo,
    mutual_information,
    secure_key_rate,
    shannon_entropy,
    signed_rate,
)
from .protocol import (
    ProtocolClass,
    ProtocolConfig,
    SpectrumFamily,
    derived_error_rate_protocol3,
    four_state_xy,
    is_standard_bb84,
    is_standard_sixstate,
    resolve_rates,
    solve_protocol1,
    solve_protocol2,
    standard_bb84,
    standard_sixstate,
)
from .states import (
    BellSpectrum,
    Direction,
    alice_ket,
    bell_basis,
    bell_state,
    bob_guess_probability,
    bob_ket,
    correlation,
    delta,
    density_matrix,
    error_rate,
)

__version__ = "0.1.0"
