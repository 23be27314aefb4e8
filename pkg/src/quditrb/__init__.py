"""Randomized benchmarking of qudit Clifford gates.

Layers, bottom to top: exact Pauli/gate algebra (`algebra`), symplectic
tableaux (`tableau`), group enumeration (`group`), channel calculus
(`channels`), the benchmarking protocol engine (`protocol`), decay fitting
(`fitting`), experiment files (`config`) and the CLI (`cli`).
"""

from .algebra import (
    PauliMatch,
    PauliOperator,
    SymmetricBlock,
    canonical_phase,
    cz_matrix,
    fourier_matrix,
    gate,
    pauli_inverse,
    pauli_membership,
    pauli_power,
    pauli_product,
    pauli_to_dense,
    phase_gate_matrix,
    phase_order,
    root_of_unity,
    symmetric_block,
    t_gate_matrix,
    weyl_operators,
    x_matrix,
    z_matrix,
)
from .channels import (
    KrausChannel,
    Superoperator,
    apply_channel,
    apply_superoperator,
    average_fidelity,
    average_fidelity_from_p,
    channel_superoperator,
    compose_channels,
    depolarizing,
    depolarizing_superoperator,
    frame_potential,
    haar_random_state,
    haar_random_unitary,
    is_depolarizing,
    kraus_from_json_dict,
    kraus_from_superoperator,
    kraus_to_json_dict,
    over_rotation,
    p_from_average_fidelity,
    random_cptp_channel,
    superoperator_to_choi,
    twirl,
    unitary_channel,
)
from .config import ExperimentSpecError, load_experiment
from .fitting import DecayFit, DecayFitError, error_rate_from_p, fit_decay, p_from_error_rate
from .group import (
    CliffordGroupTable,
    clifford_group_order,
    enumerate_group,
    read_group_cache,
    write_group_cache,
)
from .protocol import (
    DecayPrediction,
    RBConfig,
    RBDataset,
    SequenceRecord,
    dataset_to_csv,
    dataset_to_json,
    exact_sequence_fidelity,
    generate_sequence,
    predicted_decay,
    run_rb,
    sequence_rng,
    write_dataset,
)
from .tableau import (
    CliffordTableau,
    compose,
    conjugate_pauli,
    identity_tableau,
    invert,
    random_clifford,
    sample_symplectic,
    tableau_to_dense,
    validate_tableau,
)

__all__ = [name for name in dir() if not name.startswith("_")]
