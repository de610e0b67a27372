"""Uplink channel estimation for STAR-RIS assisted two-user systems.

Training designs (time switching and energy splitting), least-squares
estimators with their closed-form errors, and a reproducible Monte Carlo
harness for NMSE experiments.
"""

from .channel import (
    ChannelRealization,
    SystemConfig,
    composite_vector,
    generate_realization,
    mean_composite_power,
    path_loss,
    rician_vector,
)
from .estimation import (
    EstimationReport,
    es_mse_lower_bound,
    ls_estimate,
    onoff_estimate,
    simulate_reception,
    theoretical_mse,
    theoretical_mse_split,
    two_phase_estimate,
)
from .matrixkit import (
    DegenerateInputError,
    SingularMatrixError,
    UnsupportedOrderError,
    dft_matrix,
    gram_orthogonality_defect,
    hadamard_matrix,
    numerical_rank,
    pseudo_inverse,
    trace_inverse_gram,
)
from .simulator import (
    ALL_SCHEMES,
    SCHEMES,
    SweepResult,
    SweepRow,
    run_trials,
    scheme_theory_mse,
    sweep_beta,
    sweep_power,
    sweep_subsurfaces,
    trial_generator,
)
from .training import (
    EsDesign,
    InfeasibleDesignError,
    OnOffSchedule,
    TsDesign,
    TwoPhaseDesign,
    assemble_observation_matrix,
    cascaded_observation_columns,
    es_coupled_design,
    es_ideal_design,
    export_design_csv,
    onoff_schedule,
    read_complex_matrix_csv,
    ts_pattern,
    two_phase_design,
    verify_coupled_constraint,
    write_complex_matrix_csv,
)

__version__ = "0.1.0"
