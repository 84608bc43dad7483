"""Dose efficiency of single-particle, entangled and squeezed phase estimation,
with an exact and leading-order model of the chain interferometer."""

from .chain import (
    CiRun,
    ci_detuning_scan,
    ci_exact_propagate,
    ci_exact_qfi,
    ci_exact_xi,
    ci_optimal_taus,
    ci_perturbative_d,
    ci_perturbative_j,
    ci_xi,
    ci_xi_limit,
)
from .exceptions import (
    DegenerateScheduleError,
    DegenerateStateError,
    DivergentLimitError,
    DomainError,
    UnattainableError,
)
from .model import (
    LossBudget,
    PhaseConfig,
    ProbeState,
    TauSchedule,
    beamsplitter_op,
    reference_phase_op,
    sample_op,
    uniform_loss_op,
)
from .optimizer import OptimizationResult, OptimizerConfig, ScheduleOptimizer, optimize_taus, verify_prescription
from .qfi import QfiResult, fd_derivative, qfi_conditional, qfi_pure
from .reports import EfficiencyReport, Family, SchemeSpec, xi_ql
from .schemes import (
    equivalent_db_for_ratio,
    evaluate,
    n_sq_from_db,
    optimal_int_param,
    squeezing_db,
    xi_cic,
    xi_cio,
    xi_mp,
    xi_mpsqz,
    xi_noon,
    xi_sp,
    xi_sqz,
)
from .sweep import SchemeEfficiency, SweepConfig, SweepScheme, make_figure, run_sweep

__version__ = "0.1.0"
