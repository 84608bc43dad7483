"""Chain interferometer: exact propagation, leading-order QFI and dose, and
the optimal beamsplitter prescription.

Each stage applies a weak beamsplitter, then the sample and the programmed
reference phase, then round-trip loss (except after the last stage).
Preparation loss is applied to the input and detection loss to the output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .exceptions import DegenerateScheduleError, DomainError
from .model import (
    PERTURBATIVE_TAU_MAX,
    LossBudget,
    PhaseConfig,
    ProbeState,
    TauSchedule,
    beamsplitter_op,
    reference_phase_op,
    sample_op,
    uniform_loss_op,
)
from .qfi import QfiResult, fd_derivative, qfi_conditional
from .reports import EfficiencyReport, Family, SchemeSpec


@dataclass(frozen=True)
class CiRun:
    exit_state: ProbeState
    dose: float
    per_pass_dose: tuple


def _stage_ops(schedule, budget, phases):
    phase = reference_phase_op(phases.gamma) @ sample_op(budget.eta, phases.theta)
    rt = uniform_loss_op(budget.eta_rt)
    return [beamsplitter_op(t) for t in schedule.taus], phase, rt


def ci_exact_propagate(schedule: TauSchedule, budget: LossBudget,
                       phases: PhaseConfig = PhaseConfig()) -> CiRun:
    """Propagate one particle through every stage, keeping all orders in tau."""
    if schedule.m < 1:
        raise DomainError("m must be >= 1")
    splitters, phase, rt = _stage_ops(schedule, budget, phases)
    v = math.sqrt(budget.eta_p) * np.array([1.0 + 0.0j, 0.0j])
    per_pass = []
    last = schedule.m - 1
    for k, b in enumerate(splitters):
        v = b @ v
        per_pass.append(abs(v[1]) ** 2)
        v = phase @ v
        if k < last:
            v = rt @ v
    v = uniform_loss_op(budget.eta_d) @ v
    return CiRun(ProbeState.from_vector(v), math.fsum(per_pass), tuple(per_pass))


def ci_exit_derivative(schedule: TauSchedule, budget: LossBudget,
                       phases: PhaseConfig = PhaseConfig()) -> np.ndarray:
    """d(exit state)/d(theta) by forward-mode propagation of the tangent.

    Independent of the finite-difference route; used to cross-check it.
    """
    splitters, phase, rt = _stage_ops(schedule, budget, phases)
    dphase = np.diag([0.0j, 1j * phase[1, 1]])
    v = math.sqrt(budget.eta_p) * np.array([1.0 + 0.0j, 0.0j])
    dv = np.zeros(2, dtype=complex)
    last = schedule.m - 1
    for k, b in enumerate(splitters):
        v, dv = b @ v, b @ dv
        v, dv = phase @ v, phase @ dv + dphase @ v
        if k < last:
            v, dv = rt @ v, rt @ dv
    return math.sqrt(budget.eta_d) * dv


def ci_exact_qfi(schedule: TauSchedule, budget: LossBudget,
                 phases: PhaseConfig = PhaseConfig(), method: str = "fd") -> QfiResult:
    """Loss-conditioned QFI of the exact exit state at ``phases``."""
    run = ci_exact_propagate(schedule, budget, phases)
    if method == "fd":
        def propagate(theta):
            return ci_exact_propagate(schedule, budget, PhaseConfig(theta, phases.gamma)).exit_state
        deriv = fd_derivative(propagate, phases.theta)
    elif method == "tangent":
        deriv = ci_exit_derivative(schedule, budget, phases)
    else:
        raise DomainError(f"method must be 'fd' or 'tangent', got {method!r}")
    return qfi_conditional(run.exit_state, deriv)


def ci_exact_xi(schedule: TauSchedule, budget: LossBudget,
                phases: PhaseConfig = PhaseConfig(), method: str = "fd") -> float:
    run = ci_exact_propagate(schedule, budget, phases)
    if run.dose <= 0.0:
        raise DegenerateScheduleError("schedule delivers zero dose (all tau = 0)")
    return ci_exact_qfi(schedule, budget, phases, method).j / run.dose


def _j_amplitude(taus, eta):
    m = len(taus)
    passes = m - np.arange(m, dtype=float)
    return float(np.dot(passes * eta ** (passes / 2.0), taus))


def _sample_amplitudes(taus, eta):
    # s_k = sum_{k' <= k} eta^((k-k')/2) tau_k'  ==  s_k = tau_k + sqrt(eta) s_{k-1}
    return lfilter([1.0], [1.0, -math.sqrt(eta)], np.asarray(taus, dtype=float))


def ci_perturbative_j(schedule: TauSchedule, budget: LossBudget) -> float:
    """Leading-order QFI at zero detuning."""
    b = budget
    amp = _j_amplitude(schedule.array, b.eta)
    return 4.0 * b.eta_p * b.eta_rt ** (schedule.m - 1) * b.eta_d * amp * amp


def ci_perturbative_d(schedule: TauSchedule, budget: LossBudget) -> float:
    """Leading-order dose: incident intensity summed over the sample passes."""
    s = _sample_amplitudes(schedule.array, budget.eta)
    weights = budget.eta_rt ** np.arange(schedule.m, dtype=float)
    return budget.eta_p * float(np.dot(weights, s * s))


def ci_optimal_taus(m: int, budget: LossBudget, epsilon: float = 1e-3) -> TauSchedule:
    """Beamsplitter prescription that maximizes the leading-order efficiency.

    Without round-trip loss this is tau_0 = eps eta^(m/2) and
    tau_k = eps (1 - eta) eta^((m-k)/2).
    """
    if int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m!r}")
    if not (0.0 < epsilon <= PERTURBATIVE_TAU_MAX):
        raise DomainError(f"epsilon must lie in (0, {PERTURBATIVE_TAU_MAX}], got {epsilon!r}")
    m = int(m)
    q = budget.eta_rt * math.sqrt(budget.eta)
    powers = q ** (m - np.arange(m, dtype=float))
    taus = epsilon * (1.0 - budget.eta_rt * budget.eta) * powers
    taus[0] = epsilon * q ** m
    return TauSchedule(tuple(taus), epsilon)


def ci_xi(schedule: TauSchedule, budget: LossBudget, family: Family = Family.CIO) -> EfficiencyReport:
    d = ci_perturbative_d(schedule, budget)
    if d <= 0.0:
        raise DegenerateScheduleError("schedule delivers zero dose (all tau = 0)")
    j = ci_perturbative_j(schedule, budget)
    eps2 = schedule.epsilon ** 2
    spec = SchemeSpec(family, budget, m=schedule.m)
    return EfficiencyReport.from_j_d(j / eps2, d / eps2, budget.eta, spec)


def ci_detuning_scan(schedule: TauSchedule, budget: LossBudget, detunings) -> list:
    """Exact efficiency at each detuning theta - gamma (gamma held at 0)."""
    if ci_perturbative_d(schedule, budget) <= 0.0:
        raise DegenerateScheduleError("schedule delivers zero dose (all tau = 0)")
    return [(float(delta), ci_exact_xi(schedule, budget, PhaseConfig(float(delta), 0.0)))
            for delta in detunings]


def ci_xi_limit(budget: LossBudget) -> float:
    """Efficiency of the optimal schedule as m goes to infinity."""
    return 4.0 * budget.eta * budget.eta_d / (1.0 - budget.eta * budget.eta_rt)


def ci_j_d_limits(eta: float) -> tuple:
    """Lossless large-m limits of J / eps^2 and d / eps^2 under the prescription."""
    return 4.0 * eta * eta / (1.0 - eta) ** 2, eta / (1.0 - eta)


def ci_limit_sequence(ms, budget: LossBudget) -> np.ndarray:
    """Optimal-schedule efficiencies for each m in ``ms``, to watch convergence."""
    return np.array([ci_xi(ci_optimal_taus(int(m), budget), budget).xi for m in ms])


def ci_xi_highprec(schedule: TauSchedule, budget: LossBudget, detuning: float = 0.0,
                   dps: int = 60) -> tuple:
    """(exact, leading-order) efficiencies evaluated in ``dps``-digit arithmetic.

    The exact value propagates the state and its theta-tangent; for long
    chains on dark samples the exact/leading-order gap falls far below double
    precision and can only be resolved this way.
    """
    import mpmath

    with mpmath.workdps(dps):
        mpf = mpmath.mpf
        taus = [mpf(t) for t in schedule.taus]
        eta, eta_rt = mpf(budget.eta), mpf(budget.eta_rt)
        eta_p, eta_d = mpf(budget.eta_p), mpf(budget.eta_d)
        samp = mpmath.sqrt(eta) * mpmath.expj(mpf(detuning))
        dsamp = 1j * samp
        a, b = mpmath.sqrt(eta_p), mpmath.mpc(0)
        da, db = mpmath.mpc(0), mpmath.mpc(0)
        dose = mpf(0)
        m = len(taus)
        for k, t in enumerate(taus):
            c = mpmath.sqrt(1 - t * t)
            a, b = c * a + t * b, -t * a + c * b
            da, db = c * da + t * db, -t * da + c * db
            dose += abs(b) ** 2
            b, db = samp * b, samp * db + dsamp * b
            if k < m - 1:
                r = mpmath.sqrt(eta_rt)
                a, b, da, db = r * a, r * b, r * da, r * db
        r = mpmath.sqrt(eta_d)
        a, b, da, db = r * a, r * b, r * da, r * db
        p = abs(a) ** 2 + abs(b) ** 2
        half_dp = mpmath.re(mpmath.conj(a) * da + mpmath.conj(b) * db)
        sp = mpmath.sqrt(p)
        pa, pb = a / sp, b / sp
        qa, qb = da / sp - a * half_dp / (p * sp), db / sp - b * half_dp / (p * sp)
        overlap = mpmath.conj(qa) * pa + mpmath.conj(qb) * pb
        j_cond = 4 * (abs(qa) ** 2 + abs(qb) ** 2) - 4 * abs(overlap) ** 2
        xi_exact = p * j_cond / dose

        amp = mpmath.fsum((m - k) * eta ** (mpf(m - k) / 2) * t for k, t in enumerate(taus))
        j = 4 * eta_p * eta_rt ** (m - 1) * eta_d * amp ** 2
        s, d = mpf(0), mpf(0)
        for k, t in enumerate(taus):
            s = t + mpmath.sqrt(eta) * s
            d += eta_rt ** k * s * s
        xi_pert = j / (eta_p * d)
        return xi_exact, xi_pert
