"""Self-check suites run by ``chainphase validate``.

Each suite returns a SuiteResult; ``mutation`` swaps in a deliberately
broken dose formula so the harness can be seen to catch it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import schemes
from .chain import (
    ci_exact_xi,
    ci_j_d_limits,
    ci_optimal_taus,
    ci_perturbative_d,
    ci_perturbative_j,
    ci_xi_limit,
)
from .model import LossBudget, TauSchedule
from .optimizer import OptimizerConfig, verify_prescription

MUTATIONS = ("extra-tau-in-dose",)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _dose_with_extra_tau(schedule, budget):
    # each pass weighted by an extra factor tau_k inside the amplitude sum
    taus = schedule.array
    total = 0.0
    for k in range(schedule.m):
        inner = sum(budget.eta ** ((k - kp) / 2) * taus[kp] * taus[k] for kp in range(k + 1))
        total += budget.eta_rt ** k * inner * inner
    return budget.eta_p * total


def _dose_fn(mutation):
    if mutation is None:
        return ci_perturbative_d
    if mutation == "extra-tau-in-dose":
        return _dose_with_extra_tau
    raise ValueError(f"unknown mutation {mutation!r}; choose from {MUTATIONS}")


def perturbative_convergence(quick=False, mutation=None) -> SuiteResult:
    dose = _dose_fn(mutation)
    worst_gap, worst_rate = 0.0, None
    ok = True
    for m in (2, 4, 8):
        for eta in (0.5, 0.9):
            b = LossBudget(eta)
            gaps = []
            for eps in ((1e-3,) if quick else (1e-3, 5e-4)):
                s = ci_optimal_taus(m, b, eps)
                xi_pert = ci_perturbative_j(s, b) / dose(s, b)
                gaps.append(abs(ci_exact_xi(s, b) - xi_pert) / xi_pert)
            worst_gap = max(worst_gap, gaps[0])
            ok &= gaps[0] <= 1e-4
            if not quick:
                rate = gaps[0] / gaps[1] if gaps[1] > 0 else np.inf
                ok &= 3.5 <= rate <= 4.5
                if worst_rate is None or abs(rate - 4) > abs(worst_rate - 4):
                    worst_rate = rate
    detail = f"max rel gap {worst_gap:.3g}"
    if worst_rate is not None:
        detail += f", worst halving ratio {worst_rate:.4g}"
    return SuiteResult("perturbative convergence", bool(ok), detail)


def mp_equivalence(quick=False, mutation=None) -> SuiteResult:
    dose = _dose_fn(mutation)
    budgets = [LossBudget(e) for e in (0.5, 0.9)]
    budgets += [LossBudget(e, 0.9, 0.95, 0.9) for e in (0.5, 0.9)]
    worst = 0.0
    for b in budgets:
        for m in range(1, 33):
            s = TauSchedule((1e-3,) + (0.0,) * (m - 1), 1e-3)
            xi_ci = ci_perturbative_j(s, b) / dose(s, b)
            ref = schemes.xi_mp(m, b).xi
            worst = max(worst, abs(xi_ci - ref) / ref)
    return SuiteResult("MP equivalence", worst <= 1e-10, f"max rel error {worst:.3g}")


def limit_recovery(quick=False, mutation=None) -> SuiteResult:
    dose = _dose_fn(mutation)
    b = LossBudget(0.9)
    s = ci_optimal_taus(500, b, 1e-3)
    j_lim, d_lim = ci_j_d_limits(0.9)
    j = ci_perturbative_j(s, b) / s.epsilon ** 2
    d = dose(s, b) / s.epsilon ** 2
    lossy = LossBudget(0.9, 0.9, 0.95, 0.9)
    s2 = ci_optimal_taus(512, lossy)
    xi_lossy = ci_perturbative_j(s2, lossy) / dose(s2, lossy)
    ok = abs(j - j_lim) <= 0.5 and abs(d - d_lim) <= 0.01
    ok &= abs(xi_lossy - ci_xi_limit(lossy)) <= 0.05
    return SuiteResult("limit recovery", bool(ok),
                       f"J/eps^2={j:.6g}, d/eps^2={d:.6g}, lossy xi(512)={xi_lossy:.6g}")


def prescription_optimality(quick=False, mutation=None) -> SuiteResult:
    ms = (1, 2, 3) if quick else (1, 2, 3, 4, 8, 16)
    config = OptimizerConfig(restarts=1) if quick else None
    worst = 0.0
    ok = True
    flagged = []
    for eta in (0.5, 0.9):
        rep = verify_prescription(ms, LossBudget(eta), config)
        worst = max(worst, rep.max_shortfall)
        ok &= rep.passed
        flagged += [(eta, r.m) for r in rep.rows if not r.converged]
    detail = f"max shortfall {worst:.3g}"
    if flagged:
        detail += f", not converged: {flagged}"
    return SuiteResult("prescription optimality", bool(ok), detail)


SUITES = (perturbative_convergence, mp_equivalence, limit_recovery, prescription_optimality)


def run_all(quick=False, mutation=None) -> list:
    _dose_fn(mutation)
    return [suite(quick=quick, mutation=mutation) for suite in SUITES]
