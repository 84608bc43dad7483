"""Closed-form dose efficiencies of the measurement families.

All probes are taken in the weak-sample-intensity limit, so J and d are
reported per unit sample-arm intensity and xi = J / d does not depend on it.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .chain import ci_optimal_taus, ci_xi
from .exceptions import DivergentLimitError, DomainError, UnattainableError
from .model import LossBudget, TauSchedule
from .reports import INT_PARAM, EfficiencyReport, Family, SchemeSpec, quantum_limit_ratio, xi_ql

__all__ = [
    "xi_ql", "xi_sp", "xi_noon", "xi_mp", "xi_sqz", "xi_mpsqz", "xi_cic", "xi_cio",
    "evaluate", "scan_xi", "optimal_int_param", "squeezing_db", "n_sq_from_db",
    "equivalent_db_for_ratio", "BoundaryOptimumWarning", "DEFAULT_SEARCH_MAX",
]

DEFAULT_SEARCH_MAX = 4096

# relative gap below which two scanned efficiencies count as tied
TIE_RTOL = 1e-12


class BoundaryOptimumWarning(UserWarning):
    """The scanned optimum sits on the upper end of the search range."""


def _geometric_sum(x, m):
    """sum_{k<m} x^k, elementwise, exact at x = 1."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (1.0 - x ** m) / (1.0 - x)
    return np.where(x == 1.0, m, out)


def _report(j, d, budget, spec):
    return EfficiencyReport.from_j_d(j, d, budget.eta, spec)


def _check_int(name, v):
    if int(v) != v or v < 1:
        raise DomainError(f"{name} must be an integer >= 1, got {v!r}")
    return int(v)


def xi_sp(budget: LossBudget) -> EfficiencyReport:
    b = budget
    return _report(4.0 * b.eta_p * b.eta * b.eta_d, b.eta_p, b, SchemeSpec(Family.SP, b))


def xi_noon(n: int, budget: LossBudget) -> EfficiencyReport:
    """Unbalanced NOON state; any absorption, anywhere, destroys the signal."""
    n = _check_int("n", n)
    b = budget
    j = 4.0 * n * n * (b.eta_p * b.eta * b.eta_d) ** n
    return _report(j, b.eta_p * n, b, SchemeSpec(Family.NOON, b, n=n))


def xi_mp(m: int, budget: LossBudget) -> EfficiencyReport:
    m = _check_int("m", m)
    b = budget
    j = 4.0 * m * m * b.eta_p * b.eta ** m * b.eta_rt ** (m - 1) * b.eta_d
    d = b.eta_p * float(_geometric_sum(b.eta_rt * b.eta, m))
    return _report(j, d, b, SchemeSpec(Family.MP, b, m=m))


def _sqz_denominator(n_sq, eta_tot):
    if math.isinf(n_sq):
        return 1.0 - eta_tot
    # n - sqrt(n(n+1)) rewritten to avoid cancellation at large n
    gap = -n_sq / (n_sq + math.sqrt(n_sq * (n_sq + 1.0))) if n_sq > 0 else 0.0
    return 2.0 * eta_tot * gap + 1.0


def xi_sqz(n_sq: float, budget: LossBudget) -> EfficiencyReport:
    """Squeezed-state interferometer with a strong displacement.

    With losses outside the sample, the total transmissivity replaces the
    sample transmissivity in the noise denominator; only the infinite-n_sq
    value of that interpolation is an established bound.
    """
    n_sq = float(n_sq)
    if not n_sq >= 0.0:
        raise DomainError(f"n_sq must be >= 0, got {n_sq!r}")
    b = budget
    eta_tot = b.eta_p * b.eta * b.eta_d
    denom = _sqz_denominator(n_sq, eta_tot)
    if denom <= 0.0:
        raise DivergentLimitError("squeezed-state efficiency diverges at total transmissivity 1")
    j = 4.0 * b.eta_p * b.eta * b.eta_d / denom
    return _report(j, b.eta_p, b, SchemeSpec(Family.SQZ, b, n_sq=n_sq))


def xi_mpsqz(m: int, budget: LossBudget, n_sq_limit: bool = True) -> EfficiencyReport:
    """Multi-pass squeezed-state bound (infinite squeezing only)."""
    if not n_sq_limit:
        raise DomainError("multi-pass squeezing is only available in the n_sq -> infinity bound")
    m = _check_int("m", m)
    b = budget
    eta_tot = b.eta_p * b.eta ** m * b.eta_rt ** (m - 1) * b.eta_d
    if eta_tot >= 1.0:
        raise DivergentLimitError("multi-pass squeezed efficiency diverges at total transmissivity 1")
    j = 4.0 * m * m * eta_tot / (1.0 - eta_tot)
    d = b.eta_p * float(_geometric_sum(b.eta_rt * b.eta, m))
    return _report(j, d, b, SchemeSpec(Family.MPSQZ, b, m=m, n_sq=math.inf))


def xi_cic(m: int, budget: LossBudget) -> EfficiencyReport:
    """Chain interferometer with identical weak beamsplitters."""
    m = _check_int("m", m)
    return ci_xi(TauSchedule.constant(m), budget, Family.CIC)


def xi_cio(m: int, budget: LossBudget) -> EfficiencyReport:
    """Chain interferometer with the optimal beamsplitter prescription."""
    m = _check_int("m", m)
    return ci_xi(ci_optimal_taus(m, budget), budget, Family.CIO)


def evaluate(spec: SchemeSpec) -> EfficiencyReport:
    missing = spec.missing()
    if missing:
        raise DomainError(f"family {spec.family.value} requires {', '.join(missing)}")
    f, b = spec.family, spec.budget
    if f is Family.SP:
        return xi_sp(b)
    if f is Family.NOON:
        return xi_noon(spec.n, b)
    if f is Family.MP:
        return xi_mp(spec.m, b)
    if f is Family.SQZ:
        return xi_sqz(spec.n_sq, b)
    if f is Family.MPSQZ:
        return xi_mpsqz(spec.m, b)
    if f is Family.CIC:
        return xi_cic(spec.m, b)
    return xi_cio(spec.m, b)


def _cic_scan(budget, m_max):
    # Constant tau: the sample amplitude before pass k is sum_{j<=k} q^j with
    # q = sqrt(eta), and the QFI amplitude for m stages is sum_{j=1}^m j q^j.
    b = budget
    q = math.sqrt(b.eta)
    j_idx = np.arange(1, m_max + 1, dtype=float)
    amp = np.cumsum(j_idx * q ** j_idx)
    s = np.cumsum(q ** np.arange(m_max, dtype=float))
    d = b.eta_p * np.cumsum(b.eta_rt ** np.arange(m_max, dtype=float) * s * s)
    j = 4.0 * b.eta_p * b.eta_rt ** (j_idx - 1.0) * b.eta_d * amp * amp
    return j / d


def scan_xi(family, budget: LossBudget, search_max: int) -> np.ndarray:
    """xi for the integer parameter 1..search_max of ``family``, vectorized."""
    family = Family.parse(family)
    b = budget
    k = np.arange(1, search_max + 1, dtype=float)
    if family is Family.NOON:
        return 4.0 * k * b.eta_p ** (k - 1.0) * (b.eta * b.eta_d) ** k
    if family is Family.MP:
        d = _geometric_sum(b.eta_rt * b.eta, k)
        return 4.0 * k * k * b.eta ** k * b.eta_rt ** (k - 1.0) * b.eta_d / d
    if family is Family.MPSQZ:
        eta_tot = b.eta_p * b.eta ** k * b.eta_rt ** (k - 1.0) * b.eta_d
        if np.any(eta_tot >= 1.0):
            raise DivergentLimitError("multi-pass squeezed efficiency diverges at total transmissivity 1")
        d = b.eta_p * _geometric_sum(b.eta_rt * b.eta, k)
        return 4.0 * k * k * eta_tot / (1.0 - eta_tot) / d
    if family is Family.CIC:
        return _cic_scan(b, search_max)
    if family is Family.CIO:
        return np.array([xi_cio(int(m), b).xi for m in k])
    raise DomainError(f"family {family.value} has no integer parameter to scan")


def optimal_int_param(spec: SchemeSpec, search_max: int = DEFAULT_SEARCH_MAX):
    """Exhaustive scan of the family's integer parameter over 1..search_max.

    Values within TIE_RTOL of the maximum count as tied and the smallest
    parameter wins. Returns (parameter, report).
    """
    if int(search_max) != search_max or search_max < 1:
        raise DomainError(f"search_max must be an integer >= 1, got {search_max!r}")
    family = Family.parse(spec.family)
    if family not in INT_PARAM:
        raise DomainError(f"family {family.value} has no integer parameter to scan")
    values = scan_xi(family, spec.budget, int(search_max))
    best = values.max()
    idx = int(np.flatnonzero(values >= best * (1.0 - TIE_RTOL))[0])
    param = idx + 1
    if param == search_max:
        warnings.warn(
            f"optimum for {family.value} is on the search boundary ({search_max}); increase search_max",
            BoundaryOptimumWarning,
            stacklevel=2,
        )
    report = evaluate(spec.with_param(**{INT_PARAM[family]: param}))
    return param, report


def squeezing_db(n_sq: float) -> float:
    """Squeezing in dB, 10 log10(e^{2r}) with n_sq = sinh^2 r."""
    n_sq = float(n_sq)
    if not n_sq >= 0.0:
        raise DomainError(f"n_sq must be >= 0, got {n_sq!r}")
    r = math.asinh(math.sqrt(n_sq))
    return 20.0 * r / math.log(10.0)


def n_sq_from_db(db: float) -> float:
    db = float(db)
    if not db >= 0.0:
        raise DomainError(f"db must be >= 0, got {db!r}")
    r = db * math.log(10.0) / 20.0
    return math.sinh(r) ** 2


def equivalent_db_for_ratio(target_ratio: float, eta: float) -> float:
    """Squeezing a lossless squeezed-state probe needs to reach ``target_ratio``.

    With n_sq = sinh^2 r the efficiency is 4 eta / (1 - eta + eta e^{-2r}),
    which inverts in closed form. Targets at or below the coherent-state
    ratio 1 - eta need no squeezing.
    """
    target_ratio, eta = float(target_ratio), float(eta)
    if not (0.0 < eta < 1.0):
        raise DomainError(f"eta must lie in (0, 1), got {eta!r}")
    if target_ratio >= 1.0:
        raise UnattainableError(
            f"target_ratio {target_ratio!r} >= 1 is only reached with infinite squeezing"
        )
    if not target_ratio > 0.0:
        raise DomainError(f"target_ratio must be > 0, got {target_ratio!r}")
    baseline = 1.0 - eta
    if target_ratio <= baseline:
        if target_ratio < baseline * (1.0 - 1e-9):
            raise DomainError(
                f"target_ratio {target_ratio!r} is below the unsqueezed ratio {baseline!r}"
            )
        return 0.0
    # e^{-2r} = (1 - eta)(1/target - 1) / eta
    antisq = baseline * (1.0 / target_ratio - 1.0) / eta
    return -10.0 * math.log10(antisq)


def ratio_of(report: EfficiencyReport, eta: float) -> float:
    return quantum_limit_ratio(report.xi, eta)
