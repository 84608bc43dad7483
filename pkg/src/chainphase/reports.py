"""Scheme descriptions, efficiency reports and the quantum limit."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .exceptions import DivergentLimitError, DomainError
from .model import LossBudget


class Family(str, enum.Enum):
    SP = "sp"
    NOON = "noon"
    MP = "mp"
    SQZ = "sqz"
    MPSQZ = "mpsqz"
    CIC = "cic"
    CIO = "cio"

    @classmethod
    def parse(cls, value) -> Family:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(f.value for f in cls)
            raise DomainError(f"family must be one of {{{names}}}, got {value!r}") from None


# integer parameter scanned by optimal_int_param, per family
INT_PARAM = {Family.NOON: "n", Family.MP: "m", Family.MPSQZ: "m", Family.CIC: "m", Family.CIO: "m"}


@dataclass(frozen=True)
class SchemeSpec:
    family: Family
    budget: LossBudget
    n: Optional[int] = None
    m: Optional[int] = None
    n_sq: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        for name in ("n", "m"):
            v = getattr(self, name)
            if v is not None:
                if int(v) != v or v < 1:
                    raise DomainError(f"{name} must be an integer >= 1, got {v!r}")
                object.__setattr__(self, name, int(v))
        if self.n_sq is not None:
            if not (float(self.n_sq) >= 0.0):
                raise DomainError(f"n_sq must be >= 0, got {self.n_sq!r}")
            object.__setattr__(self, "n_sq", float(self.n_sq))

    def missing(self) -> list:
        """Names of required parameters that are absent for this family."""
        need = {
            Family.SP: (),
            Family.NOON: ("n",),
            Family.MP: ("m",),
            Family.SQZ: ("n_sq",),
            Family.MPSQZ: ("m",),
            Family.CIC: ("m",),
            Family.CIO: ("m",),
        }[self.family]
        return [name for name in need if getattr(self, name) is None]

    def with_param(self, **changes) -> SchemeSpec:
        values = dict(family=self.family, budget=self.budget, n=self.n, m=self.m, n_sq=self.n_sq)
        values.update(changes)
        return SchemeSpec(**values)


@dataclass(frozen=True)
class EfficiencyReport:
    """QFI and dose per unit probe intensity and their ratio.

    ``xi_ratio`` is always taken against the lossless quantum limit of the
    sample transmissivity, whatever the other losses are.
    """

    j_per_unit: float
    dose_per_unit: float
    xi: float
    xi_ratio: float
    spec_echo: Optional[SchemeSpec] = None

    @classmethod
    def from_j_d(cls, j, d, eta, spec=None) -> EfficiencyReport:
        j, d = float(j), float(d)
        xi = j / d if d > 0 else 0.0
        return cls(j, d, xi, quantum_limit_ratio(xi, eta), spec)

    def as_dict(self) -> dict:
        return {"J": self.j_per_unit, "d": self.dose_per_unit, "xi": self.xi, "xi_ratio": self.xi_ratio}


def xi_ql(eta: float) -> float:
    """Quantum limit 4 eta / (1 - eta) on the dose efficiency."""
    eta = float(eta)
    if eta == 1.0:
        raise DivergentLimitError("the quantum limit diverges for a transparent sample (eta = 1)")
    if not (0.0 <= eta < 1.0):
        raise DomainError(f"eta must lie in [0, 1), got {eta!r}")
    return 4.0 * eta / (1.0 - eta)


def quantum_limit_ratio(xi: float, eta: float) -> float:
    """xi / xi_QL(eta), written so that eta = 1 gives 0 and eta = 0 gives 0."""
    eta = float(eta)
    if eta <= 0.0 or eta >= 1.0 or math.isinf(xi):
        return 0.0
    return xi * (1.0 - eta) / (4.0 * eta)
