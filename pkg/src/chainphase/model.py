"""Two-mode single-particle state, loss budget and the per-stage operators.

Channel 0 is the reference arm and channel 1 the sample arm. Amplitudes are
kept unnormalized so that the squared norm of a propagated state equals the
probability that the particle has survived every loss element so far.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

#: Schedules with every amplitude at or below this are treated as perturbative.
PERTURBATIVE_TAU_MAX = 0.05

_NORM_SLACK = 1e-12


def _check_unit_interval(name, value, *, open_low=False, open_high=False):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    low_bad = value <= 0.0 if open_low else value < 0.0
    high_bad = value >= 1.0 if open_high else value > 1.0
    if low_bad or high_bad:
        lo = "(0" if open_low else "[0"
        hi = "1)" if open_high else "1]"
        raise DomainError(f"{name} must lie in {lo}, {hi}, got {value!r}")
    return value


@dataclass(frozen=True)
class ProbeState:
    """Unnormalized amplitude pair (reference, sample)."""

    ref_amp: complex = 1.0 + 0.0j
    samp_amp: complex = 0.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "ref_amp", complex(self.ref_amp))
        object.__setattr__(self, "samp_amp", complex(self.samp_amp))
        if self.norm2 > 1.0 + _NORM_SLACK:
            raise DomainError(f"state norm^2 {self.norm2!r} exceeds 1")

    @classmethod
    def initial(cls) -> ProbeState:
        return cls(1.0, 0.0)

    @classmethod
    def from_vector(cls, vec) -> ProbeState:
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (2,):
            raise DomainError(f"expected a 2-vector, got shape {vec.shape}")
        return cls(vec[0], vec[1])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.ref_amp, self.samp_amp], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.ref_amp) ** 2 + abs(self.samp_amp) ** 2


@dataclass(frozen=True)
class LossBudget:
    """Transmissivities of the sample (per pass) and of the surrounding optics.

    ``eta`` is the sample transmissivity, ``eta_p`` covers probe preparation,
    ``eta_rt`` each round trip between stages or passes, ``eta_d`` detection.
    """

    eta: float
    eta_p: float = 1.0
    eta_rt: float = 1.0
    eta_d: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eta", _check_unit_interval("eta", self.eta))
        for name in ("eta_p", "eta_rt", "eta_d"):
            object.__setattr__(
                self, name, _check_unit_interval(name, getattr(self, name), open_low=True)
            )

    @property
    def lossless(self) -> bool:
        """True when the only loss is in the sample itself."""
        return self.eta_p == 1.0 and self.eta_rt == 1.0 and self.eta_d == 1.0

    def replace(self, **changes) -> LossBudget:
        values = dict(eta=self.eta, eta_p=self.eta_p, eta_rt=self.eta_rt, eta_d=self.eta_d)
        values.update(changes)
        return LossBudget(**values)


@dataclass(frozen=True)
class TauSchedule:
    """Per-stage beamsplitter amplitudes tau_k = sqrt(T_k) and their scale."""

    taus: tuple = field(default=())
    epsilon: float = 1e-3

    def __post_init__(self):
        taus = tuple(float(t) for t in np.ravel(np.asarray(self.taus, dtype=float)))
        if len(taus) < 1:
            raise DomainError("a schedule needs at least one stage (m >= 1)")
        for k, t in enumerate(taus):
            if not (0.0 <= t < 1.0):
                raise DomainError(f"tau[{k}] must lie in [0, 1), got {t!r}")
        eps = float(self.epsilon)
        if not (eps > 0.0 and math.isfinite(eps)):
            raise DomainError(f"epsilon must be positive, got {eps!r}")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def constant(cls, m: int, epsilon: float = 1e-3) -> TauSchedule:
        if m < 1:
            raise DomainError(f"m must be >= 1, got {m}")
        return cls((epsilon,) * m, epsilon)

    @property
    def m(self) -> int:
        return len(self.taus)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.taus)

    @property
    def perturbative_valid(self) -> bool:
        return max(self.taus) <= PERTURBATIVE_TAU_MAX

    def scaled(self, c: float) -> TauSchedule:
        return TauSchedule(tuple(c * t for t in self.taus), c * self.epsilon)


@dataclass(frozen=True)
class PhaseConfig:
    """Unknown sample phase ``theta`` and programmed reference phase ``gamma``."""

    theta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("theta", "gamma"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def detuning(self) -> float:
        return self.theta - self.gamma


def beamsplitter_op(tau: float) -> np.ndarray:
    """Real orthogonal coupler with cross amplitude ``tau``.

    The lower-left entry carries the minus sign, so light coupled into the
    sample arm picks up a factor -tau.
    """
    tau = float(tau)
    if not (0.0 <= tau < 1.0):
        raise DomainError(f"tau must lie in [0, 1), got {tau!r}")
    c = math.sqrt(1.0 - tau * tau)
    return np.array([[c, tau], [-tau, c]])


def sample_op(eta: float, theta: float) -> np.ndarray:
    eta = _check_unit_interval("eta", eta)
    return np.diag([1.0 + 0.0j, math.sqrt(eta) * np.exp(1j * theta)])


def reference_phase_op(gamma: float) -> np.ndarray:
    if not math.isfinite(gamma):
        raise DomainError(f"gamma must be finite, got {gamma!r}")
    return np.diag([np.exp(1j * gamma), 1.0 + 0.0j])


def uniform_loss_op(eta_x: float) -> np.ndarray:
    """Amplitude damping sqrt(eta_x) applied to both channels."""
    eta_x = _check_unit_interval("eta_x", eta_x)
    return math.sqrt(eta_x) * np.eye(2)
