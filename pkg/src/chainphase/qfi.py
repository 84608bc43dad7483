"""Quantum Fisher information of pure two-mode states.

When absorbing the particle leaves no information behind, the QFI of the
lossy exit state is p * J_cond, with p the survival probability and J_cond
the QFI of the normalized surviving state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateStateError, DomainError
from .model import ProbeState

FD_STEP = 1e-4

_NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class QfiResult:
    j: float
    p_survive: float
    j_conditional: float


def _as_vector(x):
    if isinstance(x, ProbeState):
        return x.vector
    v = np.asarray(x, dtype=complex)
    if v.shape != (2,):
        raise DomainError(f"expected a 2-vector, got shape {v.shape}")
    return v


def qfi_pure(psi, dpsi) -> float:
    """4<dpsi|dpsi> - 4|<dpsi|psi>|^2 for a normalized state ``psi``."""
    psi = _as_vector(psi)
    dpsi = _as_vector(dpsi)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > _NORMALIZATION_TOL:
        raise DomainError(f"psi must be normalized, got norm^2 = {norm2!r}")
    overlap = np.vdot(dpsi, psi)
    j = 4.0 * float(np.vdot(dpsi, dpsi).real) - 4.0 * abs(overlap) ** 2
    # roundoff can push an exactly-zero QFI slightly negative
    return max(j, 0.0)


def qfi_conditional(exit_state, exit_derivative) -> QfiResult:
    """Loss-conditioned QFI of an unnormalized exit state.

    The normalized derivative follows from the unnormalized one by the
    quotient rule; the derivative of the norm is never differenced directly.
    """
    phi = _as_vector(exit_state)
    dphi = _as_vector(exit_derivative)
    p = float(np.vdot(phi, phi).real)
    if not p > 0.0:
        raise DegenerateStateError("exit state has zero norm")
    if p > 1.0 + 1e-12:
        raise DomainError(f"exit state norm^2 {p!r} exceeds 1")
    root_p = np.sqrt(p)
    dp_half = float(np.vdot(phi, dphi).real)  # d(p)/2
    psi = phi / root_p
    dpsi = dphi / root_p - phi * (dp_half / (p * root_p))
    j_cond = qfi_pure(psi, dpsi)
    return QfiResult(j=p * j_cond, p_survive=p, j_conditional=j_cond)


def fd_derivative(propagator, theta: float, h: float = FD_STEP) -> np.ndarray:
    """d(state)/d(theta) from a five-point central stencil.

    The stencil is the Richardson combination of central differences at
    steps h and 2h, so the truncation error is O(h^4).
    """
    def f(x):
        return _as_vector(propagator(x))

    fm2, fm1 = f(theta - 2 * h), f(theta - h)
    fp1, fp2 = f(theta + h), f(theta + 2 * h)
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
