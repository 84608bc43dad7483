"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError
from .model import LossBudget


def check_budget(budget=None, *, eta=None, eta_p=1.0, eta_rt=1.0, eta_d=1.0) -> LossBudget:
    """Return a LossBudget, building one from keyword transmissivities if needed."""
    if isinstance(budget, LossBudget):
        return budget
    if budget is not None:
        try:
            return LossBudget(**dict(budget))
        except TypeError as exc:
            raise DomainError(f"cannot build a loss budget from {budget!r}") from exc
    if eta is None:
        raise DomainError("eta is required")
    return LossBudget(eta, eta_p, eta_rt, eta_d)


def check_eta_grid(eta_grid) -> np.ndarray:
    """1-D, finite, strictly increasing, inside (0, 1)."""
    grid = np.asarray(eta_grid, dtype=float)
    if grid.ndim == 2 and 1 in grid.shape:
        grid = grid.ravel()
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError(f"eta_grid must be a non-empty 1-D sequence, got shape {grid.shape}")
    if not np.all(np.isfinite(grid)):
        raise DomainError("eta_grid must be finite")
    if np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise DomainError("eta_grid values must lie in (0, 1)")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("eta_grid must be strictly increasing")
    return grid


def check_positive_int(name, value, minimum=1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
