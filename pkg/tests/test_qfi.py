import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainphase import (
    DegenerateStateError,
    DomainError,
    LossBudget,
    PhaseConfig,
    ci_exact_propagate,
    ci_optimal_taus,
    ci_perturbative_j,
    fd_derivative,
    qfi_conditional,
    qfi_pure,
)
from chainphase.chain import ci_exact_qfi, ci_exit_derivative

from oracles import mzi_exit, mzi_exit_derivative, mzi_qfi, truncated_ci_derivative


def test_qfi_pure_balanced_mzi():
    a = math.sqrt(0.5)
    psi = np.array([math.sqrt(1 - a * a), a])
    dpsi = np.array([0.0, 1j * a])
    assert qfi_pure(psi, dpsi) == pytest.approx(1.0, rel=1e-14)


def test_qfi_pure_global_phase_is_zero():
    psi = np.array([0.6, 0.8j])
    assert qfi_pure(psi, 1j * psi) == pytest.approx(0.0, abs=1e-15)


def test_qfi_pure_weak_arm():
    psi = np.array([math.sqrt(0.99), 0.1])
    assert qfi_pure(psi, np.array([0.0, 0.1j])) == pytest.approx(0.0396, rel=1e-13)


def test_qfi_pure_requires_normalized():
    with pytest.raises(DomainError):
        qfi_pure(np.array([1.0, 0.1]), np.zeros(2))


def test_qfi_conditional_lossy_mzi():
    r = qfi_conditional(mzi_exit(0.5, 0.5, 0.0), mzi_exit_derivative(0.5, 0.5, 0.0))
    assert r.p_survive == pytest.approx(0.75, rel=1e-15)
    assert r.j_conditional == pytest.approx(8 / 9, rel=1e-13)
    assert r.j == pytest.approx(2 / 3, rel=1e-13)


def test_qfi_conditional_lossless_equals_pure():
    psi, dpsi = mzi_exit(0.3, 1.0, 0.2), mzi_exit_derivative(0.3, 1.0, 0.2)
    r = qfi_conditional(psi, dpsi)
    assert r.p_survive == pytest.approx(1.0, rel=1e-15)
    assert r.j == pytest.approx(qfi_pure(psi, dpsi), rel=1e-14)


def test_qfi_conditional_zero_norm():
    with pytest.raises(DegenerateStateError):
        qfi_conditional(np.zeros(2), np.zeros(2))


def test_qfi_conditional_ci_matches_leading_order():
    b = LossBudget(0.9)
    s = ci_optimal_taus(4, b, 1e-3)
    run = ci_exact_propagate(s, b)
    deriv = ci_exit_derivative(s, b)
    r = qfi_conditional(run.exit_state, deriv)
    assert r.j == pytest.approx(ci_perturbative_j(s, b), rel=1e-4)


@pytest.mark.parametrize("alpha2", np.round(np.arange(0.01, 1.0, 0.07), 2))
@pytest.mark.parametrize("eta", np.round(np.arange(0.1, 1.01, 0.1), 1))
def test_mzi_grid_analytic_and_fd(alpha2, eta):
    exact = mzi_qfi(alpha2, eta)
    analytic = qfi_conditional(mzi_exit(alpha2, eta, 0.0), mzi_exit_derivative(alpha2, eta, 0.0))
    assert analytic.j == pytest.approx(exact, rel=1e-8)
    assert analytic.j <= analytic.j_conditional + 1e-15
    assert analytic.j == pytest.approx(analytic.p_survive * analytic.j_conditional, rel=1e-12)
    fd = qfi_conditional(mzi_exit(alpha2, eta, 0.0), fd_derivative(lambda t: mzi_exit(alpha2, eta, t), 0.0))
    assert fd.j == pytest.approx(exact, rel=1e-6)


def test_fd_derivative_analytic():
    d = fd_derivative(lambda t: np.array([1, cmath.exp(1j * t)]) / math.sqrt(2), 0.0)
    np.testing.assert_allclose(d, [0, 1j / math.sqrt(2)], atol=1e-12)


def test_fd_derivative_constant():
    np.testing.assert_array_equal(fd_derivative(lambda t: np.array([1.0, 0.0]), 0.3), [0, 0])


def test_fd_matches_truncated_symbolic_derivative():
    b = LossBudget(0.9)
    s = ci_optimal_taus(2, b, 1e-3)
    fd = fd_derivative(lambda t: ci_exact_propagate(s, b, PhaseConfig(t, 0.0)).exit_state, 0.0)
    np.testing.assert_allclose(fd, truncated_ci_derivative(s.taus, 0.9), rtol=0, atol=1e-8)


@pytest.mark.parametrize("m,eta,delta", [(2, 0.9, 0.0), (5, 0.6, 0.4), (8, 0.95, -1.2)])
def test_fd_agrees_with_tangent_propagation(m, eta, delta):
    b = LossBudget(eta, 0.9, 0.97, 0.8)
    s = ci_optimal_taus(m, b, 1e-2)
    ph = PhaseConfig(delta, 0.0)
    fd = fd_derivative(lambda t: ci_exact_propagate(s, b, PhaseConfig(t, 0.0)).exit_state, delta)
    np.testing.assert_allclose(fd, ci_exit_derivative(s, b, ph), rtol=0, atol=1e-11)
    assert ci_exact_qfi(s, b, ph, "fd").j == pytest.approx(ci_exact_qfi(s, b, ph, "tangent").j, rel=1e-7)


unit = st.floats(-1, 1)


@given(a=unit, b=unit, c=unit, d=unit, e=unit, f=unit, g=unit, h=unit,
       phi=st.floats(-7, 7), shift=st.floats(-5, 5))
def test_qfi_pure_global_phase_invariance(a, b, c, d, e, f, g, h, phi, shift):
    psi = np.array([a + 1j * b, c + 1j * d])
    n = np.linalg.norm(psi)
    if n < 1e-3:
        return
    psi = psi / n
    dpsi = np.array([e + 1j * f, g + 1j * h])
    rot = cmath.exp(1j * phi)
    base = qfi_pure(psi, dpsi)
    moved = qfi_pure(rot * psi, rot * (dpsi + 1j * shift * psi))
    assert moved == pytest.approx(base, rel=1e-9, abs=1e-12)
    assert base >= 0
