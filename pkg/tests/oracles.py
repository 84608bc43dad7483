"""Independent reference computations used by the tests.

Nothing here imports the code under test; every value is computed from the
defining formulas directly (nested loops, symbolic differentiation, grid
scans, bisection).
"""
import cmath
import math

import numpy as np
import sympy as sp


def mzi_exit(alpha2, eta, theta):
    """Unnormalized exit state of a lossy MZI with sample-arm intensity alpha2."""
    a = math.sqrt(alpha2)
    return np.array([math.sqrt(1 - alpha2), a * math.sqrt(eta) * cmath.exp(1j * theta)])


def mzi_exit_derivative(alpha2, eta, theta):
    a = math.sqrt(alpha2)
    return np.array([0.0, 1j * a * math.sqrt(eta) * cmath.exp(1j * theta)])


def mzi_qfi(alpha2, eta):
    """Closed-form lossy MZI QFI p * J_cond."""
    p = 1 - (1 - eta) * alpha2
    j_cond = 4 / p * alpha2 * eta * (1 - alpha2 * eta / p)
    return p * j_cond


def ci_j_loops(taus, eta, eta_p=1.0, eta_rt=1.0, eta_d=1.0):
    m = len(taus)
    amp = 0.0
    for k in range(m):
        amp += (m - k) * eta ** ((m - k) / 2) * taus[k]
    return 4 * eta_p * eta_rt ** (m - 1) * eta_d * amp ** 2


def ci_d_loops(taus, eta, eta_p=1.0, eta_rt=1.0):
    total = 0.0
    for k in range(len(taus)):
        inner = 0.0
        for kp in range(k + 1):
            inner += eta ** ((k - kp) / 2) * taus[kp]
        total += eta_rt ** k * inner ** 2
    return eta_p * total


def ci_xi_loops(taus, eta, eta_p=1.0, eta_rt=1.0, eta_d=1.0):
    return ci_j_loops(taus, eta, eta_p, eta_rt, eta_d) / ci_d_loops(taus, eta, eta_p, eta_rt)


def prescription_loops(m, eta, eta_rt=1.0, eps=1.0):
    q = eta_rt * math.sqrt(eta)
    return [eps * q ** m] + [eps * (1 - eta_rt * eta) * q ** (m - k) for k in range(1, m)]


def mp_xi_loops(m, eta, eta_p=1.0, eta_rt=1.0, eta_d=1.0):
    j = 4 * m * m * eta_p * eta ** m * eta_rt ** (m - 1) * eta_d
    d = eta_p * sum((eta_rt * eta) ** k for k in range(m))
    return j / d


def noon_xi(n, eta, eta_p=1.0, eta_d=1.0):
    return 4 * n * eta_p ** (n - 1) * (eta * eta_d) ** n


def argmax_smallest(values):
    """1-based argmax, ties (within 1e-12 relative) to the smaller index."""
    best = max(values)
    for i, v in enumerate(values):
        if v >= best * (1 - 1e-12):
            return i + 1, v


def truncated_ci_derivative(taus, eta, theta=0.0):
    """d/dtheta of the second-order chain output amplitudes, by sympy.

    Reference: 1 - sum tau^2/2 - sum_{k>k'} tau_k tau_k' eta^((k-k')/2) e^{i(k-k')theta}
    Sample:    - sum_k tau_k eta^((m-k)/2) e^{i(m-k)theta}
    """
    th = sp.Symbol("theta", real=True)
    m = len(taus)
    t = [sp.Float(x, 30) for x in taus]
    e = sp.Float(eta, 30)
    ref = 1 - sum(x ** 2 for x in t) / 2
    for k in range(m):
        for kp in range(k):
            ref -= t[k] * t[kp] * e ** sp.Rational(k - kp, 2) * sp.exp(sp.I * (k - kp) * th)
    samp = -sum(t[k] * e ** sp.Rational(m - k, 2) * sp.exp(sp.I * (m - k) * th) for k in range(m))
    vals = [complex(sp.N(sp.diff(expr, th).subs(th, theta), 20)) for expr in (ref, samp)]
    return np.array(vals)


def grid_scan_direction(m, eta, resolution=1e-3):
    """Best tau direction on the positive orthant of the unit sphere (m = 2 or 3)."""
    if m == 2:
        phi = np.arange(0.0, math.pi / 2 + resolution, resolution)
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    elif m == 3:
        a = np.arange(0.0, math.pi / 2 + resolution, resolution)
        A, B = np.meshgrid(a, a, indexing="ij")
        dirs = np.stack([np.cos(A), np.sin(A) * np.cos(B), np.sin(A) * np.sin(B)], axis=-1).reshape(-1, 3)
    else:
        raise ValueError("grid scan only for m = 2, 3")
    k = np.arange(m)
    a_vec = (m - k) * eta ** ((m - k) / 2)
    L = np.array([[eta ** ((i - j) / 2) if j <= i else 0.0 for j in range(m)] for i in range(m)])
    j = 4 * (dirs @ a_vec) ** 2
    s = dirs @ L.T
    d = np.sum(s * s, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        xi = np.where(d > 0, j / d, 0.0)
    i = int(np.argmax(xi))
    return dirs[i], float(xi[i])


def sqz_xi_eq(n_sq, eta):
    return 4 * eta / (2 * eta * n_sq - 2 * eta * math.sqrt(n_sq * (n_sq + 1)) + 1)


def bisect_n_sq_for_ratio(target, eta, lo=0.0, hi=1e6, iters=200):
    """n_sq with sqz ratio = target, by plain bisection (ratio increases with n_sq)."""
    f = lambda n: sqz_xi_eq(n, eta) * (1 - eta) / (4 * eta) - target
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def db_standard(n_sq):
    r = math.asinh(math.sqrt(n_sq))
    return 10 * math.log10(math.exp(2 * r))
