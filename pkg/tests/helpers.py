"""Shared oracles and generators for the test suite.

Finite-difference derivative oracles use 5-point central stencils at two
steps (1e-3 and 1e-4) combined by Richardson extrapolation, evaluated
through the plain (jet-free) expression evaluator so they are independent
of the jet arithmetic they certify.
"""

import numpy as np

from crcurv import algebra as alg
from crcurv.expressions import eval_value

H1, H2 = 1e-3, 1e-4


def _five_point(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _richardson(d1, d2, ratio, order):
    w = ratio ** order
    return (w * d2 - d1) / (w - 1.0)


def fd_gradient(f, u):
    u = np.asarray(u, dtype=float)
    out = np.zeros(len(u))
    for i in range(len(u)):
        def fi(t, i=i):
            v = u.copy()
            v[i] = t
            return f(v)
        d1 = _five_point(fi, u[i], H1)
        d2 = _five_point(fi, u[i], H2)
        out[i] = _richardson(d1, d2, H1 / H2, 4)
    return out


def _second_diag(f, u, i, h):
    def fi(t):
        v = u.copy()
        v[i] = t
        return f(v)
    x = u[i]
    return (-fi(x - 2 * h) + 16 * fi(x - h) - 30 * fi(x)
            + 16 * fi(x + h) - fi(x + 2 * h)) / (12 * h * h)


def _second_cross(f, u, i, j, h):
    def g(si, sj):
        v = u.copy()
        v[i] += si * h
        v[j] += sj * h
        return f(v)
    return (g(1, 1) - g(1, -1) - g(-1, 1) + g(-1, -1)) / (4 * h * h)


def fd_hessian(f, u):
    u = np.asarray(u, dtype=float)
    m = len(u)
    H = np.zeros((m, m))
    for i in range(m):
        d1 = _second_diag(f, u, i, H1)
        d2 = _second_diag(f, u, i, H2)
        H[i, i] = _richardson(d1, d2, H1 / H2, 4)
        for j in range(i + 1, m):
            c1 = _second_cross(f, u, i, j, H1)
            c2 = _second_cross(f, u, i, j, H2)
            H[i, j] = H[j, i] = _richardson(c1, c2, H1 / H2, 2)
    return H


def expr_fn(expr):
    return lambda u: eval_value(expr, u)


def rel_err(approx, exact):
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    scale = max(1.0, np.abs(exact).max())
    return np.abs(approx - exact).max() / scale


def unit_bianchi(d, rng, terms=3):
    """Random algebraic curvature tensor normalized to max-abs 1."""
    R = alg.random_bianchi_tensor(d, rng, terms=terms)
    return R / np.abs(R).max()


def unit_kahler(d, rng, terms=2):
    R = alg.random_kahler_tensor(d, rng, terms=terms)
    return R / np.abs(R).max()


def psd_bianchi(d, rng, terms=3):
    """Nonnegative-sectional tensor: Gauss terms of PSD symmetric forms."""
    R = np.zeros((d, d, d, d))
    for _ in range(terms):
        B = rng.standard_normal((d, d))
        R += alg.gauss_tensor(B @ B.T)
    return R / np.abs(R).max()


def random_orthogonal(n, rng):
    Q, Rm = np.linalg.qr(rng.standard_normal((n, n)))
    s = np.sign(np.diag(Rm))
    s[s == 0] = 1
    return Q * s
