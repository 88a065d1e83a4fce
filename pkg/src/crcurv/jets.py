"""Second-order forward-mode jets.

A Jet2 carries a value, its gradient and its Hessian with respect to the
``m`` chart parameters.  The Hessian is stored as the packed upper
triangle, so symmetry is exact by construction rather than up to
rounding.  Evaluating an expression tree with Jet2 seeds yields the exact
first and second derivatives (no finite-difference noise enters the
second fundamental form downstream).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError
from . import expressions as ex

__all__ = ["Jet2", "eval_jet2"]


@lru_cache(maxsize=None)
def _triu(m):
    return np.triu_indices(m)


def _sym_outer_packed(a, b):
    # packed upper triangle of outer(a,b) + outer(b,a); exactly symmetric
    M = a[:, None] * b[None, :]
    return (M + M.T)[_triu(len(a))]


def _self_outer_packed(a):
    return (a[:, None] * a[None, :])[_triu(len(a))]


class Jet2:
    """Truncated second-order Taylor data ``(value, gradient, hessian)``."""

    __slots__ = ("value", "gradient", "hess_packed", "m")

    def __init__(self, value, gradient, hess_packed, m=None):
        self.value = float(value)
        self.gradient = np.asarray(gradient, dtype=float)
        self.hess_packed = np.asarray(hess_packed, dtype=float)
        self.m = len(self.gradient) if m is None else m

    @classmethod
    def constant(cls, value, m):
        return cls(value, np.zeros(m), np.zeros(m * (m + 1) // 2), m)

    @classmethod
    def variable(cls, value, index, m):
        g = np.zeros(m)
        g[index] = 1.0
        return cls(value, g, np.zeros(m * (m + 1) // 2), m)

    @property
    def hessian(self):
        """Full symmetric (m, m) Hessian, unpacked from the upper triangle."""
        H = np.zeros((self.m, self.m))
        iu = _triu(self.m)
        H[iu] = self.hess_packed
        H.T[iu] = self.hess_packed
        return H

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(float(other), self.m)

    def __add__(self, other):
        o = self._coerce(other)
        return Jet2(self.value + o.value, self.gradient + o.gradient,
                    self.hess_packed + o.hess_packed, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Jet2(self.value - o.value, self.gradient - o.gradient,
                    self.hess_packed - o.hess_packed, self.m)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hess_packed, self.m)

    def __mul__(self, other):
        o = self._coerce(other)
        return Jet2(
            self.value * o.value,
            self.value * o.gradient + o.value * self.gradient,
            self.value * o.hess_packed + o.value * self.hess_packed
            + _sym_outer_packed(self.gradient, o.gradient),
            self.m,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.value == 0.0:
            raise DomainError("division by zero")
        return self * o._reciprocal()

    def __rtruediv__(self, other):
        if self.value == 0.0:
            raise DomainError("division by zero")
        return self._coerce(other) * self._reciprocal()

    def _reciprocal(self):
        v = self.value
        return self._chain(1.0 / v, -1.0 / v ** 2, 2.0 / v ** 3)

    def _chain(self, f0, f1, f2):
        return Jet2(f0, f1 * self.gradient,
                    f1 * self.hess_packed + f2 * _self_outer_packed(self.gradient),
                    self.m)

    # -- elementary functions -----------------------------------------------

    def powi(self, n):
        if n == 0:
            return Jet2.constant(1.0, self.m)
        if n == 1:
            return Jet2(self.value, self.gradient.copy(),
                        self.hess_packed.copy(), self.m)
        v = self.value
        if v == 0.0 and n < 0:
            raise DomainError("zero raised to a negative power")
        return self._chain(v ** n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))

    def sin(self):
        s, c = math.sin(self.value), math.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = math.sin(self.value), math.cos(self.value)
        return self._chain(c, -s, -c)

    def exp(self):
        e = math.exp(self.value)
        return self._chain(e, e, e)

    def log(self):
        v = self.value
        if v <= 0.0:
            raise DomainError("log of a nonpositive value")
        return self._chain(math.log(v), 1.0 / v, -1.0 / v ** 2)

    def sqrt(self):
        v = self.value
        if v <= 0.0:
            raise DomainError("sqrt requires a positive argument for jets")
        r = math.sqrt(v)
        return self._chain(r, 0.5 / r, -0.25 / (r * v))

    def __repr__(self):
        return f"Jet2(value={self.value!r}, gradient={self.gradient!r})"


_FUNC_METHODS = {"sin": Jet2.sin, "cos": Jet2.cos, "exp": Jet2.exp,
                 "log": Jet2.log, "sqrt": Jet2.sqrt}


def eval_jet2(e, u):
    """Evaluate expression ``e`` at point ``u`` carrying exact second-order
    derivative information; raises DomainError outside the domain."""
    u = np.asarray(u, dtype=float)
    jet = _eval(e, u)
    if not math.isfinite(jet.value) or not np.all(np.isfinite(jet.gradient)) \
            or not np.all(np.isfinite(jet.hess_packed)):
        raise DomainError(f"non-finite jet for {ex.to_source(e)}")
    return jet


def _eval(e, u):
    m = len(u)
    if isinstance(e, ex.Var):
        return Jet2.variable(u[e.index], e.index, m)
    if isinstance(e, ex.Const):
        return Jet2.constant(e.value, m)
    if isinstance(e, ex.Add):
        return _eval(e.left, u) + _eval(e.right, u)
    if isinstance(e, ex.Sub):
        return _eval(e.left, u) - _eval(e.right, u)
    if isinstance(e, ex.Mul):
        return _eval(e.left, u) * _eval(e.right, u)
    if isinstance(e, ex.Div):
        return _eval(e.left, u) / _eval(e.right, u)
    if isinstance(e, ex.Neg):
        return -_eval(e.operand, u)
    if isinstance(e, ex.Pow):
        return _eval(e.base, u).powi(e.exponent)
    if isinstance(e, ex.Func):
        return _FUNC_METHODS[e.name](_eval(e.arg, u))
    raise TypeError(f"not an Expression: {e!r}")
