"""Model ambient spaces: even-dimensional flat space with the standard
complex structure, and the constant-holomorphic-curvature model.

The curvature of the constant model is

    R(X,Y)Z = c( g(Y,Z)X - g(X,Z)Y + g(JY,Z)JX - g(JX,Z)JY - 2 g(JX,Y) JZ )

with the sign fixed so a totally real orthonormal pair has sectional
curvature c and a unit holomorphic plane has curvature 4c.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import canonical_complex_structure
from .errors import DimensionError

__all__ = ["AmbientSpace", "make_flat_complex_ambient",
           "make_const_holomorphic_ambient", "ambient_curvature"]

FLAT = "flat"
CONST_HOLOMORPHIC = "const_holomorphic"


@dataclass(frozen=True)
class AmbientSpace:
    dim: int
    J: np.ndarray = field(repr=False)
    kind: str
    c: float = 0.0

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        if J.shape != (self.dim, self.dim):
            raise DimensionError("J must be square of the ambient dimension")
        if self.dim % 2:
            raise DimensionError("ambient dimension must be even")
        eye = np.eye(self.dim)
        if np.abs(J @ J + eye).max() > 1e-12:
            raise ValueError("J^2 != -I")
        if np.abs(J.T @ J - eye).max() > 1e-12:
            raise ValueError("J is not orthogonal")
        object.__setattr__(self, "J", J)

    @property
    def is_flat(self):
        return self.kind == FLAT or self.c == 0.0

    def check_vector(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape != (self.dim,):
            raise DimensionError(f"expected vector of dimension {self.dim}, "
                                 f"got shape {X.shape}")
        return X

    def curvature(self, X, Y, Z, W):
        """Quadruple <R(X,Y)Z, W> of the model curvature tensor."""
        X, Y, Z, W = (self.check_vector(v) for v in (X, Y, Z, W))
        if self.is_flat:
            return 0.0
        J = self.J
        JX, JY, JZ = J @ X, J @ Y, J @ Z
        val = ((Y @ Z) * (X @ W) - (X @ Z) * (Y @ W)
               + (JY @ Z) * (JX @ W) - (JX @ Z) * (JY @ W)
               - 2.0 * (JX @ Y) * (JZ @ W))
        return self.c * val

    def curvature_frame_tensor(self, frame_rows):
        """Dense curvature tensor restricted to a set of ambient row vectors
        (typically an orthonormal tangent frame)."""
        E = np.asarray(frame_rows, dtype=float)
        r = E.shape[0]
        if self.is_flat:
            return np.zeros((r, r, r, r))
        G = E @ E.T
        Q = E @ self.J @ E.T  # Q[a,b] = <e_a, J e_b>; phi in frame coordinates
        P = -Q                # P[a,b] = <J e_a, e_b>
        R = (np.einsum("bc,ae->abce", G, G) - np.einsum("ac,be->abce", G, G)
             + np.einsum("bc,ae->abce", P, P) - np.einsum("ac,be->abce", P, P)
             - 2.0 * np.einsum("ab,ce->abce", P, P))
        return self.c * R


def make_flat_complex_ambient(q):
    """Flat C^q = R^{2q} with the standard complex structure."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return AmbientSpace(dim=2 * q, J=canonical_complex_structure(2 * q),
                        kind=FLAT, c=0.0)


def make_const_holomorphic_ambient(q, c):
    """Complex space form model of real dimension 2q with holomorphic
    sectional curvature 4c (flat when c == 0)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return AmbientSpace(dim=2 * q, J=canonical_complex_structure(2 * q),
                        kind=CONST_HOLOMORPHIC, c=float(c))


def ambient_curvature(amb, X, Y, Z, W):
    """Functional form of AmbientSpace.curvature."""
    return amb.curvature(X, Y, Z, W)
