"""Algebraic curvature tensor kernel.

Quadruple convention used everywhere in this package::

    R4(X, Y, Z, W) = <R(X, Y) Z, W>,   sectional(X, Y) = R4(X, Y, Y, X)

so the round unit sphere has sectional curvature +1.  Tensors are dense
``(n, n, n, n)`` arrays indexed against an orthonormal frame.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NonOrthonormalFrame

__all__ = [
    "canonical_complex_structure", "gauss_tensor", "constant_curvature_tensor",
    "const_holomorphic_tensor", "random_bianchi_tensor", "random_kahler_tensor",
    "symmetry_residuals", "restrict_tensor", "sectional", "pair_curvature_matrix",
    "sectional_sum_matrix", "check_orthonormal_rows",
]


def canonical_complex_structure(n):
    """Orthogonal skew J on R^n (n even) pairing coordinates (1,2), (3,4), ...
    with J e_{2i-1} = e_{2i}."""
    if n % 2:
        raise DimensionError(f"complex structure needs even dimension, got {n}")
    J = np.zeros((n, n))
    for i in range(0, n, 2):
        J[i + 1, i] = 1.0
        J[i, i + 1] = -1.0
    return J


def gauss_tensor(A):
    """Curvature tensor A(X,W)A(Y,Z) - A(X,Z)A(Y,W) of a symmetric bilinear
    form; carries all algebraic curvature symmetries including first Bianchi."""
    A = np.asarray(A, dtype=float)
    return np.einsum("ae,bc->abce", A, A) - np.einsum("ac,be->abce", A, A)


def constant_curvature_tensor(d, kappa=1.0):
    return kappa * gauss_tensor(np.eye(d))


def const_holomorphic_tensor(d, c, J=None):
    """Model tensor with holomorphic sectional curvature 4c and totally real
    sectional curvature c, relative to J (canonical pairing by default)."""
    if J is None:
        J = canonical_complex_structure(d)
    g = np.eye(d)
    Q = J.T  # Q[a, b] = <J e_a, e_b>
    R = (np.einsum("bc,ae->abce", g, g) - np.einsum("ac,be->abce", g, g)
         + np.einsum("bc,ae->abce", Q, Q) - np.einsum("ac,be->abce", Q, Q)
         - 2.0 * np.einsum("ab,ce->abce", Q, Q))
    return c * R


def random_bianchi_tensor(d, rng, terms=3, scale=1.0):
    """Sum of Gauss-type tensors of random symmetric forms; the standard
    generator for algebraic-curvature test inputs."""
    R = np.zeros((d, d, d, d))
    for _ in range(terms):
        A = rng.standard_normal((d, d))
        R += gauss_tensor(0.5 * (A + A.T))
    return scale * R


def random_kahler_tensor(d, rng, terms=2, scale=1.0):
    """Random algebraic curvature tensor additionally invariant under the
    canonical J (R(JX,JY,.,.) = R(X,Y,.,.)).

    Built as the flat-space Gauss tensor of a random complex-bilinear
    symmetric form, which guarantees every symmetry exactly.
    """
    n = d // 2
    if 2 * n != d:
        raise DimensionError("Kahler tensors need even dimension")
    # complex coordinates of the real basis vectors: e_{2j} -> e_j, e_{2j+1} -> i e_j
    Z = np.zeros((d, n), dtype=complex)
    for j in range(n):
        Z[2 * j, j] = 1.0
        Z[2 * j + 1, j] = 1.0j
    H = np.zeros((d, d, terms), dtype=complex)
    for t in range(terms):
        S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        S = 0.5 * (S + S.T)
        H[:, :, t] = Z @ S @ Z.T
    inner = np.real(np.einsum("bcx,aex->abce", H, H.conj()))
    R = inner - np.real(np.einsum("acx,bex->abce", H, H.conj()))
    return scale * R


def symmetry_residuals(R):
    """Max residuals of the four algebraic curvature symmetries."""
    R = np.asarray(R)
    return {
        "antisym_12": float(np.abs(R + R.transpose(1, 0, 2, 3)).max()),
        "antisym_34": float(np.abs(R + R.transpose(0, 1, 3, 2)).max()),
        "pair_swap": float(np.abs(R - R.transpose(2, 3, 0, 1)).max()),
        "bianchi": float(np.abs(R + R.transpose(1, 2, 0, 3)
                                + R.transpose(2, 0, 1, 3)).max()),
    }


def check_orthonormal_rows(V, tol, what="frame"):
    V = np.asarray(V, dtype=float)
    if V.ndim != 2:
        raise DimensionError(f"{what} must be a 2-d array of row vectors")
    G = V @ V.T
    err = np.abs(G - np.eye(len(V))).max() if len(V) else 0.0
    if err > tol:
        raise NonOrthonormalFrame(f"{what} orthonormality residual {err:.3e} "
                                  f"exceeds {tol:.1e}")
    return V


def restrict_tensor(R, V):
    """Express R in the orthonormal row-frame V: shape (r, n) -> (r, r, r, r)."""
    R = np.asarray(R)
    V = np.asarray(V, dtype=float)
    if R.shape[0] != V.shape[1]:
        raise DimensionError("frame/tensor dimension mismatch")
    return np.einsum("ai,bj,ck,el,ijkl->abce", V, V, V, V, R, optimize=True)


def sectional(R, x, y):
    """R4(x, y, y, x); equals the sectional curvature numerator."""
    return float(np.einsum("abce,a,b,c,e->", R, x, y, y, x))


def pair_curvature_matrix(R):
    """Reshape R so that K(x, y) = vec(x x^T) . M . vec(y y^T); the fast
    kernel behind sweep objectives and the sampling oracle."""
    d = R.shape[0]
    return np.ascontiguousarray(R.transpose(0, 3, 1, 2).reshape(d * d, d * d))


def sectional_sum_matrix(M, W):
    """G[a, b] = K(w_a, w_b) for the columns of W, given the reshaped matrix
    M = pair_curvature_matrix(R)."""
    d, s = W.shape
    P = (W[:, None, :] * W[None, :, :]).reshape(d * d, s)
    return P.T @ M @ P


def sectional_sum_matrix_batch(M, Ws):
    """Batched version of sectional_sum_matrix; Ws has shape (B, d, s)."""
    B, d, s = Ws.shape
    P = (Ws[:, :, None, :] * Ws[:, None, :, :]).reshape(B, d * d, s)
    return np.transpose(P, (0, 2, 1)) @ (M @ P)
