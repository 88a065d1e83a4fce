"""Pointwise curvature invariants of a distribution.

Every function takes a dense curvature tensor (quadruple convention of
:mod:`crcurv.algebra`) together with orthonormal frames or coefficient
tuples expressed against the tensor's index space.  The extremal
invariants delegate to :mod:`crcurv.optim` and, for dimensions up to 6,
attach a certification gap from the sampling oracle.

Convention note: the bisectional curvature of two J-invariant planes is
computed as the plane functional

    K_h(sigma, sigma') = 1/2 * [K(X,Y) + K(X,phiY) + K(phiX,Y) + K(phiX,phiY)]

which depends only on the planes, is exactly invariant under in-plane
rotations, halves the mutual curvature of the two planes (so twice the
pairwise sum equals the mutual curvature of the tuple identically), and
coincides with the quadruple R4(X, phiX, phiY, Y) whenever the tensor is
invariant under the complex structure.  On sigma = sigma' it reduces to
the holomorphic sectional curvature K(X, phiX).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (check_orthonormal_rows, pair_curvature_matrix,
                      restrict_tensor, sectional_sum_matrix,
                      sectional_sum_matrix_batch)
from .errors import BlockSizeError, DimensionError, NotJInvariant
from .optim import (DEFAULT_OPT, OptResult, PlaneTuple, SubspaceTuple,
                    brute_force_oracle, brute_force_plane_oracle,
                    maximize_over_flags, maximize_over_plane_tuples,
                    project_plane_tuple)

__all__ = [
    "InvariantValue", "ChenDelta", "tau_subspace", "mutual_curvature",
    "mixed_scalar_curvature", "bisectional_curvature", "s_h", "chen_delta",
    "delta_m", "delta_m_aggregate", "delta_h", "script_H", "normalized_delta",
    "normalized_delta_aggregate", "partitions",
]

CERTIFY_MAX_DIM = 6


@dataclass
class InvariantValue:
    """One extremal invariant: value, the attaining configuration and the
    certification gap (value minus the oracle extremum, sign-adjusted so a
    small |gap| with gap >= -tol certifies the optimizer)."""
    value: float
    attained: object = None
    gap: float | None = None
    sizes: tuple | None = None


@dataclass
class ChenDelta:
    delta: InvariantValue
    delta_hat: InvariantValue
    tau_D: float


def partitions(total, k=None, maximum=None):
    """Non-decreasing tuples of positive integers; ``k`` fixes the length,
    ``total`` is the exact sum unless ``maximum`` is given (then sum <=
    maximum and ``total`` is ignored)."""
    exact = maximum is None
    bound = total if exact else maximum

    def rec(prefix, remaining, minimum):
        length_ok = k is None or len(prefix) == k
        if length_ok and prefix and (not exact or remaining == 0):
            yield tuple(prefix)
        if k is not None and len(prefix) == k:
            return
        for n in range(minimum, remaining + 1):
            yield from rec(prefix + [n], remaining - n, n)

    yield from rec([], bound, 1)


# ---------------------------------------------------------------------------
# frame-based scalar invariants

def tau_subspace(R, V, tol=1e-8):
    """tau(V) = sum over ordered pairs a != b of K(v_a, v_b): the
    intra-subspace double trace of the curvature."""
    V = check_orthonormal_rows(np.asarray(V, dtype=float), tol, "V frame")
    if V.shape[0] < 2:
        return 0.0
    R_V = restrict_tensor(R, V)
    return float(np.einsum("abba->", R_V))


def mutual_curvature(R, tup, tol=1e-8):
    """S_m(V_1, ..., V_k) = sum over block pairs of the cross sectional
    sums; requires k >= 2 blocks."""
    if not isinstance(tup, SubspaceTuple):
        raise DimensionError("expected a SubspaceTuple")
    if tup.k < 2:
        raise BlockSizeError("mutual curvature needs at least two blocks")
    check_orthonormal_rows(tup.coeffs.T, tol, "tuple columns")
    G = sectional_sum_matrix(pair_curvature_matrix(np.asarray(R, dtype=float)),
                             tup.coeffs)
    total = G.sum()
    intra = sum(G[sl, sl].sum() for sl in tup.block_slices())
    return float(0.5 * (total - intra))


def mixed_scalar_curvature(R, D_rows, Dperp_rows, tol=1e-8):
    """Sum of sectional curvatures over all cross pairs of two orthogonal
    frames (for D and its complement: the mixed scalar curvature)."""
    D = np.asarray(D_rows, dtype=float)
    P = np.asarray(Dperp_rows, dtype=float)
    both = np.vstack([D, P])
    check_orthonormal_rows(both, tol, "adapted frame")
    return float(np.einsum("ijkl,ai,bj,bk,al->", np.asarray(R, dtype=float),
                           D, P, P, D, optimize=True))


def _plane_partner(phi, x, tol):
    px = phi @ x
    residual = np.linalg.norm(phi @ px + x)
    if residual > tol:
        raise NotJInvariant(f"span(x, phi x) is not phi-invariant "
                            f"(residual {residual:.2e})")
    px = px - (px @ x) * x
    n = np.linalg.norm(px)
    if n < 1e-12:
        raise NotJInvariant("phi x is parallel to x")
    return px / n


def bisectional_curvature(R, phi, x, y, tol=1e-8):
    """Holomorphic bisectional curvature of the planes span(x, phi x) and
    span(y, phi y); see the module docstring for the locked convention."""
    R = np.asarray(R, dtype=float)
    phi = np.asarray(phi, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    px = _plane_partner(phi, x, tol)
    py = _plane_partner(phi, y, tol)
    M = pair_curvature_matrix(R)
    G = sectional_sum_matrix(M, np.stack([x, px, y, py], axis=1))
    return float(0.5 * (G[0, 2] + G[0, 3] + G[1, 2] + G[1, 3]))


def _plane_pair_matrix(R, X, Y):
    """K_h for all plane pairs: returns (k, k) with [i, j] the bisectional
    curvature of planes i and j (diagonal: holomorphic sectional)."""
    d, k = X.shape
    W = np.empty((d, 2 * k))
    W[:, 0::2] = X
    W[:, 1::2] = Y
    G = sectional_sum_matrix(pair_curvature_matrix(R), W)
    Kh = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            si, sj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
            if i == j:
                Kh[i, j] = G[2 * i, 2 * i + 1]
            else:
                Kh[i, j] = 0.5 * G[si, sj].sum()
    return Kh


def s_h(R, phi, planes, tol=1e-8):
    """S_h = sum over plane pairs of the bisectional curvature; twice this
    equals the mutual curvature of the same planes."""
    if isinstance(planes, PlaneTuple):
        X, Y = planes.vectors, planes.partners
    else:
        X, Y = project_plane_tuple(np.asarray(planes, dtype=float),
                                   np.asarray(phi, dtype=float))
    if X.shape[1] < 2:
        raise BlockSizeError("S_h needs at least two planes")
    for i in range(X.shape[1]):
        _plane_partner(np.asarray(phi, dtype=float), X[:, i], tol)
    Kh = _plane_pair_matrix(np.asarray(R, dtype=float), X, Y)
    iu = np.triu_indices(X.shape[1], k=1)
    return float(Kh[iu].sum())


# ---------------------------------------------------------------------------
# extremal invariants

class _MutualObjective:
    """S_m as a function of the coefficient matrix, with batch support."""

    def __init__(self, R, sizes):
        self.M = pair_curvature_matrix(np.asarray(R, dtype=float))
        self.slices = []
        start = 0
        for n in sizes:
            self.slices.append(slice(start, start + n))
            start += n
        self.sign = 1.0

    def __call__(self, W):
        G = sectional_sum_matrix(self.M, W)
        intra = sum(G[sl, sl].sum() for sl in self.slices)
        return self.sign * 0.5 * (G.sum() - intra)

    def batch(self, Ws):
        G = sectional_sum_matrix_batch(self.M, Ws)
        total = G.sum(axis=(1, 2))
        intra = sum(G[:, sl, sl].sum(axis=(1, 2)) for sl in self.slices)
        return self.sign * 0.5 * (total - intra)


class _BlockTauObjective:
    """sum_i tau(V_i) as a function of the coefficient matrix."""

    def __init__(self, R, sizes):
        self.M = pair_curvature_matrix(np.asarray(R, dtype=float))
        self.slices = []
        start = 0
        for n in sizes:
            self.slices.append(slice(start, start + n))
            start += n
        self.sign = 1.0

    def __call__(self, W):
        G = sectional_sum_matrix(self.M, W)
        return self.sign * sum(G[sl, sl].sum() for sl in self.slices)

    def batch(self, Ws):
        G = sectional_sum_matrix_batch(self.M, Ws)
        return self.sign * sum(G[:, sl, sl].sum(axis=(1, 2))
                               for sl in self.slices)


class _PlaneSumObjective:
    """S_h(X, Y) over plane tuples (vectors + partners)."""

    def __init__(self, R):
        self.M = pair_curvature_matrix(np.asarray(R, dtype=float))
        self.sign = 1.0

    @staticmethod
    def _interleave(X, Y):
        d, k = X.shape[-2:]
        W = np.empty(X.shape[:-2] + (d, 2 * k))
        W[..., 0::2] = X
        W[..., 1::2] = Y
        return W

    def __call__(self, X, Y):
        k = X.shape[1]
        G = sectional_sum_matrix(self.M, self._interleave(X, Y))
        total = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                total += G[2 * i:2 * i + 2, 2 * j:2 * j + 2].sum()
        return self.sign * 0.5 * total

    def batch(self, Xs, Ys):
        k = Xs.shape[2]
        G = sectional_sum_matrix_batch(self.M, self._interleave(Xs, Ys))
        total = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                total = total + G[:, 2 * i:2 * i + 2,
                                  2 * j:2 * j + 2].sum(axis=(1, 2))
        return self.sign * 0.5 * total


def _restricted(R, frame, tol=1e-8):
    frame = check_orthonormal_rows(np.asarray(frame, dtype=float), tol,
                                   "distribution frame")
    return restrict_tensor(np.asarray(R, dtype=float), frame), frame


def _lift_tuple(tup, frame):
    """Re-express a tuple found in the restricted space against the frame's
    parent coordinates."""
    coeffs = frame.T @ tup.coeffs
    return SubspaceTuple(dim=frame.shape[1], block_sizes=tup.block_sizes,
                         coeffs=coeffs)


def chen_delta(R, frame, sizes, cfg=None):
    """Chen-type invariants of the distribution spanned by ``frame``:
    2 delta = tau_D - min sum_i tau(V_i), 2 delta_hat = tau_D - max."""
    cfg = cfg or DEFAULT_OPT
    R_D, frame = _restricted(R, frame)
    d = frame.shape[0]
    tau_D = tau_subspace(R, frame)
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) == 0:
        half = 0.5 * tau_D
        return ChenDelta(delta=InvariantValue(half, sizes=()),
                         delta_hat=InvariantValue(half, sizes=()),
                         tau_D=tau_D)
    if any(n < 1 for n in sizes) or sum(sizes) > d:
        raise BlockSizeError(f"invalid block sizes {sizes} for d={d}")

    obj = _BlockTauObjective(R_D, sizes)
    obj.sign = -1.0  # minimize sum tau(V_i) -> delta
    res_min = maximize_over_flags(obj, d, sizes, cfg)
    delta = 0.5 * (tau_D - (-res_min.value))
    obj_max = _BlockTauObjective(R_D, sizes)
    res_max = maximize_over_flags(obj_max, d, sizes, cfg)
    delta_hat = 0.5 * (tau_D - res_max.value)
    return ChenDelta(
        delta=InvariantValue(delta, _lift_tuple(res_min.argmax, frame),
                             sizes=sizes),
        delta_hat=InvariantValue(delta_hat, _lift_tuple(res_max.argmax, frame),
                                 sizes=sizes),
        tau_D=tau_D)


def _certified_extremum(objective, d, sizes, sign, cfg):
    """Run the sweep optimizer on +/- objective and attach the oracle gap."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    objective.sign = 1.0 if sign == "+" else -1.0
    res = maximize_over_flags(objective, d, sizes, cfg)
    value = res.value if sign == "+" else -res.value
    gap = None
    if cfg.certify_samples > 0 and d <= CERTIFY_MAX_DIM:
        hi, lo = brute_force_oracle(objective, d, sizes, cfg.certify_samples,
                                    cfg.seed, batch=objective.batch)
        gap = res.value - hi  # in the maximized orientation
    objective.sign = 1.0
    return value, res, gap


def delta_m(R, frame, sizes, sign, cfg=None):
    """Mutual curvature invariant: max ('+') or min ('-') of S_m over
    tuples of mutually orthogonal subspaces of the given distribution."""
    cfg = cfg or DEFAULT_OPT
    R_D, frame = _restricted(R, frame)
    d = frame.shape[0]
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 2:
        raise BlockSizeError("mutual curvature invariants need k >= 2")
    if sum(sizes) > d:
        raise BlockSizeError(f"block sizes {sizes} exceed d={d}")
    obj = _MutualObjective(R_D, sizes)
    value, res, gap = _certified_extremum(obj, d, sizes, sign, cfg)
    return InvariantValue(value, _lift_tuple(res.argmax, frame), gap, sizes)


def delta_m_aggregate(R, frame, k, sign, cfg=None):
    """max_+ / min_- of delta_m over all non-decreasing k-tuples of block
    sizes with total at most the distribution dimension."""
    cfg = cfg or DEFAULT_OPT
    frame = np.asarray(frame, dtype=float)
    d = frame.shape[0]
    if not 2 <= k <= d:
        raise BlockSizeError(f"aggregate needs 2 <= k <= d, got k={k}, d={d}")
    best = None
    for sizes in partitions(None, k=k, maximum=d):
        iv = delta_m(R, frame, sizes, sign, cfg)
        better = (best is None
                  or (sign == "+" and iv.value > best.value)
                  or (sign == "-" and iv.value < best.value))
        if better:
            best = iv
    return best


def delta_h(R, phi, k, sign, cfg=None):
    """Holomorphic mutual curvature invariant: extremum of S_h over tuples
    of k mutually orthogonal J-invariant planes; R and phi must live on the
    complex distribution (restricted coordinates)."""
    cfg = cfg or DEFAULT_OPT
    R = np.asarray(R, dtype=float)
    phi = np.asarray(phi, dtype=float)
    d = R.shape[0]
    if not 2 <= k <= d / 2:
        raise BlockSizeError(f"need 2 <= k <= d/2 planes, got k={k}, d={d}")
    obj = _PlaneSumObjective(R)
    obj.sign = 1.0 if sign == "+" else -1.0
    res = maximize_over_plane_tuples(obj, d, k, phi, cfg)
    value = res.value if sign == "+" else -res.value
    gap = None
    if cfg.certify_samples > 0 and d <= CERTIFY_MAX_DIM:
        hi, _ = brute_force_plane_oracle(obj, d, k, phi, cfg.certify_samples,
                                         cfg.seed, batch=obj.batch)
        gap = res.value - hi
    obj.sign = 1.0
    return InvariantValue(value, res.argmax, gap, (2,) * k)


class _MeanNormObjective:
    """|H_V|^2 over one-block s-frames, h given in distribution indices."""

    def __init__(self, h_D):
        self.h_D = np.asarray(h_D, dtype=float)
        self.sign = 1.0

    def __call__(self, W):
        H = np.einsum("abK,ai,bi->K", self.h_D, W, W, optimize=True)
        return self.sign * float(H @ H)

    def batch(self, Ws):
        H = np.einsum("abK,nai,nbi->nK", self.h_D, Ws, Ws, optimize=True)
        return self.sign * np.einsum("nK,nK->n", H, H)


def script_H(geom, s, cfg=None):
    """Maximal mean-curvature norm over s-dimensional subspaces of D;
    for s = d this is exactly |H_D| (no optimization)."""
    cfg = cfg or DEFAULT_OPT
    d = geom.d
    if not 1 <= s <= d:
        raise BlockSizeError(f"need 1 <= s <= d, got s={s}, d={d}")
    if s == d:
        return float(np.linalg.norm(geom.H_D))
    obj = _MeanNormObjective(geom.h_D)
    res = maximize_over_flags(obj, d, (s,), cfg)
    return math.sqrt(max(res.value, 0.0))


def normalized_delta(R, frame, sizes, cfg=None):
    """(2k / (k-1)) * delta_m^+(sizes)."""
    sizes = tuple(int(n) for n in sizes)
    k = len(sizes)
    if k < 2:
        raise BlockSizeError("normalized invariant needs k >= 2")
    iv = delta_m(R, frame, sizes, "+", cfg)
    return 2.0 * k / (k - 1.0) * iv.value


def normalized_delta_aggregate(R, frame, s, cfg=None):
    """Max of the normalized invariant over all partitions of s into at
    least two blocks."""
    frame = np.asarray(frame, dtype=float)
    d = frame.shape[0]
    if not 2 <= s <= d:
        raise BlockSizeError(f"need 2 <= s <= d, got s={s}, d={d}")
    best_val, best_sizes = -math.inf, None
    for sizes in partitions(s):
        if len(sizes) < 2:
            continue
        val = normalized_delta(R, frame, sizes, cfg)
        if val > best_val:
            best_val, best_sizes = val, sizes
    return InvariantValue(best_val, sizes=best_sizes)
