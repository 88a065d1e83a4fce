"""Extremization over tuples of mutually orthogonal subspaces of a
Euclidean space (flags) and over tuples of mutually orthogonal J-invariant
planes, plus a Haar-sampling oracle for certification.

The ascent is derivative-free: restarted cyclic Givens sweeps.  A plane
rotation of two coordinate rows of the coefficient matrix stays exactly
on the feasible manifold, the rotation angle is line-searched by golden
section, and a restart terminates when a full sweep improves less than a
floor.  Seeds nest: restart r draws from SeedSequence([seed, r]), so
doubling the restart budget only extends the stream and the reported
maximum can never decrease.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (BlockSizeError, DimensionError, FeasibilityError,
                     ObjectiveError)

__all__ = ["OptimizerConfig", "SubspaceTuple", "PlaneTuple", "OptResult",
           "random_subspace_tuple", "maximize_over_flags",
           "maximize_over_plane_tuples", "brute_force_oracle",
           "brute_force_plane_oracle"]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 16
    max_sweeps: int = 200
    floor: float = 1e-10          # sweep improvement threshold
    seed: int = 0
    line_tol: float = 1e-8        # golden-section angle tolerance
    line_grid: int = 9            # coarse bracketing grid over (-pi/2, pi/2]
    certify_samples: int = 10_000 # oracle budget for certification gaps

    def with_seed(self, seed):
        return replace(self, seed=seed)


DEFAULT_OPT = OptimizerConfig()


def _validate_sizes(d, sizes, min_blocks=1):
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < min_blocks:
        raise BlockSizeError(f"need at least {min_blocks} blocks, "
                             f"got {len(sizes)}")
    if any(n < 1 for n in sizes):
        raise BlockSizeError(f"block sizes must be positive: {sizes}")
    if sum(sizes) > d:
        raise BlockSizeError(f"block sizes {sizes} exceed dimension {d}")
    return sizes


@dataclass(frozen=True)
class SubspaceTuple:
    """k mutually orthogonal subspaces of R^dim spanned by column blocks
    of an orthonormal-column coefficient matrix."""
    dim: int
    block_sizes: tuple
    coeffs: np.ndarray = field(repr=False)  # (dim, sum(block_sizes))

    def __post_init__(self):
        sizes = _validate_sizes(self.dim, self.block_sizes)
        W = np.asarray(self.coeffs, dtype=float)
        if W.shape != (self.dim, sum(sizes)):
            raise DimensionError(f"coefficients must be {self.dim} x "
                                 f"{sum(sizes)}, got {W.shape}")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "coeffs", W)

    @property
    def k(self):
        return len(self.block_sizes)

    @property
    def s(self):
        return sum(self.block_sizes)

    def blocks(self):
        out, start = [], 0
        for n in self.block_sizes:
            out.append(self.coeffs[:, start:start + n])
            start += n
        return out

    def block_slices(self):
        out, start = [], 0
        for n in self.block_sizes:
            out.append(slice(start, start + n))
            start += n
        return out

    def orthonormality_residual(self):
        W = self.coeffs
        return float(np.abs(W.T @ W - np.eye(W.shape[1])).max())


@dataclass(frozen=True)
class PlaneTuple:
    """k mutually orthogonal J-invariant planes span(x_i, phi x_i)."""
    dim: int
    vectors: np.ndarray = field(repr=False)   # (dim, k) the x_i columns
    partners: np.ndarray = field(repr=False)  # (dim, k) orthonormalized phi x_i

    @property
    def k(self):
        return self.vectors.shape[1]

    def frame_columns(self):
        """(dim, 2k) interleaved columns x_1, y_1, x_2, y_2, ..."""
        d, k = self.vectors.shape
        W = np.empty((d, 2 * k))
        W[:, 0::2] = self.vectors
        W[:, 1::2] = self.partners
        return W

    def orthonormality_residual(self):
        W = self.frame_columns()
        return float(np.abs(W.T @ W - np.eye(W.shape[1])).max())


@dataclass
class OptResult:
    value: float
    argmax: object
    restarts: int
    sweeps: int
    gap: float | None = None


def _haar_matrix(rng, d):
    A = rng.standard_normal((d, d))
    Q, R = np.linalg.qr(A)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def random_subspace_tuple(d, sizes, seed):
    """First s columns of a Haar-uniform orthogonal matrix, split into
    blocks; deterministic per seed (int seed or a Generator)."""
    sizes = _validate_sizes(d, sizes)
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(seed)
    W = _haar_matrix(rng, d)[:, :sum(sizes)]
    return SubspaceTuple(dim=d, block_sizes=sizes, coeffs=W)


def _check_value(v):
    v = float(v)
    if not math.isfinite(v):
        raise ObjectiveError(f"objective returned non-finite value {v!r}")
    return v


def _golden_max(f, lo, hi, tol):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d_ = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d_)
    while (b - a) > tol:
        if fc >= fd:
            b, d_, fd = d_, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + _INVPHI * (b - a)
            fd = f(d_)
    return (c, fc) if fc >= fd else (d_, fd)


def _rotated(W, p, q, theta):
    out = W.copy()
    c, s = math.cos(theta), math.sin(theta)
    out[p, :] = c * W[p, :] - s * W[q, :]
    out[q, :] = s * W[p, :] + c * W[q, :]
    return out


# Flag objectives built from curvature data are quartic forms in the
# coefficient matrix, so along a Givens rotation they are trigonometric
# polynomials of degree 4: nine samples over one period determine them
# exactly and the line search can run on the fitted polynomial.  A
# verification evaluation guards arbitrary user objectives and falls back
# to direct golden section when the fit is not exact.

_FIT_ANGLES = -math.pi + (2.0 * np.arange(9) + 1.0) * math.pi / 9.0
_FIT_BASIS = np.column_stack(
    [np.ones(9)] + [f(j * _FIT_ANGLES) for j in range(1, 5)
                    for f in (np.cos, np.sin)])
_FIT_INV = np.linalg.inv(_FIT_BASIS)


def _trig_fit(samples):
    return _FIT_INV @ samples


def _trig_eval(coefs, theta):
    # angle-multiples by recurrence: two trig calls per evaluation
    c1, s1 = math.cos(theta), math.sin(theta)
    c, s = c1, s1
    val = coefs[0] + coefs[1] * c1 + coefs[2] * s1
    for j in range(2, 5):
        c, s = c * c1 - s * s1, s * c1 + c * s1
        val += coefs[2 * j - 1] * c + coefs[2 * j] * s
    return val


def _trig_line_search(coefs, f0, tol):
    """Max of the fitted trig polynomial over (-pi/2, pi/2]: vectorized
    coarse grid, then golden refinement; returns (theta, value) or None."""
    thetas = np.linspace(-math.pi / 2, math.pi / 2, 34)[1:]
    js = np.arange(1, 5)[:, None]
    vals = (coefs[0]
            + coefs[1::2] @ np.cos(js * thetas)
            + coefs[2::2] @ np.sin(js * thetas))
    i = int(np.argmax(vals))
    best_theta, best_val = float(thetas[i]), float(vals[i])
    width = math.pi / 33
    lo = max(best_theta - width, -math.pi / 2 + 1e-12)
    hi = min(best_theta + width, math.pi / 2)
    t_star, v_star = _golden_max(lambda t: _trig_eval(coefs, t), lo, hi, tol)
    if v_star > best_val:
        best_theta, best_val = t_star, v_star
    if best_val > f0 and best_theta != 0.0:
        return best_theta, best_val
    return None


def _rotation_stack(W, p, q, thetas):
    n = len(thetas)
    c = np.cos(thetas)
    s = np.sin(thetas)
    Ws = np.broadcast_to(W, (n,) + W.shape).copy()
    Ws[:, p, :] = c[:, None] * W[p, :] - s[:, None] * W[q, :]
    Ws[:, q, :] = s[:, None] * W[p, :] + c[:, None] * W[q, :]
    return Ws


def _line_search(f_of_theta, f0, grid_n, tol):
    """Best angle in (-pi/2, pi/2]: coarse grid, then golden refinement
    around the best bracket; returns (theta, value) or None if no angle
    beats f0."""
    thetas = np.linspace(-math.pi / 2, math.pi / 2, grid_n + 1)[1:]
    best_theta, best_val = 0.0, f0
    for t in thetas:
        v = f_of_theta(t)
        if v > best_val:
            best_theta, best_val = t, v
    width = math.pi / grid_n
    lo = max(best_theta - width, -math.pi / 2 + 1e-12)
    hi = min(best_theta + width, math.pi / 2)
    t_star, v_star = _golden_max(f_of_theta, lo, hi, tol)
    if v_star > best_val:
        best_theta, best_val = t_star, v_star
    if best_val > f0 and best_theta != 0.0:
        return best_theta, best_val
    return None


def _polish_columns(W):
    Q, R = np.linalg.qr(W)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def maximize_over_flags(objective, d, sizes, cfg=None):
    """Maximize a smooth objective over SubspaceTuple coefficient matrices
    by restarted cyclic Givens sweeps.  Minimization is maximization of the
    negated objective (callers negate)."""
    cfg = cfg or DEFAULT_OPT
    sizes = _validate_sizes(d, sizes)
    s = sum(sizes)
    batch = getattr(objective, "batch", None)
    quartic_ok = True  # cleared on the first failed fit verification

    def eval_many(Ws):
        if batch is not None:
            vals = np.asarray(batch(Ws), dtype=float)
        else:
            vals = np.array([objective(W) for W in Ws], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ObjectiveError("objective returned a non-finite value")
        return vals

    best_val, best_W = -math.inf, None
    total_sweeps = 0
    pairs = list(itertools.combinations(range(d), 2))
    for r in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, r]))
        W = _haar_matrix(rng, d)[:, :s]
        current = _check_value(objective(W))
        for _ in range(cfg.max_sweeps):
            total_sweeps += 1
            sweep_start = current
            for (p, q) in pairs:
                found = None
                if quartic_ok:
                    samples = eval_many(_rotation_stack(W, p, q, _FIT_ANGLES))
                    coefs = _trig_fit(samples)
                    found = _trig_line_search(coefs, current, cfg.line_tol)
                    if found is not None:
                        theta, fit_val = found
                        W_new = _rotated(W, p, q, theta)
                        true_val = _check_value(objective(W_new))
                        if abs(true_val - fit_val) > 1e-9 * (1 + abs(true_val)):
                            quartic_ok = False  # not a quartic objective
                            found = None
                        elif true_val > current:
                            W, current = W_new, true_val
                            continue
                        else:
                            found = None
                if not quartic_ok:
                    found = _line_search(
                        lambda t: _check_value(objective(_rotated(W, p, q, t))),
                        current, cfg.line_grid, cfg.line_tol)
                    if found is not None:
                        theta, val = found
                        W = _rotated(W, p, q, theta)
                        current = val
            if current - sweep_start < cfg.floor:
                break
        W = _polish_columns(W)
        current = _check_value(objective(W))
        if current > best_val:
            best_val, best_W = current, W
    result_tuple = SubspaceTuple(dim=d, block_sizes=sizes, coeffs=best_W)
    return OptResult(value=best_val, argmax=result_tuple,
                     restarts=cfg.restarts, sweeps=total_sweeps)


# ---------------------------------------------------------------------------
# plane tuples

def project_plane_tuple(X, phi, pivot=1e-12):
    """Gram-Schmidt over (x_1, phi x_1, x_2, phi x_2, ...): returns the
    feasible (vectors, partners) pair or raises FeasibilityError."""
    X = np.asarray(X, dtype=float)
    d, k = X.shape
    Xo = np.empty((d, k))
    Yo = np.empty((d, k))
    basis = []
    for i in range(k):
        v = X[:, i].copy()
        for b in basis:
            v -= (v @ b) * b
        nv = np.linalg.norm(v)
        if nv < pivot:
            raise FeasibilityError("plane vector degenerated under "
                                   "re-orthogonalization")
        x = v / nv
        w = phi @ x
        for b in basis:
            w -= (w @ b) * b
        w -= (w @ x) * x
        nw = np.linalg.norm(w)
        if nw < pivot:
            raise FeasibilityError("phi-image degenerated under "
                                   "re-orthogonalization")
        y = w / nw
        basis.extend((x, y))
        Xo[:, i] = x
        Yo[:, i] = y
    return Xo, Yo


def random_plane_tuple(d, k, phi, rng, tries=16):
    for _ in range(tries):
        try:
            X, Y = project_plane_tuple(rng.standard_normal((d, k)), phi)
            return X, Y
        except FeasibilityError:
            continue
    raise FeasibilityError("could not draw a feasible plane tuple")


def maximize_over_plane_tuples(objective, d, k, phi, cfg=None):
    """Maximize objective(vectors, partners) over tuples of k mutually
    orthogonal phi-invariant planes; same restart/sweep scheme as flags
    with re-projection to the feasible set after every trial rotation."""
    cfg = cfg or DEFAULT_OPT
    if k < 1 or 2 * k > d:
        raise BlockSizeError(f"need 1 <= k <= d/2 planes, got k={k}, d={d}")
    phi = np.asarray(phi, dtype=float)

    def feas_value(X):
        Xo, Yo = project_plane_tuple(X, phi)
        return _check_value(objective(Xo, Yo)), Xo, Yo

    pairs = list(itertools.combinations(range(d), 2))
    best_val, best_XY = -math.inf, None
    total_sweeps = 0
    for r in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, r]))
        X, Y = random_plane_tuple(d, k, phi, rng)
        current = _check_value(objective(X, Y))
        for _ in range(cfg.max_sweeps):
            total_sweeps += 1
            sweep_start = current
            for (p, q) in pairs:
                def f(theta, p=p, q=q):
                    try:
                        v, _, _ = feas_value(_rotated(X, p, q, theta))
                    except FeasibilityError:
                        return -math.inf
                    return v
                found = _line_search(f, current, cfg.line_grid, cfg.line_tol)
                if found is not None:
                    theta, val = found
                    _, X, Y = feas_value(_rotated(X, p, q, theta))
                    current = val
            if current - sweep_start < cfg.floor:
                break
        if current > best_val:
            best_val, best_XY = current, (X, Y)
    planes = PlaneTuple(dim=d, vectors=best_XY[0], partners=best_XY[1])
    return OptResult(value=best_val, argmax=planes,
                     restarts=cfg.restarts, sweeps=total_sweeps)


# ---------------------------------------------------------------------------
# sampling oracles

def _axis_aligned_tuples(d, sizes):
    """Coefficient matrices of every coordinate-axis-aligned tuple."""
    out = []

    def rec(remaining_axes, chosen):
        if len(chosen) == len(sizes):
            cols = [np.eye(d)[:, list(block)] for block in chosen]
            out.append(np.concatenate(cols, axis=1))
            return
        n = sizes[len(chosen)]
        for combo in itertools.combinations(sorted(remaining_axes), n):
            rec(remaining_axes - set(combo), chosen + [combo])

    rec(set(range(d)), [])
    return out


def brute_force_oracle(objective, d, sizes, samples, seed, batch=None):
    """(max, min) of the objective over Haar-random feasible tuples plus
    every coordinate-axis-aligned tuple; deterministic per seed."""
    sizes = _validate_sizes(d, sizes)
    s = sum(sizes)
    rng = np.random.default_rng(seed)
    hi, lo = -math.inf, math.inf
    chunk = 2048
    left = int(samples)
    while left > 0:
        b = min(chunk, left)
        left -= b
        A = rng.standard_normal((b, d, d))
        Q, R = np.linalg.qr(A)
        diag = np.einsum("bii->bi", R)
        signs = np.sign(diag)
        signs[signs == 0] = 1.0
        Ws = Q[:, :, :s] * signs[:, None, :s]
        if batch is not None:
            vals = np.asarray(batch(Ws), dtype=float)
        else:
            vals = np.array([objective(W) for W in Ws])
        hi = max(hi, float(vals.max()))
        lo = min(lo, float(vals.min()))
    for W in _axis_aligned_tuples(d, sizes):
        v = float(objective(W))
        hi = max(hi, v)
        lo = min(lo, v)
    return hi, lo


def _project_plane_batch(Xs, phi, pivot=1e-9):
    """Vectorized feasibility projection over a batch (B, d, k); samples
    with any pivot below threshold are dropped (measure zero for Gaussian
    draws).  Returns (Xo, Yo, keep_mask)."""
    B, d, k = Xs.shape
    Xo = np.empty_like(Xs)
    Yo = np.empty_like(Xs)
    keep = np.ones(B, dtype=bool)
    basis = []
    for i in range(k):
        v = Xs[:, :, i].copy()
        for b in basis:
            v -= np.einsum("bd,bd->b", v, b)[:, None] * b
        nv = np.linalg.norm(v, axis=1)
        keep &= nv > pivot
        x = v / np.where(nv > pivot, nv, 1.0)[:, None]
        w = x @ phi.T
        for b in basis:
            w -= np.einsum("bd,bd->b", w, b)[:, None] * b
        w -= np.einsum("bd,bd->b", w, x)[:, None] * x
        nw = np.linalg.norm(w, axis=1)
        keep &= nw > pivot
        y = w / np.where(nw > pivot, nw, 1.0)[:, None]
        basis.extend((x, y))
        Xo[:, :, i] = x
        Yo[:, :, i] = y
    return Xo, Yo, keep


def brute_force_plane_oracle(objective, d, k, phi, samples, seed, batch=None):
    """(max, min) over Haar-random feasible plane tuples plus axis-seeded
    candidates run through the feasibility projection."""
    if k < 1 or 2 * k > d:
        raise BlockSizeError(f"need 1 <= k <= d/2 planes, got k={k}, d={d}")
    phi = np.asarray(phi, dtype=float)
    rng = np.random.default_rng(seed)
    hi, lo = -math.inf, math.inf
    chunk = 2048
    left = int(samples)
    while left > 0:
        b = min(chunk, left)
        left -= b
        Xs = rng.standard_normal((b, d, k))
        Xo, Yo, keep = _project_plane_batch(Xs, phi)
        if batch is not None:
            vals = np.asarray(batch(Xo, Yo), dtype=float)[keep]
        else:
            vals = np.array([objective(Xo[i], Yo[i])
                             for i in range(b) if keep[i]])
        if vals.size:
            hi = max(hi, float(vals.max()))
            lo = min(lo, float(vals.min()))
    for combo in itertools.combinations(range(d), k):
        X = np.eye(d)[:, list(combo)]
        try:
            Xo, Yo = project_plane_tuple(X, phi)
        except FeasibilityError:
            continue
        v = float(objective(Xo, Yo))
        hi = max(hi, v)
        lo = min(lo, v)
    return hi, lo
