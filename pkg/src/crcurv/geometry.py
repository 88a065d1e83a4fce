"""Pointwise submanifold geometry of a parametric immersion.

Given a chart u -> F(u) into a model ambient space, this module computes
at each parameter point: an orthonormal tangent frame (Gram-Schmidt on
the Jacobian columns, deterministic sign convention), a completing normal
frame, the second fundamental form from exact 2-jets, the induced
curvature tensor from the Gauss equation, mean curvature vectors, and the
CR split of the tangent space into its maximal complex subbundle D and
the orthogonal complement.

An independent finite-difference route to the induced curvature
(``intrinsic_curvature_fd``) is provided as the cross-check oracle: it
uses only the induced metric, differentiating Christoffel symbols
numerically, and never touches the second fundamental form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import expressions as ex
from .algebra import check_orthonormal_rows, restrict_tensor
from .errors import CRSplitError, DimensionError, DomainError, ImmersionError
from .jets import eval_jet2

__all__ = ["ToleranceConfig", "Chart", "CRSplit", "PointGeom",
           "point_geometry", "cr_split", "mean_curvature_vector",
           "intrinsic_curvature_fd"]


@dataclass(frozen=True)
class ToleranceConfig:
    """Central thresholds; every 'constant rank' or 'equality' statement in
    the contracts becomes a test against one of these."""
    rank: float = 1e-8            # smallest admissible Jacobian singular value
    cr: float = 0.1               # singular-value clustering width of the CR split
    orthonormality: float = 1e-10
    identity: float = 1e-9
    slack: float = 1e-6           # inequality certification slack
    eq: float = 1e-6              # equality-flag threshold


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class Chart:
    """Parametric immersion: 2q expression components over m = d + l
    parameters restricted to a closed box, with declared CR dimensions.

    ``cr_dims = (d, l)`` with d even; d == 0 declares a totally real chart,
    usable for metric/curvature work but rejected by the CR-split pipeline.
    """
    components: tuple
    domain: tuple
    cr_dims: tuple
    name: str = ""

    def __post_init__(self):
        comps = tuple(self.components)
        dom = tuple((float(lo), float(hi)) for lo, hi in self.domain)
        d, l = self.cr_dims
        m = len(dom)
        if d < 0 or l < 0 or d + l != m:
            raise ValueError(f"cr_dims {self.cr_dims} incompatible with "
                             f"{m} parameters")
        if d % 2:
            raise ValueError("complex dimension d must be even")
        if len(comps) % 2:
            raise ValueError("ambient dimension must be even")
        if len(comps) < m:
            raise ValueError("fewer ambient components than parameters")
        for lo, hi in dom:
            if not lo < hi:
                raise ValueError(f"empty domain interval [{lo}, {hi}]")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "cr_dims", (int(d), int(l)))

    @property
    def m(self):
        return len(self.domain)

    @property
    def ambient_dim(self):
        return len(self.components)

    def contains(self, u, margin=0.0):
        u = np.asarray(u, dtype=float)
        return all(lo + margin <= ui <= hi - margin
                   for ui, (lo, hi) in zip(u, self.domain))

    def require_inside(self, u, margin=0.0):
        if len(np.asarray(u)) != self.m:
            raise DimensionError(f"expected {self.m} parameters")
        if not self.contains(u, margin):
            raise DomainError(f"point {np.asarray(u)} outside the domain box"
                              + (f" (margin {margin})" if margin else ""))

    def value(self, u):
        self.require_inside(u)
        return np.array([ex.eval_value(c, u) for c in self.components])

    def jets(self, u):
        """(F, Jacobian, Hessian) with shapes (2q,), (2q, m), (2q, m, m)."""
        self.require_inside(u)
        jets = [eval_jet2(c, u) for c in self.components]
        F = np.array([j.value for j in jets])
        Jac = np.array([j.gradient for j in jets])
        Hess = np.array([j.hessian for j in jets])
        return F, Jac, Hess

    def jacobian(self, u):
        self.require_inside(u)
        return np.array([eval_jet2(c, u).gradient for c in self.components])

    def sample_points(self, count, seed, margin_frac=0.02):
        """Seeded uniform points in the box, shrunk by a relative margin so
        FD stencils stay inside."""
        rng = np.random.default_rng(seed)
        lo = np.array([a for a, _ in self.domain])
        hi = np.array([b for _, b in self.domain])
        pad = margin_frac * (hi - lo)
        return rng.uniform(lo + pad, hi - pad, size=(count, self.m))

    def grid_points(self, per_axis, margin_frac=0.02):
        axes = []
        for lo, hi in self.domain:
            pad = margin_frac * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, per_axis))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)


@dataclass(frozen=True)
class CRSplit:
    """Split of the tangent space detected from phi = P o J on the frame."""
    d_coeffs: np.ndarray          # (d, m) orthonormal rows, frame coordinates
    dperp_coeffs: np.ndarray      # (l, m)
    phi: np.ndarray               # (m, m), frame coordinates
    singular_values: np.ndarray   # (m,), descending
    total_reality_residual: float # max |phi| singular value on the complement

    @property
    def d(self):
        return self.d_coeffs.shape[0]

    @property
    def l(self):
        return self.dperp_coeffs.shape[0]


def _qr_frame(Jac, rank_tol):
    """Deterministic orthonormal frame from Jacobian columns.

    Returns (frame_rows (m, n), coeff (m, m)) with frame_a = sum_i
    coeff[i, a] * dF/du_i; equivalent to Gram-Schmidt in column order with
    positive leading coefficients.
    """
    n, m = Jac.shape
    sv = np.linalg.svd(Jac, compute_uv=False)
    if sv[-1] <= rank_tol:
        raise ImmersionError(f"Jacobian rank loss: smallest singular value "
                             f"{sv[-1]:.3e} <= {rank_tol:.1e}")
    Q, R = np.linalg.qr(Jac)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    Q = Q * signs
    R = signs[:, None] * R
    coeff = np.linalg.solve(R, np.eye(m))  # upper triangular inverse
    return Q.T, coeff


def _complete_normal_frame(frame_rows, n, accept=1e-4):
    """Complete tangent rows to an orthonormal ambient basis by projecting
    the coordinate basis vectors in order; deterministic."""
    basis = [row for row in frame_rows]
    normals = []
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        for b in basis:
            v -= (v @ b) * b
        nv = np.linalg.norm(v)
        if nv > accept:
            v /= nv
            # second orthogonalization pass for numerical hygiene
            for b in basis:
                v -= (v @ b) * b
            v /= np.linalg.norm(v)
            basis.append(v)
            normals.append(v)
            if len(basis) == n:
                break
    if len(basis) != n:
        raise ImmersionError("failed to complete the normal frame")
    return np.array(normals) if normals else np.zeros((0, n))


def cr_split(amb, frame_rows, tol=None, declared=None):
    """Split an orthonormal tangent frame by the singular values of
    phi = (tangent projection) o J.

    Singular values must cluster near 1 (complex directions) and near 0
    (totally real directions) at width ``tol.cr``; anything in the middle
    band, a trivial complex part, or disagreement with a declared (d, l)
    raises CRSplitError.
    """
    tol = tol or DEFAULT_TOL
    E = check_orthonormal_rows(np.asarray(frame_rows, dtype=float),
                               1e3 * tol.orthonormality, "tangent frame")
    m = E.shape[0]
    phi = E @ amb.J @ E.T
    S = phi.T @ phi
    S = 0.5 * (S + S.T)
    evals, evecs = np.linalg.eigh(S)          # ascending
    sv = np.sqrt(np.clip(evals, 0.0, None))
    order = np.argsort(-sv, kind="stable")
    sv_desc = sv[order]
    hi = sv_desc >= 1.0 - tol.cr
    lo = sv_desc <= tol.cr
    if not np.all(hi | lo):
        bad = sv_desc[~(hi | lo)]
        raise CRSplitError(
            f"phi singular values {np.round(bad, 4)} fall between "
            f"{tol.cr} and {1 - tol.cr}: not a CR frame at this tolerance")
    detected_d = int(hi.sum())
    detected_l = m - detected_d
    if declared is not None:
        dd, dl = declared
        if detected_d != dd:
            raise CRSplitError(f"detected complex dimension {detected_d} != "
                               f"declared d = {dd}")
        if dd > 0 and dl == 0:
            raise CRSplitError("CR split requires a nontrivial totally real "
                               "complement (declared l = 0)")
    else:
        if detected_d == 0:
            raise CRSplitError("no complex directions detected (totally real "
                               "frame)")
        if detected_l == 0:
            raise CRSplitError("no totally real directions detected "
                               "(holomorphic frame)")
    if detected_d % 2:
        raise CRSplitError(f"odd complex dimension {detected_d} detected")
    V = evecs[:, order]
    d_rows = V[:, :detected_d].T
    dperp_rows = V[:, detected_d:].T
    # direct |phi v| on the complement (the eigenvalue route floors at
    # sqrt(machine eps))
    if detected_l:
        residual = float(np.linalg.norm(phi @ dperp_rows.T, axis=0).max())
    else:
        residual = 0.0
    return CRSplit(d_coeffs=np.ascontiguousarray(d_rows),
                   dperp_coeffs=np.ascontiguousarray(dperp_rows),
                   phi=phi, singular_values=sv_desc,
                   total_reality_residual=residual)


@dataclass(frozen=True)
class PointGeom:
    """All first/second-order geometry of the immersion at one point."""
    chart: Chart
    ambient: object
    u: np.ndarray
    point: np.ndarray                 # F(u)
    frame: np.ndarray                 # (m, n) tangent frame rows
    normal_frame: np.ndarray          # (n - m, n)
    h: np.ndarray                     # (m, m, n) normal-valued second f.f.
    R: np.ndarray                     # (m, m, m, m) induced curvature
    split: CRSplit
    H: np.ndarray                     # mean curvature vector of TM
    H_D: np.ndarray
    H_Dperp: np.ndarray
    tol: ToleranceConfig = field(repr=False, default=DEFAULT_TOL)

    @property
    def m(self):
        return self.frame.shape[0]

    @property
    def d(self):
        return self.split.d

    @property
    def l(self):
        return self.split.l

    @property
    def phi(self):
        return self.split.phi

    @property
    def d_coeffs(self):
        return self.split.d_coeffs

    @property
    def dperp_coeffs(self):
        return self.split.dperp_coeffs

    @property
    def d_frame(self):
        """D-frame as ambient vectors, rows."""
        return self.split.d_coeffs @ self.frame

    @property
    def dperp_frame(self):
        return self.split.dperp_coeffs @ self.frame

    @property
    def R_D(self):
        """Induced curvature restricted to the D-frame."""
        return restrict_tensor(self.R, self.split.d_coeffs)

    @property
    def phi_D(self):
        D = self.split.d_coeffs
        return D @ self.phi @ D.T

    @property
    def h_D(self):
        """Second fundamental form in D-frame indices, (d, d, n)."""
        D = self.split.d_coeffs
        return np.einsum("ai,bj,ijk->abk", D, D, self.h, optimize=True)

    def h_of(self, v, w):
        """h(v, w) for tangent vectors given in frame coordinates."""
        return np.einsum("i,j,ijk->k", v, w, self.h)


def point_geometry(amb, chart, u, tol=None):
    """Assemble the PointGeom of a chart at one parameter point."""
    tol = tol or DEFAULT_TOL
    if chart.ambient_dim != amb.dim:
        raise DimensionError(f"chart maps into R^{chart.ambient_dim}, ambient "
                             f"has dimension {amb.dim}")
    u = np.asarray(u, dtype=float)
    F, Jac, Hess = chart.jets(u)
    frame, coeff = _qr_frame(Jac, tol.rank)
    m, n = frame.shape
    normal_frame = _complete_normal_frame(frame, n)

    hess_frame = np.einsum("ia,jb,Kij->abK", coeff, coeff, Hess, optimize=True)
    tangential = np.einsum("abK,cK->abc", hess_frame, frame, optimize=True)
    h = hess_frame - np.einsum("abc,cK->abK", tangential, frame, optimize=True)
    h = 0.5 * (h + h.transpose(1, 0, 2))

    Rbar = amb.curvature_frame_tensor(frame)
    HH = np.einsum("acK,beK->acbe", h, h, optimize=True)
    R = Rbar - HH.transpose(0, 2, 1, 3) + HH.transpose(2, 0, 1, 3)

    d_decl, l_decl = chart.cr_dims
    if d_decl > 0:
        split = cr_split(amb, frame, tol, declared=(d_decl, l_decl))
    else:
        # totally real chart: validate that no complex directions exist
        phi = frame @ amb.J @ frame.T
        sv = np.linalg.svd(phi, compute_uv=False)
        if sv.size and sv.max() > tol.cr:
            raise CRSplitError(f"chart declared totally real but phi has "
                               f"singular value {sv.max():.3f}")
        split = CRSplit(d_coeffs=np.zeros((0, m)), dperp_coeffs=np.eye(m),
                        phi=phi, singular_values=np.sort(sv)[::-1],
                        total_reality_residual=float(sv.max()) if sv.size else 0.0)

    H = np.einsum("aaK->K", h)
    H_D = np.einsum("ai,aj,ijK->K", split.d_coeffs, split.d_coeffs, h,
                    optimize=True) if split.d else np.zeros(n)
    H_Dp = np.einsum("ai,aj,ijK->K", split.dperp_coeffs, split.dperp_coeffs, h,
                     optimize=True) if split.l else np.zeros(n)

    return PointGeom(chart=chart, ambient=amb, u=u, point=F, frame=frame,
                     normal_frame=normal_frame, h=h, R=R, split=split,
                     H=H, H_D=H_D, H_Dperp=H_Dp, tol=tol)


def mean_curvature_vector(geom, V):
    """H_V = sum_i h(v_i, v_i) over an orthonormal frame V of a tangent
    subspace, rows in frame coordinates; independent of the frame choice."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[1] != geom.m:
        raise DimensionError("V must be rows of frame coefficients")
    check_orthonormal_rows(V, 1e3 * geom.tol.orthonormality, "V frame")
    return np.einsum("ai,aj,ijK->K", V, V, geom.h, optimize=True)


# ---------------------------------------------------------------------------
# finite-difference intrinsic curvature (independent cross-check)

def _metric(chart, u):
    J = chart.jacobian(u)
    return J.T @ J


def _christoffel(chart, u, steps):
    m = chart.m
    g = _metric(chart, u)
    ginv = np.linalg.inv(g)
    dg = np.zeros((m, m, m))  # dg[k] = d_k g
    for k in range(m):
        up = u.copy(); up[k] += steps[k]
        um = u.copy(); um[k] -= steps[k]
        dg[k] = (_metric(chart, up) - _metric(chart, um)) / (2 * steps[k])
    # Gamma^l_ij = 1/2 g^{lt} (d_i g_jt + d_j g_it - d_t g_ij)
    braces = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)  # [i, j, t]
    return 0.5 * np.einsum("lt,ijt->lij", ginv, braces)


def intrinsic_curvature_fd(chart, u, step=1e-4, tol=None):
    """Induced curvature computed intrinsically: metric from exact
    Jacobians, Christoffel symbols and their derivatives by central
    differences; returned in the same orthonormal frame and quadruple
    convention as PointGeom.R."""
    tol = tol or DEFAULT_TOL
    u = np.asarray(u, dtype=float)
    m = chart.m
    steps = np.array([step * max(1.0, abs(ui)) for ui in u])
    chart.require_inside(u, margin=0.0)
    for ui, (lo, hi), hstep in zip(u, chart.domain, steps):
        if ui - 2.1 * hstep < lo or ui + 2.1 * hstep > hi:
            raise DomainError("FD stencil leaves the domain box")

    dGam = np.zeros((m, m, m, m))  # dGam[k, l, i, j] = d_k Gamma^l_ij
    for k in range(m):
        up = u.copy(); up[k] += steps[k]
        um = u.copy(); um[k] -= steps[k]
        dGam[k] = (_christoffel(chart, up, steps)
                   - _christoffel(chart, um, steps)) / (2 * steps[k])
    Gam = _christoffel(chart, u, steps)

    # R(d_i, d_j) d_k = [d_i G^l_jk - d_j G^l_ik + G^l_it G^t_jk - G^l_jt G^t_ik] d_l
    Rup = np.zeros((m, m, m, m))  # Rup[i, j, k, l]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    Rup[i, j, k, l] = (dGam[i, l, j, k] - dGam[j, l, i, k]
                                       + Gam[l, i, :] @ Gam[:, j, k]
                                       - Gam[l, j, :] @ Gam[:, i, k])
    g = _metric(chart, u)
    R4_coord = np.einsum("ijkl,lt->ijkt", Rup, g)

    Jac = chart.jacobian(u)
    _, coeff = _qr_frame(Jac, tol.rank)
    return np.einsum("ia,jb,kc,le,ijkl->abce", coeff, coeff, coeff, coeff,
                     R4_coord, optimize=True)
