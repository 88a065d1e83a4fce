"""Pointwise certification of the curvature inequalities.

Each ``check_*`` computes both sides of one inequality at a PointGeom,
reports the slack (rhs - lhs), a pass flag against the slack tolerance,
an equality flag, and the equality-case diagnostics evaluated at the
attaining configuration of the left side: the mixed-totally-geodesic
residual, the spread of the block mean curvatures, the gap between the
attained mean-curvature norm and its maximum, and the ambient-extremum
attainment gap.

The mixed-scalar bound uses the full mean curvature of the submanifold in
its right side; the reference example pins 9/4 and 16/4 from the full
|H|^2, which is what the report's provenance records.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (AmbientMismatch, BlockSizeError, BoundViolation,
                     DimensionError)
from .geometry import DEFAULT_TOL, PointGeom, ToleranceConfig
from .invariants import (InvariantValue, chen_delta, delta_h, delta_m,
                         delta_m_aggregate, mixed_scalar_curvature,
                         mutual_curvature, normalized_delta_aggregate,
                         partitions, script_H)
from .optim import DEFAULT_OPT, OptimizerConfig, SubspaceTuple

__all__ = [
    "InequalityReport", "DMinimalityReport", "check_mutual_curvature_bound",
    "check_capped_mutual_bound", "check_chen_type_bound",
    "check_min_mutual_bound", "check_mixed_scalar_bound",
    "check_holomorphic_bound", "check_flat_mean_bounds", "d_minimality_scan",
    "CHECK_IDS",
]

CHECK_IDS = ("mutual_bound", "capped_bound", "chen_type", "min_mutual",
             "mixed_scalar", "holomorphic", "flat_mean", "d_minimal")


@dataclass
class InequalityReport:
    check: str
    u: np.ndarray
    lhs: float
    rhs: float
    slack: float
    passed: bool
    equality: bool
    diagnostics: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    tol_slack: float = DEFAULT_TOL.slack
    tol_eq: float = DEFAULT_TOL.eq


def _make_report(check, geom, lhs, rhs, diagnostics, provenance, tol):
    slack = rhs - lhs
    return InequalityReport(
        check=check, u=np.asarray(geom.u, dtype=float), lhs=float(lhs),
        rhs=float(rhs), slack=float(slack), passed=bool(slack >= -tol.slack),
        equality=bool(abs(slack) <= tol.eq), diagnostics=diagnostics,
        provenance=provenance, tol_slack=tol.slack, tol_eq=tol.eq)


# ---------------------------------------------------------------------------
# ambient-side invariants

def ambient_delta_m_plus(amb, sizes, cfg):
    """Max of the ambient mutual curvature over tuples in the full ambient
    tangent space; identically zero for the flat model."""
    if amb.is_flat:
        return InvariantValue(0.0, sizes=tuple(sizes))
    frame = np.eye(amb.dim)
    Rbar = amb.curvature_frame_tensor(frame)
    return delta_m(Rbar, frame, sizes, "+", cfg)


def ambient_delta_m_plus_aggregate(amb, k, cfg):
    if amb.is_flat:
        return InvariantValue(0.0, sizes=None)
    frame = np.eye(amb.dim)
    Rbar = amb.curvature_frame_tensor(frame)
    return delta_m_aggregate(Rbar, frame, k, "+", cfg)


def ambient_delta_h_plus(amb, k, cfg):
    if amb.is_flat:
        return InvariantValue(0.0, sizes=(2,) * k)
    frame = np.eye(amb.dim)
    Rbar = amb.curvature_frame_tensor(frame)
    return delta_h(Rbar, amb.J, k, "+", cfg)


def _ambient_mutual_of(amb, geom, blocks_ambient):
    """Ambient mutual curvature of specific blocks of ambient vectors."""
    if amb.is_flat:
        return 0.0
    stacked = np.vstack(blocks_ambient)
    Rbar = amb.curvature_frame_tensor(stacked)
    sizes = tuple(b.shape[0] for b in blocks_ambient)
    tup = SubspaceTuple(dim=stacked.shape[0], block_sizes=sizes,
                        coeffs=np.eye(stacked.shape[0]))
    return mutual_curvature(Rbar, tup)


def validate_sectional_bound(amb, c, tol=1e-9, samples=1000, seed=0):
    """Check by seeded sampling that every ambient sectional curvature is
    at most c; raises BoundViolation otherwise."""
    if amb.is_flat:
        worst = 0.0
    else:
        rng = np.random.default_rng(seed)
        worst = -np.inf
        for _ in range(samples):
            A = rng.standard_normal((amb.dim, 2))
            Q, _ = np.linalg.qr(A)
            worst = max(worst, amb.curvature(Q[:, 0], Q[:, 1], Q[:, 1],
                                             Q[:, 0]))
    if worst > c + tol:
        raise BoundViolation(f"sampled ambient sectional curvature {worst:.6g}"
                             f" exceeds the supplied bound c = {c}")
    return worst


# ---------------------------------------------------------------------------
# diagnostics at an attaining configuration

def _blocks_in_frame_coords(geom, tup):
    """Column blocks of a tuple as rows of tangent-frame coefficients.

    Extremal invariants return tuples either already lifted to the tangent
    frame (dim == m) or expressed over the D-frame (dim == d).
    """
    if tup.dim == geom.m:
        return [block.T for block in tup.blocks()]
    if tup.dim == geom.d:
        return [block.T @ geom.d_coeffs for block in tup.blocks()]
    raise DimensionError(f"tuple dimension {tup.dim} matches neither the "
                         f"tangent ({geom.m}) nor the D ({geom.d}) frame")


def _mixed_tg_residual(geom, blocks):
    """max |h(v, w)| over cross-block pairs; blocks are rows of tangent
    frame coefficients."""
    worst = 0.0
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            for v in blocks[i]:
                for w in blocks[j]:
                    worst = max(worst, float(np.linalg.norm(geom.h_of(v, w))))
    return worst


def _block_mean_curvatures(geom, blocks):
    return [sum(geom.h_of(v, v) for v in block) for block in blocks]


def _mean_spread(Hs):
    worst = 0.0
    for i in range(len(Hs)):
        for j in range(i + 1, len(Hs)):
            worst = max(worst, float(np.linalg.norm(Hs[i] - Hs[j])))
    return worst


def _tuple_diagnostics(geom, amb, tup, script_value):
    blocks = _blocks_in_frame_coords(geom, tup)
    Hs = _block_mean_curvatures(geom, blocks)
    HV = sum(Hs)
    blocks_ambient = [rows @ geom.frame for rows in blocks]
    diag = {
        "mixed_tg_residual": _mixed_tg_residual(geom, blocks),
        "mean_curvature_spread": _mean_spread(Hs),
        "script_H_gap": float(script_value - np.linalg.norm(HV)),
        "attained_norm_H_V": float(np.linalg.norm(HV)),
    }
    if not amb.is_flat and len(blocks) >= 2:
        amb_sm = _ambient_mutual_of(amb, geom, blocks_ambient)
        diag["ambient_mutual"] = float(amb_sm)
    return diag


def _require_cr(geom):
    if geom.d == 0:
        raise BlockSizeError("chart has no complex distribution (d = 0)")


# ---------------------------------------------------------------------------
# the checks

def check_mutual_curvature_bound(geom, amb, sizes, cfg=None, tol=None):
    """delta_m^+ over D against the ambient invariant plus the
    mean-curvature term (k-1)/(2k) * {script-H(s)^2 if s < d, |H_D|^2 if
    s = d}; covers the real-hypersurface corollary unchanged."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    sizes = tuple(int(n) for n in sizes)
    k, s, d = len(sizes), sum(sizes), geom.d
    if k < 2:
        raise BlockSizeError("need k >= 2 blocks")
    if s > d:
        raise BlockSizeError(f"sum of sizes {s} exceeds d = {d}")
    lhs_iv = delta_m(geom.R, geom.d_coeffs, sizes, "+", cfg)
    amb_iv = ambient_delta_m_plus(amb, sizes, cfg)
    if s < d:
        script = script_H(geom, s, cfg)
        mean_term = script ** 2
        mean_label = f"script_H({s})^2"
    else:
        script = float(np.linalg.norm(geom.H_D))
        mean_term = script ** 2
        mean_label = "norm_H_D_sq"
    rhs = amb_iv.value + (k - 1) / (2.0 * k) * mean_term
    diag = _tuple_diagnostics(geom, amb, lhs_iv.attained, script)
    diag["ambient_gap"] = float(
        amb_iv.value - diag.get("ambient_mutual", 0.0))
    prov = {"lhs": f"delta_m:+:{','.join(map(str, sizes))} on induced "
                   "curvature over D",
            "rhs_mean_term": mean_label,
            "rhs_ambient_term": "0 (flat ambient)" if amb.is_flat
            else f"ambient delta_m:+:{','.join(map(str, sizes))}"}
    if lhs_iv.gap is not None:
        diag["certification_gap"] = float(lhs_iv.gap)
    return _make_report("mutual_bound", geom, lhs_iv.value, rhs, diag, prov,
                        tol)


def check_capped_mutual_bound(geom, amb, c, sizes, cfg=None, tol=None):
    """Same left side with the ambient term replaced by the curvature-cap
    closed form (c/2)(s^2 - sum n_i^2); c is validated by sampling."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    sizes = tuple(int(n) for n in sizes)
    k, s, d = len(sizes), sum(sizes), geom.d
    if k < 2:
        raise BlockSizeError("need k >= 2 blocks")
    if s > d:
        raise BlockSizeError(f"sum of sizes {s} exceeds d = {d}")
    validate_sectional_bound(amb, c, seed=cfg.seed)
    lhs_iv = delta_m(geom.R, geom.d_coeffs, sizes, "+", cfg)
    if s < d:
        script = script_H(geom, s, cfg)
        mean_label = f"script_H({s})^2"
    else:
        script = float(np.linalg.norm(geom.H_D))
        mean_label = "norm_H_D_sq"
    cap_term = 0.5 * c * (s ** 2 - sum(n ** 2 for n in sizes))
    rhs = cap_term + (k - 1) / (2.0 * k) * script ** 2
    diag = _tuple_diagnostics(geom, amb, lhs_iv.attained, script)
    if lhs_iv.gap is not None:
        diag["certification_gap"] = float(lhs_iv.gap)
    prov = {"lhs": f"delta_m:+:{','.join(map(str, sizes))}",
            "rhs_mean_term": mean_label,
            "rhs_cap_term": f"(c/2)(s^2 - sum n_i^2), c = {c}"}
    return _make_report("capped_bound", geom, lhs_iv.value, rhs, diag, prov,
                        tol)


def check_chen_type_bound(geom, amb, c, sizes, cfg=None, tol=None):
    """Chen-type bound: delta_D(sizes) against
    d^2 (d+k-1-s) / (2 (d+k-s)) |H_D|^2 + (c/2)[d(d-1) - sum n_i(n_i-1)]."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    sizes = tuple(int(n) for n in sizes)
    k, s, d = len(sizes), sum(sizes), geom.d
    if s > d:
        raise BlockSizeError(f"sum of sizes {s} exceeds d = {d}")
    validate_sectional_bound(amb, c, seed=cfg.seed)
    cd = chen_delta(geom.R, geom.d_coeffs, sizes, cfg)
    lhs = cd.delta.value
    hd2 = float(geom.H_D @ geom.H_D)
    coeff = d ** 2 * (d + k - 1 - s) / (2.0 * (d + k - s))
    cap_term = 0.5 * c * (d * (d - 1) - sum(n * (n - 1) for n in sizes))
    rhs = coeff * hd2 + cap_term
    diag = {"norm_H_D_sq": hd2, "tau_D": cd.tau_D}
    if sizes and cd.delta.attained is not None:
        blocks = _blocks_in_frame_coords(geom, cd.delta.attained)
        diag["mixed_tg_residual"] = _mixed_tg_residual(geom, blocks)
    prov = {"lhs": f"chen_delta:{','.join(map(str, sizes))}",
            "rhs": f"d^2(d+k-1-s)/(2(d+k-s)) |H_D|^2 + (c/2)[d(d-1) - "
                   f"sum n_i(n_i-1)], c = {c}"}
    return _make_report("chen_type", geom, lhs, rhs, diag, prov, tol)


def check_min_mutual_bound(geom, amb, k, cfg=None, tol=None):
    """Aggregate minimum invariant delta_m^-(k) against
    (k-1)/(2k(k+1)) |H_D|^2 plus the ambient aggregate with k+1 blocks."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    d = geom.d
    if k < 2:
        raise BlockSizeError("need k >= 2")
    if k + 1 > d:
        raise BlockSizeError(f"equality analysis needs k+1 = {k + 1} blocks "
                             f"inside d = {d}")
    lhs_iv = delta_m_aggregate(geom.R, geom.d_coeffs, k, "-", cfg)
    amb_iv = ambient_delta_m_plus_aggregate(amb, k + 1, cfg)
    hd2 = float(geom.H_D @ geom.H_D)
    rhs = (k - 1) / (2.0 * k * (k + 1)) * hd2 + amb_iv.value

    # complete the attaining k-tuple (tangent coords) with its orthogonal
    # complement inside D
    tup = lhs_iv.attained
    W = tup.coeffs                       # (m, s), columns inside span(D)
    s = W.shape[1]
    diag = {}
    if s < d:
        basis, _ = np.linalg.qr(np.hstack([W, geom.d_coeffs.T]))
        comp = basis[:, s:d]
        sizes_ext = tup.block_sizes + (d - s,)
        ext = SubspaceTuple(dim=geom.m, block_sizes=sizes_ext,
                            coeffs=np.hstack([W, comp]))
    else:
        ext = tup
    blocks = _blocks_in_frame_coords(geom, ext)
    Hs = _block_mean_curvatures(geom, blocks)
    diag["mixed_tg_residual"] = _mixed_tg_residual(geom, blocks)
    diag["mean_curvature_spread"] = _mean_spread(Hs)
    # leave-one-out mutual curvatures against the reported minimum
    loo = []
    if ext.k >= 3:
        for drop in range(ext.k):
            keep = [b for i, b in enumerate(ext.blocks()) if i != drop]
            sizes_keep = tuple(b.shape[1] for b in keep)
            sub = SubspaceTuple(dim=geom.m, block_sizes=sizes_keep,
                                coeffs=np.hstack(keep))
            loo.append(mutual_curvature(geom.R, sub))
        diag["leave_one_out_excess"] = float(max(v - lhs_iv.value
                                                 for v in loo))
    if lhs_iv.gap is not None:
        diag["certification_gap"] = float(lhs_iv.gap)
    prov = {"lhs": f"delta_m_aggregate:-:{k} (sizes {lhs_iv.sizes})",
            "rhs": f"(k-1)/(2k(k+1)) |H_D|^2 + ambient "
                   f"delta_m_aggregate:+:{k + 1}"}
    return _make_report("min_mutual", geom, lhs_iv.value, rhs, diag, prov,
                        tol)


def check_mixed_scalar_bound(geom, amb, cfg=None, tol=None):
    """Mixed scalar curvature of (D, D-perp) against (1/4)|H|^2 plus the
    ambient (d, l) invariant; the mean term uses the full mean curvature."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    d, l = geom.d, geom.l
    lhs = mixed_scalar_curvature(geom.R, geom.d_coeffs, geom.dperp_coeffs)
    amb_iv = ambient_delta_m_plus(amb, (d, l), cfg)
    h_full_sq = float(geom.H @ geom.H)
    rhs = 0.25 * h_full_sq + amb_iv.value
    blocks = [geom.d_coeffs, geom.dperp_coeffs]
    diag = {
        "mixed_tg_residual": _mixed_tg_residual(geom, blocks),
        "mean_curvature_split_diff": float(np.linalg.norm(geom.H_D
                                                          - geom.H_Dperp)),
        "norm_H_sq": h_full_sq,
        "norm_H_D_sq": float(geom.H_D @ geom.H_D),
        "norm_H_Dperp_sq": float(geom.H_Dperp @ geom.H_Dperp),
        "total_reality_residual": geom.split.total_reality_residual,
    }
    if not amb.is_flat:
        blocks_ambient = [geom.d_frame, geom.dperp_frame]
        diag["ambient_gap"] = float(
            amb_iv.value - _ambient_mutual_of(amb, geom, blocks_ambient))
    prov = {"lhs": "mixed scalar curvature S_m(D, D_perp)",
            "rhs_mean_term": "(1/4) |H|^2 with the full mean curvature of M",
            "rhs_ambient_term": "0 (flat ambient)" if amb.is_flat
            else f"ambient delta_m:+:{d},{l}"}
    return _make_report("mixed_scalar", geom, lhs, rhs, diag, prov, tol)


def check_holomorphic_bound(geom, amb, k, cfg=None, tol=None):
    """delta_h^+(k) over D against the ambient holomorphic invariant plus
    (k-1)/(4k) * {script-H(2k)^2 if 2k < d, |H_D|^2 if 2k = d}."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    d = geom.d
    if not 2 <= k <= d / 2:
        raise BlockSizeError(f"need 2 <= k <= d/2, got k={k}, d={d}")
    lhs_iv = delta_h(geom.R_D, geom.phi_D, k, "+", cfg)
    amb_iv = ambient_delta_h_plus(amb, k, cfg)
    if 2 * k < d:
        script = script_H(geom, 2 * k, cfg)
        mean_label = f"script_H({2 * k})^2"
    else:
        script = float(np.linalg.norm(geom.H_D))
        mean_label = "norm_H_D_sq"
    rhs = amb_iv.value + (k - 1) / (4.0 * k) * script ** 2
    planes = lhs_iv.attained
    W = planes.frame_columns()
    tup = SubspaceTuple(dim=d, block_sizes=(2,) * k, coeffs=W)
    diag = _tuple_diagnostics(geom, amb, tup, script)
    if lhs_iv.gap is not None:
        diag["certification_gap"] = float(lhs_iv.gap)
    prov = {"lhs": f"delta_h:+:{k} on induced curvature over D",
            "rhs_mean_term": mean_label,
            "rhs_ambient_term": "0 (flat ambient)" if amb.is_flat
            else f"ambient delta_h:+:{k}"}
    return _make_report("holomorphic", geom, lhs_iv.value, rhs, diag, prov,
                        tol)


def check_flat_mean_bounds(geom, cfg=None, tol=None):
    """Flat-ambient mean-curvature bounds: for each s in 2..d the maximal
    normalized invariant over partitions of s must not exceed script-H(s)^2
    (|H_D|^2 when s = d).  Returns one report per s."""
    cfg = cfg or DEFAULT_OPT
    tol = tol or geom.tol
    _require_cr(geom)
    if not geom.ambient.is_flat:
        raise AmbientMismatch("flat-mean bounds are stated for the flat "
                              "ambient model")
    reports = []
    d = geom.d
    for s in range(2, d + 1):
        agg = normalized_delta_aggregate(geom.R, geom.d_coeffs, s, cfg)
        if s < d:
            script = script_H(geom, s, cfg)
            label = f"script_H({s})^2"
        else:
            script = float(np.linalg.norm(geom.H_D))
            label = "norm_H_D_sq"
        rhs = script ** 2
        diag = {"attained_sizes": agg.sizes}
        prov = {"lhs": f"max normalized delta_m over partitions of {s}",
                "rhs": label}
        rep = _make_report(f"flat_mean:{s}", geom, agg.value, rhs, diag,
                           prov, tol)
        reports.append(rep)
    return reports


@dataclass
class DMinimalityReport:
    max_norm_H_D: float
    witnesses: dict
    is_d_minimal: bool
    contradiction: bool


def d_minimality_scan(geoms, cfg=None, tol=None):
    """Sample-wise non-existence check: a D-minimal chart must not carry a
    positive mutual-curvature witness.  CONTRADICTION is a consistency
    alarm for the whole pipeline and must never fire on valid inputs."""
    cfg = cfg or DEFAULT_OPT
    geoms = list(geoms)
    if not geoms:
        raise ValueError("need at least one sampled point")
    tol = tol or geoms[0].tol
    if not geoms[0].ambient.is_flat:
        raise AmbientMismatch("D-minimality corollaries are stated in the "
                              "flat ambient")
    _require_cr(geoms[0])
    d = geoms[0].d
    max_hd = max(float(np.linalg.norm(g.H_D)) for g in geoms)

    w_full = -np.inf
    for g in geoms:
        for sizes in partitions(d):
            if len(sizes) < 2:
                continue
            iv = delta_m(g.R, g.d_coeffs, sizes, "+", cfg)
            w_full = max(w_full, iv.value)
    w_min = -np.inf
    for g in geoms:
        for k in range(2, min(3, d) + 1):
            iv = delta_m_aggregate(g.R, g.d_coeffs, k, "-", cfg)
            w_min = max(w_min, iv.value)
    witnesses = {"max_mutual_full_split": float(w_full),
                 "max_min_aggregate": float(w_min)}
    if d >= 4:
        w_hol = max(delta_h(g.R_D, g.phi_D, d // 2, "+", cfg).value
                    for g in geoms)
        witnesses["max_holomorphic"] = float(w_hol)

    is_min = max_hd <= tol.eq
    contradiction = is_min and any(v > tol.eq for v in witnesses.values())
    return DMinimalityReport(max_norm_H_D=max_hd, witnesses=witnesses,
                             is_d_minimal=is_min, contradiction=contradiction)
