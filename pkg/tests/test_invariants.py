import numpy as np
import pytest

from crcurv import algebra as alg
from crcurv.catalog import flat_torus, sphere_in_Cq, totally_geodesic_plane
from crcurv.errors import BlockSizeError, NonOrthonormalFrame, NotJInvariant
from crcurv.geometry import point_geometry
from crcurv.invariants import (bisectional_curvature, chen_delta, delta_h,
                               delta_m, delta_m_aggregate,
                               mixed_scalar_curvature, mutual_curvature,
                               normalized_delta, normalized_delta_aggregate,
                               partitions, s_h, script_H, tau_subspace)
from crcurv.optim import (OptimizerConfig, SubspaceTuple, project_plane_tuple,
                          random_subspace_tuple)

from helpers import psd_bianchi, random_orthogonal, unit_bianchi, unit_kahler

CFG = OptimizerConfig(restarts=6, seed=0, certify_samples=0)
CFG10 = OptimizerConfig(restarts=10, seed=0, certify_samples=0)


def _sphere_geom(d, l, q, seed=1):
    chart, amb = sphere_in_Cq(d, l, q)
    u = chart.sample_points(1, seed=seed)[0]
    return point_geometry(amb, chart, u)


def _random_tuple_on(rng, d, sizes):
    return random_subspace_tuple(d, sizes, rng)


# ---------------------------------------------------------------------------
# tau and mutual curvature

def test_tau_full_sphere():
    for (d, l, q), expect in [((2, 1, 2), 6.0), ((4, 1, 3), 20.0)]:
        geom = _sphere_geom(d, l, q)
        m = d + l
        tau = tau_subspace(geom.R, np.eye(m))
        assert tau == pytest.approx(expect, abs=1e-8)  # m(m-1) at curvature 1


def test_tau_one_dimensional_zero():
    rng = np.random.default_rng(0)
    R = unit_bianchi(4, rng)
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    assert tau_subspace(R, v[None, :]) == 0.0


def test_tau_nonorthonormal_rejected():
    R = unit_bianchi(3, np.random.default_rng(1))
    with pytest.raises(NonOrthonormalFrame):
        tau_subspace(R, np.array([[1.0, 0, 0], [1.0, 0, 0]]))


def test_decomposition_identity():
    # tau(V) = 2 S_m(V_1..V_k) + sum tau(V_i), random tensors and tuples
    rng = np.random.default_rng(2)
    for d in (4, 5, 6):
        for sizes in [(1, 1), (1, 2), (2, 2), (1, 1, 2), (2, 2, 2)]:
            if sum(sizes) > d or len(sizes) < 2:
                continue
            R = unit_bianchi(d, rng)
            tup = _random_tuple_on(rng, d, sizes)
            sm = mutual_curvature(R, tup)
            tau_V = tau_subspace(R, tup.coeffs.T)
            tau_blocks = sum(tau_subspace(R, b.T) for b in tup.blocks())
            assert abs(tau_V - (2 * sm + tau_blocks)) <= 1e-10


def test_all_one_dimensional_blocks():
    rng = np.random.default_rng(3)
    R = unit_bianchi(5, rng)
    tup = _random_tuple_on(rng, 5, (1, 1, 1, 1))
    assert abs(2 * mutual_curvature(R, tup)
               - tau_subspace(R, tup.coeffs.T)) <= 1e-10


def test_mutual_requires_two_blocks():
    R = unit_bianchi(4, np.random.default_rng(4))
    tup = random_subspace_tuple(4, (2,), 0)
    with pytest.raises(BlockSizeError):
        mutual_curvature(R, tup)


def test_sphere_mutual_pair_is_one():
    geom = _sphere_geom(2, 1, 2)
    tup = SubspaceTuple(dim=2, block_sizes=(1, 1), coeffs=np.eye(2))
    assert mutual_curvature(geom.R_D, tup) == pytest.approx(1.0, abs=1e-9)


def test_flat_chart_mutual_zero():
    chart, amb = flat_torus(2)
    geom = point_geometry(amb, chart, np.array([0.2, 0.4, 1.0]))
    tup = SubspaceTuple(dim=3, block_sizes=(1, 1), coeffs=np.eye(3)[:, :2])
    assert abs(mutual_curvature(geom.R, tup)) <= 1e-12


# ---------------------------------------------------------------------------
# mixed scalar curvature

def test_mixed_scalar_spheres():
    geom = _sphere_geom(2, 1, 2)
    val = mixed_scalar_curvature(geom.R, geom.d_coeffs, geom.dperp_coeffs)
    assert val == pytest.approx(2.0, abs=1e-8)
    geom2 = _sphere_geom(2, 2, 3)
    val2 = mixed_scalar_curvature(geom2.R, geom2.d_coeffs, geom2.dperp_coeffs)
    assert val2 == pytest.approx(4.0, abs=1e-8)


def test_mixed_scalar_flat_zero():
    chart, amb = flat_torus(2)
    geom = point_geometry(amb, chart, np.array([0.0, 0.0, 2.0]))
    val = mixed_scalar_curvature(geom.R, geom.d_coeffs, geom.dperp_coeffs)
    assert abs(val) <= 1e-12


# ---------------------------------------------------------------------------
# bisectional curvature and S_h

def test_bisectional_flat_zero():
    phi = alg.canonical_complex_structure(4)
    R = np.zeros((4,) * 4)
    assert bisectional_curvature(R, phi, np.eye(4)[:, 0],
                                 np.eye(4)[:, 2]) == 0.0


def test_bisectional_model_values():
    c = 1.1
    phi = alg.canonical_complex_structure(4)
    R = alg.const_holomorphic_tensor(4, c)
    e1, e3 = np.eye(4)[:, 0], np.eye(4)[:, 2]
    assert bisectional_curvature(R, phi, e1, e3) == pytest.approx(2 * c)
    assert bisectional_curvature(R, phi, e1, e1) == pytest.approx(4 * c)


def test_bisectional_inplane_rotation_invariance():
    rng = np.random.default_rng(5)
    phi = alg.canonical_complex_structure(6)
    for _ in range(20):
        R = unit_bianchi(6, rng)
        X, Y = project_plane_tuple(rng.standard_normal((6, 2)), phi)
        x, y = X[:, 0], X[:, 1]
        base = bisectional_curvature(R, phi, x, y)
        t, r = rng.uniform(0, 2 * np.pi, 2)
        x2 = np.cos(t) * x + np.sin(t) * (phi @ x)
        y2 = np.cos(r) * y + np.sin(r) * (phi @ y)
        assert abs(bisectional_curvature(R, phi, x2, y2) - base) <= 1e-10


def test_bisectional_equals_literal_on_j_invariant_tensors():
    # on tensors with R(JX,JY,.,.) = R(X,Y,.,.) the plane functional
    # reproduces the literal quadruple R4(X, phiX, phiY, Y) and the
    # two-sectional expansion K(X,Y) + K(X,phiY)
    rng = np.random.default_rng(6)
    phi = alg.canonical_complex_structure(6)
    for _ in range(20):
        R = unit_kahler(6, rng)
        X, Y = project_plane_tuple(rng.standard_normal((6, 2)), phi)
        x, y = X[:, 0], X[:, 1]
        px, py = phi @ x, phi @ y
        val = bisectional_curvature(R, phi, x, y)
        literal = float(np.einsum("abce,a,b,c,e->", R, x, px, py, y))
        expansion = (alg.sectional(R, x, y) + alg.sectional(R, x, py))
        assert abs(val - literal) <= 1e-10
        assert abs(val - expansion) <= 1e-10


def test_bisectional_rejects_non_invariant_plane():
    phi = np.zeros((4, 4))
    phi[:2, :2] = alg.canonical_complex_structure(2)  # rank-deficient phi
    R = np.zeros((4,) * 4)
    with pytest.raises(NotJInvariant):
        bisectional_curvature(R, phi, np.eye(4)[:, 2], np.eye(4)[:, 0])


def test_sh_halves_mutual_curvature():
    rng = np.random.default_rng(7)
    for d, k in [(4, 2), (6, 2), (6, 3)]:
        phi = alg.canonical_complex_structure(d)
        for _ in range(10):
            R = unit_bianchi(d, rng)
            X, Y = project_plane_tuple(rng.standard_normal((d, k)), phi)
            sh = s_h(R, phi, X)
            W = np.empty((d, 2 * k))
            W[:, 0::2], W[:, 1::2] = X, Y
            tup = SubspaceTuple(dim=d, block_sizes=(2,) * k, coeffs=W)
            sm = mutual_curvature(R, tup)
            assert abs(2 * sh - sm) <= 1e-10


def test_sh_model_value():
    c = 0.6
    phi = alg.canonical_complex_structure(4)
    R = alg.const_holomorphic_tensor(4, c)
    X = np.eye(4)[:, [0, 2]]
    assert s_h(R, phi, X) == pytest.approx(2 * c, abs=1e-12)
    assert abs(s_h(np.zeros((4,) * 4), phi, X)) == 0.0


# ---------------------------------------------------------------------------
# Chen-type invariants

def test_chen_k0_is_half_tau():
    geom = _sphere_geom(2, 1, 2)
    cd = chen_delta(geom.R, geom.d_coeffs, (), CFG)
    assert cd.tau_D == pytest.approx(2.0, abs=1e-9)  # d(d-1) with d=2
    assert cd.delta.value == pytest.approx(1.0, abs=1e-9)
    assert cd.delta_hat.value == pytest.approx(1.0, abs=1e-9)


def test_chen_constant_curvature_closed_form():
    d = 5
    R = alg.constant_curvature_tensor(d, 1.0)
    eye = np.eye(d)
    for sizes in [(2, 3), (1, 4), (1, 2, 2)]:
        cd = chen_delta(R, eye, sizes, CFG)
        expect = 0.5 * (d * (d - 1) - sum(n * (n - 1) for n in sizes))
        assert cd.delta.value == pytest.approx(expect, abs=1e-8)
        assert cd.delta_hat.value == pytest.approx(expect, abs=1e-8)


def test_chen_hat_below_delta():
    rng = np.random.default_rng(8)
    for _ in range(5):
        R = unit_bianchi(4, rng)
        cd = chen_delta(R, np.eye(4), (1, 2), CFG)
        assert cd.delta_hat.value <= cd.delta.value + 1e-10


# ---------------------------------------------------------------------------
# mutual curvature invariants

def test_delta_m_flat_zero():
    iv = delta_m(np.zeros((4,) * 4), np.eye(4), (1, 1), "+", CFG)
    assert iv.value == 0.0


def test_delta_m_sandwich():
    rng = np.random.default_rng(9)
    for d in (4, 5):
        R = unit_bianchi(d, rng)
        eye = np.eye(d)
        c = delta_m(R, eye, (1, 1), "-", CFG10).value
        C = delta_m(R, eye, (1, 1), "+", CFG10).value
        for sizes in [(1, 2), (2, 2), (1, 1, 2)]:
            if sum(sizes) > d:
                continue
            pairs = sum(a * b for i, a in enumerate(sizes)
                        for b in sizes[i + 1:])
            lo = delta_m(R, eye, sizes, "-", CFG10).value
            hi = delta_m(R, eye, sizes, "+", CFG10).value
            tol = 1e-3 * (1 + pairs)
            assert c * pairs - tol <= lo <= hi <= C * pairs + tol


def test_delta_m_full_split_identities():
    rng = np.random.default_rng(10)
    for d, sizes in [(4, (1, 3)), (4, (2, 2)), (5, (1, 2, 2))]:
        R = unit_bianchi(d, rng)
        eye = np.eye(d)
        cd = chen_delta(R, eye, sizes, CFG10)
        hi = delta_m(R, eye, sizes, "+", CFG10).value
        lo = delta_m(R, eye, sizes, "-", CFG10).value
        assert abs(cd.delta.value - hi) <= 1e-3
        assert abs(cd.delta_hat.value - lo) <= 1e-3


def test_delta_m_block_size_errors():
    R = np.zeros((3,) * 4)
    with pytest.raises(BlockSizeError):
        delta_m(R, np.eye(3), (2,), "+", CFG)
    with pytest.raises(BlockSizeError):
        delta_m(R, np.eye(3), (2, 2), "+", CFG)


def test_sign_flip_duality():
    rng = np.random.default_rng(11)
    R = unit_bianchi(4, rng)
    eye = np.eye(4)
    for sizes in [(1, 1), (1, 2)]:
        lo = delta_m(R, eye, sizes, "-", CFG).value
        hi_neg = delta_m(-R, eye, sizes, "+", CFG).value
        assert abs(lo + hi_neg) <= 1e-10


def test_aggregate_constant_curvature():
    R = alg.constant_curvature_tensor(4, 1.0)
    iv = delta_m_aggregate(R, np.eye(4), 2, "+", CFG)
    assert iv.value == pytest.approx(4.0, abs=1e-8)  # (2,2) wins with 4
    assert tuple(iv.sizes) == (2, 2)


def test_aggregate_flat_and_ordering():
    assert delta_m_aggregate(np.zeros((4,) * 4), np.eye(4), 2, "+",
                             CFG).value == 0.0
    rng = np.random.default_rng(12)
    R = unit_bianchi(5, rng)
    lo = delta_m_aggregate(R, np.eye(5), 2, "-", CFG10).value
    hi = delta_m_aggregate(R, np.eye(5), 2, "+", CFG10).value
    assert lo <= hi + 1e-10


def test_proposition_chain():
    # delta_m^+ >= delta_D(sizes) - delta_D(s) and the hat-side mirror
    rng = np.random.default_rng(13)
    for d in (4, 5):
        R = unit_bianchi(d, rng)
        eye = np.eye(d)
        for sizes in [(1, 1), (1, 2)]:
            s = sum(sizes)
            if s >= d:
                continue
            cd_sizes = chen_delta(R, eye, sizes, CFG10)
            cd_s = chen_delta(R, eye, (s,), CFG10)
            hi = delta_m(R, eye, sizes, "+", CFG10).value
            lo = delta_m(R, eye, sizes, "-", CFG10).value
            assert hi >= cd_sizes.delta.value - cd_s.delta.value - 2e-3
            assert lo <= (cd_sizes.delta_hat.value
                          - cd_s.delta_hat.value) + 2e-3


def test_corollary_ordering_signed_curvature():
    # With the intra-block tau (the reading that makes the decomposition
    # identity exact), only one outer comparison per curvature sign is an
    # identity for partial splits: nonneg -> delta_m^+ <= delta, nonpos ->
    # delta_hat <= delta_m^-; a 1-dim block PSD example breaks the other
    # (tau of a line vanishes, so delta_hat = tau_D / 2 exceeds min K).
    # Full splits carry the entire chain.
    rng = np.random.default_rng(14)
    for flip in (1.0, -1.0):
        R = flip * psd_bianchi(4, rng)
        eye = np.eye(4)
        for sizes in [(1, 1), (1, 2), (2, 2), (1, 1, 2)]:
            cd = chen_delta(R, eye, sizes, CFG10)
            lo = delta_m(R, eye, sizes, "-", CFG10).value
            hi = delta_m(R, eye, sizes, "+", CFG10).value
            assert lo <= hi + 1e-9
            if sum(sizes) == 4:
                assert abs(cd.delta_hat.value - lo) <= 1e-3
                assert abs(cd.delta.value - hi) <= 1e-3
            elif flip > 0:
                assert hi <= cd.delta.value + 2e-3
            else:
                assert cd.delta_hat.value <= lo + 2e-3


def test_ordering_counterexample_for_partial_splits():
    # documents why the four-term chain cannot be asserted at sum < d:
    # for (1,1) blocks delta_hat equals tau_D / 2, which dominates the
    # minimal sectional curvature of any nonneg-curvature tensor whose
    # total curvature is not concentrated in one plane
    rng = np.random.default_rng(14)
    R = psd_bianchi(4, rng)
    eye = np.eye(4)
    cd = chen_delta(R, eye, (1, 1), CFG10)
    lo = delta_m(R, eye, (1, 1), "-", CFG10).value
    assert cd.delta_hat.value == pytest.approx(cd.tau_D / 2, abs=1e-12)
    assert cd.delta_hat.value > lo + 0.5


# ---------------------------------------------------------------------------
# holomorphic invariants

def test_delta_h_flat_zero():
    phi = alg.canonical_complex_structure(4)
    iv = delta_h(np.zeros((4,) * 4), phi, 2, "+", CFG)
    assert abs(iv.value) <= 1e-12


def test_delta_h_model_value():
    c = 0.8
    phi = alg.canonical_complex_structure(4)
    R = alg.const_holomorphic_tensor(4, c)
    iv = delta_h(R, phi, 2, "+", CFG)
    assert iv.value == pytest.approx(2 * c, abs=1e-8)


def test_delta_h_corollary_bound():
    # 2 delta_h^+(k) <= delta_m^+(2,...,2) for any tensor
    rng = np.random.default_rng(15)
    for d, k in [(4, 2), (6, 2), (6, 3)]:
        phi = alg.canonical_complex_structure(d)
        R = unit_bianchi(d, rng)
        hi_h = delta_h(R, phi, k, "+", CFG10).value
        hi_m = delta_m(R, np.eye(d), (2,) * k, "+", CFG10).value
        assert 2 * hi_h <= hi_m + 2e-3
        lo_h = delta_h(R, phi, k, "-", CFG10).value
        lo_m = delta_m(R, np.eye(d), (2,) * k, "-", CFG10).value
        assert 2 * lo_h >= lo_m - 2e-3


def test_delta_h_block_size_error():
    phi = alg.canonical_complex_structure(4)
    with pytest.raises(BlockSizeError):
        delta_h(np.zeros((4,) * 4), phi, 3, "+", CFG)


# ---------------------------------------------------------------------------
# script H and normalized invariants

def test_script_H_sphere_values():
    geom = _sphere_geom(2, 1, 2)
    assert script_H(geom, 2, CFG) == pytest.approx(2.0, abs=1e-9)
    assert script_H(geom, 1, CFG) == pytest.approx(1.0, abs=1e-8)


def test_script_H_umbilic_is_s():
    geom = _sphere_geom(4, 1, 3)
    for s in (1, 2, 3, 4):
        assert script_H(geom, s, CFG) == pytest.approx(float(s), abs=1e-8)


def test_script_H_totally_geodesic_zero():
    chart, amb = totally_geodesic_plane(2, 1, 2)
    geom = point_geometry(amb, chart, np.array([0.1, 0.2, 0.3]))
    assert script_H(geom, 1, CFG) <= 1e-10
    assert script_H(geom, 2, CFG) <= 1e-12


def test_normalized_delta_constant():
    R = alg.constant_curvature_tensor(4, 1.0)
    assert normalized_delta(R, np.eye(4), (1, 1), CFG) == pytest.approx(
        4.0, abs=1e-8)
    assert normalized_delta(np.zeros((4,) * 4), np.eye(4), (1, 1),
                            CFG) == 0.0


def test_normalized_aggregate_dominates():
    rng = np.random.default_rng(16)
    R = unit_bianchi(4, rng)
    agg = normalized_delta_aggregate(R, np.eye(4), 4, CFG10)
    for sizes in partitions(4):
        if len(sizes) < 2:
            continue
        assert agg.value >= normalized_delta(R, np.eye(4), sizes,
                                             CFG10) - 1e-3


def test_partitions_enumeration():
    assert set(partitions(4)) == {(4,), (1, 3), (2, 2), (1, 1, 2),
                                  (1, 1, 1, 1)}
    assert set(partitions(None, k=2, maximum=4)) == {
        (1, 1), (1, 2), (1, 3), (2, 2)}
