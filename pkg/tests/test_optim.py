import numpy as np
import pytest

from crcurv import algebra as alg
from crcurv.errors import BlockSizeError, FeasibilityError, ObjectiveError
from crcurv.invariants import _MutualObjective, _PlaneSumObjective
from crcurv.optim import (OptimizerConfig, brute_force_oracle,
                          brute_force_plane_oracle, maximize_over_flags,
                          maximize_over_plane_tuples, project_plane_tuple,
                          random_subspace_tuple)

from helpers import random_orthogonal, unit_bianchi, unit_kahler

CFG = OptimizerConfig(restarts=6, seed=0, certify_samples=0)


def test_random_tuple_deterministic():
    t1 = random_subspace_tuple(4, (2, 2), seed=0)
    t2 = random_subspace_tuple(4, (2, 2), seed=0)
    assert np.array_equal(t1.coeffs, t2.coeffs)
    assert t1.orthonormality_residual() <= 1e-12


def test_random_tuple_block_size_error():
    with pytest.raises(BlockSizeError):
        random_subspace_tuple(3, (2, 2), seed=0)
    with pytest.raises(BlockSizeError):
        random_subspace_tuple(3, (0, 1), seed=0)


def test_haar_moment_sanity():
    # <x, y>^2 of independent Haar unit vectors averages 1/d; consecutive
    # draws provide the independent pairs
    d = 3
    rng = np.random.default_rng(42)
    vals = []
    for _ in range(5000):
        x = random_subspace_tuple(d, (1, 1), rng).coeffs[:, 0]
        y = random_subspace_tuple(d, (1, 1), rng).coeffs[:, 0]
        vals.append((x @ y) ** 2)
    assert abs(np.mean(vals) - 1.0 / d) < 0.02


def test_constant_curvature_max_closed_form():
    # every tuple attains c * sum_{i<j} n_i n_j on the constant model
    d = 5
    for c in (1.0, -0.7):
        R = alg.constant_curvature_tensor(d, c)
        for sizes in [(1, 1), (1, 2), (2, 3)]:
            obj = _MutualObjective(R, sizes)
            res = maximize_over_flags(obj, d, sizes, CFG)
            n = list(sizes)
            expect = c * sum(n[i] * n[j] for i in range(len(n))
                             for j in range(i + 1, len(n)))
            if c < 0:
                # max of a constant landscape still equals the closed form
                assert res.value == pytest.approx(expect, abs=1e-9)
            else:
                assert res.value == pytest.approx(expect, abs=1e-9)


def test_zero_tensor_short_circuit():
    obj = _MutualObjective(np.zeros((4,) * 4), (1, 1))
    res = maximize_over_flags(obj, 4, (1, 1),
                              OptimizerConfig(restarts=1, certify_samples=0))
    assert res.value == 0.0
    assert res.restarts == 1


def test_optimizer_matches_oracle_d4():
    rng = np.random.default_rng(0)
    for trial in range(3):
        R = unit_bianchi(4, rng)
        obj = _MutualObjective(R, (1, 1))
        res = maximize_over_flags(obj, 4, (1, 1),
                                  OptimizerConfig(restarts=10, seed=trial))
        hi, lo = brute_force_oracle(obj, 4, (1, 1), 100_000, trial,
                                    batch=obj.batch)
        assert res.value >= hi - 1e-9        # never below any sample
        assert res.value - hi <= 2e-2        # sampling resolution bound


def test_restart_doubling_monotone():
    rng = np.random.default_rng(1)
    R = unit_bianchi(5, rng)
    obj = _MutualObjective(R, (1, 2))
    vals = []
    for restarts in (2, 4, 8, 16):
        res = maximize_over_flags(
            obj, 5, (1, 2), OptimizerConfig(restarts=restarts, seed=3))
        vals.append(res.value)
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_feasibility_preserved():
    rng = np.random.default_rng(2)
    R = unit_bianchi(5, rng)
    obj = _MutualObjective(R, (2, 2))
    res = maximize_over_flags(obj, 5, (2, 2), CFG)
    assert res.argmax.orthonormality_residual() <= 1e-10


def test_within_block_rotation_invariance():
    rng = np.random.default_rng(3)
    R = unit_bianchi(5, rng)
    obj = _MutualObjective(R, (2, 3))
    W = random_subspace_tuple(5, (2, 3), 7).coeffs
    base = obj(W)
    Q1 = random_orthogonal(2, rng)
    Q2 = random_orthogonal(3, rng)
    W2 = W.copy()
    W2[:, :2] = W[:, :2] @ Q1
    W2[:, 2:] = W[:, 2:] @ Q2
    assert abs(obj(W2) - base) <= 1e-9


def test_objective_error_on_nan():
    def bad(W):
        return float("nan")
    with pytest.raises(ObjectiveError):
        maximize_over_flags(bad, 3, (1,),
                            OptimizerConfig(restarts=1, certify_samples=0))


def test_non_quartic_objective_fallback():
    # |first column|_4 norm is not quartic-affine along rotations once
    # combined with abs; the optimizer must fall back and still ascend
    def odd(W):
        return float(np.abs(W[:, 0] ** 3).sum())
    res = maximize_over_flags(odd, 3, (1,),
                              OptimizerConfig(restarts=4, seed=0,
                                              certify_samples=0))
    # max of sum |x|^3 over unit vectors is 1 (coordinate axis)
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_oracle_closed_form_constant():
    d = 4
    R = alg.constant_curvature_tensor(d, 0.5)
    obj = _MutualObjective(R, (1, 2))
    hi, lo = brute_force_oracle(obj, d, (1, 2), 10_000, 0, batch=obj.batch)
    assert hi == pytest.approx(1.0, abs=1e-9)
    assert lo == pytest.approx(1.0, abs=1e-9)


def test_oracle_zero():
    obj = _MutualObjective(np.zeros((3,) * 4), (1, 1))
    hi, lo = brute_force_oracle(obj, 3, (1, 1), 5000, 0, batch=obj.batch)
    assert hi == 0.0 and lo == 0.0


# ---------------------------------------------------------------------------
# plane tuples

def test_plane_projection_feasible():
    rng = np.random.default_rng(4)
    phi = alg.canonical_complex_structure(6)
    X, Y = project_plane_tuple(rng.standard_normal((6, 3)), phi)
    W = np.empty((6, 6))
    W[:, 0::2] = X
    W[:, 1::2] = Y
    assert np.abs(W.T @ W - np.eye(6)).max() <= 1e-10


def test_plane_projection_degenerate():
    phi = alg.canonical_complex_structure(4)
    X = np.zeros((4, 1))
    with pytest.raises(FeasibilityError):
        project_plane_tuple(X, phi)


def test_flat_plane_invariants_zero():
    phi = alg.canonical_complex_structure(4)
    obj = _PlaneSumObjective(np.zeros((4,) * 4))
    res = maximize_over_plane_tuples(obj, 4, 2, phi, CFG)
    assert res.value == pytest.approx(0.0, abs=1e-12)


def test_const_holomorphic_plane_max():
    # orthogonal J-planes of the model have bisectional curvature 2c
    c = 0.9
    phi = alg.canonical_complex_structure(4)
    R = alg.const_holomorphic_tensor(4, c)
    obj = _PlaneSumObjective(R)
    res = maximize_over_plane_tuples(obj, 4, 2, phi, CFG)
    assert res.value == pytest.approx(2 * c, abs=1e-8)


def test_plane_optimizer_matches_oracle():
    rng = np.random.default_rng(5)
    phi = alg.canonical_complex_structure(4)
    for trial in range(3):
        R = unit_kahler(4, rng)
        obj = _PlaneSumObjective(R)
        res = maximize_over_plane_tuples(
            obj, 4, 2, phi, OptimizerConfig(restarts=8, seed=trial))
        hi, lo = brute_force_plane_oracle(obj, 4, 2, phi, 20_000, trial,
                                          batch=obj.batch)
        assert res.value >= hi - 1e-9
        assert res.value - hi <= 1e-3  # 2-dim feasible set: dense sampling


def test_plane_tuple_feasibility_residual():
    rng = np.random.default_rng(6)
    phi = alg.canonical_complex_structure(6)
    R = unit_kahler(6, rng)
    obj = _PlaneSumObjective(R)
    res = maximize_over_plane_tuples(obj, 6, 2, phi,
                                     OptimizerConfig(restarts=3, seed=0,
                                                     certify_samples=0))
    assert res.argmax.orthonormality_residual() <= 1e-10
    # planes are phi-invariant: phi X stays inside the plane pair
    X, Y = res.argmax.vectors, res.argmax.partners
    for i in range(2):
        px = phi @ X[:, i]
        proj = (px @ X[:, i]) * X[:, i] + (px @ Y[:, i]) * Y[:, i]
        assert np.linalg.norm(px - proj) <= 1e-8
