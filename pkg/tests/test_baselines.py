import math

import numpy as np
import pytest

from binarycs.baselines import (BasisPursuitConfig, ExpanderDecodeConfig, basis_pursuit_decode,
                                expander_decode)
from binarycs.baselines.expander import default_max_iters
from binarycs.harness import gen_sparse
from binarycs.matrix import DeVoreMatrix
from binarycs.recovery import decode_exact
from binarycs.sparse import SparseVector


# -- expander ---------------------------------------------------------------

def test_expander_config():
    assert ExpanderDecodeConfig().required_votes(89) == math.ceil(89 / 2)
    assert ExpanderDecodeConfig(0.25).required_votes(8) == 4
    for eps in (0.0, 0.3):
        with pytest.raises(ValueError):
            ExpanderDecodeConfig(eps)
    assert default_max_iters(6, 20_000) == math.ceil(60 * math.log2(20_000))


def test_expander_zero():
    mat = DeVoreMatrix(11, 3)
    res = expander_decode(mat, np.zeros(mat.m))
    assert res.converged and res.iterations == 0 and res.x.nnz == 0


def test_expander_single_spike_one_iteration():
    mat = DeVoreMatrix(11, 3)
    for j in (0, 17, mat.n - 1):
        x = SparseVector(mat.n, [j], [-4.25])
        res = expander_decode(mat, mat.encode(x))
        assert res.converged and res.iterations == 1 and res.x == x


@pytest.mark.parametrize("q, k", [(17, 1), (29, 2), (41, 3), (89, 6)])
def test_expander_exact_in_guaranteed_regime(q, k):
    assert q >= 8 * (2 * k - 1)
    mat = DeVoreMatrix(q, 3, min(q**3, 20_000))
    for t in range(10):
        x = gen_sparse(mat.n, k, np.random.default_rng([q, t]))
        res = expander_decode(mat, mat.encode(x))
        assert res.converged, res.reason
        assert np.allclose(res.x.to_dense(), x.to_dense(), atol=1e-9)
        assert res.x.support == x.support


def test_expander_reports_non_convergence():
    mat = DeVoreMatrix(7, 3)
    y = np.arange(1, mat.m + 1, dtype=float)
    res = expander_decode(mat, y)
    assert not res.converged and res.reason and res.residual_nnz > 0


def test_expander_respects_iteration_cap():
    mat = DeVoreMatrix(29, 3, 2000)
    x = gen_sparse(mat.n, 3, np.random.default_rng(3))
    res = expander_decode(mat, mat.encode(x), ExpanderDecodeConfig(max_iters=1))
    assert not res.converged and res.iterations == 1


# -- basis pursuit ----------------------------------------------------------

def test_bp_config_validation():
    with pytest.raises(ValueError):
        BasisPursuitConfig(radius=-1)
    with pytest.raises(ValueError):
        BasisPursuitConfig(max_iters=0)


def test_bp_zero():
    mat = DeVoreMatrix(7, 3)
    res = basis_pursuit_decode(mat, np.zeros(mat.m))
    assert res.converged and not np.any(res.x)


def test_bp_shape_check():
    mat = DeVoreMatrix(7, 3)
    with pytest.raises(ValueError):
        basis_pursuit_decode(mat, np.zeros(mat.m - 1))


def test_bp_agrees_with_new_decoder():
    mat = DeVoreMatrix(29, 3, 20_000)
    for t in range(3):
        x = gen_sparse(mat.n, 6, np.random.default_rng([7, t]))
        y = mat.encode(x)
        ref = decode_exact(mat, y).x.to_dense()
        res = basis_pursuit_decode(mat, y)
        assert res.converged
        assert np.linalg.norm(res.x - ref) <= 1e-4 * np.linalg.norm(ref)


def test_bp_feasible_and_l1_not_above_truth():
    mat = DeVoreMatrix(13, 3)
    rng = np.random.default_rng(0)
    # denser than the guarantee; the l1 minimiser need not be x but must be feasible and no larger
    x = gen_sparse(mat.n, 12, rng)
    y = mat.encode(x)
    res = basis_pursuit_decode(mat, y, BasisPursuitConfig(abstol=1e-9, reltol=1e-8))
    assert np.linalg.norm(mat.encode(res.x) - y) <= 1e-4 * np.linalg.norm(y)
    assert res.l1_norm <= np.abs(x.values).sum() + 1e-4


def _dense(mat):
    return mat.to_sparse().toarray()


@pytest.fixture(scope="module")
def small_instance():
    mat = DeVoreMatrix(7, 3)
    rng = np.random.default_rng(11)
    x = gen_sparse(mat.n, 10, rng)
    y = mat.encode(x) + 0.05 * rng.standard_normal(mat.m)
    return mat, y


def test_bp_equality_matches_cvxpy(small_instance):
    cp = pytest.importorskip("cvxpy")
    mat, y = small_instance
    a = _dense(mat)
    # noisy y may leave range(A); the oracle and the solver both target its projection
    y_range = a @ np.linalg.lstsq(a, y, rcond=None)[0]
    v = cp.Variable(mat.n)
    prob = cp.Problem(cp.Minimize(cp.norm1(v)), [a @ v == y_range])
    prob.solve()
    res = basis_pursuit_decode(mat, y_range, BasisPursuitConfig(abstol=1e-10, reltol=1e-9))
    assert np.linalg.norm(a @ res.x - y_range) <= 1e-5 * np.linalg.norm(y_range)
    assert res.l1_norm == pytest.approx(prob.value, rel=1e-5)


@pytest.mark.parametrize("slack", [1.5, 5.0])
def test_bp_ball_matches_cvxpy(small_instance, slack):
    cp = pytest.importorskip("cvxpy")
    mat, y = small_instance
    a = _dense(mat)
    # the ball must reach range(A), which has codimension q - 1
    dist = np.linalg.norm(y - a @ np.linalg.lstsq(a, y, rcond=None)[0])
    radius = slack * dist
    v = cp.Variable(mat.n)
    prob = cp.Problem(cp.Minimize(cp.norm1(v)), [cp.norm2(a @ v - y) <= radius])
    prob.solve()
    res = basis_pursuit_decode(mat, y, BasisPursuitConfig(abstol=1e-9, reltol=1e-8, radius=radius))
    assert res.converged
    assert np.linalg.norm(a @ res.x - y) <= radius * (1 + 1e-4)
    assert res.l1_norm == pytest.approx(prob.value, rel=1e-4)


@pytest.mark.slow
def test_bp_shot_noise_error_matches_published_scale():
    from _reference import BP_NOISE_ERRORS
    from binarycs.harness import ExperimentSpec, run_experiment

    alpha, published = 1e-3, BP_NOISE_ERRORS[1e-3]
    res = run_experiment(ExperimentSpec(n=20_000, k=6, M=6, alphas=[alpha], methods=["bp", "new"],
                                        trials=10, seed=31))
    bp = next(s for s in res.summary if s.method == "bp")
    new = next(s for s in res.summary if s.method == "new")
    assert new.mean_l2_err == 0.0
    assert published / 2 <= bp.mean_l2_err <= 2 * published
