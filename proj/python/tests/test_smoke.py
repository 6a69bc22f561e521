import json
import math

import numpy as np
import pytest

import vrjp

TRIANGLE = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])


def test_density_reference_values():
    assert vrjp.density(np.zeros((1, 1)), np.array([1.0])) == pytest.approx(math.exp(-1) / math.sqrt(math.pi))
    w = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert vrjp.density(w, np.array([1.0, 1.0])) == pytest.approx(2 / math.pi * math.exp(-1) / math.sqrt(3))


def test_sampler_laplace_and_reproducibility():
    s = vrjp.sample_beta(TRIANGLE, n=20000, seed=5)
    assert s.shape == (20000, 3)
    lam = np.array([0.5, 0.5, 0.5])
    vals = np.exp(-s @ lam)
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - vrjp.laplace(TRIANGLE, lam)) < 4 * se
    assert np.array_equal(s[:10], vrjp.sample_beta(TRIANGLE, n=10, seed=5))


def test_green_inverse_and_errors():
    beta = np.array([1.5, 1.5, 1.5])
    g = vrjp.green(TRIANGLE, beta)
    assert np.allclose(g @ (2 * np.diag(beta) - TRIANGLE), np.eye(3))
    with pytest.raises(ArithmeticError):
        vrjp.green(TRIANGLE, np.array([0.1, 0.1, 0.1]))
    with pytest.raises(ValueError):
        vrjp.green(np.array([[0.0, 1.0], [2.0, 0.0]]), np.ones(2))


def test_simulation_and_representation():
    times, states, local = vrjp.simulate_vrjp(TRIANGLE, start=0, jumps=50, seed=1)
    assert len(times) == 50 and len(states) == 51
    assert np.all(np.diff(times) > 0)
    rates, beta, gamma = vrjp.standard_rep_rates(TRIANGLE, np.ones(3), i0=0, seed=2)
    assert rates.shape == (4, 4) and gamma > 0
    # Cycle 0 -> 1 -> 2 -> 0 against its reverse: products of (2/W) r agree.
    fwd = rates[0, 1] * rates[1, 2] * rates[2, 0]
    bwd = rates[0, 2] * rates[2, 1] * rates[1, 0]
    assert fwd == pytest.approx(bwd, rel=1e-12)


def test_tree_identities_and_stats():
    d = vrjp.tree_identities(3, 2.0, 2, 4, seed=3)
    assert d["residual_row_sum"] < 1e-12
    assert d["residual_gm"] < 1e-10
    rng = np.random.default_rng(0)
    sample = 0.5 * rng.standard_normal(5000) ** 2
    _, p = vrjp.ks_test(list(sample), vrjp.gamma_half_cdf)
    assert p > 1e-3


def test_verify_returns_report():
    passed, report = vrjp.verify("core", seed=1, budget_scale=0.01)
    blocks = json.loads(report)
    assert isinstance(passed, bool)
    assert blocks[0]["block"] == "laplace"
