import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from handsoff.errors import DimensionError, DomainError, ParameterError
from handsoff.system import (
    ControlProblem,
    DiscreteProblem,
    LinearSystem,
    build_discrete,
    check_feasible,
    double_integrator,
    simulate,
)


def benchmark_problem(T=5.0):
    return ControlProblem(double_integrator(), np.array([1.0, -1.0]), T)


def scalar_integrator():
    return LinearSystem(np.zeros((1, 1)), np.ones((1, 1)))


# ---------------------------------------------------------------------------
# construction and validation

def test_system_dimensions():
    sys_ = double_integrator()
    assert (sys_.n, sys_.m) == (2, 1)
    with pytest.raises(DimensionError):
        LinearSystem(np.zeros((2, 3)), np.zeros((2, 1)))
    with pytest.raises(DimensionError):
        LinearSystem(np.zeros((2, 2)), np.zeros((3, 1)))


def test_problem_validation():
    with pytest.raises(DimensionError):
        ControlProblem(double_integrator(), np.zeros(3), 1.0)
    with pytest.raises(DomainError):
        ControlProblem(double_integrator(), np.zeros(2), 0.0)
    with pytest.raises(DomainError):
        ControlProblem(double_integrator(), np.zeros(2), float("inf"))


def test_build_discrete_rejects_bad_n():
    with pytest.raises(ParameterError):
        build_discrete(benchmark_problem(), 0)


def test_discrete_shape_guard():
    dp = build_discrete(benchmark_problem(), 4)
    with pytest.raises(DimensionError):
        DiscreteProblem(dp.delta, 5, dp.Ad, dp.Bd, dp.Phi, dp.zeta)
    with pytest.raises(DomainError):
        DiscreteProblem(-1.0, 4, dp.Ad, dp.Bd, dp.Phi, dp.zeta)


# ---------------------------------------------------------------------------
# discretization values

def test_benchmark_drift():
    # free motion over the whole horizon: x0 + T * velocity in the first
    # coordinate, velocity unchanged
    dp = build_discrete(benchmark_problem(), 1000)
    assert dp.delta == pytest.approx(0.005, abs=1e-15)
    assert np.allclose(dp.zeta, [-4.0, -1.0], atol=1e-12, rtol=0.0)


def test_scalar_integrator_reachability_row():
    prob = ControlProblem(scalar_integrator(), np.array([0.3]), 1.0)
    dp = build_discrete(prob, 2)
    assert np.allclose(dp.Phi, [[0.5, -0.5, 0.5, -0.5]], atol=1e-15)
    assert np.allclose(dp.zeta, [0.3], atol=1e-15)


def test_phi_blocks_are_shifted_powers():
    dp = build_discrete(benchmark_problem(), 7)
    width = 2 * dp.m
    for k in range(dp.N):
        want = np.linalg.matrix_power(dp.Ad, dp.N - 1 - k) @ dp.Bd
        got = dp.Phi[:, k * width : (k + 1) * width]
        assert np.max(np.abs(got - want)) <= 1e-10


def test_grid_covers_horizon():
    for N in (1, 3, 200, 1000):
        dp = build_discrete(benchmark_problem(), N)
        assert dp.N * dp.delta == pytest.approx(5.0, abs=1e-12)


# ---------------------------------------------------------------------------
# simulation

def test_simulate_hand_stepped():
    prob = ControlProblem(scalar_integrator(), np.array([1.0]), 1.0)
    dp = build_discrete(prob, 2)
    states = simulate(dp, prob.x0, np.array([1.0, 0.0, 0.0, 1.0]))
    assert states.shape == (3, 1)
    assert states[:, 0] == pytest.approx([1.0, 1.5, 1.0], abs=1e-15)


def test_simulate_validates_shapes():
    dp = build_discrete(benchmark_problem(), 3)
    with pytest.raises(DimensionError):
        simulate(dp, np.zeros(3), np.zeros(6))
    with pytest.raises(DimensionError):
        simulate(dp, np.zeros(2), np.zeros(5))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_final_state_matches_stacked_form(seed, N):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 3))
    sys_ = LinearSystem(rng.normal(scale=0.5, size=(n, n)), rng.normal(size=(n, m)))
    prob = ControlProblem(sys_, rng.normal(size=n), float(rng.uniform(0.5, 4.0)))
    dp = build_discrete(prob, N)
    z = rng.uniform(0.0, 1.0, size=2 * m * N)
    final = simulate(dp, prob.x0, z)[-1]
    assert np.max(np.abs(final - (dp.zeta + dp.Phi @ z))) <= 1e-9


# ---------------------------------------------------------------------------
# feasibility screening

def test_origin_start_is_feasible_with_zero_witness():
    prob = ControlProblem(double_integrator(), np.zeros(2), 1.0)
    ok, z = check_feasible(build_discrete(prob, 5))
    assert ok
    assert np.allclose(z, 0.0, atol=1e-12)


def test_benchmark_is_feasible():
    ok, z = check_feasible(build_discrete(benchmark_problem(), 50))
    assert ok
    dp = build_discrete(benchmark_problem(), 50)
    assert np.max(np.abs(dp.Phi @ z + dp.zeta)) <= 1e-8


def test_far_state_short_horizon_is_infeasible():
    prob = ControlProblem(double_integrator(), np.array([100.0, 0.0]), 1.0)
    ok, z = check_feasible(build_discrete(prob, 10))
    assert not ok
    assert z is None


def test_check_feasible_tol_validation():
    dp = build_discrete(benchmark_problem(), 5)
    with pytest.raises(ParameterError):
        check_feasible(dp, tol=-1.0)
