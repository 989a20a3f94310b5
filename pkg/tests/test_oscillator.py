import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from operadic_lax.errors import BranchCutError, DomainError
from operadic_lax.integrator import CoupledState, IntegrationConfig, rk4_run
from operadic_lax.oscillator import (
    OscState,
    aux_derivative_residual,
    aux_functions,
    aux_relations_residual,
    classical_lax_residual,
    exact_trajectory,
    hamiltonian,
    hamiltonian_vector_field,
    lax_L,
    lax_M,
    lax_spectrum,
    lift_phase,
    phase,
    trajectory_phase,
)

coord = st.floats(-5, 5, allow_nan=False)
omegas = st.sampled_from([0.5, 1.0, 2.0, 3.3])


def test_state_validation():
    with pytest.raises(DomainError):
        OscState(0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        OscState(0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        OscState(math.inf, 1.0, 1.0)


@pytest.mark.parametrize("q, p, omega, H", [(0, 2, 1, 2), (1, 0, 2, 2), (0, 0, 1, 0)])
def test_hamiltonian(q, p, omega, H):
    assert hamiltonian(OscState(q, p, omega)) == H


@pytest.mark.parametrize(
    "q, p, omega, field", [(0, 2, 1, (2, 0)), (1, 0, 2, (0, -4)), (0, 0, 1, (0, 0))]
)
def test_vector_field(q, p, omega, field):
    assert hamiltonian_vector_field(OscState(q, p, omega)) == field


def test_trajectory_at_zero_is_identity():
    s0 = OscState(0.3, -1.2, 1.7)
    assert exact_trajectory(s0, 0.0) == s0


def test_quarter_period_against_rk4():
    s0 = OscState(0.0, 2.0, 1.0)
    s = exact_trajectory(s0, math.pi / 2)
    assert s.q == pytest.approx(2.0, abs=1e-15)
    assert s.p == pytest.approx(0.0, abs=1e-15)
    tr = rk4_run(CoupledState(0.0, s0, np.zeros(9)), IntegrationConfig(1e-3, math.pi / 2))
    assert tr.q[-1] == pytest.approx(s.q, abs=1e-10)
    assert tr.p[-1] == pytest.approx(s.p, abs=1e-10)


@pytest.mark.parametrize("s0", [OscState(0.0, 2.0, 1.0), OscState(-0.4, 1.1, 2.0), OscState(3.0, 0.0, 0.5)])
def test_energy_conserved_along_exact_flow(s0):
    H0 = hamiltonian(s0)
    for t in np.linspace(0, 10 * math.pi, 100):
        assert abs(hamiltonian(exact_trajectory(s0, t)) - H0) < 1e-12 * max(1.0, H0)


def test_lax_matrices_examples():
    np.testing.assert_array_equal(lax_L(OscState(0, 2, 1)), np.diag([2.0, -2.0, 1.0]))
    np.testing.assert_array_equal(lax_M(2.0), [[0, -1, 0], [1, 0, 0], [0, 0, 0]])
    assert lax_M(1.0)[1, 0] == 0.5
    M = lax_M(1.3)
    np.testing.assert_array_equal(M + M.T, np.zeros((3, 3)))
    with pytest.raises(DomainError):
        lax_M(0.0)


@settings(max_examples=100, deadline=None)
@given(q=coord, p=coord, omega=omegas)
def test_lax_L_invariants(q, p, omega):
    s = OscState(q, p, omega)
    L = lax_L(s)
    np.testing.assert_array_equal(L, L.T)
    assert L[2, 2] == 1.0
    assert np.trace(L) == pytest.approx(1.0, abs=1e-13)
    assert abs(np.trace(L @ L) - 1.0 - 4.0 * hamiltonian(s)) < 1e-13 * max(1.0, hamiltonian(s))


def test_trace_of_L_squared_example():
    # H = 2 at (q=0, p=2, omega=1)
    L = lax_L(OscState(0, 2, 1))
    assert np.trace(L @ L) == 9.0


def test_classical_residual_examples():
    assert np.max(np.abs(classical_lax_residual(OscState(0.7, -0.2, 1.0)))) < 1e-14
    assert np.max(np.abs(classical_lax_residual(OscState(0.0, 0.0, 1.0)))) == 0.0
    assert np.max(np.abs(classical_lax_residual(OscState(3.0, -1.0, 2.0)))) < 1e-13


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_classical_residual_grid(omega):
    grid = np.linspace(-5, 5, 10)
    worst = max(np.max(np.abs(classical_lax_residual(OscState(q, p, omega)))) for q in grid for p in grid)
    assert worst < 1e-12


def test_isospectral_along_trajectory():
    s0 = OscState(0.0, 2.0, 1.0)
    root = math.sqrt(2 * hamiltonian(s0))
    for t in np.linspace(0, 10 * math.pi, 200):
        np.testing.assert_allclose(lax_spectrum(exact_trajectory(s0, t)), [-root, 1.0, root], atol=1e-10)


def test_aux_examples():
    a = aux_functions(OscState(0.0, 2.0, 1.0))
    assert (a.a_plus, a.a_minus) == (2.0, 0.0)
    b = aux_functions(OscState(2.0, 0.0, 1.0))
    assert b.a_plus == pytest.approx(math.sqrt(2), abs=1e-15)
    assert b.a_minus == pytest.approx(math.sqrt(2), abs=1e-15)
    assert b.a_plus * b.a_minus == pytest.approx(2.0, abs=1e-14)


def test_aux_branch_flips_sign():
    s = OscState(0.4, -0.3, 1.5)
    a, b = aux_functions(s, 1), aux_functions(s, -1)
    assert (b.a_plus, b.a_minus) == (-a.a_plus, -a.a_minus)
    with pytest.raises(ValueError):
        aux_functions(s, 0)


def test_aux_rejects_zero_energy():
    with pytest.raises(DomainError):
        aux_functions(OscState(0.0, 0.0, 1.0))


def test_aux_relations_sweep(rng):
    for _ in range(1000):
        q, p = rng.uniform(-5, 5, 2)
        s = OscState(q, p, float(rng.choice([0.5, 1.0, 2.0])))
        for branch in (1, -1):
            assert aux_relations_residual(s, aux_functions(s, branch)) < 1e-12


def test_aux_with_explicit_lift_matches_principal_up_to_sign():
    s = OscState(0.3, -1.0, 1.0)
    theta = phase(s)
    a = aux_functions(s)
    b = aux_functions(s, theta=theta + 2 * math.pi)
    assert (b.a_plus, b.a_minus) == pytest.approx((-a.a_plus, -a.a_minus), abs=1e-15)
    assert aux_relations_residual(s, b) < 1e-12


def test_lift_phase_follows_trajectory():
    s0 = OscState(0.0, 2.0, 1.0)
    for t in np.linspace(0, 20, 50):
        s = exact_trajectory(s0, t)
        assert lift_phase(s, t) == pytest.approx(trajectory_phase(s0, t), abs=1e-12)


def test_aux_derivative_residual_at_seed():
    r = aux_derivative_residual(OscState(0.0, 2.0, 1.0), dt=1e-5)
    assert max(map(abs, r)) < 1e-8


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_aux_derivative_residual_along_trajectory(omega):
    s0 = OscState(0.0, 2.0, omega)
    for t in np.linspace(-(math.pi - 0.15), math.pi - 0.15, 50) / omega:
        r_plus = aux_derivative_residual(s0, t, branch=1)
        r_minus = aux_derivative_residual(s0, t, branch=-1)
        assert max(map(abs, r_plus)) < 1e-7
        assert max(map(abs, r_minus)) < 1e-7


def test_aux_derivative_residual_near_cut():
    s0 = OscState(0.0, 2.0, 1.0)
    with pytest.raises(BranchCutError):
        aux_derivative_residual(s0, math.pi - 0.01)


def test_aux_continuity_on_cut_free_arc():
    s0 = OscState(0.0, 2.0, 1.0)
    dt = 1e-3
    times = np.arange(-(math.pi - 0.05), math.pi - 0.05, dt)
    vals = np.array([[a.a_plus, a.a_minus] for a in (aux_functions(exact_trajectory(s0, t)) for t in times)])
    assert np.max(np.abs(np.diff(vals, axis=0))) < 10 * dt
