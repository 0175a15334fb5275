"""Integrators checked against matrix exponentials, a superoperator oracle,
and analytic decay laws."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from squidw.dynamics import (
    EIG_TOL,
    MAX_FRAMES,
    ConvergenceError,
    NoiseModel,
    TimeGrid,
    _dissipator_tables,
    fidelity,
    lindblad_operators,
    populations,
    propagate_lindblad,
    propagate_schrodinger,
)
from squidw.pulse_design import ScheduleParams, gaussian_fit_pulses, stirap_pulses
from squidw.state_space import (
    DIM,
    GROUND,
    PSI1,
    PSI2,
    PSI3,
    PSI4,
    PSI5,
    PSI7,
    PSI8,
    CouplingConfig,
    basis_state,
    cavity_hamiltonian,
    drive_hamiltonian,
    w_state,
)


def _gaussian_h(g: float):
    hc = cavity_hamiltonian(CouplingConfig(g=g))
    sch = gaussian_fit_pulses(ScheduleParams())
    return lambda t: hc + drive_hamiltonian(sch.qubit_amplitudes(t))


def _random_density(rng) -> np.ndarray:
    a = rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# jump operator structure


def test_lindblad_operator_count_and_order():
    noise = NoiseModel(kappa=2.0, gamma=1.0, gamma_phi=0.5)
    ops = lindblad_operators(noise)
    assert len(ops) == 17
    sg = math.sqrt(1.0)
    # decays |e> -> |1>: qubit 1 sends PSI4 to PSI7, qubit 4 sends PSI2 to PSI1
    assert ops[0][PSI7, PSI4] == sg and np.count_nonzero(ops[0]) == 1
    assert ops[3][PSI1, PSI2] == sg
    # decays |e> -> |0>: everything lands in GROUND
    assert ops[4][GROUND, PSI4] == sg
    assert ops[7][GROUND, PSI2] == sg
    # cavity loss comes last
    assert ops[16][GROUND, PSI3] == pytest.approx(math.sqrt(2.0))
    assert np.count_nonzero(ops[16]) == 1


def test_dephasing_operators_are_balanced_diagonals():
    noise = NoiseModel(gamma_phi=0.5)
    ops = lindblad_operators(noise)
    sp = math.sqrt(0.25)
    d_e1_q1 = np.real(np.diag(ops[8]))  # e/1 dephasing on qubit 1
    assert d_e1_q1[PSI4] == pytest.approx(sp)
    assert d_e1_q1[PSI7] == pytest.approx(-sp)
    assert d_e1_q1[GROUND] == 0.0
    d_e0_q1 = np.real(np.diag(ops[12]))  # e/0 dephasing on qubit 1
    assert d_e0_q1[PSI4] == pytest.approx(sp)
    assert d_e0_q1[PSI7] == 0.0
    assert d_e0_q1[GROUND] == pytest.approx(-sp)
    # zero-rate models still give 17 well-formed (zero) operators
    assert all(np.max(np.abs(op)) == 0.0 for op in lindblad_operators(NoiseModel()))


# ---------------------------------------------------------------------------
# closed-system propagation


def test_no_drive_leaves_initial_state_alone():
    hc = cavity_hamiltonian(CouplingConfig(g=30.0))
    traj = propagate_schrodinger(lambda t: hc, basis_state(PSI1), TimeGrid(500))
    assert abs(abs(traj.final_state[PSI1]) - 1.0) < 1e-12
    assert fidelity(traj.final_state) < 1e-24


def test_rk4_matches_piecewise_matrix_exponential():
    segments, per_seg = 10, 400
    hc = cavity_hamiltonian(CouplingConfig(g=30.0))
    sch = gaussian_fit_pulses(ScheduleParams())
    seg_h = [
        hc + drive_hamiltonian(sch.qubit_amplitudes((i + 0.5) / segments))
        for i in range(segments)
    ]
    psi_exact = basis_state(PSI1)
    psi_rk = basis_state(PSI1)
    for h in seg_h:
        psi_exact = expm(-1j * h / segments) @ psi_exact
        psi_rk = propagate_schrodinger(
            lambda t, h=h: h, psi_rk, TimeGrid(per_seg), duration=1.0 / segments
        ).final_state
    assert np.max(np.abs(psi_rk - psi_exact)) < 1e-8


def test_rk4_is_fourth_order():
    h_fn = _gaussian_h(5.0)
    ref = propagate_schrodinger(h_fn, basis_state(PSI1), TimeGrid(6400)).final_state
    errs = [
        np.linalg.norm(
            propagate_schrodinger(h_fn, basis_state(PSI1), TimeGrid(n)).final_state - ref
        )
        for n in (200, 400)
    ]
    assert 13.0 < errs[0] / errs[1] < 19.0


def test_schrodinger_norm_gate_trips_on_stiff_underresolved_run():
    hc = cavity_hamiltonian(CouplingConfig(g=150.0))
    sch = stirap_pulses(50.0)
    h_fn = lambda t: hc + drive_hamiltonian(sch.qubit_amplitudes(t))
    with pytest.raises(ConvergenceError):
        propagate_schrodinger(h_fn, basis_state(PSI1), TimeGrid(100))


def test_permutation_symmetry_of_closed_dynamics():
    traj = propagate_schrodinger(_gaussian_h(30.0), basis_state(PSI1), TimeGrid(2000))
    psi = traj.final_state
    for a, b in ((PSI4, PSI5), (PSI7, PSI8)):
        swapped = psi.copy()
        swapped[[a, b]] = swapped[[b, a]]
        # qubits 1-3 are driven identically, so swapping any pair is a symmetry
        assert np.max(np.abs(swapped - psi)) < 1e-9


def test_trajectory_frames_and_populations():
    traj = propagate_schrodinger(
        _gaussian_h(30.0), basis_state(PSI1), TimeGrid(1000), n_frames=101
    )
    assert len(traj.states) == 101
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(1.0)
    assert np.all(np.diff(traj.times) > 0)
    pops = populations(traj)
    assert pops.shape == (101, DIM)
    assert np.max(np.abs(pops.sum(axis=1) - 1.0)) < 1e-9
    assert traj.fidelities[0] == pytest.approx(0.0, abs=1e-30)
    assert traj.fidelities[-1] > 0.99
    big = propagate_schrodinger(
        _gaussian_h(10.0), basis_state(PSI1), TimeGrid(1000), n_frames=5000
    )
    assert len(big.states) <= MAX_FRAMES


def test_schrodinger_input_validation():
    with pytest.raises(ValueError):
        propagate_schrodinger(_gaussian_h(10.0), 2.0 * basis_state(PSI1), TimeGrid(100))
    with pytest.raises(ValueError):
        TimeGrid(50)
    with pytest.raises(ValueError):
        NoiseModel(kappa=-1.0)


# ---------------------------------------------------------------------------
# open-system propagation


def test_zero_noise_master_equation_matches_schrodinger():
    h_fn = _gaussian_h(30.0)
    psi0 = basis_state(PSI1)
    traj_s = propagate_schrodinger(h_fn, psi0, TimeGrid(2000))
    rho0 = np.outer(psi0, psi0.conj())
    traj_l = propagate_lindblad(h_fn, lindblad_operators(NoiseModel()), rho0, TimeGrid(2000))
    assert abs(fidelity(traj_s.final_state) - fidelity(traj_l.final_state)) < 1e-7
    pure = np.outer(traj_s.final_state, traj_s.final_state.conj())
    assert np.max(np.abs(traj_l.final_state - pure)) < 1e-7


def test_cavity_decay_follows_exponential_law():
    kappa = 0.8
    ops = lindblad_operators(NoiseModel(kappa=kappa))
    rho0 = np.outer(basis_state(PSI3), basis_state(PSI3).conj())
    traj = propagate_lindblad(lambda t: np.zeros((DIM, DIM)), ops, rho0, TimeGrid(1000))
    p3 = traj.final_state[PSI3, PSI3].real
    pg = traj.final_state[GROUND, GROUND].real
    assert p3 == pytest.approx(math.exp(-kappa), abs=1e-10)
    assert pg == pytest.approx(1.0 - math.exp(-kappa), abs=1e-10)


def test_fast_dissipator_matches_superoperator_oracle():
    """The tabulated gain/scatter path must equal the canonical Lindblad form."""
    rng = np.random.default_rng(42)
    noise = NoiseModel(kappa=0.9, gamma=0.4, gamma_phi=0.6)
    ops = lindblad_operators(noise)
    h = rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))
    h = h + h.conj().T

    # full 100x100 superoperator acting on row-major vec(rho)
    eye = np.eye(DIM)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for L in ops:
        ldl = L.conj().T @ L
        sup += np.kron(L, L.conj()) - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))

    rho0 = _random_density(rng)
    duration, n = 0.3, 200
    traj = propagate_lindblad(lambda t: h, ops, rho0, TimeGrid(n), duration=duration)

    vec = rho0.reshape(-1)
    dt = duration / n
    for _ in range(n):
        k1 = sup @ vec
        k2 = sup @ (vec + 0.5 * dt * k1)
        k3 = sup @ (vec + 0.5 * dt * k2)
        k4 = sup @ (vec + dt * k3)
        vec = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    assert np.max(np.abs(traj.final_state - vec.reshape(DIM, DIM))) < 1e-10


def test_dissipator_tables_split():
    ops = lindblad_operators(NoiseModel(kappa=1.0, gamma=1.0, gamma_phi=1.0))
    gain, scatter, generic = _dissipator_tables(ops)
    assert generic == []  # the 17-operator model is fully tabulated
    # scatter rows: PSI4 loses gamma into PSI7 and gamma into GROUND
    assert scatter[PSI7, PSI4] == pytest.approx(1.0)
    assert scatter[GROUND, PSI4] == pytest.approx(1.0)
    # populations only move through decay: the dephasing pieces cancel on the
    # diagonal, leaving gain_ii = -(total decay rate out of i)
    assert gain[PSI4, PSI4] == pytest.approx(-2.0)
    assert gain[PSI3, PSI3] == pytest.approx(-1.0)  # cavity loss only
    assert gain[GROUND, GROUND] == pytest.approx(0.0)
    assert np.max(np.abs(gain - gain.T)) == 0.0


def test_open_run_preserves_trace_hermiticity_positivity():
    h_fn = _gaussian_h(30.0)
    noise = NoiseModel(kappa=0.033 * 30, gamma=0.0073 * 30, gamma_phi=0.001 * 30)
    rho0 = np.outer(basis_state(PSI1), basis_state(PSI1).conj())
    traj = propagate_lindblad(h_fn, lindblad_operators(noise), rho0, TimeGrid(2000), n_frames=51)
    assert traj.drift < 1e-10
    assert traj.min_eigenvalue is not None and traj.min_eigenvalue > EIG_TOL
    for rho in traj.states[::10]:
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
        assert abs(np.trace(rho).real - 1.0) < 1e-9


def test_permutation_symmetry_of_open_dynamics():
    noise = NoiseModel(kappa=0.1, gamma=0.05, gamma_phi=0.02)
    rho0 = np.outer(basis_state(PSI1), basis_state(PSI1).conj())
    traj = propagate_lindblad(
        _gaussian_h(30.0), lindblad_operators(noise), rho0, TimeGrid(1000)
    )
    rho = traj.final_state
    perm = list(range(DIM))
    perm[PSI4], perm[PSI5] = perm[PSI5], perm[PSI4]
    perm[PSI7], perm[PSI8] = perm[PSI8], perm[PSI7]
    p = np.eye(DIM)[perm]
    assert np.max(np.abs(p @ rho @ p.T - rho)) < 1e-9


def test_lindblad_input_validation():
    ops = lindblad_operators(NoiseModel())
    good = np.outer(basis_state(PSI1), basis_state(PSI1).conj())
    with pytest.raises(ValueError):
        propagate_lindblad(lambda t: np.zeros((DIM, DIM)), ops, 2.0 * good, TimeGrid(100))
    skew = good.copy()
    skew[0, 1] = 0.5
    with pytest.raises(ValueError):
        propagate_lindblad(lambda t: np.zeros((DIM, DIM)), ops, skew, TimeGrid(100))
    with pytest.raises(ValueError):
        propagate_lindblad(lambda t: np.zeros((DIM, DIM)), ops, np.eye(4), TimeGrid(100))


# ---------------------------------------------------------------------------
# observables


def test_fidelity_forms_agree():
    rng = np.random.default_rng(9)
    psi = rng.normal(size=DIM) + 1j * rng.normal(size=DIM)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    assert fidelity(psi) == pytest.approx(fidelity(rho), abs=1e-14)
    target = basis_state(PSI1)
    assert fidelity(psi, target) == pytest.approx(abs(psi[PSI1]) ** 2, abs=1e-14)
    assert fidelity(w_state()) == pytest.approx(1.0, abs=1e-15)
