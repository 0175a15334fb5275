"""Time evolution and observables.

Pure states follow i dpsi/dt = H(t) psi, density matrices follow the Lindblad
master equation with the 17-operator noise model (per-qubit decay to both
lower levels, per-qubit dephasing on both transitions, cavity photon loss).
Both propagators use fixed-step classical RK4 so results are bit-reproducible;
norm and trace drift are tracked as convergence diagnostics, never corrected
by renormalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .state_space import (
    DIM,
    GROUND,
    LEVELS,
    PSI3,
    _EXCITED_OF_QUBIT,
    _ONE_OF_QUBIT,
    w_state,
)

MAX_FRAMES = 500

NORM_TOL = 1e-6  # pure-state norm drift gate
TRACE_TOL = 1e-8  # density-matrix trace drift gate
EIG_TOL = -1e-6  # most negative admissible eigenvalue


class ConvergenceError(RuntimeError):
    """Raised when drift diagnostics exceed their gates."""


@dataclass(frozen=True)
class NoiseModel:
    """Decay and dephasing rates, units 1/T.

    kappa: cavity photon loss; gamma: spontaneous emission |e> -> |1> and
    |e> -> |0| for every qubit; gamma_phi: dephasing on both transitions of
    every qubit.
    """

    kappa: float = 0.0
    gamma: float = 0.0
    gamma_phi: float = 0.0

    def __post_init__(self) -> None:
        for name in ("kappa", "gamma", "gamma_phi"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite nonnegative rate, got {v}")

    @property
    def is_closed(self) -> bool:
        return self.kappa == 0.0 and self.gamma == 0.0 and self.gamma_phi == 0.0


@dataclass(frozen=True)
class TimeGrid:
    """Fixed integration grid; n_steps RK4 steps across the run window."""

    n_steps: int = 2000

    def __post_init__(self) -> None:
        if self.n_steps < 100:
            raise ValueError(f"n_steps must be at least 100, got {self.n_steps}")


@dataclass
class Trajectory:
    """Stored frames (at most MAX_FRAMES) plus endpoint diagnostics."""

    times: np.ndarray
    states: list  # state vector or density matrix per stored frame
    fidelities: np.ndarray
    populations: np.ndarray  # frames x 10, diagonal occupation
    final_state: np.ndarray
    drift: float  # |norm - 1| or |trace - 1| at the final time
    min_eigenvalue: float | None  # density runs only
    n_steps: int


def fidelity(state: np.ndarray, target: np.ndarray | None = None) -> float:
    """|<W|psi>|^2 for vectors, |<W|rho|W>| for density matrices."""
    w = w_state() if target is None else target
    state = np.asarray(state)
    if state.ndim == 1:
        return float(abs(np.vdot(w, state)) ** 2)
    return float(abs(w.conj() @ state @ w))


def populations(traj: Trajectory) -> np.ndarray:
    """Per-frame basis-state occupations P_1 .. P_9, P_G (frames x 10)."""
    return traj.populations


def _state_populations(state: np.ndarray) -> np.ndarray:
    if state.ndim == 1:
        return np.abs(state) ** 2
    return np.real(np.diag(state))


def _frame_indices(n_steps: int, n_frames: int) -> np.ndarray:
    n_frames = int(min(max(n_frames, 2), MAX_FRAMES, n_steps + 1))
    return np.unique(np.linspace(0, n_steps, n_frames).round().astype(int))


def propagate_schrodinger(
    h_fn,
    psi0: np.ndarray,
    grid: TimeGrid | None = None,
    duration: float = 1.0,
    n_frames: int = 2,
) -> Trajectory:
    """Fixed-step RK4 on i dpsi/dt = H(t) psi; no renormalization."""
    grid = grid or TimeGrid()
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")
    n = grid.n_steps
    h = duration / n
    keep = _frame_indices(n, n_frames)
    keep_set = set(int(i) for i in keep)

    times, states = [], []
    if 0 in keep_set:
        times.append(0.0)
        states.append(psi.copy())
    t = 0.0
    for step in range(1, n + 1):
        h1 = h_fn(t)
        h2 = h_fn(t + 0.5 * h)
        h3 = h_fn(t + h)
        k1 = -1j * (h1 @ psi)
        k2 = -1j * (h2 @ (psi + 0.5 * h * k1))
        k3 = -1j * (h2 @ (psi + 0.5 * h * k2))
        k4 = -1j * (h3 @ (psi + h * k3))
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = step * h
        if step in keep_set:
            times.append(t)
            states.append(psi.copy())

    drift = abs(np.linalg.norm(psi) - 1.0)
    traj = Trajectory(
        times=np.array(times),
        states=states,
        fidelities=np.array([fidelity(s) for s in states]),
        populations=np.array([_state_populations(s) for s in states]),
        final_state=psi,
        drift=float(drift),
        min_eigenvalue=None,
        n_steps=n,
    )
    if drift > NORM_TOL:
        raise ConvergenceError(
            f"norm drift {drift:.3e} exceeds {NORM_TOL:.0e} after {n} steps"
        )
    return traj


def lindblad_operators(noise: NoiseModel) -> list[np.ndarray]:
    """The 17 jump operators as 10x10 matrices.

    Order: 4 decays |e> -> |1> (one per qubit), 4 decays |e> -> |0> (into the
    global ground state), 4 dephasings on the e/1 transition, 4 dephasings on
    the e/0 transition, cavity photon loss.
    """
    ops: list[np.ndarray] = []
    sg = math.sqrt(noise.gamma)
    for k in range(4):
        L = np.zeros((DIM, DIM), dtype=complex)
        L[_ONE_OF_QUBIT[k], _EXCITED_OF_QUBIT[k]] = sg
        ops.append(L)
    for k in range(4):
        L = np.zeros((DIM, DIM), dtype=complex)
        L[GROUND, _EXCITED_OF_QUBIT[k]] = sg
        ops.append(L)
    sp = math.sqrt(noise.gamma_phi / 2.0)
    for level in ("1", "0"):
        for k in range(4):
            diag = np.zeros(DIM)
            for idx, labels in enumerate(LEVELS):
                if labels[k] == "e":
                    diag[idx] = 1.0
                elif labels[k] == level:
                    diag[idx] = -1.0
            ops.append(sp * np.diag(diag).astype(complex))
    L = np.zeros((DIM, DIM), dtype=complex)
    L[GROUND, PSI3] = math.sqrt(noise.kappa)
    ops.append(L)
    return ops


def _classify_operators(ops):
    """Split operators into single-entry jumps, diagonals, and the rest."""
    jumps, diags, generic = [], [], []
    for L in ops:
        L = np.asarray(L, dtype=complex)
        nz = np.argwhere(np.abs(L) > 0)
        if nz.size == 0:
            continue
        if np.allclose(L, np.diag(np.diag(L))) and np.allclose(np.diag(L).imag, 0.0):
            diags.append(np.real(np.diag(L)).copy())
        elif len(nz) == 1:
            (dst, src) = nz[0]
            jumps.append((int(dst), int(src), float(abs(L[dst, src]) ** 2)))
        else:
            generic.append(L)
    return jumps, diags, generic


def _dissipator_tables(ops):
    """Precompute the elementwise gain matrix and the population scatter.

    For jumps L = sqrt(r) |dst><src| and real diagonals L = diag(d), the
    dissipator contributes G*rho elementwise plus a classical rate matrix S
    acting on the diagonal, with G_ij = sum_d d_i d_j - (k_i + k_j)/2 and
    k_i the total outflow rate from basis state i.
    """
    jumps, diags, generic = _classify_operators(ops)
    k = np.zeros(DIM)
    dd = np.zeros((DIM, DIM))
    for dst, src, r in jumps:
        k[src] += r
    for d in diags:
        k += d * d
        dd += np.outer(d, d)
    gain = dd - 0.5 * (k[:, None] + k[None, :])
    scatter = np.zeros((DIM, DIM))
    for dst, src, r in jumps:
        scatter[dst, src] += r
    return gain, scatter, generic


_DIAG_IDX = np.arange(DIM)


def propagate_lindblad(
    h_fn,
    lindblads,
    rho0: np.ndarray,
    grid: TimeGrid | None = None,
    duration: float = 1.0,
    n_frames: int = 2,
) -> Trajectory:
    """Fixed-step RK4 on the Lindblad master equation.

    The Hamiltonian commutator and the dissipator are evaluated directly on
    the 10x10 matrix; rho is re-symmetrized once per step to absorb float
    drift. Trace and positivity are monitored at stored frames and gate the
    result.
    """
    grid = grid or TimeGrid()
    rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != (DIM, DIM):
        raise ValueError(f"rho0 must be {DIM}x{DIM}")
    if abs(np.trace(rho).real - 1.0) > 1e-9 or np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        raise ValueError("rho0 must be Hermitian with unit trace")
    gain, scatter, generic = _dissipator_tables(lindblads)
    gen_pairs = [(L, L.conj().T @ L) for L in generic]

    def rhs(t: float, r: np.ndarray) -> np.ndarray:
        H = h_fn(t)
        out = -1j * (H @ r - r @ H) + gain * r
        out[_DIAG_IDX, _DIAG_IDX] += scatter @ r.diagonal()
        for L, LdL in gen_pairs:
            out += L @ r @ L.conj().T - 0.5 * (LdL @ r + r @ LdL)
        return out

    n = grid.n_steps
    h = duration / n
    keep = _frame_indices(n, n_frames)
    keep_set = set(int(i) for i in keep)

    times, states = [], []
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if 0 in keep_set:
        times.append(0.0)
        states.append(rho.copy())
    t = 0.0
    for step in range(1, n + 1):
        k1 = rhs(t, rho)
        k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2)
        k4 = rhs(t + h, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        t = step * h
        if step in keep_set:
            times.append(t)
            states.append(rho.copy())
            min_eig = min(min_eig, float(np.linalg.eigvalsh(rho).min()))

    drift = abs(float(np.trace(rho).real) - 1.0)
    traj = Trajectory(
        times=np.array(times),
        states=states,
        fidelities=np.array([fidelity(s) for s in states]),
        populations=np.array([_state_populations(s) for s in states]),
        final_state=rho,
        drift=drift,
        min_eigenvalue=min_eig,
        n_steps=n,
    )
    if drift > TRACE_TOL:
        raise ConvergenceError(
            f"trace drift {drift:.3e} exceeds {TRACE_TOL:.0e} after {n} steps"
        )
    if min_eig < EIG_TOL:
        raise ConvergenceError(
            f"density matrix eigenvalue {min_eig:.3e} below {EIG_TOL:.0e}"
        )
    return traj
