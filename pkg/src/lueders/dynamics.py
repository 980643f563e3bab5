"""Quantum-optical model of the measurement pulse.

A laser drives |0> <-> |e| with Rabi frequency Omega at detuning Delta while
|e> decays back to |0> at rate Gamma, emitting a photon into the environment.
The four levels {|0>, |1>, |2>, |e>} (indices 0..3) follow a Lindblad master
equation; the spectator levels |1> and |2> appear in neither the Hamiltonian
nor the jump operator, so their populations and mutual coherence are constants
of motion.

The coherence between |0> and a spectator level shrinks by the complex factor
g0(t), obtained here two ways:

* ``g0_exact``     - fixed-step integration of the closed two-variable system
                     d/dt rho_01 = -i(Omega/2) rho_e1,
                     d/dt rho_e1 = -i(Omega/2) rho_01 - (Gamma/2 + i Delta) rho_e1;
* ``g0_adiabatic`` - the weak-drive formula
                     g0 = exp(-Omega^2 t / (2 Gamma + 4 i Delta)) e^{i phi_r},
                     valid for Omega << Gamma.

All angular frequencies are rad/s; times are seconds; Hamiltonians are in
units of hbar.  ``phi_r`` is the extra phase picked up from repump-field
AC-Stark shifts (0 when tuned away, the default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import AdiabaticRegimeWarning, InvalidG0, StepUnderflow

TWO_PI = 2.0 * math.pi
_E = 3  # index of the excited level

MAX_STEPS = int(1e8)


@dataclass(frozen=True)
class ExperimentParams:
    """Physical parameters of one measurement-pulse setting.

    ``omega``/``delta`` carry symmetric 1-sigma uncertainties used by the
    Monte Carlo propagation; ``shots`` is the number of repetitions per
    tomography setting and ``seed`` the base RNG seed.
    """

    omega: float  # rad/s
    omega_unc: float = 0.0
    gamma: float = TWO_PI * 21.65e6
    delta: float = TWO_PI * 5.0e6
    delta_unc: float = TWO_PI * 2.0e6
    t: float = 1.0e-6  # s
    phi_r: float = 0.0
    shots: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.t < 0:
            raise ValueError("pulse length must be non-negative")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")

    @classmethod
    def from_mhz(
        cls,
        omega_mhz: float,
        omega_unc_mhz: float = 0.0,
        gamma_mhz: float = 21.65,
        delta_mhz: float = 5.0,
        delta_unc_mhz: float = 2.0,
        t_us: float = 1.0,
        phi_r: float = 0.0,
        shots: int = 1000,
        seed: int = 0,
    ) -> "ExperimentParams":
        """Build from ordinary frequencies in MHz (2*pi applied here)."""
        return cls(
            omega=TWO_PI * omega_mhz * 1e6,
            omega_unc=TWO_PI * omega_unc_mhz * 1e6,
            gamma=TWO_PI * gamma_mhz * 1e6,
            delta=TWO_PI * delta_mhz * 1e6,
            delta_unc=TWO_PI * delta_unc_mhz * 1e6,
            t=t_us * 1e-6,
            phi_r=phi_r,
            shots=shots,
            seed=seed,
        )

    def with_seed(self, seed: int) -> "ExperimentParams":
        return replace(self, seed=seed)


def interaction_hamiltonian(omega: float, delta: float) -> np.ndarray:
    """4x4 rotating-frame Hamiltonian (units of hbar, rad/s).

    H = Delta |e><e| + (Omega/2)(|e><0| + |0><e|); rows and columns of the
    spectator levels |1>, |2> are identically zero.
    """
    h = np.zeros((4, 4), dtype=complex)
    h[_E, _E] = delta
    h[0, _E] = omega / 2.0
    h[_E, 0] = omega / 2.0
    return h


def lindblad_rhs(rho: np.ndarray, h: np.ndarray, gamma: float) -> np.ndarray:
    """Right-hand side of the master equation.

    drho/dt = -i[H, rho] + (Gamma/2)(2 s- rho s+ - s+ s- rho - rho s+ s-)
    with s+ = |e><0|.  Built so the result is Hermitian and traceless to
    machine precision for Hermitian input.
    """
    c = h @ rho
    comm = c - c.conj().T
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 2.0 * rho[_E, _E]
    m[_E, :] -= rho[_E, :]
    m[:, _E] -= rho[:, _E]
    return -1j * comm + (0.5 * gamma) * m


def _step_size(t_final: float) -> tuple[float, int]:
    h = min(1e-10, t_final / 1000.0) if t_final > 0 else 1e-10
    n = max(1, int(round(t_final / h))) if t_final > 0 else 0
    if n > MAX_STEPS:
        raise StepUnderflow(f"{n} steps exceed the {MAX_STEPS} limit")
    return (t_final / n if n else h), n


def _rk4_step(rho: np.ndarray, h_mat: np.ndarray, gamma: float, dt: float) -> np.ndarray:
    k1 = lindblad_rhs(rho, h_mat, gamma)
    k2 = lindblad_rhs(rho + (0.5 * dt) * k1, h_mat, gamma)
    k3 = lindblad_rhs(rho + (0.5 * dt) * k2, h_mat, gamma)
    k4 = lindblad_rhs(rho + dt * k3, h_mat, gamma)
    out = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (out + out.conj().T)


def integrate(
    rho0: np.ndarray,
    params: ExperimentParams,
    t_final: float | None = None,
) -> np.ndarray:
    """Evolve a 4x4 state for ``t_final`` seconds (default: the pulse length).

    Fixed-step 4th-order Runge-Kutta with dt = min(1e-10 s, t/1000);
    Hermiticity is enforced by symmetrization after every step.
    """
    if t_final is None:
        t_final = params.t
    dt, n = _step_size(t_final)
    h_mat = interaction_hamiltonian(params.omega, params.delta)
    rho = 0.5 * (np.asarray(rho0, dtype=complex) + np.asarray(rho0, dtype=complex).conj().T)
    for _ in range(n):
        rho = _rk4_step(rho, h_mat, params.gamma, dt)
    return rho


def trajectory(
    rho0: np.ndarray,
    params: ExperimentParams,
    t_final: float | None = None,
    n_records: int = 200,
) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`integrate` but also samples the state along the way.

    Returns ``(times, states)`` with ``n_records + 1`` snapshots including
    both endpoints.
    """
    if t_final is None:
        t_final = params.t
    dt, n = _step_size(t_final)
    h_mat = interaction_hamiltonian(params.omega, params.delta)
    rho = 0.5 * (np.asarray(rho0, dtype=complex) + np.asarray(rho0, dtype=complex).conj().T)
    record_at = {round(k * n / n_records) for k in range(n_records + 1)} if n else {0}
    times, states = [0.0], [rho.copy()]
    for step in range(1, n + 1):
        rho = _rk4_step(rho, h_mat, params.gamma, dt)
        if step in record_at:
            times.append(step * dt)
            states.append(rho.copy())
    return np.asarray(times), np.asarray(states)


def embed_qutrit(rho3: np.ndarray) -> np.ndarray:
    """Lift a 3x3 qutrit state to the 4-level space (no |e> population)."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[:3, :3] = rho3
    return rho


def qutrit_block(rho4: np.ndarray) -> np.ndarray:
    """The qutrit part of a 4-level state (upper-left 3x3 block)."""
    return np.asarray(rho4)[:3, :3].copy()


def g0_exact(params: ExperimentParams, t_final: float | None = None, dt: float | None = None) -> complex:
    """Coherence factor from integrating the closed two-variable system.

    Starts from rho_01 = 1, rho_e1 = 0 and returns rho_01(t) * e^{i phi_r}.
    ``dt`` overrides the default step (used by step-convergence checks).
    """
    if t_final is None:
        t_final = params.t
    if dt is None:
        dt, n = _step_size(t_final)
    else:
        n = max(1, int(round(t_final / dt)))
        if n > MAX_STEPS:
            raise StepUnderflow(f"{n} steps exceed the {MAX_STEPS} limit")
        dt = t_final / n
    a = -0.5j * params.omega
    b = -(0.5 * params.gamma + 1j * params.delta)
    y0, y1 = 1.0 + 0.0j, 0.0 + 0.0j

    def f(u0: complex, u1: complex) -> tuple[complex, complex]:
        return a * u1, a * u0 + b * u1

    for _ in range(n):
        k10, k11 = f(y0, y1)
        k20, k21 = f(y0 + 0.5 * dt * k10, y1 + 0.5 * dt * k11)
        k30, k31 = f(y0 + 0.5 * dt * k20, y1 + 0.5 * dt * k21)
        k40, k41 = f(y0 + dt * k30, y1 + dt * k31)
        y0 += (dt / 6.0) * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
        y1 += (dt / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
    return y0 * complex(math.cos(params.phi_r), math.sin(params.phi_r))


def g0_adiabatic(params: ExperimentParams, t_final: float | None = None) -> complex:
    """Weak-drive formula g0 = exp(-Omega^2 t / (2 Gamma + 4 i Delta)) e^{i phi_r}.

    Warns when Omega > Gamma/2, far outside the regime where eliminating the
    excited level is justified.
    """
    if t_final is None:
        t_final = params.t
    if params.omega > params.gamma / 2.0:
        import warnings

        warnings.warn(
            f"omega = {params.omega:.3e} rad/s exceeds gamma/2; the adiabatic "
            "formula is unreliable here",
            AdiabaticRegimeWarning,
            stacklevel=2,
        )
    exponent = -(params.omega**2) * t_final / (2.0 * params.gamma + 4j * params.delta)
    return complex(np.exp(exponent) * np.exp(1j * params.phi_r))


def p_scatt(g0: complex) -> float:
    """Photon-scattering probability 1 - |g0|^2."""
    mag2 = abs(g0) ** 2
    if mag2 > 1.0 + 1e-12:
        raise InvalidG0(f"|g0| = {math.sqrt(mag2)} exceeds 1")
    return min(max(1.0 - mag2, 0.0), 1.0)


def param_uncertainty(
    params: ExperimentParams,
    n_samples: int = 2000,
    seed: int | None = None,
) -> tuple[float, float, float]:
    """Monte Carlo 68% interval of P_scatt from the Omega/Delta uncertainties.

    Draws independent normal samples of Omega and Delta, evaluates the
    adiabatic formula, and returns the (16th, 50th, 84th) percentiles.
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    rng = np.random.default_rng(params.seed if seed is None else seed)
    omega = params.omega + params.omega_unc * rng.standard_normal(n_samples)
    delta = params.delta + params.delta_unc * rng.standard_normal(n_samples)
    exponent = -(omega**2) * params.t / (2.0 * params.gamma + 4j * delta)
    p = 1.0 - np.exp(2.0 * exponent.real)
    lo, med, hi = np.percentile(p, [16.0, 50.0, 84.0])
    return float(lo), float(med), float(hi)


TRAJECTORY_HEADER = (
    "t_s,rho00,rho11,rho22,rhoee,re_rho01,im_rho01,re_rho12,im_rho12"
)


def trajectory_rows(times: np.ndarray, states: Iterable[np.ndarray]) -> list[str]:
    """CSV lines (without header) for a sampled trajectory."""
    rows = []
    for t, rho in zip(times, states):
        rows.append(
            f"{t:.12e},{rho[0, 0].real:.12e},{rho[1, 1].real:.12e},"
            f"{rho[2, 2].real:.12e},{rho[3, 3].real:.12e},"
            f"{rho[0, 1].real:.12e},{rho[0, 1].imag:.12e},"
            f"{rho[1, 2].real:.12e},{rho[1, 2].imag:.12e}"
        )
    return rows
