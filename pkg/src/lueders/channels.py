"""Quantum channels on the qutrit and their Choi-matrix representation.

Index ordering
--------------
A channel L is stored as its Choi matrix

    chi = sum_ij  L[|i><j|]_sys  (x)  |i><j|_aux ,

a 9x9 PSD matrix on system (x) auxiliary space with composite index
``3*i_sys + j_aux`` (row-major).  Inversion rule:

    L[rho] = tr_aux[ chi (I (x) rho^T) ] .

Trace-preserving channels satisfy ``tr_sys(chi) = I_aux`` and carry trace 3;
Choi matrices are kept un-normalized (trace 3) throughout, and the process
fidelity rescales by 1/9 accordingly.  This ordering is the single most
bug-prone convention in the package, so every serialization records it.

The measurement channel family
------------------------------
``measurement_channel(g0)`` is the one-parameter family interpolating between
the identity process (g0 = 1) and the ideal coherence-preserving measurement
of the observable |0><0| (g0 = 0).  It leaves populations and the coherence
between |1> and |2> untouched and scales the coherences between |0> and the
other levels by g0.  Equivalently it is the Kraus pair {sqrt(E1), G sqrt(E0)}
with effects E1 = (1-|g0|^2)|0><0|, E0 = 1 - E1 and phase unitary
G = e^{i arg g0}|0><0| + |1><1| + |2><2|.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidG0,
    InvalidProjectors,
    NonOrthonormalBasis,
    NotPSD,
    NotTracePreservingWarning,
)
from .linalg import (
    abs_phase_rows,
    dagger,
    hermitize,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    psd_sqrt,
)

CHOI_LABELS = [f"{i}{j}" for i in range(3) for j in range(3)]
DENSITY_LABELS = ["0", "1", "2"]


def kraus_channel(operators, tp_tol: float = 1e-10) -> np.ndarray:
    """Choi matrix of the channel rho -> sum_k K_k rho K_k†.

    Warns :class:`NotTracePreservingWarning` when sum K†K deviates from the
    identity by more than ``tp_tol`` (sub-normalized channels show up in
    reconstruction fits and must survive).
    """
    ops = [np.asarray(k, dtype=complex) for k in operators]
    d = ops[0].shape[0]
    for k in ops:
        if k.shape != (d, d):
            raise DimensionMismatch(f"Kraus operators must share shape ({d},{d})")
    total = sum(dagger(k) @ k for k in ops)
    if np.max(np.abs(total - np.eye(d))) > tp_tol:
        warnings.warn(
            "Kraus set is not trace preserving; keeping it as given",
            NotTracePreservingWarning,
            stacklevel=2,
        )
    chi = np.zeros((d * d, d * d), dtype=complex)
    for k in ops:
        v = k.ravel()  # row-major vec matches the sys (x) aux index ordering
        chi += np.outer(v, v.conj())
    return chi


def lueders_channel(projectors) -> np.ndarray:
    """Choi matrix of the ideal measurement rho -> sum_k P_k rho P_k.

    The projectors must be mutually orthogonal and sum to the identity
    (checked to 1e-10), otherwise :class:`InvalidProjectors` is raised.
    """
    ps = [np.asarray(p, dtype=complex) for p in projectors]
    d = ps[0].shape[0]
    for a, pa in enumerate(ps):
        for b, pb in enumerate(ps):
            want = pa if a == b else np.zeros((d, d))
            if np.max(np.abs(pa @ pb - want)) > 1e-10:
                raise InvalidProjectors(
                    f"projectors {a} and {b} violate P_a P_b = delta_ab P_a"
                )
    if np.max(np.abs(sum(ps) - np.eye(d))) > 1e-10:
        raise InvalidProjectors("projectors do not sum to identity")
    return kraus_channel(ps)


def identity_choi(d: int = 3) -> np.ndarray:
    """Choi matrix of the identity channel, |xi'><xi'| with xi' = sum_i |ii>."""
    return kraus_channel([np.eye(d, dtype=complex)])


@dataclass(frozen=True)
class MeasurementModel:
    """Generalized-measurement view of the channel family, parametrized by g0."""

    g0: complex

    def __post_init__(self):
        if abs(self.g0) > 1.0 + 1e-12:
            raise InvalidG0(f"|g0| = {abs(self.g0)} exceeds 1")

    @property
    def p_scatt(self) -> float:
        return min(max(1.0 - abs(self.g0) ** 2, 0.0), 1.0)

    @property
    def phase(self) -> float:
        return float(np.angle(self.g0))

    @property
    def e1(self) -> np.ndarray:
        e = np.zeros((3, 3), dtype=complex)
        e[0, 0] = self.p_scatt
        return e

    @property
    def e0(self) -> np.ndarray:
        return np.eye(3, dtype=complex) - self.e1

    @property
    def g_unitary(self) -> np.ndarray:
        g = np.eye(3, dtype=complex)
        g[0, 0] = np.exp(1j * self.phase)
        return g

    def kraus_operators(self) -> list[np.ndarray]:
        """The canonical pair {sqrt(E1), G sqrt(E0)}."""
        return [psd_sqrt(self.e1), self.g_unitary @ psd_sqrt(self.e0)]


def measurement_channel(g0: complex) -> np.ndarray:
    """Model Choi matrix of the measurement pulse.

    chi = |00><00| + |xi><xi| + g0 |00><xi| + g0* |xi><00|,  xi = |11> + |22>.
    """
    if abs(g0) > 1.0 + 1e-12:
        raise InvalidG0(f"|g0| = {abs(g0)} exceeds 1")
    v00 = np.zeros(9, dtype=complex)
    v00[0] = 1.0
    xi = np.zeros(9, dtype=complex)
    xi[4] = 1.0  # |11>
    xi[8] = 1.0  # |22>
    return (
        np.outer(v00, v00)
        + np.outer(xi, xi)
        + g0 * np.outer(v00, xi)
        + np.conj(g0) * np.outer(xi, v00)
    )


def apply_channel(chi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Apply a channel in Choi form: L[rho] = tr_aux[chi (I (x) rho^T)]."""
    chi = np.asarray(chi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if rho.shape != (d, d) or chi.shape != (d * d, d * d):
        raise DimensionMismatch(
            f"chi shape {chi.shape} incompatible with state shape {rho.shape}"
        )
    return partial_trace(chi @ np.kron(np.eye(d), rho.T), (d, d), "B")


def pointer_model_channel(
    hamiltonian: np.ndarray,
    tau: float,
    pointer_init: np.ndarray,
    pointer_basis,
) -> np.ndarray:
    """Channel induced by coupling to a pointer and reading the pointer out.

    The system and pointer evolve under ``hamiltonian`` (in rad/s, i.e. units
    of hbar) for time ``tau``; the pointer starts in ``pointer_init`` and is
    measured non-selectively in ``pointer_basis``:

        rho -> sum_j <w_j| e^{-iHt} (rho (x) |Phi><Phi|) e^{+iHt} |w_j> .

    Because the basis is complete, the sum equals the pointer partial trace;
    what shapes the channel is the interaction and the pointer's initial state.
    """
    phi = np.asarray(pointer_init, dtype=complex)
    d_p = phi.size
    if d_p > 4:
        raise DimensionMismatch(f"pointer dimension {d_p} exceeds 4")
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % d_p:
        raise DimensionMismatch(
            f"hamiltonian shape {h.shape} incompatible with pointer dim {d_p}"
        )
    d_s = h.shape[0] // d_p
    if abs(np.vdot(phi, phi) - 1.0) > 1e-10:
        raise NonOrthonormalBasis("pointer_init is not normalized")
    basis = [np.asarray(w, dtype=complex) for w in pointer_basis]
    gram = np.array([[np.vdot(a, b) for b in basis] for a in basis])
    if len(basis) != d_p or np.max(np.abs(gram - np.eye(d_p))) > 1e-10:
        raise NonOrthonormalBasis("pointer basis is not orthonormal and complete")
    if np.max(np.abs(h - dagger(h))) > 1e-10:
        raise NonOrthonormalBasis("hamiltonian must be Hermitian")

    u = scipy.linalg.expm(-1j * h * tau).reshape(d_s, d_p, d_s, d_p)
    kraus = [np.einsum("p,apbq,q->ab", w.conj(), u, phi) for w in basis]
    return kraus_channel(kraus)


def process_fidelity(chi_a: np.ndarray, chi_b: np.ndarray, psd_tol: float = 1e-9) -> float:
    """Uhlmann fidelity of two Choi matrices, rescaled by 1/9.

    F = (1/9) [tr sqrt( sqrt(chi_a) chi_b sqrt(chi_a) )]^2, symmetric in its
    arguments up to numerical noise.  Raises :class:`NotPSD` when either input
    has an eigenvalue below ``-psd_tol``.
    """
    sa = psd_sqrt(chi_a, neg_tol=psd_tol)
    if np.linalg.eigvalsh(hermitize(chi_b))[0] < -psd_tol:
        raise NotPSD("second argument is not positive semidefinite")
    inner = hermitize(sa @ chi_b @ sa)
    w = np.linalg.eigvalsh(inner)
    # rank-deficient products carry O(eps)-sized noise eigenvalues whose
    # square roots would dominate the error; cut them relative to the largest
    cutoff = max(float(w[-1]), 0.0) * 1e-12
    w = np.where(w > cutoff, w, 0.0)
    return float(np.sum(np.sqrt(w)) ** 2 / 9.0)


def kraus_from_choi(chi: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Kraus operators of a PSD Choi matrix (eigenvalues above ``tol`` kept)."""
    chi = np.asarray(chi, dtype=complex)
    n = chi.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionMismatch(f"Choi dimension {n} is not a perfect square")
    w, v = np.linalg.eigh(hermitize(chi))
    if w[0] < -1e-9:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e}")
    return [
        (np.sqrt(w[k]) * v[:, k]).reshape(d, d) for k in range(n) if w[k] > tol
    ]


def compose(chi_second: np.ndarray, chi_first: np.ndarray) -> np.ndarray:
    """Choi matrix of the composition: apply ``chi_first``, then ``chi_second``."""
    first = kraus_from_choi(chi_first)
    second = kraus_from_choi(chi_second)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotTracePreservingWarning)
        chi = kraus_channel([a @ b for a in second for b in first])
    return chi


def tp_deviation(chi: np.ndarray) -> float:
    """Max-norm distance of tr_sys(chi) from the identity."""
    d = int(round(np.sqrt(chi.shape[0])))
    return float(np.max(np.abs(partial_trace(chi, (d, d), "A") - np.eye(d))))


def choi_to_json(chi: np.ndarray, g0: complex | None = None) -> dict:
    """Matrix JSON plus the basis-ordering metadata (and g0 when known)."""
    obj = matrix_to_json(chi)
    obj["basis"] = "sys⊗aux"
    if g0 is not None:
        obj["g0"] = {"re": float(np.real(g0)), "im": float(np.imag(g0))}
    return obj


def choi_from_json(obj: dict) -> np.ndarray:
    return matrix_from_json(obj)


def choi_abs_phase_rows(chi: np.ndarray) -> list[tuple[str, str, float, float]]:
    """81 bar-chart rows (row_label, col_label, abs, phase) for a Choi matrix."""
    return abs_phase_rows(chi, CHOI_LABELS)


def density_abs_phase_rows(rho: np.ndarray) -> list[tuple[str, str, float, float]]:
    """9 bar-chart rows for a qutrit density matrix."""
    return abs_phase_rows(rho, DENSITY_LABELS)
