"""Qutrit states and the nine-state preparation/measurement set.

The qutrit basis is {|0>, |1>, |2>}.  Preparations are built from two-level
rotations R^l_n(angle) acting on the subspace spanned by |0> and |l>, with
the convention

    R_n(angle) = exp(-i * angle * sigma_n / 2),   sigma_{-x} = -sigma_x,

chosen so that R^1_y(pi)|0> = |1> and R^1_{-x}(pi/2)|0> = (|0> + i|1>)/sqrt(2).
Pulse sequences are written left to right but applied right to left, i.e. the
rightmost pulse hits the state first.

The nine target states:

    1: |0>                  4: (|0> + |1>)/sqrt2    7: (|0> + i|2>)/sqrt2
    2: |1>                  5: (|0> + i|1>)/sqrt2   8: (|1> + |2>)/sqrt2
    3: |2>                  6: (|0> + |2>)/sqrt2    9: (|1> + i|2>)/sqrt2

Their projectors are linearly independent as operators, which makes the set
tomographically complete for both preparation and measurement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotNormalized
from .linalg import matrix_to_json

_SIGMA = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


class Pulse(NamedTuple):
    level: int  # 1 or 2
    axis: str  # "x", "-x", "y", "-y"
    angle: float  # radians


def ket(i: int) -> np.ndarray:
    v = np.zeros(3, dtype=complex)
    v[i] = 1.0
    return v


def rotation_unitary(level: int, axis: str, angle: float) -> np.ndarray:
    """3x3 unitary rotating the {|0>, |level>} subspace, identity elsewhere."""
    if level not in (1, 2):
        raise ValueError(f"level must be 1 or 2, got {level}")
    sign = -1.0 if axis.startswith("-") else 1.0
    sigma = sign * _SIGMA[axis.lstrip("-")]
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    block = c * np.eye(2) - 1j * s * sigma
    u = np.eye(3, dtype=complex)
    u[0, 0] = block[0, 0]
    u[0, level] = block[0, 1]
    u[level, 0] = block[1, 0]
    u[level, level] = block[1, 1]
    return u


@dataclass(frozen=True)
class PreparationUnitary:
    """One entry of the nine-state set: pulse sequence and its 3x3 unitary."""

    index: int  # 1-based
    pulses: tuple[Pulse, ...]  # written order; applied right to left
    matrix: np.ndarray

    @property
    def state(self) -> np.ndarray:
        """The prepared state, matrix @ |0>."""
        return self.matrix[:, 0].copy()


_PULSE_TABLE: list[tuple[Pulse, ...]] = [
    (),
    (Pulse(1, "y", np.pi),),
    (Pulse(2, "y", np.pi),),
    (Pulse(1, "y", np.pi / 2),),
    (Pulse(1, "-x", np.pi / 2),),
    (Pulse(2, "y", np.pi / 2),),
    (Pulse(2, "-x", np.pi / 2),),
    (Pulse(2, "y", np.pi), Pulse(1, "y", np.pi / 2)),
    # +x here (not -x) so the composed state is (|1> + i|2>)/sqrt2 under the
    # sign convention above; -x would land on the orthogonal (|1> - i|2>)/sqrt2.
    (Pulse(2, "y", np.pi), Pulse(1, "x", np.pi / 2)),
]


def compose_pulses(pulses: tuple[Pulse, ...]) -> np.ndarray:
    """Multiply pulse unitaries so that the rightmost pulse acts first."""
    u = np.eye(3, dtype=complex)
    for p in pulses:
        u = u @ rotation_unitary(p.level, p.axis, p.angle)
    return u


def preparation_set() -> list[PreparationUnitary]:
    """The nine preparation unitaries, index 1..9."""
    return [
        PreparationUnitary(index=j + 1, pulses=pulses, matrix=compose_pulses(pulses))
        for j, pulses in enumerate(_PULSE_TABLE)
    ]


def preparation_states() -> list[np.ndarray]:
    """The nine prepared kets U_j |0>, index order 1..9."""
    return [p.state for p in preparation_set()]


def density(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rank-1 density matrix |psi><psi| of a normalized pure state."""
    psi = np.asarray(psi, dtype=complex)
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > tol:
        raise NotNormalized(f"state norm^2 = {norm2!r}, expected 1")
    return np.outer(psi, psi.conj())


def depolarize(rho: np.ndarray, strength: float) -> np.ndarray:
    """Mix a qutrit state with identity/3: (1-s) rho + s/3 * I.

    Models imperfect state preparation; strength 0 is a no-op.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"depolarization strength must be in [0, 1], got {strength}")
    d = rho.shape[0]
    return (1.0 - strength) * rho + (strength / d) * np.eye(d, dtype=complex)


def state_to_json(psi: np.ndarray) -> dict:
    psi = np.asarray(psi, dtype=complex)
    return {"re": psi.real.tolist(), "im": psi.imag.tolist()}


def state_from_json(obj: dict) -> np.ndarray:
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


def preparation_set_to_json() -> list[dict]:
    """Matrix JSON for each preparation unitary plus its pulse annotations."""
    out = []
    for prep in preparation_set():
        entry = matrix_to_json(prep.matrix)
        entry["index"] = prep.index
        entry["pulses"] = [
            {"level": p.level, "axis": p.axis, "angle": p.angle} for p in prep.pulses
        ]
        out.append(entry)
    return out
