"""Dense complex linear algebra for the small matrices used everywhere else.

Everything here operates on plain ``numpy`` complex arrays (row-major, dense);
the systems in this package never exceed 16x16.  Matrices are exchanged as
JSON objects ``{"rows": n, "cols": m, "re": [...], "im": [...]}`` with entries
listed row by row.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput, NotPSD

HERMITICITY_TOL = 1e-10


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m))) <= tol


def hermitize(m: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian part, (M + M†)/2."""
    return 0.5 * (m + dagger(m))


def tensor(*ms: np.ndarray) -> np.ndarray:
    """Kronecker product of the given matrices, left to right."""
    out = np.asarray(ms[0], dtype=complex)
    for m in ms[1:]:
        out = np.kron(out, m)
    return out


def herm_eig(m: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and unitary ``v``
    such that ``m = v @ diag(w) @ v†``.  Raises :class:`NonHermitianInput`
    if the input is not Hermitian within ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - dagger(m))) > tol:
        raise NonHermitianInput(
            f"matrix deviates from its conjugate transpose by more than {tol}"
        )
    w, v = np.linalg.eigh(hermitize(m))
    return w, v


def psd_sqrt(m: np.ndarray, neg_tol: float = 1e-9) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Eigenvalues in ``[-neg_tol, 0)`` are clipped to zero (shot noise in
    reconstructed matrices routinely produces them); anything below
    ``-neg_tol`` raises :class:`NotPSD`.
    """
    w, v = herm_eig(m)
    if w[0] < -neg_tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} below -{neg_tol:.0e}")
    w = np.clip(w, 0.0, None)
    return hermitize((v * np.sqrt(w)) @ dagger(v))


def min_eigval(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(m))[0])


def partial_trace(m: np.ndarray, dims: tuple[int, int], subsystem: str) -> np.ndarray:
    """Trace out one tensor factor of a matrix on a bipartite space.

    ``dims = (d_a, d_b)`` gives the factor dimensions; ``subsystem`` names
    the factor that is traced *out*, ``"A"`` (first) or ``"B"`` (second).
    """
    d_a, d_b = dims
    m = np.asarray(m)
    if m.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(
            f"matrix shape {m.shape} does not match dims {d_a}x{d_b}"
        )
    t = m.reshape(d_a, d_b, d_a, d_b)
    if subsystem == "A":
        return np.einsum("abad->bd", t)
    if subsystem == "B":
        return np.einsum("abcb->ac", t)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def matrix_to_json(m: np.ndarray) -> dict:
    """Row-major JSON form ``{"rows":., "cols":., "re":[...], "im":[...]}``."""
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch(
            f"entry count {re.size}/{im.size} does not match {rows}x{cols}"
        )
    return (re + 1j * im).reshape(rows, cols)


def abs_phase_rows(m: np.ndarray, labels: list[str]) -> list[tuple[str, str, float, float]]:
    """Flatten a matrix to ``(row_label, col_label, abs, phase)`` tuples.

    Used for the bar-chart CSV exports; phases of entries with magnitude
    below 1e-12 are reported as 0 rather than numerical noise.
    """
    m = np.asarray(m, dtype=complex)
    rows = []
    for a, la in enumerate(labels):
        for b, lb in enumerate(labels):
            z = m[a, b]
            mag = abs(z)
            phase = float(np.angle(z)) if mag > 1e-12 else 0.0
            rows.append((la, lb, float(mag), phase))
    return rows
