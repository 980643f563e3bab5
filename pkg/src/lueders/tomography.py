"""Forward-simulated tomography, Choi reconstruction, and statistical tests.

Protocol: the system is prepared in each of the nine states of
:func:`lueders.states.preparation_states`, the channel under study is applied,
and the same nine states serve as fluorescence measurement operators
(outcome 1 means the projector fires).  Cell (i, j) of a dataset holds the
number of 1-outcomes from ``shots`` repetitions with preparation i and
measurement j; the model probabilities are

    p_ij = tr[ chi  |psi_j><psi_j| (x) |psi_i><psi_i|^T ] .

Reconstruction minimizes sum_ij (p_ij - f_ij)^2 over physical Choi matrices.
Positivity is enforced exactly by the factorization chi = T† T with complex
lower-triangular T (81 real parameters); the optimizer is a damped Newton
iteration on those parameters (Gauss-Newton terms plus the exact curvature
of the quadratic factorization, both in closed form) with a gradient-descent
fallback for ill-conditioned normal equations.  Trace preservation, when
requested, is imposed by penalty continuation (weight x10 per stage until
the constraint is met to 1e-8).

The likelihood-ratio test compares the binomial log-likelihood maxima over
all physical channels and over trace-preserving ones; the statistic is
converted to equivalent Gaussian standard deviations through a chi-squared
survival function with (by default) 9 degrees of freedom, one per real
constraint in tr_sys(chi) = I.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import chi2 as _chi2
from scipy.stats import norm as _norm

from .channels import identity_choi, measurement_channel
from .errors import NotConvergedWarning, NotPSD, ParseError, RangeError
from .linalg import hermitize
from .states import depolarize, density, preparation_states

N_SETTINGS = 9
N_PARAMS = 81

_PROB_CLIP = 1e-9  # likelihood clipping for boundary cells
_FEASIBILITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# dataset


@dataclass(frozen=True)
class TomographyDataset:
    """Click counts of the 9x9 tomography grid.

    ``counts[i, j]`` is the number of 1-outcomes for preparation i and
    measurement j (0-based), out of ``shots`` repetitions each.
    """

    counts: np.ndarray
    shots: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.shape != (N_SETTINGS, N_SETTINGS):
            raise RangeError(f"counts must be 9x9, got {counts.shape}")
        if counts.min() < 0 or counts.max() > self.shots:
            raise RangeError("counts must lie in [0, shots]")
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / float(self.shots)


DATASET_HEADER = "i,j,n,N"


def dataset_to_csv(dataset: TomographyDataset, path) -> None:
    lines = [DATASET_HEADER]
    for i in range(N_SETTINGS):
        for j in range(N_SETTINGS):
            lines.append(f"{i + 1},{j + 1},{int(dataset.counts[i, j])},{dataset.shots}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def dataset_from_csv(path) -> TomographyDataset:
    """Parse an ``i,j,n,N`` file; all 81 cells must appear exactly once."""
    counts = np.full((N_SETTINGS, N_SETTINGS), -1, dtype=np.int64)
    shots = None
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != DATASET_HEADER:
        raise ParseError(f"expected header {DATASET_HEADER!r}", line=1)
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 4:
            raise ParseError(f"expected 4 comma-separated fields, got {len(parts)}", line=lineno)
        try:
            i, j, n, total = (int(p) for p in parts)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from exc
        if not (1 <= i <= 9 and 1 <= j <= 9):
            raise RangeError(f"line {lineno}: indices must be in 1..9, got ({i},{j})")
        if n < 0 or n > total:
            raise RangeError(f"line {lineno}: count {n} outside [0, {total}]")
        if shots is None:
            shots = total
        elif total != shots:
            raise ParseError(f"inconsistent shot count {total} != {shots}", line=lineno)
        if counts[i - 1, j - 1] >= 0:
            raise ParseError(f"duplicate cell ({i},{j})", line=lineno)
        counts[i - 1, j - 1] = n
    if shots is None or (counts < 0).any():
        missing = int((counts < 0).sum())
        raise ParseError(f"{missing} of 81 cells missing", line=len(lines))
    return TomographyDataset(counts=counts, shots=shots, provenance={"kind": "loaded", "path": str(path)})


# ---------------------------------------------------------------------------
# probabilities and simulation


def _design_for_preps(prep_rhos) -> np.ndarray:
    """81x81 map from vec(chi) to outcome probabilities, row order (i, j)."""
    projs = [density(psi) for psi in preparation_states()]
    rows = []
    for i in range(N_SETTINGS):
        for j in range(N_SETTINGS):
            m = np.kron(projs[j], prep_rhos[i].T)
            rows.append(m.T.ravel())
    return np.array(rows)


@lru_cache(maxsize=1)
def _pure_design() -> np.ndarray:
    return _design_for_preps([density(psi) for psi in preparation_states()])


def _design_matrix(prep_depolarization: float = 0.0) -> np.ndarray:
    if prep_depolarization == 0.0:
        return _pure_design()
    preps = [depolarize(density(psi), prep_depolarization) for psi in preparation_states()]
    return _design_for_preps(preps)


def probabilities(chi: np.ndarray, prep_depolarization: float = 0.0) -> np.ndarray:
    """9x9 outcome probabilities of a PSD Choi matrix (prep index, meas index)."""
    chi = np.asarray(chi, dtype=complex)
    if np.linalg.eigvalsh(hermitize(chi))[0] < -1e-9:
        raise NotPSD("Choi matrix has an eigenvalue below -1e-9")
    p = (_design_matrix(prep_depolarization) @ chi.ravel()).real
    if p.min() < -1e-9 or p.max() > 1.0 + 1e-9:
        raise ValueError(f"probabilities outside [0,1] beyond tolerance: [{p.min()}, {p.max()}]")
    return np.clip(p, 0.0, 1.0).reshape(N_SETTINGS, N_SETTINGS)


def simulate_dataset(
    chi: np.ndarray,
    shots: int,
    seed: int,
    prep_depolarization: float = 0.0,
) -> TomographyDataset:
    """Draw binomial counts for every grid cell with a seeded generator."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    p = probabilities(chi, prep_depolarization)
    rng = np.random.default_rng(seed)
    counts = rng.binomial(shots, p)
    return TomographyDataset(
        counts=counts,
        shots=shots,
        provenance={
            "kind": "simulated",
            "seed": int(seed),
            "prep_depolarization": float(prep_depolarization),
        },
    )


# ---------------------------------------------------------------------------
# chi = T†T parametrization (T complex lower-triangular, 81 real parameters)

_PARAM_ROWS = []
_PARAM_COLS = []
_PARAM_IMAG = []
for _a in range(N_SETTINGS):
    for _b in range(_a + 1):
        _PARAM_ROWS.append(_a)
        _PARAM_COLS.append(_b)
        _PARAM_IMAG.append(False)
        if _a != _b:
            _PARAM_ROWS.append(_a)
            _PARAM_COLS.append(_b)
            _PARAM_IMAG.append(True)
_PARAM_ROWS = np.array(_PARAM_ROWS)
_PARAM_COLS = np.array(_PARAM_COLS)
_PARAM_IMAG = np.array(_PARAM_IMAG)
assert len(_PARAM_ROWS) == N_PARAMS


def _theta_to_t(theta: np.ndarray) -> np.ndarray:
    t = np.zeros((N_SETTINGS, N_SETTINGS), dtype=complex)
    vals = np.where(_PARAM_IMAG, 1j * theta, theta)
    np.add.at(t, (_PARAM_ROWS, _PARAM_COLS), vals)
    return t


def _t_to_theta(t: np.ndarray) -> np.ndarray:
    entries = t[_PARAM_ROWS, _PARAM_COLS]
    return np.where(_PARAM_IMAG, entries.imag, entries.real).astype(float)


def _theta_from_chi(chi: np.ndarray, jitter: float = 1e-7) -> np.ndarray:
    """Lower-triangular factor seed with T†T ~= chi (chi made PD by a jitter)."""
    a = np.asarray(chi, dtype=complex)[::-1, ::-1] + jitter * np.eye(N_SETTINGS)
    c = np.linalg.cholesky(hermitize(a))
    upper = c[::-1, ::-1]
    return _t_to_theta(upper.conj().T)


def _chi_of_theta(theta: np.ndarray) -> np.ndarray:
    t = _theta_to_t(theta)
    return t.conj().T @ t


def tp_deviation_max(chi: np.ndarray) -> float:
    red = np.einsum("abad->bd", np.asarray(chi).reshape(3, 3, 3, 3)) - np.eye(3)
    return float(np.max(np.abs(red)))


# ---------------------------------------------------------------------------
# damped Newton engine
#
# The probabilities are linear in chi and chi = T†T is quadratic in the
# parameters, so both the Jacobian dp/dtheta and the exact second-order
# Hessian contribution have closed forms.  For a single parameter direction
# E_l (a one-entry lower-triangular matrix, times i for imaginary parts):
#
#     d chi = E_l† T + T† E_l
#     dp_m / dtheta_l        = 2 Re[ conj(alpha_l) (T @ Am^T)[r_l, c_l] ]
#     d2 p_m / dth_l dth_k   = delta(r_l = r_k) 2 Re[ conj(alpha_l) alpha_k
#                                                      Am[c_l, c_k] ]
#
# where Am is the (Hermitian) coefficient matrix of p_m = Re sum Am*chi and
# alpha_l is 1 or i.  The same formulas serve the trace-preservation
# constraint components, which are also linear in chi.

_ALPHA = np.where(_PARAM_IMAG, 1j, 1.0 + 0.0j)
_ROW_GROUPS = [np.where(_PARAM_ROWS == r)[0] for r in range(N_SETTINGS)]


@lru_cache(maxsize=1)
def _constraint_design() -> tuple[np.ndarray, np.ndarray]:
    """Linear functionals (rows) and offsets so that c = Re(A @ vec chi) + off.

    The 9 real components of tr_sys(chi) - I: the three diagonal entries,
    then real and imaginary parts of the (0,1), (0,2), (1,2) entries.
    """
    eye3 = np.eye(3, dtype=complex)
    basis = [np.zeros(3, dtype=complex) for _ in range(3)]
    for b in range(3):
        basis[b][b] = 1.0
    rows, offs = [], []
    for b in range(3):
        k = np.kron(eye3, np.outer(basis[b], basis[b]))
        rows.append(k.T.ravel())
        offs.append(-1.0)
    for b, d in [(0, 1), (0, 2), (1, 2)]:
        m = np.kron(eye3, np.outer(basis[d], basis[b]))
        rows.append((0.5 * (m + m.conj().T)).T.ravel())
        offs.append(0.0)
        rows.append(((m - m.conj().T) / 2j).T.ravel())
        offs.append(0.0)
    return np.array(rows), np.array(offs)


def _jacobian(t: np.ndarray, coeff_stack: np.ndarray) -> np.ndarray:
    """d(values)/d(theta) for values = Re(A @ vec(T†T)); coeff_stack = A as (m,9,9)."""
    c = np.einsum("rb,mcb->mrc", t, coeff_stack)
    gathered = c[:, _PARAM_ROWS, _PARAM_COLS]
    return 2.0 * np.real(np.conj(_ALPHA)[None, :] * gathered)


def _second_order(w: np.ndarray) -> np.ndarray:
    """Exact curvature term sum_m v_m d2(value_m); w = sum_m v_m Am (9x9)."""
    s = np.zeros((N_PARAMS, N_PARAMS))
    for idx in _ROW_GROUPS:
        cols = _PARAM_COLS[idx]
        alpha = _ALPHA[idx]
        block = np.conj(alpha)[:, None] * alpha[None, :] * w[np.ix_(cols, cols)]
        s[np.ix_(idx, idx)] = 2.0 * block.real
    return s


class _Problem:
    """Objective + exact derivatives for one fit (least squares or likelihood)."""

    def __init__(self, design, f, mode, counts=None, shots=None, penalty_mu=0.0):
        self.design = design
        self.coeff = design.reshape(-1, N_SETTINGS, N_SETTINGS)
        self.f = f
        self.mode = mode
        self.counts = counts
        self.shots = shots
        self.mu = penalty_mu
        self.cons_design, self.cons_offsets = _constraint_design()
        self.cons_coeff = self.cons_design.reshape(-1, N_SETTINGS, N_SETTINGS)

    def probs(self, chi: np.ndarray) -> np.ndarray:
        return (self.design @ chi.ravel()).real

    def constraints(self, chi: np.ndarray) -> np.ndarray:
        return (self.cons_design @ chi.ravel()).real + self.cons_offsets

    def data_objective(self, p: np.ndarray) -> float:
        if self.mode == "ls":
            r = p - self.f
            return float(r @ r)
        ph = np.clip(p, _PROB_CLIP, 1.0 - _PROB_CLIP)
        n = self.counts
        return -float(n @ np.log(ph) + (self.shots - n) @ np.log(1.0 - ph))

    def objective(self, theta: np.ndarray) -> float:
        chi = _chi_of_theta(theta)
        obj = self.data_objective(self.probs(chi))
        if self.mu:
            c = self.constraints(chi)
            obj += self.mu * float(c @ c)
        return obj

    def grad_and_hessian(self, theta: np.ndarray):
        t = _theta_to_t(theta)
        chi = t.conj().T @ t
        p = self.probs(chi)
        jp = _jacobian(t, self.coeff)

        if self.mode == "ls":
            r = p - self.f
            grad = 2.0 * (jp.T @ r)
            hess = 2.0 * (jp.T @ jp)
            curvature_weights = 2.0 * r
        else:
            ph = np.clip(p, _PROB_CLIP, 1.0 - _PROB_CLIP)
            dldp = -self.counts / ph + (self.shots - self.counts) / (1.0 - ph)
            w_obs = self.counts / ph**2 + (self.shots - self.counts) / (1.0 - ph) ** 2
            grad = jp.T @ dldp
            hess = (jp * w_obs[:, None]).T @ jp
            curvature_weights = dldp
        hess = hess + _second_order(
            (curvature_weights @ self.design).reshape(N_SETTINGS, N_SETTINGS)
        )

        if self.mu:
            c = self.constraints(chi)
            jc = _jacobian(t, self.cons_coeff)
            grad = grad + 2.0 * self.mu * (jc.T @ c)
            hess = hess + 2.0 * self.mu * (jc.T @ jc)
            hess = hess + _second_order(
                (2.0 * self.mu * c @ self.cons_design).reshape(N_SETTINGS, N_SETTINGS)
            )
        return grad, hess


def _minimize(
    problem: _Problem,
    theta0: np.ndarray,
    grad_tol: float = 1e-10,
    obj_tol: float = 1e-14,
    max_iter: int = 300,
):
    """Damped Newton iteration with a gradient-descent fallback.

    Levenberg-style damping with the Nielsen update schedule; falls back to
    plain gradient descent with backtracking when the damped normal equations
    produce no usable step.  Returns ``(theta, objective, iterations,
    converged)``; converged means the gradient max-norm fell below
    ``grad_tol``, the objective decrease fell below ``obj_tol``, or no
    descent direction remains.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    obj = problem.objective(theta)
    lam = 1e-6
    nu = 2.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        grad, hess = problem.grad_and_hessian(theta)
        if np.max(np.abs(grad)) < grad_tol:
            converged = True
            break
        scale = max(float(np.mean(np.abs(np.diag(hess)))), 1e-30)
        step_found = False
        trial = trial_obj = None
        while lam <= 1e20:
            try:
                delta = np.linalg.solve(hess + lam * scale * np.eye(N_PARAMS), -grad)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None and np.all(np.isfinite(delta)):
                candidate = theta + delta
                candidate_obj = problem.objective(candidate)
                if candidate_obj < obj:
                    gain_den = -(grad @ delta + 0.5 * delta @ (hess @ delta))
                    gain = (obj - candidate_obj) / gain_den if gain_den > 0 else 0.0
                    lam = max(lam * max(1.0 / 3.0, 1.0 - (2.0 * gain - 1.0) ** 3), 1e-12)
                    nu = 2.0
                    trial, trial_obj = candidate, candidate_obj
                    step_found = True
                    break
            lam *= nu
            nu *= 2.0
        lam = min(lam, 1e20)
        if not step_found:
            # fallback: steepest descent with backtracking line search
            direction = -grad / (np.linalg.norm(grad) + 1e-300)
            alpha = 1.0
            for _ in range(60):
                candidate = theta + alpha * direction
                candidate_obj = problem.objective(candidate)
                if candidate_obj < obj:
                    trial, trial_obj = candidate, candidate_obj
                    step_found = True
                    break
                alpha *= 0.5
        if not step_found:
            converged = True  # no descent direction left: stationary point
            break
        decrease = obj - trial_obj
        theta, obj = trial, trial_obj
        if decrease < obj_tol:
            converged = True
            break
    return theta, obj, it, converged


def _default_start_thetas(n_starts: int, seed: int) -> list[np.ndarray]:
    starts = [
        _theta_from_chi(identity_choi()),
        _theta_from_chi(measurement_channel(0.0)),
    ]
    rng = np.random.default_rng((int(seed), 0xC0FFEE))
    while len(starts) < n_starts:
        starts.append(rng.normal(0.0, 0.19, N_PARAMS))
    return starts[:n_starts]


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class ReconstructionResult:
    """Fitted Choi matrix plus fit diagnostics."""

    chi: np.ndarray
    residual: float  # sum of squared probability residuals (penalty excluded)
    tp_deviation: float  # max-norm of tr_sys(chi) - I
    iterations: int
    converged: bool
    theta: np.ndarray | None = field(repr=False, default=None)
    bootstrap: "BootstrapIntervals | None" = None


def _coerce_frequencies(data) -> tuple[np.ndarray, int | None]:
    if isinstance(data, TomographyDataset):
        return data.frequencies.ravel().astype(float), data.shots
    f = np.asarray(data, dtype=float)
    if f.shape != (N_SETTINGS, N_SETTINGS):
        raise RangeError(f"expected a TomographyDataset or 9x9 frequencies, got shape {f.shape}")
    return f.ravel(), None


def reconstruct(
    data,
    n_starts: int = 5,
    seed: int = 0,
    start_chi: np.ndarray | None = None,
    max_iter: int = 300,
) -> ReconstructionResult:
    """Least-squares Choi reconstruction over all physical (PSD) channels.

    ``data`` is a :class:`TomographyDataset` or a raw 9x9 frequency grid.
    Runs ``n_starts`` optimizations (identity seed, ideal-measurement seed,
    then random seeds; or just ``start_chi`` when given) and keeps the best.
    """
    f, _ = _coerce_frequencies(data)
    problem = _Problem(_pure_design(), f, "ls")
    if start_chi is not None:
        starts = [_theta_from_chi(start_chi)] + _default_start_thetas(n_starts - 1, seed)
    else:
        starts = _default_start_thetas(n_starts, seed)
    best = None
    for theta0 in starts:
        theta, obj, it, conv = _minimize(problem, theta0, max_iter=max_iter)
        if best is None or obj < best[1]:
            best = (theta, obj, it, conv)
    theta, obj, it, conv = best
    if not conv:
        warnings.warn("reconstruction hit its iteration limit", NotConvergedWarning, stacklevel=2)
    chi = _chi_of_theta(theta)
    return ReconstructionResult(
        chi=chi,
        residual=obj,
        tp_deviation=tp_deviation_max(chi),
        iterations=it,
        converged=conv,
        theta=theta,
    )


def reconstruct_tp(
    data,
    n_starts: int = 5,
    seed: int = 0,
    max_iter: int = 300,
    feasibility_tol: float = _FEASIBILITY_TOL,
) -> ReconstructionResult:
    """Like :func:`reconstruct` but constrained to trace-preserving channels.

    The constraint is enforced by penalty continuation: the penalty weight
    grows tenfold per stage until ``tr_sys(chi)`` matches the identity to
    ``feasibility_tol`` in max norm.
    """
    f, _ = _coerce_frequencies(data)
    base = reconstruct(data, n_starts=n_starts, seed=seed, max_iter=max_iter)
    theta = base.theta
    conv = base.converged
    it_total = base.iterations
    chi = base.chi
    mu = 10.0
    while mu <= 1e15:
        problem = _Problem(_pure_design(), f, "ls", penalty_mu=mu)
        theta, _, it, conv = _minimize(problem, theta, max_iter=max_iter)
        it_total += it
        chi = _chi_of_theta(theta)
        if tp_deviation_max(chi) < feasibility_tol:
            break
        mu *= 10.0
    dev = tp_deviation_max(chi)
    ok = conv and dev < feasibility_tol
    if not ok:
        warnings.warn(
            f"TP-constrained fit stopped with deviation {dev:.2e}",
            NotConvergedWarning,
            stacklevel=2,
        )
    p = (_pure_design() @ chi.ravel()).real
    return ReconstructionResult(
        chi=chi,
        residual=float(np.sum((p - f) ** 2)),
        tp_deviation=dev,
        iterations=it_total,
        converged=ok,
        theta=theta,
    )


# ---------------------------------------------------------------------------
# trace-preservation likelihood-ratio test


def _ml_fit(counts, shots, theta_starts, penalty_mu=0.0, max_iter=300):
    f = counts.astype(float) / shots
    problem = _Problem(_pure_design(), f, "ml", counts=counts, shots=shots, penalty_mu=penalty_mu)
    best = None
    for theta0 in theta_starts:
        theta, _, it, conv = _minimize(problem, theta0, grad_tol=1e-8, obj_tol=1e-10, max_iter=max_iter)
        data_obj = problem.data_objective(problem.probs(_chi_of_theta(theta)))
        if best is None or data_obj < best[1]:
            best = (theta, data_obj, it, conv)
    return best


def tp_likelihood_ratio_test(
    dataset: TomographyDataset,
    dof: int = 9,
    seed: int = 0,
    max_iter: int = 300,
) -> float:
    """Significance (in Gaussian standard deviations) of trace-preservation violation.

    lambda = 2 [max log-likelihood over PSD chi - max over PSD and TP chi],
    referred to a chi-squared distribution with ``dof`` degrees of freedom
    (the 9 real constraints of tr_sys(chi) = I on a Hermitian chi) and mapped
    to an equivalent one-sided z-value, floored at 0 and capped at 100.
    """
    counts = dataset.counts.ravel()
    shots = dataset.shots

    ls = reconstruct(dataset, n_starts=5, seed=seed, max_iter=max_iter)
    starts = [ls.theta, _theta_from_chi(measurement_channel(0.0))]
    theta_psd, nll_psd, _, conv_psd = _ml_fit(counts, shots, starts, max_iter=max_iter)

    theta = theta_psd.copy()
    conv_tp = False
    nll_tp = None
    mu = 10.0
    f = counts.astype(float) / shots
    while mu <= 1e15:
        problem = _Problem(_pure_design(), f, "ml", counts=counts, shots=shots, penalty_mu=mu)
        theta, _, _, conv_tp = _minimize(problem, theta, grad_tol=1e-8, obj_tol=1e-10, max_iter=max_iter)
        chi = _chi_of_theta(theta)
        nll_tp = problem.data_objective(problem.probs(chi))
        if tp_deviation_max(chi) < _FEASIBILITY_TOL:
            break
        mu *= 10.0
    if not (conv_psd and conv_tp):
        warnings.warn("a likelihood fit hit its iteration limit", NotConvergedWarning, stacklevel=2)

    statistic = max(2.0 * (nll_tp - nll_psd), 0.0)
    p_value = float(_chi2.sf(statistic, dof))
    if p_value <= 0.0:
        return 100.0
    return float(min(max(_norm.isf(p_value), 0.0), 100.0))


# ---------------------------------------------------------------------------
# bootstrap


@dataclass(frozen=True)
class BootstrapIntervals:
    """Element-wise 68% intervals (16th/84th percentiles) of the fitted Choi."""

    re_lo: np.ndarray
    re_hi: np.ndarray
    im_lo: np.ndarray
    im_hi: np.ndarray
    resamples: int

    def contains(self, chi: np.ndarray) -> np.ndarray:
        """Boolean 9x9x2 mask: does each (real, imag) element fall inside?"""
        chi = np.asarray(chi, dtype=complex)
        re_in = (chi.real >= self.re_lo) & (chi.real <= self.re_hi)
        im_in = (chi.imag >= self.im_lo) & (chi.imag <= self.im_hi)
        return np.stack([re_in, im_in], axis=-1)


def bootstrap_uncertainty(
    dataset: TomographyDataset,
    resamples: int = 200,
    seed: int = 0,
    max_iter: int = 200,
) -> BootstrapIntervals:
    """Parametric bootstrap of the reconstruction.

    Counts are redrawn from Binomial(shots, f_ij) with a seeded generator and
    refit (warm-started from the full-data fit); elementwise 16th and 84th
    percentiles of the refits are reported.
    """
    if resamples < 100:
        raise ValueError("need at least 100 resamples")
    base = reconstruct(dataset, seed=seed)
    f = dataset.frequencies
    rng = np.random.default_rng((int(seed), 0xB007))
    res = np.empty((resamples, N_SETTINGS, N_SETTINGS), dtype=complex)
    for b in range(resamples):
        counts = rng.binomial(dataset.shots, f)
        fit = reconstruct(
            TomographyDataset(counts=counts, shots=dataset.shots, provenance={"kind": "bootstrap"}),
            n_starts=1,
            start_chi=base.chi,
            max_iter=max_iter,
        )
        res[b] = fit.chi
    re_lo, re_hi = np.percentile(res.real, [16.0, 84.0], axis=0)
    im_lo, im_hi = np.percentile(res.imag, [16.0, 84.0], axis=0)
    return BootstrapIntervals(re_lo=re_lo, re_hi=re_hi, im_lo=im_lo, im_hi=im_hi, resamples=resamples)
