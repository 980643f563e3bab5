import numpy as np
import pytest

from lueders import channels, states, tomography
from lueders.errors import NotPSD, ParseError, RangeError
from lueders.tomography import (
    TomographyDataset,
    _minimize,
    _Problem,
    _pure_design,
    _theta_from_chi,
)


def dataset_from_probabilities(chi, shots=1000):
    """Counts rounded from exact probabilities (nearly noiseless)."""
    p = tomography.probabilities(chi)
    return TomographyDataset(counts=np.round(p * shots).astype(int), shots=shots)


# --- probabilities ---------------------------------------------------------------


def test_probabilities_identity_channel_are_overlaps():
    kets = states.preparation_states()
    overlap = np.array([[abs(np.vdot(kets[j], kets[i])) ** 2 for j in range(9)] for i in range(9)])
    p = tomography.probabilities(channels.identity_choi())
    assert np.max(np.abs(p - overlap)) < 1e-12
    assert np.allclose(np.diag(p), 1.0, atol=1e-12)


def test_probabilities_ideal_measurement_named_cells():
    p = tomography.probabilities(channels.measurement_channel(0.0))
    assert abs(p[8, 8] - 1.0) < 1e-12  # (|1>+i|2>)/sqrt2 coherence preserved
    assert abs(p[6, 6] - 0.5) < 1e-12  # (|0>+i|2>)/sqrt2 coherence destroyed


def test_probabilities_rejects_non_psd():
    with pytest.raises(NotPSD):
        tomography.probabilities(np.diag([1.0] * 8 + [-1.0]).astype(complex))


def test_probabilities_stay_in_unit_interval_for_subnormalized_chi():
    chi = 0.5 * channels.measurement_channel(0.3)
    p = tomography.probabilities(chi)
    assert p.min() >= 0.0 and p.max() <= 1.0


# --- simulation -------------------------------------------------------------------


def test_simulate_dataset_is_deterministic():
    chi = channels.measurement_channel(0.5)
    a = tomography.simulate_dataset(chi, 1000, seed=42)
    b = tomography.simulate_dataset(chi, 1000, seed=42)
    assert np.array_equal(a.counts, b.counts)
    assert a.provenance["kind"] == "simulated" and a.provenance["seed"] == 42


def test_simulate_dataset_extreme_probabilities():
    ds = tomography.simulate_dataset(channels.identity_choi(), 500, seed=1)
    assert np.all(np.diag(ds.counts) == 500)  # p = 1 cells
    assert ds.counts[0, 1] == 0 and ds.counts[0, 2] == 0  # orthogonal cells, p = 0


def test_dataset_validation():
    with pytest.raises(RangeError):
        TomographyDataset(counts=np.full((9, 9), 1500), shots=1000)
    with pytest.raises(RangeError):
        TomographyDataset(counts=np.zeros((3, 3)), shots=10)


# --- dataset CSV round trip ---------------------------------------------------------


def test_dataset_csv_round_trip(tmp_path):
    ds = tomography.simulate_dataset(channels.measurement_channel(0.7), 1000, seed=9)
    path = tmp_path / "data.csv"
    tomography.dataset_to_csv(ds, path)
    assert len(path.read_text().splitlines()) == 82
    back = tomography.dataset_from_csv(path)
    assert np.array_equal(back.counts, ds.counts)
    assert back.shots == ds.shots
    assert back.provenance["kind"] == "loaded"


def test_dataset_csv_rejects_count_above_shots(tmp_path):
    path = tmp_path / "bad.csv"
    lines = ["i,j,n,N"] + [f"{i},{j},0,1000" for i in range(1, 10) for j in range(1, 10)]
    lines[1] = "1,1,1500,1000"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(RangeError):
        tomography.dataset_from_csv(path)


def test_dataset_csv_parse_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("i,j,n,N\n1,1,3\n")
    with pytest.raises(ParseError) as err:
        tomography.dataset_from_csv(path)
    assert err.value.line == 2
    path.write_text("wrong,header\n")
    with pytest.raises(ParseError):
        tomography.dataset_from_csv(path)
    path.write_text("i,j,n,N\n1,1,3,1000\n")
    with pytest.raises(ParseError):  # 80 missing cells
        tomography.dataset_from_csv(path)


# --- optimizer internals --------------------------------------------------------------


def interior_theta():
    chi = 0.9 * channels.measurement_channel(0.6) + (0.1 / 3.0) * np.eye(9)
    return _theta_from_chi(chi)


def numeric_gradient(problem, theta, h=1e-6):
    g = np.empty(theta.size)
    for k in range(theta.size):
        tp, tm = theta.copy(), theta.copy()
        tp[k] += h
        tm[k] -= h
        g[k] = (problem.objective(tp) - problem.objective(tm)) / (2.0 * h)
    return g


@pytest.mark.parametrize("mu", [0.0, 11.0])
def test_least_squares_gradient_matches_finite_differences(mu):
    ds = tomography.simulate_dataset(channels.measurement_channel(0.6), 1000, seed=2)
    problem = _Problem(_pure_design(), ds.frequencies.ravel(), "ls", penalty_mu=mu)
    theta = interior_theta()
    grad, _ = problem.grad_and_hessian(theta)
    ref = numeric_gradient(problem, theta)
    assert np.max(np.abs(grad - ref)) < 1e-6 * max(1.0, np.max(np.abs(ref)))


def test_likelihood_gradient_matches_finite_differences_at_interior_point():
    ds = tomography.simulate_dataset(
        channels.measurement_channel(0.6), 1000, seed=2, prep_depolarization=0.1
    )
    problem = _Problem(
        _pure_design(), ds.frequencies.ravel(), "ml", counts=ds.counts.ravel(), shots=1000
    )
    theta = interior_theta()
    grad, _ = problem.grad_and_hessian(theta)
    ref = numeric_gradient(problem, theta, h=1e-7)
    assert np.max(np.abs(grad - ref)) < 1e-4 * max(1.0, np.max(np.abs(ref)))


def test_gauge_freedom_random_starts_reach_same_objective():
    p = tomography.probabilities(channels.measurement_channel(0.5))
    problem = _Problem(_pure_design(), p.ravel(), "ls")
    rng = np.random.default_rng(6)
    objs = []
    for _ in range(2):
        theta0 = rng.normal(0.0, 0.19, 81)
        _, obj, _, converged = _minimize(problem, theta0)
        assert converged
        objs.append(obj)
    assert abs(objs[0] - objs[1]) <= 1e-10


# --- reconstruction ---------------------------------------------------------------------


def test_reconstruct_noiseless_round_trip():
    for g0 in (0.0, 0.8165):
        chi = channels.measurement_channel(g0)
        res = tomography.reconstruct(tomography.probabilities(chi))
        assert res.converged
        assert channels.process_fidelity(res.chi, chi) >= 0.999
        assert res.residual < 1e-12


def test_reconstruct_identity_round_trip():
    res = tomography.reconstruct(tomography.probabilities(channels.identity_choi()))
    assert channels.process_fidelity(res.chi, channels.identity_choi()) >= 0.999


def test_reconstruct_accepts_dataset_and_reports_diagnostics():
    ds = tomography.simulate_dataset(channels.measurement_channel(0.4), 1000, seed=8)
    res = tomography.reconstruct(ds)
    assert res.chi.shape == (9, 9)
    assert np.linalg.eigvalsh(res.chi)[0] >= -1e-9
    assert res.iterations >= 1
    p = (_pure_design() @ res.chi.ravel()).real.reshape(9, 9)
    assert abs(float(np.sum((p - ds.frequencies) ** 2)) - res.residual) < 1e-9


def test_reconstruct_fidelity_improves_with_shots_in_median():
    chi = channels.measurement_channel(0.6)
    med = {}
    for shots in (100, 10000):
        fids = []
        for s in range(20):
            ds = tomography.simulate_dataset(chi, shots, seed=100 + s)
            fids.append(channels.process_fidelity(tomography.reconstruct(ds).chi, chi))
        med[shots] = np.median(fids)
    assert med[10000] >= med[100]


# --- TP-constrained reconstruction ----------------------------------------------------


def test_reconstruct_tp_matches_unconstrained_on_tp_data():
    p = tomography.probabilities(channels.identity_choi())
    free = tomography.reconstruct(p)
    constrained = tomography.reconstruct_tp(p)
    assert channels.process_fidelity(free.chi, constrained.chi) >= 1.0 - 1e-3


def test_reconstruct_tp_feasibility_and_residual_dominance():
    ds = tomography.simulate_dataset(
        channels.measurement_channel(0.7), 1000, seed=13, prep_depolarization=0.05
    )
    free = tomography.reconstruct(ds)
    constrained = tomography.reconstruct_tp(ds)
    assert constrained.tp_deviation < 1e-8
    assert constrained.residual >= free.residual


# --- likelihood-ratio test ----------------------------------------------------------------


def test_tp_test_on_noiseless_tp_data_is_insignificant():
    ds = dataset_from_probabilities(channels.measurement_channel(0.5))
    assert tomography.tp_likelihood_ratio_test(ds) < 1.0


def test_tp_test_returns_finite_nonnegative_sigma():
    ds = tomography.simulate_dataset(channels.measurement_channel(0.65), 1000, seed=33)
    sigma = tomography.tp_likelihood_ratio_test(ds)
    assert 0.0 <= sigma <= 100.0


# --- bootstrap -------------------------------------------------------------------------------


def test_bootstrap_is_deterministic_and_validates_resamples():
    ds = tomography.simulate_dataset(channels.measurement_channel(0.67), 1000, seed=77)
    with pytest.raises(ValueError):
        tomography.bootstrap_uncertainty(ds, resamples=10)
    a = tomography.bootstrap_uncertainty(ds, resamples=100, seed=3)
    b = tomography.bootstrap_uncertainty(ds, resamples=100, seed=3)
    assert np.array_equal(a.re_lo, b.re_lo) and np.array_equal(a.im_hi, b.im_hi)


def test_bootstrap_intervals_shrink_for_huge_shot_counts():
    ds = tomography.simulate_dataset(channels.measurement_channel(0.67), 10_000_000, seed=5)
    iv = tomography.bootstrap_uncertainty(ds, resamples=100, seed=4)
    assert float((iv.re_hi - iv.re_lo).max()) < 0.01
    assert float((iv.im_hi - iv.im_lo).max()) < 0.01


def test_bootstrap_coverage_of_true_choi_elements():
    chi_true = channels.measurement_channel(0.67)
    ds = tomography.simulate_dataset(chi_true, 1000, seed=77)
    iv = tomography.bootstrap_uncertainty(ds, resamples=200, seed=3)
    nonzero_re = (iv.re_hi - iv.re_lo) > 1e-6
    nonzero_im = (iv.im_hi - iv.im_lo) > 1e-6
    inside = iv.contains(chi_true)
    covered = inside[..., 0][nonzero_re].sum() + inside[..., 1][nonzero_im].sum()
    total = nonzero_re.sum() + nonzero_im.sum()
    assert 0.58 <= covered / total <= 0.78
