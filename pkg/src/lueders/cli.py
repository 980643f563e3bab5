"""Command-line pipeline wiring the modules into the full experiment.

Subcommands: ``dynamics``, ``simulate``, ``reconstruct``, ``fidelity``,
``tptest``, ``bootstrap``, ``pipeline``.  Settings come from a JSON config
file; command-line flags override config fields, which override the built-in
defaults (the four pulse-power settings a-d).  Frequencies in the config are
ordinary frequencies in MHz (the 2*pi is applied internally); durations are
microseconds.

Exit codes: 0 success, 2 config or input-data error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channels, dynamics, tomography
from .errors import LuedersError, ParseError, RangeError
from .linalg import matrix_to_json
from .states import density

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

ALL_OPERATIONS = ("dynamics", "simulate", "reconstruct", "compare", "bootstrap", "tptest")

DEFAULT_ROWS = [
    {"name": "a", "omega_mhz": 1.3, "omega_unc_mhz": 0.1},
    {"name": "b", "omega_mhz": 1.9, "omega_unc_mhz": 0.2},
    {"name": "c", "omega_mhz": 3.2, "omega_unc_mhz": 0.3},
    {"name": "d", "omega_mhz": 15.2, "omega_unc_mhz": 1.5},
]


class ConfigError(LuedersError):
    """The pipeline configuration is invalid."""


@dataclass
class PipelineConfig:
    rows: list = field(default_factory=lambda: [dict(r) for r in DEFAULT_ROWS])
    gamma_mhz: float = 21.65
    delta_mhz: float = 5.0
    delta_unc_mhz: float = 2.0
    t_us: float = 1.0
    phi_r: float = 0.0
    shots: int = 1000
    seed: int = 1
    prep_depolarization: float = 0.0
    g0_model: str = "exact"  # or "adiabatic"
    out_dir: str = "out"
    operations: tuple = ALL_OPERATIONS
    bootstrap_resamples: int = 200

    def params_for(self, row: dict, seed: int) -> dynamics.ExperimentParams:
        return dynamics.ExperimentParams.from_mhz(
            omega_mhz=float(row["omega_mhz"]),
            omega_unc_mhz=float(row.get("omega_unc_mhz", 0.0)),
            gamma_mhz=float(row.get("gamma_mhz", self.gamma_mhz)),
            delta_mhz=float(row.get("delta_mhz", self.delta_mhz)),
            delta_unc_mhz=float(row.get("delta_unc_mhz", self.delta_unc_mhz)),
            t_us=float(row.get("t_us", self.t_us)),
            phi_r=float(row.get("phi_r", self.phi_r)),
            shots=self.shots,
            seed=seed,
        )


def load_config(path: str | None, overrides: dict) -> PipelineConfig:
    cfg = PipelineConfig()
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = set(PipelineConfig.__dataclass_fields__)
        for key, value in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
            setattr(cfg, key, value)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.operations = tuple(cfg.operations)
    if not cfg.operations:
        raise ConfigError("at least one operation must be requested")
    for op in cfg.operations:
        if op not in ALL_OPERATIONS:
            raise ConfigError(f"unknown operation {op!r}")
    if cfg.g0_model not in ("exact", "adiabatic"):
        raise ConfigError(f"g0_model must be 'exact' or 'adiabatic', got {cfg.g0_model!r}")
    if not cfg.rows:
        raise ConfigError("at least one parameter row is required")
    names = [str(r.get("name", i)) for i, r in enumerate(cfg.rows)]
    if len(set(names)) != len(names):
        raise ConfigError("row names must be unique")
    for row in cfg.rows:
        if "omega_mhz" not in row:
            raise ConfigError(f"row {row.get('name', '?')!r} is missing omega_mhz")
    if int(cfg.shots) < 1:
        raise ConfigError("shots must be at least 1")
    cfg.shots = int(cfg.shots)
    cfg.seed = int(cfg.seed)
    return cfg


def select_rows(cfg: PipelineConfig, row_name: str | None) -> list[dict]:
    if row_name is None:
        return list(cfg.rows)
    for row in cfg.rows:
        if str(row.get("name")) == row_name:
            return [row]
    raise ConfigError(f"no row named {row_name!r}")


def _row_seed(cfg: PipelineConfig, index: int) -> int:
    return cfg.seed + 1000 * index


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: str, lines: list[str]) -> None:
    path.write_text(header + "\n" + "\n".join(lines) + ("\n" if lines else ""))


def _abs_phase_lines(rows) -> list[str]:
    return [f"{a},{b},{mag:.12e},{phase:.12e}" for a, b, mag, phase in rows]


def _row_g0(cfg: PipelineConfig, params: dynamics.ExperimentParams) -> dict:
    """Both coherence factors plus the Monte Carlo P_scatt interval for one row."""
    import warnings

    g_exact = dynamics.g0_exact(params)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g_adiab = dynamics.g0_adiabatic(params)
    regime_ok = not any(isinstance(w.message, Warning) for w in caught)
    lo, med, hi = dynamics.param_uncertainty(params, seed=params.seed)
    return {
        "g0_exact": {"re": g_exact.real, "im": g_exact.imag},
        "g0_adiabatic": {"re": g_adiab.real, "im": g_adiab.imag},
        "p_scatt_exact": dynamics.p_scatt(g_exact),
        "p_scatt_adiabatic": dynamics.p_scatt(g_adiab),
        "p_scatt_interval_68": {"p16": lo, "p50": med, "p84": hi},
        "adiabatic_regime_ok": regime_ok,
    }


def _model_g0(cfg: PipelineConfig, params: dynamics.ExperimentParams) -> complex:
    if cfg.g0_model == "adiabatic":
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return dynamics.g0_adiabatic(params)
    return dynamics.g0_exact(params)


def cmd_dynamics(cfg: PipelineConfig, row_name: str | None = None) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = select_rows(cfg, row_name)
    report = {"rows": []}
    print(f"{'row':<6}{'omega/2pi [MHz]':>16}{'P_scatt':>10}{'interval_68':>22}{'|g0|':>8}")
    for idx, row in enumerate(rows):
        params = cfg.params_for(row, _row_seed(cfg, idx))
        entry = {"name": str(row.get("name", idx)), "omega_mhz": float(row["omega_mhz"])}
        entry.update(_row_g0(cfg, params))
        psi = np.array([1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2.0)
        times, states = dynamics.trajectory(dynamics.embed_qutrit(density(psi)), params)
        _write_csv(
            out / f"trajectory_{entry['name']}.csv",
            dynamics.TRAJECTORY_HEADER,
            dynamics.trajectory_rows(times, states),
        )
        report["rows"].append(entry)
        iv = entry["p_scatt_interval_68"]
        print(
            f"{entry['name']:<6}{entry['omega_mhz']:>16.2f}"
            f"{entry['p_scatt_adiabatic']:>10.4f}"
            f"{'[' + format(iv['p16'], '.3f') + ', ' + format(iv['p84'], '.3f') + ']':>22}"
            f"{abs(complex(entry['g0_exact']['re'], entry['g0_exact']['im'])):>8.4f}"
        )
    _dump_json(report, out / "g0_report.json")
    return EXIT_OK


def cmd_simulate(cfg: PipelineConfig, row_name: str | None = None) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for idx, row in enumerate(select_rows(cfg, row_name)):
        name = str(row.get("name", idx))
        params = cfg.params_for(row, _row_seed(cfg, idx))
        g0 = _model_g0(cfg, params)
        chi = channels.measurement_channel(g0)
        ds = tomography.simulate_dataset(
            chi, cfg.shots, seed=params.seed, prep_depolarization=cfg.prep_depolarization
        )
        tomography.dataset_to_csv(ds, out / f"dataset_{name}.csv")
        print(f"wrote {out / f'dataset_{name}.csv'} (g0 = {g0:.4f})")
    return EXIT_OK


def _report_skeleton() -> dict:
    return {
        "chi": None,
        "residual": None,
        "tp_deviation": None,
        "fidelity_vs_model": None,
        "significance_sigma": None,
    }


def _analyze_dataset(cfg: PipelineConfig, ds, model_chi=None, with_tptest=False, with_bootstrap=False, g0=None) -> dict:
    report = _report_skeleton()
    result = tomography.reconstruct(ds, seed=cfg.seed)
    report["chi"] = channels.choi_to_json(result.chi, g0=g0)
    report["residual"] = result.residual
    report["tp_deviation"] = result.tp_deviation
    report["converged"] = bool(result.converged)
    if model_chi is not None:
        report["fidelity_vs_model"] = channels.process_fidelity(result.chi, model_chi)
    if with_tptest:
        report["significance_sigma"] = tomography.tp_likelihood_ratio_test(ds, seed=cfg.seed)
    if with_bootstrap:
        iv = tomography.bootstrap_uncertainty(ds, resamples=cfg.bootstrap_resamples, seed=cfg.seed)
        report["bootstrap"] = {
            "re_lo": matrix_to_json(iv.re_lo)["re"],
            "re_hi": matrix_to_json(iv.re_hi)["re"],
            "im_lo": matrix_to_json(iv.im_lo)["re"],
            "im_hi": matrix_to_json(iv.im_hi)["re"],
            "resamples": iv.resamples,
        }
    return report


def _load_dataset(path: str) -> tomography.TomographyDataset:
    return tomography.dataset_from_csv(path)


def cmd_reconstruct(cfg: PipelineConfig, data_path: str, row_name: str | None) -> int:
    ds = _load_dataset(data_path)
    model_chi, g0 = _optional_model(cfg, row_name)
    report = _analyze_dataset(cfg, ds, model_chi=model_chi, g0=g0)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(report, out / "reconstruction.json")
    print(f"residual = {report['residual']:.6e}, tp deviation = {report['tp_deviation']:.3e}")
    if report["fidelity_vs_model"] is not None:
        print(f"fidelity vs model = {report['fidelity_vs_model']:.4f}")
    return EXIT_OK


def _optional_model(cfg: PipelineConfig, row_name: str | None):
    if row_name is None:
        return None, None
    row = select_rows(cfg, row_name)[0]
    idx = [str(r.get("name")) for r in cfg.rows].index(row_name)
    params = cfg.params_for(row, _row_seed(cfg, idx))
    g0 = _model_g0(cfg, params)
    return channels.measurement_channel(g0), g0


def cmd_fidelity(cfg: PipelineConfig, data_path: str, row_name: str | None) -> int:
    if row_name is None:
        raise ConfigError("fidelity needs --row to pick the model parameters")
    ds = _load_dataset(data_path)
    model_chi, g0 = _optional_model(cfg, row_name)
    report = _analyze_dataset(cfg, ds, model_chi=model_chi, g0=g0)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(report, out / "fidelity.json")
    print(f"fidelity vs model ({row_name}) = {report['fidelity_vs_model']:.4f}")
    return EXIT_OK


def cmd_tptest(cfg: PipelineConfig, data_path: str) -> int:
    ds = _load_dataset(data_path)
    sigma = tomography.tp_likelihood_ratio_test(ds, seed=cfg.seed)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = _report_skeleton()
    report["significance_sigma"] = sigma
    _dump_json(report, out / "tptest.json")
    print(f"trace-preservation violation significance = {sigma:.2f} sigma")
    return EXIT_OK


def cmd_bootstrap(cfg: PipelineConfig, data_path: str) -> int:
    ds = _load_dataset(data_path)
    report = _analyze_dataset(cfg, ds, with_bootstrap=True)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(report, out / "bootstrap.json")
    widths = np.asarray(report["bootstrap"]["re_hi"]) - np.asarray(report["bootstrap"]["re_lo"])
    print(f"median 68% interval width (real parts): {np.median(widths):.4f}")
    return EXIT_OK


def _pipeline_row(cfg: PipelineConfig, idx: int, row: dict) -> dict:
    name = str(row.get("name", idx))
    out = Path(cfg.out_dir)
    params = cfg.params_for(row, _row_seed(cfg, idx))
    entry = {"name": name, "omega_mhz": float(row["omega_mhz"])}
    if "dynamics" in cfg.operations:
        entry.update(_row_g0(cfg, params))
    g0 = _model_g0(cfg, params)
    model_chi = channels.measurement_channel(g0)
    entry["g0_model"] = {"re": g0.real, "im": g0.imag}
    _write_csv(
        out / f"choi_model_{name}.csv",
        "row_label,col_label,abs,phase",
        _abs_phase_lines(channels.choi_abs_phase_rows(model_chi)),
    )
    for tag, amps in (("coh12", [0, 1, 1j]), ("coh02", [1, 0, 1j])):
        psi = np.asarray(amps, dtype=complex) / np.sqrt(2.0)
        rho_out = channels.apply_channel(model_chi, density(psi))
        _write_csv(
            out / f"rho_{tag}_{name}.csv",
            "row_label,col_label,abs,phase",
            _abs_phase_lines(channels.density_abs_phase_rows(rho_out)),
        )
    if "simulate" not in cfg.operations:
        return entry
    ds = tomography.simulate_dataset(
        model_chi, cfg.shots, seed=params.seed, prep_depolarization=cfg.prep_depolarization
    )
    tomography.dataset_to_csv(ds, out / f"dataset_{name}.csv")
    analysis = _analyze_dataset(
        cfg,
        ds,
        model_chi=model_chi if "compare" in cfg.operations else None,
        with_tptest="tptest" in cfg.operations,
        with_bootstrap="bootstrap" in cfg.operations,
        g0=g0,
    ) if "reconstruct" in cfg.operations else _report_skeleton()
    if analysis["chi"] is not None:
        chi_exp = channels.choi_from_json(analysis["chi"])
        _write_csv(
            out / f"choi_exp_{name}.csv",
            "row_label,col_label,abs,phase",
            _abs_phase_lines(channels.choi_abs_phase_rows(chi_exp)),
        )
    entry.update(analysis)
    return entry


def cmd_pipeline(cfg: PipelineConfig, row_name: str | None = None) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = select_rows(cfg, row_name)
    report = {"seed": cfg.seed, "shots": cfg.shots, "g0_model": cfg.g0_model, "rows": []}
    failures = []
    with ThreadPoolExecutor(max_workers=min(4, len(rows))) as pool:
        futures = [pool.submit(_pipeline_row, cfg, idx, row) for idx, row in enumerate(rows)]
        for idx, (row, fut) in enumerate(zip(rows, futures)):
            name = str(row.get("name", idx))
            try:
                report["rows"].append(fut.result())
            except Exception as exc:  # recorded per row; overall exit is nonzero
                failures.append(name)
                report["rows"].append({"name": name, "error": f"{type(exc).__name__}: {exc}"})
    _dump_json(report, out / "report.json")
    for entry in report["rows"]:
        if "error" in entry:
            print(f"row {entry['name']}: FAILED ({entry['error']})")
        else:
            fid = entry.get("fidelity_vs_model")
            fid_text = f"{fid:.4f}" if fid is not None else "-"
            print(f"row {entry['name']}: fidelity_vs_model = {fid_text}")
    print(f"report written to {out / 'report.json'}")
    return EXIT_NUMERICAL if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lueders",
        description="Ideal-measurement channel simulation and process tomography pipeline",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="base RNG seed (overrides config)")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--row", help="restrict to one named parameter row")
    parser.add_argument("--shots", type=int, help="shots per tomography setting")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dynamics", help="coherence factors and scattering probabilities")
    sub.add_parser("simulate", help="write synthetic tomography datasets")
    for name in ("reconstruct", "fidelity", "tptest", "bootstrap"):
        p = sub.add_parser(name)
        p.add_argument("--data", required=True, help="dataset CSV (header i,j,n,N)")
    sub.add_parser("pipeline", help="full per-row pipeline with report and plot data")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            {"seed": args.seed, "out_dir": args.out, "shots": args.shots},
        )
        if args.command == "dynamics":
            return cmd_dynamics(cfg, args.row)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.row)
        if args.command == "reconstruct":
            return cmd_reconstruct(cfg, args.data, args.row)
        if args.command == "fidelity":
            return cmd_fidelity(cfg, args.data, args.row)
        if args.command == "tptest":
            return cmd_tptest(cfg, args.data)
        if args.command == "bootstrap":
            return cmd_bootstrap(cfg, args.data)
        if args.command == "pipeline":
            return cmd_pipeline(cfg, args.row)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ParseError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LuedersError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
