"""Scenario and sweep orchestration, CSV output."""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, SweepConfig
from .fits import FitError, extract_envelope, fit_exponential, fit_rate_slope
from .model import ModelSpec, build_model
from .observables import SnapshotObservables, snapshot
from .propagator import PropagationError, evolve_trajectory
from .state import product_state, random_bath_state, split_seed

log = logging.getLogger(__name__)

SERIES_COLUMNS = ("t", "re_r11", "re_r22", "re_r33", "re_r44", "re_r23", "im_r23", "abs_r23",
                  "s_c", "echo", "e_total", "e_central")
RATE_COLUMNS = ("omega", "rate_mean", "rate_std", "n_seeds")

# initial central state |up, down>
INITIAL_CENTRAL = np.array([0, 1, 0, 0], dtype=np.complex128)


class OutputError(OSError):
    pass


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    records: list
    summary: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([r.row()[name] for r in self.records])


def scenario_model(cfg: ScenarioConfig) -> ModelSpec:
    return build_model(cfg.N, cfg.K, cfg.J, cfg.ce_mode, cfg.delta, cfg.bath_mode, cfg.omega,
                       bath_seed=split_seed(cfg.seed, "bath-couplings"),
                       ce_seed=split_seed(cfg.seed, "ce-couplings"))


def initial_state(cfg: ScenarioConfig):
    return product_state(INITIAL_CENTRAL, random_bath_state(cfg.N, split_seed(cfg.seed, "bath-state")))


def run_scenario(cfg: ScenarioConfig, output: str | os.PathLike | None = None) -> ScenarioResult:
    """Sample the model, evolve |ud> x |phi>, record observables at every sample time."""
    spec = scenario_model(cfg)
    psi0 = initial_state(cfg)
    records: list[SnapshotObservables] = []
    norm_dev = 0.0

    def sink(t, psi, e_total):
        nonlocal norm_dev
        norm_dev = max(norm_dev, abs(psi.norm() - 1.0))
        records.append(snapshot(t, psi, spec, e_total))

    path = output if output is not None else cfg.output
    try:
        evolve_trajectory(psi0, spec, cfg.t_max, cfg.dt_sample, sink, eps=cfg.eps, bound=cfg.bound)
    except PropagationError:
        if path is not None and records:
            write_series(f"{path}.invalid", records)
        raise
    result = ScenarioResult(cfg, records, summarize(records, norm_dev))
    if path is not None:
        write_series(path, records)
    return result


def summarize(records, norm_dev: float = float("nan")) -> dict:
    s_c = np.array([r.s_c for r in records])
    e_tot = np.array([r.e_total for r in records])
    e_c = np.array([r.e_central for r in records])
    r22 = np.array([r.diagonals[1] for r in records])
    return {
        "n_records": len(records),
        "max_s_c": float(s_c.max()),
        "final_diagonals": [float(x) for x in records[-1].diagonals],
        "max_norm_deviation": float(norm_dev),
        "max_energy_drift": float(np.max(np.abs(e_tot - e_tot[0]))),
        "max_central_energy_drift": float(np.max(np.abs(e_c - e_c[0]))),
        "max_rho22_deviation": float(np.max(np.abs(r22 - 0.5))),
    }


# --------------------------------------------------------------------------
# CSV


def write_series(path, records) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(SERIES_COLUMNS)
            for r in records:
                row = r.row() if hasattr(r, "row") else r
                w.writerow([format(float(row[c]), ".17g") for c in SERIES_COLUMNS])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_series(path) -> dict[str, np.ndarray]:
    """Columns of a series CSV as float arrays."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in r] for r in body]).reshape(len(body), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


# --------------------------------------------------------------------------
# sweeps


def run_file_name(stem: str, K: int, omega: float, seed: int) -> str:
    return f"{stem}_K{K}_W{omega:g}_S{seed}.csv"


def _sweep_point(args):
    cfg, window, envelope, out_path = args
    try:
        res = run_scenario(cfg, output=out_path)
        env = extract_envelope([r.row() for r in res.records], envelope)
        fit = fit_exponential(env, window)
        return {"omega": cfg.omega, "seed": cfg.seed, "ok": True, "rate": fit.rate,
                "prefactor": fit.params["prefactor"], "rms": fit.rms, "n_points": fit.n_points,
                "max_s_c": res.summary["max_s_c"]}
    except (PropagationError, FitError, OutputError) as exc:
        return {"omega": cfg.omega, "seed": cfg.seed, "ok": False, "error": str(exc)}


@dataclass
class SweepResult:
    rows: list            # one dict per omega: omega, rate_mean, rate_std, n_seeds, flagged
    points: list          # one dict per (omega, seed)
    slope: float          # zero-intercept slope of rate_mean against omega
    inverse_slope: float  # zero-intercept slope of 1 / rate_mean against omega


def run_sweep(cfg: SweepConfig, workers: int = 1, out_dir=None, stem: str = "run") -> SweepResult:
    """Run every (omega, seed) point, fit a rate per seed, aggregate per omega."""
    base = cfg.base
    jobs = []
    for omega in cfg.omegas:
        for seed in cfg.seeds:
            c = base.replace(omega=omega, seed=seed, output=None)
            out = None
            if out_dir is not None:
                out = str(Path(out_dir) / run_file_name(stem, base.K, omega, seed))
            jobs.append((c, cfg.fit_window, cfg.envelope, out))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(j) for j in jobs]

    rows = []
    for omega in cfg.omegas:
        rates = [p["rate"] for p in points if p["omega"] == omega and p["ok"]]
        failed = [p for p in points if p["omega"] == omega and not p["ok"]]
        rows.append({
            "omega": omega,
            "rate_mean": float(np.mean(rates)) if rates else float("nan"),
            "rate_std": float(np.std(rates)) if rates else float("nan"),
            "n_seeds": len(rates),
            "flagged": bool(failed),
        })
    good = [(r["omega"], r["rate_mean"]) for r in rows if r["n_seeds"]]
    slope = fit_rate_slope(good) if good else float("nan")
    inv = fit_rate_slope([(w, 1 / a) for w, a in good if a > 0]) if good else float("nan")
    result = SweepResult(rows, points, slope, inv)
    if out_dir is not None:
        write_rates(Path(out_dir) / f"{stem}_K{base.K}_rates.csv", rows)
        summary = {"slope": slope, "inverse_slope": inv, "points": points}
        with open(Path(out_dir) / f"{stem}_K{base.K}_sweep.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
    return result


def write_rates(path, rows) -> Path:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(RATE_COLUMNS)
            for r in rows:
                w.writerow([format(float(r["omega"]), ".17g"), format(r["rate_mean"], ".17g"),
                            format(r["rate_std"], ".17g"), r["n_seeds"]])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return Path(path)
