"""Single runs and parameter sweeps: compute, then serialize to JSON / CSV."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, apply_sweep_value
from .phase import PhaseReport, full_report
from .statistics import Coherent

CSV_COLUMNS = (
    "swept_value",
    "lambda",
    "T",
    "gamma",
    "beta_closed",
    "beta_quadrature",
    "beta_coherent",
    "phi_measured",
    "cyclicity_defect",
    "mean_photon",
    "mandel_q",
)


def report_for(cfg: RunConfig) -> PhaseReport:
    return full_report(cfg.params, cfg.statistics, cfg.quadrature_steps, cfg.tail_tol, dim=cfg.dim)


def dumps(payload) -> str:
    """JSON with shortest round-trip float representation and stable layout."""
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def run_single(cfg: RunConfig) -> tuple[PhaseReport, dict]:
    report = report_for(cfg)
    payload = {"version": __version__, "config": cfg.echo(), "report": report.to_dict()}
    return report, payload


def sweep_row(value: float, report: PhaseReport) -> dict:
    return {
        "swept_value": value,
        "lambda": report.lam,
        "T": report.period_T,
        "gamma": report.gamma_dynamical,
        "beta_closed": report.beta_closed,
        "beta_quadrature": report.beta_quadrature,
        "beta_coherent": report.beta_coherent,
        "phi_measured": report.phi_measured,
        "cyclicity_defect": report.cyclicity_defect,
        "mean_photon": report.mean_photon,
        "mandel_q": report.mandel_q,
    }


def fit_cosine(theta: np.ndarray, beta: np.ndarray) -> dict:
    """Least-squares ``beta ~ c0 + c1 cos(2 theta)``; residual is the max abs misfit."""
    design = np.column_stack([np.ones_like(theta), np.cos(2.0 * theta)])
    (c0, c1), *_ = np.linalg.lstsq(design, beta, rcond=None)
    residual = float(np.max(np.abs(design @ np.array([c0, c1]) - beta)))
    return {"c0": float(c0), "c1": float(c1), "residual": residual}


def run_sweep(cfg: RunConfig) -> tuple[list[dict], dict]:
    if cfg.sweep is None:
        raise ValueError("run_sweep needs a sweep axis")
    rows = []
    for value in cfg.sweep.values():
        value = float(value)
        rows.append(sweep_row(value, report_for(apply_sweep_value(cfg, value))))

    summary: dict = {"version": __version__, "config": cfg.echo(), "points": len(rows), "columns": {}}
    for col in CSV_COLUMNS:
        vals = [r[col] for r in rows if r[col] is not None]
        summary["columns"][col] = {"min": min(vals), "max": max(vals)} if vals else None
    if cfg.sweep.variable == "theta" and isinstance(cfg.statistics, Coherent):
        theta = np.array([r["swept_value"] for r in rows])
        summary["cosine_fit"] = fit_cosine(theta, np.array([r["beta_closed"] for r in rows]))
    return rows, summary


def format_number(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".15g")


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([format_number(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path: str | Path) -> list[dict]:
    """Parse a sweep CSV back into rows (empty cells become ``None``)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [{k: (float(v) if v != "" else None) for k, v in row.items()} for row in reader]
