"""CSV artifacts and ``key = value`` summaries.

Numbers are written with 12 significant digits and a fixed column order so
identical inputs give byte-identical files. Each file starts with ``#``
comment lines carrying the resolved configuration.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .analysis import PeakReport, ScalingReport
from .dynamics import Trajectory
from .field import WaveField
from .rwa import RwaModel, analytic_amplitudes, optimal_time

TRAJECTORY_COLUMNS = ["t", "t_over_tau", "P_j", "P_s", "norm", "max_spectator"]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    meta: Sequence[tuple[str, str]] = (),
) -> None:
    with open(path, "w", newline="") as fh:
        write_csv_stream(fh, header, rows, meta)


def write_csv_stream(fh: TextIO, header, rows, meta=()) -> None:
    for key, value in meta:
        fh.write(f"# {key} = {value}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def trajectory_rows(traj: Trajectory, verbose_modes: bool = False):
    tau = optimal_time(traj.problem)
    cols = [traj.times, traj.times / tau, traj.P_j, traj.P_s, traj.norm]
    if traj.P.shape[1] > 2:
        cols.append(traj.spectator_max)
    else:
        cols.append(np.zeros_like(traj.times))
    data = np.column_stack(cols)
    if verbose_modes:
        data = np.column_stack([data, traj.P])
    return data


def trajectory_header(traj: Trajectory, verbose_modes: bool = False, with_model: bool = False):
    header = list(TRAJECTORY_COLUMNS)
    if verbose_modes:
        header += [f"P_{i}" for i in traj.problem.all_indices]
    if with_model:
        header.append("model")
    return header


def write_trajectory(path, traj: Trajectory, meta=(), verbose_modes=False, with_model=False):
    data = trajectory_rows(traj, verbose_modes)
    rows = (list(r) + ([traj.model] if with_model else []) for r in data)
    write_csv(path, trajectory_header(traj, verbose_modes, with_model), rows, meta)


def trajectory_csv_text(traj: Trajectory, meta=(), verbose_modes=False) -> str:
    buf = io.StringIO()
    write_csv_stream(buf, trajectory_header(traj, verbose_modes), trajectory_rows(traj, verbose_modes), meta)
    return buf.getvalue()


def write_comparison(path, full: Trajectory, model: RwaModel, meta=()):
    a_j, a_s = analytic_amplitudes(model, full.times)
    header = ["t", "t_over_tau", "P_j_full", "P_s_full", "P_j_rwa", "P_s_rwa", "abs_diff_s"]
    p_j_rwa, p_s_rwa = np.abs(a_j) ** 2, np.abs(a_s) ** 2
    data = np.column_stack(
        [full.times, full.times / model.tau, full.P_j, full.P_s, p_j_rwa, p_s_rwa,
         np.abs(full.P_s - p_s_rwa)]
    )
    write_csv(path, header, data, meta)


def write_scaling(path, report: ScalingReport, meta=()):
    header = ["N", "t_star", "tau", "t_star_over_tau", "p_star"]
    rows = [(r.n, r.t_star, r.tau, r.t_star_over_tau, r.p_star) for r in report.rows]
    write_csv(path, header, rows, meta)


def write_histogram(path, hist: dict[int, int], base_frequency: float, meta=(), with_j=None):
    """One row per index difference. ``with_j`` adds the multiplicity once
    the initial mode joins the pairs (0 where a difference only appears
    there)."""
    header = ["index_difference", "frequency_difference", "multiplicity"]
    keys = sorted(set(hist) | set(with_j or {}))
    if with_j is not None:
        header.append("multiplicity_with_j")
        rows = [(d, d * base_frequency, hist.get(d, 0), with_j.get(d, 0)) for d in keys]
    else:
        rows = [(d, d * base_frequency, hist[d]) for d in keys]
    write_csv(path, header, rows, meta)


def write_field(path, field: WaveField, meta=()):
    v = field.values
    data = np.column_stack([field.x, v.real, v.imag, np.abs(v) ** 2])
    write_csv(path, ["x", "re_psi", "im_psi", "abs_psi_sq"], data, meta)


def summary_lines(pairs: Iterable[tuple[str, object]]) -> str:
    return "".join(f"{k} = {v if isinstance(v, str) else fmt(v)}\n" for k, v in pairs)


def peak_summary(peak: PeakReport) -> list[tuple[str, object]]:
    return [("t_star", peak.t_star), ("p_star", peak.p_star), ("t_star_over_tau", peak.t_star_over_tau)]


def scaling_summary(report: ScalingReport) -> list[tuple[str, object]]:
    out: list[tuple[str, object]] = [("rows", len(report.rows))]
    if report.alpha is None:
        out.append(("fit", "none"))
    else:
        out += [
            ("alpha", report.alpha),
            ("alpha_omega0_over_pi", report.normalized_alpha),
            ("correlation", report.correlation),
        ]
    return out
