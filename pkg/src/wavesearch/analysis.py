"""Observables extracted from trajectories: peak, sqrt(N) scaling, RWA
deviation and the late-time ripple of the initial mode."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.signal import peak_prominences

from .dynamics import IntegrationError, IntegratorConfig, Trajectory, integrate
from .rwa import RwaModel, build_rwa, optimal_time, rwa_trajectory
from .spectrum import SearchProblem, linear_spectrum, make_problem, quadratic_spectrum


class WindowError(ValueError):
    """Trajectory does not cover the time window an observable needs."""


@dataclass(frozen=True)
class PeakReport:
    t_star: float
    p_star: float
    t_star_over_tau: float


@dataclass(frozen=True)
class ScalingRow:
    n: int
    t_star: float
    tau: float
    t_star_over_tau: float
    p_star: float


@dataclass
class ScalingReport:
    rows: list[ScalingRow]
    base_frequency: float
    alpha: float | None = None
    correlation: float | None = None

    @property
    def normalized_alpha(self) -> float | None:
        """``alpha * w0 / pi``; 1 for the ideal law."""
        if self.alpha is None:
            return None
        return self.alpha * self.base_frequency / math.pi


def _parabola_vertex(t, p, k):
    t0, t1, t2 = t[k - 1], t[k], t[k + 1]
    p0, p1, p2 = p[k - 1], p[k], p[k + 1]
    d01 = (p1 - p0) / (t1 - t0)
    d12 = (p2 - p1) / (t2 - t1)
    curv = (d12 - d01) / (t2 - t0)
    if curv >= 0:
        return t1, p1
    # p(t) = p1 + d01 (t - t1) + curv (t - t0)(t - t1)  rewritten around t1
    slope = d01 + curv * (t1 - t0)
    dt = -slope / (2 * curv)
    dt = min(max(dt, t0 - t1), t2 - t1)
    return t1 + dt, max(p1, p1 + slope * dt + curv * dt * dt)


def find_peak(trajectory: Trajectory, searched_slot: int | None = None) -> PeakReport:
    """Maximum of the searched mode's ``P``, refined by a three-point parabola."""
    pb = trajectory.problem
    tau = optimal_time(pb)
    t = trajectory.times
    if t.size < 3 or t[-1] < 1.2 * tau * (1 - 1e-9):
        raise WindowError(f"trajectory ends at {t[-1] if t.size else 0:.6g}, need >= 1.2*tau")
    slot = pb.searched_slot if searched_slot is None else searched_slot
    p = trajectory.P[:, slot]
    k = int(np.argmax(p))
    if 0 < k < t.size - 1:
        t_star, p_star = _parabola_vertex(t, p, k)
    else:
        t_star, p_star = t[k], p[k]
    return PeakReport(float(t_star), float(p_star), float(t_star / tau))


def fit_sqrt_law(ns: Sequence[int], t_stars: Sequence[float]) -> tuple[float, float]:
    """Least squares ``t* = alpha sqrt(N)`` through the origin and the
    Pearson correlation of ``t*`` with ``sqrt(N)``."""
    x = np.sqrt(np.asarray(ns, dtype=float))
    y = np.asarray(t_stars, dtype=float)
    alpha = float(x @ y / (x @ x))
    corr = float(np.corrcoef(x, y)[0, 1])
    return alpha, corr


def _peak_row(kind, n, base_frequency, t_max_tau, samples, model):
    pb = default_problem(kind, n, base_frequency)
    tau = optimal_time(pb)
    if model == "rwa":
        traj = rwa_trajectory(build_rwa(pb), np.linspace(0.0, t_max_tau * tau, 4001))
    else:
        cfg = IntegratorConfig(t_max=t_max_tau * tau, samples_per_fastest_period=samples)
        try:
            traj = integrate(pb, cfg)
        except IntegrationError as exc:
            raise type(exc)(f"N={n}: {exc}") from exc
    pk = find_peak(traj)
    return ScalingRow(n, pk.t_star, tau, pk.t_star_over_tau, pk.p_star)


def default_problem(kind: str, n: int, base_frequency: float = 1.0) -> SearchProblem:
    builders: dict[str, Callable] = {"linear": linear_spectrum, "quadratic": quadratic_spectrum}
    if kind not in builders:
        raise ValueError(f"unknown spectrum kind {kind!r}")
    return make_problem(builders[kind](n, base_frequency))


def scaling_study(
    kind: str,
    ns: Sequence[int],
    *,
    base_frequency: float = 1.0,
    t_max_tau: float = 2.2,
    samples_per_fastest_period: int = 32,
    model: str = "full",
    workers: int = 1,
) -> ScalingReport:
    """Peak time for each ``N`` (default j and mid-spectrum s) plus the
    through-origin sqrt(N) fit once there are at least three rows."""
    ns = sorted(set(int(n) for n in ns))
    args = [(kind, n, base_frequency, t_max_tau, samples_per_fastest_period, model) for n in ns]
    if workers > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_peak_row, *zip(*args)))
    else:
        rows = [_peak_row(*a) for a in args]
    rows.sort(key=lambda r: r.n)
    report = ScalingReport(rows, base_frequency)
    if len(rows) >= 3:
        report.alpha, report.correlation = fit_sqrt_law(
            [r.n for r in rows], [r.t_star for r in rows]
        )
    return report


def _check_same_problem(trajectory: Trajectory, model: RwaModel) -> None:
    a, b = trajectory.problem, model.problem
    if (a.n, a.base_frequency, a.searched_slot) != (b.n, b.base_frequency, b.searched_slot):
        raise WindowError("trajectory and model describe different problems")


def rwa_deviation(full: Trajectory, model: RwaModel) -> float:
    """``sup_t |P_s(t) - sin^2(W t)|`` over the recorded times."""
    _check_same_problem(full, model)
    if full.times.size == 0:
        raise WindowError("empty trajectory")
    ideal = np.sin(model.rabi_frequency * full.times) ** 2
    return float(np.max(np.abs(full.P_s - ideal)))


def local_maxima(y: np.ndarray) -> np.ndarray:
    """Indices of strict local maxima; a plateau counts once, at its left end."""
    y = np.asarray(y)
    out = []
    i, n = 1, y.size
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j < n - 1 and y[j + 1] == y[j]:
                j += 1
            if j < n - 1 and y[j + 1] < y[j]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return np.asarray(out, dtype=int)


@dataclass(frozen=True)
class RippleReport:
    amplitude: float
    period: float
    period_over_tau: float
    n_maxima: int
    residual: np.ndarray = field(repr=False, compare=False, default=None)


def late_oscillation_metric(
    trajectory: Trajectory,
    center_tau: float = 2.0,
    half_width_tau: float = 0.5,
    min_prominence: float = 0.25,
) -> RippleReport:
    """Fast ripple of the initial mode's ``P`` around ``center_tau * tau``.

    The slow Rabi swing is removed by a least-squares fit of
    ``c0 + c1 cos(2Wt) + c2 sin(2Wt) + c3 t + c4 t^2`` over the window; the
    ripple amplitude is the peak-to-trough spread of what remains and the
    period is the mean spacing of its successive local maxima (NaN with
    fewer than two maxima). Maxima whose prominence is below
    ``min_prominence`` times the amplitude are dropped, which discards the
    small fast wiggles riding on the dominant ripple.
    """
    pb = trajectory.problem
    model = build_rwa(pb)
    tau = model.tau
    t0, t1 = (center_tau - half_width_tau) * tau, (center_tau + half_width_tau) * tau
    t = trajectory.times
    if t.size == 0 or t[0] > t0 * (1 + 1e-9) or t[-1] < t1 * (1 - 1e-9):
        raise WindowError(f"trajectory must cover [{t0:.6g}, {t1:.6g}]")
    keep = (t >= t0 * (1 - 1e-12)) & (t <= t1 * (1 + 1e-12))
    tw = t[keep]
    y = trajectory.P_j[keep]
    u = (tw - center_tau * tau) / tau
    w2 = 2 * model.rabi_frequency * tw
    basis = np.column_stack([np.ones_like(u), np.cos(w2), np.sin(w2), u, u * u])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    resid = y - basis @ coef
    amplitude = float(resid.max() - resid.min())
    peaks = local_maxima(resid)
    if peaks.size and amplitude > 0:
        prom = peak_prominences(resid, peaks)[0]
        peaks = peaks[prom >= min_prominence * amplitude]
    period = float(np.mean(np.diff(tw[peaks]))) if peaks.size >= 2 else float("nan")
    return RippleReport(amplitude, period, period / tau, int(peaks.size), resid)
