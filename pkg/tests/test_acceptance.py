"""Acceptance criteria 1-11, run at full size.

Each test prints one ``criterion k: PASS|FAIL`` line (repeated in the
terminal summary). Long integrations are shared through module fixtures;
the whole file takes roughly ten minutes on one core.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

from wavesearch import cli
from wavesearch.analysis import (
    default_problem,
    find_peak,
    late_oscillation_metric,
    rwa_deviation,
    scaling_study,
)
from wavesearch.dynamics import IntegratorConfig, default_initial, integrate, time_step
from wavesearch.field import FieldGeometry, extract_coefficients, reconstruct, trapezoid_gram
from wavesearch.rwa import analytic_amplitudes, build_rwa
from wavesearch.spectrum import make_problem, quadratic_spectrum

sys.path.insert(0, str(Path(__file__).parent))
from calibrate_oracle import load as load_reference  # noqa: E402


def _run(kind, n, t_tau, initial=None, position=None):
    pb = default_problem(kind, n)
    if position is not None:
        pb = make_problem(pb.spectrum, searched_position=position)
    tau = build_rwa(pb).tau
    init = None if initial is None else initial(pb)
    return integrate(pb, IntegratorConfig(t_tau * tau), init)


@pytest.fixture(scope="module")
def q100():
    return _run("quadratic", 100, 2.2)


@pytest.fixture(scope="module")
def linear_runs():
    # 2.5 tau so the ripple window [1.5, 2.5] tau is covered
    return {n: _run("linear", n, 2.5) for n in (50, 100, 1000)}


def test_c1_rabi_transfer_quadratic(q100, acceptance_log):
    pk = find_peak(q100)
    ref, _ = load_reference("q100")
    ref_p, ref_t = float(ref["p_star"]), float(ref["t_star_over_tau"])
    others = {}
    for pos in (25, 75):
        others[pos] = find_peak(_run("quadratic", 100, 1.3, position=pos))
    ok = pk.p_star >= 0.98 and abs(pk.t_star_over_tau - 1) <= 0.05
    ok &= abs(pk.p_star - ref_p) <= 1e-3 and abs(pk.t_star_over_tau - ref_t) <= 5e-3
    ok &= all(o.p_star >= 0.98 and abs(o.t_star_over_tau - 1) <= 0.05 for o in others.values())
    detail = (
        f"p*={pk.p_star:.6f} t*/tau={pk.t_star_over_tau:.6f} "
        f"(reference p*={ref_p:.6f} t*/tau={ref_t:.6f}); "
        + " ".join(f"s@{k}: p*={o.p_star:.5f} t*/tau={o.t_star_over_tau:.5f}" for k, o in others.items())
    )
    assert acceptance_log(1, ok, detail)


def test_c2_improvement_with_n_linear(linear_runs, acceptance_log):
    peaks = {n: find_peak(tr) for n, tr in linear_runs.items()}
    ns = sorted(peaks)
    dt = [abs(peaks[n].t_star_over_tau - 1) for n in ns]
    dp = [1 - peaks[n].p_star for n in ns]
    ok_t = all(a >= b for a, b in zip(dt, dt[1:]))
    ok_p = all(a >= b for a, b in zip(dp, dp[1:]))
    detail = "  ".join(
        f"N={n}: |t*/tau-1|={a:.5f} 1-p*={b:.5f}" for n, a, b in zip(ns, dt, dp)
    )
    assert acceptance_log(2, ok_t and ok_p, detail)


def test_c3_sqrt_scaling(acceptance_log):
    rep = scaling_study("quadratic", [25, 50, 100, 200])
    a = rep.normalized_alpha
    ok = 0.95 <= a <= 1.05 and rep.correlation >= 0.99
    rows = " ".join(f"N={r.n}:{r.t_star_over_tau:.5f}" for r in rep.rows)
    detail = f"alpha*w0/pi={a:.6f} correlation={rep.correlation:.6f} t*/tau {rows}"
    assert acceptance_log(3, ok, detail)


def test_c4_spectators_stay_empty(q100, acceptance_log):
    tau = build_rwa(q100.problem).tau
    early = q100.times <= 2 * tau
    bound = float(q100.spectator_max[early].max())
    ref, _ = load_reference("q100")
    ref_bound = float(ref["spectator_max_2tau"])
    ok = bound <= 0.05 and ref_bound <= 0.05
    detail = f"max spectator P (t<=2tau)={bound:.3e} (reference {ref_bound:.3e})"
    assert acceptance_log(4, ok, detail)


def test_c5_late_ripple_ordering(linear_runs, acceptance_log):
    reps = {n: late_oscillation_metric(tr) for n, tr in linear_runs.items()}
    ns = sorted(reps)
    amp = [reps[n].amplitude for n in ns]
    per = [reps[n].period_over_tau for n in ns]
    ok = all(a > b for a, b in zip(amp, amp[1:])) and all(a > b for a, b in zip(per, per[1:]))
    detail = "  ".join(
        f"N={n}: amp={reps[n].amplitude:.5f} period={reps[n].period:.4f} "
        f"({reps[n].period_over_tau:.4f} tau)"
        for n in ns
    )
    assert acceptance_log(5, ok, detail)


def test_c6_interference_penalty(q100, linear_runs, acceptance_log):
    lin = linear_runs[100]
    tau = build_rwa(lin.problem).tau
    # same window as the quadratic run
    dev_lin = rwa_deviation(lin.window(0.0, q100.times[-1] * (1 + 1e-12)), build_rwa(lin.problem))
    dev_quad = rwa_deviation(q100, build_rwa(q100.problem))
    assert abs(q100.times[-1] / tau - 2.2) < 1e-3
    detail = f"linear={dev_lin:.5f} quadratic={dev_quad:.5f}"
    assert acceptance_log(6, dev_lin >= dev_quad, detail)


def _end_state(pb, t_max, samples):
    s = integrate(pb, IntegratorConfig(t_max, samples_per_fastest_period=samples)).final_state
    return np.concatenate([s.a, s.v / pb.frequencies.max()])


def test_c7_integrator_order(acceptance_log):
    pb = default_problem("quadratic", 10)
    tau = build_rwa(pb).tau
    dt = time_step(pb, 32)
    t_max = math.ceil(tau / 10 / dt) * dt  # a whole number of steps at every refinement
    ref = _end_state(pb, t_max, 32 * 16)
    err = [np.abs(_end_state(pb, t_max, 32 * k) - ref).max() for k in (1, 2, 4)]
    ratios = [err[0] / err[1], err[1] / err[2]]
    ok = all(12 <= r <= 20 for r in ratios)
    assert acceptance_log(7, ok, f"error ratios {ratios[0]:.3f}, {ratios[1]:.3f}")


def test_c8_field_round_trip(acceptance_log):
    rng = np.random.default_rng(2024)
    geom = FieldGeometry()
    worst = 0.0
    for _ in range(100):
        modes = np.sort(rng.choice(np.arange(1, 51), 10, replace=False))
        a = rng.normal(size=10) + 1j * rng.normal(size=10)
        t = rng.uniform(0, 100)
        f = reconstruct(a, t, geom, modes)
        assert f.values.size == 4 * modes.max() + 1
        worst = max(worst, float(np.abs(extract_coefficients(f, t, modes) - a).max()))
    ortho = max(
        float(np.abs(trapezoid_gram(geom.for_modes(n), n) - geom.length / 2 * np.eye(n)).max())
        for n in (1, 10, 50)
    )
    ok = worst <= 1e-10 and ortho <= 1e-12
    assert acceptance_log(8, ok, f"round trip {worst:.2e}, orthogonality {ortho:.2e}")


def test_c9_rwa_exactness(acceptance_log):
    m = build_rwa(make_problem(quadratic_spectrum(100)))
    t = np.random.default_rng(9).uniform(0, 10 * m.tau, 10_000)
    aj, as_ = analytic_amplitudes(m, t)
    dev = float(np.abs(np.abs(aj) ** 2 + np.abs(as_) ** 2 - 1).max())
    p_tau = abs(analytic_amplitudes(m, m.tau)[1]) ** 2
    ok = dev <= 4 * np.finfo(float).eps and p_tau == 1.0
    assert acceptance_log(9, ok, f"max |P_j+P_s-1|={dev:.2e}, P_s(tau)={p_tau!r}")


def test_c10_derivative_ic_insensitivity(q100, acceptance_log):
    base = find_peak(q100)
    ref_meta, _ = load_reference("q100")
    ref_v_meta, _ = load_reference("q100_v0")
    band = float(ref_v_meta["velocity_band"])
    shifts_p, shifts_t = [], []
    for seed in range(10):
        tr = _run("quadratic", 100, 2.2, initial=lambda pb, s=seed: default_initial(pb, band, s))
        pk = find_peak(tr)
        shifts_p.append(abs(pk.p_star / base.p_star - 1))
        shifts_t.append(abs(pk.t_star_over_tau / base.t_star_over_tau - 1))
    ref_shift_p = abs(float(ref_v_meta["p_star"]) / float(ref_meta["p_star"]) - 1)
    ref_shift_t = abs(float(ref_v_meta["t_star_over_tau"]) / float(ref_meta["t_star_over_tau"]) - 1)
    ok = max(shifts_p) <= 0.01 and max(shifts_t) <= 0.01
    ok &= ref_shift_p <= 0.01 and ref_shift_t <= 0.01
    detail = (
        f"band={band:g}: max rel change p*={max(shifts_p):.2e} t*/tau={max(shifts_t):.2e} "
        f"(reference seed 0: {ref_shift_p:.2e}, {ref_shift_t:.2e})"
    )
    assert acceptance_log(10, ok, detail)


def test_c11_determinism(tmp_path, acceptance_log, capsys):
    files = {
        "simulate": "trajectory.csv",
        "compare-rwa": "compare.csv",
        "spectrum-stats": "degeneracy.csv",
        "field-snapshot": "field_001.csv",
    }
    same = {}
    for mode, name in files.items():
        blobs = []
        out = tmp_path / mode
        for _ in range(2):
            code = cli.main([mode, "--spectrum", "quadratic", "--n", "50", "--out-dir", str(out)])
            assert code == 0
            blobs.append((out / name).read_bytes())
            (out / name).unlink()
        same[mode] = blobs[0] == blobs[1]
    capsys.readouterr()
    ok = all(same.values())
    assert acceptance_log(11, ok, " ".join(f"{m}={'identical' if v else 'DIFFERENT'}" for m, v in same.items()))
