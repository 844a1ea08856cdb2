"""Command-line driver.

    wavesearch simulate --spectrum quadratic --n 100 --out-dir out
    wavesearch scan --config base.cfg --n-list 25,50,100,200 --workers 4

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error. Failures print one ``error: kind=... ...`` line on stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analysis, output
from .config import MODES, ConfigError, ExperimentConfig, load_config, problem_from_config
from .dynamics import IntegrationError, IntegratorConfig, default_initial, integrate, norm_deviation
from .field import FieldGeometry, reconstruct
from .rwa import build_rwa, validity_ratio
from .spectrum import collision_counts, degeneracy_histogram

log = logging.getLogger("wavesearch")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

# flag -> config key
_FLAGS = {
    "n": "n",
    "spectrum": "spectrum",
    "indices": "indices",
    "omega0": "omega0",
    "j_index": "initial_index",
    "s_position": "searched_position",
    "s_frequency": "searched_frequency",
    "t_max_tau": "t_max_tau",
    "dt_samples": "dt_samples",
    "record_stride": "record_stride",
    "velocity_band": "velocity_band",
    "seed": "seed",
    "n_list": "n_list",
    "workers": "workers",
    "snapshot_tau": "snapshot_tau",
    "out_dir": "out_dir",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavesearch", description="Resonant mode search simulations")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--n", help="search set size N")
    ap.add_argument("--spectrum", choices=["linear", "quadratic", "custom"])
    ap.add_argument("--indices", help="comma-separated mode indices for a custom spectrum")
    ap.add_argument("--omega0", help="base frequency")
    ap.add_argument("--j-index", help="index of the initially excited mode")
    ap.add_argument("--s-position", help="0-based position of the searched mode")
    ap.add_argument("--s-frequency", help="frequency of the searched mode")
    ap.add_argument("--t-max-tau", help="run length in units of tau")
    ap.add_argument("--dt-samples", help="RK4 steps per fastest period")
    ap.add_argument("--record-stride", help="record every k-th step")
    ap.add_argument("--velocity-band", help="random initial derivatives up to this modulus")
    ap.add_argument("--seed")
    ap.add_argument("--n-list", help="comma-separated sizes for scan")
    ap.add_argument("--workers", help="parallel workers for scan")
    ap.add_argument("--snapshot-tau", help="comma-separated snapshot times in units of tau")
    ap.add_argument("--out-dir")
    ap.add_argument("--verbose-modes", action="store_true", help="dump every mode's P")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override any configuration key")
    return ap


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    out = {"mode": args.mode}
    for item in args.set:
        if "=" not in item:
            raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    for flag, key in _FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            out[key] = value
    if args.verbose_modes:
        out["verbose_modes"] = "true"
    return out


def _integrator(cfg: ExperimentConfig, problem, t_max: float) -> IntegratorConfig:
    return IntegratorConfig(
        t_max=t_max,
        samples_per_fastest_period=cfg.dt_samples,
        record_stride=cfg.record_stride,
        max_steps=cfg.max_steps,
    )


def _check_validity(cfg, problem, out) -> None:
    ratio = validity_ratio(problem)
    out.append(("validity_ratio", ratio))
    if ratio < cfg.rwa_warn_ratio:
        log.warning("min frequency / Rabi frequency = %.3g < %.3g: two-level picture degraded",
                    ratio, cfg.rwa_warn_ratio)


def _full_run(cfg, problem):
    model = build_rwa(problem)
    initial = default_initial(problem, cfg.velocity_band, cfg.seed)
    traj = integrate(problem, _integrator(cfg, problem, cfg.t_max_tau * model.tau), initial)
    return model, traj


def run(cfg: ExperimentConfig, stdout=None) -> int:
    """Execute one configured experiment; raise on failure."""
    stdout = stdout or sys.stdout
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = cfg.resolved_items()
    summary: list[tuple[str, object]] = [("mode", cfg.mode)]

    if cfg.mode == "scan":
        report = analysis.scaling_study(
            cfg.spectrum, cfg.n_list, base_frequency=cfg.omega0, t_max_tau=cfg.t_max_tau,
            samples_per_fastest_period=cfg.dt_samples, workers=cfg.workers,
        )
        path = out_dir / "scaling.csv"
        output.write_scaling(path, report, meta)
        summary += output.scaling_summary(report) + [("output", str(path))]
        stdout.write(output.summary_lines(summary))
        return EXIT_OK

    problem = problem_from_config(cfg)
    summary += [("N", problem.n), ("initial_index", problem.initial_index),
                ("searched_index", problem.searched_index), ("omega_sj", problem.omega_sj)]

    if cfg.mode == "spectrum-stats":
        hist = degeneracy_histogram(problem, include_initial=False)
        path = out_dir / "degeneracy.csv"
        output.write_histogram(path, hist, problem.base_frequency, meta,
                               with_j=degeneracy_histogram(problem))
        counts = collision_counts(hist)
        summary += [("distinct_differences", sum(1 for d in hist if d > 0)),
                    ("max_multiplicity", max(counts)), ("output", str(path))]
    elif cfg.mode == "simulate":
        _check_validity(cfg, problem, summary)
        model, traj = _full_run(cfg, problem)
        path = out_dir / "trajectory.csv"
        output.write_trajectory(path, traj, meta, cfg.verbose_modes)
        summary += [("tau", model.tau)] + output.peak_summary(analysis.find_peak(traj))
        summary += [("norm_deviation", norm_deviation(traj)), ("output", str(path))]
    elif cfg.mode == "compare-rwa":
        _check_validity(cfg, problem, summary)
        model, traj = _full_run(cfg, problem)
        path = out_dir / "compare.csv"
        output.write_comparison(path, traj, model, meta)
        summary += [("tau", model.tau), ("rwa_deviation", analysis.rwa_deviation(traj, model)),
                    ("norm_deviation", norm_deviation(traj)), ("output", str(path))]
    elif cfg.mode == "field-snapshot":
        model = build_rwa(problem)
        geom = FieldGeometry().for_modes(problem.max_index)
        if abs(geom.omega0 - problem.base_frequency) > 1e-12 * problem.base_frequency:
            geom = FieldGeometry(2 * 3.141592653589793 / problem.base_frequency, 1.0,
                                 4 * problem.max_index)
        initial = default_initial(problem, cfg.velocity_band, cfg.seed)
        for k, t_tau in enumerate(cfg.snapshot_tau):
            if t_tau > 0:
                traj = integrate(problem, _integrator(cfg, problem, t_tau * model.tau), initial)
                state = traj.final_state
                t, a = state.t, state.a
            else:
                t, a = 0.0, initial.a
            field = reconstruct(a, t, geom, problem.all_indices)
            path = out_dir / f"field_{k:03d}.csv"
            output.write_field(path, field, meta + [("snapshot_t", output.fmt(t))])
            summary.append((f"snapshot_{k}", f"t={output.fmt(t)} file={path}"))
    stdout.write(output.summary_lines(summary))
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        return run(cfg)
    except ConfigError as exc:
        print(f"error: kind=config field={exc.field} reason={exc.reason}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"error: kind=numerical type={type(exc).__name__} reason={exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: kind=io reason={exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
