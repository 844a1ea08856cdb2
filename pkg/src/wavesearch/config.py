"""Experiment configuration: a ``key = value`` text file plus overrides."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .spectrum import (
    ModeSpectrum,
    SearchProblem,
    SpectrumError,
    custom_spectrum,
    linear_spectrum,
    make_problem,
    quadratic_spectrum,
)

MODES = ("simulate", "compare-rwa", "scan", "spectrum-stats", "field-snapshot")
KINDS = ("linear", "quadratic", "custom")


class ConfigError(ValueError):
    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text: str):
        return None if text.strip().lower() in ("", "none", "auto") else conv(text)
    return parse


@dataclass
class ExperimentConfig:
    mode: str = "simulate"
    spectrum: str = "quadratic"
    n: int = 100
    indices: tuple[int, ...] | None = None
    omega0: float = 1.0
    initial_index: int | None = None
    searched_position: int | None = None
    searched_frequency: float | None = None
    t_max_tau: float = 2.2
    dt_samples: int = 32
    record_stride: int | None = None
    max_steps: int = 10**8
    velocity_band: float = 0.0
    seed: int = 0
    n_list: tuple[int, ...] = (25, 50, 100, 200)
    workers: int = 1
    snapshot_tau: tuple[float, ...] = (0.0, 0.5, 1.0)
    rwa_warn_ratio: float = 20.0
    verbose_modes: bool = False
    out_dir: str = "out"

    def resolved_items(self) -> list[tuple[str, str]]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            out.append((f.name, "none" if v is None else str(v)))
        return out


_PARSERS = {
    "mode": str,
    "spectrum": str,
    "n": int,
    "indices": _opt(_int_list),
    "omega0": float,
    "initial_index": _opt(int),
    "searched_position": _opt(int),
    "searched_frequency": _opt(float),
    "t_max_tau": float,
    "dt_samples": int,
    "record_stride": _opt(int),
    "max_steps": int,
    "velocity_band": float,
    "seed": int,
    "n_list": _int_list,
    "workers": int,
    "snapshot_tau": _float_list,
    "rwa_warn_ratio": float,
    "verbose_modes": _bool,
    "out_dir": str,
}


def parse_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def build_config(raw: dict[str, str]) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for key, text in raw.items():
        if key not in _PARSERS:
            raise ConfigError(key, "unknown key")
        try:
            setattr(cfg, key, _PARSERS[key](text))
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
    validate(cfg)
    return cfg


def load_config(path: str | Path | None, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """File values first, then ``overrides`` (command-line flags win)."""
    raw: dict[str, str] = {}
    if path is not None:
        raw.update(parse_text(Path(path).read_text()))
    raw.update(overrides or {})
    return build_config(raw)


def validate(cfg: ExperimentConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
    if cfg.spectrum not in KINDS:
        raise ConfigError("spectrum", f"must be one of {', '.join(KINDS)}")
    if cfg.spectrum == "custom" and not cfg.indices:
        raise ConfigError("indices", "custom spectrum needs an index list")
    if not (cfg.omega0 > 0 and math.isfinite(cfg.omega0)):
        raise ConfigError("omega0", "must be > 0")
    if not cfg.t_max_tau > 0:
        raise ConfigError("t_max_tau", "must be > 0")
    if cfg.dt_samples < 1:
        raise ConfigError("dt_samples", "must be >= 1")
    if cfg.record_stride is not None and cfg.record_stride < 1:
        raise ConfigError("record_stride", "must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers", "must be >= 1")
    if cfg.velocity_band < 0:
        raise ConfigError("velocity_band", "must be >= 0")
    if cfg.mode == "scan":
        if cfg.spectrum == "custom":
            raise ConfigError("spectrum", "scan needs a linear or quadratic spectrum")
        if not cfg.n_list or min(cfg.n_list) < 2:
            raise ConfigError("n_list", "needs sizes >= 2")
    else:
        problem_from_config(cfg)


def spectrum_from_config(cfg: ExperimentConfig, n: int | None = None) -> ModeSpectrum:
    n = cfg.n if n is None else n
    try:
        if cfg.spectrum == "linear":
            return linear_spectrum(n, cfg.omega0)
        if cfg.spectrum == "quadratic":
            return quadratic_spectrum(n, cfg.omega0)
        return custom_spectrum(cfg.indices, cfg.omega0)
    except SpectrumError as exc:
        field = "indices" if cfg.spectrum == "custom" else "n"
        raise ConfigError(field, str(exc)) from None


def resolve_searched(cfg: ExperimentConfig, spectrum: ModeSpectrum) -> int | None:
    """Position of the searched mode; an explicit position wins over a frequency.

    A frequency must equal ``w0 * index`` for exactly one mode; the match is
    made on the integer index after dividing by ``w0``.
    """
    if cfg.searched_position is not None:
        if not 0 <= cfg.searched_position < spectrum.size:
            raise ConfigError("searched_position", f"out of range [0, {spectrum.size})")
        return cfg.searched_position
    if cfg.searched_frequency is None:
        return None
    ratio = cfg.searched_frequency / spectrum.base_frequency
    index = round(ratio)
    if not math.isclose(ratio, index, rel_tol=0, abs_tol=1e-9 * max(1.0, abs(ratio))):
        raise ConfigError("searched_frequency", f"no mode has frequency {cfg.searched_frequency}")
    matches = [p for p, i in enumerate(spectrum.indices) if i == index]
    if not matches:
        raise ConfigError("searched_frequency", f"no mode has frequency {cfg.searched_frequency}")
    if len(matches) > 1:
        raise ConfigError("searched_frequency", "frequency matches several modes")
    return matches[0]


def problem_from_config(cfg: ExperimentConfig, n: int | None = None) -> SearchProblem:
    spectrum = spectrum_from_config(cfg, n)
    position = resolve_searched(cfg, spectrum)
    try:
        return make_problem(spectrum, cfg.initial_index, position)
    except SpectrumError as exc:
        field = "initial_index" if "initial" in str(exc) or "w_sj" in str(exc) else "searched_position"
        raise ConfigError(field, str(exc)) from None
