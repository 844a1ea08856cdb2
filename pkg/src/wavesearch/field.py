"""Spatial picture of the modal amplitudes on ``[0, L]``.

``Psi(x, t) = sum_n a_n(t) exp(-i w_n t) sin(K_n x)`` with ``K_n = K0 n``,
``K0 = 2 pi / L`` and ``w_n = c K_n``. Used for verification and plotting
only; the integrator works in mode space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectrum import ModeSpectrum


class ResolutionError(ValueError):
    """Grid too coarse for the requested modes."""


@dataclass(frozen=True)
class FieldGeometry:
    length: float = 2 * math.pi
    speed: float = 1.0
    intervals: int = 0

    def __post_init__(self):
        if not (self.length > 0 and self.speed > 0):
            raise ValueError("length and speed must be positive")

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.length

    @property
    def omega0(self) -> float:
        return self.speed * self.k0

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.intervals + 1)

    def for_modes(self, max_index: int) -> "FieldGeometry":
        """Same domain with the default grid of ``4 * max_index`` intervals."""
        return FieldGeometry(self.length, self.speed, 4 * int(max_index))


@dataclass
class WaveField:
    geometry: FieldGeometry
    t: float
    values: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.geometry.grid


def _indices(modes: ModeSpectrum | Sequence[int]) -> np.ndarray:
    if isinstance(modes, ModeSpectrum):
        return np.asarray(modes.indices)
    return np.asarray(modes, dtype=int)


def _resolve(geometry: FieldGeometry, idx: np.ndarray) -> FieldGeometry:
    if geometry.intervals == 0:
        geometry = geometry.for_modes(idx.max())
    if geometry.intervals < 4 * idx.max():
        raise ResolutionError(
            f"{geometry.intervals} grid intervals cannot resolve mode index {idx.max()}"
            f" (need >= {4 * idx.max()})"
        )
    return geometry


def _synthesize(coeffs, t, geometry, modes, basis) -> WaveField:
    idx = _indices(modes)
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != idx.shape:
        raise ValueError(f"{coeffs.size} coefficients for {idx.size} modes")
    geometry = _resolve(geometry, idx)
    x = geometry.grid
    weights = coeffs * np.exp(-1j * geometry.omega0 * idx * t)
    values = basis(np.outer(geometry.k0 * idx, x)).T @ weights
    return WaveField(geometry, t, values)


def reconstruct(coeffs, t: float, geometry: FieldGeometry, modes) -> WaveField:
    """Sample ``Psi(x, t)`` on the grid from modal amplitudes."""
    return _synthesize(coeffs, t, geometry, modes, np.sin)


def apply_T(coeffs, t: float, geometry: FieldGeometry, modes) -> WaveField:
    """The sine basis swapped for cosines, amplitudes unchanged."""
    return _synthesize(coeffs, t, geometry, modes, np.cos)


def extract_coefficients(field: WaveField, t: float, modes) -> np.ndarray:
    """Project the field back onto the modes with the composite trapezoid rule."""
    idx = _indices(modes)
    geometry = _resolve(field.geometry, idx)
    if geometry != field.geometry:
        raise ResolutionError("field grid does not match the required resolution")
    x = geometry.grid
    h = geometry.length / geometry.intervals
    w = np.full(x.size, h)
    w[0] = w[-1] = h / 2
    proj = np.sin(np.outer(geometry.k0 * idx, x)) @ (w * field.values)
    return np.exp(1j * geometry.omega0 * idx * t) * (2.0 / geometry.length) * proj


def trapezoid_gram(geometry: FieldGeometry, max_index: int) -> np.ndarray:
    """Grid quadrature of ``sin(K_n x) sin(K_m x)`` for ``n, m = 1..max_index``."""
    x = geometry.grid
    h = geometry.length / geometry.intervals
    w = np.full(x.size, h)
    w[0] = w[-1] = h / 2
    s = np.sin(np.outer(geometry.k0 * np.arange(1, max_index + 1), x))
    return (s * w) @ s.T


def grid_norm(field: WaveField) -> float:
    h = field.geometry.length / field.geometry.intervals
    p = np.abs(field.values) ** 2
    return float(math.sqrt(h * (p.sum() - 0.5 * (p[0] + p[-1]))))
