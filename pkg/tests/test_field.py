import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavesearch.field import (
    FieldGeometry,
    ResolutionError,
    WaveField,
    apply_T,
    extract_coefficients,
    grid_norm,
    reconstruct,
    trapezoid_gram,
)
from wavesearch.spectrum import quadratic_spectrum

GEOM = FieldGeometry()


def test_geometry_defaults():
    assert GEOM.k0 == 1.0 and GEOM.omega0 == 1.0
    g = FieldGeometry(length=3.0, speed=2.0)
    assert g.k0 == pytest.approx(2 * math.pi / 3) and g.omega0 == pytest.approx(4 * math.pi / 3)
    assert FieldGeometry().for_modes(10).grid.size == 41


def test_single_mode():
    f = reconstruct([1.0], 0.0, GEOM, [1])
    assert np.allclose(f.values, np.sin(f.x), atol=1e-15)
    f = apply_T([1.0], 0.0, GEOM, [1])
    assert np.allclose(f.values, np.cos(f.x), atol=1e-15)
    assert reconstruct([0.0, 0.0], 1.3, GEOM, [1, 2]).values.any() == 0


def test_phase_wraps():
    f0 = reconstruct([1.0], 0.0, GEOM, [1])
    f1 = reconstruct([1.0], 2 * math.pi, GEOM, [1])
    assert np.abs(f0.values - f1.values).max() < 1e-14


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-20, 20))
def test_round_trip(seed, t):
    rng = np.random.default_rng(seed)
    modes = np.sort(rng.choice(np.arange(1, 40), 10, replace=False))
    a = rng.normal(size=10) + 1j * rng.normal(size=10)
    f = reconstruct(a, t, GEOM, modes)
    assert f.values.size == 4 * modes.max() + 1
    assert np.abs(extract_coefficients(f, t, modes) - a).max() < 1e-10


def test_orthogonality():
    for n_max in (1, 5, 10, 37):
        g = trapezoid_gram(GEOM.for_modes(n_max), n_max)
        assert np.abs(g - (GEOM.length / 2) * np.eye(n_max)).max() < 1e-12


def test_pure_mode_extraction():
    modes = [1, 4, 9]
    f = reconstruct([0, 1, 0], 0.7, GEOM, modes)
    c = extract_coefficients(f, 0.7, modes)
    assert abs(c[1] - 1) < 1e-12 and np.abs(c[[0, 2]]).max() < 1e-12


def test_boundaries_vanish():
    rng = np.random.default_rng(3)
    a = rng.normal(size=6) + 1j * rng.normal(size=6)
    f = reconstruct(a, 2.0, GEOM, quadratic_spectrum(6))
    assert abs(f.values[0]) < 1e-15 and abs(f.values[-1]) < 1e-12


def test_T_preserves_norm():
    rng = np.random.default_rng(4)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    modes = np.arange(1, 9)
    f, tf = reconstruct(a, 0.3, GEOM, modes), apply_T(a, 0.3, GEOM, modes)
    assert grid_norm(f) == pytest.approx(grid_norm(tf), rel=1e-12)
    assert grid_norm(f) == pytest.approx(math.sqrt(math.pi * np.sum(np.abs(a) ** 2)), rel=1e-12)


def test_resolution_errors():
    with pytest.raises(ResolutionError):
        reconstruct([1.0, 1.0], 0.0, FieldGeometry(intervals=10), [1, 3])
    f = reconstruct([1.0], 0.0, GEOM, [1])
    with pytest.raises(ResolutionError):
        extract_coefficients(f, 0.0, [1, 5])
    with pytest.raises(ValueError):
        reconstruct([1.0, 2.0], 0.0, GEOM, [1])


def test_custom_length():
    g = FieldGeometry(length=3.0, speed=0.5)
    f = reconstruct([2.0 - 1j], 1.0, g, [2])
    expected = (2.0 - 1j) * np.exp(-1j * g.omega0 * 2 * 1.0) * np.sin(2 * g.k0 * f.x)
    assert np.abs(f.values - expected).max() < 1e-14
    assert isinstance(f, WaveField)
