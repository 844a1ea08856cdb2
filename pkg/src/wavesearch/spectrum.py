"""Mode spectra and search-problem configuration.

Every frequency is stored as ``base_frequency * index`` with an integer
index, so that frequency differences can be compared exactly on the
integer indices.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class SpectrumError(ValueError):
    """Invalid spectrum or search-problem parameters."""


@dataclass(frozen=True)
class ModeSpectrum:
    """Ordered, nondegenerate set of mode frequencies ``w_n = w0 * n``."""

    base_frequency: float
    indices: tuple[int, ...]
    kind: str = "custom"

    def __post_init__(self):
        if not np.isfinite(self.base_frequency) or self.base_frequency <= 0:
            raise SpectrumError(f"base_frequency must be > 0, got {self.base_frequency}")
        idx = tuple(int(i) for i in self.indices)
        if any(int(i) != i for i in self.indices):
            raise SpectrumError("mode indices must be integers")
        if len(idx) < 2:
            raise SpectrumError("a search set needs at least 2 modes")
        if idx[0] <= 0:
            raise SpectrumError("mode indices must be positive")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise SpectrumError("mode indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def frequencies(self) -> np.ndarray:
        return self.base_frequency * np.asarray(self.indices, dtype=float)

    def frequency(self, position: int) -> float:
        return self.base_frequency * self.indices[position]

    def position_of_index(self, index: int) -> int | None:
        try:
            return self.indices.index(int(index))
        except ValueError:
            return None


def _check_size(n: int, base_frequency: float) -> None:
    if int(n) != n or n < 2:
        raise SpectrumError(f"N must be an integer >= 2, got {n}")
    if not base_frequency > 0:
        raise SpectrumError(f"base frequency must be > 0, got {base_frequency}")


def linear_spectrum(n: int, base_frequency: float = 1.0) -> ModeSpectrum:
    """Indices ``1, 2, ..., n``."""
    _check_size(n, base_frequency)
    return ModeSpectrum(float(base_frequency), tuple(range(1, int(n) + 1)), "linear")


def quadratic_spectrum(n: int, base_frequency: float = 1.0) -> ModeSpectrum:
    """Indices ``1, 4, 9, ..., n**2``."""
    _check_size(n, base_frequency)
    return ModeSpectrum(
        float(base_frequency), tuple(k * k for k in range(1, int(n) + 1)), "quadratic"
    )


def custom_spectrum(indices: Sequence[int], base_frequency: float = 1.0) -> ModeSpectrum:
    return ModeSpectrum(float(base_frequency), tuple(indices), "custom")


def default_initial_index(spectrum: ModeSpectrum) -> int:
    """Index of the initially excited mode when none is given.

    ``N + 1`` for the linear law, ``(N + 1)**2`` for the quadratic law and
    one past the largest index otherwise.
    """
    n = spectrum.size
    if spectrum.kind == "linear":
        return n + 1
    if spectrum.kind == "quadratic":
        return (n + 1) ** 2
    return spectrum.indices[-1] + 1


def default_searched_position(spectrum: ModeSpectrum) -> int:
    return spectrum.size // 2


@dataclass(frozen=True)
class SearchProblem:
    """A spectrum, the initial mode ``j`` outside it and the searched mode ``s``.

    Frequency differences follow ``w_ab = w_b - w_a``; the drive frequency
    is ``w_sj = w_j - w_s``.
    """

    spectrum: ModeSpectrum
    initial_index: int
    searched_position: int
    _all_indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sp = self.spectrum
        if int(self.initial_index) != self.initial_index or self.initial_index <= 0:
            raise SpectrumError(f"initial index must be a positive integer, got {self.initial_index}")
        if self.initial_index in sp.indices:
            raise SpectrumError(
                f"initial index {self.initial_index} collides with the search set"
            )
        if not 0 <= self.searched_position < sp.size:
            raise SpectrumError(
                f"searched position {self.searched_position} out of range [0, {sp.size})"
            )
        object.__setattr__(self, "initial_index", int(self.initial_index))
        object.__setattr__(self, "searched_position", int(self.searched_position))
        if self.initial_index == self.searched_index:
            raise SpectrumError("drive frequency w_sj is zero")
        all_idx = np.array(sp.indices + (self.initial_index,), dtype=np.int64)
        object.__setattr__(self, "_all_indices", all_idx)

    @property
    def n(self) -> int:
        return self.spectrum.size

    @property
    def base_frequency(self) -> float:
        return self.spectrum.base_frequency

    @property
    def searched_index(self) -> int:
        return self.spectrum.indices[self.searched_position]

    @property
    def omega_j(self) -> float:
        return self.base_frequency * self.initial_index

    @property
    def omega_s(self) -> float:
        return self.base_frequency * self.searched_index

    @property
    def omega_sj(self) -> float:
        return self.base_frequency * (self.initial_index - self.searched_index)

    @property
    def all_indices(self) -> np.ndarray:
        """Indices of the search set followed by the initial mode (last slot)."""
        return self._all_indices

    @property
    def frequencies(self) -> np.ndarray:
        return self.base_frequency * self._all_indices.astype(float)

    @property
    def max_index(self) -> int:
        return int(self._all_indices.max())

    @property
    def initial_slot(self) -> int:
        """Position of mode j in per-mode arrays."""
        return self.n

    @property
    def searched_slot(self) -> int:
        return self.searched_position


def make_problem(
    spectrum: ModeSpectrum,
    initial_index: int | None = None,
    searched_position: int | None = None,
) -> SearchProblem:
    if initial_index is None:
        initial_index = default_initial_index(spectrum)
    if searched_position is None:
        searched_position = default_searched_position(spectrum)
    return SearchProblem(spectrum, initial_index, searched_position)


def index_histogram(indices: Sequence[int]) -> dict[int, int]:
    """Multiplicity of every index difference ``b - a`` over ordered pairs
    of distinct entries; both signs are present."""
    idx = [int(i) for i in indices]
    counts: Counter[int] = Counter(b - a for a in idx for b in idx if a != b)
    return dict(sorted(counts.items()))


def degeneracy_histogram(problem: SearchProblem, include_initial: bool = True) -> dict[int, int]:
    """Multiplicity of every frequency difference over ordered mode pairs of
    the spectrum together with mode j (or the search set alone).

    Keys are index differences (multiply by the base frequency for the
    frequency difference).
    """
    idx = problem.all_indices if include_initial else problem.spectrum.indices
    return index_histogram(idx)


def collision_counts(histogram: dict[int, int]) -> dict[int, int]:
    """How many positive differences occur with each multiplicity."""
    return dict(sorted(Counter(m for d, m in histogram.items() if d > 0).items()))
