"""Two-level rotating-wave model.

Keeping only the resonant terms reduces the coupled-mode equations to
``a_j' = -i W a_s`` and ``a_s' = -i W a_j``, solved by ``a_j = cos(Wt)``
and ``a_s = -i sin(Wt)``. The sign of ``a_s`` is the one the full
dynamics produces; only squared moduli enter the comparisons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .spectrum import SearchProblem


@dataclass(frozen=True)
class RwaModel:
    """Rabi frequency ``w0 / (2 sqrt(N))`` and peak time ``pi sqrt(N) / w0``."""

    rabi_frequency: float
    tau: float
    problem: SearchProblem


def build_rwa(problem: SearchProblem) -> RwaModel:
    w0, n = problem.base_frequency, problem.n
    return RwaModel(w0 / (2.0 * math.sqrt(n)), math.pi * math.sqrt(n) / w0, problem)


def optimal_time(problem: SearchProblem) -> float:
    return math.pi * math.sqrt(problem.n) / problem.base_frequency


def analytic_amplitudes(model: RwaModel, t):
    """``(a_j, a_s)`` at time(s) ``t``; every other mode stays at zero."""
    phase = model.rabi_frequency * np.asarray(t, dtype=float)
    return np.cos(phase) + 0j, -1j * np.sin(phase)


def validity_ratio(problem: SearchProblem) -> float:
    """Smallest mode frequency over the Rabi frequency."""
    return float(problem.frequencies.min() / build_rwa(problem).rabi_frequency)


def rwa_trajectory(model: RwaModel, times) -> Trajectory:
    """The analytic model sampled at ``times`` as a :class:`Trajectory`."""
    times = np.asarray(times, dtype=float)
    pb = model.problem
    a_j, a_s = analytic_amplitudes(model, times)
    P = np.zeros((times.size, pb.n + 1))
    P[:, pb.initial_slot] = np.abs(a_j) ** 2
    P[:, pb.searched_slot] = np.abs(a_s) ** 2
    return Trajectory(times, P, pb, "rwa")
