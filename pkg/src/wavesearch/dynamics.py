"""Full coupled-mode amplitude dynamics and its fixed-step RK4 integrator.

Each mode ``n`` of the search set plus the initial mode ``j`` obeys

    a_n'' - 2 i w_n a_n' = -(w0 / sqrt(N)) * {
        w_n (1 - d_nj) a_j exp(i w_sn t)
        + w_j d_nj sum_{l in N} a_l exp(i w_ls t) }

with ``w_ab = w_b - w_a``. The system is reduced to first order on
``(a, v = da/dt)``. Per-mode arrays hold the search set in spectrum order
followed by ``j`` in the last slot.

Time is counted in integer half steps. Because every frequency is
``w0 * integer`` and the step is ``2 pi / (w0 * m * S)`` (``m`` the
largest index, ``S`` the samples per fastest period), every phase
``w0 * d * t`` is ``2 pi * (d * h mod D) / D`` with ``D = 2 m S``: phase
argument reduction is exact integer arithmetic, whatever the run length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .spectrum import SearchProblem


class IntegrationError(RuntimeError):
    """Base class for integration failures."""


class NonFiniteError(IntegrationError):
    """An amplitude became NaN or Inf (usually: step too large)."""


class StepCapExceeded(IntegrationError):
    """The requested run needs more steps than the configured cap."""


@dataclass
class AmplitudeState:
    t: float
    a: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.v = np.asarray(self.v, dtype=complex)
        if self.a.shape != self.v.shape or self.a.ndim != 1:
            raise ValueError("a and v must be 1-d arrays of equal length")

    @property
    def norm(self) -> float:
        return float(np.sum(self.a.real**2 + self.a.imag**2))


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    ``t_max`` is absolute time. ``record_stride`` of ``None`` picks a stride
    giving about ``target_records`` recorded samples.
    """

    t_max: float
    samples_per_fastest_period: int = 32
    record_stride: int | None = None
    max_steps: int = 10**8
    target_records: int = 2000

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.samples_per_fastest_period < 1:
            raise ValueError("samples_per_fastest_period must be >= 1")
        if self.record_stride is not None and self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    def step(self, problem: SearchProblem) -> float:
        return time_step(problem, self.samples_per_fastest_period)

    def n_steps(self, problem: SearchProblem) -> int:
        return max(1, math.ceil(self.t_max / self.step(problem) - 1e-9))

    def stride(self, problem: SearchProblem) -> int:
        if self.record_stride is not None:
            return self.record_stride
        return max(1, self.n_steps(problem) // self.target_records)


def time_step(problem: SearchProblem, samples_per_fastest_period: int) -> float:
    """``(2 pi / w_max) / samples``, ``w_max`` over the search set and ``j``."""
    return 2.0 * math.pi / (problem.base_frequency * problem.max_index * samples_per_fastest_period)


@dataclass
class Trajectory:
    """Recorded squared amplitudes ``P[k, n] = |a_n(times[k])|**2``."""

    times: np.ndarray
    P: np.ndarray
    problem: SearchProblem
    model: str = "full"
    final_state: AmplitudeState | None = field(default=None, repr=False)

    @property
    def norm(self) -> np.ndarray:
        return self.P.sum(axis=1)

    @property
    def P_j(self) -> np.ndarray:
        return self.P[:, self.problem.initial_slot]

    @property
    def P_s(self) -> np.ndarray:
        return self.P[:, self.problem.searched_slot]

    @property
    def spectator_max(self) -> np.ndarray:
        """Per recorded time, max of ``P_n`` over modes other than j and s."""
        mask = np.ones(self.P.shape[1], dtype=bool)
        mask[[self.problem.initial_slot, self.problem.searched_slot]] = False
        return self.P[:, mask].max(axis=1)

    def window(self, t0: float, t1: float) -> "Trajectory":
        keep = (self.times >= t0) & (self.times <= t1)
        return Trajectory(self.times[keep], self.P[keep], self.problem, self.model)


def coupling_elements(problem: SearchProblem, state: AmplitudeState) -> np.ndarray:
    """Raw perturbation matrix elements ``<n|V(t)|Psi>`` for every mode.

    Search-set modes get ``a_j exp(i w_sj t) / sqrt(N)``; the initial mode
    gets ``exp(-i w_sj t) sum_l a_l exp(-i w_l t) / sqrt(N)``.
    """
    _check_state(problem, state)
    n = problem.n
    t = state.t
    w = problem.frequencies
    out = np.empty(n + 1, dtype=complex)
    out[:n] = state.a[n] * np.exp(1j * problem.omega_sj * t)
    out[n] = np.exp(-1j * problem.omega_sj * t) * np.sum(state.a[:n] * np.exp(-1j * w[:n] * t))
    return out / math.sqrt(n)


def _check_state(problem: SearchProblem, state: AmplitudeState) -> None:
    if state.a.shape[0] != problem.n + 1:
        raise ValueError(f"state has {state.a.shape[0]} modes, problem needs {problem.n + 1}")


@numba.njit(cache=True)
def _derivs(a, v, phase, omega, g, out_a, out_v):
    # phase[l] = exp(i w_sl t) for l in the search set
    n = phase.shape[0]
    aj = a[n]
    acc = 0.0 + 0.0j
    for l in range(n):
        p = phase[l]
        acc += a[l] * p.conjugate()
        out_a[l] = v[l]
        out_v[l] = 2j * omega[l] * v[l] - g * omega[l] * aj * p
    out_a[n] = v[n]
    out_v[n] = 2j * omega[n] * v[n] - g * omega[n] * acc


def _coupling(problem: SearchProblem) -> float:
    return problem.base_frequency / math.sqrt(problem.n)


def _detuning_indices(problem: SearchProblem) -> np.ndarray:
    idx = problem.all_indices
    return (idx[:-1] - problem.searched_index).astype(np.int64)


def rhs(problem: SearchProblem, state: AmplitudeState) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives ``(da/dt, dv/dt)`` at ``state.t``."""
    _check_state(problem, state)
    phase = np.exp(1j * problem.base_frequency * _detuning_indices(problem) * state.t)
    da = np.empty_like(state.a)
    dv = np.empty_like(state.v)
    _derivs(state.a, state.v, phase, problem.frequencies, _coupling(problem), da, dv)
    return da, dv


def default_initial(
    problem: SearchProblem, velocity_band: float = 0.0, seed: int | None = None
) -> AmplitudeState:
    """``a_j = 1``, all other amplitudes zero.

    With ``velocity_band > 0`` the initial derivatives are random complex
    numbers with modulus uniform in ``[0, velocity_band]`` and uniform phase.
    """
    m = problem.n + 1
    a = np.zeros(m, dtype=complex)
    a[problem.initial_slot] = 1.0
    v = np.zeros(m, dtype=complex)
    if velocity_band > 0:
        rng = np.random.default_rng(seed)
        mod = rng.uniform(0.0, velocity_band, m)
        arg = rng.uniform(0.0, 2 * math.pi, m)
        v = mod * np.exp(1j * arg)
    return AmplitudeState(0.0, a, v)


_RESYNC = 256


@numba.njit(cache=True)
def _exact_phase(det, h, period, out):
    for l in range(det.shape[0]):
        x = 2.0 * np.pi * ((det[l] * h) % period) / period
        out[l] = complex(math.cos(x), math.sin(x))


@numba.njit(cache=True)
def _advance_phase(src, inc, det, h, period, out):
    # multiplicative update, re-anchored on the exact reduced phase
    if h % _RESYNC == 0:
        _exact_phase(det, h, period, out)
    else:
        for l in range(src.shape[0]):
            out[l] = src[l] * inc[l]


@numba.njit(cache=True)
def _rk4_run(a0, v0, omega, g, det, period, dt, n_steps, stride, coupled):
    m = a0.shape[0]
    n = m - 1
    n_rec = n_steps // stride + 1
    if n_steps % stride != 0:
        n_rec += 1
    rec_k = np.empty(n_rec, dtype=np.int64)
    rec_p = np.empty((n_rec, m))
    a = a0.copy()
    v = v0.copy()
    ka1 = np.empty(m, np.complex128)
    kv1 = np.empty(m, np.complex128)
    ka2 = np.empty(m, np.complex128)
    kv2 = np.empty(m, np.complex128)
    ka3 = np.empty(m, np.complex128)
    kv3 = np.empty(m, np.complex128)
    ka4 = np.empty(m, np.complex128)
    kv4 = np.empty(m, np.complex128)
    ta = np.empty(m, np.complex128)
    tv = np.empty(m, np.complex128)
    ph0 = np.empty(n, np.complex128)
    ph1 = np.empty(n, np.complex128)
    ph2 = np.empty(n, np.complex128)
    inc = np.empty(n, np.complex128)
    _exact_phase(det, 1, period, inc)
    gg = g if coupled else 0.0
    half = 0.5 * dt
    sixth = dt / 6.0

    r = 0
    for i in range(m):
        rec_p[0, i] = a[i].real ** 2 + a[i].imag ** 2
    rec_k[0] = 0
    r = 1
    _exact_phase(det, 0, period, ph0)
    bad = -1
    for k in range(n_steps):
        _advance_phase(ph0, inc, det, 2 * k + 1, period, ph1)
        _advance_phase(ph1, inc, det, 2 * k + 2, period, ph2)
        _derivs(a, v, ph0, omega, gg, ka1, kv1)
        for i in range(m):
            ta[i] = a[i] + half * ka1[i]
            tv[i] = v[i] + half * kv1[i]
        _derivs(ta, tv, ph1, omega, gg, ka2, kv2)
        for i in range(m):
            ta[i] = a[i] + half * ka2[i]
            tv[i] = v[i] + half * kv2[i]
        _derivs(ta, tv, ph1, omega, gg, ka3, kv3)
        for i in range(m):
            ta[i] = a[i] + dt * ka3[i]
            tv[i] = v[i] + dt * kv3[i]
        _derivs(ta, tv, ph2, omega, gg, ka4, kv4)
        for i in range(m):
            a[i] += sixth * (ka1[i] + 2.0 * ka2[i] + 2.0 * ka3[i] + ka4[i])
            v[i] += sixth * (kv1[i] + 2.0 * kv2[i] + 2.0 * kv3[i] + kv4[i])
        for i in range(n):
            ph0[i] = ph2[i]
        step = k + 1
        if step % stride == 0 or step == n_steps:
            finite = True
            for i in range(m):
                p = a[i].real ** 2 + a[i].imag ** 2
                if not np.isfinite(p) or not np.isfinite(v[i].real) or not np.isfinite(v[i].imag):
                    finite = False
                rec_p[r, i] = p
            rec_k[r] = step
            r += 1
            if not finite:
                bad = step
                break
    return rec_k[:r], rec_p[:r], a, v, bad


def integrate(
    problem: SearchProblem,
    config: IntegratorConfig,
    initial: AmplitudeState | None = None,
    *,
    coupled: bool = True,
) -> Trajectory:
    """Integrate from ``t = 0`` to at least ``config.t_max`` with classic RK4.

    ``coupled=False`` switches the perturbation off (free modes).
    """
    if initial is None:
        initial = default_initial(problem)
    _check_state(problem, initial)
    if initial.t != 0.0:
        raise ValueError("integration starts at t = 0")
    samples = config.samples_per_fastest_period
    dt = config.step(problem)
    n_steps = config.n_steps(problem)
    if n_steps > config.max_steps:
        raise StepCapExceeded(
            f"t_max={config.t_max} needs {n_steps} steps of dt={dt:.6g}, cap is {config.max_steps}"
        )
    period = 2 * problem.max_index * samples
    det = _detuning_indices(problem)
    rec_k, rec_p, a, v, bad = _rk4_run(
        initial.a.astype(np.complex128),
        initial.v.astype(np.complex128),
        problem.frequencies,
        _coupling(problem),
        det,
        period,
        dt,
        n_steps,
        config.stride(problem),
        coupled,
    )
    if bad >= 0:
        raise NonFiniteError(
            f"non-finite amplitude at step {bad} (t={bad * dt:.6g}, dt={dt:.6g}, N={problem.n})"
        )
    times = rec_k * dt
    return Trajectory(times, rec_p, problem, "full", AmplitudeState(n_steps * dt, a, v))


def norm_deviation(trajectory: Trajectory) -> float:
    """``max_t |sum_n P_n(t) - 1|`` over recorded samples."""
    if trajectory.times.size == 0:
        raise ValueError("empty trajectory")
    return float(np.max(np.abs(trajectory.norm - 1.0)))
