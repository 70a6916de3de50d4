"""Adaptive Runge-Kutta integration of the moment flow with event watching.

Dormand-Prince 5(4) embedded-pair stepping with PI control (scipy's RK45)
and dense output; termination events (uncertainty floor crossing, pole
approach) are root-localized on the dense interpolant.  A Trajectory holds
uniformly sampled states plus diagnostics.  phi is never wrapped: the
accumulated azimuthal phase is an observable.

Mid-flight trouble never raises; it becomes a TerminationStatus.  Only
precondition failures (bad config, invalid initial state) are exceptions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import OdeSolution, solve_ivp

from . import dynamics
from .dynamics import EVOLVE, SIN_FLOOR, ZEROED, SystemKind
from .states import (
    CIRCLE,
    COMPLETED,
    N_CLASSICAL,
    POLE_SINGULARITY,
    SPHERE,
    STEP_FAILURE,
    UNCERTAINTY_VIOLATION,
    MomentState,
    SystemParams,
    TerminationStatus,
    validate_state,
)

#: integration restarts at these time intervals; a wall-clock budget is only
#: checked at window boundaries, so completed runs are budget-independent
_WINDOW = 1.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control, sampling grid, and event tolerances."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = 0.05
    t_end: float = 10.0
    sample_dt: float = 0.01
    uncertainty_margin: float = 1e-10
    sin_floor: float = SIN_FLOOR

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "max_step", "t_end", "sample_dt", "sin_floor"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if not math.isfinite(self.uncertainty_margin) or self.uncertainty_margin < 0:
            raise ValueError(
                f"uncertainty_margin must be a non-negative finite number, "
                f"got {self.uncertainty_margin!r}"
            )


@dataclass(eq=False)
class Trajectory:
    """Sampled solution of one integration, with per-sample diagnostics.

    ``states`` rows use the flat MomentState vector layout.  ``dense`` is the
    piecewise interpolant over the full integrated range; it is what event
    times, threshold crossings, and resampling should be computed from.
    """

    kind: SystemKind
    params: SystemParams
    config: IntegratorConfig
    times: np.ndarray
    states: np.ndarray
    dg_theta: np.ndarray
    dg_phi: np.ndarray | None
    energies: np.ndarray
    status: TerminationStatus
    dense: OdeSolution | None = None

    @property
    def mode(self) -> str:
        return self.kind.mode

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    def state_at(self, k: int) -> MomentState:
        return MomentState.from_vector(self.states[k], self.mode)

    @property
    def initial_state(self) -> MomentState:
        return self.state_at(0)

    @property
    def final_state(self) -> MomentState:
        return self.state_at(-1)

    def sample(self, t: float) -> np.ndarray:
        """State vector at an arbitrary time inside the integrated range."""
        if self.dense is None:
            raise ValueError("trajectory carries no dense output")
        if not 0.0 <= t <= self.end_time:
            raise ValueError(f"t = {t!r} outside the integrated range [0, {self.end_time!r}]")
        return np.asarray(self.dense(t), dtype=float)

    @property
    def min_dg_theta(self) -> float:
        return float(np.min(self.dg_theta))

    @property
    def min_dg_phi(self) -> float | None:
        return None if self.dg_phi is None else float(np.min(self.dg_phi))

    @property
    def energy_drift(self) -> float:
        """Largest |E(t) - E(0)| / max(|E(0)|, 1) over the samples."""
        e0 = float(self.energies[0])
        return float(np.max(np.abs(self.energies - e0)) / max(abs(e0), 1.0))


def _uncertainty_events(kind: SystemKind, params: SystemParams, config: IntegratorConfig):
    """Terminal events for the floor watch; active only while moments evolve."""
    threshold = 0.25 * params.hbar**2 - config.uncertainty_margin
    events, labels = [], []

    if kind.mode == CIRCLE:

        def ev_theta(t, y):
            return y[2] * y[4] - y[3] * y[3] - threshold

        events.append(ev_theta)
        labels.append((UNCERTAINTY_VIOLATION, "theta-pair uncertainty product crossed the floor"))
    else:

        def ev_theta(t, y):
            return y[4] * y[8] - y[5] * y[5] - threshold

        def ev_phi(t, y):
            return y[11] * y[13] - y[12] * y[12] - threshold

        events.extend([ev_theta, ev_phi])
        labels.append((UNCERTAINTY_VIOLATION, "theta-pair uncertainty product crossed the floor"))
        labels.append((UNCERTAINTY_VIOLATION, "phi-pair uncertainty product crossed the floor"))

    for ev in events:
        ev.terminal = True
        ev.direction = -1.0
    return events, labels


def _build_events(kind: SystemKind, params: SystemParams, config: IntegratorConfig):
    events, labels = [], []
    if kind.moment_policy == EVOLVE:
        events, labels = _uncertainty_events(kind, params, config)
    if kind.mode == SPHERE:

        def ev_pole(t, y):
            return math.sin(y[0]) - config.sin_floor

        ev_pole.terminal = True
        ev_pole.direction = -1.0
        events.append(ev_pole)
        labels.append((POLE_SINGULARITY, "sin(theta) reached the pole floor"))
    return events, labels


def _sample_grid(t_stop: float, dt: float) -> np.ndarray:
    n = int(math.floor(t_stop / dt + 1e-9))
    ts = np.arange(n + 1, dtype=float) * dt
    if ts[-1] > t_stop:  # k*dt rounded just past the stop time
        ts[-1] = t_stop
    elif t_stop - ts[-1] > 1e-9 * dt:
        ts = np.append(ts, t_stop)
    return ts


def _window_bounds(t_end: float) -> list[float]:
    bounds = [k * _WINDOW for k in range(1, int(math.floor(t_end / _WINDOW + 1e-12)) + 1)]
    if not bounds or t_end - bounds[-1] > 1e-12 * max(1.0, t_end):
        bounds.append(t_end)
    else:
        bounds[-1] = t_end
    return bounds


def integrate_flow(
    fun,
    kind: SystemKind,
    state0: MomentState,
    params: SystemParams,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    energy_fn=None,
    wall_clock_budget: float | None = None,
) -> Trajectory:
    """Integrate an arbitrary vector field over the flat state layout.

    This is the extension point for externally supplied Hamiltonians (e.g.
    a test model routed through the generic bracket expansion); `integrate`
    wires in the built-in fast flows.  ``energy_fn(state) -> float`` replaces
    the built-in energy diagnostic when given.
    """
    if kind.mode != state0.mode:
        raise ValueError(f"system mode {kind.mode!r} vs state mode {state0.mode!r}")
    y0 = state0.as_vector()
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state has non-finite entries")
    if kind.mode == SPHERE and abs(math.sin(state0.theta)) < config.sin_floor:
        raise ValueError(
            f"initial sin(theta) = {math.sin(state0.theta)!r} is already "
            f"below the pole floor {config.sin_floor!r}"
        )
    if kind.moment_policy == EVOLVE:
        report = validate_state(state0, params)
        if not report.ok:
            raise ValueError("invalid initial state: " + "; ".join(report.issues))
    if kind.moment_policy == ZEROED:
        y0[N_CLASSICAL[kind.mode]:] = 0.0  # moments play no role; record them as absent

    events, labels = _build_events(kind, params, config)
    started = time.monotonic()

    ts_all: list[float] = [0.0]
    interpolants: list = []
    status: TerminationStatus | None = None
    t_stop = config.t_end
    y_stop: np.ndarray | None = None
    t_cursor, y_cursor = 0.0, y0

    for t_next in _window_bounds(config.t_end):
        sol = solve_ivp(
            fun,
            (t_cursor, t_next),
            y_cursor,
            method="RK45",
            rtol=config.rel_tol,
            atol=config.abs_tol,
            max_step=config.max_step,
            dense_output=True,
            events=events,
        )
        if sol.sol is not None:
            ts_all.extend(sol.sol.ts[1:])
            interpolants.extend(sol.sol.interpolants)
        if sol.status == 1:
            hit = min(
                (i for i in range(len(events)) if len(sol.t_events[i])),
                key=lambda i: sol.t_events[i][0],
            )
            t_stop = float(sol.t_events[hit][0])
            y_stop = np.asarray(sol.y_events[hit][0], dtype=float)
            tag, detail = labels[hit]
            status = TerminationStatus(tag, t_stop, detail)
            break
        if sol.status != 0:
            t_stop = float(sol.t[-1])
            status = TerminationStatus(STEP_FAILURE, t_stop, sol.message)
            break
        t_cursor, y_cursor = t_next, sol.y[:, -1]
        if wall_clock_budget is not None and time.monotonic() - started > wall_clock_budget:
            t_stop = t_cursor
            status = TerminationStatus(
                STEP_FAILURE, t_stop, f"wall-clock budget {wall_clock_budget!r} s exhausted"
            )
            break

    if status is None:
        status = TerminationStatus(COMPLETED, config.t_end)

    dense = OdeSolution(np.asarray(ts_all), interpolants) if interpolants else None
    if dense is None or t_stop <= 0.0:
        times = np.array([0.0])
        samples = y0[np.newaxis, :].copy()
    else:
        times = _sample_grid(t_stop, config.sample_dt)
        samples = np.ascontiguousarray(dense(times).T)
        samples[0] = y0
        if y_stop is not None:
            samples[-1] = y_stop

    return Trajectory(
        kind=kind,
        params=params,
        config=config,
        times=times,
        states=samples,
        dg_theta=_pair_product(samples, kind.mode, "theta"),
        dg_phi=_pair_product(samples, kind.mode, "phi"),
        energies=_energies(samples, kind, params, energy_fn),
        status=status,
        dense=dense,
    )


def _pair_product(samples: np.ndarray, mode: str, which: str) -> np.ndarray | None:
    if mode == CIRCLE:
        if which == "phi":
            return None
        return samples[:, 2] * samples[:, 4] - samples[:, 3] ** 2
    if which == "theta":
        return samples[:, 4] * samples[:, 8] - samples[:, 5] ** 2
    return samples[:, 11] * samples[:, 13] - samples[:, 12] ** 2


def _energies(samples: np.ndarray, kind: SystemKind, params: SystemParams, energy_fn):
    # sin_floor=0 here: the pole event already bounded the samples, and the
    # root-localized terminal sample may sit a hair under the flow's floor
    if energy_fn is None:
        energy_fn = lambda s: dynamics.energy(kind, s, params, sin_floor=0.0)
    return np.array(
        [energy_fn(MomentState.from_vector(row, kind.mode)) for row in samples]
    )


def integrate(
    kind: SystemKind,
    state0: MomentState,
    params: SystemParams,
    config: IntegratorConfig = IntegratorConfig(),
    *,
    wall_clock_budget: float | None = None,
) -> Trajectory:
    """Integrate one of the built-in systems from a valid initial state."""
    fun = dynamics.flow(kind, params)
    return integrate_flow(
        fun, kind, state0, params, config, wall_clock_budget=wall_clock_budget
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Self-convergence ladder: final-state deltas between tolerance levels."""

    tolerances: tuple[float, ...]
    deltas: tuple[float, ...]
    monotone: bool
    statuses: tuple[str, ...]

    @property
    def certified(self) -> bool:
        return self.monotone and all(s == COMPLETED for s in self.statuses)


def convergence_check(
    kind: SystemKind,
    state0: MomentState,
    params: SystemParams,
    tol_sequence,
    t_end: float = 10.0,
    sample_dt: float = 0.01,
) -> ConvergenceReport:
    """Integrate at each tolerance and compare successive final states.

    A non-convergent ladder is reported, not raised; only a malformed
    tolerance sequence is an error.
    """
    tols = tuple(float(t) for t in tol_sequence)
    if len(tols) < 3:
        raise ValueError(f"need at least 3 tolerances, got {len(tols)}")
    if any(t <= 0 for t in tols) or any(b >= a for a, b in zip(tols, tols[1:])):
        raise ValueError(f"tolerances must be positive and strictly decreasing: {tols!r}")

    finals, statuses = [], []
    for tol in tols:
        config = IntegratorConfig(
            rel_tol=tol, abs_tol=tol * 1e-3, t_end=t_end, sample_dt=sample_dt
        )
        traj = integrate(kind, state0, params, config)
        finals.append(traj.states[-1])
        statuses.append(traj.status.tag)

    deltas = tuple(
        float(np.max(np.abs(a - b))) for a, b in zip(finals, finals[1:])
    )
    monotone = all(b <= a for a, b in zip(deltas, deltas[1:]))
    return ConvergenceReport(tols, deltas, monotone, tuple(statuses))
