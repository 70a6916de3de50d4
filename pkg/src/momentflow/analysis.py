"""Diagnostics extracted from integrated trajectories.

Everything here is pure post-processing: uncertainty products recomputed
from the moment columns, phase shifts between matched runs, the analytic
phase-shift estimate, ensemble statistics, hemisphere counts, and
time-to-threshold measurements.  Nothing in this module advances a state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .integrate import Trajectory
from .states import SPHERE, SystemParams, moment_slot

__all__ = [
    "LAST_VALID_STATE",
    "EXCLUDE_TERMINATED",
    "UncertaintyRecord",
    "PhaseShift",
    "MetricSummary",
    "EnsembleStats",
    "EnsembleRun",
    "EnsembleResult",
    "HemisphereCount",
    "uncertainty_products",
    "phase_shift",
    "predicted_phase_shift",
    "phase_shift_scale",
    "ensemble_stats",
    "hemisphere_ratio",
    "mean_final_theta",
    "time_to_theta",
    "counting_tolerance",
]

#: a trajectory that terminated before t_eval contributes its final sample
LAST_VALID_STATE = "last_valid_state"
#: a trajectory that terminated before t_eval is dropped from the counts
EXCLUDE_TERMINATED = "exclude_terminated"

_POLICIES = (LAST_VALID_STATE, EXCLUDE_TERMINATED)


@dataclass(frozen=True)
class UncertaintyRecord:
    """Uncertainty products of both canonical pairs along a trajectory."""

    times: np.ndarray
    dg_theta: np.ndarray
    dg_phi: np.ndarray
    floor: float

    @property
    def min_dg_theta(self) -> float:
        return float(np.min(self.dg_theta))

    @property
    def min_dg_phi(self) -> float:
        return float(np.min(self.dg_phi))

    def floor_satisfied(self, margin: float = 1e-9) -> bool:
        """True when neither product ever dips more than margin below floor."""
        bound = self.floor - margin
        return self.min_dg_theta >= bound and self.min_dg_phi >= bound


def uncertainty_products(traj: Trajectory, params: SystemParams | None = None) -> UncertaintyRecord:
    """Recompute both uncertainty products from the stored moment columns.

    The products use only second moments: the polar pair is
    g2000*g0200 - g1100^2, the azimuthal pair g0020*g0002 - g0011^2.  A
    record whose products sit at zero (all-zero moments, the classical
    comparison runs) simply reports floor_satisfied() False rather than
    raising: such states are valid inputs, just not physical packets.
    """
    if traj.mode != SPHERE:
        raise ValueError("uncertainty_products expects a sphere-mode trajectory")
    params = params if params is not None else traj.params
    m = traj.states[:, 4:]
    s = lambda e: m[:, moment_slot(e, traj.mode)]
    dg_theta = s((2, 0, 0, 0)) * s((0, 2, 0, 0)) - s((1, 1, 0, 0)) ** 2
    dg_phi = s((0, 0, 2, 0)) * s((0, 0, 0, 2)) - s((0, 0, 1, 1)) ** 2
    return UncertaintyRecord(
        times=traj.times.copy(),
        dg_theta=dg_theta,
        dg_phi=dg_phi,
        floor=0.25 * params.hbar**2,
    )


@dataclass(frozen=True)
class PhaseShift:
    """Signed semiclassical-minus-classical angle differences on one grid."""

    times: np.ndarray
    dphi: np.ndarray
    dtheta: np.ndarray

    @property
    def dphi_end(self) -> float:
        return float(self.dphi[-1])

    @property
    def dtheta_end(self) -> float:
        return float(self.dtheta[-1])


def phase_shift(traj_semiclassical: Trajectory, traj_classical: Trajectory) -> PhaseShift:
    """Difference series between a matched pair of runs.

    Both trajectories must cover a common time range; when the stored
    sample grids differ, the classical run is resampled onto the
    semiclassical grid through its dense interpolant.  Unwrapped phi is
    compared directly, so the shift is accumulated, not aliased mod 2*pi.
    """
    if traj_semiclassical.mode != traj_classical.mode:
        raise ValueError("cannot align trajectories of different modes")
    ts, tc = traj_semiclassical.times, traj_classical.times
    if len(ts) == len(tc) and np.array_equal(ts, tc):
        grid = ts
        a = traj_semiclassical.states
        b = traj_classical.states
    else:
        t_max = min(traj_semiclassical.end_time, traj_classical.end_time)
        if traj_semiclassical.dense is None or traj_classical.dense is None:
            raise ValueError("grids not alignable: differing grids and no dense output")
        grid = ts[ts <= t_max + 1e-12]
        if len(grid) < 2:
            raise ValueError("grids not alignable: no common time range")
        a = np.stack([traj_semiclassical.sample(t) for t in grid])
        b = np.stack([traj_classical.sample(t) for t in grid])
    if traj_semiclassical.mode == SPHERE:
        dphi = a[:, 2] - b[:, 2]
    else:
        dphi = np.zeros(len(grid))
    return PhaseShift(times=np.asarray(grid, dtype=float), dphi=dphi, dtheta=a[:, 0] - b[:, 0])


def predicted_phase_shift(
    params: SystemParams,
    p_phi: float,
    g2000_0: float,
    g1100_0: float,
    t: float,
) -> float:
    """Closed-form near-equator estimate of the accumulated azimuthal shift.

    Valid for motion staying close to theta = pi/2; there the moment
    correction to the azimuthal rate is linear in the polar variance, whose
    free growth is itself polynomial in t, giving

        2*P_phi/(m*R^2) * (G2000_0 * t + 2*G1100_0/(m*R^2) * t^2).
    """
    w = 1.0 / (params.mass * params.radius**2)
    return 2.0 * p_phi * w * (g2000_0 * t + 2.0 * g1100_0 * w * t * t)


def phase_shift_scale(params: SystemParams, p_phi: float, g2000_0: float, t: float) -> float:
    """Dimensionless combination L * dx0^2 * t / (hbar * R^2) the shift scales with."""
    return p_phi * g2000_0 * t / (params.hbar * params.radius**2)


@dataclass(frozen=True)
class MetricSummary:
    """Population mean/stddev/range of one ensemble metric."""

    name: str
    mean: float
    stddev: float
    minimum: float
    maximum: float


@dataclass(frozen=True)
class EnsembleStats:
    """Table-style summary over matched pairs at a single evaluation time."""

    t_eval: float
    n: int
    metrics: dict[str, MetricSummary]

    def __getitem__(self, name: str) -> MetricSummary:
        return self.metrics[name]


@dataclass(frozen=True)
class EnsembleRun:
    """One grid point of a sweep: the run, its optional classical twin."""

    value: float
    trajectory: Trajectory | None
    classical: Trajectory | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.trajectory is None


@dataclass(frozen=True)
class EnsembleResult:
    """Ordered sweep output; summaries are always recomputable from runs."""

    parameter: str
    values: tuple[float, ...]
    runs: tuple[EnsembleRun, ...] = field(repr=False)
    paired: bool = True

    def __post_init__(self) -> None:
        if len(self.values) != len(self.runs):
            raise ValueError("one run record per grid value required")

    @property
    def trajectories(self) -> list[Trajectory]:
        return [r.trajectory for r in self.runs if r.trajectory is not None]

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.runs if r.failed)


def _state_at(traj: Trajectory, t_eval: float) -> np.ndarray:
    """Sample at t_eval, or the final sample when the run ended earlier."""
    if t_eval >= traj.end_time or traj.dense is None:
        return traj.states[-1]
    return traj.sample(t_eval)


def ensemble_stats(result: EnsembleResult, t_eval: float) -> EnsembleStats:
    """The four deviation metrics over matched pairs, population statistics.

    Every grid point must carry both runs of the pair; a sweep executed
    with paired_classical=False (or with failed points) is rejected, since
    deviations against a missing twin are undefined.
    """
    pairs = []
    for run in result.runs:
        if run.trajectory is None or run.classical is None:
            raise ValueError(
                f"ensemble_stats needs matched pairs; point {run.value!r} "
                f"{'failed: ' + run.error if run.error else 'has no classical twin'}"
            )
        pairs.append(run)
    if not pairs:
        raise ValueError("ensemble_stats needs at least one pair")
    cols = {"abs_dtheta": [], "abs_dphi": [], "rel_dphi": [], "g2000_growth": []}
    for run in pairs:
        sc = _state_at(run.trajectory, t_eval)
        cl = _state_at(run.classical, t_eval)
        cols["abs_dtheta"].append(abs(sc[0] - cl[0]))
        cols["abs_dphi"].append(abs(sc[2] - cl[2]))
        cols["rel_dphi"].append(abs(sc[2] - cl[2]) / abs(cl[2]))
        g0 = run.trajectory.states[0, 4]
        cols["g2000_growth"].append((sc[4] - g0) / g0)
    metrics = {}
    for name, vals in cols.items():
        arr = np.asarray(vals, dtype=float)
        metrics[name] = MetricSummary(
            name=name,
            mean=float(arr.mean()),
            stddev=float(arr.std()),
            minimum=float(arr.min()),
            maximum=float(arr.max()),
        )
    return EnsembleStats(t_eval=t_eval, n=len(pairs), metrics=metrics)


@dataclass(frozen=True)
class HemisphereCount:
    """South/north counts of an ensemble snapshot and their ratio."""

    south: int
    north: int
    excluded: int
    t_eval: float
    policy: str

    @property
    def ratio(self) -> float:
        if self.north == 0:
            return math.inf
        return self.south / self.north


def counting_tolerance(n_counted: int) -> float:
    """Resolution of a count-based ratio: one miscount out of n."""
    if n_counted <= 0:
        raise ValueError("counting tolerance needs a positive count")
    return 1.0 / n_counted


def _ensemble_trajectories(ensemble) -> list[Trajectory]:
    if isinstance(ensemble, EnsembleResult):
        return ensemble.trajectories
    return list(ensemble)


def hemisphere_ratio(ensemble, t_eval: float, policy: str = LAST_VALID_STATE) -> HemisphereCount:
    """Count final-position hemispheres at a fixed time.

    A trajectory that terminated before t_eval contributes its last valid
    sample (default) or is excluded, per policy.  A sample exactly on the
    equator counts toward neither hemisphere.  An empty northern count is
    reported as an infinite ratio rather than an error: the counts stay
    available on the returned record.
    """
    if policy not in _POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {_POLICIES}")
    south = north = excluded = 0
    for traj in _ensemble_trajectories(ensemble):
        if traj.end_time < t_eval and not traj.status.completed:
            if policy == EXCLUDE_TERMINATED:
                excluded += 1
                continue
        theta = float(_state_at(traj, t_eval)[0])
        if theta > math.pi / 2:
            south += 1
        elif theta < math.pi / 2:
            north += 1
        else:
            excluded += 1
    return HemisphereCount(south=south, north=north, excluded=excluded,
                           t_eval=t_eval, policy=policy)


def mean_final_theta(ensemble, t_eval: float, policy: str = LAST_VALID_STATE) -> float:
    """Ensemble mean of the polar angle at t_eval under the same policy."""
    if policy not in _POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {_POLICIES}")
    thetas = []
    for traj in _ensemble_trajectories(ensemble):
        if traj.end_time < t_eval and not traj.status.completed:
            if policy == EXCLUDE_TERMINATED:
                continue
        thetas.append(float(_state_at(traj, t_eval)[0]))
    if not thetas:
        raise ValueError("no trajectories left to average after applying the policy")
    return float(np.mean(thetas))


def time_to_theta(traj: Trajectory, theta_star: float) -> float | None:
    """First time the polar angle crosses theta_star, or None if it never does.

    The crossing is bracketed on the stored sample grid and localized on
    the dense interpolant; a trajectory that starts exactly on theta_star
    reports 0.
    """
    if not 0.0 < theta_star < math.pi:
        raise ValueError(f"theta_star must lie in (0, pi), got {theta_star!r}")
    th = traj.states[:, 0]
    t = traj.times
    if th[0] == theta_star:
        return 0.0
    for k in range(1, len(t)):
        if (th[k - 1] - theta_star) * (th[k] - theta_star) <= 0.0:
            if th[k] == theta_star:
                return float(t[k])
            if traj.dense is None:
                # no interpolant (degenerate single-window fallback): secant on samples
                f0, f1 = th[k - 1] - theta_star, th[k] - theta_star
                return float(t[k - 1] - f0 * (t[k] - t[k - 1]) / (f1 - f0))
            return float(brentq(lambda s: traj.sample(s)[0] - theta_star,
                                t[k - 1], t[k], xtol=1e-12))
    return None
