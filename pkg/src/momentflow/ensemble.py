"""Parameter sweeps producing ordered ensembles of matched run pairs.

A sweep varies exactly one knob (initial polar momentum, a potential
coefficient, or a packet-width parameter) over an explicit list or a
(start, stop, step) range, integrating the full system and, by default, a
classical twin with the same starting point at every grid value.  Points
run independently: a failure at one value is recorded on that point and
never aborts the rest.  Serial and process-pool execution produce
bit-identical results, so worker count is purely a speed choice.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

from .analysis import EnsembleResult, EnsembleRun
from .dynamics import SPHERE_MAKAROV, ZEROED, SystemKind
from .initial import GaussianSpec, sphere_initial_moments
from .integrate import IntegratorConfig, Trajectory, integrate
from .states import SPHERE, MomentState, SystemParams

__all__ = ["SWEEPABLE", "SweepSpec", "run_sweep"]

#: knobs a sweep may vary; "a" is the initial polar momentum override
SWEEPABLE = ("a", "gamma", "beta", "lambda", "kappa")

#: default per-point wall-clock allowance, seconds
DEFAULT_BUDGET = 60.0


@dataclass(frozen=True)
class SweepSpec:
    """Complete, picklable description of one sweep."""

    parameter: str
    kind: SystemKind
    params: SystemParams
    gaussian: GaussianSpec
    config: IntegratorConfig = IntegratorConfig()
    values: tuple[float, ...] | None = None
    value_range: tuple[float, float, float] | None = None
    paired_classical: bool = True
    classical_policy: str = ZEROED
    wall_clock_budget: float | None = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.parameter not in SWEEPABLE:
            raise ValueError(
                f"unknown sweep parameter {self.parameter!r}; expected one of {SWEEPABLE}"
            )
        if (self.values is None) == (self.value_range is None):
            raise ValueError("exactly one of values/value_range must be given")
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
            if not self.values:
                raise ValueError("values must be non-empty")
            if not all(math.isfinite(v) for v in self.values):
                raise ValueError("values must all be finite")
        else:
            lo, hi, step = self.value_range
            if not all(math.isfinite(v) for v in (lo, hi, step)):
                raise ValueError("value_range entries must be finite")
            if step <= 0:
                raise ValueError(f"value_range step must be positive, got {step!r}")
            if hi < lo:
                raise ValueError(f"value_range is empty: {hi!r} < {lo!r}")
        if self.parameter in ("gamma", "beta") and self.kind.tag != SPHERE_MAKAROV:
            raise ValueError(f"sweeping {self.parameter!r} requires the potential system")
        if self.kind.mode != SPHERE:
            raise ValueError("sweep points are sphere packets; circle systems cannot be swept")

    def grid(self) -> tuple[float, ...]:
        """Grid values in sweep order (ranges expand in ascending order)."""
        if self.values is not None:
            return self.values
        lo, hi, step = self.value_range
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + k * step for k in range(count))

    def point(self, value: float) -> tuple[SystemParams, MomentState, float | None]:
        """Resolved (params, initial state, momentum override) at one value."""
        params, gaussian, p_theta = self.params, self.gaussian, None
        if self.parameter == "a":
            p_theta = value
        elif self.parameter == "gamma":
            params = replace(params, gamma=value)
        elif self.parameter == "beta":
            params = replace(params, beta=value)
        elif self.parameter == "lambda":
            gaussian = replace(gaussian, lam=value)
        else:
            gaussian = replace(gaussian, kappa=value)
        state = sphere_initial_moments(gaussian, params, p_theta=p_theta)
        return params, state, p_theta


def _run_point(spec: SweepSpec, value: float) -> EnsembleRun:
    """Integrate one grid point; exceptions become a failure record."""
    try:
        params, state, _ = spec.point(value)
        traj = integrate(
            spec.kind, state, params, spec.config,
            wall_clock_budget=spec.wall_clock_budget,
        )
        classical: Trajectory | None = None
        if spec.paired_classical:
            twin = SystemKind(spec.kind.tag, spec.classical_policy)
            classical = integrate(
                twin, state, params, spec.config,
                wall_clock_budget=spec.wall_clock_budget,
            )
        return EnsembleRun(value=value, trajectory=traj, classical=classical)
    except Exception as exc:  # per-point isolation: record, never propagate
        return EnsembleRun(value=value, trajectory=None, classical=None,
                           error=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, max_workers: int | None = None) -> EnsembleResult:
    """Run every grid point, in order, optionally across worker processes.

    All configuration errors (bad grid, invalid packet parameters, modes
    that cannot host the swept knob) surface here before any integration
    starts; after launch, per-point problems are recorded on their
    EnsembleRun and the sweep always returns a full-length result.
    """
    grid = spec.grid()
    for value in grid:
        spec.point(value)  # validate every point up front
    if max_workers is None:
        max_workers = os.cpu_count() or 1
    if max_workers < 1:
        raise ValueError(f"max_workers must be at least 1, got {max_workers!r}")
    work = partial(_run_point, spec)
    if max_workers == 1 or len(grid) == 1:
        runs = tuple(work(v) for v in grid)
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            runs = tuple(pool.map(work, grid))
    return EnsembleResult(
        parameter=spec.parameter,
        values=grid,
        runs=runs,
        paired=spec.paired_classical,
    )
