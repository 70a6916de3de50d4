"""Hand-coded right-hand sides and energies for the three systems.

Fast path for integration: circle (free), sphere (free), sphere with the
ring-shaped polar potential.  Every formula here is derivation-corrected and
pinned against :func:`momentflow.algebra.generic_rhs` on random states; the
bracket structure, not any transcribed equation list, is the authority.

Trig subexpressions are computed once per call; these functions sit in the
integrator's hot loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import CIRCLE, SPHERE, MomentState, SystemParams

CIRCLE_FREE = "circle_free"
SPHERE_FREE = "sphere_free"
SPHERE_MAKAROV = "sphere_makarov"

EVOLVE = "evolve"
FROZEN = "frozen"
ZEROED = "zeroed"

#: below this, 1/sin^k terms are treated as singular
SIN_FLOOR = 1e-3


class PoleSingularityError(ValueError):
    """Raised when a formula is evaluated too close to a coordinate pole."""


@dataclass(frozen=True)
class SystemKind:
    """Which system to integrate and what the moments are allowed to do.

    moment_policy "evolve" is the full coupled flow; "frozen" lets the
    classical variables feel constant moments; "zeroed" ignores moments
    entirely (the classical comparison runs).
    """

    tag: str = SPHERE_FREE
    moment_policy: str = EVOLVE

    def __post_init__(self) -> None:
        if self.tag not in (CIRCLE_FREE, SPHERE_FREE, SPHERE_MAKAROV):
            raise ValueError(f"unknown system tag {self.tag!r}")
        if self.moment_policy not in (EVOLVE, FROZEN, ZEROED):
            raise ValueError(f"unknown moment policy {self.moment_policy!r}")

    @property
    def mode(self) -> str:
        return CIRCLE if self.tag == CIRCLE_FREE else SPHERE

    @property
    def has_potential(self) -> bool:
        return self.tag == SPHERE_MAKAROV


@dataclass(frozen=True)
class MakarovPotential:
    """Ring-shaped polar potential with derivatives up to order four.

    V(theta) = -alpha/R + beta/(R^2 sin^2) - gamma cos/(R^2 sin^2).
    The cos term enters with -gamma, so negative gamma lowers the southern
    hemisphere and drives trajectories toward theta > pi/2; beta > |gamma|
    keeps both poles walled off.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    radius: float = 1.0

    @classmethod
    def from_params(cls, params: SystemParams) -> "MakarovPotential":
        return cls(
            alpha=params.alpha, beta=params.beta, gamma=params.gamma, radius=params.radius
        )

    def derivative(self, theta: float, order: int = 0) -> float:
        s = math.sin(theta)
        c = math.cos(theta)
        r2 = self.radius**2
        g = -self.gamma
        b = self.beta
        c2 = c * c
        if order == 0:
            return -self.alpha / self.radius + (b + g * c) / (r2 * s * s)
        if order == 1:
            return -(2.0 * b * c + g * (1.0 + c2)) / (r2 * s**3)
        if order == 2:
            return (2.0 * b * (1.0 + 2.0 * c2) + g * c * (5.0 + c2)) / (r2 * s**4)
        if order == 3:
            return -(8.0 * b * c * (2.0 + c2) + g * (5.0 + 18.0 * c2 + c2 * c2)) / (
                r2 * s**5
            )
        if order == 4:
            s4 = s**4
            s6 = s4 * s * s
            return (
                b * (8.0 * (2.0 + 3.0 * c2) / s4 + 40.0 * c2 * (2.0 + c2) / s6)
                + g * (4.0 * c * (9.0 + c2) / s4 + 5.0 * c * (5.0 + 18.0 * c2 + c2 * c2) / s6)
            ) / r2
        raise ValueError(f"potential derivative order {order!r} not available (0..4)")


def _circle_flow(y: np.ndarray, w: float, policy: str) -> np.ndarray:
    out = np.zeros(5)
    out[0] = y[1] * w
    if policy == EVOLVE:
        out[2] = 2.0 * y[3] * w  # dG20 = 4 G11 / (2 m R^2)
        out[3] = y[4] * w
    return out


def _sphere_flow(
    y: np.ndarray,
    w2: float,
    policy: str,
    potential: MakarovPotential | None,
) -> np.ndarray:
    theta, p_theta, phi, p_phi = y[0], y[1], y[2], y[3]
    s = math.sin(theta)
    c = math.cos(theta)
    s2 = s * s
    inv2 = 1.0 / s2
    inv3 = inv2 / s
    inv4 = inv2 * inv2
    inv5 = inv4 / s
    one2c2 = 1.0 + 2.0 * c * c  # = 2 + cos(2 theta)

    out = np.zeros(14)
    use_moments = policy != ZEROED
    g = y[4:] if use_moments else None

    out[0] = 2.0 * w2 * p_theta
    out[1] = 2.0 * w2 * p_phi * p_phi * c * inv3
    out[2] = 2.0 * w2 * p_phi * inv2
    # p_phi stays exactly 0: phi is cyclic

    vpp = 0.0
    if potential is not None:
        out[1] -= potential.derivative(theta, 1)
        vpp = potential.derivative(theta, 2)

    if use_moments:
        g2000, g1100, g1010, g1001, g0200 = g[0], g[1], g[2], g[3], g[4]
        g0110, g0101, g0020, g0011, g0002 = g[5], g[6], g[7], g[8], g[9]
        out[1] += w2 * (
            2.0 * c * inv3 * g0002
            + 4.0 * p_phi * p_phi * c * (2.0 + c * c) * inv5 * g2000
            - 4.0 * p_phi * one2c2 * inv4 * g1001
        )
        if potential is not None:
            out[1] -= 0.5 * potential.derivative(theta, 3) * g2000
        out[2] += w2 * (2.0 * p_phi * one2c2 * inv4 * g2000 - 4.0 * c * inv3 * g1001)

        if policy == EVOLVE:
            kq = 2.0 * p_phi * p_phi * one2c2 * inv4  # polar curvature of H_Q kinetic part
            kx = 4.0 * p_phi * c * inv3  # mixed theta-p_phi coefficient
            out[4] = 4.0 * w2 * g1100
            out[5] = w2 * (2.0 * g0200 - kq * g2000 + kx * g1001) - vpp * g2000
            out[6] = w2 * (2.0 * g0110 + 2.0 * inv2 * g1001 - kx * g2000)
            out[7] = 2.0 * w2 * g0101
            out[8] = w2 * (-2.0 * kq * g1100 + 2.0 * kx * g0101) - 2.0 * vpp * g1100
            out[9] = w2 * (
                2.0 * inv2 * g0101 - kq * g1010 - kx * (g1100 - g0011)
            ) - vpp * g1010
            out[10] = w2 * (-kq * g1001 + kx * g0002) - vpp * g1001
            out[11] = w2 * (4.0 * inv2 * g0011 - 2.0 * kx * g1010)
            out[12] = w2 * (2.0 * inv2 * g0002 - kx * g1001)
            # dG0002 = 0: azimuthal momentum variance is conserved
    return out


def flow(kind: SystemKind, params: SystemParams):
    """Vector field f(t, y) over raw state vectors, for the integrator."""
    potential = MakarovPotential.from_params(params) if kind.has_potential else None
    if kind.mode == CIRCLE:
        w = 1.0 / (params.mass * params.radius**2)

        def f(t: float, y: np.ndarray) -> np.ndarray:
            return _circle_flow(y, w, kind.moment_policy)

    else:
        w2 = 0.5 / (params.mass * params.radius**2)

        def f(t: float, y: np.ndarray) -> np.ndarray:
            return _sphere_flow(y, w2, kind.moment_policy, potential)

    return f


def rhs(
    kind: SystemKind,
    state: MomentState,
    params: SystemParams,
    sin_floor: float = SIN_FLOOR,
) -> np.ndarray:
    """State derivative at one point; raises near the poles on the sphere."""
    if kind.mode != state.mode:
        raise ValueError(f"system mode {kind.mode!r} vs state mode {state.mode!r}")
    if kind.mode == SPHERE and abs(math.sin(state.theta)) < sin_floor:
        raise PoleSingularityError(
            f"sin(theta) = {math.sin(state.theta)!r} below floor {sin_floor!r}"
        )
    return flow(kind, params)(0.0, np.asarray(state.as_vector()))


def energy(
    kind: SystemKind,
    state: MomentState,
    params: SystemParams,
    sin_floor: float = SIN_FLOOR,
) -> float:
    """Conserved energy of the flow the policy actually generates.

    evolve/frozen include the moment contributions (that is the invariant of
    those flows); zeroed is the purely classical energy.
    """
    if kind.mode != state.mode:
        raise ValueError(f"system mode {kind.mode!r} vs state mode {state.mode!r}")
    w2 = 0.5 / (params.mass * params.radius**2)
    use_moments = kind.moment_policy != ZEROED
    if kind.mode == CIRCLE:
        total = w2 * state.p_theta**2
        if use_moments:
            total += w2 * state.moments[2]
        return total
    s = math.sin(state.theta)
    if abs(s) < sin_floor:
        raise PoleSingularityError(
            f"sin(theta) = {s!r} below floor {sin_floor!r}"
        )
    c = math.cos(state.theta)
    inv2 = 1.0 / (s * s)
    total = w2 * (state.p_theta**2 + state.p_phi**2 * inv2)
    if kind.has_potential:
        pot = MakarovPotential.from_params(params)
        total += pot.derivative(state.theta, 0)
        if use_moments:
            total += 0.5 * pot.derivative(state.theta, 2) * state.moments[0]
    if use_moments:
        g = state.moments
        inv3 = inv2 / s
        inv4 = inv2 * inv2
        total += w2 * (
            g[4]
            + inv2 * g[9]
            + state.p_phi**2 * (1.0 + 2.0 * c * c) * inv4 * g[0]
            - 4.0 * state.p_phi * c * inv3 * g[3]
        )
    return total


def effective_potential(theta: float, g2000: float, params: SystemParams) -> float:
    """Moment-corrected polar potential seen by the semiclassical particle.

    The correction is the closed trigonometric form; tests pin it against
    the G2000-weighted half of the second potential derivative.
    """
    s = math.sin(theta)
    if abs(s) < SIN_FLOOR:
        raise PoleSingularityError(f"sin(theta) = {s!r} below floor {SIN_FLOOR!r}")
    pot = MakarovPotential.from_params(params)
    correction = (
        g2000
        / (8.0 * params.radius**2 * s**4)
        * (
            -params.gamma * (23.0 * math.cos(theta) + math.cos(3.0 * theta))
            + 8.0 * params.beta * (2.0 + math.cos(2.0 * theta))
        )
    )
    return pot.derivative(theta, 0) + correction
