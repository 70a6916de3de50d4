"""Phase-space data model for semiclassical moment dynamics.

A state is a set of classical expectation values plus the full vector of
second-order Weyl-symmetrized central moments: three moments for one angular
degree of freedom (circle), ten for two (sphere).  All types are immutable
value objects and safe to ship between worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CIRCLE = "circle"
SPHERE = "sphere"

# Canonical moment ordering: lexicographic, descending, on the exponent
# tuples (a, b) over (theta, p_theta) resp. (a, b, c, d) over
# (theta, p_theta, phi, p_phi).  This ordering is part of the output format.
CIRCLE_INDICES: tuple[tuple[int, int], ...] = (
    (2, 0),
    (1, 1),
    (0, 2),
)
SPHERE_INDICES: tuple[tuple[int, int, int, int], ...] = (
    (2, 0, 0, 0),
    (1, 1, 0, 0),
    (1, 0, 1, 0),
    (1, 0, 0, 1),
    (0, 2, 0, 0),
    (0, 1, 1, 0),
    (0, 1, 0, 1),
    (0, 0, 2, 0),
    (0, 0, 1, 1),
    (0, 0, 0, 2),
)

_SLOTS = {
    CIRCLE: {ix: k for k, ix in enumerate(CIRCLE_INDICES)},
    SPHERE: {ix: k for k, ix in enumerate(SPHERE_INDICES)},
}

#: number of classical phase-space variables per mode
N_CLASSICAL = {CIRCLE: 2, SPHERE: 4}
#: number of second-order moments per mode
N_MOMENTS = {CIRCLE: 3, SPHERE: 10}


def indices(mode: str) -> tuple[tuple[int, ...], ...]:
    """All valid second-order moment indices for a mode, in slot order."""
    if mode == CIRCLE:
        return CIRCLE_INDICES
    if mode == SPHERE:
        return SPHERE_INDICES
    raise ValueError(f"unknown mode {mode!r}")


def moment_slot(index: tuple[int, ...], mode: str) -> int:
    """Slot of a moment index in the canonical ordering.

    The map is a fixed bijection onto 0..2 (circle) or 0..9 (sphere);
    anything that is not a valid second-order exponent tuple is rejected.
    """
    try:
        return _SLOTS[mode][tuple(index)]
    except KeyError:
        pass
    if mode not in _SLOTS:
        raise ValueError(f"unknown mode {mode!r}")
    raise ValueError(
        f"invalid moment index {tuple(index)!r} for mode {mode!r}: "
        "need non-negative integer exponents of total order 2"
    )


def slot_index(slot: int, mode: str) -> tuple[int, ...]:
    """Inverse of :func:`moment_slot`."""
    idx = indices(mode)
    if not 0 <= slot < len(idx):
        raise ValueError(f"slot {slot} out of range for mode {mode!r}")
    return idx[slot]


def moment_names(mode: str) -> tuple[str, ...]:
    """Column names for the moments, e.g. ``g2000`` for index (2,0,0,0)."""
    return tuple("g" + "".join(map(str, ix)) for ix in indices(mode))


@dataclass(frozen=True)
class SystemParams:
    """Physical constants and potential coefficients.

    ``alpha`` is a constant shift of the ring-shaped potential: it exerts no
    force and only offsets reported energies.  ``beta`` confines away from
    the poles, ``gamma`` breaks the north/south symmetry.
    """

    mass: float = 1.0
    radius: float = 1.0
    hbar: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mass", "radius", "hbar"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class MomentState:
    """Classical variables plus the second-order moment vector.

    ``phi`` is stored unwrapped (it accumulates monotonically for circulating
    trajectories) so that multi-revolution phase shifts stay directly
    readable; wrapping is an output-formatting concern only.  For circle
    mode ``phi`` and ``p_phi`` are unused and fixed to zero.
    """

    mode: str
    theta: float
    p_theta: float
    phi: float = 0.0
    p_phi: float = 0.0
    moments: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.mode not in (CIRCLE, SPHERE):
            raise ValueError(f"unknown mode {self.mode!r}")
        need = N_MOMENTS[self.mode]
        if len(self.moments) != need:
            raise ValueError(
                f"{self.mode} mode needs {need} moments, got {len(self.moments)}"
            )

    def moment(self, index: tuple[int, ...]) -> float:
        return self.moments[moment_slot(index, self.mode)]

    def as_vector(self) -> np.ndarray:
        """Flat layout used by the integrator: classical block then moments."""
        if self.mode == CIRCLE:
            head = (self.theta, self.p_theta)
        else:
            head = (self.theta, self.p_theta, self.phi, self.p_phi)
        return np.array(head + tuple(self.moments), dtype=float)

    @classmethod
    def from_vector(cls, y, mode: str) -> "MomentState":
        y = tuple(float(v) for v in y)
        nc = N_CLASSICAL[mode]
        if len(y) != nc + N_MOMENTS[mode]:
            raise ValueError(f"vector length {len(y)} wrong for mode {mode!r}")
        if mode == CIRCLE:
            return cls(mode, y[0], y[1], 0.0, 0.0, y[2:])
        return cls(mode, y[0], y[1], y[2], y[3], y[4:])


#: termination tags
COMPLETED = "completed"
UNCERTAINTY_VIOLATION = "uncertainty_violation"
POLE_SINGULARITY = "pole_singularity"
STEP_FAILURE = "step_failure"

_TAGS = (COMPLETED, UNCERTAINTY_VIOLATION, POLE_SINGULARITY, STEP_FAILURE)


@dataclass(frozen=True)
class TerminationStatus:
    tag: str
    time: float
    detail: str = ""

    def __post_init__(self) -> None:
        if self.tag not in _TAGS:
            raise ValueError(f"unknown termination tag {self.tag!r}")

    @property
    def completed(self) -> bool:
        return self.tag == COMPLETED


def uncertainty_pair_products(state: MomentState):
    """Determinant combination G^{2,0}G^{0,2} - (G^{1,1})^2 per canonical pair.

    Returns a single value for circle mode, a (theta-pair, phi-pair) tuple
    for sphere mode.
    """
    m = state.moments
    if state.mode == CIRCLE:
        return m[0] * m[2] - m[1] * m[1]
    dg_theta = m[0] * m[4] - m[1] * m[1]
    dg_phi = m[7] * m[9] - m[8] * m[8]
    return dg_theta, dg_phi


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    issues: tuple[str, ...]
    products: tuple[float, ...]


def validate_state(state: MomentState, params: SystemParams, tol: float = 1e-9) -> ValidityReport:
    """Pure physical-validity check; reports problems, never mutates or raises.

    Flags non-finite entries, negative diagonal moments, and uncertainty
    products below hbar^2/4 - tol.
    """
    issues: list[str] = []
    vec = (state.theta, state.p_theta, state.phi, state.p_phi) + tuple(state.moments)
    if not all(math.isfinite(v) for v in vec):
        issues.append("non-finite entry in state")

    for ix in indices(state.mode):
        if max(ix) == 2:  # diagonal moment, a variance
            val = state.moment(ix)
            if val < -tol:
                issues.append(f"negative diagonal moment {ix}: {val!r}")

    floor = 0.25 * params.hbar**2
    prods = uncertainty_pair_products(state)
    if state.mode == CIRCLE:
        prods = (prods,)
        labels = ("theta",)
    else:
        labels = ("theta", "phi")
    for label, p in zip(labels, prods):
        if not math.isfinite(p) or p < floor - tol:
            issues.append(
                f"uncertainty product for {label} pair below floor: {p!r} < {floor!r} - {tol!r}"
            )

    return ValidityReport(ok=not issues, issues=tuple(issues), products=tuple(prods))


def random_valid_state(
    mode: str,
    rng: np.random.Generator,
    params: SystemParams,
    momentum_scale: float = 3.0,
) -> MomentState:
    """Random state guaranteed to pass :func:`validate_state`.

    The moment block is a random covariance B B^T padded on the diagonal by
    a bit over hbar/2, which keeps every canonical-pair determinant above
    the floor (principal minors of a positive semidefinite matrix are
    non-negative, so the pad's square survives in the product).  The polar
    angle stays inside (0.3, pi - 0.3) so sphere flows see no pole trouble.
    """
    n = N_CLASSICAL[mode]
    pad = 0.55 * params.hbar
    for _ in range(100):
        b = rng.normal(0.0, 0.5, size=(n, n))
        sigma = b @ b.T + pad * np.eye(n)
        moments = tuple(sigma[i, j] for i in range(n) for j in range(i, n))
        theta = rng.uniform(0.3, math.pi - 0.3)
        p_theta = rng.normal(0.0, momentum_scale)
        phi = rng.uniform(-math.pi, math.pi) if mode == SPHERE else 0.0
        p_phi = rng.normal(0.0, momentum_scale) if mode == SPHERE else 0.0
        state = MomentState(mode, theta, p_theta, phi, p_phi, moments)
        if validate_state(state, params).ok:
            return state
    raise RuntimeError("rejection sampling failed to produce a valid state")
