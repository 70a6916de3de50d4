"""Fast flows against the bracket oracle, potential derivatives, symmetries."""
import math

import numpy as np
import pytest

from momentflow import algebra, dynamics, initial
from momentflow.dynamics import (
    CIRCLE_FREE,
    EVOLVE,
    FROZEN,
    SPHERE_FREE,
    SPHERE_MAKAROV,
    ZEROED,
    MakarovPotential,
    PoleSingularityError,
    SystemKind,
    effective_potential,
    energy,
    flow,
    rhs,
)
from momentflow.states import (
    CIRCLE,
    SPHERE,
    MomentState,
    SystemParams,
    random_valid_state,
)

MAKAROV_PARAMS = SystemParams(beta=2.0, gamma=-1.9)


def test_system_kind_validation():
    with pytest.raises(ValueError, match="unknown system tag"):
        SystemKind("torus_free")
    with pytest.raises(ValueError, match="unknown moment policy"):
        SystemKind(SPHERE_FREE, "sublimated")
    assert SystemKind(CIRCLE_FREE).mode == CIRCLE
    assert SystemKind(SPHERE_MAKAROV).has_potential


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_makarov_potential_derivatives_match_finite_differences(order):
    pot = MakarovPotential(alpha=0.3, beta=2.0, gamma=-1.9, radius=1.3)
    h = 1e-4
    for theta in (0.6, 1.2, math.pi / 2, 2.2, 2.8):
        fd = (pot.derivative(theta + h, order - 1) - pot.derivative(theta - h, order - 1)) / (2 * h)
        assert pot.derivative(theta, order) == pytest.approx(fd, rel=1e-6), (theta, order)


def test_makarov_potential_alpha_is_a_pure_offset():
    base = MakarovPotential(alpha=0.0, beta=2.0, gamma=-1.9)
    lifted = MakarovPotential(alpha=5.0, beta=2.0, gamma=-1.9)
    assert lifted.derivative(1.3, 0) == pytest.approx(base.derivative(1.3, 0) - 5.0, abs=0)
    for order in (1, 2, 3, 4):
        assert lifted.derivative(1.3, order) == base.derivative(1.3, order)


def test_negative_gamma_prefers_southern_hemisphere():
    pot = MakarovPotential.from_params(MAKAROV_PARAMS)
    theta = 2.2
    assert pot.derivative(theta, 0) < pot.derivative(math.pi - theta, 0)


@pytest.mark.parametrize(
    "tag,params",
    [
        (CIRCLE_FREE, SystemParams()),
        (SPHERE_FREE, SystemParams()),
        (SPHERE_MAKAROV, MAKAROV_PARAMS),
    ],
)
def test_fast_rhs_matches_bracket_oracle(tag, params, rng):
    kind = SystemKind(tag, EVOLVE)
    model = algebra.CircleHamiltonian() if kind.mode == CIRCLE else algebra.SphereHamiltonian()
    potential = MakarovPotential.from_params(params) if kind.has_potential else None
    for _ in range(10):
        state = random_valid_state(kind.mode, rng, params)
        fast = rhs(kind, state, params)
        oracle = algebra.generic_rhs(model, potential, state, params)
        scale = max(1.0, float(np.max(np.abs(oracle))))
        assert float(np.max(np.abs(fast - oracle))) / scale < 1e-6


def test_makarov_with_zero_coefficients_reduces_to_free(params, rng):
    free = SystemKind(SPHERE_FREE, EVOLVE)
    mak = SystemKind(SPHERE_MAKAROV, EVOLVE)
    for _ in range(5):
        state = random_valid_state(SPHERE, rng, params)
        assert np.array_equal(rhs(free, state, params), rhs(mak, state, params))


def _mirror(state: MomentState) -> MomentState:
    # parity in the polar angle: theta -> pi - theta; moments with an odd
    # polar exponent count flip sign (slots g1010, g1001, g0110, g0101)
    m = list(state.moments)
    for slot in (2, 3, 5, 6):
        m[slot] = -m[slot]
    return MomentState(SPHERE, math.pi - state.theta, -state.p_theta,
                       state.phi, state.p_phi, tuple(m))


def test_free_sphere_flow_commutes_with_polar_mirror(params, rng):
    kind = SystemKind(SPHERE_FREE, EVOLVE)
    signs = np.array([-1, -1, 1, 1] + [1, 1, -1, -1, 1, -1, -1, 1, 1, 1], dtype=float)
    for _ in range(5):
        state = random_valid_state(SPHERE, rng, params)
        mirrored = rhs(kind, _mirror(state), params)
        assert mirrored == pytest.approx(signs * rhs(kind, state, params), rel=1e-12, abs=1e-12)


def test_asymmetric_potential_breaks_the_mirror(rng):
    kind = SystemKind(SPHERE_MAKAROV, EVOLVE)
    state = random_valid_state(SPHERE, rng, MAKAROV_PARAMS)
    signs = np.array([-1, -1, 1, 1] + [1, 1, -1, -1, 1, -1, -1, 1, 1, 1], dtype=float)
    mirrored = rhs(kind, _mirror(state), MAKAROV_PARAMS)
    assert not np.allclose(mirrored, signs * rhs(kind, state, MAKAROV_PARAMS), rtol=1e-6)


def test_rhs_raises_at_the_pole(params):
    state = MomentState(SPHERE, 1e-5, 0.0, 0.0, 1.0, (0.3,) + (0.0,) * 3 + (0.3,) + (0.0,) * 2 + (0.3, 0.0, 0.3))
    with pytest.raises(PoleSingularityError):
        rhs(SystemKind(SPHERE_FREE, EVOLVE), state, params)
    assert issubclass(PoleSingularityError, ValueError)


def test_rhs_mode_mismatch(params, rng):
    state = random_valid_state(CIRCLE, rng, params)
    with pytest.raises(ValueError, match="mode"):
        rhs(SystemKind(SPHERE_FREE, EVOLVE), state, params)


def test_flow_wraps_rhs(params, rng):
    kind = SystemKind(SPHERE_FREE, EVOLVE)
    fun = flow(kind, params)
    state = random_valid_state(SPHERE, rng, params)
    assert np.array_equal(fun(0.0, state.as_vector()), rhs(kind, state, params))


def test_frozen_policy_moves_classical_under_constant_moments(params, rng):
    state = random_valid_state(SPHERE, rng, params)
    v = rhs(SystemKind(SPHERE_FREE, FROZEN), state, params)
    assert not np.any(v[4:])            # moments pinned
    v_full = rhs(SystemKind(SPHERE_FREE, EVOLVE), state, params)
    assert np.array_equal(v[:4], v_full[:4])  # same classical forces


def test_zeroed_policy_is_the_bare_classical_flow(params, rng):
    state = random_valid_state(SPHERE, rng, params)
    bare = MomentState(SPHERE, state.theta, state.p_theta, state.phi,
                       state.p_phi, (0.0,) * 10)
    v = rhs(SystemKind(SPHERE_FREE, ZEROED), state, params)
    v_bare = rhs(SystemKind(SPHERE_FREE, EVOLVE), bare, params)
    assert v[:4] == pytest.approx(v_bare[:4], rel=1e-15)
    assert not np.any(v[4:])


def test_reference_packet_rhs_frozen(params):
    spec = initial.GaussianSpec(lam=10.0, kappa=10.0, l=10, m_theta=1)
    state = initial.sphere_initial_moments(spec, params)
    v = rhs(SystemKind(SPHERE_FREE, EVOLVE), state, params)
    assert v[0] == 1.0                                        # polar rate
    assert v[2] == pytest.approx(10.47500000000176, abs=1e-12)  # azimuthal rate
    assert v[5] == pytest.approx(0.5131578946997442, abs=1e-12)
    assert v[12] == pytest.approx(5.0, abs=1e-12)
    assert v[3] == 0.0 and v[4] == 0.0 and v[13] == 0.0


def test_energy_policies(params, rng):
    state = random_valid_state(SPHERE, rng, params)
    bare = MomentState(SPHERE, state.theta, state.p_theta, state.phi,
                       state.p_phi, (0.0,) * 10)
    e_zero = energy(SystemKind(SPHERE_FREE, ZEROED), state, params)
    assert e_zero == pytest.approx(
        energy(SystemKind(SPHERE_FREE, EVOLVE), bare, params), rel=1e-15
    )
    e_full = energy(SystemKind(SPHERE_FREE, EVOLVE), state, params)
    assert e_full != pytest.approx(e_zero)
    assert energy(SystemKind(SPHERE_FREE, FROZEN), state, params) == e_full


def test_effective_potential_is_the_moment_corrected_potential():
    pot = MakarovPotential.from_params(MAKAROV_PARAMS)
    for theta in (0.7, 1.4, 2.1, 2.7):
        for g in (0.0, 0.05, 0.8):
            expected = pot.derivative(theta, 0) + 0.5 * g * pot.derivative(theta, 2)
            assert effective_potential(theta, g, MAKAROV_PARAMS) == pytest.approx(
                expected, rel=1e-12
            )
    with pytest.raises(PoleSingularityError):
        effective_potential(1e-9, 0.05, MAKAROV_PARAMS)
