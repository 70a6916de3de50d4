"""State layout, validity checks, and the random-state generator."""
import math

import numpy as np
import pytest

from momentflow import states
from momentflow.states import (
    CIRCLE,
    SPHERE,
    MomentState,
    SystemParams,
    TerminationStatus,
    moment_names,
    moment_slot,
    random_valid_state,
    slot_index,
    uncertainty_pair_products,
    validate_state,
)


def test_sphere_moment_order_is_lexicographic_descending():
    assert moment_names(SPHERE) == (
        "g2000", "g1100", "g1010", "g1001", "g0200",
        "g0110", "g0101", "g0020", "g0011", "g0002",
    )
    assert moment_names(CIRCLE) == ("g20", "g11", "g02")


@pytest.mark.parametrize("mode", [CIRCLE, SPHERE])
def test_slot_round_trip(mode):
    for slot, ix in enumerate(states.indices(mode)):
        assert moment_slot(ix, mode) == slot
        assert slot_index(slot, mode) == ix


def test_moment_slot_rejects_foreign_index():
    with pytest.raises((KeyError, ValueError)):
        moment_slot((3, 0), CIRCLE)


def test_state_requires_matching_moment_count():
    with pytest.raises(ValueError, match="3 moments"):
        MomentState(CIRCLE, 0.1, 0.2, moments=(1.0, 0.0))
    with pytest.raises(ValueError, match="10 moments"):
        MomentState(SPHERE, 0.1, 0.2, 0.3, 0.4, moments=(1.0,) * 3)


def test_vector_round_trip_sphere():
    moments = tuple(float(k) / 7 for k in range(1, 11))
    s = MomentState(SPHERE, 1.2, -0.3, 2.5, 4.0, moments)
    back = MomentState.from_vector(s.as_vector(), SPHERE)
    assert back == s
    assert s.moment((0, 2, 0, 0)) == moments[4]


def test_vector_round_trip_circle_pins_phi_to_zero():
    s = MomentState(CIRCLE, 0.4, 1.5, moments=(0.05, 0.0, 5.0))
    v = s.as_vector()
    assert v.shape == (5,)
    back = MomentState.from_vector(v, CIRCLE)
    assert back.phi == 0.0 and back.p_phi == 0.0


def test_unknown_mode_rejected():
    with pytest.raises(ValueError, match="unknown mode"):
        MomentState("torus", 0.0, 0.0, moments=())


def test_params_validation():
    with pytest.raises(ValueError, match="mass"):
        SystemParams(mass=0.0)
    with pytest.raises(ValueError, match="radius"):
        SystemParams(radius=-1.0)
    with pytest.raises(ValueError, match="gamma"):
        SystemParams(gamma=math.inf)


def test_termination_status_tags():
    ok = TerminationStatus(states.COMPLETED, 10.0)
    assert ok.completed
    assert not TerminationStatus(states.POLE_SINGULARITY, 3.0, "hit floor").completed
    with pytest.raises(ValueError, match="unknown termination tag"):
        TerminationStatus("exploded", 1.0)


def test_pair_products_circle_and_sphere():
    c = MomentState(CIRCLE, 0.0, 0.0, moments=(0.05, 0.1, 5.2))
    assert uncertainty_pair_products(c) == pytest.approx(0.05 * 5.2 - 0.01, abs=0)
    m = [0.0] * 10
    m[0], m[1], m[4] = 0.5, 0.2, 0.6   # polar block
    m[7], m[8], m[9] = 0.3, -0.1, 1.0  # azimuthal block
    s = MomentState(SPHERE, 1.0, 0.0, 0.0, 0.0, tuple(m))
    dg_theta, dg_phi = uncertainty_pair_products(s)
    assert dg_theta == pytest.approx(0.5 * 0.6 - 0.04, abs=0)
    assert dg_phi == pytest.approx(0.3 * 1.0 - 0.01, abs=0)


def test_validate_state_flags_floor_violation(params):
    m = [0.0] * 10
    m[0], m[4] = 0.1, 0.1          # product 0.01 < 0.25
    m[7], m[9] = 1.0, 1.0
    bad = MomentState(SPHERE, 1.5, 0.0, 0.0, 0.0, tuple(m))
    report = validate_state(bad, params)
    assert not report.ok
    assert any("theta pair below floor" in msg for msg in report.issues)


def test_validate_state_flags_negative_variance_and_nonfinite(params):
    good = MomentState(CIRCLE, 0.0, 0.0, moments=(0.05, 0.0, 5.2))
    assert validate_state(good, params).ok
    neg = MomentState(CIRCLE, 0.0, 0.0, moments=(-0.05, 0.0, 5.2))
    assert any("negative diagonal" in m for m in validate_state(neg, params).issues)
    nan = MomentState(CIRCLE, math.nan, 0.0, moments=(0.05, 0.0, 5.2))
    assert any("non-finite" in m for m in validate_state(nan, params).issues)


def test_validate_state_tolerates_margin(params):
    # a hair under the floor stays acceptable within the stated tolerance
    g20 = 0.05
    g02 = (0.25 - 0.5e-9) / g20
    s = MomentState(CIRCLE, 0.0, 0.0, moments=(g20, 0.0, g02))
    assert validate_state(s, params, tol=1e-9).ok
    assert not validate_state(s, params, tol=1e-12).ok


@pytest.mark.parametrize("mode", [CIRCLE, SPHERE])
def test_random_valid_state_always_validates(mode, params, rng):
    for _ in range(50):
        s = random_valid_state(mode, rng, params)
        assert validate_state(s, params).ok
        assert 0.3 <= s.theta <= math.pi - 0.3


def test_random_valid_state_is_deterministic(params):
    a = random_valid_state(SPHERE, np.random.default_rng(7), params)
    b = random_valid_state(SPHERE, np.random.default_rng(7), params)
    assert a == b
