"""Initial-packet moments against direct quadrature of the packet itself.

The closed forms are checked against numerical expectation values of the
same truncated Gaussian densities, so an algebra slip in either the erf or
the Dawson route cannot hide.
"""
import math

import pytest
from scipy.integrate import quad

from momentflow import initial
from momentflow.initial import (
    GaussianSpec,
    angle_variance,
    circle_initial_moments,
    circle_state_with_correlation,
    momentum_variance,
    polar_angle_variance,
    polar_momentum_variance,
    solve_kappa,
    sphere_initial_moments,
)
from momentflow.states import CIRCLE, SPHERE, uncertainty_pair_products

QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-13)


def _circle_quadrature(lam: float, hbar: float) -> tuple[float, float]:
    """Angle and momentum variance of the density exp(-lam t^2) on [-pi, pi].

    The momentum variance is the direct sandwich -hbar^2 <psi|psi''>, which
    keeps the (exponentially small) endpoint terms on the same side as the
    closed form.
    """
    z = quad(lambda t: math.exp(-lam * t * t), -math.pi, math.pi, **QUAD_OPTS)[0]
    g20 = quad(lambda t: t * t * math.exp(-lam * t * t), -math.pi, math.pi, **QUAD_OPTS)[0] / z
    g02 = hbar**2 * quad(
        lambda t: (lam - lam**2 * t * t) * math.exp(-lam * t * t), -math.pi, math.pi, **QUAD_OPTS
    )[0] / z
    return g20, g02


def _polar_quadrature(kappa: float, hbar: float) -> tuple[float, float]:
    """Polar variances of exp(-kappa (th - pi/2)^2) weighted by sin(th).

    The momentum operator carries the cot(th)/2 measure term; its square is
    integrable only away from the poles, where the packet weight is
    exponentially small, so the integral cuts off 0.01 from each pole.
    """
    f = lambda th: math.exp(-kappa * (th - math.pi / 2) ** 2) * math.sin(th)
    n = quad(f, 0.0, math.pi, **QUAD_OPTS)[0]
    mean = quad(lambda th: th * f(th), 0.0, math.pi, **QUAD_OPTS)[0] / n
    g2000 = quad(lambda th: (th - mean) ** 2 * f(th), 0.0, math.pi, **QUAD_OPTS)[0] / n

    def momentum_density(th: float) -> float:
        x = th - math.pi / 2
        psi = math.exp(-kappa * x * x / 2.0)
        return (-kappa * x * psi + 0.5 * (math.cos(th) / math.sin(th)) * psi) ** 2 * math.sin(th)

    cut = 0.01
    g0200 = hbar**2 * quad(momentum_density, cut, math.pi - cut, **QUAD_OPTS)[0] / n
    return g2000, g0200


def test_circle_closed_forms_match_quadrature(rng):
    for _ in range(10):
        lam = float(rng.uniform(1.0, 30.0))
        q20, q02 = _circle_quadrature(lam, 1.0)
        assert angle_variance(lam) == pytest.approx(q20, rel=1e-8)
        assert momentum_variance(lam, 1.0) == pytest.approx(q02, rel=1e-8)


def test_polar_angle_variance_matches_quadrature(rng):
    for _ in range(10):
        kappa = float(rng.uniform(7.0, 60.0))
        q2000, _ = _polar_quadrature(kappa, 1.0)
        assert polar_angle_variance(kappa) == pytest.approx(q2000, rel=1e-8)


def test_polar_momentum_variance_sits_just_below_quadrature(rng):
    # the closed form saturates the uncertainty floor by construction; the
    # packet's true variance exceeds it by a sliver that shrinks with kappa
    for _ in range(10):
        kappa = float(rng.uniform(7.0, 60.0))
        _, q0200 = _polar_quadrature(kappa, 1.0)
        closed = polar_momentum_variance(kappa, 1.0)
        excess = (q0200 - closed) / closed
        assert 0.0 < excess < 5e-5, (kappa, excess)


def test_frozen_reference_widths():
    assert polar_angle_variance(10.0) == pytest.approx(0.047500000000175985, rel=1e-14)
    assert polar_momentum_variance(10.0, 1.0) == pytest.approx(5.2631578947173425, rel=1e-14)
    assert angle_variance(10.0) == pytest.approx(0.05, rel=1e-14)
    assert momentum_variance(10.0, 1.0) == pytest.approx(5.0, rel=1e-14)


@pytest.mark.parametrize("kappa", [2.0, 7.0, 10.0, 60.0, 250.0])
def test_polar_pair_saturates_the_floor_identically(kappa):
    prod = polar_angle_variance(kappa) * polar_momentum_variance(kappa, 1.0)
    assert prod == pytest.approx(0.25, abs=1e-15)


def test_circle_pair_floor_depends_on_wrapping():
    # narrow packets sit exactly at the floor; a lam=1 packet feels the
    # wrapping and its naive product dips below hbar^2/4 (compact-space
    # moments do not obey the flat-space bound)
    for lam in (3.0, 5.0, 10.0):
        assert angle_variance(lam) * momentum_variance(lam, 1.0) == pytest.approx(0.25, abs=1e-15)
    wide = angle_variance(1.0) * momentum_variance(1.0, 1.0)
    assert wide < 0.25 - 1e-9


def test_momentum_variances_scale_with_hbar_squared():
    assert momentum_variance(4.0, 2.0) == pytest.approx(4.0 * momentum_variance(4.0, 1.0), rel=1e-15)
    assert polar_momentum_variance(9.0, 2.0) == pytest.approx(
        4.0 * polar_momentum_variance(9.0, 1.0), rel=1e-15
    )


def test_gaussian_spec_validation():
    with pytest.raises(ValueError, match="lam"):
        GaussianSpec(lam=0.0)
    with pytest.raises(ValueError, match="lam"):
        GaussianSpec(lam=math.inf)
    with pytest.raises(ValueError, match="kappa"):
        GaussianSpec(lam=10.0, kappa=-2.0)
    with pytest.raises(ValueError, match="theta0"):
        GaussianSpec(lam=10.0, kappa=10.0, theta0=math.pi)


def test_circle_initial_moments(params):
    state = circle_initial_moments(GaussianSpec(lam=10.0, l=10), params)
    assert state.mode == CIRCLE
    assert state.theta == 0.0
    assert state.p_theta == 10.0
    g20, g11, g02 = state.moments
    assert g11 == 0.0
    assert (g20, g02) == (angle_variance(10.0), momentum_variance(10.0, 1.0))


def test_circle_correlation_policies(params):
    spec = GaussianSpec(lam=3.0, l=2)
    zero = circle_initial_moments(spec, params, correlation_policy="zero")
    kept = circle_initial_moments(spec, params, correlation_policy="paper_magnitude")
    assert zero.moments[1] == 0.0
    g20 = zero.moments[0]
    assert kept.moments[1] == pytest.approx(0.5 * (1.0 - 6.0 * g20), rel=1e-15)
    assert kept.moments[::2] == zero.moments[::2]
    with pytest.raises(ValueError, match="correlation policy"):
        circle_initial_moments(spec, params, correlation_policy="negotiable")


def test_correlation_tilt_keeps_the_product_on_the_floor(params):
    for g11 in (-0.3, 0.0, 0.1, 0.5):
        state = circle_state_with_correlation(GaussianSpec(lam=10.0, l=10), params, g11)
        assert state.moments[1] == g11
        g20, _, g02 = state.moments
        assert g20 * g02 - g11 * g11 == pytest.approx(0.25, abs=1e-15)
        assert uncertainty_pair_products(state) == pytest.approx(0.25, abs=1e-15)


def test_sphere_initial_moments(params):
    spec = GaussianSpec(lam=10.0, kappa=10.0, l=10, m_theta=1, theta0=1.2, phi0=0.4)
    state = sphere_initial_moments(spec, params)
    assert state.mode == SPHERE
    assert (state.theta, state.phi) == (1.2, 0.4)
    assert state.p_theta == 1.0 and state.p_phi == 10.0
    m = state.moments
    assert m[0] == polar_angle_variance(10.0)
    assert m[4] == polar_momentum_variance(10.0, 1.0)
    assert m[7] == angle_variance(10.0)
    assert m[9] == momentum_variance(10.0, 1.0)
    # product packet: every cross-sector and angle-momentum cross moment is 0
    for slot in (1, 2, 3, 5, 6, 8):
        assert m[slot] == 0.0


def test_sphere_momentum_override_and_kappa_guard(params):
    spec = GaussianSpec(lam=10.0, kappa=10.0, m_theta=3)
    assert sphere_initial_moments(spec, params).p_theta == 3.0
    assert sphere_initial_moments(spec, params, p_theta=-2.5).p_theta == -2.5
    with pytest.raises(ValueError, match="kappa"):
        sphere_initial_moments(GaussianSpec(lam=10.0), params)


def test_solve_kappa_round_trip(params):
    assert solve_kappa(0.0475, params) == pytest.approx(10.000000000039087, rel=1e-12)
    for target in (0.003, 0.02, 0.0475, 0.2, 0.4):
        kappa = solve_kappa(target, params)
        assert polar_angle_variance(kappa) == pytest.approx(target, abs=1e-10)


def test_solve_kappa_rejects_unattainable_targets(params):
    lo, hi = initial._KAPPA_BRACKET
    vmin, vmax = polar_angle_variance(hi), polar_angle_variance(lo)
    for target in (vmin * 0.5, vmax * 1.5):
        with pytest.raises(ValueError, match="attainable"):
            solve_kappa(target, params)
    with pytest.raises(ValueError, match="positive and finite"):
        solve_kappa(-0.04, params)
    with pytest.raises(ValueError, match="positive and finite"):
        solve_kappa(math.nan, params)
