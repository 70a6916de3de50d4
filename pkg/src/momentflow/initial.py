"""Initial classical variables and second-order moments of Gaussian packets.

Closed forms for the initial moments of a Gaussian wave packet localized on
the circle (angle theta in [-pi, pi]) and on the sphere (theta Gaussian about
the equator, phi Gaussian in [-pi, pi], product state).  The azimuthal-sector
moments involve only erf; the polar sector on the sphere needs the complex
Dawson function because the sin(theta) measure mixes into the Gaussian
integrals.

Every closed form here is cross-checked in the test suite against direct
numerical quadrature of the defining Weyl-symmetrized integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize as _opt

from .specfun import dawson, erf_real
from .states import CIRCLE, SPHERE, MomentState, SystemParams


@dataclass(frozen=True)
class GaussianSpec:
    """Shape parameters and winding numbers of the initial wave packet.

    lam controls the azimuthal width (the only width on the circle), kappa
    the polar width on the sphere.  l and m_theta are the integer windings:
    P_phi0 = l*hbar and P_theta0 = m_theta*hbar (named m_theta, not m, to
    avoid colliding with the mass).
    """

    lam: float
    kappa: float | None = None
    l: int = 0
    m_theta: int = 0
    theta0: float = math.pi / 2
    phi0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be positive and finite, got {self.lam!r}")
        if self.kappa is not None and not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be positive and finite, got {self.kappa!r}")
        if not 0.0 < self.theta0 < math.pi:
            raise ValueError(f"theta0 must lie in (0, pi), got {self.theta0!r}")


def angle_variance(lam: float) -> float:
    """<theta^2> of a normalized Gaussian exp(-lam theta^2) on [-pi, pi].

    1/(2 lam) minus a boundary correction that dies like exp(-lam pi^2).
    """
    corr = math.sqrt(math.pi / lam) * math.exp(-lam * math.pi**2) / erf_real(math.pi * math.sqrt(lam))
    return 1.0 / (2.0 * lam) - corr


def momentum_variance(lam: float, hbar: float) -> float:
    """Conjugate-momentum variance paired with :func:`angle_variance`."""
    return lam * hbar**2 * (1.0 - lam * angle_variance(lam))


def circle_initial_moments(
    spec: GaussianSpec,
    params: SystemParams,
    correlation_policy: str = "zero",
) -> MomentState:
    """Initial circle-mode state for a Gaussian packet of width 1/sqrt(2 lam).

    The boundary term makes the exact symmetrized angle-momentum correlation
    of the wrapped packet formally imaginary, so it cannot be a moment value;
    policy "zero" (default) drops it, policy "paper_magnitude" keeps its
    magnitude (hbar/2)(1 - 2 lam G^{2,0}) for sensitivity studies.
    """
    g20 = angle_variance(spec.lam)
    if g20 <= 0.0:
        raise ValueError(
            f"lam={spec.lam!r} leaves no localized packet on the circle (angle variance {g20!r} <= 0)"
        )
    g02 = momentum_variance(spec.lam, params.hbar)
    if correlation_policy == "zero":
        g11 = 0.0
    elif correlation_policy == "paper_magnitude":
        g11 = 0.5 * params.hbar * (1.0 - 2.0 * spec.lam * g20)
    else:
        raise ValueError(f"unknown correlation policy {correlation_policy!r}")
    return MomentState(
        mode=CIRCLE,
        theta=0.0,
        p_theta=spec.l * params.hbar,
        moments=(g20, g11, g02),
    )


def circle_state_with_correlation(
    spec: GaussianSpec, params: SystemParams, g11: float
) -> MomentState:
    """Circle state tilted to a prescribed correlation moment.

    The momentum variance is inflated to (hbar^2/4 + g11^2)/G^{2,0} so the
    uncertainty product stays exactly at the hbar^2/4 floor; squeezing the
    correlation in any other way would push the state below it.
    """
    base = circle_initial_moments(spec, params)
    g20 = base.moments[0]
    g02 = (0.25 * params.hbar**2 + g11 * g11) / g20
    return MomentState(
        mode=CIRCLE,
        theta=base.theta,
        p_theta=base.p_theta,
        moments=(g20, float(g11), g02),
    )


def _dawson_sum(kappa: float) -> float:
    """S = F(chi) + F(conj chi) with chi = (1 - i pi kappa)/(2 sqrt(kappa)).

    Real by the reflection symmetry of F; the tiny numerical imaginary part
    is asserted away rather than silently dropped.
    """
    chi = (1.0 - 1j * math.pi * kappa) / (2.0 * math.sqrt(kappa))
    s = dawson(chi) + dawson(chi.conjugate())
    if abs(s.imag) > 1e-10 * abs(s.real):
        raise ArithmeticError(f"Dawson sum lost reality at kappa={kappa!r}: {s!r}")
    return s.real


def polar_angle_variance(kappa: float) -> float:
    """Initial polar-angle variance on the sphere as a function of kappa."""
    s = _dawson_sum(kappa)
    return (2.0 * math.sqrt(kappa) / s + 2.0 * kappa - 1.0) / (4.0 * kappa**2)


def polar_momentum_variance(kappa: float, hbar: float) -> float:
    """Initial polar-momentum variance; saturates the uncertainty floor
    against :func:`polar_angle_variance` identically in kappa."""
    s = _dawson_sum(kappa)
    return hbar**2 * kappa**2 * s / (2.0 * math.sqrt(kappa) + (2.0 * kappa - 1.0) * s)


def sphere_initial_moments(
    spec: GaussianSpec,
    params: SystemParams,
    p_theta: float | None = None,
) -> MomentState:
    """Initial sphere-mode state; all six cross moments are exactly zero
    (the packet is a product state in the two angle sectors).

    p_theta overrides the m_theta winding when sweeping the initial polar
    momentum through non-integer values.
    """
    if spec.kappa is None:
        raise ValueError("sphere mode needs the kappa shape parameter")
    g2000 = polar_angle_variance(spec.kappa)
    g0200 = polar_momentum_variance(spec.kappa, params.hbar)
    g0020 = angle_variance(spec.lam)
    g0002 = momentum_variance(spec.lam, params.hbar)
    if p_theta is None:
        p_theta = spec.m_theta * params.hbar
    moments = [0.0] * 10
    moments[0] = g2000
    moments[4] = g0200
    moments[7] = g0020
    moments[9] = g0002
    return MomentState(
        mode=SPHERE,
        theta=spec.theta0,
        p_theta=float(p_theta),
        phi=spec.phi0,
        p_phi=spec.l * params.hbar,
        moments=tuple(moments),
    )


#: deterministic bracket inside which the polar variance is searched; above
#: kappa ~ 287 the Dawson sum exceeds the double range (it grows like
#: exp(pi^2 kappa / 4)), so the upper end stays safely below that
_KAPPA_BRACKET = (1e-3, 250.0)


def solve_kappa(target_g2000: float, params: SystemParams) -> float:
    """Invert :func:`polar_angle_variance` for kappa by bracketed root solve.

    The variance is strictly decreasing in kappa on the working bracket, so
    brentq is deterministic and reproducible.  Targets outside the attainable
    interval are rejected with that interval in the message.
    """
    if not (target_g2000 > 0 and math.isfinite(target_g2000)):
        raise ValueError(f"target variance must be positive and finite, got {target_g2000!r}")
    lo, hi = _KAPPA_BRACKET
    vmax = polar_angle_variance(lo)   # wide packet: largest variance
    vmin = polar_angle_variance(hi)   # narrow packet: smallest variance
    if not vmin < target_g2000 < vmax:
        raise ValueError(
            f"target {target_g2000!r} outside attainable range ({vmin!r}, {vmax!r}) "
            f"for kappa in {_KAPPA_BRACKET}"
        )
    kappa = _opt.brentq(
        lambda k: polar_angle_variance(k) - target_g2000,
        lo,
        hi,
        xtol=1e-13,
        rtol=8.9e-16,
        maxiter=200,
    )
    residual = polar_angle_variance(kappa) - target_g2000
    if abs(residual) > 1e-10:
        raise ArithmeticError(
            f"root solve left residual {residual!r} at kappa={kappa!r}"
        )
    return float(kappa)
