"""Poisson structure on the extended phase space and the bracket-driven oracle.

Classical variables keep their canonical brackets and commute with every
central moment.  Second-order moments close among themselves under a bracket
given by a combinatorial coefficient formula; the coefficients here are
unit-tested against the exact symbol calculus in :mod:`momentflow.weylcalc`,
which is the authority for every sign and factor.

``generic_rhs`` derives the full flow from the quantum Hamiltonian and the
bracket table alone.  It is deliberately slow and structural: the hand-coded
right-hand sides in :mod:`momentflow.dynamics` must agree with it on random
states, which pins down every term of the fast path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product as _cartesian
from math import comb, factorial

import numpy as np

from .states import (
    CIRCLE,
    SPHERE,
    MomentState,
    SystemParams,
    indices,
    moment_slot,
)


def k_coefficient(a: tuple, b: tuple, c: tuple, d: tuple, n: int, s: int, e: tuple) -> Fraction:
    """Combinatorial weight of one (n, s, e) term of the moment bracket.

    a, b are the position/momentum exponents of the first moment per degree
    of freedom, c, d those of the second, e the contraction exponents.  The
    inner summation index g_i runs over its natural support (every binomial
    nonzero); the source text's printed lower bound lists "e_i, s" where the
    support requires e_i - s, which the oracle comparison confirms.
    """
    k = len(a)
    ranges = []
    for i in range(k):
        lo = max(0, e[i] - s, e[i] - a[i], e[i] - d[i])
        hi = min(b[i], c[i], n - s, e[i])
        if lo > hi:
            return Fraction(0)
        ranges.append(range(lo, hi + 1))
    total = Fraction(0)
    for g in _cartesian(*ranges):
        if sum(g) != n - s:
            continue
        term = Fraction(1, factorial(s) * factorial(n - s))
        for i in range(k):
            num = (
                comb(a[i], e[i] - g[i])
                * comb(b[i], g[i])
                * comb(c[i], g[i])
                * comb(d[i], e[i] - g[i])
            )
            den = comb(n - s, g[i]) * comb(s, e[i] - g[i])
            term *= Fraction(num, den)
        total += term
    return total


def bracket_closed_form(index_a: tuple, index_b: tuple, sign: str = "derived") -> dict:
    """{G_A, G_B} for second-order moments as {index: Fraction}.

    sign="derived" uses the (-1)^(n-s) prefactor confirmed by the symbol
    calculus; sign="printed" keeps the source text's (-1)^s so the
    discrepancy can be quantified in tests instead of silently patched.

    The bilinear first-moment sum of the full formula is omitted: at order
    two each of its terms carries a first-order central moment, which
    vanishes identically.
    """
    if sign not in ("derived", "printed"):
        raise ValueError(f"unknown sign convention {sign!r}")
    if len(index_a) != len(index_b):
        raise ValueError(f"mixed modes: {index_a!r} vs {index_b!r}")
    if sum(index_a) != 2 or sum(index_b) != 2:
        raise ValueError("closed form restricted to second-order moments")
    k = len(index_a) // 2
    a = tuple(index_a[2 * i] for i in range(k))
    b = tuple(index_a[2 * i + 1] for i in range(k))
    c = tuple(index_b[2 * i] for i in range(k))
    d = tuple(index_b[2 * i + 1] for i in range(k))

    m = sum(min(a[i], d[i]) + min(b[i], c[i]) for i in range(k))
    n_max = 1 if m <= 1 else m - 1

    out: dict = {}
    for n in range(1, n_max + 1):
        if n % 2 == 0:
            # (i hbar/2)^(n-1) is imaginary at even n; nothing survives at
            # order two (n_max = 1), guard against silent misuse elsewhere
            raise ArithmeticError("even-n bracket term outside order-2 closure")
        hbar_factor = Fraction((-1) ** ((n - 1) // 2), 2 ** (n - 1))
        for s in range(n + 1):
            prefactor = (-1) ** (s if sign == "printed" else n - s)
            e_ranges = [
                range(min(a[i], d[i], s) + min(b[i], c[i], n - s) + 1) for i in range(k)
            ]
            for e in _cartesian(*e_ranges):
                if sum(e) != n:
                    continue
                coeff = k_coefficient(a, b, c, d, n, s, e) * prefactor * hbar_factor
                if not coeff:
                    continue
                w = []
                for i in range(k):
                    w.extend((a[i] + c[i] - e[i], b[i] + d[i] - e[i]))
                key = tuple(w)
                new = out.get(key, Fraction(0)) + coeff
                if new:
                    out[key] = new
                else:
                    out.pop(key, None)
    return out


class BracketTable:
    """All ordered second-order moment brackets of one mode, precomputed.

    Both orientations of every pair are computed independently from the
    closed form, so antisymmetry is a checked property of the formula, not
    an artifact of construction.  Immutable after construction.
    """

    def __init__(self, mode: str, sign: str = "derived") -> None:
        idx = indices(mode)
        self.mode = mode
        self.sign = sign
        self.entries = {
            (ia, ib): bracket_closed_form(ia, ib, sign=sign)
            for ia in idx
            for ib in idx
        }
        # flat float view for numeric evaluation: (slot_a, slot_b, slot_w, coeff)
        self._terms = tuple(
            (moment_slot(ia, mode), moment_slot(ib, mode), moment_slot(w, mode), float(cf))
            for (ia, ib), combo in self.entries.items()
            for w, cf in combo.items()
        )

    def entry(self, index_a: tuple, index_b: tuple) -> dict:
        return self.entries[(index_a, index_b)]

    def evaluate(self, slot_a: int, slot_b: int, moments) -> float:
        """Numeric {G_a, G_b} at the given moment values."""
        total = 0.0
        for sa, sb, sw, cf in self._terms:
            if sa == slot_a and sb == slot_b:
                total += cf * moments[sw]
        return total


@lru_cache(maxsize=None)
def bracket_table(mode: str, sign: str = "derived") -> BracketTable:
    return BracketTable(mode, sign=sign)


def bracket(index_a: tuple, index_b: tuple) -> dict:
    """Closed-form second-order bracket keyed by moment index."""
    if len(index_a) != len(index_b):
        raise ValueError(f"mixed modes: {index_a!r} vs {index_b!r}")
    mode = CIRCLE if len(index_a) == 2 else SPHERE
    return bracket_table(mode).entry(index_a, index_b)


def poisson_tensor(state: MomentState) -> np.ndarray:
    """Full antisymmetric bracket matrix at the given state.

    Canonical 2x2 blocks for the classical pairs, zero blocks between
    classical variables and moments, and the moment block evaluated from
    the bracket table (linear in the current moments).  The lower triangle
    mirrors the upper with negation, so antisymmetry is exact in floats.
    """
    idx = indices(state.mode)
    ncl = 2 if state.mode == CIRCLE else 4
    dim = ncl + len(idx)
    out = np.zeros((dim, dim))
    for dof in range(ncl // 2):
        out[2 * dof, 2 * dof + 1] = 1.0
        out[2 * dof + 1, 2 * dof] = -1.0
    table = bracket_table(state.mode)
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            val = table.evaluate(i, j, state.moments)
            out[ncl + i, ncl + j] = val
            out[ncl + j, ncl + i] = -val
    return out


class HamiltonianModel:
    """Classical Hamiltonian with analytic partial derivatives.

    ``derivative`` takes a multi-index over the classical variables in
    canonical order (theta, p_theta on the circle; theta, p_theta, phi,
    p_phi on the sphere) and supports total order <= 3; order zero returns
    the value itself.
    """

    mode = CIRCLE
    ndof = 1
    singular = False

    def value(self, z, params: SystemParams) -> float:
        return self.derivative((0,) * 2 * self.ndof, z, params)

    def derivative(self, multi: tuple, z, params: SystemParams) -> float:
        raise NotImplementedError


class CircleHamiltonian(HamiltonianModel):
    """Free particle on a ring: kinetic term only, angle is cyclic."""

    def derivative(self, multi: tuple, z, params: SystemParams) -> float:
        i, j = multi
        if i > 0:
            return 0.0
        w = 1.0 / (params.mass * params.radius**2)
        if j == 0:
            return 0.5 * z[1] ** 2 * w
        if j == 1:
            return z[1] * w
        if j == 2:
            return w
        return 0.0


def _inv_sin_sq_derivatives(theta: float) -> tuple:
    """1/sin^2 and its first three theta derivatives, one trig evaluation."""
    s = math.sin(theta)
    c = math.cos(theta)
    s2 = s * s
    inv2 = 1.0 / s2
    inv3 = inv2 / s
    inv4 = inv2 * inv2
    inv5 = inv4 / s
    return (
        inv2,
        -2.0 * c * inv3,
        2.0 * (1.0 + 2.0 * c * c) * inv4,
        -8.0 * c * (2.0 + c * c) * inv5,
    )


class SphereHamiltonian(HamiltonianModel):
    """Free particle on a sphere; the azimuthal kinetic term carries all the
    angle dependence through 1/sin^2(theta)."""

    mode = SPHERE
    ndof = 2
    singular = True

    def derivative(self, multi: tuple, z, params: SystemParams) -> float:
        i, j, k, l = multi
        if sum(multi) > 3:
            raise NotImplementedError(f"derivative order {multi!r} beyond 3")
        if k > 0:
            return 0.0
        w = 1.0 / (params.mass * params.radius**2)
        if j > 0:
            if i == 0 and l == 0:
                if j == 1:
                    return z[1] * w
                if j == 2:
                    return w
            return 0.0
        u = _inv_sin_sq_derivatives(z[0])[i]
        if l == 0:
            polar = 0.5 * z[1] ** 2 * w if i == 0 else 0.0
            return polar + 0.5 * z[3] ** 2 * w * u
        if l == 1:
            return z[3] * w * u
        if l == 2:
            return w * u
        return 0.0


def _potential_derivative(potential, multi: tuple, theta: float) -> float:
    """Contribution of a theta-only potential to a classical partial."""
    if potential is None:
        return 0.0
    if any(multi[1:]):
        return 0.0
    return potential.derivative(theta, multi[0])


def _taylor_coefficients(model, potential, z, params: SystemParams) -> list:
    """Order-2 Taylor coefficients c_B = d^B (H+V) / B! over moment indices."""
    out = []
    for b_idx in indices(model.mode):
        fact = 1
        for ai in b_idx:
            fact *= factorial(ai)
        val = model.derivative(b_idx, z, params) + _potential_derivative(
            potential, b_idx, z[0]
        )
        out.append(val / fact)
    return out


def quantum_hamiltonian(
    model: HamiltonianModel,
    potential,
    state: MomentState,
    params: SystemParams,
) -> float:
    """H_Q: classical energy plus the order-2 moment corrections."""
    z = state.as_vector()[: 2 * model.ndof]
    total = model.value(z, params) + _potential_derivative(
        potential, (0,) * 2 * model.ndof, state.theta
    )
    for c, g in zip(_taylor_coefficients(model, potential, z, params), state.moments):
        total += c * g
    return total


def generic_rhs(
    model: HamiltonianModel,
    potential,
    state: MomentState,
    params: SystemParams,
    sin_floor: float = 1e-3,
) -> np.ndarray:
    """Flow of the extended state derived from brackets and H_Q alone.

    Classical block: canonical flow of H_Q, whose gradient picks up the
    moment-weighted third partials of H + V.  Moment block: contraction of
    the bracket table against the order-2 Taylor coefficients.  This route
    never consults hand-derived equations of motion, which is what makes it
    a usable arbiter for the fast path.
    """
    if model.mode != state.mode:
        raise ValueError(f"model mode {model.mode!r} vs state mode {state.mode!r}")
    if model.singular and abs(math.sin(state.theta)) < sin_floor:
        raise ValueError(
            f"sin(theta) = {math.sin(state.theta)!r} under the singularity floor {sin_floor!r}"
        )
    ncl = 2 * model.ndof
    z = tuple(state.as_vector()[:ncl])
    idx = indices(state.mode)
    coeffs = _taylor_coefficients(model, potential, z, params)

    grad = []
    for j in range(ncl):
        dj = tuple(1 if i == j else 0 for i in range(ncl))
        gj = model.derivative(dj, z, params) + _potential_derivative(potential, dj, z[0])
        for b_idx, gval in zip(idx, state.moments):
            if gval == 0.0:
                continue
            multi = tuple(b_idx[i] + dj[i] for i in range(ncl))
            fact = 1
            for ai in b_idx:
                fact *= factorial(ai)
            gj += (
                (model.derivative(multi, z, params) + _potential_derivative(potential, multi, z[0]))
                / fact
                * gval
            )
        grad.append(gj)

    zdot = []
    for dof in range(model.ndof):
        zdot.append(grad[2 * dof + 1])
        zdot.append(-grad[2 * dof])

    table = bracket_table(state.mode)
    gdot = []
    for slot_a in range(len(idx)):
        total = 0.0
        for slot_b, c in enumerate(coeffs):
            if c == 0.0:
                continue
            total += table.evaluate(slot_a, slot_b, state.moments) * c
        gdot.append(total)
    return np.array(zdot + gdot)
