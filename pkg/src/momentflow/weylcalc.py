"""Exact symbol calculus for brackets of expectation-value moments.

Independent cross-check route for the closed-form moment bracket used by the
dynamics.  Everything here is exact rational arithmetic over formal
variables, so agreement with the closed form can be asserted with ``==``
rather than a floating tolerance.

The objects are polynomials in formal expectation variables E_u, where u is
an exponent tuple over the phase-space coordinates (x1, p1, x2, p2, ...) and
E_u stands for the expectation of the symmetrized (Weyl-ordered) monomial.
The bracket of two such expectations is the expectation of the Moyal bracket
of the underlying monomials,

    {A, B} = sum over odd n of (-1)^((n-1)/2) (hbar/2)^(n-1) / n! * A D^n B,

with D the Poisson bidifferential.  Brackets of arbitrary polynomials follow
by the Leibniz rule, and central moments are polynomials in the E_u, so the
bracket of any two central moments can be computed and then re-centered.
The mean values drop out of every moment-moment bracket; that cancellation
is asserted, not assumed.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _cartesian
from math import comb

# polynomial = {(hbar_power, monomial): Fraction}; a monomial is a sorted
# tuple of tagged factors ('E', u) or ('G', w), empty tuple = constant
Poly = dict


def _add_term(poly: Poly, hbar_pow: int, monomial: tuple, coeff: Fraction) -> None:
    if not coeff:
        return
    key = (hbar_pow, monomial)
    new = poly.get(key, Fraction(0)) + coeff
    if new:
        poly[key] = new
    else:
        poly.pop(key, None)


def poly_add(p: Poly, q: Poly, scale: Fraction = Fraction(1)) -> Poly:
    out = dict(p)
    for (h, m), c in q.items():
        _add_term(out, h, m, c * scale)
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (h1, m1), c1 in p.items():
        for (h2, m2), c2 in q.items():
            _add_term(out, h1 + h2, tuple(sorted(m1 + m2)), c1 * c2)
    return out


def _falling(base: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= base - j
    return out


def _expectation_factor(u: tuple) -> tuple:
    """Monomial for <z^u>: empty for the constant 1, else a single E factor."""
    return () if not any(u) else (("E", u),)


def moyal_expectation_bracket(u: tuple, v: tuple) -> Poly:
    """{E_u, E_v} as a polynomial (linear) in expectation variables.

    Expands A D^n B for the monomials z^u, z^v over all odd n; each dof j
    contributes k_j derivatives in the (x_j -> p_j) pairing and l_j in the
    (p_j -> x_j) pairing, carrying a (-1)^l_j.
    """
    ndof = len(u) // 2
    out: Poly = {}
    max_n = sum(u) + sum(v)
    for n in range(1, max_n + 1, 2):
        prefactor = Fraction((-1) ** ((n - 1) // 2), 2 ** (n - 1))
        ranges = []
        for j in range(ndof):
            kmax = min(u[2 * j], v[2 * j + 1])
            lmax = min(u[2 * j + 1], v[2 * j])
            ranges.append([(k, l) for k in range(kmax + 1) for l in range(lmax + 1)])
        for combo in _cartesian(*ranges):
            if sum(k + l for k, l in combo) != n:
                continue
            coeff = prefactor
            w = list(u[i] + v[i] for i in range(2 * ndof))
            sign = 1
            for j, (k, l) in enumerate(combo):
                num = (
                    _falling(u[2 * j], k)
                    * _falling(u[2 * j + 1], l)
                    * _falling(v[2 * j + 1], k)
                    * _falling(v[2 * j], l)
                )
                den = 1
                for f in range(1, k + 1):
                    den *= f
                for f in range(1, l + 1):
                    den *= f
                coeff *= Fraction(num, den)
                sign *= (-1) ** l
                w[2 * j] -= k + l
                w[2 * j + 1] -= k + l
            if not coeff:
                continue
            _add_term(out, n - 1, _expectation_factor(tuple(w)), coeff * sign)
    return out


def expectation_poly_bracket(p: Poly, q: Poly) -> Poly:
    """Bracket of two polynomials in the E_u via the Leibniz rule."""
    out: Poly = {}
    for (h1, m1), c1 in p.items():
        for i, f1 in enumerate(m1):
            if f1[0] != "E":
                continue
            if i and m1[i - 1] == f1:
                continue  # each distinct factor once; multiplicity below
            mult1 = m1.count(f1)
            rest1 = list(m1)
            rest1.remove(f1)
            for (h2, m2), c2 in q.items():
                for k, f2 in enumerate(m2):
                    if f2[0] != "E":
                        continue
                    if k and m2[k - 1] == f2:
                        continue
                    mult2 = m2.count(f2)
                    rest2 = list(m2)
                    rest2.remove(f2)
                    inner = moyal_expectation_bracket(f1[1], f2[1])
                    scale = c1 * mult1 * c2 * mult2
                    base = tuple(sorted(rest1 + rest2))
                    for (hi, mi), ci in inner.items():
                        _add_term(
                            out,
                            h1 + h2 + hi,
                            tuple(sorted(base + mi)),
                            ci * scale,
                        )
    return out


def _mean_factor(i: int, ndof: int) -> tuple:
    delta = tuple(1 if j == i else 0 for j in range(2 * ndof))
    return ("E", delta)


def central_moment_poly(index: tuple) -> Poly:
    """Central moment with exponent tuple ``index`` expanded in the E_u."""
    ndof = len(index) // 2
    out: Poly = {}
    for w in _cartesian(*(range(a + 1) for a in index)):
        coeff = Fraction(1)
        factors: list = []
        for i, (a, wi) in enumerate(zip(index, w)):
            coeff *= comb(a, wi) * (-1) ** (a - wi)
            factors.extend(_mean_factor(i, ndof) for _ in range(a - wi))
        factors.extend(_expectation_factor(w))
        _add_term(out, 0, tuple(sorted(factors)), coeff)
    return out


def recenter(poly: Poly) -> Poly:
    """Rewrite E_u with |u| >= 2 in terms of central moments and means.

    Uses E_u = sum over w <= u of binom(u, w) * mean^(u-w) * G_w with
    G_0 = 1 and first-order central moments identically zero.
    """
    out: Poly = {}
    for (h, m), c in poly.items():
        expanded: Poly = {(0, ()): Fraction(1)}
        for f in m:
            if f[0] == "E" and sum(f[1]) >= 2:
                u = f[1]
                ndof = len(u) // 2
                sub: Poly = {}
                for w in _cartesian(*(range(a + 1) for a in u)):
                    order = sum(w)
                    if order == 1:
                        continue
                    coeff = Fraction(1)
                    factors: list = []
                    for i, (a, wi) in enumerate(zip(u, w)):
                        coeff *= comb(a, wi)
                        factors.extend(_mean_factor(i, ndof) for _ in range(a - wi))
                    if order >= 2:
                        factors.append(("G", w))
                    _add_term(sub, 0, tuple(sorted(factors)), coeff)
                expanded = poly_mul(expanded, sub)
            else:
                expanded = poly_mul(expanded, {(0, (f,)): Fraction(1)})
        for (hh, mm), cc in expanded.items():
            _add_term(out, h + hh, mm, cc * c)
    return out


def central_bracket(index_a: tuple, index_b: tuple) -> Poly:
    """Exact bracket of two central moments, re-centered.

    Raises if any mean-value dependence survives the cancellation; the
    result is a polynomial in ('G', w) factors and hbar^2 powers only.
    """
    raw = expectation_poly_bracket(
        central_moment_poly(index_a), central_moment_poly(index_b)
    )
    result = recenter(raw)
    for (h, m), c in result.items():
        for f in m:
            if f[0] == "E":
                raise ArithmeticError(
                    f"mean value {f[1]} survived in {{G{index_a}, G{index_b}}}: "
                    f"coefficient {c} at hbar^{h}"
                )
    return result


def second_order_bracket(index_a: tuple, index_b: tuple) -> dict:
    """{G_A, G_B} for second-order A, B as {w: Fraction} over single G_w.

    Asserts the known structure: no hbar corrections and exactly one
    second-order moment per term.
    """
    result = central_bracket(index_a, index_b)
    table: dict = {}
    for (h, m), c in result.items():
        if h != 0:
            raise ArithmeticError(
                f"hbar^{h} term in second-order bracket {{G{index_a}, G{index_b}}}"
            )
        if len(m) != 1 or m[0][0] != "G" or sum(m[0][1]) != 2:
            raise ArithmeticError(
                f"non-linear term {m} in {{G{index_a}, G{index_b}}}"
            )
        table[m[0][1]] = c
    return table


def mean_moment_bracket(coord: int, index: tuple, ndof: int) -> Poly:
    """{<z_coord>, G_A}: vanishes for every second-order A, asserted in tests."""
    mean_poly: Poly = {(0, (_mean_factor(coord, ndof),)): Fraction(1)}
    return recenter(expectation_poly_bracket(mean_poly, central_moment_poly(index)))
