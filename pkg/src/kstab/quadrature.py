"""Exact integration of polynomials over segments, triangles, and polygons.

The polygon route is uniform: fan-triangulate, affinely map each triangle
to the standard 2-simplex, push the integrand through the map, and finish
with the classical simplex moment formula

    integral over {s, t >= 0, s + t <= 1} of s^a t^b  =  a! b! / (a+b+2)!

Everything is a pure function of exact rationals; nothing here rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import ContractError, InvalidParameterError, ZeroMassError
from .poly import Poly1, Poly2, affine_power_table
from .polytope import Polygon, Segment, Triangle, triangulate


def integrate_poly1(f: Poly1, segment: Segment) -> Fraction:
    """Termwise power-rule integral of f over [lo, hi]."""
    lo, hi = segment.lo, segment.hi
    total = Fraction(0)
    lo_pow, hi_pow = lo, hi
    for i, c in enumerate(f.coeffs):
        if c != 0:
            total += c * (hi_pow - lo_pow) / (i + 1)
        lo_pow *= lo
        hi_pow *= hi
    return total


@lru_cache(maxsize=None)
def integrate_monomial_simplex(a: int, b: int) -> Fraction:
    """Integral of x^a y^b over the standard simplex {x, y >= 0, x + y <= 1}."""
    if a < 0 or b < 0:
        raise InvalidParameterError("monomial exponents must be nonnegative")
    return Fraction(factorial(a) * factorial(b), factorial(a + b + 2))


def integrate_poly2_triangle(f: Poly2, triangle: Triangle) -> Fraction:
    """Integral of f over a triangle via the simplex moment formula.

    The triangle is the image of the standard simplex under
    (s, t) -> v0 + s*(v1 - v0) + t*(v2 - v0); composing f with that map and
    integrating termwise picks up the absolute Jacobian determinant.
    """
    if f.is_zero:
        return Fraction(0)
    (x0, y0), (x1, y1), (x2, y2) = triangle.vertices
    u1, u2 = x1 - x0, x2 - x0
    w1, w2 = y1 - y0, y2 - y0
    det = u1 * w2 - u2 * w1
    if det == 0:
        raise ContractError("degenerate triangle reached integration")
    dx, dy = f.max_degrees()
    x_powers = affine_power_table(x0, u1, u2, dx)
    y_powers = affine_power_table(y0, w1, w2, dy)
    total = Fraction(0)
    for i, j, coeff in f.terms:
        term = Fraction(0)
        for (a1, b1), c1 in x_powers[i].items():
            for (a2, b2), c2 in y_powers[j].items():
                term += c1 * c2 * integrate_monomial_simplex(a1 + a2, b1 + b2)
        total += coeff * term
    return abs(det) * total


def integrate_poly2_polygon(f: Poly2, polygon: Polygon) -> Fraction:
    """Integral of f over a polygon: sum over the fan triangulation."""
    total = Fraction(0)
    for tri in triangulate(polygon):
        total += integrate_poly2_triangle(f, tri)
    return total


@dataclass(frozen=True)
class Moments2:
    """Mass and first moments of a weight over a polygon."""

    mass: Fraction
    mx: Fraction
    my: Fraction


def moments(weight: Poly2, polygon: Polygon) -> Moments2:
    """Mass and first moments (integral of w, x*w, y*w) over a polygon."""
    mass = integrate_poly2_polygon(weight, polygon)
    mx = integrate_poly2_polygon(weight * Poly2.variable(0), polygon)
    my = integrate_poly2_polygon(weight * Poly2.variable(1), polygon)
    return Moments2(mass, mx, my)


def barycenter(weight: Poly2, polygon: Polygon) -> tuple[Fraction, Fraction]:
    """Weight barycenter of a polygon; requires nonzero mass."""
    m = moments(weight, polygon)
    if m.mass == 0:
        raise ZeroMassError("weight has zero mass on this polygon")
    return (m.mx / m.mass, m.my / m.mass)


def moments1(weight: Poly1, segment: Segment) -> tuple[Fraction, Fraction]:
    """Mass and first moment of a univariate weight over a segment."""
    mass = integrate_poly1(weight, segment)
    mt = integrate_poly1(weight * Poly1.variable(), segment)
    return mass, mt


def barycenter1(weight: Poly1, segment: Segment) -> Fraction:
    """Weight barycenter of a segment; requires nonzero mass."""
    mass, mt = moments1(weight, segment)
    if mass == 0:
        raise ZeroMassError("weight has zero mass on this segment")
    return mt / mass
