"""Quadrature layer, checked against an independent iterated-antiderivative
oracle implemented here and nowhere else."""

import random
from fractions import Fraction as F

import pytest

from kstab.errors import ZeroMassError
from kstab.families import FamilyTag, resolve_anticanonical
from kstab.poly import Poly1, Poly2
from kstab.polytope import HalfPlane, Polygon, Segment, Triangle, polygon_from_halfplanes
from kstab.quadrature import (
    barycenter,
    integrate_monomial_simplex,
    integrate_poly1,
    integrate_poly2_polygon,
    integrate_poly2_triangle,
    moments,
)

# ---------------------------------------------------------------------------
# Iterated oracle: integrate in y between edge lines, then in x, using only
# elementary list manipulation (no kstab quadrature code).
# ---------------------------------------------------------------------------


def _integ_coeffs(coeffs, lo, hi):
    total = F(0)
    lo_pow, hi_pow = F(lo), F(hi)
    for i, c in enumerate(coeffs):
        total += c * (hi_pow - lo_pow) / (i + 1)
        lo_pow *= lo
        hi_pow *= hi
    return total


def _binom(n, k):
    out = 1
    for i in range(1, k + 1):
        out = out * (n - i + 1) // i
    return out


def _poly2_y_antiderivative(f: Poly2):
    return [(i, j + 1, c / (j + 1)) for i, j, c in f.terms]


def _substitute_y_line(terms, b0, b1):
    """Substitute y = b0 + b1*x into sparse (i, j, c) terms; dense x-coeffs out."""
    out = {}
    for i, j, c in terms:
        for m in range(j + 1):
            coeff = c * _binom(j, m) * b0 ** (j - m) * b1 ** m
            out[i + m] = out.get(i + m, F(0)) + coeff
    size = max(out) + 1 if out else 0
    dense = [F(0)] * size
    for deg, c in out.items():
        dense[deg] = c
    return dense


def iterated_polygon_integral(f: Poly2, polygon: Polygon) -> F:
    """Integral of f over a convex polygon by vertical-strip iterated integration."""
    verts = polygon.vertices
    m = len(verts)
    xs = sorted({v[0] for v in verts})
    anti = _poly2_y_antiderivative(f)
    total = F(0)
    for x_lo, x_hi in zip(xs, xs[1:]):
        x_mid = (x_lo + x_hi) / 2
        lines = []
        for idx in range(m):
            v, w = verts[idx], verts[(idx + 1) % m]
            if v[0] == w[0]:
                continue
            if min(v[0], w[0]) <= x_lo and x_hi <= max(v[0], w[0]):
                slope = (w[1] - v[1]) / (w[0] - v[0])
                intercept = v[1] - slope * v[0]
                lines.append((intercept + slope * x_mid, intercept, slope))
        assert len(lines) == 2, "convex polygon must have one lower and one upper edge per strip"
        lines.sort()
        (_, lo0, lo1), (_, hi0, hi1) = lines
        upper = _substitute_y_line(anti, hi0, hi1)
        lower = _substitute_y_line(anti, lo0, lo1)
        size = max(len(upper), len(lower))
        upper += [F(0)] * (size - len(upper))
        lower += [F(0)] * (size - len(lower))
        strip = [u - l for u, l in zip(upper, lower)]
        total += _integ_coeffs(strip, x_lo, x_hi)
    return total


# ---------------------------------------------------------------------------
# Segment integration
# ---------------------------------------------------------------------------


class TestIntegratePoly1:
    def test_constant(self):
        assert integrate_poly1(Poly1.constant(1), Segment.of(0, 1)) == 1

    def test_odd_function(self):
        assert integrate_poly1(Poly1.variable(), Segment.of(-1, 1)) == 0

    def test_centered_cubic_weight(self):
        # x (x+3)^2 (2-x) over [-1, 1]
        x = Poly1.variable()
        f = x * (x + Poly1.constant(3)) ** 2 * (Poly1.constant(2) - x)
        assert integrate_poly1(f, Segment.of(-1, 1)) == F(8, 5)

    def test_degenerate_segment(self):
        assert integrate_poly1(Poly1.from_coeffs([1, 2, 3]), Segment.of(2, 2)) == 0


# ---------------------------------------------------------------------------
# Simplex and triangle integration
# ---------------------------------------------------------------------------


class TestSimplexMoments:
    def test_area(self):
        assert integrate_monomial_simplex(0, 0) == F(1, 2)

    def test_centroid(self):
        assert integrate_monomial_simplex(1, 0) == F(1, 6)

    def test_iterated_oracle_value(self):
        # integral over the standard simplex of x^2 y^3 dy dx
        # = integral_0^1 x^2 (1-x)^4 / 4 dx = 1/420 by termwise expansion
        inner = [F(_binom(4, i) * (-1) ** i, 4) for i in range(5)]
        coeffs = [F(0)] * 2 + inner  # multiply by x^2
        assert _integ_coeffs(coeffs, 0, 1) == F(1, 420)
        assert integrate_monomial_simplex(2, 3) == F(1, 420)


class TestTriangleIntegration:
    def test_area_of_scaled_simplex(self):
        tri = Triangle.of((0, 0), (2, 0), (0, 2))
        assert integrate_poly2_triangle(Poly2.constant(1), tri) == 2

    def test_first_moment_unit_simplex(self):
        tri = Triangle.of((0, 0), (1, 0), (0, 1))
        assert integrate_poly2_triangle(Poly2.variable(0), tri) == F(1, 6)

    def test_iterated_oracle_monomial(self):
        # integral over {0<=y<=x<=1} of x^2 y^3 = 1/28 by iterated antiderivatives
        tri = Triangle.of((0, 0), (1, 0), (1, 1))
        f = Poly2.monomial(2, 3)
        assert integrate_poly2_triangle(f, tri) == F(1, 28)

    def test_matches_compose_route(self):
        # the production shortcut must agree with literal substitution plus
        # termwise simplex moments
        tri = Triangle.of((F(1, 2), -1), (3, F(1, 3)), (1, 2))
        f = Poly2.from_terms([(2, 1, F(3, 4)), (0, 3, -2), (1, 0, 5)])
        (x0, y0), (x1, y1), (x2, y2) = tri.vertices
        composed = f.compose_affine((x0, x1 - x0, x2 - x0), (y0, y1 - y0, y2 - y0))
        jac = abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))
        by_compose = jac * sum(
            (c * integrate_monomial_simplex(i, j) for i, j, c in composed.terms), F(0)
        )
        assert integrate_poly2_triangle(f, tri) == by_compose

    def test_orientation_irrelevant(self):
        f = Poly2.from_terms([(1, 1, 1), (0, 0, F(1, 3))])
        a = Triangle.of((0, 0), (2, 1), (1, 3))
        b = Triangle.of((0, 0), (1, 3), (2, 1))
        assert integrate_poly2_triangle(f, a) == integrate_poly2_triangle(f, b)


# ---------------------------------------------------------------------------
# Polygon integration
# ---------------------------------------------------------------------------


def trapezoid_domain(k: int, l: int) -> Polygon:
    return Polygon.from_vertices([(0, 0), (k, 0), (k, l), (0, k + l)])


class TestPolygonIntegration:
    def test_quadric_blowup_x_test_value(self):
        # (x - 2) x^2 y over {0 <= x <= 3, 0 <= y, x + y <= 5}
        f = (Poly2.variable(0) - Poly2.constant(2)) * Poly2.monomial(2, 1)
        domain = trapezoid_domain(3, 2)
        assert integrate_poly2_polygon(f, domain) == F(-9, 40)
        assert iterated_polygon_integral(f, domain) == F(-9, 40)

    def test_unit_square(self):
        square = Polygon.from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])
        assert integrate_poly2_polygon(Poly2.constant(1), square) == 1

    def test_exceptional_quadric_barycenter(self):
        inst = resolve_anticanonical(FamilyTag.QUAD_E, 5)
        w = inst.weight.expand()
        assert barycenter(w, inst.domain)[0] == F(6, 5)

    def test_iterated_oracle_on_family_domains(self):
        for n in range(6, 13):
            for p in range(3, n - 2):
                inst = resolve_anticanonical(FamilyTag.BLQQ, n, p)
                w = inst.weight.expand()
                f = w * Poly2.variable(0)
                assert integrate_poly2_polygon(f, inst.domain) == iterated_polygon_integral(
                    f, inst.domain
                )
        for tag in (FamilyTag.QUAD_E, FamilyTag.QUAD_PT, FamilyTag.QUAD_PM):
            for n in range(5, 13):
                inst = resolve_anticanonical(tag, n)
                w = inst.weight.expand()
                for f in (w, w * Poly2.variable(1)):
                    assert integrate_poly2_polygon(f, inst.domain) == iterated_polygon_integral(
                        f, inst.domain
                    )

    def test_additivity_under_chord(self):
        domain = trapezoid_domain(3, 2)
        chord = HalfPlane.of(1, -2, 1)
        flipped = HalfPlane.of(-1, 2, -1)
        part_one = polygon_from_halfplanes(domain.halfplanes + (chord,))
        part_two = polygon_from_halfplanes(domain.halfplanes + (flipped,))
        f = Poly2.from_terms([(2, 1, 1), (0, 2, F(-1, 3)), (1, 0, 7)])
        whole = integrate_poly2_polygon(f, domain)
        assert whole == integrate_poly2_polygon(f, part_one) + integrate_poly2_polygon(f, part_two)

    def test_scaling_covariance(self):
        lam = F(3, 2)
        domain = trapezoid_domain(2, 2)
        scaled = Polygon.from_vertices([(lam * x, lam * y) for x, y in domain.vertices])
        f = Poly2.from_terms([(2, 0, 1), (1, 1, F(1, 2)), (0, 0, -3)])
        f_pulled_back = f.compose_affine((0, lam, 0), (0, 0, lam))
        assert integrate_poly2_polygon(f, scaled) == lam ** 2 * integrate_poly2_polygon(
            f_pulled_back, domain
        )

    def test_barycenter_scaling_covariance(self):
        # homogeneous weights rescale barycenters linearly
        lam = F(5, 2)
        domain = trapezoid_domain(2, 3)
        scaled = Polygon.from_vertices([(lam * x, lam * y) for x, y in domain.vertices])
        w = Poly2.monomial(2, 1)
        bx, by = barycenter(w, domain)
        assert barycenter(w, scaled) == (lam * bx, lam * by)

    def test_random_small_cases_match_oracle(self):
        rng = random.Random(7)
        domain = resolve_anticanonical(FamilyTag.QUAD_PM, 7).domain
        for _ in range(25):
            terms = [
                (rng.randint(0, 5), rng.randint(0, 5), F(rng.randint(-9, 9), rng.randint(1, 9)))
                for _ in range(4)
            ]
            f = Poly2.from_terms(terms)
            assert integrate_poly2_polygon(f, domain) == iterated_polygon_integral(f, domain)


class TestMomentsAndBarycenter:
    def test_unit_square_centroid(self):
        square = Polygon.from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])
        assert barycenter(Poly2.constant(1), square) == (F(1, 2), F(1, 2))

    def test_positive_mass_across_families(self):
        # interior-positive factored weights must have positive mass
        instances = [resolve_anticanonical(FamilyTag.BLQQ, n, p)
                     for n in range(6, 11) for p in range(3, n - 2)]
        instances += [resolve_anticanonical(tag, n)
                      for tag in (FamilyTag.QUAD_E, FamilyTag.QUAD_PT, FamilyTag.QUAD_PM)
                      for n in range(5, 11)]
        for inst in instances:
            assert moments(inst.weight.expand(), inst.domain).mass > 0

    def test_symmetric_weight_zero_y_moment(self):
        inst = resolve_anticanonical(FamilyTag.QUAD_E, 7)
        w = inst.weight.expand()
        assert barycenter(w, inst.domain)[1] == 0

    def test_zero_mass_is_an_error(self):
        square = Polygon.from_vertices([(0, -1), (1, -1), (1, 1), (0, 1)])
        odd_weight = Poly2.variable(1)
        with pytest.raises(ZeroMassError):
            barycenter(odd_weight, square)
