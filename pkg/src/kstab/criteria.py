"""Decision procedures for canonical-metric existence, plus closed-form
cross-checks for every integral they rely on.

All verdicts are decided on exact rationals and carry their witnesses, so a
report line can be re-verified independently of this code.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    ContractError,
    InvalidParameterError,
    NoBracketError,
    NotAmpleError,
    NotAnticanonicalError,
)
from .families import (
    Divisor,
    FamilyInstance,
    FamilyTag,
    anticanonical_divisor,
    blpp_ample,
    blpp_resolve,
    resolve_anticanonical,
)
from .poly import AffineForm, FactoredWeight, Poly1, Poly2, RationalLike, _as_fraction, binomial
from .polytope import Segment
from .quadrature import barycenter, barycenter1, integrate_poly1, integrate_poly2_polygon, moments


# ---------------------------------------------------------------------------
# Kähler-Einstein classification
# ---------------------------------------------------------------------------


class KEStatus(enum.Enum):
    KAHLER_EINSTEIN = "kahler-einstein"
    NOT_K_SEMISTABLE = "not-k-semistable"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class KEVerdict:
    status: KEStatus
    xi: tuple[Fraction, ...]


def classify_offset(xi: Sequence[Fraction], strict_axes: Sequence[int]) -> KEStatus:
    """Classify a barycenter offset against the required cone.

    Axes listed in ``strict_axes`` must be strictly positive; every other
    axis must vanish exactly.  A strict axis that is exactly zero (with
    nothing negative and all equality axes clean) is the undecided boundary
    case, reported as such rather than overclaimed either way.
    """
    strict = set(strict_axes)
    for i, value in enumerate(xi):
        if i not in strict and value != 0:
            return KEStatus.NOT_K_SEMISTABLE
    if any(xi[i] < 0 for i in strict):
        return KEStatus.NOT_K_SEMISTABLE
    if all(xi[i] > 0 for i in strict):
        return KEStatus.KAHLER_EINSTEIN
    return KEStatus.BOUNDARY


def instance_barycenter(inst: FamilyInstance) -> tuple[Fraction, ...]:
    """Weight barycenter of an instance domain, as a 1- or 2-vector."""
    expanded = inst.weight.expand()
    if isinstance(inst.domain, Segment):
        assert isinstance(expanded, Poly1)
        return (barycenter1(expanded, inst.domain),)
    assert isinstance(expanded, Poly2)
    return barycenter(expanded, inst.domain)


def ke_classify(inst: FamilyInstance) -> KEVerdict:
    """Kähler-Einstein / K-semistability verdict for an anticanonical instance."""
    if not inst.ample:
        raise NotAmpleError(f"{inst.tag.cli_name}{inst.dims}: divisor is not ample")
    if inst.divisor != anticanonical_divisor(inst.tag, *inst.dims):
        raise NotAnticanonicalError(
            f"{inst.tag.cli_name}{inst.dims}: classification needs the anticanonical divisor"
        )
    bary = instance_barycenter(inst)
    xi = tuple(b - t for b, t in zip(bary, inst.target))
    return KEVerdict(classify_offset(xi, inst.strict_axes), xi)


# ---------------------------------------------------------------------------
# Blown-up projective space: exact moment integral and closed form
# ---------------------------------------------------------------------------


def _check_blpp(n: int, p: int) -> None:
    if not 2 <= p <= n - 2:
        raise InvalidParameterError(f"need 2 <= p <= n-2, got n={n}, p={p}")


def blpp_moment(n: int, p: int) -> Fraction:
    """Exact first moment of the anticanonical blpp weight about its target.

    This is the integral over the moment segment of (t - target) times the
    weight; its sign decides K-stability and its vanishing characterizes
    the Kähler-Einstein members.
    """
    inst = resolve_anticanonical(FamilyTag.BLPP, n, p)
    w = inst.weight.expand()
    assert isinstance(w, Poly1)
    shifted = w * (Poly1.variable() - Poly1.constant(inst.target[0]))
    return integrate_poly1(shifted, inst.domain)


def blpp_moment_closed(n: int, p: int) -> Fraction:
    """Closed form of blpp_moment from the explicit antiderivative."""
    _check_blpp(n, p)
    q = n - p
    return Fraction(-((p - 1) ** p * (q + 1) ** q - (p + 1) ** p * (q - 1) ** q), n)


def blpp_moment_sign(n: int, p: int) -> int:
    """Sign (-1, 0, +1) of the blpp stability moment, via the exact integral."""
    value = blpp_moment(n, p)
    return (value > 0) - (value < 0)


# ---------------------------------------------------------------------------
# Blown-up quadric (codimension >= 3 center): moments and closed forms
# ---------------------------------------------------------------------------


def _blqq_instance(k: int, l: int) -> FamilyInstance:
    if k < 2 or l < 2:
        raise InvalidParameterError(f"need k, l >= 2, got k={k}, l={l}")
    return resolve_anticanonical(FamilyTag.BLQQ, k + l + 2, k + 1)


def blqq_x_moment(k: int, l: int) -> Fraction:
    """Exact integral of (x - (k-1)) x^(k-1) y^(l-1) over the blqq domain."""
    inst = _blqq_instance(k, l)
    w = inst.weight.expand()
    assert isinstance(w, Poly2)
    f = w * (Poly2.variable(0) - Poly2.constant(k - 1))
    return integrate_poly2_polygon(f, inst.domain)


def blqq_y_moment(k: int, l: int) -> Fraction:
    """Exact integral of (y - (l-1)) x^(k-1) y^(l-1) over the blqq domain."""
    inst = _blqq_instance(k, l)
    w = inst.weight.expand()
    assert isinstance(w, Poly2)
    f = w * (Poly2.variable(1) - Poly2.constant(l - 1))
    return integrate_poly2_polygon(f, inst.domain)


def blqq_x_moment_closed(k: int, l: int) -> Fraction:
    """Closed form of blqq_x_moment via a beta-function expansion.

    Summand j carries the factor (j(1-k) + 1), so for k >= 3 every summand
    past the first is negative; that structure drives the instability half
    of the classification.
    """
    if k < 2 or l < 2:
        raise InvalidParameterError(f"need k, l >= 2, got k={k}, l={l}")
    total = Fraction(0)
    for j in range(l + 1):
        total += (
            binomial(l, j)
            * Fraction(l ** (l - j), k ** (l - j + 1))
            * Fraction(math.factorial(k - 1) * math.factorial(j), math.factorial(k + j + 1))
            * (j * (1 - k) + 1)
        )
    return Fraction(k ** (k + l + 1), l) * total


def blqq_x_moment_closed_k2(l: int) -> Fraction:
    """Closed form of blqq_x_moment(2, l) from the direct antiderivative."""
    if l < 2:
        raise InvalidParameterError(f"need l >= 2, got l={l}")
    return Fraction((l + 2) ** (l + 2) - (7 * l + 12) * l ** (l + 1), l * (l + 2) * (l + 3))


def blqq_y_moment_closed_k2(l: int) -> Fraction:
    """Closed form of blqq_y_moment(2, l) from the direct antiderivative."""
    if l < 2:
        raise InvalidParameterError(f"need l >= 2, got l={l}")
    return Fraction(
        3 * (l + 2) ** (l + 2) + l ** (l + 1) * (4 * l * l - l - 12),
        l * (l + 1) * (l + 2) * (l + 3),
    )


# ---------------------------------------------------------------------------
# Quadric blow-ups: closed forms for the barycenter tests
# ---------------------------------------------------------------------------


def quad_e_x_barycenter(n: int) -> Fraction:
    """Exact x-barycenter of the anticanonical quade instance."""
    inst = resolve_anticanonical(FamilyTag.QUAD_E, n)
    w = inst.weight.expand()
    assert isinstance(w, Poly2)
    m = moments(w, inst.domain)
    return m.mx / m.mass


def quad_e_x_barycenter_closed(n: int) -> Fraction:
    """Closed form of the quade anticanonical x-barycenter."""
    if n < 5:
        raise InvalidParameterError(f"need n >= 5, got n={n}")
    return Fraction(2 * (n - 3) ** 2 * (n - 2), (n - 1) * (2 * n - 5))


def quad_pt_margin(n: int) -> Fraction:
    """Exact decision quantity of the quadpt test: second y-moment minus
    (n-2) times the first, integrated against the weight."""
    inst = resolve_anticanonical(FamilyTag.QUAD_PT, n)
    w = inst.weight.expand()
    assert isinstance(w, Poly2)
    y = Poly2.variable(1)
    f = w * y * (y - Poly2.constant(n - 2))
    return integrate_poly2_polygon(f, inst.domain)


def quad_pt_margin_closed(n: int) -> int:
    """Integer closed form proportional to quad_pt_margin.

    Exactly (n-3)(n-1)n times the exact margin; only the shared sign
    matters to the verdict.
    """
    if n < 5:
        raise InvalidParameterError(f"need n >= 5, got n={n}")
    return 4 * (n - 2) ** (n - 1) - (n - 3) ** (n - 2) * (2 * n * n + n - 9)


# ---------------------------------------------------------------------------
# Mabuchi tests
# ---------------------------------------------------------------------------


class MabuchiStatus(enum.Enum):
    EXISTS = "exists"
    NOT_EXISTS = "not-exists"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class MabuchiVerdict:
    status: MabuchiStatus
    ratio: Fraction | None
    detail: tuple[tuple[str, Fraction], ...]


def blpp_centered_weight(n: int, p: int) -> Poly1:
    """Anticanonical blpp weight recentered so the moment segment is [-1, 1].

    Obtained from the resolved instance by the affine substitution
    t -> x + target, the same change of variable that symmetrizes the
    moment integral.
    """
    inst = resolve_anticanonical(FamilyTag.BLPP, n, p)
    w = inst.weight.expand()
    assert isinstance(w, Poly1)
    return w.compose_affine(1, inst.target[0])


def mabuchi_blpp(n: int, p: int) -> MabuchiVerdict:
    """Mabuchi-metric test for the blpp family.

    With the recentered weight w on [-1, 1], compare the second and first
    moments: no Mabuchi metric exists iff their ratio lies in the closed
    interval [-1, 1].  A vanishing first moment is the Kähler-Einstein
    case, where the trivial datum already gives a Mabuchi metric.
    """
    _check_blpp(n, p)
    w = blpp_centered_weight(n, p)
    box = Segment.of(-1, 1)
    first = integrate_poly1(w * Poly1.variable(), box)
    second = integrate_poly1(w * Poly1.variable() * Poly1.variable(), box)
    detail = (("first_moment", first), ("second_moment", second))
    if first == 0:
        return MabuchiVerdict(MabuchiStatus.EXISTS, None, detail)
    ratio = second / first
    if -1 <= ratio <= 1:
        return MabuchiVerdict(MabuchiStatus.NOT_EXISTS, ratio, detail)
    return MabuchiVerdict(MabuchiStatus.EXISTS, ratio, detail)


def mabuchi_quadpt(n: int) -> MabuchiVerdict:
    """Mabuchi-metric test for the quadric blown up at a point.

    In doubled coordinates the test compares the second and first y-moments
    of the weight over the anticanonical domain; no Mabuchi metric exists
    iff the ratio lies in [-1, n-2].  Outside that interval the single
    moment condition checked here does not decide existence, so the verdict
    is inconclusive.
    """
    if n < 5:
        raise InvalidParameterError(f"need n >= 5, got n={n}")
    inst = resolve_anticanonical(FamilyTag.QUAD_PT, n)
    w = inst.weight.expand()
    assert isinstance(w, Poly2)
    y = Poly2.variable(1)
    first = integrate_poly2_polygon(w * y, inst.domain)
    second = integrate_poly2_polygon(w * y * y, inst.domain)
    if first <= 0:
        raise ContractError(f"quadpt first y-moment should be positive, got {first}")
    ratio = second / first
    detail = (("first_moment", first), ("second_moment", second))
    if -1 <= ratio <= n - 2:
        return MabuchiVerdict(MabuchiStatus.NOT_EXISTS, ratio, detail)
    return MabuchiVerdict(MabuchiStatus.INCONCLUSIVE, ratio, detail)


# ---------------------------------------------------------------------------
# Multiplier-Hermitian certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MHCertificate:
    """Witness that a concave log-polynomial multiplier exists.

    ``weight_of_h`` is the reflected weight whose logarithm is the concave
    function; its affine factors are strictly positive on [-1, 1] (minima
    recorded in ``concavity_witness``), and the twisted first moment
    vanishes exactly.
    """

    weight_of_h: FactoredWeight
    moment_integral: Fraction
    concavity_witness: tuple[Fraction, ...]


def mh_certificate(n: int, p: int) -> MHCertificate:
    """Produce the reflection certificate for the blpp family.

    The recentered weight w on [-1, 1] has strictly positive affine
    factors; taking the multiplier to be w(-t) makes t * w(-t) * w(t) odd,
    so the twisted moment vanishes identically and the logarithm of w(-t)
    is smooth and concave (a sum of logarithms of positive affine forms).
    """
    _check_blpp(n, p)
    q = n - p
    reflected = FactoredWeight.of(
        1,
        [
            (AffineForm.of(p, 1), p - 1),
            (AffineForm.of(q, -1), q - 1),
        ],
    )
    box = Segment.of(-1, 1)
    minima = reflected.factor_minima([(box.lo,), (box.hi,)])
    if any(m <= 0 for m in minima):
        raise ContractError(f"multiplier factor not positive on [-1, 1] for n={n}, p={p}")
    w = blpp_centered_weight(n, p)
    reflected_poly = reflected.expand()
    assert isinstance(reflected_poly, Poly1)
    integrand = Poly1.variable() * reflected_poly * w
    moment = integrate_poly1(integrand, box)
    if moment != 0:
        raise ContractError(f"multiplier moment must vanish, got {moment} for n={n}, p={p}")
    return MHCertificate(reflected, moment, minima)


# ---------------------------------------------------------------------------
# Coupled Kähler-Einstein residual and bracketing search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoupledCertificate:
    """Exact sign-change bracket for the coupled residual along a segment."""

    params_lo: Divisor
    params_hi: Divisor
    residual_lo: Fraction
    residual_hi: Fraction
    midpoint: Divisor
    residual_at_midpoint: Fraction
    width: Fraction


def _check_coupled_k(k: int) -> None:
    if k < 2:
        raise InvalidParameterError(f"need k >= 2, got k={k}")


def coupled_complement(k: int, divisor: Sequence[RationalLike]) -> Divisor:
    """The divisor completing the given one to the anticanonical class."""
    _check_coupled_k(k)
    c, d_plus, d_minus = (_as_fraction(v) for v in divisor)
    return (k + Fraction(1, 2) - c, Fraction(1, 2) - d_plus, Fraction(3, 2) - d_minus)


def coupled_pair_ample(k: int, divisor: Sequence[RationalLike]) -> bool:
    """True iff the divisor and its anticanonical complement are both ample."""
    _check_coupled_k(k)
    return blpp_ample(divisor) and blpp_ample(coupled_complement(k, divisor))


def coupled_residual(k: int, divisor: Sequence[RationalLike]) -> Fraction:
    """Barycenter residual of an anticanonical decomposition.

    For the odd-dimensional family member (dims n = 2k+1, p = k), the sum
    of the two weight barycenters of a divisor and its complement must be
    exactly 1/2 for a coupled pair to exist; this returns the exact excess.
    """
    _check_coupled_k(k)
    n, p = 2 * k + 1, k
    first = blpp_resolve(n, p, divisor)
    second = blpp_resolve(n, p, coupled_complement(k, divisor))
    total = Fraction(0)
    for inst in (first, second):
        w = inst.weight.expand()
        assert isinstance(w, Poly1)
        total += barycenter1(w, inst.domain)
    return total - Fraction(1, 2)


def coupled_default_endpoints(k: int) -> tuple[Divisor, Divisor]:
    """Default search segment: the self-complementary half of the
    anticanonical class, and the far ample corner used to force a negative
    residual."""
    _check_coupled_k(k)
    n = 2 * k + 1
    start = (Fraction(n, 4), Fraction(1, 4), Fraction(3, 4))
    end = (Fraction(k - 2), Fraction(1, 2), Fraction(0))
    return start, end


def coupled_negative_threshold(max_k: int = 40) -> int:
    """Smallest k whose default far endpoint has a strictly negative
    residual, discovered by exact sweep."""
    for k in range(3, max_k + 1):
        _, end = coupled_default_endpoints(k)
        if coupled_pair_ample(k, end) and coupled_residual(k, end) < 0:
            return k
    raise ContractError(f"no negative residual endpoint found for k <= {max_k}")


_MID_OFFSETS = (Fraction(1, 2), Fraction(5, 8), Fraction(3, 8), Fraction(9, 16), Fraction(7, 16))


def coupled_search(
    k: int,
    start: Sequence[RationalLike],
    end: Sequence[RationalLike],
    max_bisections: int,
) -> CoupledCertificate:
    """Bisect the residual sign change along the segment start -> end.

    Requires strictly opposite residual signs at the endpoints and an
    ample pair at both (the ample region is an intersection of open linear
    conditions, hence convex, so the whole segment is then ample; this is
    still re-asserted at every evaluated point).  Bisection runs until the
    bracket width, in units of the segment parameter, is at most
    2^(-max_bisections).
    """
    _check_coupled_k(k)
    if max_bisections < 0:
        raise InvalidParameterError("max_bisections must be nonnegative")
    start_d = tuple(_as_fraction(v) for v in start)
    end_d = tuple(_as_fraction(v) for v in end)

    def params_at(s: Fraction) -> Divisor:
        return tuple(a + s * (b - a) for a, b in zip(start_d, end_d))

    def residual_at(s: Fraction) -> Fraction:
        d = params_at(s)
        if not coupled_pair_ample(k, d):
            raise ContractError(f"segment leaves the ample region at parameter {s}")
        return coupled_residual(k, d)

    lo, hi = Fraction(0), Fraction(1)
    r_lo, r_hi = residual_at(lo), residual_at(hi)
    if r_lo == 0 or r_hi == 0 or (r_lo > 0) == (r_hi > 0):
        raise NoBracketError(
            f"endpoint residuals {r_lo} and {r_hi} do not have strictly opposite signs"
        )
    tolerance = Fraction(1, 2 ** max_bisections)
    while hi - lo > tolerance:
        r_mid = Fraction(0)
        mid = lo
        for offset in _MID_OFFSETS:
            mid = lo + (hi - lo) * offset
            r_mid = residual_at(mid)
            if r_mid != 0:
                break
        else:
            raise ContractError("residual vanished at every probed split point")
        if (r_mid > 0) == (r_lo > 0):
            lo, r_lo = mid, r_mid
        else:
            hi, r_hi = mid, r_mid
    if (r_lo > 0) == (r_hi > 0):
        raise ContractError("bisection lost the sign change")
    mid = (lo + hi) / 2
    return CoupledCertificate(
        params_lo=params_at(lo),
        params_hi=params_at(hi),
        residual_lo=r_lo,
        residual_hi=r_hi,
        midpoint=params_at(mid),
        residual_at_midpoint=residual_at(mid),
        width=hi - lo,
    )
