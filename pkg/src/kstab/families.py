"""The three manifold families, encoded as pure data.

Each family resolves integer dimensions plus a real divisor class into the
quintuple the stability criteria consume: a rational moment domain, a
factored integration weight, a target vector, the axes on which the
barycenter must strictly exceed the target, and an ampleness verdict.

Families and their divisor coordinates:

* ``blpp``   : projective space blown up along two disjoint complementary
  linear subspaces.  Divisor = (c, d_plus, d_minus): coefficient on the
  pair of color divisors and on the two invariant boundary divisors.
  One-dimensional moment domain.
* ``blqq``   : a quadric blown up along a linear subquadric of codimension
  at least three (only the anticanonical class is exposed; no ampleness
  inequalities are known to us for general classes in this family).
* ``quade``  : a quadric blown up along the codimension-two subquadric.
  Divisor = (c, e): boundary-pair coefficient and exceptional coefficient.
* ``quadpt`` : a quadric blown up at one point.  Divisor = (c, e_plus).
* ``quadpm`` : a quadric blown up at an antipodal point pair.
  Divisor = (c, e_plus, e_minus).

Coordinate convention for the two-dimensional families: everything is
stated in doubled lattice coordinates; criteria only consume signs and
memberships, which a positive linear change of coordinates preserves.
Constant prefactors of the weights are dropped for the same reason.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import InvalidParameterError, WeightPositivityError
from .poly import AffineForm, FactoredWeight, RationalLike, _as_fraction, rational_to_str
from .polytope import HalfPlane, Polygon, Segment, polygon_from_halfplanes

Divisor = tuple[Fraction, ...]


class FamilyTag(enum.Enum):
    BLPP = "blpp"
    BLQQ = "blqq"
    QUAD_E = "quade"
    QUAD_PT = "quadpt"
    QUAD_PM = "quadpm"

    @property
    def dimension(self) -> int:
        """Dimension of the moment domain (1 for blpp, 2 otherwise)."""
        return 1 if self is FamilyTag.BLPP else 2

    @property
    def cli_name(self) -> str:
        return self.value


@dataclass(frozen=True)
class FamilyInstance:
    """A family member with its divisor resolved to criterion inputs."""

    tag: FamilyTag
    dims: tuple[int, ...]
    divisor: Divisor
    domain: Union[Segment, Polygon]
    weight: FactoredWeight
    target: tuple[Fraction, ...]
    strict_axes: tuple[int, ...]
    ample: bool

    @property
    def domain_vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        if isinstance(self.domain, Segment):
            return ((self.domain.lo,), (self.domain.hi,))
        return tuple(self.domain.vertices)


def _as_divisor(values: Sequence[RationalLike], arity: int, family: str) -> Divisor:
    if len(values) != arity:
        raise InvalidParameterError(
            f"{family} divisors take {arity} coefficients, got {len(values)}"
        )
    return tuple(_as_fraction(v) for v in values)


def _check_weight_positive(weight: FactoredWeight, vertices: Sequence[Sequence[RationalLike]]) -> None:
    """Require every affine factor to be nonnegative on the domain and not
    identically zero on it; this makes the weight positive on the interior."""
    for form, mult in weight.factors:
        if mult == 0:
            continue
        values = [form.evaluate(v) for v in vertices]
        if min(values) < 0 or max(values) <= 0:
            raise WeightPositivityError(
                f"weight factor {form} is not positive on the domain interior"
            )


# ---------------------------------------------------------------------------
# Projective space blown up along two complementary linear subspaces
# ---------------------------------------------------------------------------


def _check_blpp_dims(n: int, p: int) -> None:
    if n < 4 or not 2 <= p <= n - 2:
        raise InvalidParameterError(f"blpp requires n >= 4 and 2 <= p <= n-2, got n={n}, p={p}")


def blpp_anticanonical(n: int, p: int) -> Divisor:
    """Divisor coefficients of the anticanonical class of the blpp family."""
    _check_blpp_dims(n, p)
    half_n = Fraction(n, 2)
    return (half_n, p + 1 - half_n, half_n - p + 1)


def blpp_ample(divisor: Sequence[RationalLike]) -> bool:
    """Strict ampleness inequalities for a blpp divisor class."""
    c, d_plus, d_minus = _as_divisor(divisor, 3, "blpp")
    return d_plus < c and d_minus < c and d_plus + d_minus > 0


def blpp_resolve(n: int, p: int, divisor: Sequence[RationalLike]) -> FamilyInstance:
    """Resolve a blpp divisor class.

    The moment domain is the segment [max(-d_plus, -c), min(d_minus, c)]
    on the restricted-root line, the weight is (c - t)^(p-1) (c + t)^(n-p-1),
    and the class is ample iff d_plus < c, d_minus < c and d_plus + d_minus > 0.
    The target is meaningful only for the anticanonical class.
    """
    _check_blpp_dims(n, p)
    c, d_plus, d_minus = _as_divisor(divisor, 3, "blpp")
    segment = Segment.of(max(-d_plus, -c), min(d_minus, c))
    weight = FactoredWeight.of(
        1,
        [
            (AffineForm.of(c, -1), p - 1),
            (AffineForm.of(c, 1), n - p - 1),
        ],
    )
    _check_weight_positive(weight, [(segment.lo,), (segment.hi,)])
    ample = blpp_ample((c, d_plus, d_minus))
    return FamilyInstance(
        tag=FamilyTag.BLPP,
        dims=(n, p),
        divisor=(c, d_plus, d_minus),
        domain=segment,
        weight=weight,
        target=(Fraction(n, 2) - p,),
        strict_axes=(),
        ample=ample,
    )


# ---------------------------------------------------------------------------
# Quadric blown up along a linear subquadric (codimension >= 3)
# ---------------------------------------------------------------------------


def blqq_resolve(n: int, p: int) -> FamilyInstance:
    """Resolve the anticanonical class of the blqq family.

    With k = p - 1 and l = n - p - 1 the (doubled-coordinate) moment domain
    is {0 <= x <= k, 0 <= y, x + y <= k + l}, the weight is
    x^(k-1) y^(l-1), and the target is (k - 1, l - 1); the barycenter must
    strictly exceed the target on both axes.
    """
    if p < 3 or p > n - 3:
        raise InvalidParameterError(f"blqq requires 3 <= p <= n-3, got n={n}, p={p}")
    k, l = p - 1, n - p - 1
    domain = Polygon.from_vertices([(0, 0), (k, 0), (k, l), (0, k + l)])
    weight = FactoredWeight.of(
        1,
        [
            (AffineForm.of(0, 1, 0), k - 1),
            (AffineForm.of(0, 0, 1), l - 1),
        ],
    )
    _check_weight_positive(weight, domain.vertices)
    return FamilyInstance(
        tag=FamilyTag.BLQQ,
        dims=(n, p),
        divisor=(Fraction(n, 2) - 1, Fraction(p - 1)),
        domain=domain,
        weight=weight,
        target=(Fraction(k - 1), Fraction(l - 1)),
        strict_axes=(0, 1),
        ample=True,
    )


# ---------------------------------------------------------------------------
# Quadric blown up along the codimension-two subquadric, a point, or a pair
# ---------------------------------------------------------------------------

_QUAD_VARIANTS = (FamilyTag.QUAD_E, FamilyTag.QUAD_PT, FamilyTag.QUAD_PM)


def quad_anticanonical(variant: FamilyTag, n: int) -> Divisor:
    """Divisor coefficients of the anticanonical class of a quadric blow-up."""
    _check_quad_dims(variant, n)
    c = Fraction(n, 2) - 1
    if variant is FamilyTag.QUAD_E:
        return (c, Fraction(n - 3))
    if variant is FamilyTag.QUAD_PT:
        return (c, Fraction(1))
    return (c, Fraction(1), Fraction(1))


def _check_quad_dims(variant: FamilyTag, n: int) -> None:
    if variant not in _QUAD_VARIANTS:
        raise InvalidParameterError(f"{variant} is not a quadric blow-up variant")
    if n < 5:
        raise InvalidParameterError(f"quadric blow-ups require n >= 5, got n={n}")


def quad_resolve(variant: FamilyTag, n: int, divisor: Sequence[RationalLike]) -> FamilyInstance:
    """Resolve a quadric blow-up divisor class in doubled coordinates.

    Domains (doubled coordinates, c the boundary-pair coefficient):

    * quade :  {0 <= x <= e,            x - 2c <= y <= 2c - x}
    * quadpt:  {0 <= x, -e_plus <= y,   x - 2c <= y <= 2c - x}
    * quadpm:  quadpt with the extra ceiling y <= e_minus

    The weight is x^(n-4) and the target is (n - 4, 0): strict excess is
    required on the x axis, exact equality on the y axis.
    """
    _check_quad_dims(variant, n)
    if variant is FamilyTag.QUAD_E:
        c, e = _as_divisor(divisor, 2, "quade")
        planes = [
            HalfPlane.of(-1, 0, 0),
            HalfPlane.of(1, 0, e),
            HalfPlane.of(1, -1, 2 * c),
            HalfPlane.of(1, 1, 2 * c),
        ]
        ample = 0 < e < 2 * c
        resolved: Divisor = (c, e)
    elif variant is FamilyTag.QUAD_PT:
        c, e_plus = _as_divisor(divisor, 2, "quadpt")
        planes = [
            HalfPlane.of(-1, 0, 0),
            HalfPlane.of(0, -1, e_plus),
            HalfPlane.of(1, -1, 2 * c),
            HalfPlane.of(1, 1, 2 * c),
        ]
        ample = 0 < e_plus < 2 * c
        resolved = (c, e_plus)
    else:
        c, e_plus, e_minus = _as_divisor(divisor, 3, "quadpm")
        planes = [
            HalfPlane.of(-1, 0, 0),
            HalfPlane.of(0, -1, e_plus),
            HalfPlane.of(0, 1, e_minus),
            HalfPlane.of(1, -1, 2 * c),
            HalfPlane.of(1, 1, 2 * c),
        ]
        ample = 0 < e_plus < 2 * c and 0 < e_minus < 2 * c
        resolved = (c, e_plus, e_minus)

    domain = polygon_from_halfplanes(planes)
    weight = FactoredWeight.of(1, [(AffineForm.of(0, 1, 0), n - 4)])
    _check_weight_positive(weight, domain.vertices)
    return FamilyInstance(
        tag=variant,
        dims=(n,),
        divisor=resolved,
        domain=domain,
        weight=weight,
        target=(Fraction(n - 4), Fraction(0)),
        strict_axes=(0,),
        ample=ample,
    )


def resolve_anticanonical(tag: FamilyTag, n: int, p: int | None = None) -> FamilyInstance:
    """Resolve the anticanonical member of any family."""
    if tag is FamilyTag.BLPP:
        if p is None:
            raise InvalidParameterError("blpp requires the parameter p")
        return blpp_resolve(n, p, blpp_anticanonical(n, p))
    if tag is FamilyTag.BLQQ:
        if p is None:
            raise InvalidParameterError("blqq requires the parameter p")
        return blqq_resolve(n, p)
    return quad_resolve(tag, n, quad_anticanonical(tag, n))


def anticanonical_divisor(tag: FamilyTag, n: int, p: int | None = None) -> Divisor:
    if tag is FamilyTag.BLPP:
        if p is None:
            raise InvalidParameterError("blpp requires the parameter p")
        return blpp_anticanonical(n, p)
    if tag is FamilyTag.BLQQ:
        if p is None:
            raise InvalidParameterError("blqq requires the parameter p")
        return (Fraction(n, 2) - 1, Fraction(p - 1))
    return quad_anticanonical(tag, n)


RECORD_SCHEMA_VERSION = 1


def instance_record(inst: FamilyInstance) -> dict:
    """Serializable structured record of an instance (stable key order)."""
    if isinstance(inst.domain, Segment):
        domain: dict = {
            "type": "segment",
            "lo": rational_to_str(inst.domain.lo),
            "hi": rational_to_str(inst.domain.hi),
        }
    else:
        domain = {
            "type": "polygon",
            "vertices": [[rational_to_str(x), rational_to_str(y)] for x, y in inst.domain.vertices],
        }
    return {
        "schema_version": RECORD_SCHEMA_VERSION,
        "family": inst.tag.cli_name,
        "dims": list(inst.dims),
        "divisor": [rational_to_str(v) for v in inst.divisor],
        "domain": domain,
        "weight": {
            "prefactor": rational_to_str(inst.weight.prefactor),
            "factors": [
                {
                    "constant": rational_to_str(form.constant),
                    "linear": [rational_to_str(c) for c in form.linear],
                    "power": mult,
                }
                for form, mult in inst.weight.factors
            ],
        },
        "target": [rational_to_str(v) for v in inst.target],
        "strict_axes": list(inst.strict_axes),
        "ample": inst.ample,
    }
