"""kstab: exact-arithmetic canonical-metric existence tests for three
families of Fano manifolds.

The core pipeline is: resolve a family member and divisor class into a
rational moment domain plus a factored weight (``families``), integrate
exactly over it (``polytope``, ``quadrature``), and decide the criterion
(``criteria``).  ``verify`` re-derives every published-style claim two
independent ways, and ``cli`` exposes everything as a sweep tool.
"""

from .criteria import (
    CoupledCertificate,
    KEStatus,
    KEVerdict,
    MabuchiStatus,
    MabuchiVerdict,
    MHCertificate,
    coupled_default_endpoints,
    coupled_negative_threshold,
    coupled_residual,
    coupled_search,
    ke_classify,
    mabuchi_blpp,
    mabuchi_quadpt,
    mh_certificate,
)
from .errors import KstabError
from .families import (
    FamilyInstance,
    FamilyTag,
    blpp_anticanonical,
    blpp_resolve,
    blqq_resolve,
    instance_record,
    quad_anticanonical,
    quad_resolve,
    resolve_anticanonical,
)
from .poly import AffineForm, FactoredWeight, Poly1, Poly2, Rational, beta_int, binomial
from .polytope import (
    HalfPlane,
    Polygon,
    Segment,
    Triangle,
    contains,
    polygon_from_halfplanes,
    triangulate,
)
from .quadrature import (
    Moments2,
    barycenter,
    integrate_monomial_simplex,
    integrate_poly1,
    integrate_poly2_polygon,
    integrate_poly2_triangle,
    moments,
)
from .verify import CheckResult, verify_theorems

__version__ = "0.1.0"

__all__ = [
    "AffineForm",
    "CheckResult",
    "CoupledCertificate",
    "FactoredWeight",
    "FamilyInstance",
    "FamilyTag",
    "HalfPlane",
    "KEStatus",
    "KEVerdict",
    "KstabError",
    "MHCertificate",
    "MabuchiStatus",
    "MabuchiVerdict",
    "Moments2",
    "Poly1",
    "Poly2",
    "Polygon",
    "Rational",
    "Segment",
    "Triangle",
    "barycenter",
    "beta_int",
    "binomial",
    "blpp_anticanonical",
    "blpp_resolve",
    "blqq_resolve",
    "contains",
    "coupled_default_endpoints",
    "coupled_negative_threshold",
    "coupled_residual",
    "coupled_search",
    "instance_record",
    "integrate_monomial_simplex",
    "integrate_poly1",
    "integrate_poly2_polygon",
    "integrate_poly2_triangle",
    "ke_classify",
    "mabuchi_blpp",
    "mabuchi_quadpt",
    "mh_certificate",
    "moments",
    "polygon_from_halfplanes",
    "quad_anticanonical",
    "quad_resolve",
    "resolve_anticanonical",
    "triangulate",
    "verify_theorems",
]
