"""Geometry of the positive cone of a finite-dimensional finite von Neumann
algebra, and unitarization of bounded groups through circumcenters."""

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    BlockAlgebra,
    PositiveElement,
    hermitian_eig,
    hermitian_exp,
    norm2,
    positivize,
    spectral_map,
    trace,
    uniform_norm,
)
from .circumcenter import EnclosingBall, circumcenter, karcher_mean, max_radius
from .errors import (
    BudgetExceeded,
    EmptySet,
    IllConditioned,
    MalformedElement,
    NonConvergence,
    NotHermitian,
    NotInvertible,
    NotPositive,
    OrderExceeded,
    TraceconeError,
)
from .geometry import (
    Band,
    GeodesicSegment,
    HullApproximation,
    congruence,
    distance,
    geodesic,
    geodesic_eval,
    hull_expand,
    in_band,
    midpoint,
)
from .unitarization import (
    GroupTable,
    UnitarizationCertificate,
    close_group,
    orbit_of_identity,
    unitarize,
    unitarize_group,
    verify_certificate,
)

__all__ = [
    "__version__",
    "EnclosingBall",
    "circumcenter",
    "karcher_mean",
    "max_radius",
    "AlgebraElement",
    "BlockAlgebra",
    "PositiveElement",
    "hermitian_eig",
    "hermitian_exp",
    "norm2",
    "positivize",
    "spectral_map",
    "trace",
    "uniform_norm",
    "BudgetExceeded",
    "EmptySet",
    "IllConditioned",
    "MalformedElement",
    "NonConvergence",
    "NotHermitian",
    "NotInvertible",
    "NotPositive",
    "OrderExceeded",
    "TraceconeError",
    "Band",
    "GeodesicSegment",
    "HullApproximation",
    "congruence",
    "distance",
    "geodesic",
    "geodesic_eval",
    "hull_expand",
    "in_band",
    "midpoint",
    "GroupTable",
    "UnitarizationCertificate",
    "close_group",
    "orbit_of_identity",
    "unitarize",
    "unitarize_group",
    "verify_certificate",
]
