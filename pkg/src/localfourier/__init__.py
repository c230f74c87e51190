"""Exact local Fourier-Laplace transforms of formal meromorphic connections."""

from .connection import (
    ElementaryConnection,
    FormalConnection,
    Invariants,
    RegularPart,
    canonicalize,
    elementary,
    invariants,
    is_isomorphic,
    normalize_ramification,
    pullback_decompose,
    reduce_minimal,
    regular_connection,
    rotate_exponential,
)
from .dsl import (
    ParsedDocument,
    connection_schema,
    parse,
    parse_scalar_text,
    print_canonical,
    relabel_variable,
    render_connection,
    render_document,
)
from .errors import (
    DomainError,
    FieldError,
    InternalError,
    LocalFourierError,
    ParseError,
    PrecisionError,
    TowerDepthError,
)
from .exactfield import FieldElement, adjoin_root, exp2pi, rational, zeta
from .fourier import (
    INFINITY,
    RegularGermData,
    SingularityDatum,
    TransformedConnection,
    fourier_0_inf,
    fourier_inf_0,
    fourier_inf_inf,
    fourier_regular,
    fourier_s_inf,
    stationary_phase_at_infinity,
)
from .oracle import WeylOperator, oracle_check
from .rigidity import (
    dim_centralizer,
    dim_fixed,
    pushforward_monodromy,
    rigidity_breakdown,
    rigidity_index,
    z_zhat_discrepancy,
    zmin_defect,
)
from .series import LaurentSeries
from .structure import (
    determinant,
    determinant_of_sum,
    dual,
    end_regular_part,
    hom,
    jordan_tensor,
    pullback_regular,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "ElementaryConnection",
    "FieldElement",
    "FieldError",
    "FormalConnection",
    "INFINITY",
    "InternalError",
    "Invariants",
    "LaurentSeries",
    "LocalFourierError",
    "ParseError",
    "ParsedDocument",
    "PrecisionError",
    "RegularGermData",
    "RegularPart",
    "SingularityDatum",
    "TowerDepthError",
    "TransformedConnection",
    "WeylOperator",
    "adjoin_root",
    "canonicalize",
    "connection_schema",
    "determinant",
    "determinant_of_sum",
    "dim_centralizer",
    "dim_fixed",
    "dual",
    "elementary",
    "end_regular_part",
    "exp2pi",
    "fourier_0_inf",
    "fourier_inf_0",
    "fourier_inf_inf",
    "fourier_regular",
    "fourier_s_inf",
    "hom",
    "invariants",
    "is_isomorphic",
    "jordan_tensor",
    "normalize_ramification",
    "oracle_check",
    "parse",
    "parse_scalar_text",
    "print_canonical",
    "pullback_decompose",
    "pullback_regular",
    "pushforward_monodromy",
    "rational",
    "reduce_minimal",
    "regular_connection",
    "relabel_variable",
    "render_connection",
    "render_document",
    "rigidity_breakdown",
    "rigidity_index",
    "rotate_exponential",
    "stationary_phase_at_infinity",
    "tensor",
    "z_zhat_discrepancy",
    "zeta",
    "zmin_defect",
]
