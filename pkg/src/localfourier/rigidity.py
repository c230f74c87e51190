"""Linear algebra of monodromy data and the rigidity bookkeeping.

The first half works purely with Jordan data: centralizer and fixed-space
dimensions, and the push-forward of an automorphism along a degree-p
cyclic cover (eigenvalues spread over all p-th roots, block sizes kept).
The second half assembles the global index computations over collections
of singularity data; see the fourier module for the data types.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .errors import DomainError, InternalError
from .exactfield import FieldElement, adjoin_root, zeta
from .connection import (
    ElementaryConnection,
    RegularPart,
    normalize_ramification,
)


def dim_centralizer(j: RegularPart) -> int:
    """Dimension of the algebra of matrices commuting with the automorphism.

    Blocks with distinct eigenvalues do not interact; a pair of blocks of
    sizes (a, b) sharing an eigenvalue contributes min(a, b).
    """
    total = 0
    for eig_a, size_a in j.jordan:
        for eig_b, size_b in j.jordan:
            if eig_a == eig_b:
                total += min(size_a, size_b)
    return total


def dim_fixed(j: RegularPart) -> int:
    """Dimension of the fixed space ker(T - 1): one per eigenvalue-1 block."""
    return sum(1 for eig, _ in j.jordan if eig.is_one())


def pushforward_monodromy(j: RegularPart, p: int) -> RegularPart:
    """Jordan data of the push-forward along a degree-p cyclic covering.

    Each block (eig, size) becomes p blocks (root * zeta_p^k, size) where
    root is the canonical p-th root of the eigenvalue.
    """
    if p < 1:
        raise DomainError("covering degree must be a positive integer")
    if p == 1:
        return j
    blocks = []
    for eig, size in j.jordan:
        root = adjoin_root(eig, p)
        for k in range(p):
            blocks.append((root * zeta(p, k), size))
    return RegularPart(blocks)


# --------------------------------------------------------------------------
# global bookkeeping over singularity data

from .fourier import RegularGermData, SingularityDatum  # noqa: E402
from .structure import hom  # noqa: E402


def zmin_defect(g: RegularGermData) -> int:
    """How much centralizer dimension the minimal extension removes.

    The full nearby space and its shrunken image differ in centralizer
    dimension by exactly the square of the fixed-space dimension; the
    value is returned after that equality is confirmed.
    """
    defect = dim_centralizer(g.psi) - dim_centralizer(g.phi)
    if defect != g.kappa ** 2:
        raise InternalError(
            "centralizer defect %d does not match the squared fixed-space "
            "dimension %d" % (defect, g.kappa ** 2)
        )
    return defect


def _split_points(data: Sequence[SingularityDatum]):
    """Separate finite data from the (at most one) datum at infinity."""
    finite = []
    at_inf: Optional[SingularityDatum] = None
    seen = set()
    for datum in data:
        if datum.is_infinity():
            if at_inf is not None:
                raise DomainError("two singularity data at infinity")
            at_inf = datum
        else:
            if datum.location in seen:
                raise DomainError(
                    f"duplicate singularity location {datum.location!r}"
                )
            seen.add(datum.location)
            finite.append(datum)
    return finite, at_inf


def _z_sum(datum: SingularityDatum) -> int:
    """Ramification-weighted centralizer count of one point's Jordan data.

    Every elementary piece contributes p times the centralizer dimension
    of its residual automorphism; regular parts count with weight one.
    """
    total = 0
    if datum.is_infinity():
        for el in datum.slope_gt1:
            total += el.p * dim_centralizer(el.reg)
        for _, els, reg in datum.slope_eq1:
            total += dim_centralizer(reg)
            for el in els:
                total += el.p * dim_centralizer(el.reg)
        for el in datum.slope_lt1:
            total += el.p * dim_centralizer(el.reg)
        if datum.lt1_regular is not None:
            total += dim_centralizer(datum.lt1_regular)
    else:
        for el in datum.summands:
            total += el.p * dim_centralizer(el.reg)
        if datum.germ is not None:
            total += dim_centralizer(datum.germ.psi)
    return total


def _minimal_pieces(datum: SingularityDatum) -> list:
    """Positive-rank pieces of the point, each confirmed minimal.

    Pieces not presented with a pure-power rho are reparametrized first;
    a pair that still descends through a subcover is refused, since the
    index bookkeeping reads p off the presentation.
    """
    pieces = []
    for el in datum.full_connection().summands:
        if el.rank == 0:
            continue
        if not el.is_normalized():
            el = normalize_ramification(el)
        if not el.is_minimal():
            raise DomainError(
                "refined decomposition is not minimal: a degree-%d piece "
                "descends through a subcover" % el.p
            )
        pieces.append(el)
    return pieces


def _end_irregularity(pieces) -> int:
    # irregularity of the full Hom square, pair by pair
    total = 0
    for a in pieces:
        for b in pieces:
            total += hom(a, b).irregularity
    return total


def rigidity_breakdown(data: Sequence[SingularityDatum], genus: int = 0) -> dict:
    """Per-point contributions to the rigidity index, plus totals.

    Rows carry each point's rank, End irregularity and weighted
    centralizer term; the totals block holds the Euler part and the
    final index.
    """
    if not data:
        raise DomainError("rigidity index needs at least one singular point")
    _split_points(data)
    rows = []
    rank = None
    for datum in data:
        pieces = _minimal_pieces(datum)
        point_rank = sum(el.rank for el in pieces)
        if rank is None:
            rank = point_rank
        elif point_rank != rank:
            raise DomainError(
                "rank mismatch across singular points (%d vs %d)"
                % (rank, point_rank)
            )
        rows.append(
            {
                "location": datum.location,
                "rank": point_rank,
                "end_irregularity": _end_irregularity(pieces),
                "centralizer_term": _z_sum(datum),
            }
        )
    chi_top = 2 - 2 * genus - len(data)
    euler_term = rank * rank * chi_top
    index = euler_term + sum(
        row["end_irregularity"] + row["centralizer_term"] for row in rows
    )
    return {
        "rank": rank,
        "points": len(data),
        "genus": genus,
        "chi_top": chi_top,
        "euler_term": euler_term,
        "rows": rows,
        "index": index,
    }


def rigidity_index(data: Sequence[SingularityDatum], genus: int = 0) -> int:
    """Index of rigidity of the connection described by the data.

    Sum of r^2 times the Euler characteristic of the punctured curve,
    the End irregularities, and the ramification-weighted centralizer
    dimensions at every point.  Equality of the index across a transform
    pair is meaningful for irreducible inputs; it is exercised as a
    consistency check on unramified data, not asserted in general.
    """
    return rigidity_breakdown(data, genus)["index"]


def _jordan_shape(reg: RegularPart) -> tuple:
    return tuple(sorted(size for _, size in reg.jordan))


def _low_slope_els(datum: Optional[SingularityDatum]) -> list:
    if datum is None:
        return []
    els = list(datum.slope_lt1)
    for _, entry_els, _ in datum.slope_eq1:
        els.extend(entry_els)
    return els


def _match_slopes(finite_side, infinity_side, what: str):
    """Pair finite pieces with their small-slope counterparts at infinity.

    A finite piece (p, q) must reappear at infinity with ramification
    p + q, the same pole order, and residual data of the same block
    shape and centralizer dimension.
    """
    left = sorted(
        (el.q, el.p + el.q, _jordan_shape(el.reg), dim_centralizer(el.reg))
        for el in finite_side
    )
    right = sorted(
        (el.q, el.p, _jordan_shape(el.reg), dim_centralizer(el.reg))
        for el in infinity_side
    )
    if left != right:
        raise DomainError("slope bookkeeping mismatch: " + what)


def z_zhat_discrepancy(
    data: Sequence[SingularityDatum],
    data_hat: Sequence[SingularityDatum],
) -> int:
    """Residual of the centralizer-count identity across a transform pair.

    The difference of the two weighted centralizer sums is compared with
    the combination of fixed-space squares, pole-order-weighted
    centralizer dimensions at finite points, and the (2p - q)-weighted
    terms from the steep part at infinity.  Zero on mutually consistent
    inputs; the slope bookkeeping between the two sides is checked first.
    """
    finite, at_inf = _split_points(data)
    finite_hat, at_inf_hat = _split_points(data_hat)

    _match_slopes(
        [el for datum in finite for el in datum.summands],
        _low_slope_els(at_inf_hat),
        "finite summands do not correspond to the transform's small-slope "
        "part at infinity",
    )
    _match_slopes(
        [el for datum in finite_hat for el in datum.summands],
        _low_slope_els(at_inf),
        "the transform's finite summands do not correspond to the "
        "small-slope part at infinity",
    )
    gt1 = list(at_inf.slope_gt1) if at_inf is not None else []
    gt1_hat = list(at_inf_hat.slope_gt1) if at_inf_hat is not None else []
    left = sorted(
        (el.q, el.q - el.p, _jordan_shape(el.reg), dim_centralizer(el.reg))
        for el in gt1
    )
    right = sorted(
        (el.q, el.p, _jordan_shape(el.reg), dim_centralizer(el.reg))
        for el in gt1_hat
    )
    if left != right:
        raise DomainError(
            "slope bookkeeping mismatch: the steep parts at infinity do not "
            "correspond under p + p' = q"
        )

    lhs = sum(_z_sum(d) for d in data) - sum(_z_sum(d) for d in data_hat)

    def bracket(points):
        total = 0
        for datum in points:
            kappa = datum.germ.kappa if datum.germ is not None else 0
            total += kappa * kappa
            for el in datum.summands:
                total -= el.q * dim_centralizer(el.reg)
        return total

    rhs = bracket(finite) - bracket(finite_hat)
    for el in gt1:
        rhs += (2 * el.p - el.q) * dim_centralizer(el.reg)
    return lhs - rhs
