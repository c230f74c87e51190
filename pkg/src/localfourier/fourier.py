"""Local Laplace transforms of elementary connections, and their assembly.

Each transform kind rewrites El(rho, phi, R) by explicit substitution
formulas; the new ramification map is a ratio of Laurent polynomials, so
it is kept both as an exact fraction (for downstream recomputation at
higher precision) and as a truncated expansion (for normal forms).

Sign convention: the "minus" transform is the one whose kernel pairs t
against -t/theta; on the standard one-term family it sends
El(u, a u^-q, triv) to El(-u^(q+1)/(qa), (q+1) a u^-q, [((-1)^q : 1)]),
and that example pins every sign in this module.  The "plus" transform
is the composite with u -> -u on the input side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .connection import (
    ElementaryConnection,
    FormalConnection,
    RegularPart,
    canonicalize,
    regular_connection,
)
from .errors import DomainError
from .exactfield import FieldElement, rational
from .series import LaurentSeries, working_window

THETA = "theta"
TVAR = "t"


def _sign(sign) -> int:
    if sign in ("+", "plus", 1):
        return 1
    if sign in ("-", "minus", -1):
        return -1
    raise DomainError(f"sign must be plus or minus, got {sign!r}")


def _is_one_series(f: LaurentSeries) -> bool:
    return f.is_exact() and len(f.coeffs) == 1 and 0 in f.coeffs and f.coeffs[0].is_one()


@dataclass(frozen=True)
class RationalMap:
    """A ratio num/den of Laurent polynomials, expandable on demand."""

    num: LaurentSeries
    den: LaurentSeries

    def valuation(self) -> int:
        return self.num.valuation() - self.den.valuation()

    def expand(self, window: Optional[int] = None) -> LaurentSeries:
        """Power-series expansion; exact whenever den is a monomial."""
        return self.num * self.den.inverse(window=window)

    def derivative(self) -> "RationalMap":
        if _is_one_series(self.den):
            return RationalMap(self.num.derivative(), self.den)
        n, d = self.num, self.den
        return RationalMap(n.derivative() * d - n * d.derivative(), d * d)

    def reciprocal(self) -> "RationalMap":
        if self.num.is_exactly_zero():
            raise DomainError("reciprocal of the zero map")
        return RationalMap(self.den, self.num)

    def __neg__(self) -> "RationalMap":
        return RationalMap(-self.num, self.den)

    def __mul__(self, other: "RationalMap") -> "RationalMap":
        return RationalMap(self.num * other.num, self.den * other.den)

    def mul_series(self, f: LaurentSeries) -> "RationalMap":
        return RationalMap(self.num * f, self.den)

    def div_series(self, f: LaurentSeries) -> "RationalMap":
        if f.is_exactly_zero():
            raise DomainError("division by the zero series")
        return RationalMap(self.num, self.den * f)

    def scale(self, c) -> "RationalMap":
        return RationalMap(self.num.scale(c), self.den)


class TransformedConnection(ElementaryConnection):
    """An elementary connection whose rho remembers its exact fraction.

    Structurally equal to the plain class; the extra slot only feeds
    later transforms and provenance output, never comparisons.
    """

    __slots__ = ("rho_source",)

    def __init__(self, rho, phi, reg, rho_source: Optional[RationalMap] = None):
        super().__init__(rho, phi, reg)
        self.rho_source = rho_source


def _rho_map(el: ElementaryConnection) -> RationalMap:
    src = getattr(el, "rho_source", None)
    if src is not None:
        return src
    return RationalMap(el.rho, LaurentSeries.one(el.rho.var))


def _monodromy_twist(reg: RegularPart, q: int) -> RegularPart:
    # tensoring with the rank-one local system of monodromy (-1)^q
    if q % 2 == 0:
        return reg
    return reg.tensor_scalar(rational(-1))


def fourier_0_inf(
    el: ElementaryConnection, sign="-", window: Optional[int] = None
) -> TransformedConnection:
    """Transform of an irregular germ at the origin, viewed at infinity.

    rho_hat = -sign * rho'/phi', phi_hat = phi - (rho/rho') phi', and the
    regular part picks up the monodromy twist (-1)^q.  The pole order is
    preserved while the ramification degree grows to p + q.
    """
    sgn = _sign(sign)
    if el.q == 0:
        raise DomainError(
            "the transform of a regular germ is not elementary; use fourier_regular"
        )
    rho = _rho_map(el)
    dphi = el.phi.derivative()
    drho = rho.derivative()
    rho_hat = drho.div_series(dphi)
    if sgn > 0:
        rho_hat = -rho_hat
    p_hat, q_hat = el.p + el.q, el.q
    w = working_window(p_hat, q_hat) if window is None else window
    corr = (rho * drho.reciprocal()).mul_series(dphi)
    phi_hat = (el.phi - corr.expand(window=w)).principal_part()
    return TransformedConnection(
        rho_hat.expand(window=w).with_var(THETA),
        phi_hat.with_var(THETA),
        _monodromy_twist(el.reg, el.q),
        rho_source=rho_hat,
    )


def fourier_inf_0(
    el: ElementaryConnection, sign="+", window: Optional[int] = None
) -> TransformedConnection:
    """Inverse direction: a germ at infinity of slope < 1, brought to a point.

    rho_hat = sign * rho^2 phi'/rho', phi_hat = phi + (rho/rho') phi';
    the ramification degree drops to p - q.
    """
    sgn = _sign(sign)
    if el.q == 0:
        raise DomainError(
            "a regular germ at infinity is invisible to the finite-point transform"
        )
    if el.q >= el.p:
        raise DomainError("this transform kind needs slope < 1")
    sigma = _rho_map(el)
    dpsi = el.phi.derivative()
    dsigma = sigma.derivative()
    rho_hat = ((sigma * sigma).mul_series(dpsi)) * dsigma.reciprocal()
    if sgn < 0:
        rho_hat = -rho_hat
    p_hat = el.p - el.q
    w = working_window(p_hat, el.q) if window is None else window
    corr = (sigma * dsigma.reciprocal()).mul_series(dpsi)
    phi_hat = (el.phi + corr.expand(window=w)).principal_part()
    return TransformedConnection(
        rho_hat.expand(window=w).with_var(TVAR),
        phi_hat.with_var(TVAR),
        _monodromy_twist(el.reg, el.q),
        rho_source=rho_hat,
    )


def fourier_inf_inf(
    el: ElementaryConnection, sign="+", window: Optional[int] = None
) -> TransformedConnection:
    """Transform of a germ at infinity of slope > 1, staying at infinity.

    rho_hat = sign * rho'/(phi' rho^2), phi_hat = phi + (rho/rho') phi';
    the ramification degree becomes q - p.
    """
    sgn = _sign(sign)
    if el.q <= el.p:
        raise DomainError("this transform kind needs slope > 1")
    rho = _rho_map(el)
    dphi = el.phi.derivative()
    drho = rho.derivative()
    rho_hat = drho * ((rho * rho).mul_series(dphi)).reciprocal()
    if sgn < 0:
        rho_hat = -rho_hat
    p_hat, q_hat = el.q - el.p, el.q
    w = working_window(p_hat, q_hat) if window is None else window
    corr = (rho * drho.reciprocal()).mul_series(dphi)
    phi_hat = (el.phi + corr.expand(window=w)).principal_part()
    return TransformedConnection(
        rho_hat.expand(window=w).with_var(THETA),
        phi_hat.with_var(THETA),
        _monodromy_twist(el.reg, el.q),
        rho_source=rho_hat,
    )


# ---------------------------------------------------------------- germs


@dataclass(frozen=True)
class RegularGermData:
    """A regular germ at a point: nearby-cycle space with automorphism.

    psi holds the full space; phi is the image of T - Id with its induced
    automorphism (eigenvalue-1 blocks shrink by one, size-1 ones vanish),
    and kappa counts the lost dimensions.
    """

    psi: RegularPart

    @property
    def kappa(self) -> int:
        return sum(1 for eig, _ in self.psi.jordan if eig.is_one())

    @property
    def phi(self) -> RegularPart:
        out = []
        for eig, size in self.psi.jordan:
            if eig.is_one():
                if size > 1:
                    out.append((eig, size - 1))
            else:
                out.append((eig, size))
        return RegularPart(out)


def fourier_regular(g: RegularGermData, minimal_extension: bool = True) -> RegularPart:
    """Regular part of the transform of a regular germ.

    In minimal-extension mode the unipotent part loses one dimension per
    eigenvalue-1 block; for a plain connection the space is untouched.
    """
    return g.phi if minimal_extension else g.psi


def fourier_s_inf(
    obj: Union[ElementaryConnection, RegularGermData],
    s,
    sign="-",
    window: Optional[int] = None,
    minimal_extension: bool = True,
) -> ElementaryConnection:
    """Transform of a germ at the finite point s, viewed at infinity.

    Twists the origin transform by the rank-one exponential with linear
    coefficient sign * s; any s != 0 forces slope exactly one.  A regular
    germ of trivial transform yields a rank-zero connection.
    """
    sgn = _sign(sign)
    s = FieldElement.from_any(s)
    if isinstance(obj, RegularGermData):
        reg = fourier_regular(obj, minimal_extension=minimal_extension)
        coeff = s if sgn > 0 else -s
        phi = LaurentSeries({-1: coeff}, var=THETA)
        return TransformedConnection(
            LaurentSeries.identity(THETA),
            phi,
            reg,
            rho_source=RationalMap(
                LaurentSeries.identity(THETA), LaurentSeries.one(THETA)
            ),
        )
    base = fourier_0_inf(obj, sign, window=window)
    if s.is_zero():
        return base
    w = working_window(base.p, base.p) if window is None else window
    shift = base.rho_source.reciprocal().scale(s if sgn > 0 else -s)
    phi = base.phi + shift.expand(window=w).principal_part().with_var(THETA)
    return TransformedConnection(base.rho, phi, base.reg, rho_source=base.rho_source)


# ------------------------------------------------------------- assembly


class _InfinityType:
    """Sentinel for the point at infinity on the source line."""

    __slots__ = ()

    def __repr__(self):
        return "infinity"


INFINITY = _InfinityType()


class SingularityDatum:
    """Formal data of one singular point of a connection on the line.

    A finite point carries irregular elementary summands plus a regular
    germ.  The point at infinity instead carries its summands split by
    slope: above one, exactly one (as pairs of a linear coefficient with
    residual data), and below one with a separate regular part.
    """

    __slots__ = (
        "location",
        "summands",
        "germ",
        "slope_gt1",
        "slope_eq1",
        "slope_lt1",
        "lt1_regular",
    )

    def __init__(
        self,
        location,
        summands: Iterable[ElementaryConnection] = (),
        germ: Optional[RegularGermData] = None,
        slope_gt1: Iterable[ElementaryConnection] = (),
        slope_eq1: Iterable = (),
        slope_lt1: Iterable[ElementaryConnection] = (),
        lt1_regular: Optional[RegularPart] = None,
    ):
        at_inf = location is INFINITY
        self.location = location if at_inf else FieldElement.from_any(location)
        self.summands = tuple(summands)
        self.germ = germ
        self.slope_gt1 = tuple(slope_gt1)
        self.slope_eq1 = tuple(
            (FieldElement.from_any(shat), tuple(els), reg if reg is not None else RegularPart())
            for shat, els, reg in slope_eq1
        )
        self.slope_lt1 = tuple(slope_lt1)
        self.lt1_regular = lt1_regular
        if at_inf:
            if self.summands or self.germ is not None:
                raise DomainError("finite-point fields are not allowed at infinity")
            for el in self.slope_gt1:
                if el.slope <= 1:
                    raise DomainError(
                        f"slope split at infinity is inconsistent: slope {el.slope} in the >1 part"
                    )
            for shat, els, _ in self.slope_eq1:
                if shat.is_zero():
                    raise DomainError("slope-one entries need a nonzero linear coefficient")
                for el in els:
                    if el.slope >= 1:
                        raise DomainError(
                            "residual data of a slope-one entry must have slope < 1"
                        )
            for el in self.slope_lt1:
                if not 0 < el.slope < 1:
                    raise DomainError(
                        f"slope split at infinity is inconsistent: slope {el.slope} in the <1 part"
                    )
        else:
            if self.slope_gt1 or self.slope_eq1 or self.slope_lt1 or self.lt1_regular:
                raise DomainError("slope-split fields apply only at infinity")
            for el in self.summands:
                if el.q == 0:
                    raise DomainError(
                        "regular data at a finite point belongs in the germ field"
                    )

    def is_infinity(self) -> bool:
        return self.location is INFINITY

    def full_connection(self) -> FormalConnection:
        """Everything at this point as one direct sum (germ included)."""
        pieces = []
        if self.is_infinity():
            pieces.extend(self.slope_gt1)
            for shat, els, reg in self.slope_eq1:
                for el in els:
                    twist = _rho_map(el).reciprocal().scale(shat)
                    w = working_window(el.p, el.p)
                    pieces.append(
                        ElementaryConnection(
                            el.rho,
                            el.phi + twist.expand(window=w).principal_part(),
                            el.reg,
                        )
                    )
                if reg.rank:
                    pieces.append(
                        ElementaryConnection(
                            LaurentSeries.identity(), LaurentSeries({-1: shat}), reg
                        )
                    )
            pieces.extend(self.slope_lt1)
            if self.lt1_regular is not None and self.lt1_regular.rank:
                pieces.append(regular_connection(self.lt1_regular))
        else:
            pieces.extend(self.summands)
            if self.germ is not None and self.germ.psi.rank:
                pieces.append(regular_connection(self.germ.psi))
        return FormalConnection(pieces)

    def __repr__(self):
        where = "infinity" if self.is_infinity() else repr(self.location)
        return f"SingularityDatum({where})"


class AssemblyResult(FormalConnection):
    """Canonical germ at infinity of the transform, with assembly metadata."""

    __slots__ = ("minimal_extension",)

    def __init__(self, summands=(), minimal_extension: bool = True):
        super().__init__(summands)
        self.minimal_extension = minimal_extension


def stationary_phase_at_infinity(
    data: Sequence[SingularityDatum],
    sign="-",
    minimal_extension: bool = True,
    window: Optional[int] = None,
) -> AssemblyResult:
    """Germ at infinity of the transform, assembled point by point.

    Every finite singularity contributes through fourier_s_inf; the part
    of slope > 1 at infinity contributes through fourier_inf_inf; nothing
    else reaches infinity on the transformed side.  The input is assumed
    equal to its minimal extension (flag echoed, never verified).
    """
    seen = set()
    seen_inf = False
    pieces = []
    for datum in data:
        if datum.is_infinity():
            if seen_inf:
                raise DomainError("two singularity data at infinity")
            seen_inf = True
            for el in datum.slope_gt1:
                pieces.append(fourier_inf_inf(el, sign, window=window))
        else:
            if datum.location in seen:
                raise DomainError(f"duplicate singularity location {datum.location!r}")
            seen.add(datum.location)
            for el in datum.summands:
                pieces.append(fourier_s_inf(el, datum.location, sign, window=window))
            if datum.germ is not None:
                tr = fourier_s_inf(
                    datum.germ,
                    datum.location,
                    sign,
                    minimal_extension=minimal_extension,
                )
                if tr.rank:
                    pieces.append(tr)
    out = canonicalize(FormalConnection(pieces))
    return AssemblyResult(out.summands, minimal_extension=minimal_extension)
