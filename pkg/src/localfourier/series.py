"""Formal Laurent series with explicit precision tracking.

A series is a finite table of exact coefficients plus a precision marker.
``prec=None`` means the table is the whole series (exact); ``prec=P`` means
every coefficient of u^k with k < P is known and nothing is claimed beyond.
Operations propagate precision pessimistically, so a result is either exact
or carries an honest bound; consumers that need completed data (for example
extraction of a polar part) raise PrecisionError instead of guessing.

Operations that turn an exact input into a genuinely infinite expansion
(inverse of a non-monomial, fractional roots, reversion) truncate at a
working window.  The window is chosen by the caller through the ``window``
argument or globally through set_window_override; see working_window.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf
from typing import Iterable, Optional, Union

from .errors import DomainError, PrecisionError
from .exactfield import ONE, ZERO, FieldElement, adjoin_root, rational

Scalar = Union[FieldElement, int, Fraction]

_WINDOW_OVERRIDE: Optional[int] = None


def set_window_override(n: Optional[int]) -> None:
    """Force every working window to n coefficients (None restores defaults)."""
    global _WINDOW_OVERRIDE
    if n is not None and n < 4:
        raise DomainError("working window must be at least 4 coefficients")
    _WINDOW_OVERRIDE = n


def working_window(p: int, q: int) -> int:
    """Relative coefficient budget for computations at ramification p, pole q."""
    if _WINDOW_OVERRIDE is not None:
        return _WINDOW_OVERRIDE
    return max(2 * (p + q) + 8, 16)


def _resolve_window(window: Optional[int]) -> int:
    if window is not None:
        return window
    return working_window(0, 0)


class LaurentSeries:
    """A Laurent series in one variable over the exact scalar field."""

    __slots__ = ("coeffs", "prec", "var")

    def __init__(
        self,
        coeffs: dict[int, Scalar],
        prec: Optional[int] = None,
        var: str = "u",
    ):
        table: dict[int, FieldElement] = {}
        for k, v in coeffs.items():
            fe = FieldElement.from_any(v) if not isinstance(v, FieldElement) else v
            if fe.is_zero():
                continue
            if prec is not None and k >= prec:
                continue
            table[k] = fe
        self.coeffs = table
        self.prec = prec
        self.var = var

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(var: str = "u") -> "LaurentSeries":
        return LaurentSeries({}, None, var)

    @staticmethod
    def one(var: str = "u") -> "LaurentSeries":
        return LaurentSeries({0: ONE}, None, var)

    @staticmethod
    def monomial(exp: int, coeff: Scalar = 1, var: str = "u") -> "LaurentSeries":
        return LaurentSeries({exp: FieldElement.from_any(coeff) if not isinstance(coeff, FieldElement) else coeff}, None, var)

    @staticmethod
    def identity(var: str = "u") -> "LaurentSeries":
        return LaurentSeries({1: ONE}, None, var)

    # -- predicates and access ---------------------------------------------

    def is_exactly_zero(self) -> bool:
        return not self.coeffs and self.prec is None

    def is_zero_to_precision(self) -> bool:
        """No nonzero coefficient in the known range (weaker than exact zero)."""
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.prec is None

    def valuation(self) -> int:
        if self.coeffs:
            return min(self.coeffs)
        if self.prec is None:
            raise DomainError("the zero series has no valuation")
        raise PrecisionError(
            f"series is zero to O({self.var}^{self.prec}); valuation unknown"
        )

    def _val_bound(self) -> Union[int, float]:
        # a sound lower bound for the valuation, usable on any series
        if self.coeffs:
            return min(self.coeffs)
        return inf if self.prec is None else self.prec

    def coefficient(self, k: int) -> FieldElement:
        if self.prec is not None and k >= self.prec:
            raise PrecisionError(
                f"coefficient of {self.var}^{k} lies beyond O({self.var}^{self.prec})"
            )
        return self.coeffs.get(k, ZERO)

    def leading_coefficient(self) -> FieldElement:
        return self.coeffs[self.valuation()]

    def items(self) -> tuple[tuple[int, FieldElement], ...]:
        return tuple(sorted(self.coeffs.items()))

    def degree_known(self) -> Optional[int]:
        # largest stored exponent, None for a zero table
        return max(self.coeffs) if self.coeffs else None

    # -- structural helpers ------------------------------------------------

    def truncate(self, prec: int) -> "LaurentSeries":
        new_prec = prec if self.prec is None else min(self.prec, prec)
        return LaurentSeries(self.coeffs, new_prec, self.var)

    def with_var(self, var: str) -> "LaurentSeries":
        return LaurentSeries(self.coeffs, self.prec, var)

    def shift(self, n: int) -> "LaurentSeries":
        """Multiply by var^n."""
        return LaurentSeries(
            {k + n: v for k, v in self.coeffs.items()},
            None if self.prec is None else self.prec + n,
            self.var,
        )

    def scale(self, c: Scalar) -> "LaurentSeries":
        fe = c if isinstance(c, FieldElement) else FieldElement.from_any(c)
        if fe.is_zero():
            return LaurentSeries.zero(self.var)
        return LaurentSeries(
            {k: v * fe for k, v in self.coeffs.items()}, self.prec, self.var
        )

    def principal_part(self) -> "LaurentSeries":
        """The strictly negative-exponent tail, certified complete.

        Requires the series to be known at least through exponent -1.
        """
        if self.prec is not None and self.prec < 0:
            raise PrecisionError(
                f"polar part not determined: series only known to O({self.var}^{self.prec})"
            )
        return LaurentSeries(
            {k: v for k, v in self.coeffs.items() if k < 0}, None, self.var
        )

    def regular_part(self) -> "LaurentSeries":
        return LaurentSeries(
            {k: v for k, v in self.coeffs.items() if k >= 0}, self.prec, self.var
        )

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.coeffs == other.coeffs and self.prec == other.prec

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def agrees_to_precision(self, other: "LaurentSeries") -> bool:
        """Equal on every exponent both sides know (full equality when exact)."""
        if self.prec is None and other.prec is None:
            return self.coeffs == other.coeffs
        bound = min(
            self.prec if self.prec is not None else inf,
            other.prec if other.prec is not None else inf,
        )
        exps = {k for k in self.coeffs if k < bound} | {
            k for k in other.coeffs if k < bound
        }
        return all(self.coeffs.get(k, ZERO) == other.coeffs.get(k, ZERO) for k in exps)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other, self.var)
        prec = _min_prec(self.prec, other.prec)
        table = dict(self.coeffs)
        for k, v in other.coeffs.items():
            table[k] = table[k] + v if k in table else v
        return LaurentSeries(table, prec, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({k: -v for k, v in self.coeffs.items()}, self.prec, self.var)

    def __sub__(self, other):
        return self + (-_coerce(other, self.var))

    def __rsub__(self, other):
        return _coerce(other, self.var) + (-self)

    def __mul__(self, other):
        other = _coerce(other, self.var)
        if self.is_exactly_zero() or other.is_exactly_zero():
            return LaurentSeries.zero(self.var)
        prec: Optional[Union[int, float]]
        if self.prec is None and other.prec is None:
            prec = None
        else:
            va, vb = self._val_bound(), other._val_bound()
            pa = self.prec if self.prec is not None else inf
            pb = other.prec if other.prec is not None else inf
            prec = min(va + pb, vb + pa)
            if prec == inf:
                prec = None
        table: dict[int, FieldElement] = {}
        for ka, va_ in self.coeffs.items():
            for kb, vb_ in other.coeffs.items():
                k = ka + kb
                if prec is not None and k >= prec:
                    continue
                prod = va_ * vb_
                table[k] = table[k] + prod if k in table else prod
        return LaurentSeries(table, None if prec is None else int(prec), self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _coerce(other, self.var).inverse()

    def __rtruediv__(self, other):
        return _coerce(other, self.var) * self.inverse()

    def __pow__(self, n: int, window: Optional[int] = None):
        if not isinstance(n, int):
            raise DomainError("series powers must be integers")
        if n < 0:
            return self.inverse(window=window) ** (-n)
        out = LaurentSeries.one(self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derivative(self) -> "LaurentSeries":
        table = {
            k - 1: v * Fraction(k) for k, v in self.coeffs.items() if k != 0
        }
        prec = None if self.prec is None else self.prec - 1
        return LaurentSeries(table, prec, self.var)

    # -- the exact-to-infinite operations ----------------------------------

    def inverse(self, window: Optional[int] = None) -> "LaurentSeries":
        """The multiplicative inverse 1/f.

        Exact monomials invert exactly; anything else is expanded, with the
        relative precision of an inexact input preserved and an exact input
        truncated at the working window.
        """
        if self.is_exactly_zero():
            raise DomainError("division by the zero series")
        v = self.valuation()
        c = self.coeffs[v]
        lead_inv = LaurentSeries.monomial(-v, ONE / c, self.var)
        if len(self.coeffs) == 1 and self.prec is None:
            return lead_inv
        # f = c u^v (1 + h); invert the unit part as a geometric series
        h = self.shift(-v).scale(ONE / c) - LaurentSeries.one(self.var)
        if self.prec is not None:
            rel = self.prec - v
        else:
            rel = _resolve_window(window)
            h = h.truncate(rel)
        geom = LaurentSeries.one(self.var)
        power = LaurentSeries.one(self.var)
        hv = h._val_bound()
        k = 1
        while k * hv < rel:
            power = (power * h).truncate(rel)
            if power.is_zero_to_precision() and power.prec is None:
                break
            geom = geom + (power if k % 2 == 0 else -power)
            k += 1
        geom = geom.truncate(rel)
        return lead_inv * geom

    def nth_root(self, m: int, window: Optional[int] = None) -> "LaurentSeries":
        """The canonical m-th root; valuation must be divisible by m."""
        if m < 1:
            raise DomainError("root order must be a positive integer")
        if self.is_exactly_zero():
            raise DomainError("the zero series has no root")
        v = self.valuation()
        if v % m:
            raise DomainError(
                f"valuation {v} is not divisible by {m}; root leaves the variable"
            )
        c = self.coeffs[v]
        root_lead = LaurentSeries.monomial(v // m, adjoin_root(c, m), self.var)
        if len(self.coeffs) == 1 and self.prec is None:
            return root_lead
        h = self.shift(-v).scale(ONE / c) - LaurentSeries.one(self.var)
        if self.prec is not None:
            rel = self.prec - v
        else:
            rel = _resolve_window(window)
            h = h.truncate(rel)
        # binomial series (1 + h)^(1/m)
        out = LaurentSeries.one(self.var)
        power = LaurentSeries.one(self.var)
        coef = Fraction(1)
        hv = h._val_bound()
        k = 1
        while k * hv < rel:
            coef = coef * (Fraction(1, m) - (k - 1)) / k
            power = (power * h).truncate(rel)
            if power.is_zero_to_precision() and power.prec is None:
                break
            out = out + power.scale(coef)
            k += 1
        out = out.truncate(rel)
        return root_lead * out

    def compose(self, g: "LaurentSeries", window: Optional[int] = None) -> "LaurentSeries":
        """f(g(u)) for g of strictly positive valuation."""
        if g.is_exactly_zero() or g._val_bound() < 1:
            raise DomainError("composition requires a series of valuation >= 1")
        if self.is_exactly_zero():
            return LaurentSeries.zero(g.var)
        out = LaurentSeries.zero(g.var)
        ginv = None
        exps = sorted(self.coeffs)
        for k in exps:
            if k < 0 and ginv is None:
                ginv = g.inverse(window=window)
            base = (ginv ** (-k)) if k < 0 else (g ** k)
            out = out + base.scale(self.coeffs[k])
        if self.prec is not None:
            # the unknown tail of f starts contributing at g-valuation times prec
            gv = g._val_bound()
            if gv is not inf:
                out = out.truncate(int(self.prec * gv))
        return out

    def reversion(self, window: Optional[int] = None) -> "LaurentSeries":
        """The compositional inverse of a series of valuation exactly 1."""
        if self.is_zero_to_precision() or self.valuation() != 1:
            raise DomainError("reversion requires valuation exactly 1")
        a1 = self.coeffs[1]
        target = self.prec if self.prec is not None else 1 + _resolve_window(window)
        fpoly = LaurentSeries(self.coeffs, None, self.var)
        dpoly = fpoly.derivative()
        u = LaurentSeries.identity(self.var)
        g = LaurentSeries.monomial(1, ONE / a1, self.var)
        if len(self.coeffs) == 1:
            return g if self.prec is None else g.truncate(target)
        cur = 2
        while cur < target:
            cur = min(2 * cur, target)
            err = _compose_bounded(fpoly, g, cur + 1) - u
            den = _compose_bounded(dpoly, g, cur)
            step = err * den.inverse(window=cur)
            g = LaurentSeries(
                {k: v for k, v in (g - step).coeffs.items() if k < cur},
                None,
                self.var,
            )
        return LaurentSeries(g.coeffs, target, self.var)

    # -- display -----------------------------------------------------------

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(
                f"({v!r})*{self.var}^{k}" for k, v in sorted(self.coeffs.items())
            )
        tail = "" if self.prec is None else f" + O({self.var}^{self.prec})"
        return f"<series {body}{tail}>"


def _coerce(x, var: str) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, (int, Fraction, FieldElement)):
        fe = x if isinstance(x, FieldElement) else FieldElement.from_any(x)
        if fe.is_zero():
            return LaurentSeries.zero(var)
        return LaurentSeries({0: fe}, None, var)
    raise DomainError(f"cannot treat {type(x).__name__} as a series")


def _min_prec(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _compose_bounded(f: "LaurentSeries", g: "LaurentSeries", bound: int) -> "LaurentSeries":
    # Horner evaluation of the polynomial f (exponents >= 0) at g, mod u^bound.
    # Keeps every intermediate product short; only reversion needs this.
    out = LaurentSeries.zero(g.var)
    for e in range(max(f.coeffs, default=0), -1, -1):
        out = (out * g).truncate(bound)
        c = f.coeffs.get(e)
        if c is not None:
            out = out + LaurentSeries({0: c}, None, g.var)
    return out
