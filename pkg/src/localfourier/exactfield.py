"""Exact scalar arithmetic in cyclotomic fields with optional radicals.

Scalars live in Q(zeta_N); N grows on demand when values from different
orders meet, so the caller never manages field embeddings by hand.  On top
of the cyclotomic layer an element may carry radical factors x with
x^m = gamma.  Radicals are kept in multiplicative normal form:

* positive rationals factor prime-wise, so root(2,2)*root(8,2) reduces to 4
  without any special casing;
* a root of unity zeta_N^k gets the canonical m-th root zeta_{mN}^k (N taken
  minimal, k reduced mod N);
* only a gamma that is not a root of unity times a rational receives an
  opaque generator, and repeated requests reuse the same generator.

Equality is decidable within one tower of such generators; nesting depth is
capped at MAX_TOWER_DEPTH.  All arithmetic is exact; nothing here touches
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from .errors import DomainError, FieldError, InternalError, TowerDepthError

MAX_TOWER_DEPTH = 2

_ZERO = Fraction(0)
_ONE = Fraction(1)


# --------------------------------------------------------------------------
# small number theory helpers

def _factorize(n: int) -> dict[int, int]:
    # trial division; arguments here are tiny (cyclotomic orders, numerators)
    if n <= 0:
        raise InternalError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def _euler_phi(n: int) -> int:
    total = 1
    for p, e in _factorize(n).items():
        total *= (p - 1) * p ** (e - 1)
    return total


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return tuple(out)


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


def _reduce_unit(n: int, k: int) -> tuple[int, int]:
    # zeta_n^k written with n equal to the actual order of the unit
    from math import gcd

    k %= n
    g = gcd(k, n) if k else n
    return n // g, k // g


# --------------------------------------------------------------------------
# dense polynomial helpers over Fraction, used only for cyclotomic reduction

def _poly_trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return _poly_trim(out)


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    # b must be nonzero; returns (quotient, remainder)
    a = list(a)
    b = _poly_trim(list(b))
    if not b:
        raise InternalError("polynomial division by zero")
    q = [_ZERO] * max(0, len(a) - len(b) + 1)
    inv = 1 / b[-1]
    while len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        coef = a[-1] * inv
        q[shift] = coef
        for i, bi in enumerate(b):
            a[shift + i] -= coef * bi
        a.pop()
    return _poly_trim(q), _poly_trim(a)


@lru_cache(maxsize=None)
def _cyclotomic_poly(n: int) -> tuple[Fraction, ...]:
    # Phi_n via (x^n - 1) / prod_{d | n, d < n} Phi_d
    num = [_ZERO] * (n + 1)
    num[0], num[n] = Fraction(-1), _ONE
    den: list[Fraction] = [_ONE]
    for d in _divisors(n)[:-1]:
        den = _poly_mul(den, list(_cyclotomic_poly(d)))
    q, r = _poly_divmod(num, den)
    if r:
        raise InternalError("cyclotomic polynomial division left a remainder")
    return tuple(q)


# --------------------------------------------------------------------------
# the cyclotomic layer: polynomials in zeta_n reduced mod Phi_n

class _Cyc:
    """A value of Q(zeta_n), stored as reduced coordinates of length phi(n)."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, c: tuple[Fraction, ...]):
        self.n = n
        self.c = c

    @staticmethod
    def from_rational(x: Fraction) -> "_Cyc":
        return _Cyc(1, (x,)) if x else _CYC_ZERO

    @staticmethod
    def from_powers(n: int, powers: dict[int, Fraction]) -> "_Cyc":
        # dict exponent -> coefficient, exponents arbitrary integers
        dense = [_ZERO] * n
        for k, v in powers.items():
            dense[k % n] += v
        return _Cyc(n, _cyc_reduce(n, dense))

    def is_zero(self) -> bool:
        return not any(self.c)


def _cyc_reduce(n: int, dense: list[Fraction]) -> tuple[Fraction, ...]:
    phi = _euler_phi(n)
    _, r = _poly_divmod(dense, list(_cyclotomic_poly(n)))
    r = r + [_ZERO] * (phi - len(r))
    return tuple(r[:phi])


_CYC_ZERO = _Cyc(1, (_ZERO,))
_CYC_ONE = _Cyc(1, (_ONE,))


def _cyc_lift(a: _Cyc, n: int) -> _Cyc:
    # re-express in Q(zeta_n); a.n must divide n
    if a.n == n:
        return a
    if n % a.n:
        raise InternalError("lift target order must be a multiple")
    step = n // a.n
    powers = {i * step: v for i, v in enumerate(a.c) if v}
    return _Cyc.from_powers(n, powers)


def _cyc_pair(a: _Cyc, b: _Cyc) -> tuple[_Cyc, _Cyc, int]:
    n = _lcm(a.n, b.n)
    return _cyc_lift(a, n), _cyc_lift(b, n), n


def _cyc_add(a: _Cyc, b: _Cyc) -> _Cyc:
    a, b, n = _cyc_pair(a, b)
    return _Cyc(n, tuple(x + y for x, y in zip(a.c, b.c)))


def _cyc_neg(a: _Cyc) -> _Cyc:
    return _Cyc(a.n, tuple(-x for x in a.c))


def _cyc_mul(a: _Cyc, b: _Cyc) -> _Cyc:
    if a.is_zero() or b.is_zero():
        return _CYC_ZERO
    a, b, n = _cyc_pair(a, b)
    prod = _poly_mul(list(a.c), list(b.c))
    return _Cyc(n, _cyc_reduce(n, prod + [_ZERO] * max(0, n - len(prod))))


def _cyc_scale(a: _Cyc, r: Fraction) -> _Cyc:
    if not r or a.is_zero():
        return _CYC_ZERO
    return _Cyc(a.n, tuple(x * r for x in a.c))


def _cyc_inv(a: _Cyc) -> _Cyc:
    if a.is_zero():
        raise DomainError("division by zero in the coefficient field")
    # extended Euclid in Q[x] against Phi_n
    r0, r1 = list(_cyclotomic_poly(a.n)), _poly_trim(list(a.c))
    s0, s1 = [], [_ONE]
    while _poly_trim(list(r1)):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        qs = _poly_mul(q, s1)
        news = [x - y for x, y in zip(s0 + [_ZERO] * len(qs), qs + [_ZERO] * len(s0))]
        s0, s1 = s1, _poly_trim(news)
    if len(r0) != 1:
        raise InternalError("cyclotomic polynomial not coprime with element")
    inv_lead = 1 / r0[0]
    dense = [x * inv_lead for x in s0]
    return _Cyc(a.n, _cyc_reduce(a.n, dense + [_ZERO] * max(0, a.n - len(dense))))


def _cyc_eq(a: _Cyc, b: _Cyc) -> bool:
    a, b, _ = _cyc_pair(a, b)
    return a.c == b.c


def _solve_linear(matrix: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    # exact Gaussian elimination; returns one solution of M x = rhs or None
    rows, cols = len(matrix), len(matrix[0]) if matrix else 0
    m = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [v - f * w for v, w in zip(m[i], m[r])]
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if m[i][cols]:
            return None
    x = [_ZERO] * cols
    for pr, pc in pivots:
        x[pc] = m[pr][cols]
    return x


@lru_cache(maxsize=None)
def _subfield_basis(n: int, d: int) -> tuple[tuple[Fraction, ...], ...]:
    # coordinates in Q(zeta_n) of the basis zeta_d^j, j < phi(d)
    out = []
    for j in range(_euler_phi(d)):
        out.append(_cyc_lift(_Cyc.from_powers(d, {j: _ONE}), n).c)
    return tuple(out)


def _cyc_contract(a: _Cyc) -> _Cyc:
    # minimal d | n with a in Q(zeta_d); unique coordinates there
    if a.is_zero():
        return _CYC_ZERO
    d, c = _cyc_contract_cached(a.n, a.c)
    return _Cyc(d, c)


@lru_cache(maxsize=None)
def _cyc_contract_cached(n: int, coords: tuple[Fraction, ...]) -> tuple[int, tuple[Fraction, ...]]:
    for d in _divisors(n):
        basis = _subfield_basis(n, d)
        matrix = [[basis[j][i] for j in range(len(basis))] for i in range(len(coords))]
        sol = _solve_linear(matrix, list(coords))
        if sol is not None:
            return d, tuple(sol)
    raise InternalError("contraction failed to find the ambient field")


# --------------------------------------------------------------------------
# radical generators

class _OpaqueGen:
    """A generator x with x^m interpreted as a stored non-monomial gamma."""

    __slots__ = ("serial", "gamma", "level")

    def __init__(self, serial: int, gamma: "FieldElement", level: int):
        self.serial = serial
        self.gamma = gamma
        self.level = level


_OPAQUE_REGISTRY: dict[tuple, _OpaqueGen] = {}
_OPAQUE_SERIAL = [0]

# a monomial maps generator keys to exponents in (0, 1);
# generator key: ('p', prime) for the prime radical p^e, ('x', serial) for opaque
_Monomial = frozenset

_TRIVIAL_MONO: _Monomial = frozenset()


def _gen_level(key) -> int:
    if key[0] == "p":
        return 1
    return _OPAQUE_REGISTRY_BY_SERIAL[key[1]].level


_OPAQUE_REGISTRY_BY_SERIAL: dict[int, _OpaqueGen] = {}


class FieldElement:
    """An exact scalar: cyclotomic combination of radical monomials."""

    __slots__ = ("_terms", "_key_cache")

    def __init__(self, terms: dict[_Monomial, _Cyc]):
        self._terms = {m: c for m, c in terms.items() if not c.is_zero()}
        self._key_cache = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_any(x: Union["FieldElement", int, Fraction]) -> "FieldElement":
        if isinstance(x, FieldElement):
            return x
        if isinstance(x, (int, Fraction)):
            return FieldElement({_TRIVIAL_MONO: _Cyc.from_rational(Fraction(x))})
        raise DomainError(f"cannot coerce {type(x).__name__} into the scalar field")

    # -- predicates and views ---------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self == ONE

    def is_rational(self) -> bool:
        return self.as_rational() is not None

    def as_rational(self) -> Optional[Fraction]:
        if not self._terms:
            return _ZERO
        if set(self._terms) != {_TRIVIAL_MONO}:
            return None
        c = _cyc_contract(self._terms[_TRIVIAL_MONO])
        return c.c[0] if c.n == 1 else None

    def has_radicals(self) -> bool:
        return any(m for m in self._terms)

    def cyclotomic_order(self) -> int:
        """Minimal N with every cyclotomic coefficient inside Q(zeta_N)."""
        n = 1
        for c in self._terms.values():
            n = _lcm(n, _cyc_contract(c).n)
        return n

    def tower_level(self) -> int:
        level = 0
        for m in self._terms:
            for key, _ in m:
                level = max(level, _gen_level(key))
        return level

    def as_zeta_monomial(self) -> Optional[tuple[Fraction, int, int]]:
        """Express as r * zeta_n^k with r a positive rational, n minimal.

        Returns None when the value has radical factors or is not of that
        multiplicative shape.  Zero has no such form.
        """
        if self.is_zero() or self.has_radicals():
            return None
        c = _cyc_contract(self._terms[_TRIVIAL_MONO])
        n = c.n
        for k in range(n):
            cand = _cyc_mul(c, _Cyc.from_powers(n, {(n - k) % n: _ONE}))
            cand = _cyc_contract(cand)
            if cand.n == 1:
                r = cand.c[0]
                if r > 0:
                    return (r,) + _reduce_unit(n, k)
                # fold the sign into the root of unity
                n2 = _lcm(n, 2)
                return (-r,) + _reduce_unit(n2, k * (n2 // n) + n2 // 2)
        return None

    def radical_parts(self):
        """Iterate (monomial factors, cyclotomic coefficient) for printing.

        Factors come as (kind, payload, exponent) with kind 'p' (payload a
        prime) or 'x' (payload the defining gamma as a FieldElement).
        """
        for mono in sorted(self._terms, key=_mono_key):
            factors = []
            for key, e in sorted(mono, key=lambda it: it[0]):
                if key[0] == "p":
                    factors.append(("p", key[1], e))
                else:
                    gen = _OPAQUE_REGISTRY_BY_SERIAL[key[1]]
                    factors.append(("x", gen.gamma, e))
            yield factors, _cyc_contract(self._terms[mono])

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = FieldElement.from_any(other)
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = _cyc_add(terms[m], c) if m in terms else c
        return FieldElement(terms)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement({m: _cyc_neg(c) for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-FieldElement.from_any(other))

    def __rsub__(self, other):
        return FieldElement.from_any(other) + (-self)

    def __mul__(self, other):
        other = FieldElement.from_any(other)
        if (
            set(self._terms) <= {_TRIVIAL_MONO}
            and set(other._terms) <= {_TRIVIAL_MONO}
        ):
            if not self._terms or not other._terms:
                return ZERO
            c = _cyc_mul(self._terms[_TRIVIAL_MONO], other._terms[_TRIVIAL_MONO])
            return FieldElement({_TRIVIAL_MONO: c})
        out = FieldElement({})
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                out = out + _mul_monomials(m1, c1, m2, c2)
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * FieldElement.from_any(other)._invert()

    def __rtruediv__(self, other):
        return FieldElement.from_any(other) * self._invert()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise DomainError("only integer powers of scalars are defined")
        if n < 0:
            return self._invert() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            other = FieldElement.from_any(other)
        except DomainError:
            return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash(self.sort_key())

    def __repr__(self):
        rat = self.as_rational()
        if rat is not None:
            return f"FieldElement({rat})"
        return f"FieldElement<{self.sort_key()}>"

    def _invert(self) -> "FieldElement":
        if self.is_zero():
            raise DomainError("division by zero scalar")
        if len(self._terms) == 1:
            [(mono, cyc)] = self._terms.items()
            inv_extra = ONE
            new_mono = {}
            for key, e in mono:
                # g^-e = g^(1-e) / g^1; the overflow divides out as gamma
                if key[0] == "p":
                    inv_extra = inv_extra * Fraction(1, key[1])
                else:
                    gen = _OPAQUE_REGISTRY_BY_SERIAL[key[1]]
                    inv_extra = inv_extra * gen.gamma._invert()
                rem = 1 - e
                if rem:
                    new_mono[key] = rem
            base = FieldElement({frozenset(new_mono.items()): _cyc_inv(cyc)})
            return base * inv_extra
        if not self.has_radicals():
            return FieldElement({_TRIVIAL_MONO: _cyc_inv(self._terms[_TRIVIAL_MONO])})
        return self._invert_radical_sum()

    def _invert_radical_sum(self) -> "FieldElement":
        if self.tower_level() >= 2:
            raise FieldError("cannot invert sums involving depth-2 radical generators")
        # span: the multiplicative closure of the exponent vectors present
        basis: list[_Monomial] = [_TRIVIAL_MONO]
        seen = {_TRIVIAL_MONO}
        gens = [m for m in self._terms]
        frontier = [_TRIVIAL_MONO]
        while frontier:
            nxt = []
            for mono in frontier:
                for g in gens:
                    prod = _mono_mul_vec(mono, g)
                    if prod not in seen:
                        seen.add(prod)
                        nxt.append(prod)
                        basis.append(prod)
                        if len(basis) > 256:
                            raise FieldError("radical tower too large to invert a sum")
            frontier = nxt
        index = {m: i for i, m in enumerate(basis)}
        size = len(basis)
        # matrix of multiplication by self on the span, entries in Q(zeta)
        cols: list[dict[int, _Cyc]] = []
        for mono in basis:
            col: dict[int, _Cyc] = {}
            unit = FieldElement({mono: _CYC_ONE})
            prod = self * unit
            for m2, c2 in prod._terms.items():
                if m2 not in index:
                    raise InternalError("span not closed under multiplication")
                col[index[m2]] = c2
            cols.append(col)
        # solve sum_j x_j * col_j = e_identity by elimination over Q(zeta)
        mat = [[cols[j].get(i, _CYC_ZERO) for j in range(size)] for i in range(size)]
        rhs = [_CYC_ONE if basis[i] == _TRIVIAL_MONO else _CYC_ZERO for i in range(size)]
        sol = _solve_cyc_linear(mat, rhs)
        if sol is None:
            raise FieldError(
                "radical relations are degenerate (reducible extension); refusing to divide"
            )
        return FieldElement({basis[j]: sol[j] for j in range(size)})

    # -- roots -------------------------------------------------------------

    def nth_root(self, m: int) -> "FieldElement":
        """The canonical m-th root; may enlarge the field.  See adjoin_root."""
        return adjoin_root(self, m)

    # -- ordering ----------------------------------------------------------

    def sort_key(self) -> tuple:
        """A total, representation-independent ordering key."""
        if self._key_cache is None:
            parts = []
            for mono in sorted(self._terms, key=_mono_key):
                c = _cyc_contract(self._terms[mono])
                parts.append((_mono_key(mono), c.n, tuple(c.c)))
            self._key_cache = (len(parts), tuple(parts))
        return self._key_cache


def _mono_key(mono: _Monomial) -> tuple:
    return tuple(sorted((key, e) for key, e in mono))


def _mono_mul_vec(a: _Monomial, b: _Monomial) -> _Monomial:
    # exponent vectors mod 1, dropping the overflow (used for span closure)
    exps: dict = dict(a)
    for key, e in b:
        total = exps.get(key, _ZERO) + e
        total = total - int(total)
        if total:
            exps[key] = total
        elif key in exps:
            del exps[key]
    return frozenset(exps.items())


def _mul_monomials(m1: _Monomial, c1: _Cyc, m2: _Monomial, c2: _Cyc) -> FieldElement:
    exps: dict = dict(m1)
    overflow = None
    for key, e in m2:
        total = exps.get(key, _ZERO) + e
        carry = int(total)
        total -= carry
        if carry:
            if key[0] == "p":
                extra = FieldElement.from_any(Fraction(key[1]) ** carry)
            else:
                extra = _OPAQUE_REGISTRY_BY_SERIAL[key[1]].gamma ** carry
            overflow = extra if overflow is None else overflow * extra
        if total:
            exps[key] = total
        elif key in exps:
            del exps[key]
    base = FieldElement({frozenset(exps.items()): _cyc_mul(c1, c2)})
    return base if overflow is None else base * overflow


def _solve_cyc_linear(mat: list[list[_Cyc]], rhs: list[_Cyc]) -> Optional[list[_Cyc]]:
    n = len(mat)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = _cyc_inv(aug[col][col])
        aug[col] = [_cyc_mul(v, inv) for v in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [_cyc_add(v, _cyc_neg(_cyc_mul(f, w))) for v, w in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


# --------------------------------------------------------------------------
# public constructors

ZERO = FieldElement({})
ONE = FieldElement({_TRIVIAL_MONO: _CYC_ONE})


def rational(x: Union[int, str, Fraction]) -> FieldElement:
    """The rational scalar x (int, Fraction, or a 'p/q' string)."""
    if isinstance(x, str):
        x = Fraction(x)
    return FieldElement.from_any(Fraction(x))


def zeta(n: int, k: int = 1) -> FieldElement:
    """The root of unity zeta_n^k, zeta_n = exp(2 pi i / n)."""
    if n < 1:
        raise DomainError("zeta order must be a positive integer")
    return FieldElement({_TRIVIAL_MONO: _Cyc.from_powers(n, {k % n: _ONE})})


def exp2pi(r: Fraction) -> FieldElement:
    """exp(2 pi i r) for rational r: the eigenvalue of residue r."""
    r = Fraction(r)
    return zeta(r.denominator, r.numerator % r.denominator)


def lift_to_common_field(a: FieldElement, b: FieldElement) -> tuple[FieldElement, FieldElement, int]:
    """Re-express both scalars in Q(zeta_N), N = lcm of their ambient orders.

    The ambient order is the order the element is currently written in, not
    the minimal one (zeta_2 counts as order 2 even though its value is -1).
    """
    a = FieldElement.from_any(a)
    b = FieldElement.from_any(b)

    def ambient(x: FieldElement) -> int:
        n = 1
        for c in x._terms.values():
            n = _lcm(n, c.n)
        return n

    n = _lcm(ambient(a), ambient(b))
    lift = lambda x: FieldElement({m: _cyc_lift(c, n) for m, c in x._terms.items()})
    return lift(a), lift(b), n


def adjoin_root(gamma: Union[FieldElement, int, Fraction], m: int) -> FieldElement:
    """The canonical m-th root of gamma, enlarging the field when needed.

    Roots of unity go to zeta_{mN}^k, positive rationals to prime-wise
    radicals (perfect powers collapse, so adjoin_root(4, 2) == 2), and a
    product of the two splits factor by factor.  Anything else gets an
    opaque generator x with x^m = gamma; asking again for the same gamma
    reuses the generator.  Nesting beyond MAX_TOWER_DEPTH is an error.
    """
    gamma = FieldElement.from_any(gamma)
    if m < 1:
        raise DomainError("root order must be a positive integer")
    if m == 1 or gamma.is_zero():
        return gamma
    if len(gamma._terms) == 1:
        [(mono, cyc)] = gamma._terms.items()
        coeff = FieldElement({_TRIVIAL_MONO: cyc})
        zm = coeff.as_zeta_monomial()
        if zm is not None:
            r, n, k = zm
            out = _rational_root(r, m) * zeta(m * n, k)
            for key, e in mono:
                out = out * _gen_power(key, e / m)
            return out
    level = gamma.tower_level() + 1
    if level > MAX_TOWER_DEPTH:
        raise TowerDepthError(
            f"radical nesting depth {level} exceeds the cap {MAX_TOWER_DEPTH}"
        )
    reg_key = (gamma.sort_key(),)
    gen = _OPAQUE_REGISTRY.get(reg_key)
    if gen is None:
        _OPAQUE_SERIAL[0] += 1
        gen = _OpaqueGen(_OPAQUE_SERIAL[0], gamma, level)
        _OPAQUE_REGISTRY[reg_key] = gen
        _OPAQUE_REGISTRY_BY_SERIAL[gen.serial] = gen
    return _gen_power(("x", gen.serial), Fraction(1, m))


def _gen_power(key, e: Fraction) -> FieldElement:
    carry = int(e)
    e = e - carry
    extra = ONE
    if carry:
        if key[0] == "p":
            extra = rational(Fraction(key[1]) ** carry)
        else:
            extra = _OPAQUE_REGISTRY_BY_SERIAL[key[1]].gamma ** carry
    if not e:
        return extra
    return FieldElement({frozenset({(key, e)}): _CYC_ONE}) * extra


def _rational_root(r: Fraction, m: int) -> FieldElement:
    # canonical positive real m-th root of a positive rational
    if r <= 0:
        raise InternalError("rational root path expects a positive value")
    out = ONE
    for p, e in _factorize(r.numerator).items():
        out = out * _gen_power(("p", p), Fraction(e, m))
    for p, e in _factorize(r.denominator).items():
        out = out * _gen_power(("p", p), Fraction(e, m))._invert()
    return out
