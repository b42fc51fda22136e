"""Exact arithmetic in K = F_q((t)) at finite precision.

Elements of GF(q) are encoded as integers ``0 <= a < q`` whose base-p digits
are the coefficients (lowest degree first) of a polynomial over GF(p) reduced
modulo the defining irreducible.  Elements of K are truncated Laurent series
in the prime element t with GF(q) digits; addition is digit-wise (no carries),
multiplication is Laurent convolution.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

DEFAULT_LO_MIN = -64
DEFAULT_HI_MAX = 64
DEFAULT_TABLE_LIMIT = 2**16
DEFAULT_ENUM_LIMIT = 2**20
# full q x q tables are only materialized up to this order
_DENSE_TABLE_LIMIT = 4096


class FieldError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    """A result needs digits outside the configured exponent window."""


class EnumerationLimitError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- polynomials over GF(p), coefficient lists lowest degree first -----------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _poly_trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mi) % p
        _poly_trim(a)
    return a


def _monic_polys(degree: int, p: int) -> Iterator[tuple[int, ...]]:
    """Monic polynomials of a given degree in lexicographic order of
    (a_{d-1}, ..., a_0)."""
    for high_first in itertools.product(range(p), repeat=degree):
        yield tuple(reversed(high_first)) + (1,)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = list(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(d, p):
            if not _poly_mod(poly, g, p):
                return False
    return True


def smallest_irreducible(p: int, c: int) -> tuple[int, ...]:
    for poly in _monic_polys(c, p):
        if is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {c} over GF({p})")


# -- the residue field --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldParams:
    """The field F_q((t)), q = p^c, with GF(q) tables and a precision window.

    Instances are immutable and compare equal when they describe the same
    field and window.
    """

    p: int
    c: int
    irreducible: tuple[int, ...]
    lo_min: int = DEFAULT_LO_MIN
    hi_max: int = DEFAULT_HI_MAX
    enum_limit: int = DEFAULT_ENUM_LIMIT
    q: int = field(init=False)
    exp_table: np.ndarray = field(init=False, repr=False)
    log_table: np.ndarray = field(init=False, repr=False)
    coeffs: np.ndarray = field(init=False, repr=False)
    gf_neg: np.ndarray = field(init=False, repr=False)
    gf_trace: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p, c = self.p, self.c
        q = p**c
        object.__setattr__(self, "q", q)
        # coefficient vectors, lowest degree first
        coeffs = np.array(
            [[(a // p**i) % p for i in range(c)] for a in range(q)], dtype=np.int64
        ).reshape(q, c)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        weights = p ** np.arange(c, dtype=np.int64)
        neg = ((-coeffs) % p) @ weights
        neg.setflags(write=False)
        object.__setattr__(self, "gf_neg", neg)

        exp_table, log_table = self._build_log_tables()
        object.__setattr__(self, "exp_table", exp_table)
        object.__setattr__(self, "log_table", log_table)

        trace = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            acc = 0
            la = int(log_table[a])
            for i in range(c):
                acc = self.add(acc, int(exp_table[(la * p**i) % (q - 1)]))
            if acc >= p:
                raise FieldError("trace did not land in the prime field")
            trace[a] = acc
        trace.setflags(write=False)
        object.__setattr__(self, "gf_trace", trace)

    def _poly_mul_int(self, a: int, b: int) -> int:
        p = self.p
        pa = [int(x) for x in self.coeffs[a]]
        pb = [int(x) for x in self.coeffs[b]]
        prod = [0] * (2 * self.c - 1)
        for i, x in enumerate(pa):
            if x:
                for j, y in enumerate(pb):
                    prod[i + j] += x * y
        red = _poly_mod(prod, self.irreducible, p) if self.c > 1 else [prod[0] % p]
        return sum(int(v) * p**i for i, v in enumerate(red))

    def _build_log_tables(self):
        q = self.q
        if q == 2:
            exp_table = np.array([1], dtype=np.int64)
            log_table = np.array([-1, 0], dtype=np.int64)
            return exp_table, log_table
        for g in range(2, q):
            powers = [1]
            x = g
            while x != 1:
                powers.append(x)
                x = self._poly_mul_int(x, g)
                if len(powers) > q - 1:
                    break
            if len(powers) == q - 1:
                exp_table = np.array(powers, dtype=np.int64)
                log_table = np.full(q, -1, dtype=np.int64)
                log_table[exp_table] = np.arange(q - 1)
                exp_table.setflags(write=False)
                log_table.setflags(write=False)
                return exp_table, log_table
        raise FieldError("multiplicative group has no generator; polynomial reducible?")

    # scalar GF(q) operations
    def add(self, a: int, b: int) -> int:
        if self.c == 1:
            return (a + b) % self.p
        s = (self.coeffs[a] + self.coeffs[b]) % self.p
        return int(s @ (self.p ** np.arange(self.c)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, int(self.gf_neg[b]))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(q)")
        return int(self.exp_table[(-self.log_table[a]) % (self.q - 1)])

    @property
    def gf_add(self) -> np.ndarray:
        return _dense_tables(self)[0]

    @property
    def gf_mul(self) -> np.ndarray:
        return _dense_tables(self)[1]

    @property
    def gf_sub(self) -> np.ndarray:
        return _dense_tables(self)[2]

    @property
    def pairing(self) -> np.ndarray:
        """Integer table tr(a*b) in Z/p; the kernel of the q-point DFT."""
        return _dense_tables(self)[3]

    def _key(self):
        return (self.p, self.c, self.irreducible, self.lo_min, self.hi_max, self.enum_limit)

    def __eq__(self, other):
        return isinstance(other, FieldParams) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldParams(q={self.p}^{self.c})"


@lru_cache(maxsize=None)
def _dense_tables(params: FieldParams):
    q, p, c = params.q, params.p, params.c
    if q > _DENSE_TABLE_LIMIT:
        raise FieldError(f"dense GF({q}) tables exceed {_DENSE_TABLE_LIMIT} elements")
    weights = p ** np.arange(c, dtype=np.int64)
    co = params.coeffs
    add = ((co[:, None, :] + co[None, :, :]) % p) @ weights
    sub = ((co[:, None, :] - co[None, :, :]) % p) @ weights
    a = np.arange(q)[:, None]
    b = np.arange(q)[None, :]
    la = params.log_table[a]
    lb = params.log_table[b]
    mul = np.where((a == 0) | (b == 0), 0, params.exp_table[(la + lb) % (q - 1)])
    pairing = params.gf_trace[mul]
    for t in (add, mul, sub, pairing):
        t.setflags(write=False)
    return add, mul, sub, pairing


def field_init(
    p: int,
    c: int = 1,
    irreducible: Sequence[int] | None = None,
    *,
    lo_min: int = DEFAULT_LO_MIN,
    hi_max: int = DEFAULT_HI_MAX,
    table_limit: int = DEFAULT_TABLE_LIMIT,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> FieldParams:
    """Build F_q((t)) for q = p**c.

    ``irreducible`` is a coefficient sequence, lowest degree first, of a monic
    degree-c polynomial over GF(p).  When omitted the lexicographically
    smallest one (comparing a_{c-1}, ..., a_0) is chosen.
    """
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if c < 1:
        raise FieldError(f"extension degree must be >= 1, got {c}")
    if p**c > table_limit:
        raise FieldError(f"q={p}^{c} exceeds the table limit {table_limit}")
    if irreducible is None:
        poly = smallest_irreducible(p, c)
    else:
        poly = tuple(int(a) % p for a in irreducible)
        if len(poly) != c + 1 or poly[-1] != 1:
            raise FieldError(f"polynomial {tuple(irreducible)} is not monic of degree {c}")
        if not is_irreducible(poly, p):
            raise FieldError(f"polynomial {tuple(irreducible)} is reducible over GF({p})")
    if lo_min > hi_max:
        raise FieldError("empty precision window")
    return _field_cached(p, c, poly, lo_min, hi_max, enum_limit)


@lru_cache(maxsize=None)
def _field_cached(p, c, poly, lo_min, hi_max, enum_limit) -> FieldParams:
    return FieldParams(p, c, poly, lo_min, hi_max, enum_limit)


# -- elements of K -------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    """x = sum_l a_l t^l with a_l in GF(q), stored canonically.

    ``lo`` is the valuation for nonzero elements; ``digits[i]`` is the
    coefficient of t^(lo+i).  The zero element has ``lo == 0`` and no digits.
    """

    params: FieldParams
    lo: int
    digits: tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        lo = self.lo
        start = 0
        while start < len(digits) and digits[start] == 0:
            start += 1
        end = len(digits)
        while end > start and digits[end - 1] == 0:
            end -= 1
        digits = digits[start:end]
        lo = lo + start if digits else 0
        if digits:
            if lo < self.params.lo_min or lo + len(digits) - 1 > self.params.hi_max:
                raise PrecisionError(
                    f"digits at exponents [{lo}, {lo + len(digits) - 1}] fall outside "
                    f"[{self.params.lo_min}, {self.params.hi_max}]"
                )
            if any(d < 0 or d >= self.params.q for d in digits):
                raise FieldError(f"digit out of range for GF({self.params.q})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "digits", digits)

    @classmethod
    def zero(cls, params: FieldParams) -> FieldElement:
        return cls(params, 0, ())

    @classmethod
    def monomial(cls, params: FieldParams, exponent: int, digit: int = 1) -> FieldElement:
        return cls(params, exponent, (digit,))

    @classmethod
    def from_map(cls, params: FieldParams, digits: Mapping[int, int]) -> FieldElement:
        nz = {e: d for e, d in digits.items() if d}
        if not nz:
            return cls.zero(params)
        lo, hi = min(nz), max(nz)
        return cls(params, lo, tuple(nz.get(e, 0) for e in range(lo, hi + 1)))

    @property
    def is_zero(self) -> bool:
        return not self.digits

    @property
    def hi(self) -> int:
        """Highest exponent carrying a nonzero digit (lo - 1 for zero)."""
        return self.lo + len(self.digits) - 1

    def valuation(self) -> float | int:
        return float("inf") if self.is_zero else self.lo

    def digit(self, exponent: int) -> int:
        i = exponent - self.lo
        return self.digits[i] if 0 <= i < len(self.digits) else 0

    def window(self, lo: int, hi: int) -> tuple[int, ...]:
        """Digits at exponents lo, ..., hi - 1."""
        return tuple(self.digit(e) for e in range(lo, hi))

    def truncate(self, level: int) -> FieldElement:
        """Canonical representative of x + P^level (digits below ``level``)."""
        return FieldElement.from_map(
            self.params, {e: self.digit(e) for e in range(self.lo, min(self.hi + 1, level))}
        )

    def shift(self, k: int) -> FieldElement:
        """Multiply by t^k."""
        if self.is_zero:
            return self
        return FieldElement(self.params, self.lo + k, self.digits)

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.params != self.params:
            raise FieldError("operands belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        add = self.params.add
        return FieldElement(
            self.params, lo, tuple(add(self.digit(e), other.digit(e)) for e in range(lo, hi + 1))
        )

    def __neg__(self):
        neg = self.params.gf_neg
        return FieldElement(self.params, self.lo, tuple(int(neg[d]) for d in self.digits))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.is_zero or other.is_zero:
            return FieldElement.zero(self.params)
        params = self.params
        lo = self.lo + other.lo
        hi = self.hi + other.hi
        if lo < params.lo_min or hi > params.hi_max:
            raise PrecisionError(
                f"product spans exponents [{lo}, {hi}] outside "
                f"[{params.lo_min}, {params.hi_max}]"
            )
        out = [0] * (hi - lo + 1)
        for i, a in enumerate(self.digits):
            if a:
                for j, b in enumerate(other.digits):
                    if b:
                        out[i + j] = params.add(out[i + j], params.mul(a, b))
        return FieldElement(params, lo, tuple(out))

    def __abs__(self) -> float:
        return fe_abs(self)

    def __repr__(self):
        return f"FieldElement({format_element(self)!r})"


def fe_arith(op: str, x: FieldElement, y: FieldElement | None = None) -> FieldElement:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "neg":
        return -x
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")


def fe_abs(x: FieldElement) -> float:
    if x.is_zero:
        return 0.0
    return float(x.params.q) ** (-x.lo)


def prime_power(params: FieldParams, k: int) -> FieldElement:
    """The prime element raised to k, i.e. t^k."""
    return FieldElement.monomial(params, k)


# -- coset systems ---------------------------------------------------------

@dataclass(frozen=True)
class CosetId:
    """The ball rep + P^level, with rep carrying digits only below ``level``."""

    level: int
    rep: FieldElement

    def __post_init__(self):
        if not self.rep.is_zero and self.rep.hi >= self.level:
            object.__setattr__(self, "rep", self.rep.truncate(self.level))

    def contains(self, x: FieldElement) -> bool:
        return (x - self.rep).valuation() >= self.level


def coset_count(params: FieldParams, m: int, M: int) -> int:
    return params.q ** (M + m)


def coset_reps(params: FieldParams, m: int, M: int) -> list[CosetId]:
    """All cosets of P^m inside P^{-M}, in lexicographic order of the digit
    tuple (a_{-M}, ..., a_{m-1}); the first one is P^m itself."""
    if m + M < 0:
        raise ValueError(f"empty digit window: m={m}, M={M}")
    n = coset_count(params, m, M)
    if n > params.enum_limit:
        raise EnumerationLimitError(f"{n} cosets exceed the enumeration limit {params.enum_limit}")
    out = []
    for digs in itertools.product(range(params.q), repeat=M + m):
        out.append(CosetId(m, FieldElement(params, -M, digs)))
    return out


def coset_index(x: FieldElement, m: int, M: int) -> int | None:
    """Flat index of x + P^m in the ``coset_reps(m, M)`` order, or None when
    x lies outside P^{-M}."""
    if not x.is_zero and x.lo < -M:
        return None
    idx = 0
    q = x.params.q
    for e in range(-M, m):
        idx = idx * q + x.digit(e)
    return idx


def element_at(params: FieldParams, index: int, m: int, M: int) -> FieldElement:
    """Inverse of :func:`coset_index`: canonical representative of a flat index."""
    q = params.q
    digs = []
    for _ in range(M + m):
        index, d = divmod(index, q)
        digs.append(d)
    return FieldElement(params, -M, tuple(reversed(digs)))


# -- textual literal -------------------------------------------------------

_LITERAL_RE = re.compile(r"^\s*q\s*=\s*(\d+)\s*\^\s*(\d+)\s*;(.*)$", re.S)
_TERM_RE = re.compile(r"^\s*(\([^)]*\)|\d+)\s*@\s*(-?\d+)\s*$")


def _digit_literal(params: FieldParams, d: int) -> str:
    if params.c == 1:
        return str(d)
    return "(" + ",".join(str(int(v)) for v in params.coeffs[d]) + ")"


def format_element(x: FieldElement) -> str:
    params = x.params
    body = ",".join(
        f"{_digit_literal(params, d)}@{x.lo + i}" for i, d in enumerate(x.digits) if d
    )
    return f"q={params.p}^{params.c}; {body}" if body else f"q={params.p}^{params.c};"


def parse_element(text: str, params: FieldParams | None = None) -> FieldElement:
    """Parse ``q=<p>^<c>; <digit>@<exp>,...`` (digits as tuples when c > 1)."""
    m = _LITERAL_RE.match(text)
    if not m:
        raise ValueError(f"malformed element literal {text!r}")
    p, c, body = int(m.group(1)), int(m.group(2)), m.group(3)
    if params is None:
        params = field_init(p, c)
    elif (params.p, params.c) != (p, c):
        raise FieldError(f"literal is over q={p}^{c}, expected q={params.p}^{params.c}")
    digits: dict[int, int] = {}
    body = body.strip()
    if body:
        for chunk in _split_terms(body):
            tm = _TERM_RE.match(chunk)
            if not tm:
                raise ValueError(f"malformed digit term {chunk!r}")
            dtext, exp = tm.group(1), int(tm.group(2))
            if dtext.startswith("("):
                coefs = [int(v) for v in dtext[1:-1].split(",") if v.strip()]
                if len(coefs) > c or any(not 0 <= v < p for v in coefs):
                    raise ValueError(f"bad digit tuple {dtext!r}")
                d = sum(v * p**i for i, v in enumerate(coefs))
            else:
                d = int(dtext)
                if c > 1 and d >= p:
                    raise ValueError(f"digit {d} must be a coefficient tuple for c > 1")
                if d >= params.q:
                    raise ValueError(f"digit {d} out of range")
            if exp in digits:
                raise ValueError(f"exponent {exp} repeated")
            digits[exp] = d
    return FieldElement.from_map(params, digits)


def _split_terms(body: str) -> Iterable[str]:
    depth = 0
    cur = []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            yield "".join(cur)
            cur = []
        else:
            cur.append(ch)
    yield "".join(cur)
