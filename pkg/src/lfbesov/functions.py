"""Test functions on K (or on its dual group) as step functions on cosets.

A :class:`StepFunction` with resolution ``m`` and support bound ``M`` is
constant on cosets of P^m and vanishes outside P^{-M}.  Its values live in a
dense complex array of shape ``(q,) * (M + m)``; axis ``i`` is indexed by the
GF(q) digit at exponent ``-M + i``, so C-order flattening matches
:func:`lfbesov.field.coset_reps`.

Frequency-side functions use the same level convention through the
identification of the dual group with K: the ball Gamma^k is the level ``-k``
ball {|xi| <= q^k}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .field import (
    CosetId,
    FieldElement,
    FieldParams,
    coset_index,
    element_at,
)

SPATIAL = "spatial"
FREQUENCY = "frequency"
_SIDES = (SPATIAL, FREQUENCY)


class SideError(ValueError):
    """Raised when spatial and frequency functions are mixed."""


def bracket(x: FieldElement) -> float:
    """<x> = max(1, |x|), the weight used by p-type derivatives and H^s_2."""
    return max(1.0, abs(x))


def character_eval(xi: FieldElement, x: FieldElement) -> complex:
    """chi_xi(x) = exp(2 pi i tr(a_{-1}(xi x)) / p)."""
    params = xi.params
    if x.params != params:
        raise ValueError("operands belong to different fields")
    if xi.is_zero or x.is_zero:
        return 1.0 + 0.0j
    acc = 0
    # coefficient of t^{-1} in the product: sum over e of xi_{-1-e} x_e
    for e in range(x.lo, x.hi + 1):
        a = xi.digit(-1 - e)
        if a:
            acc = params.add(acc, params.mul(a, x.digit(e)))
    k = int(params.gf_trace[acc])
    return complex(np.exp(2j * np.pi * k / params.p))


@dataclass(frozen=True, eq=False)
class StepFunction:
    params: FieldParams
    resolution: int
    support: int
    data: np.ndarray
    side: str = SPATIAL

    def __post_init__(self):
        n = self.resolution + self.support
        if n < 0:
            raise ValueError(f"empty grid: resolution={self.resolution}, support={self.support}")
        if self.side not in _SIDES:
            raise ValueError(f"unknown side {self.side!r}")
        arr = np.asarray(self.data, dtype=np.complex128)
        shape = (self.params.q,) * n
        if arr.shape != shape:
            arr = arr.reshape(shape)
        if arr.flags.writeable:
            arr = arr.copy()
            arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    # -- construction -------------------------------------------------------
    @classmethod
    def zeros(cls, params: FieldParams, resolution: int, support: int, side: str = SPATIAL):
        n = resolution + support
        return cls(params, resolution, support, np.zeros((params.q,) * n, complex), side)

    @property
    def ndigits(self) -> int:
        return self.resolution + self.support

    @property
    def size(self) -> int:
        return self.params.q ** self.ndigits

    @property
    def cell_measure(self) -> float:
        return float(self.params.q) ** (-self.resolution)

    @property
    def exponents(self) -> range:
        return range(-self.support, self.resolution)

    # -- sparse view ----------------------------------------------------------
    @property
    def values(self) -> dict[CosetId, complex]:
        """Nonzero values keyed by coset (the normalized sparse form)."""
        flat = self.data.reshape(-1)
        out = {}
        for idx in np.flatnonzero(flat):
            rep = element_at(self.params, int(idx), self.resolution, self.support)
            out[CosetId(self.resolution, rep)] = complex(flat[idx])
        return out

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.data) <= tol))

    # -- grids ----------------------------------------------------------------
    def refine(self, resolution: int | None = None, support: int | None = None) -> StepFunction:
        """The same function on a finer and/or wider grid."""
        m2 = self.resolution if resolution is None else resolution
        M2 = self.support if support is None else support
        if m2 < self.resolution or M2 < self.support:
            raise ValueError("refine can only increase resolution and support bound")
        if (m2, M2) == (self.resolution, self.support):
            return self
        q = self.params.q
        arr = self.data
        extra_fine = m2 - self.resolution
        if extra_fine:
            arr = np.broadcast_to(
                arr.reshape(arr.shape + (1,) * extra_fine), arr.shape + (q,) * extra_fine
            )
        extra_coarse = M2 - self.support
        if extra_coarse:
            big = np.zeros((q,) * extra_coarse + arr.shape, complex)
            big[(0,) * extra_coarse] = arr
            arr = big
        return StepFunction(self.params, m2, M2, np.ascontiguousarray(arr), self.side)

    def coarsen_support(self) -> StepFunction:
        """Drop leading digit axes on which the function vanishes."""
        f = self
        while f.support + f.resolution > 0 and f.support > -f.resolution:
            if np.any(f.data[1:] != 0):
                break
            f = StepFunction(f.params, f.resolution, f.support - 1, f.data[0], f.side)
        return f

    def _common(self, other: StepFunction):
        if other.params != self.params:
            raise ValueError("functions over different fields")
        if other.side != self.side:
            raise SideError(f"cannot combine {self.side} and {other.side} functions")
        m = max(self.resolution, other.resolution)
        M = max(self.support, other.support)
        return self.refine(m, M), other.refine(m, M)

    def with_data(self, data: np.ndarray) -> StepFunction:
        return StepFunction(self.params, self.resolution, self.support, data, self.side)

    # -- algebra --------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        a, b = self._common(other)
        return a.with_data(a.data + b.data)

    def __sub__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        a, b = self._common(other)
        return a.with_data(a.data - b.data)

    def __neg__(self):
        return self.with_data(-self.data)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            a, b = self._common(other)
            return a.with_data(a.data * b.data)
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_data(self.data * other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return self.with_data(self.data**n)

    def conj(self) -> StepFunction:
        return self.with_data(np.conj(self.data))

    def __call__(self, x: FieldElement) -> complex:
        return step_eval(self, x)

    def __repr__(self):
        return (
            f"StepFunction(q={self.params.q}, side={self.side}, resolution={self.resolution}, "
            f"support={self.support}, nonzero={int(np.count_nonzero(self.data))})"
        )


def step_algebra(op: str, f: StepFunction, g=None) -> StepFunction:
    if op == "add":
        return f + g
    if op == "scale":
        return f * g
    if op == "mul":
        return f * g
    if op == "conj":
        return f.conj()
    raise ValueError(f"unknown operation {op!r}")


def allclose(f: StepFunction, g: StepFunction, atol: float = 1e-9) -> bool:
    a, b = f._common(g)
    return bool(np.all(np.abs(a.data - b.data) <= atol))


def max_abs_diff(f: StepFunction, g: StepFunction) -> float:
    a, b = f._common(g)
    if a.data.size == 0:
        return 0.0
    return float(np.max(np.abs(a.data - b.data)))


def ball_indicator(
    params: FieldParams,
    center: FieldElement | None,
    level: int,
    side: str = SPATIAL,
    resolution: int | None = None,
    support: int | None = None,
    coef: complex = 1.0,
) -> StepFunction:
    """coef * Phi_{center + P^level} on a grid fine and wide enough to hold it."""
    if center is None:
        center = FieldElement.zero(params)
    center = center.truncate(level)
    m = level if resolution is None else max(resolution, level)
    M = -level
    if not center.is_zero:
        M = max(M, -center.lo)
    if support is not None:
        M = max(M, support)
    M = max(M, -m)
    f = StepFunction.zeros(params, m, M, side)
    arr = np.array(f.data)
    idx = tuple(center.digit(e) for e in range(-M, level))
    arr[idx] = coef
    return f.with_data(arr)


def from_terms(
    params: FieldParams,
    terms: Iterable[tuple[FieldElement, int, complex]],
    resolution: int | None = None,
    support: int | None = None,
    side: str = SPATIAL,
) -> StepFunction:
    """Sum of coef * Phi_{center + P^level} over (center, level, coef) terms."""
    terms = list(terms)
    if not terms:
        return StepFunction.zeros(params, resolution or 0, support or 0, side)
    m = max(level for _, level, _ in terms)
    if resolution is not None:
        m = max(m, resolution)
    M = max(-level if c.truncate(level).is_zero else max(-level, -c.truncate(level).lo)
            for c, level, _ in terms)
    if support is not None:
        M = max(M, support)
    M = max(M, -m)
    arr = np.zeros((params.q,) * (m + M), complex)
    for center, level, coef in terms:
        idx = tuple(center.digit(e) for e in range(-M, level))
        arr[idx] += coef
    return StepFunction(params, m, M, arr, side)


def step_eval(f: StepFunction, x: FieldElement) -> complex:
    idx = coset_index(x, f.resolution, f.support)
    if idx is None:
        return 0j
    return complex(f.data.reshape(-1)[idx])


def translate_digits(f: StepFunction, z: FieldElement) -> StepFunction:
    """g(x) = f(x - z), as a digit-wise permutation of the value array."""
    if z.params != f.params:
        raise ValueError("translation by an element of a different field")
    z = z.truncate(f.resolution)
    if z.is_zero:
        return f
    M = max(f.support, -z.lo)
    g = f.refine(f.resolution, M)
    arr = g.data
    sub = f.params.gf_sub
    q = f.params.q
    for axis, e in enumerate(g.exponents):
        d = z.digit(e)
        if d:
            # new value at digit a is the old value at digit a - d
            arr = np.take(arr, sub[np.arange(q), d], axis=axis)
    return g.with_data(arr)


step_translate = translate_digits


def lr_norm(f: StepFunction, r: float) -> float:
    """(sum over cells of |value|^r * cell measure)^(1/r); sup norm for r = inf."""
    if r <= 0:
        raise ValueError("r must be positive")
    a = np.abs(f.data)
    if a.size == 0:
        return 0.0
    if math.isinf(r):
        return float(a.max())
    total = float(np.sum(a**r)) * f.cell_measure
    return total ** (1.0 / r)


@dataclass(frozen=True)
class BallSpec:
    center: FieldElement
    level: int


def haar_measure(b: BallSpec) -> float:
    return float(b.center.params.q) ** (-b.level)


def valuation_grid(params: FieldParams, resolution: int, support: int) -> np.ndarray:
    """Valuation of each cell representative (inf for the zero cell), as a
    float array of the grid shape."""
    n = resolution + support
    q = params.q
    v = np.full((q,) * n, np.inf)
    nz = (np.arange(q) != 0)
    for axis in reversed(range(n)):
        e = -support + axis
        shape = [1] * n
        shape[axis] = q
        v = np.where(nz.reshape(shape), float(e), v)
    return v


def abs_grid(params: FieldParams, resolution: int, support: int) -> np.ndarray:
    """|rep| for every cell; the zero cell gets 0."""
    v = valuation_grid(params, resolution, support)
    with np.errstate(over="ignore"):
        return np.where(np.isinf(v), 0.0, float(params.q) ** (-np.where(np.isinf(v), 0, v)))


def radial_sample(
    params: FieldParams,
    fn: Callable[[np.ndarray], np.ndarray],
    resolution: int,
    support: int,
    side: str = FREQUENCY,
) -> StepFunction:
    """Sample a radial symbol fn(|x|) onto a grid.

    On the zero cell the symbol is read as fn(0); this is exact whenever the
    symbol is constant on the ball P^resolution (e.g. <xi>^a with resolution
    >= 0).
    """
    vals = np.asarray(fn(abs_grid(params, resolution, support)), dtype=complex)
    return StepFunction(params, resolution, support, vals, side)


def bracket_grid(params: FieldParams, resolution: int, support: int) -> np.ndarray:
    if resolution < 0:
        raise ValueError("<x> is only constant on cells when resolution >= 0")
    return np.maximum(1.0, abs_grid(params, resolution, support))


def weighted(f: StepFunction, sigma: float) -> StepFunction:
    """<x>^sigma f(x), refining so the zero cell lies inside the unit ball."""
    if f.resolution < 0:
        f = f.refine(0, f.support)
    return f.with_data(f.data * bracket_grid(f.params, f.resolution, f.support) ** sigma)


def character_sum(params: FieldParams, xi: FieldElement, reps: Iterable[FieldElement]) -> complex:
    return sum((character_eval(xi, x) for x in reps), 0j)


def sparse_terms(f: StepFunction) -> list[tuple[FieldElement, int, complex]]:
    """The function as a list of (center, level, coef) ball terms, one per
    nonzero cell."""
    return [(cid.rep, cid.level, v) for cid, v in f.values.items()]
