"""Dilation and localization operators and the bound checks built on them."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .besov import BesovParams, band_leak, besov_norm, combine_blocks, sigma_r
from .field import EnumerationLimitError, FieldElement, FieldParams, PrecisionError
from .functions import SPATIAL, SideError, StepFunction, lr_norm, translate_digits, valuation_grid


class HypothesisWarning(UserWarning):
    """Parameters fall outside the range covered by the dilation theorem."""


class BandSupportError(ValueError):
    pass


def dilate(f: StepFunction, k: int) -> StepFunction:
    """(T_k f)(x) = f(p^{-k} x).

    Multiplying by t^{-k} moves every digit down by k places, so the value
    array is reused as is: resolution m -> m + k, support bound M -> M - k.
    """
    params = f.params
    m, M = f.resolution + k, f.support - k
    if m + M > 0 and (-M < params.lo_min or m - 1 > params.hi_max):
        raise PrecisionError(
            f"dilated grid spans exponents [{-M}, {m - 1}] outside "
            f"[{params.lo_min}, {params.hi_max}]"
        )
    return StepFunction(params, m, M, f.data, f.side)


def bound_shape(k: int, bp: BesovParams, q: int) -> float:
    """k^{1/t} q^{k(s - 1/r)}, with the k = 0 factor taken as 1."""
    growth = float(q) ** (k * (bp.s - 1.0 / bp.r))
    if k == 0 or math.isinf(bp.t):
        return growth
    return k ** (1.0 / bp.t) * growth


def _check_hypothesis(bp: BesovParams, need_t_le_r: bool = False) -> bool:
    ok = bp.s > sigma_r(bp.r)
    if not ok:
        warnings.warn(
            f"s={bp.s} <= sigma_r={sigma_r(bp.r)}: outside the theorem's range",
            HypothesisWarning,
            stacklevel=3,
        )
    if need_t_le_r and bp.t > bp.r:
        warnings.warn(f"t={bp.t} > r={bp.r}: outside the theorem's range", HypothesisWarning, stacklevel=3)
        ok = False
    return ok


@dataclass(frozen=True)
class DilationRecord:
    k: int
    norm_in: float
    norm_out: float
    ratio: float
    bound_shape: float
    in_hypothesis: bool = True

    @property
    def ratio_over_bound(self) -> float:
        return self.ratio / self.bound_shape


def dilation_bound_check(f: StepFunction, bp: BesovParams, k: int) -> DilationRecord:
    if k < 0:
        raise ValueError("the bound is stated for k >= 0")
    ok = _check_hypothesis(bp)
    norm_in = besov_norm(f, bp)
    if norm_in == 0.0:
        raise ValueError("dilation bound check needs a nonzero function")
    norm_out = besov_norm(dilate(f, k), bp)
    return DilationRecord(k, norm_in, norm_out, norm_out / norm_in, bound_shape(k, bp, f.params.q), ok)


def localization_centers(params: FieldParams, i: int, count: int) -> list[FieldElement]:
    """Representatives z^{0,i}, z^{1,i}, ... of distinct cosets of P^i.

    The n-th center carries the base-q digits of n, least significant at
    exponent i - 1, so z^{0,i} = 0 and the first q^d centers exhaust
    P^{i-d}/P^i.
    """
    if count > params.enum_limit:
        raise EnumerationLimitError(f"{count} centers exceed the enumeration limit")
    q = params.q
    out = []
    for n in range(count):
        digits = {}
        e = i - 1
        while n:
            n, d = divmod(n, q)
            digits[e] = d
            e -= 1
        out.append(FieldElement.from_map(params, digits))
    return out


def supported_in(f: StepFunction, level: int) -> bool:
    """Whether f vanishes outside P^level."""
    if f.support <= -level:
        return True
    g = f.refine(max(f.resolution, level), f.support)
    v = valuation_grid(g.params, g.resolution, g.support)
    return bool(np.all(g.data[v < level] == 0))


def localize_terms(
    f: StepFunction, j: int, centers: Sequence[FieldElement], coeffs: Sequence[complex], i: int
) -> list[StepFunction]:
    if f.side != SPATIAL:
        raise SideError("localize acts on spatial functions")
    if len(centers) != len(coeffs):
        raise ValueError("centers and coeffs differ in length")
    if not supported_in(f, i):
        raise ValueError(f"supp f is not contained in P^{i}")
    base = dilate(f, j)
    return [c * translate_digits(base, z) for z, c in zip(centers, coeffs)]


def disjoint_supports(terms: Sequence[StepFunction]) -> bool:
    if not terms:
        return True
    m = max(t.resolution for t in terms)
    M = max(t.support for t in terms)
    count = np.zeros((terms[0].params.q,) * (m + M), dtype=np.int64)
    for t in terms:
        count += (t.refine(m, M).data != 0)
    return bool(count.max(initial=0) <= 1)


def localize(
    f: StepFunction,
    j: int,
    centers: Sequence[FieldElement],
    coeffs: Sequence[complex],
    i: int = 0,
) -> StepFunction:
    """sum_k c_k f(p^{-j}(x - z_k)) for f supported in P^i."""
    if j < 1:
        raise ValueError("j must be >= 1")
    terms = localize_terms(f, j, centers, coeffs, i)
    if not terms:
        return StepFunction.zeros(f.params, f.resolution + j, max(f.support - j, -f.resolution - j))
    # the indicator of each summand's ball, so zero coefficients still count
    balls = localize_terms(f, j, centers, [1.0] * len(centers), i)
    if not disjoint_supports(balls):
        raise ValueError("translated copies overlap; centers must lie in distinct cosets of P^i")
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


@dataclass(frozen=True)
class LocalizationRecord:
    j: int
    i: int
    n_centers: int
    lhs: float
    rhs_shape: float
    ratio: float
    in_hypothesis: bool = True


def _lr_of_coeffs(coeffs: Sequence[complex], r: float) -> float:
    a = np.abs(np.asarray(coeffs, dtype=complex))
    if a.size == 0:
        return 0.0
    if math.isinf(r):
        return float(a.max())
    return float(np.sum(a**r) ** (1.0 / r))


def localization_bound_check(
    f: StepFunction,
    bp: BesovParams,
    j: int,
    centers: Sequence[FieldElement],
    coeffs: Sequence[complex],
    i: int = 0,
) -> LocalizationRecord:
    """lhs = ||sum_k c_k f(p^{-j}(. - z_k))||, rhs_shape =
    (sum |c_k|^r)^{1/r} j^{1/t} q^{j(s-1/r)} ||f||."""
    ok = _check_hypothesis(bp, need_t_le_r=True)
    g = localize(f, j, centers, coeffs, i)
    lhs = besov_norm(g, bp)
    rhs = _lr_of_coeffs(coeffs, bp.r) * bound_shape(j, bp, f.params.q) * besov_norm(f, bp)
    if rhs == 0.0:
        raise ValueError("zero right-hand side: need a nonzero function and coefficients")
    return LocalizationRecord(j, i, len(centers), lhs, rhs, lhs / rhs, ok)


@dataclass(frozen=True)
class TranslateRecord:
    j: int
    lhs: float
    base: float
    ratio: float


def per_translate_check(f: StepFunction, bp: BesovParams, j: int, z: FieldElement) -> TranslateRecord:
    """||f(p^{-j}(x - z))|| against j^{1/t} q^{j(s-1/r)} ||f(x - z)||."""
    lhs = besov_norm(translate_digits(dilate(f, j), z), bp)
    base = besov_norm(translate_digits(f, z), bp)
    return TranslateRecord(j, lhs, base, lhs / (bound_shape(j, bp, f.params.q) * base))


@dataclass(frozen=True)
class Prop42Record:
    lhs: float
    rhs: float
    ratio: float


def prop42_check(blocks: Sequence[StepFunction], bp: BesovParams, tol: float = 1e-9) -> Prop42Record:
    """Compare ||sum_j u_j||_B with (sum_j q^{sjt} ||u_j||_r^t)^{1/t} for
    u_j band-limited to the j-th Littlewood-Paley band."""
    if not blocks:
        return Prop42Record(0.0, 0.0, 1.0)
    _check_hypothesis(bp)
    for j, u in enumerate(blocks):
        scale = max(1.0, float(np.max(np.abs(u.data), initial=0.0)))
        leak = band_leak(u, j)
        if leak > tol * scale:
            raise BandSupportError(f"block {j} has spectrum outside its band (leak {leak:.3g})")
    total = blocks[0]
    for u in blocks[1:]:
        total = total + u
    lhs = besov_norm(total, bp)
    rhs = combine_blocks([lr_norm(u, bp.r) for u in blocks], bp.s, bp.t, blocks[0].params.q)
    if rhs == 0.0:
        return Prop42Record(lhs, rhs, 1.0 if lhs == 0.0 else math.inf)
    return Prop42Record(lhs, rhs, lhs / rhs)
