"""Exact Fourier transform of step functions.

A spatial function with resolution m and support bound M lives on the finite
group P^{-M}/P^m, a direct sum of M + m copies of GF(q).  Its transform is
supported in Gamma^m and constant on cosets of Gamma^{-M}, and the character
pairing splits digit by digit: the t^{-1} coefficient of xi*x is
sum_e xi_{-1-e} x_e.  The transform is therefore a tensor product of q-point
transforms with kernel exp(-2 pi i tr(a b) / p), one per digit position
(``method="fast"``).  ``method="naive"`` forms the full N x N character
matrix and is kept as an oracle.
"""
from __future__ import annotations

from typing import Callable, Union

import numpy as np

from .field import FieldElement, FieldParams
from .functions import (
    FREQUENCY,
    SPATIAL,
    SideError,
    StepFunction,
    radial_sample,
)

DEFAULT_SIZE_LIMIT = 2**20
NAIVE_SIZE_LIMIT = 4096


class SizeLimitError(ValueError):
    pass


def _kernel(params: FieldParams, sign: int) -> np.ndarray:
    return np.exp(sign * 2j * np.pi * params.pairing / params.p)


def _transform(f: StepFunction, sign: int, method: str, size_limit: int) -> np.ndarray:
    n = f.ndigits
    if f.size > size_limit:
        raise SizeLimitError(f"grid of {f.size} cells exceeds the size limit {size_limit}")
    if method == "fast":
        arr = f.data
        W = _kernel(f.params, sign)
        for axis in range(n):
            arr = np.moveaxis(np.tensordot(W, arr, axes=([1], [axis])), 0, axis)
        # output axis j pairs with input axis n - 1 - j
        arr = np.transpose(arr, tuple(reversed(range(n))))
    elif method == "naive":
        if f.size > NAIVE_SIZE_LIMIT:
            raise SizeLimitError(f"naive transform limited to {NAIVE_SIZE_LIMIT} cells")
        digits = _digit_matrix(f.params.q, n)
        pair = f.params.pairing
        expo = np.zeros((f.size, f.size), dtype=np.int64)
        for j in range(n):
            expo += pair[digits[:, j][:, None], digits[:, n - 1 - j][None, :]]
        roots = np.exp(sign * 2j * np.pi * np.arange(f.params.p) / f.params.p)
        mat = roots[expo % f.params.p]
        arr = (mat @ f.data.reshape(-1)).reshape(f.data.shape)
    else:
        raise ValueError(f"unknown method {method!r}")
    return arr * f.cell_measure


def _digit_matrix(q: int, n: int) -> np.ndarray:
    """Row k holds the base-q digits of k, most significant first."""
    idx = np.arange(q**n)
    cols = [(idx // q ** (n - 1 - i)) % q for i in range(n)]
    return np.stack(cols, axis=1) if cols else np.zeros((1, 0), dtype=np.int64)


def fourier(f: StepFunction, method: str = "fast", size_limit: int = DEFAULT_SIZE_LIMIT) -> StepFunction:
    """F f(xi) = integral of f(x) conj(chi_xi(x)) dx."""
    if f.side != SPATIAL:
        raise SideError("fourier expects a spatial function")
    arr = _transform(f, -1, method, size_limit)
    return StepFunction(f.params, f.support, f.resolution, arr, FREQUENCY)


def inverse_fourier(g: StepFunction, method: str = "fast", size_limit: int = DEFAULT_SIZE_LIMIT) -> StepFunction:
    """F^{-1} g(x) = integral of g(xi) chi_x(xi) dxi."""
    if g.side != FREQUENCY:
        raise SideError("inverse_fourier expects a frequency-side function")
    arr = _transform(g, +1, method, size_limit)
    return StepFunction(g.params, g.support, g.resolution, arr, SPATIAL)


def transform_at(f: StepFunction, xi: FieldElement) -> complex:
    """Direct character sum for one output point, O(N).

    Works for either side (forward for spatial input, inverse for frequency
    input) and for any xi, including points outside the output grid.
    """
    sign = -1 if f.side == SPATIAL else +1
    params = f.params
    n = f.ndigits
    expo = np.zeros(f.data.shape, dtype=np.int64)
    pair = params.pairing
    # xi_{-1-e} pairs with x_e for every exponent e of the input grid
    for axis, e in enumerate(f.exponents):
        a = xi.digit(-1 - e)
        if a:
            shape = [1] * n
            shape[axis] = params.q
            expo = expo + pair[a].reshape(shape)
    # digits of xi below -resolution pair with exponents >= resolution, where
    # the integral over a cell averages the character to zero
    if not xi.is_zero and xi.lo < -f.resolution:
        return 0j
    phase = np.exp(sign * 2j * np.pi * (expo % params.p) / params.p)
    return complex(np.sum(phase * f.data) * f.cell_measure)


Symbol = Union[StepFunction, Callable[[np.ndarray], np.ndarray]]


def multiplier_product(symbol: Symbol, F: StepFunction) -> StepFunction:
    """symbol * F on a common frequency grid."""
    if isinstance(symbol, StepFunction):
        if symbol.side != FREQUENCY:
            raise SideError("multiplier must live on the frequency side")
        return symbol * F
    # radial callable of |xi|; keep the zero cell inside Gamma^0
    G = F.refine(max(F.resolution, 0), F.support)
    sym = radial_sample(F.params, symbol, G.resolution, G.support)
    return G.with_data(G.data * sym.data)


def apply_multiplier(symbol: Symbol, f: StepFunction, size_limit: int = DEFAULT_SIZE_LIMIT) -> StepFunction:
    """F^{-1}[symbol * F f]."""
    if f.side != SPATIAL:
        raise SideError("apply_multiplier expects a spatial function")
    F = fourier(f, size_limit=size_limit)
    return inverse_fourier(multiplier_product(symbol, F), size_limit=size_limit)


def bracket_power(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    """Radial symbol <xi>^alpha."""
    return lambda absxi: np.maximum(1.0, absxi) ** alpha
