"""Littlewood-Paley blocks, Besov norms and p-type derivatives.

The Littlewood-Paley family is the canonical one: phi_0 is the indicator of
Gamma^0 and phi_j (j >= 1) the indicator of the sphere |xi| = q^j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldElement, FieldParams
from .fourier import apply_multiplier, bracket_power, fourier, inverse_fourier
from .functions import (
    FREQUENCY,
    SPATIAL,
    SideError,
    StepFunction,
    ball_indicator,
    lr_norm,
    valuation_grid,
    weighted,
)


@dataclass(frozen=True)
class BesovParams:
    s: float
    r: float
    t: float

    def __post_init__(self):
        if not (self.r > 0 and self.t > 0):
            raise ValueError(f"r and t must be positive, got r={self.r}, t={self.t}")

    @classmethod
    def parse(cls, s, r, t) -> BesovParams:
        return cls(float(s), parse_exponent(r), parse_exponent(t))


def parse_exponent(value) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    return float(value)


def sigma_r(r: float) -> float:
    if r <= 0:
        raise ValueError("r must be positive")
    return max(1.0 / r - 1.0, 0.0)


def phi_j(params: FieldParams, j: int) -> StepFunction:
    """phi_0 = Phi_{Gamma^0}; phi_j = Phi_{Gamma^j minus Gamma^{j-1}}."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return ball_indicator(params, None, 0, FREQUENCY)
    outer = ball_indicator(params, None, -j, FREQUENCY, resolution=1 - j)
    inner = ball_indicator(params, None, 1 - j, FREQUENCY)
    return outer - inner


def _band_mask(v: np.ndarray, j: int) -> np.ndarray:
    # v: valuation of each frequency cell; the zero cell (inf) sits in Gamma^0
    if j == 0:
        return v >= 0
    return v == -j


def _spectrum(f: StepFunction) -> tuple[StepFunction, np.ndarray]:
    if f.side != SPATIAL:
        raise SideError("Littlewood-Paley blocks act on spatial functions")
    F = fourier(f)
    return F, valuation_grid(F.params, F.resolution, F.support)


def _block(F: StepFunction, v: np.ndarray, j: int) -> StepFunction:
    """Delta_j as a spatial function, from the spectrum F on its own grid.

    When F.resolution < 0 the zero cell of the frequency grid is the ball
    Gamma^{-F.resolution}, which holds the bands 0..-F.resolution; F is
    constant there, so those blocks are F(0) times the kernel of phi_j.
    """
    wide = -F.resolution
    if j <= wide:
        c0 = complex(F.data.reshape(-1)[0]) if F.data.size else 0j
        kernel = inverse_fourier(phi_j(F.params, j))
        return kernel * c0
    return inverse_fourier(F.with_data(np.where(_band_mask(v, j), F.data, 0)))


def delta_j(f: StepFunction, j: int) -> StepFunction:
    """Delta_j f = F^{-1}(phi_j F f)."""
    if j < 0:
        raise ValueError("j must be >= 0")
    F, v = _spectrum(f)
    return _block(F, v, j)


@dataclass(frozen=True)
class LPDecomposition:
    blocks: tuple[StepFunction, ...]
    n: int

    def reconstruct(self) -> StepFunction:
        total = self.blocks[0]
        for b in self.blocks[1:]:
            total = total + b
        return total

    def band_violation(self) -> float:
        """Largest |F(Delta_j f)| found outside the j-th band."""
        return max(band_leak(b, j) for j, b in enumerate(self.blocks))


def band_leak(u: StepFunction, j: int) -> float:
    """Largest |Fu| outside the j-th band (0 when u is band-limited to it)."""
    F, v = _spectrum(u)
    outside = np.array(~_band_mask(v, j))
    if F.resolution < 0:
        # the zero cell covers bands 0..-F.resolution at once
        outside[(0,) * F.ndigits] = True
    vals = np.abs(F.data[outside])
    return float(vals.max()) if vals.size else 0.0


def lp_decompose(f: StepFunction) -> LPDecomposition:
    """All nonzero blocks: supp Ff lies in Gamma^resolution, so blocks with
    j > max(resolution, 0) vanish."""
    F, v = _spectrum(f)
    n = max(f.resolution, 0)
    return LPDecomposition(tuple(_block(F, v, j) for j in range(n + 1)), n)


def block_norms(f: StepFunction, r: float) -> list[float]:
    return [lr_norm(b, r) for b in lp_decompose(f).blocks]


def combine_blocks(norms, s: float, t: float, q: int) -> float:
    """(sum_j q^{s j t} a_j^t)^{1/t}, or the sup over j when t = inf."""
    w = np.array([float(q) ** (s * j) * a for j, a in enumerate(norms)])
    if w.size == 0:
        return 0.0
    if math.isinf(t):
        return float(w.max())
    return float(np.sum(w**t) ** (1.0 / t))


def besov_norm(f: StepFunction, bp: BesovParams) -> float:
    return combine_blocks(block_norms(f, bp.r), bp.s, bp.t, f.params.q)


def besov_table(f: StepFunction, bp: BesovParams) -> list[tuple[int, float, float]]:
    """Rows (j, ||Delta_j f||_r, q^{sj} ||Delta_j f||_r)."""
    q = f.params.q
    return [(j, a, float(q) ** (bp.s * j) * a) for j, a in enumerate(block_norms(f, bp.r))]


def hs2_norm(M: StepFunction, sigma: float) -> float:
    """||<.>^sigma (transform of M)||_2 for a symbol M on either side."""
    K = inverse_fourier(M) if M.side == FREQUENCY else fourier(M)
    return lr_norm(weighted(K, sigma), 2)


def hs2_norm_unitary(M: StepFunction, sigma: float) -> float:
    """The same norm computed as ||F^{-1} <.>^sigma F M||_2 (with the roles of
    F and F^{-1} swapped for frequency-side symbols)."""
    if M.side == FREQUENCY:
        back = fourier(weighted(inverse_fourier(M), sigma))
    else:
        back = inverse_fourier(weighted(fourier(M), sigma))
    return lr_norm(back, 2)


def ptype_derivative(f: StepFunction, alpha: float) -> StepFunction:
    """f^{<alpha>} = F^{-1}[<xi>^alpha F f]; alpha < 0 gives the p-type integral."""
    return apply_multiplier(bracket_power(alpha), f)


@dataclass(frozen=True)
class AGammaRecord:
    j: int
    s: float
    sup_value: float
    bound: float
    bound_ratio: float
    unit_scale_ratio: float


def check_a_gamma_condition(params: FieldParams, j: int, s: float) -> AGammaRecord:
    """sup_x |(phi_j check)^{<s>}(x)| against q^{-j + js}.

    ``unit_scale_ratio`` divides by q^{j + js} instead, which is the scale
    of the inverse transform of an annulus of radius q^j.
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if j < 0:
        raise ValueError("j must be >= 0")
    kernel = inverse_fourier(phi_j(params, j))
    d = ptype_derivative(kernel, s)
    sup = float(np.max(np.abs(d.data)))
    q = float(params.q)
    bound = q ** (-j + j * s)
    return AGammaRecord(j, s, sup, bound, sup / bound, sup / q ** (j + j * s))


def dilate_symbol(M: StepFunction, k: int) -> StepFunction:
    """xi -> M(p^{-k} xi) as a relabeling of cells (either side)."""
    return StepFunction(M.params, M.resolution + k, M.support - k, M.data, M.side)


def radial_frequency(params: FieldParams, shell_values: dict[int, complex], inner: complex,
                     inner_level: int) -> StepFunction:
    """Frequency function equal to ``shell_values[l]`` on |xi| = q^{-l} for
    l < inner_level and to ``inner`` on Gamma^{-inner_level}."""
    lmin = min(shell_values) if shell_values else inner_level
    f = StepFunction.zeros(params, inner_level, -lmin, FREQUENCY)
    v = valuation_grid(params, f.resolution, f.support)
    arr = np.where(np.isinf(v), inner, 0).astype(complex)
    for l, val in shell_values.items():
        arr = np.where(v == l, val, arr)
    return f.with_data(arr)

