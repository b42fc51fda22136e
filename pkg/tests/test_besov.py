import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfbesov.besov import (
    BesovParams,
    band_leak,
    besov_norm,
    besov_table,
    block_norms,
    check_a_gamma_condition,
    delta_j,
    dilate_symbol,
    hs2_norm,
    hs2_norm_unitary,
    lp_decompose,
    parse_exponent,
    phi_j,
    ptype_derivative,
    radial_frequency,
    sigma_r,
)
from lfbesov.field import FieldElement, coset_reps, field_init
from lfbesov.fourier import fourier
from lfbesov.functions import (
    FREQUENCY,
    StepFunction,
    allclose,
    ball_indicator,
    character_eval,
    lr_norm,
    max_abs_diff,
    step_eval,
    step_translate,
)
from lfbesov.operators import dilate

from conftest import elements, fields, mono, step_functions

INF = math.inf


def ball_block_oracle(params, k, j):
    """Delta_j Phi_{P^k} by direct integration of q^{-k} chi_x(xi) over the
    j-th band, cell by cell; values on the cosets of P^k inside P^{-1}."""
    q = params.q
    # band cells: reps of Gamma^j / Gamma^{-k} (frequencies of level -j..k-1)
    cells = [c.rep for c in coset_reps(params, k, j)]
    band = [xi for xi in cells if (xi.is_zero and j == 0) or (not xi.is_zero and
            ((j == 0 and xi.lo >= 0) or xi.lo == -j))]
    measure = float(q) ** (-k)
    out = {}
    for cid in coset_reps(params, k, 1):
        x = cid.rep
        out[x] = sum(character_eval(xi, x) for xi in band) * measure * q ** (-k)
    return out


def closed_block_norm(q, k, j, r):
    """||Delta_j Phi_{P^k}||_r in closed form."""
    if j == 0:
        return float(q) ** (-k)
    if math.isinf(r):
        return float(q) ** (-k) * (q**j - q ** (j - 1))
    inner = (q**j - q ** (j - 1)) ** r * q ** (-j) + q ** ((j - 1) * r) * (q ** (-(j - 1)) - q ** (-j))
    return (float(q) ** (-k * r) * inner) ** (1 / r)


def closed_besov(q, k, s, r, t):
    a = [closed_block_norm(q, k, j, r) for j in range(k + 1)]
    w = [q ** (s * j) * x for j, x in enumerate(a)]
    return max(w) if math.isinf(t) else sum(x**t for x in w) ** (1 / t)


def W(q, n, sigma):
    return 1 + (1 - 1 / q) * sum(q ** (l * (2 * sigma + 1)) for l in range(1, n + 1))


class TestFamily:
    def test_partition_of_unity(self, params):
        for n in range(5):
            total = phi_j(params, 0)
            for j in range(1, n + 1):
                total = total + phi_j(params, j)
            assert max_abs_diff(total, ball_indicator(params, None, -n, FREQUENCY)) == 0

    def test_annulus_values_and_mass(self, params):
        q = params.q
        p1 = phi_j(params, 1)
        assert step_eval(p1, mono(params, -1)) == 1
        assert step_eval(p1, mono(params, 0)) == 0
        assert step_eval(p1, FieldElement.zero(params)) == 0
        for j in range(1, 5):
            assert lr_norm(phi_j(params, j), 1) == pytest.approx(q**j - q ** (j - 1))

    def test_self_similarity(self, params):
        for j in range(1, 5):
            assert allclose(phi_j(params, j), dilate_symbol(phi_j(params, 1), 1 - j))

    def test_sigma_r(self):
        assert sigma_r(2) == 0 and sigma_r(1) == 0 and sigma_r(0.5) == 1
        assert sigma_r(INF) == 0

    def test_params(self):
        assert BesovParams.parse("1", "inf", "2").r == INF
        assert parse_exponent("Infinity") == INF
        with pytest.raises(ValueError):
            BesovParams(1, 0, 1)


class TestBlocks:
    def test_phi_d(self, params):
        D = ball_indicator(params, None, 0)
        assert allclose(delta_j(D, 0), D)
        dec = lp_decompose(D)
        assert dec.n == 0 and len(dec.blocks) == 1
        bigger = D.refine(3, 1)
        for j in range(1, 4):
            assert delta_j(bigger, j).is_zero(1e-15)

    @pytest.mark.parametrize("pc", [(2, 1), (3, 1), (2, 2)])
    def test_ball_blocks_against_integration(self, pc):
        F = field_init(*pc)
        for k in (1, 2):
            dec = lp_decompose(ball_indicator(F, None, k))
            assert dec.n == k
            for j in range(k + 1):
                blk = dec.blocks[j]
                for x, want in ball_block_oracle(F, k, j).items():
                    assert step_eval(blk, x) == pytest.approx(want, abs=1e-12)

    def test_ball_blocks_nonzero_exactly_to_k(self, params):
        dec = lp_decompose(ball_indicator(params, None, 3))
        assert [not b.is_zero(1e-14) for b in dec.blocks] == [True] * 4

    def test_zero(self, params):
        dec = lp_decompose(StepFunction.zeros(params, 2, 1))
        assert all(b.is_zero() for b in dec.blocks)
        assert besov_norm(StepFunction.zeros(params, 2, 1), BesovParams(1, 2, 2)) == 0

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_reconstruction_orthogonality_idempotence(self, data):
        F = data.draw(fields())
        f = data.draw(step_functions(F, 2))
        dec = lp_decompose(f)
        assert max_abs_diff(dec.reconstruct(), f) <= 1e-9
        assert dec.band_violation() <= 1e-12
        for j, b in enumerate(dec.blocks):
            assert max_abs_diff(delta_j(b, j), b) <= 1e-12
            for k in range(dec.n + 1):
                if k != j:
                    assert delta_j(b, k).is_zero(1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.data(), st.integers(0, 6))
    def test_wide_zero_cell_blocks(self, data, k):
        # after dilation the frequency zero cell spans several bands at once
        F = data.draw(fields())
        f = dilate(data.draw(step_functions(F, 1)), k)
        wide = f.refine(f.resolution, max(f.support, 0))
        for a, b in zip(lp_decompose(f).blocks, lp_decompose(wide).blocks):
            assert max_abs_diff(a, b) <= 1e-12

    def test_band_leak(self, params):
        D = ball_indicator(params, None, 0)
        assert band_leak(D, 0) == 0
        assert band_leak(D, 1) == pytest.approx(1)
        assert band_leak(ball_indicator(params, None, -1), 0) == 0
        assert band_leak(ball_indicator(params, None, 1), 0) > 0


class TestBesovNorm:
    @pytest.mark.parametrize("s", [-1.0, 0.5, 2.0])
    @pytest.mark.parametrize("r", [0.5, 2.0, INF])
    @pytest.mark.parametrize("t", [1.0, 2.0, INF])
    def test_phi_d_is_one(self, s, r, t):
        for pc in [(2, 1), (3, 1)]:
            D = ball_indicator(field_init(*pc), None, 0)
            assert besov_norm(D, BesovParams(s, r, t)) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0, INF])
    def test_block_norms_closed_form(self, params, r):
        for k in range(0, 6):
            got = block_norms(ball_indicator(params, None, k), r)
            want = [closed_block_norm(params.q, k, j, r) for j in range(k + 1)]
            assert got == pytest.approx(want, rel=1e-9)

    def test_table(self, params):
        rows = besov_table(ball_indicator(params, None, 2), BesovParams(1, 2, 2))
        assert [j for j, _, _ in rows] == [0, 1, 2]
        for j, a, w in rows:
            assert w == pytest.approx(params.q**j * a)

    @settings(max_examples=20, deadline=None)
    @given(st.data())
    def test_translation_invariance(self, data):
        F = data.draw(fields())
        f = data.draw(step_functions(F, 2))
        z = data.draw(elements(F, -2, 3))
        bp = BesovParams(1.0, 2.0, 1.0)
        assert besov_norm(step_translate(f, z), bp) == pytest.approx(besov_norm(f, bp), rel=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(st.data(), st.floats(-2, 2), st.floats(0, 2))
    def test_monotone_in_s(self, data, s, ds):
        F = data.draw(fields())
        f = data.draw(step_functions(F, 2))
        for r, t in [(1, 1), (2, INF), (0.5, 2)]:
            assert besov_norm(f, BesovParams(s, r, t)) <= besov_norm(f, BesovParams(s + ds, r, t)) * (1 + 1e-12)


class TestHs2:
    def test_phi0(self, params):
        for sigma in (0.5, 1.0, 2.0):
            assert hs2_norm(phi_j(params, 0), sigma) == pytest.approx(1)

    @pytest.mark.parametrize("sigma", [1.0, 1.5])
    def test_dilated_cutoff(self, params, sigma):
        q = params.q
        for k in range(0, 7):
            M = dilate_symbol(phi_j(params, 0), k)  # phi_0(t^{-k} xi)
            got = hs2_norm(M, sigma)
            assert got == pytest.approx(math.sqrt(q ** (-2 * k) * W(q, k, sigma)), rel=1e-10)
            assert got <= q ** (k * (sigma - 0.5)) * (1 + 1e-12)
            assert hs2_norm_unitary(M, sigma) == pytest.approx(got, rel=1e-9)

    @pytest.mark.parametrize("sigma", [1.0, 1.5])
    def test_dilated_annulus(self, params, sigma):
        q = params.q
        for k in range(1, 6):
            for j in range(1, k + 1):
                m = k - j + 1
                M = dilate_symbol(phi_j(params, 1), k + 1 - j)  # phi_1(t^{j-k-1} xi)
                want2 = (q ** (1 - m) - q ** (-m)) ** 2 * W(q, m - 1, sigma) \
                    + q ** (-2 * m) * q ** (2 * sigma * m) * q**m * (1 - 1 / q)
                got = hs2_norm(M, sigma)
                assert got == pytest.approx(math.sqrt(want2), rel=1e-10)
                assert got <= (q - 1) ** 0.5 * q ** (m * (sigma - 0.5))

    def test_radial_frequency(self, params):
        f = radial_frequency(params, {-1: 2.0, -2: 3.0}, 1.0, 0)
        assert step_eval(f, mono(params, -2)) == 3
        assert step_eval(f, mono(params, -1)) == 2
        assert step_eval(f, mono(params, 3)) == 1


class TestDerivatives:
    def test_order_zero_and_inverse(self, params):
        f = ball_indicator(params, mono(params, -1), 2, support=1) + 0.5j * ball_indicator(params, None, -1)
        assert allclose(ptype_derivative(f, 0), f)
        assert max_abs_diff(ptype_derivative(ptype_derivative(f, 1.3), -1.3), f) <= 1e-10

    def test_phi_d_fixed(self, params):
        D = ball_indicator(params, None, 0)
        for a in (-1.0, 0.5, 2.0):
            assert allclose(ptype_derivative(D, a), D)

    def test_ball_spectrum_weights(self, params):
        # <xi>^a on the annulus |xi| = q^j multiplies Delta_j by q^{ja}
        q = params.q
        f = ball_indicator(params, None, 3)
        d = ptype_derivative(f, 1.0)
        for j, (b, bd) in enumerate(zip(lp_decompose(f).blocks, lp_decompose(d).blocks)):
            assert max_abs_diff(bd, b * q**j) <= 1e-12

    def test_a_gamma(self, params):
        q = params.q
        for s in (0.5, 1.0, 2.0):
            r0 = check_a_gamma_condition(params, 0, s)
            assert r0.bound == 1 and r0.bound_ratio == pytest.approx(r0.sup_value)
            for j in range(1, 5):
                rec = check_a_gamma_condition(params, j, s)
                # the kernel of an annulus of radius q^j peaks at its mass q^j - q^{j-1}
                assert rec.sup_value == pytest.approx(q ** (j * s) * (q**j - q ** (j - 1)))
                assert rec.unit_scale_ratio == pytest.approx(1 - 1 / q)
        with pytest.raises(ValueError):
            check_a_gamma_condition(params, 1, 0.0)
