import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfbesov.field import FieldElement, coset_reps, field_init
from lfbesov.functions import (
    FREQUENCY,
    BallSpec,
    SideError,
    StepFunction,
    allclose,
    ball_indicator,
    bracket,
    character_eval,
    character_sum,
    from_terms,
    haar_measure,
    lr_norm,
    step_algebra,
    step_eval,
    step_translate,
    valuation_grid,
    weighted,
)

from conftest import brute_lr, elements, fields, mono, step_functions


def phi_ball(F, level, center=None, **kw):
    return ball_indicator(F, center, level, **kw)


class TestCharacter:
    def test_trivial_on_unit_ball(self, params):
        xi = FieldElement.monomial(params, 0)
        for cid in coset_reps(params, 2, 0):
            assert character_eval(xi, cid.rep) == pytest.approx(1)

    def test_f2_inverse_t(self):
        F = field_init(2)
        assert character_eval(mono(F, 0), mono(F, -1)) == pytest.approx(-1)

    def test_direct_formula_gf9(self):
        # chi(x) depends only on tr(a_{-1}); compare with the product digit
        F = field_init(3, 2)
        for a in range(F.q):
            x = FieldElement.from_map(F, {-1: a, 0: 4})
            want = cmath.exp(2j * math.pi * int(F.gf_trace[a]) / 3)
            assert character_eval(mono(F, 0), x) == pytest.approx(want)
            prod = mono(F, 0) * x
            assert prod.digit(-1) == a

    def test_nontrivial_on_p_minus_one(self, params):
        vals = {round(character_eval(mono(params, 0), mono(params, -1, d)).real, 9)
                for d in range(params.q)}
        assert len(vals) > 1

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_additive_law(self, data):
        F = data.draw(fields())
        xi, x, y = (data.draw(elements(F, -2, 3)) for _ in range(3))
        assert character_eval(xi, x + y) == pytest.approx(character_eval(xi, x) * character_eval(xi, y))

    @pytest.mark.parametrize("m,M", [(1, 1), (2, 0), (0, 2)])
    def test_orthogonality(self, params, m, M):
        reps = [c.rep for c in coset_reps(params, m, M)]
        # the sum is N when xi annihilates P^{-M}, i.e. |xi| <= q^{-M}, else 0
        for cid in coset_reps(params, M + 1, m):
            xi = cid.rep
            s = character_sum(params, xi, reps)
            if xi.is_zero or xi.lo >= M:
                assert abs(s - len(reps)) <= 1e-9
            else:
                assert abs(s) <= 1e-9


class TestEvaluation:
    def test_examples(self, params):
        D = phi_ball(params, 0)
        assert step_eval(D, mono(params, 1)) == 1
        assert step_eval(D, mono(params, -1)) == 0
        f = 2 * phi_ball(params, 1) - D
        assert step_eval(f, mono(params, 0)) == pytest.approx(-1)

    def test_sparse_values(self, params):
        f = from_terms(params, [(mono(params, -1), 0, 2.0), (FieldElement.zero(params), 1, 1j)])
        vals = f.values
        assert len(vals) == params.q + 1  # the level-0 ball splits into q cells
        assert all(cid.level == f.resolution for cid in vals)

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_refinement_invariance(self, data):
        F = data.draw(fields())
        f = data.draw(step_functions(F, level=1))
        g = f.refine(f.resolution + 1, f.support + 1)
        for cid in coset_reps(F, g.resolution, g.support + 1):
            assert step_eval(g, cid.rep) == step_eval(f, cid.rep)
        for r in (0.5, 1, 2, math.inf):
            assert lr_norm(g, r) == pytest.approx(lr_norm(f, r), rel=1e-12)


class TestAlgebra:
    def test_examples(self, params):
        D, P1 = phi_ball(params, 0), phi_ball(params, 1)
        f = from_terms(params, [(mono(params, -1), 0, 1 + 2j)], resolution=1)
        assert (f + (-1) * f).is_zero()
        assert allclose(D * P1, P1)
        assert allclose((D + P1) ** 2, D + 3 * P1)
        assert allclose(step_algebra("conj", f), f.conj())
        assert allclose(step_algebra("scale", f, 2), f + f)

    def test_sides_do_not_mix(self, params):
        with pytest.raises(SideError):
            phi_ball(params, 0) + phi_ball(params, 0, side=FREQUENCY)

    def test_grid_of_result(self, params):
        f = phi_ball(params, 2) + phi_ball(params, -1)
        assert (f.resolution, f.support) == (2, 1)


class TestTranslate:
    def test_examples(self, params):
        D = phi_ball(params, 0)
        assert step_translate(D, FieldElement.zero(params)) is D
        assert allclose(step_translate(D, FieldElement.from_map(params, {0: 1, 2: 1})), D)
        g = step_translate(D, mono(params, -1))
        assert step_eval(g, mono(params, -1)) == 1
        assert step_eval(g, FieldElement.zero(params)) == 0
        assert allclose(g, phi_ball(params, 0, mono(params, -1)))

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_pointwise_and_norms(self, data):
        F = data.draw(fields())
        f = data.draw(step_functions(F, level=1))
        z = data.draw(elements(F, -2, 1))
        g = step_translate(f, z)
        for cid in coset_reps(F, 1, 3):
            assert step_eval(g, cid.rep) == step_eval(f, cid.rep - z)
        for r in (0.5, 1, 3, math.inf):
            assert lr_norm(g, r) == pytest.approx(lr_norm(f, r), rel=1e-12)


class TestNormsAndMeasure:
    def test_ball_norms(self, params):
        q = params.q
        for r in (0.5, 1, 2, math.inf):
            assert lr_norm(phi_ball(params, 0), r) == pytest.approx(1)
        for k in range(-2, 4):
            for r in (0.5, 1, 2.5):
                assert lr_norm(phi_ball(params, k), r) == pytest.approx(q ** (-k / r))

    def test_brute(self, params):
        f = from_terms(params, [(mono(params, -1), 0, 2.0), (FieldElement.zero(params), 1, -1j)])
        for r in (0.7, 2, math.inf):
            assert lr_norm(f, r) == pytest.approx(brute_lr(f.data.ravel(), f.cell_measure, r))

    def test_haar(self, params):
        q = params.q
        assert haar_measure(BallSpec(FieldElement.zero(params), 0)) == 1
        assert haar_measure(BallSpec(FieldElement.zero(params), 1)) == pytest.approx(1 / q)
        assert haar_measure(BallSpec(mono(params, -3), 2)) == pytest.approx(q**-2)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_quasi_triangle(self, data):
        F = data.draw(fields())
        f, g = data.draw(step_functions(F, 1)), data.draw(step_functions(F, 1))
        for r in (1, 2, math.inf):
            assert lr_norm(f + g, r) <= lr_norm(f, r) + lr_norm(g, r) + 1e-12
        for r in (0.3, 0.5, 0.9):
            assert lr_norm(f + g, r) ** r <= lr_norm(f, r) ** r + lr_norm(g, r) ** r + 1e-12


class TestGrids:
    def test_valuation_grid(self):
        F = field_init(2)
        v = valuation_grid(F, 1, 1).ravel()
        # cells ordered (a_{-1}, a_0): 0, t^0, t^-1, t^-1 + 1
        assert list(v) == [math.inf, 0, -1, -1]

    def test_weighted(self):
        F = field_init(3)
        f = phi_ball(F, 0, resolution=0, support=1)
        w = weighted(f + phi_ball(F, 0, mono(F, -1)), 1.0)
        assert step_eval(w, mono(F, -1)) == pytest.approx(3)
        assert step_eval(w, FieldElement.zero(F)) == pytest.approx(1)
        assert bracket(mono(F, 2)) == 1 and bracket(mono(F, -2)) == 9

    def test_empty_function_valid(self, params):
        z = StepFunction.zeros(params, 0, 0)
        assert z.size == 1 and lr_norm(z, 2) == 0
