import numpy as np
import pytest
from hypothesis import strategies as st

from lfbesov.field import FieldElement, field_init
from lfbesov.functions import from_terms

FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1)]


@pytest.fixture(params=FIELDS, ids=lambda pc: f"q={pc[0]**pc[1]}")
def params(request):
    return field_init(*request.param)


def fields():
    return st.sampled_from(FIELDS).map(lambda pc: field_init(*pc))


@st.composite
def elements(draw, params, lo=-3, hi=4):
    n = hi - lo
    digits = draw(st.lists(st.integers(0, params.q - 1), min_size=n, max_size=n))
    return FieldElement.from_map(params, {lo + i: d for i, d in enumerate(digits)})


@st.composite
def step_functions(draw, params, level=2, terms=3):
    """Small random test functions on the (level, level) grid."""
    out = []
    for _ in range(draw(st.integers(1, terms))):
        lev = draw(st.integers(-level, level))
        center = draw(elements(params, lo=-level, hi=max(lev, -level)))
        re = draw(st.floats(-2, 2, allow_nan=False))
        im = draw(st.floats(-2, 2, allow_nan=False))
        out.append((center, lev, complex(re, im)))
    return from_terms(params, out, resolution=level, support=level)


def mono(params, e, d=1):
    return FieldElement.monomial(params, e, d)


def brute_lr(values, measure, r):
    a = np.abs(np.asarray(values))
    if np.isinf(r):
        return float(a.max())
    return float((np.sum(a**r) * measure) ** (1 / r))
