import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfbesov.field import FieldElement, field_init
from lfbesov.funcfile import FunctionDoc, FunctionFileError, Term, emit, parse, read_function, write_function
from lfbesov.functions import FREQUENCY, allclose, ball_indicator

from conftest import fields, mono, step_functions

DOC = """{
  "field": {"p": 2, "c": 1},
  "side": "spatial",
  "resolution": 1,
  "support": 1,
  "terms": [
    {"center": "q=2^1; 1@-1,1@0", "level": 1, "coef": [1.0, 0.0]},
    {"center": "q=2^1;", "level": 0, "coef": [0.5, -2.0]}
  ]
}
"""


def test_parse_and_emit_exact():
    doc = parse(DOC)
    assert doc.p == 2 and len(doc.terms) == 2
    assert doc.terms[1].coef == complex(0.5, -2.0)
    assert emit(doc) == DOC


def test_whitespace_insensitive():
    squashed = " ".join(DOC.split())
    assert emit(parse(squashed)) == DOC


def test_function_value():
    f = parse(DOC).to_function()
    F = field_init(2)
    want = ball_indicator(F, FieldElement.from_map(F, {-1: 1, 0: 1}), 1, support=1) \
        + ball_indicator(F, None, 0, resolution=1, coef=0.5 - 2j)
    assert allclose(f, want)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_roundtrip(tmp_path_factory, data):
    F = data.draw(fields())
    f = data.draw(step_functions(F, 1))
    path = tmp_path_factory.mktemp("ff") / "f.json"
    write_function(path, f)
    g = read_function(path)
    assert allclose(g, f, atol=0)
    assert emit(parse(emit(f))) == emit(f)


def test_frequency_side_and_tuple_digits():
    F = field_init(2, 2)
    f = ball_indicator(F, mono(F, -1, 3), 0, side=FREQUENCY)
    text = emit(f)
    assert '"side": "frequency"' in text and "(1,1)@-1" in text
    assert allclose(parse(text).to_function(), f)


def _offset_of(text, needle):
    return len(text[: text.index(needle)].encode())


@pytest.mark.parametrize("bad,needle", [
    (DOC.replace('"level": 1,', '"level": 7,'), "7"),
    (DOC.replace('"q=2^1; 1@-1,1@0"', '"q=2^1; 3@0"'), '"q=2^1; 3@0"'),
    (DOC.replace('[0.5, -2.0]', '[0.5]'), "[0.5]"),
    (DOC.replace('"support": 1', '"support": x'), "x"),
    (DOC.replace('"side": "spatial"', '"side": "both"'), '"both"'),
    (DOC.replace('"terms"', '"extra": 1, "terms"'), '"extra"'),
    (DOC.replace('"level": 0,', '"level": 0, "level": 0,'), '"level": 0,', ),
])
def test_errors_carry_byte_offsets(bad, needle):
    with pytest.raises(FunctionFileError) as info:
        parse(bad)
    err = info.value
    assert err.offset is not None and str(err).startswith(f"byte {err.offset}:")
    if needle != '"level": 0,':
        assert err.offset == _offset_of(bad, needle)


def test_syntax_error_and_empty():
    with pytest.raises(FunctionFileError) as info:
        parse('{"field": {"p": 2, "c": 1}, "resolution": [1,')
    assert info.value.offset is not None
    with pytest.raises(FunctionFileError):
        parse("")
    with pytest.raises(FunctionFileError):
        parse('{"field": {"p": 2, "c": 1}}')


def test_non_ascii_offsets_count_bytes():
    text = '{"field": {"p": 2, "c": 1}, "resolution": 1, "support": 0, "noteé": 1, "terms": []}'
    with pytest.raises(FunctionFileError) as info:
        parse(text)
    assert info.value.offset == _offset_of(text, '"note')
