import pytest
from hypothesis import given
from hypothesis import strategies as st

from apnlab.codec import (ALPHABET, decode, encode, known_representatives, published_gamma_rank_of_code, read_c64,
                          representative)
from apnlab.errors import DomainError, ParseError
from apnlab.vecfun import VectorialFunction, is_apn


def test_decode_prefix_and_alphabet():
    F = representative(1).function
    assert F.table[:3].tolist() == [0, 0, 0]
    assert decode("A" * 64).table.tolist() == [0] * 64
    assert decode("/" * 64).table.tolist() == [63] * 64


def test_decode_all_rows_apn():
    for r in known_representatives():
        F = r.function
        assert is_apn(F) and F.table[0] == 0


def test_round_trips():
    for r in known_representatives():
        assert encode(decode(r.code)) == r.code
    assert encode(VectorialFunction.zero(6, 6)) == "A" * 64
    assert encode(VectorialFunction.identity(6)) == ALPHABET


@given(st.lists(st.integers(0, 63), min_size=64, max_size=64))
def test_encode_decode_identity(vals):
    F = VectorialFunction(6, 6, vals)
    assert decode(encode(F)) == F


@given(st.text(alphabet=ALPHABET, min_size=64, max_size=64))
def test_decode_encode_identity(code):
    assert encode(decode(code)) == code


def test_parse_errors():
    with pytest.raises(ParseError):
        decode("A" * 63)
    with pytest.raises(ParseError) as exc:
        decode("A" * 10 + "!" + "A" * 53)
    assert exc.value.position == 10
    with pytest.raises(DomainError):
        encode(VectorialFunction.zero(6, 5))


def test_dataset():
    reps = known_representatives()
    assert len(reps) == 14 and len({r.label for r in reps}) == 14
    assert representative(6).gamma_rank_expected == 1300
    assert representative(13).gamma_rank_expected == 1102
    with pytest.raises(DomainError):
        representative(15)


def test_published_rank_offset():
    assert published_gamma_rank_of_code(1) == 1300
    assert published_gamma_rank_of_code(13) == 1166


def test_read_c64(tmp_path):
    p = tmp_path / "x.c64"
    p.write_text("# two functions\n" + representative(2).code + "\n\n" + "A" * 64 + "  # zero\n")
    fs = read_c64(p)
    assert len(fs) == 2 and fs[0] == representative(2).function
