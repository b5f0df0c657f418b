import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pumbilic.errors import ParseError
from pumbilic.io import dump_jet, load_jet, parse_jet, read_polyline, write_polyline
from pumbilic.jet_model import MongeJet
from pumbilic.tracer import Polyline

floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_parse_minimal_and_empty():
    assert parse_jet('{"k3": 1, "a": 2.5}') == MongeJet(k3=1.0, a=2.5)
    assert parse_jet("") == MongeJet()
    assert parse_jet("{}") == MongeJet()


@pytest.mark.parametrize("text,fragment", [
    ('{"k3": 1,', "line 1"),
    ("[1, 2]", "JSON object"),
    ('{"qq": 1}', "unknown coefficient 'qq'"),
    ('{"a": "x"}', "field 'a'"),
    ('{"a": true}', "field 'a'"),
    ('{"a": NaN}', "not finite"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_jet(text)


def test_dump_load(tmp_path):
    jet = MongeJet(k=0.1, k3=1.0, Q211=-2.5)
    p = tmp_path / "j.json"
    p.write_text(dump_jet(jet))
    assert load_jet(p) == jet
    with pytest.raises(ParseError):
        load_jet(tmp_path / "missing.json")


@st.composite
def polylines(draw):
    n = draw(st.integers(1, 6))
    arr = lambda m: np.array(draw(st.lists(floats, min_size=n * m, max_size=n * m))).reshape(n, m)
    emb = arr(4) if draw(st.booleans()) else None
    slopes, charts = None, None
    if draw(st.booleans()):
        slopes = arr(1)[:, 0]
        charts = draw(st.lists(st.sampled_from(["P", "Q"]), min_size=n, max_size=n))
    return Polyline("F2", arr(3), arr(3), "boundary", emb, slopes, charts)


@pytest.mark.parametrize("fmt", ["json", "csv"])
@given(pl=polylines())
@settings(max_examples=40, deadline=None)
def test_polyline_round_trip_bit_identical(tmp_path_factory, fmt, pl):
    path = tmp_path_factory.mktemp("pl") / f"line.{fmt}"
    write_polyline(pl, path, fmt)
    back = read_polyline(path, fmt)
    assert back.foliation == pl.foliation and back.termination == pl.termination
    for name in ("points", "tangents", "embedded", "slopes"):
        a, b = getattr(pl, name), getattr(back, name)
        if a is None:
            assert b is None
        else:
            assert np.array_equal(np.asarray(a).view(np.uint64), np.asarray(b).view(np.uint64))
    assert back.charts == pl.charts
