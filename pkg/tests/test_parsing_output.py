import json
import math
from fractions import Fraction

import numpy as np
import pytest

from ccarray.output import emit_table, profile_from_json, render_csv, state_to_json, states_document
from ccarray.parsing import parse_angle, parse_angle_list, parse_quantity, parse_sweep
from ccarray.scattering import SWEEP_COLUMNS, sweep
from ccarray.spectral import bound_state_single, resonant_state


@pytest.mark.parametrize(
    "text,value",
    [("pi/2", math.pi / 2), ("0.2pi", 0.2 * math.pi), ("2*pi/5", 2 * math.pi / 5), ("-pi/8", -math.pi / 8), ("0.01", 0.01), ("pi", math.pi)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, rel=1e-15)


def test_parse_angle_rejects_junk():
    with pytest.raises(ValueError):
        parse_angle("tau/2")


def test_parse_angle_list():
    assert parse_angle_list("0.01,pi/8, pi/4") == [0.01, math.pi / 8, math.pi / 4]


def test_parse_sweep():
    s = parse_sweep("-1:3:401")
    assert (s.start, s.stop, s.count) == (-1.0, 3.0, 401)
    assert parse_sweep("0:pi:5", angle=True).stop == math.pi
    for bad in ("1:0:5", "0:1:1", "0:1"):
        with pytest.raises(ValueError):
            parse_sweep(bad)


def test_parse_quantity():
    q = parse_quantity("2pi*4.8GHz", ("Hz",))
    assert q.coefficient == Fraction(48, 10) * 10**9 * 2 and q.pi_power == 1
    assert float(parse_quantity("44 MHz")) == 44e6
    assert float(parse_quantity("1uA")) == pytest.approx(1e-6)
    assert float(parse_quantity("1.6e-10F/m")) == pytest.approx(1.6e-10)
    assert parse_quantity("0.8").unit == ""
    with pytest.raises(ValueError):
        parse_quantity("4GHz", ("A",))
    with pytest.raises(ValueError):
        parse_quantity("4 parsecs")


def test_header_only_csv():
    assert render_csv([], SWEEP_COLUMNS) == ",".join(SWEEP_COLUMNS) + "\n"


def test_single_row_columns():
    text = emit_table(sweep("single", "k", 0.1, 0.2, 2, lam=0.2)[:1], SWEEP_COLUMNS)
    header, row, _ = text.split("\n")
    assert header.split(",") == list(SWEEP_COLUMNS)
    assert len(row.split(",")) == len(SWEEP_COLUMNS)


def test_csv_round_trips_floats_exactly():
    rows = sweep("single", "lambda", -1, 3, 7, k=0.3)
    text = emit_table(rows, SWEEP_COLUMNS)
    parsed = [line.split(",") for line in text.strip().split("\n")[1:]]
    assert [float(p[5]) for p in parsed] == [r["R"] for r in rows]


def test_json_table_schema():
    doc = json.loads(emit_table(sweep("single", "k", 0.1, 0.2, 3, lam=0.2), SWEEP_COLUMNS, "json"))
    assert doc["schema_version"] == 1 and doc["columns"] == list(SWEEP_COLUMNS) and len(doc["rows"]) == 3


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_table([], SWEEP_COLUMNS, "xml")


def test_state_json_round_trip():
    st = bound_state_single(0.2)
    doc = json.loads(json.dumps(state_to_json(st)))
    assert set(doc) == {"parity", "energy", "decay", "x", "profile"}
    assert set(doc["profile"][0]) == {"j", "re", "im", "prob"}
    back = profile_from_json(doc)
    np.testing.assert_array_equal(back.values, st.profile.values)
    np.testing.assert_array_equal(back.sites, st.profile.sites)
    assert doc["x"] == math.pi  # above band: alternating sign


def test_resonant_state_json():
    doc = state_to_json(resonant_state(2, 5, "odd"))
    assert doc["x"] == pytest.approx(2 * math.pi / 5) and doc["decay"] == 0.0


def test_states_document_is_versioned():
    doc = states_document("single_bound", {"lambda": 0.2}, [bound_state_single(0.2)])
    assert doc["schema_version"] == 1 and doc["kind"] == "single_bound"
