import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtreveal.ecdf import INTERP, STEP
from rtreveal.io import (ObservationError, RunConfig, Schema, fmt, read_curves, read_group, read_observations,
                         write_curves, write_group, write_observations)
from rtreveal.model import DEFAULT_BOUNDS, GroupData, HyperbolicSymmetric, Logistic, ObservationTable, induce_data

positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["L", "M", "H"]), st.integers(0, 1), positive,
                          st.one_of(st.none(), positive)), min_size=1, max_size=30))
def test_observation_roundtrip(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("obs") / "obs.csv"
    tab = ObservationTable(np.array([r[0] for r in rows], dtype=object), np.array([r[1] for r in rows]),
                           np.array([r[2] for r in rows]), np.array([np.nan if r[3] is None else r[3] for r in rows]))
    write_observations(path, tab, {"seed": 3})
    back = read_observations(path)
    assert list(back.group) == list(tab.group)
    assert np.array_equal(back.response, tab.response)
    assert np.allclose(back.time, tab.time, rtol=1e-12, atol=0)
    assert np.array_equal(np.isnan(back.baseline), np.isnan(tab.baseline))
    ok = ~np.isnan(tab.baseline)
    assert np.allclose(back.baseline[ok], tab.baseline[ok], rtol=1e-12, atol=0)


def test_line_numbered_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("# comment\ngroup_id,response,time,baseline_time\n"
                 "M,1,0.5,1.0\n"
                 "M,2,0.5,1.0\n"
                 "M,0,-1.0,1.0\n"
                 "M,0,0.4\n")
    with pytest.raises(ObservationError) as info:
        read_observations(p)
    msg = str(info.value)
    assert [ln for ln, _ in info.value.problems] == [4, 5, 6]
    assert "line 4" in msg and "'2'" in msg
    assert "line 5" in msg and "-1.0" in msg


def test_custom_schema_and_default_group(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("choice,rt\n1,0.3\n0,0.8\n")
    tab = read_observations(p, Schema(response="choice", time="rt", baseline=None), default_group="solo")
    assert list(tab.group) == ["solo", "solo"] and not tab.has_baseline
    with pytest.raises(ObservationError, match="missing columns"):
        read_observations(p)


def test_curves_roundtrip(tmp_path):
    p = tmp_path / "curve.csv"
    x = np.linspace(-1, 1, 7) / 3
    write_curves(p, {"x": x, "H": x ** 2}, {"kind": "h", "label": "M"})
    cols, meta = read_curves(p)
    assert np.array_equal(cols["x"], x) and np.array_equal(cols["H"], x ** 2)
    assert meta == {"kind": "h", "label": "M"}
    with pytest.raises(ValueError):
        write_curves(p, {"a": [1.0], "b": [1.0, 2.0]})


def test_group_roundtrip(tmp_path):
    g = induce_data(Logistic(0.3, 1), HyperbolicSymmetric(DEFAULT_BOUNDS))
    t = np.linspace(0.1, 1.1, 501)
    p = tmp_path / "g.csv"
    write_group(p, GroupData(g.p0, g.p1, g.F0, g.F1, g.bounds, "M", 10), t)
    back = read_group(p)
    assert back.label == "M" and back.n == 10 and back.p0 == g.p0
    for i in (0, 1):
        assert np.max(np.abs(back.sub(i, t) - g.sub(i, t))) <= 1e-12
    assert back.F0.mode == INTERP


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(np.float64(1 / 3)) == repr(1 / 3)
    assert fmt(True) == "true" and fmt(None) == "" and fmt(np.int64(4)) == "4"


def test_run_config(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"input": "a.csv", "b": 200, "seed": 4, "mode": STEP}))
    cfg = RunConfig.from_file(p)
    assert cfg.input == ("a.csv",) and cfg.b == 200 and cfg.require_seed("test") == 4
    assert cfg.merged(b=None, seed=9).seed == 9
    p.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError, match="bogus"):
        RunConfig.from_file(p)
    with pytest.raises(ValueError, match="seed"):
        RunConfig().require_seed("test")
    with pytest.raises(ValueError):
        RunConfig(cstar="cubic")
