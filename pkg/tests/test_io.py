import json

import numpy as np
import pytest

from genburgers.field import Field
from genburgers.io import (fmt, pick_plot_times, read_solution_csv, write_json, write_profiles_svg,
                           write_solution_csv)


def _fields():
    xs = np.linspace(-1, 1, 17)
    return [Field(t, xs, np.tanh(xs / (0.1 + t)) + 1e-17 * t, -1.0, 1.0) for t in (0.01, 0.1 / 3)]


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(np.float64(1 / 3)) == repr(1 / 3)
    assert fmt(np.int64(3)) == "3" and fmt(np.bool_(True)) == "true" and fmt("x") == "x"


def test_solution_csv_round_trip(tmp_path):
    fields = _fields()
    write_solution_csv(tmp_path / "s.csv", fields)
    back = read_solution_csv(tmp_path / "s.csv")["mild"]
    assert [f.t for f in back] == [f.t for f in fields]
    for a, b in zip(fields, back):
        assert np.array_equal(a.values, b.values) and np.array_equal(a.xs, b.xs)


def test_solution_csv_header(tmp_path):
    write_solution_csv(tmp_path / "s.csv", _fields(), "fd")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "source,t,x,u"
    assert lines[1].startswith("fd,0.01,-1.0,")


def test_json_sorted_and_finite(tmp_path):
    write_json(tmp_path / "m.json", {"b": np.float64(1.5), "a": [np.int64(2), float("inf")]})
    text = (tmp_path / "m.json").read_text()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [2, "inf"], "b": 1.5}


def test_pick_plot_times():
    xs = np.linspace(-1, 1, 5)
    fields = [Field(t, xs, xs, -1, 1) for t in np.geomspace(1e-4, 1, 50)]
    picked = pick_plot_times(fields, 6)
    assert len(picked) == 6 and picked[0] is fields[0] and picked[-1] is fields[-1]


def test_svg_is_deterministic(tmp_path):
    write_profiles_svg(tmp_path / "a.svg", _fields(), "t")
    write_profiles_svg(tmp_path / "b.svg", _fields(), "t")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
