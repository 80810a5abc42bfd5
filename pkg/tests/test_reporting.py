"""Serialization contract: determinism, gap rows, atomic writes."""

import os

import numpy as np
import pytest

from jcgaudin import model, reporting
from jcgaudin.errors import IoError


def test_fmt_float_17_digits():
    assert reporting.fmt_float(1.0 / 3.0) == "0.33333333333333331"
    assert reporting.fmt_float(2.0) == "2"


def test_to_jsonable_complex_and_arrays():
    out = reporting.to_jsonable({"z": 1 + 2j, "v": np.arange(3.0)})
    assert out == {"z": {"re": 1.0, "im": 2.0}, "v": [0.0, 1.0, 2.0]}


def test_dump_json_is_deterministic():
    payload = {"b": 1.5, "a": [1 + 1j, 2.0], "nested": {"x": np.float64(3.0)}}
    one = reporting.dump_json(payload)
    two = reporting.dump_json(payload)
    assert one == two
    assert one.endswith("\n")
    # declaration order survives; keys are not sorted behind the caller's back
    assert one.index('"b"') < one.index('"a"')


def test_trajectory_csv_layout():
    p = model.make_params(2, 1.0, 0.0, [-1.0, 1.0])
    spins = np.zeros((2, 3))
    spins[:, 2] = [1.0, -1.0]
    st = model.make_state(p, 0.5 + 0.25j, spins)
    H = model.hamiltonians(p, st)
    text = reporting.trajectory_csv(p, [0.0], [st], [H])
    lines = text.strip().split("\n")
    assert lines[0] == ("t,re_b,im_b,s1_x,s1_y,s1_z,s2_x,s2_y,s2_z,"
                       "H_1,H_2,H_3")
    assert len(lines) == 2
    assert lines[1].split(",")[1] == "0.5"


def test_divisor_csv_gap_row():
    times = [0.0, 1.0, 2.0]
    pts = np.array([[1 + 1j, 2 + 2j], [0j, 0j], [3 + 3j, 4 + 4j]])
    gaps = np.array([False, True, False])
    text = reporting.divisor_csv(times, pts, gaps)
    lines = text.strip().split("\n")
    assert lines[0] == "t,re_lambda_1,im_lambda_1,re_lambda_2,im_lambda_2"
    assert lines[2] == "1,,,,"
    assert all(line.count(",") == 4 for line in lines)


def test_write_text_atomic(tmp_path):
    target = tmp_path / "out.json"
    reporting.write_text(str(target), "hello\n")
    assert target.read_text() == "hello\n"
    leftovers = [f for f in os.listdir(tmp_path) if f.startswith(".jcg-tmp")]
    assert leftovers == []


def test_write_text_failure_leaves_no_partial(tmp_path):
    missing = tmp_path / "no" / "such" / "dir" / "x.json"
    with pytest.raises(IoError):
        reporting.write_text(str(missing), "data")
    assert not (tmp_path / "no").exists()


def test_write_text_stdout(capsys):
    reporting.write_text(None, "to-stdout\n")
    assert capsys.readouterr().out == "to-stdout\n"
