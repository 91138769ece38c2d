"""Tests for plan, OA and report files."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from omepkit.constructions import SeriesVariant, build_a8, build_a12, build_omep_bl, build_series, catalog_design
from omepkit.errors import PlanFormatError, UnknownFactorError
from omepkit.field import oa_from_field
from omepkit.plan import Plan
from omepkit.storage import (
    PLAN_FORMAT,
    format_oa,
    load_json,
    load_oa,
    load_plan,
    load_plan_csv,
    parse_oa,
    plan_to_dict,
    read_plan,
    save_json,
    save_oa,
    save_plan,
    save_plan_csv,
    save_reports_csv,
)


@pytest.fixture()
def tmp_json(tmp_path: Path) -> Path:
    return tmp_path / "plan.json"


def _families():
    yield build_a12(SeriesVariant.I)
    yield build_a12(SeriesVariant.III)
    yield build_a8()
    yield build_series(SeriesVariant.II, 5)
    yield build_series(SeriesVariant.I, 4)
    yield build_omep_bl(catalog_design("a"), oa_from_field(4))


# ---- save_json ----


def test_save_creates_parent_dirs(tmp_path):
    deep = tmp_path / "a" / "b" / "c" / "data.json"
    save_json(deep, {"x": 1})
    assert json.loads(deep.read_text()) == {"x": 1}


def test_save_is_atomic_no_tmp_left(tmp_json):
    save_json(tmp_json, {"x": 1})
    tmp = tmp_json.with_name(tmp_json.name + ".tmp")
    assert not tmp.exists()


def test_save_sorts_keys(tmp_json):
    save_json(tmp_json, {"b": 1, "a": 2})
    assert tmp_json.read_text().index('"a"') < tmp_json.read_text().index('"b"')


# ---- load_json ----


def test_load_missing(tmp_json):
    with pytest.raises(PlanFormatError):
        load_json(tmp_json)


def test_load_empty(tmp_json):
    tmp_json.write_text("", encoding="utf-8")
    with pytest.raises(PlanFormatError, match="empty"):
        load_json(tmp_json)


def test_load_corrupt(tmp_json):
    tmp_json.write_text("not valid json {{{{", encoding="utf-8")
    with pytest.raises(PlanFormatError, match="not valid JSON"):
        load_json(tmp_json)


# ---- plan JSON ----


@pytest.mark.parametrize("plan", list(_families()), ids=lambda p: p.signature())
def test_plan_roundtrip(tmp_json, plan):
    save_plan(tmp_json, plan)
    assert load_plan(tmp_json) == plan


def test_plan_file_is_run_major(tmp_json):
    save_plan(tmp_json, build_a8())
    data = json.loads(tmp_json.read_text())
    assert data["format"] == PLAN_FORMAT
    assert data["version"] == 1
    assert len(data["runs"]) == 8
    assert all(len(run) == 3 for run in data["runs"])
    assert [f["block"] for f in data["factors"]] == [False, False, False]


def test_plan_file_marks_block(tmp_json):
    save_plan(tmp_json, build_series(SeriesVariant.III, 5))
    data = json.loads(tmp_json.read_text())
    assert [f["name"] for f in data["factors"] if f["block"]] == ["bl"]


def test_regeneration_is_byte_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_plan(a, build_series(SeriesVariant.I, 6))
    save_plan(b, build_series(SeriesVariant.I, 6))
    assert a.read_bytes() == b.read_bytes()


def test_plan_wrong_format(tmp_json):
    save_json(tmp_json, {"format": "something-else", "version": 1})
    with pytest.raises(PlanFormatError, match="not an"):
        load_plan(tmp_json)


def test_plan_wrong_version(tmp_json):
    data = plan_to_dict(build_a8())
    data["version"] = 99
    save_json(tmp_json, data)
    with pytest.raises(PlanFormatError, match="version"):
        load_plan(tmp_json)


def test_plan_bad_run_length(tmp_json):
    data = plan_to_dict(build_a8())
    data["runs"][0] = [0, 0]
    save_json(tmp_json, data)
    with pytest.raises(PlanFormatError):
        load_plan(tmp_json)


def test_plan_level_index_out_of_range(tmp_json):
    data = plan_to_dict(build_a8())
    data["runs"][0] = [0, 0, 7]
    save_json(tmp_json, data)
    with pytest.raises(PlanFormatError):
        load_plan(tmp_json)


def test_plan_two_block_factors(tmp_json):
    data = plan_to_dict(build_a8())
    for f in data["factors"][:2]:
        f["block"] = True
    save_json(tmp_json, data)
    with pytest.raises(PlanFormatError, match="more than one block"):
        load_plan(tmp_json)


def test_read_plan_block_override(tmp_json):
    save_plan(tmp_json, build_a8())
    assert read_plan(tmp_json, block="A").block_factor == "A"
    with pytest.raises(UnknownFactorError):
        read_plan(tmp_json, block="Z")


# ---- plan CSV ----


@pytest.mark.parametrize("plan", list(_families()), ids=lambda p: p.signature())
def test_csv_and_json_encode_same_plan(tmp_path, plan):
    save_plan_csv(tmp_path / "p.csv", plan)
    save_plan(tmp_path / "p.json", plan)
    from_csv = read_plan(tmp_path / "p.csv")
    from_json = read_plan(tmp_path / "p.json")
    assert from_csv.factors == from_json.factors
    assert from_csv.table == from_json.table
    assert from_csv.block_factor == from_json.block_factor


@pytest.mark.parametrize("plan", list(_families()), ids=lambda p: p.signature())
def test_csv_roundtrip_keeps_everything(tmp_path, plan):
    save_plan_csv(tmp_path / "p.csv", plan)
    assert load_plan_csv(tmp_path / "p.csv") == plan


def test_csv_keeps_notes_and_declared_level_order(tmp_path):
    plan = Plan.from_rows(
        ["dose", "day"],
        [["hi", "lo", "mid", "lo"], ["1", "1", "2", "2"]],
        levels={"dose": ["lo", "mid", "hi"]},
        block_factor="day",
        notes=["pilot run, two days"],
    )
    path = tmp_path / "p.csv"
    save_plan_csv(path, plan)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == '"# pilot run, two days"'
    assert lines[2] == "#3=lo|mid|hi,#2:block"
    back = load_plan_csv(path)
    assert back == plan
    assert back.factor("dose").levels == ("lo", "mid", "hi")
    assert back.notes == ("pilot run, two days",)


def test_csv_level_order_length_mismatch(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("A\n#2=x|y|z\nx\ny\n", encoding="utf-8")
    with pytest.raises(PlanFormatError, match="lists 3 levels"):
        load_plan_csv(path)


def test_csv_without_count_row(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("A,B\nx,1\ny,2\nx,2\ny,1\n", encoding="utf-8")
    plan = load_plan_csv(path)
    assert plan.runs == 4
    assert plan.block_factor is None
    assert plan.labels("A") == ("x", "y", "x", "y")


def test_csv_block_flag_and_override(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("A,bl\n#2,#2:block\n0,0\n1,0\n0,1\n1,1\n", encoding="utf-8")
    assert load_plan_csv(path).block_factor == "bl"
    assert load_plan_csv(path, block="A").block_factor == "A"


def test_csv_count_mismatch(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("A\n#3\n0\n1\n", encoding="utf-8")
    with pytest.raises(PlanFormatError, match="declares 3 levels"):
        load_plan_csv(path)


def test_csv_bad_count_cell(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("A\n#two\n0\n1\n", encoding="utf-8")
    with pytest.raises(PlanFormatError):
        load_plan_csv(path)


def test_csv_empty(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(PlanFormatError, match="empty"):
        load_plan_csv(path)


def test_csv_ragged_row(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("A,B\n0,1\n1\n", encoding="utf-8")
    with pytest.raises(PlanFormatError):
        load_plan_csv(path)


# ---- OA text ----


def test_oa_text_header():
    text = format_oa(oa_from_field(4))
    assert text.splitlines()[0] == "OA 16 5 4 2 1"
    assert len(text.splitlines()) == 6


def test_oa_roundtrip(tmp_path):
    oa = oa_from_field(3)
    save_oa(tmp_path / "oa.txt", oa)
    assert load_oa(tmp_path / "oa.txt") == oa


@pytest.mark.parametrize(
    "text",
    [
        "",
        "OA 4 2 2\n0 0 1 1\n0 1 0 1\n",
        "OA 4 3 2 2 1\n0 0 1 1\n0 1 0 1\n",
        "OA 4 2 2 2 1\n0 0 1\n0 1 0 1\n",
        "OA 4 2 2 2 1\n0 0 1 2\n0 1 0 1\n",
    ],
)
def test_oa_parse_errors(text):
    with pytest.raises(PlanFormatError):
        parse_oa(text)


# ---- reports ----


def test_reports_csv(tmp_path):
    path = tmp_path / "out" / "claims.csv"
    save_reports_csv(path, ["id", "verdict"], [{"id": "a8.C_B", "verdict": "pass"}])
    assert path.read_text(encoding="utf-8").splitlines() == ["id,verdict", "a8.C_B,pass"]
