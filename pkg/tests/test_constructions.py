"""Tests for the plan families and built-in designs."""

from __future__ import annotations

import logging

import pytest

from omepkit.blocks import BlockDesign
from omepkit.constructions import (
    BLOCK,
    SeriesVariant,
    build_a8,
    build_a12,
    build_omep_bl,
    build_series,
    build_u,
    catalog_design,
    half_overlap_design,
)
from omepkit.errors import ConstructionError, DesignError
from omepkit.field import OrthogonalArray, oa_from_field
from omepkit.plan import replication_vector

# ---- SeriesVariant ----


@pytest.mark.parametrize(
    "raw,expected",
    [("i", SeriesVariant.I), ("II", SeriesVariant.II), (3, SeriesVariant.III), ("1", SeriesVariant.I)],
)
def test_variant_parse(raw, expected):
    assert SeriesVariant.parse(raw) is expected


@pytest.mark.parametrize("raw", ["iv", 0, "4", ""])
def test_variant_parse_rejects(raw):
    with pytest.raises(ConstructionError):
        SeriesVariant.parse(raw)


def test_u_shapes():
    assert build_u(SeriesVariant.I).shape == (3, 4)
    assert build_u(SeriesVariant.II).shape == (2, 4)
    assert build_u(SeriesVariant.III).shape == (1, 4)


# ---- 12-run and 8-run plans ----


@pytest.mark.parametrize("variant,names", [
    (SeriesVariant.I, ("A", "B", "C", "D", "E", "F", "G")),
    (SeriesVariant.II, ("A", "B", "C", "D", "E", "F")),
    (SeriesVariant.III, ("A", "B", "C", "D", "E")),
])
def test_a12_shape(variant, names):
    plan = build_a12(variant)
    assert plan.runs == 12
    assert plan.names == names
    assert plan.block_factor is None


def test_a12_d_column_is_shifted_zero_row():
    plan = build_a12(SeriesVariant.I)
    assert plan.row("D") == (0,) * 4 + (1,) * 4 + (2,) * 4


def test_a8_shape():
    plan = build_a8()
    assert plan.runs == 8
    assert plan.names == ("A", "B", "C")
    assert plan.signature() == "3^3"


# ---- series ----


@pytest.mark.parametrize("variant", list(SeriesVariant))
@pytest.mark.parametrize("n", [5, 6, 7, 12])
def test_series_shape(variant, n):
    plan = build_series(variant, n)
    assert plan.runs == 4 * n
    assert plan.block_factor == BLOCK
    assert plan.block_sizes() == (4,) * n
    for q in ("A", "B", "C", BLOCK):
        assert plan.level_count(q) == n
        assert replication_vector(plan, q) == (4,) * n
    assert plan.notes == ()


def test_series_n6_variant_i_factor_counts():
    plan = build_series(SeriesVariant.I, 6)
    assert len(plan.names) == 7
    assert sorted(plan.level_count(x) for x in plan.names) == [2, 2, 2, 6, 6, 6, 6]


def test_series_small_n_rejected():
    with pytest.raises(ConstructionError, match="n must be ≥ 3"):
        build_series(SeriesVariant.I, 2)


@pytest.mark.parametrize("n", [3, 4])
def test_series_outside_range_warns(n, caplog):
    with caplog.at_level(logging.WARNING, logger="omepkit.constructions"):
        plan = build_series(SeriesVariant.I, n)
    assert plan.notes
    assert "n ≥ 5" in caplog.text


@pytest.mark.parametrize("variant", list(SeriesVariant))
def test_series_n3_is_a12_with_d_as_block(variant):
    a12 = build_a12(variant)
    series = build_series(variant, 3)
    assert series.block_factor == BLOCK
    assert sorted(series.names) == sorted(BLOCK if x == "D" else x for x in a12.names)
    for name in a12.names:
        assert series.labels(BLOCK if name == "D" else name) == a12.labels(name)


# ---- block design × OA ----


def test_omep_bl_design_a():
    d = catalog_design("a")
    plan = build_omep_bl(d, oa_from_field(4))
    assert plan.runs == 3 * 16
    assert plan.treatment_names == ("A", "B", "C", "D")
    assert plan.level_count(BLOCK) == 12
    assert set(plan.block_sizes()) == {4}
    for name in plan.treatment_names:
        assert plan.level_count(name) == 6


def test_omep_bl_uses_block_symbols():
    d = catalog_design("a")
    plan = build_omep_bl(d, oa_from_field(4))
    first_copy = set(plan.labels("A")[:16])
    assert first_copy == {"0", "1", "2", "3"}
    assert set(plan.labels("A")[16:32]) == {"0", "1", "4", "5"}


def test_omep_bl_requires_connected():
    d = BlockDesign(4, ((0, 1), (2, 3)))
    with pytest.raises(ConstructionError, match="connected"):
        build_omep_bl(d, oa_from_field(2))


def test_omep_bl_requires_binary():
    d = BlockDesign(2, ((0, 0), (0, 1)))
    with pytest.raises(ConstructionError, match="binary"):
        build_omep_bl(d, oa_from_field(2))


def test_omep_bl_requires_matching_oa():
    with pytest.raises(ConstructionError):
        build_omep_bl(catalog_design("a"), oa_from_field(3))


def test_omep_bl_rejects_non_orthogonal_array():
    bad = OrthogonalArray(symbol_counts=(2, 2, 2), strength=2, index=1, cells=((0, 0, 1, 1),) * 3)
    with pytest.raises(ConstructionError):
        build_omep_bl(BlockDesign(3, ((0, 1), (1, 2))), bad)


def test_omep_bl_unequal_blocks():
    with pytest.raises(ConstructionError):
        build_omep_bl(BlockDesign(3, ((0, 1), (0, 1, 2))), oa_from_field(2))


# ---- built-in designs ----


def test_catalog():
    sizes = {name: (catalog_design(name).treatments, catalog_design(name).block_size) for name in "abcd"}
    assert sizes == {"a": (6, 4), "b": (8, 4), "c": (10, 5), "d": (12, 8)}


def test_catalog_unknown():
    with pytest.raises(DesignError):
        catalog_design("z")


@pytest.mark.parametrize("v,k", [(4, 3), (5, 3), (6, 4), (7, 4), (8, 5), (9, 5)])
def test_half_overlap(v, k):
    d = half_overlap_design(v)
    assert d.block_size == k
    assert d.block_count == 2
    assert d.blocks[0] == tuple(range(k))
    assert d.blocks[1][-1] == v - 1


def test_half_overlap_too_small():
    with pytest.raises(DesignError):
        half_overlap_design(3)
