"""Tests for block designs."""

from __future__ import annotations

from fractions import Fraction

import pytest

from omepkit.blocks import BlockDesign, block_design_c_matrix, is_binary, is_connected
from omepkit.constructions import catalog_design
from omepkit.errors import DesignError
from omepkit.linalg import RatMatrix, kn


def test_from_one_indexed():
    d = BlockDesign.from_one_indexed(4, [[1, 2], [3, 4]])
    assert d.blocks == ((0, 1), (2, 3))
    assert d.one_indexed() == [[1, 2], [3, 4]]


def test_empty_design_rejected():
    with pytest.raises(DesignError):
        BlockDesign(3, ())


def test_treatment_out_of_range():
    with pytest.raises(DesignError):
        BlockDesign.from_one_indexed(3, [[1, 4]])


def test_empty_block_rejected():
    with pytest.raises(DesignError):
        BlockDesign(2, ((0, 1), ()))


def test_block_size_and_replication():
    d = catalog_design("a")
    assert d.block_size == 4
    assert d.replication() == (2,) * 6
    assert d.is_equireplicate()
    assert BlockDesign(3, ((0, 1), (0, 1, 2))).block_size is None


def test_incidence_shape():
    d = catalog_design("b")
    assert d.incidence().shape == (8, 4)


def test_c_matrix_rows_sum_to_zero():
    for name in "abcd":
        c = block_design_c_matrix(catalog_design(name))
        assert set(c.row_sums()) == {0}


def test_complete_block_c_matrix():
    # one block holding every treatment: C_d = K_v
    d = BlockDesign(3, ((0, 1, 2),))
    assert block_design_c_matrix(d) == kn(3)


def test_catalog_a_c_matrix_entries():
    c = block_design_c_matrix(catalog_design("a"))
    paired = {frozenset(p) for p in ((0, 1), (2, 3), (4, 5))}
    for i in range(6):
        for j in range(6):
            if i == j:
                expected = Fraction(3, 2)
            elif frozenset((i, j)) in paired:
                expected = Fraction(-1, 2)
            else:
                expected = Fraction(-1, 4)
            assert c[i, j] == expected, (i, j)


def test_binary():
    assert is_binary(catalog_design("a"))
    assert not is_binary(BlockDesign(2, ((0, 0), (0, 1))))


def test_connected():
    assert is_connected(catalog_design("d"))
    assert not is_connected(BlockDesign(4, ((0, 1), (2, 3))))


def test_c_matrix_of_disconnected_design_has_low_rank():
    d = BlockDesign(4, ((0, 1), (2, 3)))
    half = RatMatrix([[1, -1], [-1, 1]]) / 2
    zero = RatMatrix.zeros(2, 2)
    assert block_design_c_matrix(d) == RatMatrix.block([[half, zero], [zero, half]])
