"""Tests for finite fields and the OA(k², k+1, k, 2) construction."""

from __future__ import annotations

import itertools

import pytest

from omepkit.errors import FieldError
from omepkit.field import (
    FieldElement,
    OrthogonalArray,
    field_add,
    field_inv,
    field_make,
    field_mul,
    field_neg,
    oa_from_field,
)

# ---- field_make ----


@pytest.mark.parametrize("k", [6, 10, 12, 1, 0])
def test_field_make_rejects_non_prime_powers(k):
    with pytest.raises(FieldError):
        field_make(k)


def test_prime_field():
    spec = field_make(7)
    assert spec.characteristic == 7
    assert spec.degree == 1
    assert spec.order == 7


def test_gf4_modulus_is_lexicographically_smallest():
    spec = field_make(4)
    assert (spec.characteristic, spec.degree) == (2, 2)
    # x^2 + x + 1 is the only irreducible quadratic over GF(2)
    assert spec.modulus == (1, 1, 1)
    assert spec.modulus_str() == "x^2 + x + 1"


def test_gf8_modulus():
    spec = field_make(8)
    assert spec.modulus == (1, 1, 0, 1)


def test_gf9_modulus():
    spec = field_make(9)
    assert spec.modulus == (1, 0, 1)


def test_element_index_roundtrip():
    spec = field_make(9)
    for i in range(9):
        assert spec.index(spec.element(i)) == i


def test_element_out_of_range():
    with pytest.raises(FieldError):
        field_make(4).element(4)


# ---- arithmetic ----


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8, 9])
def test_field_axioms(k):
    spec = field_make(k)
    els = spec.elements()
    zero, one = spec.element(0), spec.element(1)
    for a in els:
        assert field_add(spec, a, zero) == a
        assert field_mul(spec, a, one) == a
        assert field_add(spec, a, field_neg(spec, a)) == zero
        if a != zero:
            assert field_mul(spec, a, field_inv(spec, a)) == one
    for a, b in itertools.product(els, repeat=2):
        assert field_add(spec, a, b) == field_add(spec, b, a)
        assert field_mul(spec, a, b) == field_mul(spec, b, a)


def test_gf4_multiplication_uses_modulus():
    spec = field_make(4)
    x = FieldElement((0, 1))
    # x * x = x + 1 modulo x^2 + x + 1
    assert field_mul(spec, x, x) == FieldElement((1, 1))


def test_inverse_of_zero():
    spec = field_make(5)
    with pytest.raises(FieldError):
        field_inv(spec, spec.element(0))


# ---- orthogonal arrays ----


@pytest.mark.parametrize("k", [2, 3, 4, 5, 7, 8, 9])
def test_oa_from_field_is_orthogonal(k):
    oa = oa_from_field(k)
    assert oa.runs == k * k
    assert oa.rows == k + 1
    assert oa.symbols == k
    assert (oa.strength, oa.index) == (2, 1)
    # brute-force pair counting, independent of is_orthogonal()
    for r1, r2 in itertools.combinations(range(oa.rows), 2):
        pairs = sorted(zip(oa.cells[r1], oa.cells[r2]))
        assert pairs == sorted(itertools.product(range(k), repeat=2))
    assert oa.is_orthogonal()


def test_oa_from_field_row_order():
    oa = oa_from_field(3)
    assert oa.cells[0] == (0, 0, 0, 1, 1, 1, 2, 2, 2)
    # c = 0 gives y itself
    assert oa.cells[1] == (0, 1, 2, 0, 1, 2, 0, 1, 2)


def test_oa_from_field_rejects_six():
    with pytest.raises(FieldError):
        oa_from_field(6)


def test_is_orthogonal_detects_repeated_pair():
    cells = ((0, 0, 1, 1), (0, 0, 1, 1))
    oa = OrthogonalArray(symbol_counts=(2, 2), strength=2, index=1, cells=cells)
    assert not oa.is_orthogonal()


def test_is_orthogonal_detects_bad_symbol():
    cells = ((0, 0, 1, 2), (0, 1, 0, 1))
    oa = OrthogonalArray(symbol_counts=(2, 2), strength=2, index=1, cells=cells)
    assert not oa.is_orthogonal()
