"""
Plan families: the 12-run plans A_i(12), the 8-run plan A_8, the blocked series
A_i(4n) and the block-design × orthogonal-array composition, plus the built-in
block designs.
"""

from __future__ import annotations

import logging
from enum import Enum

import galois

from .blocks import BlockDesign, is_binary, is_connected
from .errors import ConstructionError, DesignError
from .field import OrthogonalArray
from .linalg import RatMatrix
from .plan import Plan

logger = logging.getLogger(__name__)

BLOCK = "bl"


class SeriesVariant(str, Enum):
    I = "i"  # three 2-level factors
    II = "ii"  # one 2-level and one 3-level factor
    III = "iii"  # one 4-level factor

    @property
    def number(self) -> int:
        return list(SeriesVariant).index(self) + 1

    @classmethod
    def parse(cls, value: str | int) -> SeriesVariant:
        if isinstance(value, int) or str(value).isdigit():
            members = list(cls)
            i = int(value)
            if not 1 <= i <= len(members):
                raise ConstructionError(f"unknown variant {value!r} (expected 1, 2 or 3)")
            return members[i - 1]
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConstructionError(f"unknown variant {value!r} (expected i, ii or iii)") from None


_U1 = ((0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0))
_U = {
    SeriesVariant.I: _U1,
    SeriesVariant.II: ((0, 0, 0, 1), (0, 1, 2, 0)),
    SeriesVariant.III: ((0, 1, 2, 3),),
}
_SMALL_NAMES = ("E", "F", "G")

_A8 = (
    (0, 0, 0, 0, 1, 1, 2, 2),
    (0, 2, 0, 2, 0, 1, 0, 1),
    (2, 0, 0, 2, 1, 0, 0, 1),
)


def build_u(variant: SeriesVariant) -> RatMatrix:
    return RatMatrix(_U[variant])


def build_v() -> tuple[tuple[int, ...], ...]:
    """U_1 with a row of zeros appended."""
    return _U1 + ((0, 0, 0, 0),)


def _shifted(row: tuple[int, ...], copies: int, modulus: int) -> list[int]:
    """[row, row+1, ..., row+copies-1] (mod modulus), side by side."""
    return [(x + j) % modulus for j in range(copies) for x in row]


def build_a12(variant: SeriesVariant) -> Plan:
    """[V, V+1, V+2; U_i, U_i, U_i] with addition modulo 3."""
    u = _U[variant]
    rows = [_shifted(r, 3, 3) for r in build_v()] + [list(r) * 3 for r in u]
    names = ("A", "B", "C", "D") + _SMALL_NAMES[: len(u)]
    return Plan.from_rows(names, rows)


def build_a8() -> Plan:
    return Plan.from_rows(("A", "B", "C"), _A8)


def build_series(variant: SeriesVariant, n: int) -> Plan:
    """
    [U_i, ..., U_i; V, V+1, ..., V+n-1] with addition modulo n. The shifted zero row
    of V is the block factor, so block j holds the four runs of V + j.
    """
    if n < 3:
        raise ConstructionError(f"n must be ≥ 3 (got {n})")
    notes: tuple[str, ...] = ()
    if n < 5:
        msg = f"series built for n={n}; its orthogonality and saturation are only asserted for n ≥ 5"
        logger.warning(msg)
        notes = (msg,)
    u = _U[variant]
    v = build_v()
    rows = [list(r) * n for r in u] + [_shifted(r, n, n) for r in v]
    names = _SMALL_NAMES[: len(u)] + ("A", "B", "C", BLOCK)
    return Plan.from_rows(names, rows, block_factor=BLOCK, notes=notes)


def _factor_names(count: int) -> tuple[str, ...]:
    if count <= 26:
        return tuple(chr(ord("A") + i) for i in range(count))
    return tuple(f"P{i + 1}" for i in range(count))


def build_omep_bl(d: BlockDesign, oa: OrthogonalArray) -> Plan:
    """
    Block j of d with treatment set T_j contributes a copy of the OA whose first
    m-1 rows use T_j as symbols and whose last row is relabeled jk, ..., jk+k-1
    to give k new blocks of size k. The copies are placed side by side.
    """
    if not is_binary(d):
        raise ConstructionError("block design must be binary")
    if not is_connected(d):
        raise ConstructionError("block design must be connected")
    k = d.block_size
    if k is None:
        raise ConstructionError("block design must have equal block sizes")
    if oa.symbols != k or oa.runs != k * k:
        raise ConstructionError(f"need an OA with {k * k} runs on {k} symbols, got {oa.runs} runs")
    if oa.strength != 2 or oa.index != 1 or not oa.is_orthogonal():
        raise ConstructionError("need an orthogonal array of strength 2 and index 1")
    if oa.rows < 2:
        raise ConstructionError("the OA needs at least two rows")

    m = oa.rows
    rows: list[list[int]] = [[] for _ in range(m)]
    for j, block in enumerate(d.blocks):
        for run in range(oa.runs):
            for f in range(m - 1):
                rows[f].append(block[oa.cells[f][run]])
            rows[m - 1].append(j * k + oa.cells[m - 1][run])
    names = _factor_names(m - 1) + (BLOCK,)
    return Plan.from_rows(names, rows, block_factor=BLOCK)


# -------------------------
# Block designs
# -------------------------

_CATALOG = {
    "a": (6, ((1, 2, 3, 4), (1, 2, 5, 6), (3, 4, 5, 6))),
    "b": (8, ((1, 2, 3, 4), (5, 6, 7, 8), (1, 2, 5, 6), (3, 4, 7, 8))),
    "c": (10, ((1, 2, 3, 4, 5), (6, 7, 8, 9, 10), (1, 2, 3, 6, 7), (4, 5, 8, 9, 10))),
    "d": (12, ((1, 2, 3, 4, 5, 6, 7, 8), (1, 2, 3, 4, 9, 10, 11, 12), (5, 6, 7, 8, 9, 10, 11, 12))),
}

CATALOG_NAMES = tuple(_CATALOG)


def catalog_design(name: str) -> BlockDesign:
    try:
        v, blocks = _CATALOG[name.lower()]
    except KeyError:
        raise DesignError(f"unknown catalog design {name!r} (expected one of {', '.join(_CATALOG)})") from None
    return BlockDesign.from_one_indexed(v, blocks)


def half_overlap_design(v: int) -> BlockDesign:
    """Two blocks {1..k} and {v-k+1..v}, k the smallest prime power with 2k > v."""
    if v < 4:
        raise DesignError(f"half-overlap designs need v ≥ 4 (got {v})")
    k = v // 2 + 1
    while not galois.is_prime_power(k):
        k += 1
    return BlockDesign(v, (tuple(range(k)), tuple(range(v - k, v))))
