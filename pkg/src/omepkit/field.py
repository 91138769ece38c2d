"""
Prime-power finite fields and the strength-2, index-1 orthogonal array OA(k², k+1, k, 2).

Arithmetic is delegated to galois; this module fixes the modulus (lexicographically
smallest monic irreducible) and the element order (integer representation 0..k-1),
so generated arrays are reproducible.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import galois
import numpy as np

from .errors import FieldError


@dataclass(frozen=True)
class FieldSpec:
    characteristic: int
    degree: int
    # ascending coefficients, monic
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.characteristic**self.degree

    def element(self, index: int) -> FieldElement:
        if not 0 <= index < self.order:
            raise FieldError(f"{index} is not an element index of GF({self.order})")
        coeffs = []
        for _ in range(self.degree):
            index, c = divmod(index, self.characteristic)
            coeffs.append(c)
        return FieldElement(tuple(coeffs))

    def index(self, e: FieldElement) -> int:
        if len(e.coeffs) != self.degree or any(not 0 <= c < self.characteristic for c in e.coeffs):
            raise FieldError(f"{e} is not an element of GF({self.order})")
        return sum(c * self.characteristic**i for i, c in enumerate(e.coeffs))

    def elements(self) -> list[FieldElement]:
        return [self.element(i) for i in range(self.order)]

    def modulus_str(self) -> str:
        terms = []
        for power in range(self.degree, -1, -1):
            c = self.modulus[power]
            if c == 0:
                continue
            if power == 0:
                terms.append(str(c))
                continue
            mono = "x" if power == 1 else f"x^{power}"
            terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms)


@dataclass(frozen=True)
class FieldElement:
    """Polynomial basis coordinates, constant term first."""

    coeffs: tuple[int, ...]


@lru_cache(maxsize=None)
def _galois_field(spec: FieldSpec) -> type[galois.FieldArray]:
    if spec.degree == 1:
        return galois.GF(spec.characteristic)
    prime_field = galois.GF(spec.characteristic)
    poly = galois.Poly(list(reversed(spec.modulus)), field=prime_field)
    return galois.GF(spec.order, irreducible_poly=poly)


def field_make(k: int) -> FieldSpec:
    if k < 2 or not galois.is_prime_power(k):
        raise FieldError(f"{k} is not a prime power")
    primes, exponents = galois.factors(k)
    p, d = int(primes[0]), int(exponents[0])
    if d == 1:
        return FieldSpec(characteristic=p, degree=1, modulus=(0, 1))
    poly = galois.irreducible_poly(p, d, method="min")
    modulus = tuple(int(c) for c in reversed(poly.coeffs))
    return FieldSpec(characteristic=p, degree=d, modulus=modulus)


def _lift(spec: FieldSpec, *elems: FieldElement):
    gf = _galois_field(spec)
    return [gf(spec.index(e)) for e in elems]


def _lower(spec: FieldSpec, value) -> FieldElement:
    return spec.element(int(value))


def field_add(spec: FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement:
    x, y = _lift(spec, a, b)
    return _lower(spec, x + y)


def field_mul(spec: FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement:
    x, y = _lift(spec, a, b)
    return _lower(spec, x * y)


def field_neg(spec: FieldSpec, a: FieldElement) -> FieldElement:
    (x,) = _lift(spec, a)
    return _lower(spec, -x)


def field_inv(spec: FieldSpec, a: FieldElement) -> FieldElement:
    (x,) = _lift(spec, a)
    if int(x) == 0:
        raise FieldError("zero has no multiplicative inverse")
    return _lower(spec, x**-1)


# -------------------------
# Orthogonal arrays
# -------------------------


@dataclass(frozen=True)
class OrthogonalArray:
    """m × n symbol table; every t rows carry each t-tuple exactly `index` times."""

    symbol_counts: tuple[int, ...]
    strength: int
    index: int
    cells: tuple[tuple[int, ...], ...]

    @property
    def runs(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def symbols(self) -> int | None:
        """Common symbol count, None for mixed-level arrays."""
        counts = set(self.symbol_counts)
        return counts.pop() if len(counts) == 1 else None

    def is_orthogonal(self) -> bool:
        """Exhaustive t-tuple count over every choice of t rows."""
        if any(len(row) != self.runs for row in self.cells):
            return False
        for row, s in zip(self.cells, self.symbol_counts):
            if any(not 0 <= x < s for x in row):
                return False
        for chosen in itertools.combinations(range(self.rows), self.strength):
            counts = Counter(zip(*(self.cells[i] for i in chosen)))
            expected = 1
            for i in chosen:
                expected *= self.symbol_counts[i]
            if len(counts) != expected or set(counts.values()) != {self.index}:
                return False
        return True


def oa_from_field(k: int) -> OrthogonalArray:
    """
    Runs are (x, y) ∈ GF(k)², x-major. Row 0 is x, then one row y + c·x for
    each c ∈ GF(k) in element order.
    """
    spec = field_make(k)
    gf = _galois_field(spec)
    xs = gf(np.repeat(np.arange(k), k))
    ys = gf(np.tile(np.arange(k), k))
    rows = [xs] + [ys + gf(c) * xs for c in range(k)]
    cells = tuple(tuple(int(v) for v in row.view(np.ndarray).tolist()) for row in rows)
    return OrthogonalArray(symbol_counts=(k,) * (k + 1), strength=2, index=1, cells=cells)
