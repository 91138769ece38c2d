"""
Exact rational dense linear algebra.

Matrices are numpy object arrays holding fractions.Fraction entries, wrapped in an
immutable RatMatrix. Everything here is exact; floats only appear in
rational_spectrum() for roots that are not rational.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from fractions import Fraction
from typing import NamedTuple, Union

import galois
import numpy as np

from .errors import DimensionError, NotPositiveSemidefiniteError, SingularMatrixError

Rational = Fraction
RationalLike = Union[int, Fraction, str]
Poly = list[Fraction]


def _frac(x: RationalLike) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


class RatMatrix:
    """Immutable rows × cols matrix of exact rationals."""

    __slots__ = ("_a",)

    def __init__(self, rows: Iterable[Iterable[RationalLike]] = (), *, cols: int = 0):
        data = [[_frac(x) for x in row] for row in rows]
        if not data:
            a = np.empty((0, cols), dtype=object)
        else:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise DimensionError("ragged rows: every row needs the same number of entries")
            a = np.empty((len(data), width), dtype=object)
            for i, row in enumerate(data):
                for j, x in enumerate(row):
                    a[i, j] = x
        a.flags.writeable = False
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> RatMatrix:
        out = object.__new__(cls)
        if a.dtype != object:
            a = a.astype(object)
        a.flags.writeable = False
        out._a = a
        return out

    # ---- constructors ----

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        a = np.empty((rows, cols), dtype=object)
        a.fill(Fraction(0))
        return cls._wrap(a)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        a = np.empty((n, n), dtype=object)
        a.fill(Fraction(0))
        for i in range(n):
            a[i, i] = Fraction(1)
        return cls._wrap(a)

    @classmethod
    def diag(cls, values: Sequence[RationalLike]) -> RatMatrix:
        n = len(values)
        a = np.empty((n, n), dtype=object)
        a.fill(Fraction(0))
        for i, v in enumerate(values):
            a[i, i] = _frac(v)
        return cls._wrap(a)

    @classmethod
    def column(cls, values: Sequence[RationalLike]) -> RatMatrix:
        return cls([[v] for v in values], cols=1)

    @classmethod
    def block(cls, blocks: Sequence[Sequence[RatMatrix]]) -> RatMatrix:
        """Assemble a matrix from a grid of blocks (numpy.block semantics)."""
        for row in blocks:
            if len({b.rows for b in row}) > 1:
                raise DimensionError("blocks in one block-row must have equal row counts")
        a = np.block([[b._a for b in row] for row in blocks])
        return cls._wrap(np.array(a, dtype=object))

    # ---- shape & access ----

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return _frac(self._a[i, j])

    def row(self, i: int) -> tuple[Fraction, ...]:
        return tuple(_frac(x) for x in self._a[i, :])

    def tolist(self) -> list[list[Fraction]]:
        return [[_frac(x) for x in row] for row in self._a]

    def to_array(self) -> np.ndarray:
        """A writable copy of the underlying object array."""
        return np.array(self._a, dtype=object, copy=True)

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> RatMatrix:
        r = list(rows)
        c = list(cols)
        if not r or not c:
            return RatMatrix.zeros(len(r), len(c))
        return RatMatrix._wrap(self._a[np.ix_(r, c)].copy())

    # ---- arithmetic ----

    @property
    def T(self) -> RatMatrix:
        return RatMatrix._wrap(self._a.T.copy())

    def _same_shape(self, other: RatMatrix, op: str) -> None:
        if self.shape != other.shape:
            raise DimensionError(f"cannot {op} {self.rows}x{self.cols} and {other.rows}x{other.cols}")

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._same_shape(other, "add")
        return RatMatrix._wrap(self._a + other._a)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        self._same_shape(other, "subtract")
        return RatMatrix._wrap(self._a - other._a)

    def __neg__(self) -> RatMatrix:
        return RatMatrix._wrap(-self._a)

    def __mul__(self, scalar: RationalLike) -> RatMatrix:
        if isinstance(scalar, RatMatrix):
            return NotImplemented
        return RatMatrix._wrap(self._a * _frac(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: RationalLike) -> RatMatrix:
        return RatMatrix._wrap(self._a / _frac(scalar))

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return RatMatrix.zeros(self.rows, other.cols)
        return RatMatrix._wrap(np.dot(self._a, other._a))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self._a == other._a))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.tolist())
        return f"RatMatrix([{body}])"

    # ---- scalar summaries ----

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionError("trace needs a square matrix")
        return sum((_frac(self._a[i, i]) for i in range(self.rows)), Fraction(0))

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum((_frac(x) for x in row), Fraction(0)) for row in self._a)

    def col_sums(self) -> tuple[Fraction, ...]:
        return self.T.row_sums()

    def is_zero(self) -> bool:
        return bool(np.all(self._a == 0))

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.T


# -------------------------
# Named matrices
# -------------------------


def jn(n: int) -> RatMatrix:
    """The n×n all-ones matrix."""
    return RatMatrix([[1] * n for _ in range(n)])


def kn(n: int) -> RatMatrix:
    """Centering matrix K_n = I_n - J_n/n."""
    return RatMatrix.identity(n) - jn(n) / n


def circulant(first_row: Sequence[RationalLike]) -> RatMatrix:
    """Row i is first_row cyclically shifted i places to the right."""
    n = len(first_row)
    if n == 0:
        raise DimensionError("circulant needs a nonempty first row")
    return RatMatrix([[first_row[(j - i) % n] for j in range(n)] for i in range(n)])


# -------------------------
# Reduction
# -------------------------


def rref(m: RatMatrix) -> tuple[RatMatrix, int, tuple[int, ...]]:
    """Reduced row echelon form, rank and pivot columns."""
    a = m.to_array()
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if a[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[[r, p], :] = a[[p, r], :]
        pivot = a[r, c]
        if pivot != 1:
            a[r, c:] = a[r, c:] / pivot
        for i in range(n_rows):
            if i != r and a[i, c] != 0:
                a[i, c:] = a[i, c:] - a[i, c] * a[r, c:]
        pivots.append(c)
        r += 1
    return RatMatrix._wrap(a), r, tuple(pivots)


def rank(m: RatMatrix) -> int:
    return rref(m)[1]


def inverse(m: RatMatrix) -> RatMatrix:
    if not m.is_square:
        raise DimensionError("only square matrices have an inverse")
    n = m.rows
    if n == 0:
        return m
    reduced, _, pivots = rref(RatMatrix.block([[m, RatMatrix.identity(n)]]))
    if pivots[:n] != tuple(range(n)):
        raise SingularMatrixError("matrix is singular")
    return reduced.submatrix(range(n), range(n, 2 * n))


def g_inverse(m: RatMatrix) -> RatMatrix:
    """
    Moore–Penrose inverse from the rank factorization m = F·G given by rref:
    F = pivot columns of m, G = nonzero rows of rref(m), and
    g = Gᵀ(GGᵀ)⁻¹(FᵀF)⁻¹Fᵀ. Satisfies m·g·m = m.
    """
    reduced, r, pivots = rref(m)
    if r == 0:
        return RatMatrix.zeros(m.cols, m.rows)
    f = m.submatrix(range(m.rows), pivots)
    g = reduced.submatrix(range(r), range(m.cols))
    return g.T @ inverse(g @ g.T) @ inverse(f.T @ f) @ f.T


def g_inverse_minor(m: RatMatrix) -> RatMatrix:
    """Classical g-inverse: invert a nonsingular r×r minor, zero elsewhere."""
    _, r, col_idx = rref(m)
    if r == 0:
        return RatMatrix.zeros(m.cols, m.rows)
    _, _, row_idx = rref(m.T)
    minor_inv = inverse(m.submatrix(row_idx, col_idx))
    a = RatMatrix.zeros(m.cols, m.rows).to_array()
    for i, c in enumerate(col_idx):
        for j, rr in enumerate(row_idx):
            a[c, rr] = minor_inv[i, j]
    return RatMatrix._wrap(a)


# -------------------------
# Schur complements / projections
# -------------------------

GInverse = Callable[[RatMatrix], RatMatrix]


def schur_complement(a: RatMatrix, b: RatMatrix, c: RatMatrix, d: RatMatrix, ginv: GInverse = g_inverse) -> RatMatrix:
    """a − b·d⁻·c for any g-inverse d⁻."""
    if b.rows != a.rows or c.cols != a.cols or b.cols != d.rows or c.rows != d.cols:
        raise DimensionError("incompatible blocks for a Schur complement")
    return a - b @ ginv(d) @ c


def _symmetric_eliminate(a: np.ndarray, k: int) -> bool:
    """
    Eliminate the first k pivots of a symmetric matrix in place (LDLᵀ style).
    Returns False as soon as a pivot shows the matrix is not positive semidefinite.
    """
    n = a.shape[0]
    for i in range(k):
        p = a[i, i]
        if p < 0:
            return False
        if p == 0:
            if any(a[i, j] != 0 for j in range(i + 1, n)):
                return False
            continue
        pivot_row = a[i, i + 1 :]
        for j in range(i + 1, n):
            if a[j, i] != 0:
                a[j, i + 1 :] = a[j, i + 1 :] - (a[j, i] / p) * pivot_row
    return True


def psd_schur_complement(gram: RatMatrix, k: int) -> RatMatrix:
    """
    Schur complement of the leading k×k block of a positive semidefinite matrix.
    Zero pivots are skipped, which is the same as using a g-inverse of that block.
    """
    if not gram.is_square:
        raise DimensionError("Schur complement needs a square matrix")
    if not 0 <= k <= gram.rows:
        raise DimensionError(f"cannot eliminate {k} pivots from a {gram.rows}x{gram.rows} matrix")
    a = gram.to_array()
    if not _symmetric_eliminate(a, k):
        raise NotPositiveSemidefiniteError("elimination block is not positive semidefinite")
    return RatMatrix._wrap(a[k:, k:].copy())


def is_positive_semidefinite(m: RatMatrix) -> bool:
    if not m.is_symmetric():
        return False
    return _symmetric_eliminate(m.to_array(), m.rows)


def project_out(x: RatMatrix, z: RatMatrix, ginv: GInverse | None = None) -> RatMatrix:
    """
    xᵀ(I − z(zᵀz)⁻zᵀ)x. Without ginv the elimination engine is used; with ginv
    the explicit formula is evaluated with that g-inverse.
    """
    if x.rows != z.rows:
        raise DimensionError(f"x has {x.rows} rows but z has {z.rows}")
    if ginv is None:
        y = RatMatrix.block([[z, x]])
        return psd_schur_complement(y.T @ y, z.cols)
    return schur_complement(x.T @ x, x.T @ z, z.T @ x, z.T @ z, ginv)


# -------------------------
# Characteristic polynomial & spectra
# -------------------------


def char_poly(m: RatMatrix) -> Poly:
    """Coefficients of det(λI − m), degree ascending, via Faddeev–LeVerrier."""
    if not m.is_square:
        raise DimensionError("characteristic polynomial needs a square matrix")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    ident = RatMatrix.identity(n)
    mk = RatMatrix.zeros(n, n)
    for k in range(1, n + 1):
        mk = m @ mk + ident * coeffs[n - k + 1]
        coeffs[n - k] = -(m @ mk).trace() / k
    return coeffs


def poly_mul(p: Sequence[RationalLike], q: Sequence[RationalLike]) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += _frac(a) * _frac(b)
    return out


def poly_from_spectrum(spectrum: Mapping[RationalLike, int]) -> Poly:
    """∏(λ − λᵢ)^{mᵢ}, degree ascending."""
    out: Poly = [Fraction(1)]
    for value, mult in spectrum.items():
        for _ in range(mult):
            out = poly_mul(out, [-_frac(value), Fraction(1)])
    return out


def _divide_linear(coeffs: Sequence[Fraction], root: Fraction) -> tuple[Poly, Fraction]:
    acc = Fraction(0)
    out: list[Fraction] = []
    for c in reversed(coeffs):
        acc = acc * root + c
        out.append(acc)
    remainder = out.pop()
    return out[::-1], remainder


def root_multiplicity(coeffs: Sequence[RationalLike], root: RationalLike) -> int:
    p = [_frac(c) for c in coeffs]
    r = _frac(root)
    mult = 0
    while len(p) > 1:
        q, rem = _divide_linear(p, r)
        if rem != 0:
            break
        p = q
        mult += 1
    return mult


def verify_spectrum(m: RatMatrix, claimed: Mapping[RationalLike, int]) -> bool:
    """True iff det(λI − m) = ∏(λ − λᵢ)^{mᵢ} exactly."""
    if not m.is_square:
        raise DimensionError("spectrum needs a square matrix")
    total = sum(claimed.values())
    if total != m.rows:
        raise DimensionError(f"multiplicities sum to {total}, matrix dimension is {m.rows}")
    return char_poly(m) == poly_from_spectrum(claimed)


class Spectrum(NamedTuple):
    exact: dict[Fraction, int]
    approximate: tuple[float, ...]


def _int_root(ints: Sequence[int], p: int, q: int) -> bool:
    # p/q is a root iff Σ aᵢ pⁱ q^{n−i} = 0
    n = len(ints) - 1
    return sum(a * p**i * q ** (n - i) for i, a in enumerate(ints)) == 0


def rational_spectrum(m: RatMatrix) -> Spectrum:
    """Rational eigenvalues with multiplicities; other roots as sorted floats."""
    coeffs = char_poly(m)
    exact: dict[Fraction, int] = {}
    zeros = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
        zeros += 1
    if zeros:
        exact[Fraction(0)] = zeros
    if len(coeffs) > 1:
        scale = math.lcm(*(c.denominator for c in coeffs))
        ints = [int(c * scale) for c in coeffs]
        bound = max((sum(abs(x) for x in row) for row in m.tolist()), default=Fraction(0))
        candidates = sorted(
            {
                Fraction(sign * p, q)
                for p in galois.divisors(abs(ints[0]))
                for q in galois.divisors(abs(ints[-1]))
                for sign in (1, -1)
                if Fraction(p, q) <= bound
            }
        )
        for cand in candidates:
            if not _int_root(ints, cand.numerator, cand.denominator):
                continue
            mult = root_multiplicity(coeffs, cand)
            for _ in range(mult):
                coeffs, _ = _divide_linear(coeffs, cand)
            exact[cand] = mult
            scale = math.lcm(*(c.denominator for c in coeffs))
            ints = [int(c * scale) for c in coeffs]
    approx: tuple[float, ...] = ()
    if len(coeffs) > 1:
        roots = np.roots([float(c) for c in reversed(coeffs)])
        approx = tuple(sorted(float(r.real) for r in roots))
    return Spectrum(dict(sorted(exact.items())), approx)


def as_multiple(m: RatMatrix, base: RatMatrix) -> Fraction | None:
    """c with m = c·base, or None."""
    if m.shape != base.shape:
        return None
    for i in range(base.rows):
        for j in range(base.cols):
            if base[i, j] != 0:
                c = m[i, j] / base[i, j]
                return c if m == base * c else None
    return Fraction(0) if m.is_zero() else None
