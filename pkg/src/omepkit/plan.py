"""
Mixed arrays and their information matrices.

A Plan stores the table the way plans are usually printed (rows = factors,
columns = runs); design matrices put runs on rows. All C-matrix work goes through
Gram blocks built from incidence counts, so no n×n projector is ever formed.
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from .errors import PlanError, UnknownFactorError
from .linalg import GInverse, RatMatrix, g_inverse, psd_schur_complement, rank, schur_complement


def _label_key(label: str) -> tuple[int, int | str]:
    try:
        return (0, int(label))
    except ValueError:
        return (1, label)


@dataclass(frozen=True)
class Factor:
    name: str
    levels: tuple[str, ...]

    @property
    def level_count(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class Plan:
    factors: tuple[Factor, ...]
    # one tuple per factor, level indices per run
    table: tuple[tuple[int, ...], ...]
    block_factor: str | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [f.name for f in self.factors]
        if not names:
            raise PlanError("a plan needs at least one factor")
        if len(set(names)) != len(names):
            raise PlanError("factor names must be distinct")
        if len(self.table) != len(self.factors):
            raise PlanError("table needs exactly one row per factor")
        n = len(self.table[0])
        if n == 0:
            raise PlanError("a plan needs at least one run")
        for f, row in zip(self.factors, self.table):
            if len(row) != n:
                raise PlanError(f"factor {f.name} has {len(row)} runs, expected {n}")
            if f.level_count < 2:
                raise PlanError(f"factor {f.name} needs at least two levels")
            if len(set(f.levels)) != f.level_count:
                raise PlanError(f"factor {f.name} has repeated level labels")
            if any(not 0 <= x < f.level_count for x in row):
                raise PlanError(f"factor {f.name} has a level index out of range")
            if len(set(row)) != f.level_count:
                raise PlanError(f"every level of {f.name} must occur at least once")
        if self.block_factor is not None and self.block_factor not in names:
            raise PlanError(f"block factor {self.block_factor!r} is not a factor of the plan")

    @classmethod
    def from_rows(
        cls,
        names: Sequence[str],
        rows: Sequence[Sequence[Hashable]],
        *,
        levels: Mapping[str, Sequence[str]] | None = None,
        block_factor: str | None = None,
        notes: Iterable[str] = (),
    ) -> Plan:
        """Build a plan from raw level labels, canonicalizing them to 0..s-1."""
        if len(names) != len(rows):
            raise PlanError("need one row of levels per factor name")
        levels = levels or {}
        factors = []
        table = []
        for name, row in zip(names, rows):
            labels = [str(x) for x in row]
            declared = levels.get(name)
            order = tuple(str(x) for x in declared) if declared else tuple(sorted(set(labels), key=_label_key))
            pos = {lab: i for i, lab in enumerate(order)}
            missing = sorted(set(labels) - set(pos))
            if missing:
                raise PlanError(f"factor {name} uses undeclared levels {missing}")
            factors.append(Factor(name, order))
            table.append(tuple(pos[lab] for lab in labels))
        return cls(tuple(factors), tuple(table), block_factor, tuple(notes))

    @property
    def runs(self) -> int:
        return len(self.table[0])

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.factors)

    def index(self, name: str) -> int:
        for i, f in enumerate(self.factors):
            if f.name == name:
                return i
        raise UnknownFactorError(f"unknown factor {name!r}")

    def factor(self, name: str) -> Factor:
        return self.factors[self.index(name)]

    def row(self, name: str) -> tuple[int, ...]:
        return self.table[self.index(name)]

    def labels(self, name: str) -> tuple[str, ...]:
        f = self.factor(name)
        return tuple(f.levels[x] for x in self.row(name))

    def level_count(self, name: str) -> int:
        return self.factor(name).level_count

    @property
    def treatment_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.names if n != self.block_factor)

    def block_sizes(self) -> tuple[int, ...]:
        if self.block_factor is None:
            raise PlanError("plan has no block factor")
        return replication_vector(self, self.block_factor)

    def signature(self) -> str:
        """Level structure such as '3^4 2^3' (block factor excluded)."""
        counts: dict[int, int] = {}
        for name in self.treatment_names:
            s = self.level_count(name)
            counts[s] = counts.get(s, 0) + 1
        return " ".join(f"{s}^{m}" if m > 1 else str(s) for s, m in counts.items())

    @cached_property
    def _cache(self) -> dict:
        # derived counts and Gram reductions; not part of equality
        return {}


# -------------------------
# Counts
# -------------------------


def replication_vector(plan: Plan, factor: str) -> tuple[int, ...]:
    row = plan.row(factor)
    counts = [0] * plan.level_count(factor)
    for x in row:
        counts[x] += 1
    return tuple(counts)


def replication_diag(plan: Plan, factor: str) -> RatMatrix:
    return RatMatrix.diag(replication_vector(plan, factor))


def _incidence_counts(plan: Plan, a: str, b: str) -> tuple[tuple[int, ...], ...]:
    key = ("incidence", a, b)
    if key not in plan._cache:
        counts = [[0] * plan.level_count(b) for _ in range(plan.level_count(a))]
        for x, y in zip(plan.row(a), plan.row(b)):
            counts[x][y] += 1
        plan._cache[key] = tuple(tuple(r) for r in counts)
    return plan._cache[key]


def incidence(plan: Plan, a: str, b: str) -> RatMatrix:
    """N^{A,B}: joint occurrence counts of the levels of A (rows) and B (columns)."""
    plan.index(a)
    plan.index(b)
    return RatMatrix(_incidence_counts(plan, a, b))


def design_matrix(plan: Plan, factor: str) -> RatMatrix:
    """X_A: n × s_A 0/1 matrix, one 1 per run in the column of its level."""
    s = plan.level_count(factor)
    return RatMatrix([[1 if x == j else 0 for j in range(s)] for x in plan.row(factor)])


def _gram(plan: Plan, names: Sequence[str]) -> RatMatrix:
    """Gram matrix of [1_n, X_W for W in names], assembled from counts."""
    n = plan.runs
    reps = {w: replication_vector(plan, w) for w in names}
    top = [RatMatrix([[n]])] + [RatMatrix([reps[w]]) for w in names]
    grid = [top]
    for w in names:
        grid.append([RatMatrix.column(reps[w])] + [incidence(plan, w, x) for x in names])
    return RatMatrix.block(grid)


def _reduced_gram(plan: Plan) -> tuple[RatMatrix, dict[str, range]]:
    """
    Gram of the non-block factors with 1_n and the block factor already eliminated,
    plus the column span of each factor in it. Built once per plan.
    """
    if "reduced" not in plan._cache:
        bl = (plan.block_factor,) if plan.block_factor is not None else ()
        rest = plan.treatment_names
        q = 1 + sum(plan.level_count(w) for w in bl)
        reduced = psd_schur_complement(_gram(plan, bl + rest), q)
        spans = {}
        pos = 0
        for w in rest:
            spans[w] = range(pos, pos + plan.level_count(w))
            pos += plan.level_count(w)
        plan._cache["reduced"] = (reduced, spans)
    return plan._cache["reduced"]


def _c_from_reduced(plan: Plan, targets: tuple[str, ...], elim: tuple[str, ...]) -> RatMatrix:
    # eliminating 1_n and the block factor first gives the same Schur complement
    reduced, spans = _reduced_gram(plan)
    inner = [w for w in elim if w != plan.block_factor]
    cols = [j for w in (*inner, *targets) for j in spans[w]]
    q = sum(len(spans[w]) for w in inner)
    return psd_schur_complement(reduced.submatrix(cols, cols), q)


# -------------------------
# C-matrices
# -------------------------


@dataclass(frozen=True)
class CMatrixResult:
    row_factor: str
    col_factor: str
    eliminated: tuple[str, ...]
    matrix: RatMatrix


def c_matrix(
    plan: Plan,
    u: str,
    v: str,
    eliminate: Iterable[str] = (),
    *,
    ginv: GInverse | None = None,
) -> CMatrixResult:
    """
    C_{U,V;L} = X_Uᵀ Q X_V, Q projecting out 1_n and every X_W, W ∈ L.
    Without ginv the Schur complement is taken by pivoted elimination.
    """
    elim = tuple(dict.fromkeys(eliminate))
    for name in (u, v, *elim):
        plan.index(name)
    if u in elim or v in elim:
        raise PlanError(f"target factors {u}, {v} overlap the eliminated set {list(elim)}")
    targets = (u,) if u == v else (u, v)
    if ginv is None and plan.block_factor in elim:
        rest = _c_from_reduced(plan, targets, elim)
    elif ginv is None:
        rest = psd_schur_complement(_gram(plan, elim + targets), 1 + sum(plan.level_count(w) for w in elim))
    else:
        gram = _gram(plan, elim + targets)
        q = 1 + sum(plan.level_count(w) for w in elim)
        size = gram.rows
        rest = schur_complement(
            gram.submatrix(range(q, size), range(q, size)),
            gram.submatrix(range(q, size), range(q)),
            gram.submatrix(range(q), range(q, size)),
            gram.submatrix(range(q), range(q)),
            ginv,
        )
    su = plan.level_count(u)
    if u == v:
        matrix = rest
    else:
        matrix = rest.submatrix(range(su), range(su, su + plan.level_count(v)))
    return CMatrixResult(u, v, elim, matrix)


def full_c_matrix(plan: Plan, factor: str, *, ginv: GInverse | None = None) -> RatMatrix:
    """C_A: every other factor, block factor included, eliminated."""
    others = [n for n in plan.names if n != factor]
    return c_matrix(plan, factor, factor, others, ginv=ginv).matrix


def c_matrix_by_blocks(plan: Plan, a: str, b: str, ginv: GInverse = g_inverse) -> RatMatrix:
    """C_A = C_{A;B} − E_{A;B}(H_{A;B})⁻E_{A;B}ᵀ over the factors other than A and B."""
    others = [q for q in plan.names if q not in (a, b)]
    c_ab = c_matrix(plan, a, a, [b]).matrix
    if not others:
        return c_ab
    e = RatMatrix.block([[c_matrix(plan, a, q, [b]).matrix for q in others]])
    h = RatMatrix.block([[c_matrix(plan, p, q, [b]).matrix for q in others] for p in others])
    return schur_complement(c_ab, e, e.T, h, ginv)


def hypothetical_omep_c_matrix(replication: Sequence[int | Fraction]) -> RatMatrix:
    """diag(r) − r rᵀ/n: the C-matrix of a factor orthogonal to everything else."""
    n = sum(replication)
    r = RatMatrix.column(replication)
    return RatMatrix.diag(replication) - (r @ r.T) / n


# -------------------------
# Orthogonality
# -------------------------


def is_proportional_frequency(plan: Plan, a: str, b: str) -> bool:
    """n·N^{A,B} = r^A (r^B)ᵀ."""
    ra = RatMatrix.column(replication_vector(plan, a))
    rb = RatMatrix.column(replication_vector(plan, b))
    return incidence(plan, a, b) * plan.runs == ra @ rb.T


def orthogonal_through(plan: Plan, a: str, b: str, c: str) -> bool:
    """N^{A,B} = N^{A,C} (R^C)⁻¹ N^{C,B}."""
    if len({a, b, c}) != 3:
        raise PlanError("orthogonality through a factor needs three distinct factors")
    inv_rc = RatMatrix.diag([Fraction(1, x) for x in replication_vector(plan, c)])
    return incidence(plan, a, b) == incidence(plan, a, c) @ inv_rc @ incidence(plan, c, b)


def block_orthogonal(plan: Plan, a: str, b: str) -> bool:
    """B_{i,j} = k·U_{i,j} for a plan on blocks of common size k."""
    sizes = set(plan.block_sizes())
    if len(sizes) != 1:
        raise PlanError("the combinatorial block condition needs equal block sizes")
    k = sizes.pop()
    bl = plan.block_factor
    together = incidence(plan, a, bl) @ incidence(plan, bl, b)
    return together == incidence(plan, a, b) * k


class PairRelation(NamedTuple):
    kind: str  # "proportional", "through" or "none"
    witness: str | None = None


def classify_pair(plan: Plan, a: str, b: str) -> PairRelation:
    if is_proportional_frequency(plan, a, b):
        return PairRelation("proportional")
    for c in plan.names:
        if c not in (a, b) and orthogonal_through(plan, a, b, c):
            return PairRelation("through", c)
    return PairRelation("none")


# -------------------------
# Degrees of freedom
# -------------------------


class DofSummary(NamedTuple):
    model_df: int
    residual_df: int


def dof_summary(plan: Plan) -> DofSummary:
    # rank splits over the eliminated leading block: rank [1_n, X_bl] is the block count
    lead = plan.level_count(plan.block_factor) if plan.block_factor is not None else 1
    model = lead + rank(_reduced_gram(plan)[0])
    return DofSummary(model, plan.runs - model)
