"""Block designs: treatments 0..v-1 arranged in blocks, and their information matrix C_d."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import DesignError
from .linalg import RatMatrix, rank


@dataclass(frozen=True)
class BlockDesign:
    treatments: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise DesignError("empty design: at least one block is required")
        if self.treatments < 1:
            raise DesignError("a design needs at least one treatment")
        for j, block in enumerate(self.blocks):
            if not block:
                raise DesignError(f"block {j + 1} is empty")
            bad = [t for t in block if not 0 <= t < self.treatments]
            if bad:
                raise DesignError(f"block {j + 1} uses treatments outside 1..{self.treatments}: {bad}")

    @classmethod
    def from_one_indexed(cls, treatments: int, blocks: Iterable[Sequence[int]]) -> BlockDesign:
        return cls(treatments, tuple(tuple(t - 1 for t in block) for block in blocks))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def block_size(self) -> int | None:
        """Common block size k, or None when sizes differ."""
        sizes = set(self.block_sizes)
        return sizes.pop() if len(sizes) == 1 else None

    def replication(self) -> tuple[int, ...]:
        counts = [0] * self.treatments
        for block in self.blocks:
            for t in block:
                counts[t] += 1
        return tuple(counts)

    def is_equireplicate(self) -> bool:
        return len(set(self.replication())) == 1

    def incidence(self) -> RatMatrix:
        """v × b treatment-block counts."""
        counts = [[0] * self.block_count for _ in range(self.treatments)]
        for j, block in enumerate(self.blocks):
            for t in block:
                counts[t][j] += 1
        return RatMatrix(counts)

    def one_indexed(self) -> list[list[int]]:
        return [[t + 1 for t in block] for block in self.blocks]


def block_design_c_matrix(d: BlockDesign) -> RatMatrix:
    """C_d = R − N·diag(k_j)⁻¹·Nᵀ."""
    n = d.incidence()
    inv_k = RatMatrix.diag([Fraction(1, k) for k in d.block_sizes])
    return RatMatrix.diag(d.replication()) - n @ inv_k @ n.T


def is_binary(d: BlockDesign) -> bool:
    return all(len(set(block)) == len(block) for block in d.blocks)


def _graph_connected(d: BlockDesign) -> bool:
    """Breadth-first search over the treatment–block bipartite graph."""
    blocks_of: list[list[int]] = [[] for _ in range(d.treatments)]
    for j, block in enumerate(d.blocks):
        for t in block:
            blocks_of[t].append(j)
    seen = {0}
    queue = deque([0])
    used_blocks: set[int] = set()
    while queue:
        t = queue.popleft()
        for j in blocks_of[t]:
            if j in used_blocks:
                continue
            used_blocks.add(j)
            for u in d.blocks[j]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return len(seen) == d.treatments


def is_connected(d: BlockDesign) -> bool:
    by_graph = _graph_connected(d)
    by_rank = rank(block_design_c_matrix(d)) == d.treatments - 1
    if by_graph != by_rank:
        raise DesignError("graph connectivity and rank(C_d) disagree")
    return by_graph
