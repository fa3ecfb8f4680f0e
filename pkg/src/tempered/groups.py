"""Block combinatorics: parabolic shapes, Weyl permutations, stabilizers.

A standard parabolic shape of size ``n`` is a composition (an ordered list
of positive block sizes summing to ``n``).  The Weyl layer permutes blocks
of equal size; everything a model needs from it — stabilizers of labeled
assignments, isotropy of character-grid points, the gluing rule for nested
shapes — is a pure function on these small permutation sets.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .core import FiniteGroup

__all__ = [
    "Composition",
    "enumerate_parabolics",
    "associate_classes",
    "class_representative",
    "WeylData",
    "weyl_group",
    "sigma_stabilizer",
    "sigma_stabilizer_pair",
    "isotropy_at",
    "glue_parabolic",
]

Composition = tuple[int, ...]


def _as_composition(parts: Sequence[int]) -> Composition:
    comp = tuple(int(p) for p in parts)
    if not comp or any(p < 1 for p in comp):
        raise ValueError(f"{parts!r} is not a composition: parts must be positive")
    return comp


def enumerate_parabolics(n: int) -> list[Composition]:
    """All compositions of ``n``, ordered by part count then lexicographically descending.

    The count is always ``2^(n-1)``: a composition is a choice of gap set.
    For ``n = 3`` the order is ``(3,), (2,1), (1,2), (1,1,1)``.
    """
    if n < 1:
        raise ValueError("composition size must be at least 1")
    out: list[Composition] = []
    for gaps in range(n):
        chunk = [
            comp
            for comp in _compositions_with_parts(n, gaps + 1)
        ]
        chunk.sort(reverse=True)
        out.extend(chunk)
    return out


def _compositions_with_parts(n: int, k: int) -> list[Composition]:
    if k == 1:
        return [(n,)]
    out = []
    for first in range(1, n - k + 2):
        out.extend((first, *rest) for rest in _compositions_with_parts(n - first, k - 1))
    return out


def associate_classes(n: int) -> list[tuple[Composition, list[Composition]]]:
    """Compositions of ``n`` grouped by equality as multisets.

    Returns ``(partition, members)`` pairs: the partition is the shared
    multiset sorted descending, members keep enumeration order, and the
    classes are ordered by their partitions with the same part-count-then-
    lex-descending rule.  There are ``p(n)`` classes.
    """
    classes: dict[Composition, list[Composition]] = {}
    for comp in enumerate_parabolics(n):
        key = tuple(sorted(comp, reverse=True))
        classes.setdefault(key, []).append(comp)
    keys = sorted(classes, key=lambda k: (len(k), tuple(-p for p in k)))
    return [(k, classes[k]) for k in keys]


def class_representative(comp: Sequence[int]) -> Composition:
    """Canonical representative of a composition's associate class.

    The lexicographically smallest rearrangement, i.e. the parts sorted
    ascending; all component indexing uses this representative.
    """
    return tuple(sorted(_as_composition(comp)))


# --------------------------------------------------------------------------
# Weyl permutations of blocks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylData:
    """A set of block permutations of a fixed composition, closed under composition.

    A permutation ``p`` moves block ``i`` to position ``p[i]`` and is only
    admitted when block sizes are preserved.  The element set is kept as
    plain tuples; a full multiplication table is only materialized on
    demand for small orders.
    """

    composition: Composition
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        comp = _as_composition(self.composition)
        object.__setattr__(self, "composition", comp)
        k = len(comp)
        perms = tuple(tuple(int(i) for i in p) for p in self.perms)
        object.__setattr__(self, "perms", perms)
        seen = set(perms)
        if len(seen) != len(perms) or tuple(range(k)) not in seen:
            raise ValueError("permutation set must be duplicate-free and contain the identity")
        for p in perms:
            if sorted(p) != list(range(k)):
                raise ValueError(f"{p!r} is not a permutation of the blocks")
            if any(comp[p[i]] != comp[i] for i in range(k)):
                raise ValueError(f"{p!r} does not preserve block sizes")
        # closure: exhaustive for small sets, deterministic sampling for the
        # genuinely large symmetric-type sets (closed by construction there)
        if len(perms) ** 2 <= 250_000:
            pairs = itertools.product(perms, perms)
        else:
            step = max(1, len(perms) // 100)
            sample = perms[::step]
            pairs = itertools.product(sample, sample)
        for p, q in pairs:
            if tuple(p[q[i]] for i in range(k)) not in seen:
                raise ValueError("permutation set is not closed under composition")

    @property
    def order(self) -> int:
        return len(self.perms)

    def to_group(self) -> FiniteGroup:
        """Materialize a full multiplication table (guarded to small orders)."""
        if self.order > 1024:
            raise ValueError(
                f"refusing to materialize a multiplication table of order {self.order}"
            )
        return FiniteGroup.from_permutations(self.perms)

    def act_tuple(self, p: tuple[int, ...], values: Sequence) -> tuple:
        """Move per-block values: the result at position ``p[i]`` is ``values[i]``."""
        out = [None] * len(values)
        for i, v in enumerate(values):
            out[p[i]] = v
        return tuple(out)

    def subset(self, keep) -> "WeylData":
        """The sub-WeylData of permutations satisfying a predicate (closure re-checked)."""
        perms = tuple(p for p in self.perms if keep(p))
        return WeylData(self.composition, perms)


def weyl_group(comp: Sequence[int]) -> WeylData:
    """All block permutations of a composition that preserve block sizes.

    The order is the product of factorials of the size multiplicities.
    """
    comp = _as_composition(comp)
    k = len(comp)
    positions: dict[int, list[int]] = {}
    for i, size in enumerate(comp):
        positions.setdefault(size, []).append(i)
    # assemble as a product over size classes instead of filtering all of S_k
    groups = list(positions.values())
    perms: list[tuple[int, ...]] = []
    pools = [list(itertools.permutations(idxs)) for idxs in groups]
    for choice in itertools.product(*pools):
        p = [0] * k
        for idxs, img in zip(groups, choice):
            for src, dst in zip(idxs, img):
                p[src] = dst
        perms.append(tuple(p))
    expect = math.prod(math.factorial(m) for m in Counter(comp).values())
    if len(perms) != expect:
        raise AssertionError("Weyl enumeration disagrees with the multiplicity formula")
    return WeylData(comp, tuple(perms))


def sigma_stabilizer(weyl: WeylData, labels: Sequence[str]) -> WeylData:
    """Elements fixing a per-block labeling (the stabilizer of the assignment).

    The assignment attaches an opaque label to each block; a permutation
    stabilizes it when every block lands on a block with the same label.
    """
    labels = tuple(labels)
    if len(labels) != len(weyl.composition):
        raise ValueError("need exactly one label per block")
    return weyl.subset(lambda p: all(labels[p[i]] == labels[i] for i in range(len(labels))))


def sigma_stabilizer_pair(
    p_comp: Sequence[int],
    q_blocks: Sequence[Sequence[int]],
    labels: Sequence[str],
) -> tuple[WeylData, WeylData]:
    """The nested pair of stabilizers for a two-step parabolic shape.

    ``q_blocks`` refines each block of ``p_comp``; the glued composition
    carries the labeling.  The large stabilizer permutes all glued blocks,
    the small one only within each ambient block; the inclusion is checked.

    Returns
    -------
    (small, large) : pair of WeylData over the glued composition.
    """
    glued = glue_parabolic(q_blocks, p_comp)
    large = sigma_stabilizer(weyl_group(glued), labels)
    # ranges of glued-block indices belonging to each ambient block
    owner: list[int] = []
    for bi, q in enumerate(q_blocks):
        owner.extend([bi] * len(tuple(q)))
    small = large.subset(
        lambda p: all(owner[p[i]] == owner[i] for i in range(len(owner)))
    )
    if not set(small.perms) <= set(large.perms):
        raise AssertionError("stabilizer inclusion failed")
    return small, large


def isotropy_at(
    weyl: WeylData, grid: Sequence[Sequence[float]], phi: Sequence[float]
) -> WeylData:
    """Elements of a block-permutation set fixing one character-grid point.

    ``grid`` lists the admissible per-block character tuples; ``phi`` must
    be one of them.  Block permutations act by moving coordinates, so the
    isotropy test is exact tuple equality after reindexing.
    """
    pts = [tuple(float(c) for c in q) for q in grid]
    phi = tuple(float(c) for c in phi)
    if phi not in pts:
        raise ValueError(f"point {phi!r} is not on the grid")
    return weyl.subset(lambda p: weyl.act_tuple(p, phi) == phi)


def glue_parabolic(q_blocks: Sequence[Sequence[int]], p_comp: Sequence[int]) -> Composition:
    """Replace each block of an ambient composition by its own refinement.

    ``q_blocks[i]`` must be a composition of ``p_comp[i]``; the result is
    their concatenation, a composition of the ambient total.  Iterated
    gluing agrees with gluing the composed refinement.
    """
    p_comp = _as_composition(p_comp)
    if len(q_blocks) != len(p_comp):
        raise ValueError("need exactly one refinement per ambient block")
    out: list[int] = []
    for q, size in zip(q_blocks, p_comp):
        q = _as_composition(q)
        if sum(q) != size:
            raise ValueError(
                f"refinement {q!r} does not sum to its ambient block size {size}"
            )
        out.extend(q)
    return tuple(out)
