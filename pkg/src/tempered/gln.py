"""Block-combinatorial model builder for general-linear toy data.

Given a Levi shape (a composition), every associate class of its
refinements becomes one component: the grid is a product of character
values, one coordinate per refined block, the stabilizer is the group of
size- and-ownership-preserving block permutations, and the fiber is its
group algebra with left-translation unitaries.  Nested shapes produce
linked small/large models and the two-step induction chain used by the
staging checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import AlgebraModel, Component
from .core import BaseSpace, FiberedSpace, FiniteGroup, ProjectiveAction
from .groups import (
    Composition,
    enumerate_parabolics,
    glue_parabolic,
    sigma_stabilizer_pair,
)
from .ups import UPSComponent, UPSModel

__all__ = [
    "composition_cid",
    "parabolic_component",
    "gln_model",
    "ups_link",
    "StageChain",
    "build_stage_chain",
]


def _fmt(v: float) -> str:
    return format(float(v), "g")


def composition_cid(r: Sequence[int]) -> str:
    """The component id attached to a refined shape, e.g. ``(1, 2) -> "p1-2"``."""
    return "p" + "-".join(str(int(b)) for b in r)


def _left_translation(group: FiniteGroup, w: int) -> np.ndarray:
    mat = np.zeros((group.order, group.order), dtype=complex)
    for g in range(group.order):
        mat[group.mul(w, g), g] = 1.0
    return mat


def parabolic_component(
    levi: Sequence[int],
    q_blocks: Sequence[Sequence[int]],
    grid_values: Sequence[float],
    cid: str | None = None,
) -> Component:
    """The component of a Levi-shaped model at one refinement of its blocks.

    The refined shape ``r`` glues ``q_blocks`` along ``levi``; the grid is
    ``grid_values^len(r)`` with coordinates permuted by the stabilizer
    W_sigma of the model (block permutations of ``r`` preserving sizes and
    staying within each ambient block), and the fiber over every point is
    the group algebra of that stabilizer acting by left translation.
    """
    levi = tuple(int(b) for b in levi)
    r = glue_parabolic(q_blocks, levi)
    labels = tuple(str(b) for b in r)
    small, _ = sigma_stabilizer_pair(levi, q_blocks, labels)
    group = small.to_group()

    values = tuple(float(v) for v in grid_values)
    pts = list(itertools.product(values, repeat=len(r)))
    base = BaseSpace(
        tuple(",".join(_fmt(c) for c in p) for p in pts),
        coords=tuple(pts),
    )
    space = FiberedSpace(base, (group.order,) * len(pts))
    index = {p: i for i, p in enumerate(pts)}
    point_perm = tuple(
        tuple(index[small.act_tuple(perm, p)] for p in pts)
        for perm in group.elements
    )
    lam = [_left_translation(group, w) for w in range(group.order)]
    unitaries = tuple(tuple(lam[w] for _ in pts) for w in range(group.order))
    action = ProjectiveAction(group, space, point_perm, unitaries)
    partition = "-".join(str(b) for b in sorted(r, reverse=True))
    return Component.build(
        cid if cid is not None else composition_cid(r),
        parabolic=partition,
        sigma="-".join(labels),
        action=action,
    )


def _refinement_classes(
    levi: Composition,
) -> list[tuple[Composition, tuple[Composition, ...]]]:
    """Associate classes of refinements of a Levi shape.

    Returns ``(representative, q_blocks)`` pairs — the representative is
    the lexicographically smallest refinement in its multiset class —
    ordered by part count then lex-descending partition, the same rule the
    ambient class enumeration uses.
    """
    per_block = [enumerate_parabolics(b) for b in levi]
    classes: dict[Composition, tuple[Composition, tuple[Composition, ...]]] = {}
    for choice in itertools.product(*per_block):
        r = glue_parabolic(choice, levi)
        key = tuple(sorted(r, reverse=True))
        cur = classes.get(key)
        if cur is None or r < cur[0]:
            classes[key] = (r, tuple(choice))
    keys = sorted(classes, key=lambda k: (len(k), tuple(-p for p in k)))
    return [classes[k] for k in keys]


def gln_model(levi: Sequence[int], grid_values: Sequence[float]) -> AlgebraModel:
    """The model of a Levi shape: one component per refinement class."""
    levi = tuple(int(b) for b in levi)
    return AlgebraModel(
        tuple(
            parabolic_component(levi, q_blocks, grid_values)
            for _, q_blocks in _refinement_classes(levi)
        )
    )


def ups_link(
    uid: str,
    l_model: AlgebraModel,
    l_cid: str,
    g_model: AlgebraModel,
    g_cid: str,
) -> UPSComponent:
    """Link equally shaped components of two nested models into a summand.

    Both components must sit at the same refined shape; the embedding of
    stabilizers matches block permutations by their labels.
    """
    lc, gc = l_model.component(l_cid), g_model.component(g_cid)
    lg, gg = lc.action.group, gc.action.group
    try:
        embed = tuple(gg.element_index(el) for el in lg.elements)
    except ValueError as exc:
        raise ValueError(
            f"components {l_cid!r} and {g_cid!r} have incompatible stabilizers: {exc}"
        ) from None
    return UPSComponent(uid, lc, gc, embed)


@dataclass(frozen=True)
class StageChain:
    """The three bimodules of a two-step parabolic chain.

    ``lower`` runs from the base model up to the intermediate Levi,
    ``upper`` from the intermediate Levi to the ambient model, and
    ``glued`` is the one-step bimodule their compositions must fill.  The
    uids name the distinguished summand inside each.
    """

    glued: UPSModel
    upper: UPSModel
    lower: UPSModel
    glued_uid: str
    upper_uid: str
    lower_uid: str

    @property
    def j_model(self) -> AlgebraModel:
        return self.lower.l_model

    @property
    def l_model(self) -> AlgebraModel:
        return self.upper.l_model

    @property
    def g_model(self) -> AlgebraModel:
        return self.upper.g_model


def build_stage_chain(
    n: int,
    p: Sequence[int],
    q_blocks: Sequence[Sequence[int]],
    grid_values: Sequence[float],
) -> StageChain:
    """Models and bimodules for the chain base -> Levi(p) -> ambient.

    ``q_blocks`` refines each block of ``p``; their gluing is the base
    shape.  All three links sit at that shape's class, so its canonical
    representative must itself refine every level — chains where the
    lexicographic representative does not align raise rather than
    silently relabeling blocks.
    """
    p = tuple(int(b) for b in p)
    r = glue_parabolic(q_blocks, p)
    if sum(p) != int(n):
        raise ValueError("ambient shape does not sum to n")

    g_model = gln_model((n,), grid_values)
    l_model = gln_model(p, grid_values)
    j_model = gln_model(r, grid_values)

    key = tuple(sorted(r, reverse=True))

    def min_rep(levi: Composition) -> Composition:
        for rep, _ in _refinement_classes(levi):
            if tuple(sorted(rep, reverse=True)) == key:
                return rep
        raise AssertionError("refinement class disappeared")

    reps = {"g": min_rep((n,)), "l": min_rep(p), "j": min_rep(r)}
    if len(set(reps.values())) != 1:
        raise ValueError(
            "stage chain is not alignable: class representatives differ "
            f"({reps!r}); choose a chain whose sorted base shape refines "
            "every level"
        )
    cid = composition_cid(reps["g"])

    glued = UPSModel(
        j_model, g_model, (ups_link("main", j_model, cid, g_model, cid),)
    )
    upper = UPSModel(
        l_model, g_model, (ups_link("upper", l_model, cid, g_model, cid),)
    )
    lower = UPSModel(
        j_model, l_model, (ups_link("lower", j_model, cid, l_model, cid),)
    )
    return StageChain(
        glued=glued,
        upper=upper,
        lower=lower,
        glued_uid="main",
        upper_uid="upper",
        lower_uid="lower",
    )
