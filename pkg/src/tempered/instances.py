"""Randomized desk-scale instances for the verification suites.

Everything here is a generator of small, honest examples: finite groups of
order at most six, grids assembled from coset orbits, genuinely projective
unitary actions (a true representation conjugated pointwise and twisted by
modulus-one scalars), and module presentations whose Gram is a random
invariant projection.  The suites feed these to the verifiers in
:mod:`tempered.modules`; nothing in this module is needed for the
deterministic bundled models.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import FiberedSpace, BaseSpace, FiniteGroup, OperatorField, ProjectiveAction
from .linalg import hermitize, random_unitary
from .modules import GramModule, ambient_action

__all__ = [
    "all_subgroups",
    "random_representation",
    "random_action",
    "random_invariant_projection",
    "random_module_instance",
]


def all_subgroups(group: FiniteGroup) -> list[tuple[int, ...]]:
    """Every subgroup of a small group, as sorted tuples of element indices.

    Brute force over subsets containing the identity; fine for the orders
    used here (at most a few dozen).
    """
    n = group.order
    if n > 12:
        raise ValueError("subgroup enumeration is only meant for very small groups")
    e = group.identity
    others = [i for i in range(n) if i != e]
    found = []
    for r in range(len(others) + 1):
        for picks in itertools.combinations(others, r):
            cand = {e, *picks}
            if all(group.mul(a, b) in cand for a in cand for b in cand):
                found.append(tuple(sorted(cand)))
    return found


# --------------------------------------------------------------------------
# Random genuine representations of the small groups
# --------------------------------------------------------------------------


def _perm_matrix(p: tuple[int, ...]) -> np.ndarray:
    m = np.zeros((len(p), len(p)), dtype=complex)
    for i, pi in enumerate(p):
        m[pi, i] = 1.0
    return m


def _s3_standard(p: tuple[int, ...]) -> np.ndarray:
    """The two-dimensional summand of the permutation representation of S3."""
    # fixed isometry onto the complement of the all-ones vector
    q = np.array(
        [
            [1.0 / np.sqrt(2.0), 1.0 / np.sqrt(6.0)],
            [-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(6.0)],
            [0.0, -2.0 / np.sqrt(6.0)],
        ],
        dtype=complex,
    )
    return q.conj().T @ _perm_matrix(p) @ q


def random_representation(
    rng: np.random.Generator, group: FiniteGroup, dim: int
) -> list[np.ndarray]:
    """A genuine unitary representation of ``group`` of the given dimension.

    Cyclic groups get random direct sums of characters (exact, through a
    discrete log on a generator); the symmetric group on three letters
    gets a random direct sum of its irreducibles.  The homomorphism
    property is exact up to floating products.
    """
    n = group.order
    if n == 1:
        return [np.eye(dim, dtype=complex)]
    orders = []
    for i in range(n):
        k, acc = 1, i
        while acc != group.identity:
            acc = group.mul(acc, i)
            k += 1
        orders.append(k)
    generators = [i for i in range(n) if orders[i] == n]
    if generators:
        # cyclic: exact characters through a discrete log on a generator
        g = generators[0]
        log = {group.identity: 0}
        acc = group.identity
        for k in range(1, n):
            acc = group.mul(acc, g)
            log[acc] = k
        picks = rng.integers(0, n, size=dim)
        out = []
        for i in range(n):
            phases = np.exp(2j * np.pi * picks * log[i] / n)
            out.append(np.diag(phases))
        return out
    # nonabelian order six: S3-shaped, elements are permutation tuples
    if n == 6 and isinstance(group.elements[0], tuple):
        blocks = []
        remaining = dim
        while remaining > 0:
            choice = rng.integers(0, 3)
            if choice == 2 and remaining >= 2:
                blocks.append("std")
                remaining -= 2
            else:
                blocks.append("triv" if choice == 0 else "sign")
                remaining -= 1
        out = []
        for i in range(n):
            p = group.elements[i]
            sign = float(np.linalg.det(_perm_matrix(p)).real)
            pieces = []
            for b in blocks:
                if b == "triv":
                    pieces.append(np.eye(1, dtype=complex))
                elif b == "sign":
                    pieces.append(sign * np.eye(1, dtype=complex))
                else:
                    pieces.append(_s3_standard(p))
            m = np.zeros((dim, dim), dtype=complex)
            pos = 0
            for piece in pieces:
                k = piece.shape[0]
                m[pos : pos + k, pos : pos + k] = piece
                pos += k
            out.append(m)
        return out
    raise ValueError("no representation recipe for this group")


# --------------------------------------------------------------------------
# Random actions and modules
# --------------------------------------------------------------------------


def _random_group(rng: np.random.Generator, max_order: int) -> FiniteGroup:
    kinds: list = ["trivial"]
    for k in range(2, max_order + 1):
        kinds.append(("cyclic", k))
    if max_order >= 6:
        kinds.append("s3")
    kind = kinds[rng.integers(0, len(kinds))]
    if kind == "trivial":
        return FiniteGroup.trivial()
    if kind == "s3":
        return FiniteGroup.symmetric(3)
    return FiniteGroup.cyclic(kind[1])


def random_action(
    rng: np.random.Generator,
    max_points: int = 6,
    max_group: int = 6,
    max_dim: int = 5,
) -> ProjectiveAction:
    """A random projective action on a random grid.

    The grid is a disjoint union of coset orbits of random subgroups; the
    unitaries over each orbit are a genuine representation conjugated by
    independent unitaries per point, then twisted by random modulus-one
    scalars per (element, point), so the cocycle is honestly projective
    while the adjoint action stays untouched.
    """
    group = _random_group(rng, max_group)
    subgroups = all_subgroups(group)
    orbits: list[tuple[tuple[int, ...], int]] = []  # (subgroup, fiber dim)
    total = 0
    dim_choices = [1, 2, 3, 4, 5][: max_dim]
    dim_weights = np.array([0.35, 0.3, 0.2, 0.1, 0.05][: max_dim])
    dim_weights = dim_weights / dim_weights.sum()
    while True:
        fitting = [h for h in subgroups if total + group.order // len(h) <= max_points]
        if not fitting or (orbits and rng.random() < 0.35):
            break
        h = fitting[rng.integers(0, len(fitting))]
        d = int(rng.choice(dim_choices, p=dim_weights))
        orbits.append((h, d))
        total += group.order // len(h)

    labels: list[str] = []
    dims: list[int] = []
    perm_rows: list[list[int]] = [[] for _ in range(group.order)]
    unit_rows: list[list[np.ndarray]] = [[] for _ in range(group.order)]

    for h, d in orbits:
        hset = set(h)
        # left cosets, indexed by their smallest element
        cosets: dict[int, int] = {}
        reps: list[int] = []
        for g in range(group.order):
            members = sorted(group.mul(g, u) for u in hset)
            key = members[0]
            if key not in cosets:
                cosets[key] = len(reps) + len(labels)
                reps.append(key)
        rho = random_representation(rng, group, d)
        conj = {key: random_unitary(rng, d) for key in reps}
        for key in reps:
            labels.append(f"x{len(labels)}")
            dims.append(d)
        for w in range(group.order):
            for key in reps:
                # the point w . (coset of key) is the coset of w*key
                moved = sorted(group.mul(group.mul(w, key), u) for u in hset)[0]
                perm_rows[w].append(cosets[moved])
                twist = 1.0 if w == group.identity else np.exp(
                    2j * np.pi * rng.random()
                )
                unit_rows[w].append(
                    twist * (conj[moved] @ rho[w] @ conj[key].conj().T)
                )

    space = FiberedSpace(BaseSpace(tuple(labels)), tuple(dims))
    action = ProjectiveAction(
        group,
        space,
        np.array(perm_rows, dtype=np.intp),
        tuple(tuple(row) for row in unit_rows),
    )
    action.validate(1e-8)
    return action


def random_invariant_projection(
    rng: np.random.Generator, action: ProjectiveAction, n: int
) -> tuple[tuple[OperatorField, ...], ...]:
    """A random invariant projection in the n-by-n matrices over the invariants.

    Averages a random Hermitian block field and cuts its spectrum at the
    midpoint of the largest gap, pooled over all points so the projector
    is constant along orbits.  Falls back to the identity when the
    spectrum has no usable gap.
    """
    amb = ambient_action(action, n)
    h = OperatorField.random(amb.space, amb.space, rng)
    h = 0.5 * (h + h.adjoint())
    havg = amb.average(h)
    pooled = np.sort(
        np.concatenate([np.linalg.eigvalsh(m) for m in havg.mats if m.size])
    )
    blocks_from = None
    if pooled.size >= 2:
        gaps = np.diff(pooled)
        k = int(np.argmax(gaps))
        if gaps[k] > 1e-2:
            c = 0.5 * (pooled[k] + pooled[k + 1])
            q_mats = []
            for m in havg.mats:
                if m.size == 0:
                    q_mats.append(m.copy())
                    continue
                vals, vecs = np.linalg.eigh(hermitize(m))
                keep = vecs[:, vals > c]
                q_mats.append(keep @ keep.conj().T)
            blocks_from = q_mats
    if blocks_from is None:
        blocks_from = [np.eye(m.shape[0], dtype=complex) for m in havg.mats]
    sp = action.space
    blocks = []
    for i in range(n):
        row = []
        for j in range(n):
            mats = []
            for x in range(sp.npoints):
                d = sp.dim(x)
                mats.append(blocks_from[x][i * d : (i + 1) * d, j * d : (j + 1) * d])
            row.append(OperatorField(sp, sp, tuple(mats)))
        blocks.append(tuple(row))
    return tuple(blocks)


def random_module_instance(
    rng: np.random.Generator,
    max_points: int = 6,
    max_group: int = 6,
    max_dim: int = 5,
) -> tuple[ProjectiveAction, GramModule]:
    """A random action plus a random module over its fixed-point algebra.

    The Gram is either the identity (a free module) or a random invariant
    projection; sizes are kept small enough that a verification suite of
    fifty instances stays well inside its time budget.
    """
    for _ in range(24):
        action = random_action(rng, max_points, max_group, max_dim)
        n = int(rng.choice([1, 2, 3], p=[0.3, 0.45, 0.25]))
        weight = sum((n * d) ** 2 for d in action.space.dims)
        if weight <= 1200:
            break
    names = tuple(f"e{i}" for i in range(n))
    if rng.random() < 0.15:
        ident = OperatorField.identity(action.space)
        zero = OperatorField.zeros(action.space, action.space)
        gram = tuple(
            tuple(ident if i == j else zero for j in range(n)) for i in range(n)
        )
    else:
        gram = random_invariant_projection(rng, action, n)
    return action, GramModule(names, gram)
