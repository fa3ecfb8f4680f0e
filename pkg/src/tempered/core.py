"""Fiberwise linear algebra over finite base grids.

At desk scale everything in this package reduces to dense complex matrices
indexed by the points of a finite grid.  This module provides those carriers
(:class:`BaseSpace`, :class:`FiberedSpace`, :class:`VectorField`,
:class:`OperatorField`), finite groups acting projectively on them
(:class:`FiniteGroup`, :class:`ProjectiveAction`), the averaging and
fixed-point machinery for such actions, and direct sums with the supremum
norm.

Conventions
-----------
* A point of the grid is addressed by its position in ``BaseSpace.labels``;
  all fieldwise data is stored positionally.
* An operator field ``T`` from fibered space ``H1`` to ``H2`` (same base)
  assigns to each point ``x`` a matrix of shape ``(H2.dim(x), H1.dim(x))``.
* A projective action moves fibers along the point permutation: ``U_w(x)``
  maps the fiber at ``x`` to the fiber at ``w . x``, and the composition law
  holds up to a modulus-one scalar per point.  Conjugation (``ad``) does not
  see those scalars.
* All values are immutable after construction; arrays are copied in and
  marked read-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .linalg import as_int, hermitize, opnorm

__all__ = [
    "BaseSpace",
    "FiberedSpace",
    "VectorField",
    "OperatorField",
    "rank_one",
    "FiniteGroup",
    "ProjectiveAction",
    "ad_pair",
    "average_pair",
    "pair_invariance_residual",
    "fixed_point_algebra",
    "fixed_point_pair_basis",
    "invariant_dimension",
    "invariant_pair_dimension",
    "DirectSumElement",
    "direct_sum",
]


def _frozen_array(a, dtype=None) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# Base grids and fibered spaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BaseSpace:
    """A finite ordered grid of labeled points.

    Parameters
    ----------
    labels : tuple of str
        Pairwise-distinct point names.  The ordering is fixed at
        construction; every field in the package is indexed by position.
    coords : tuple of tuple of float, optional
        Real coordinates per point (used for character-grid semantics and
        display; identity of a point is its label, not its coordinate).
    """

    labels: tuple[str, ...]
    coords: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError("grid labels must be pairwise distinct")
        if len(labels) == 0:
            raise ValueError("a base space needs at least one point")
        if self.coords is not None:
            coords = tuple(tuple(float(c) for c in pt) for pt in self.coords)
            if len(coords) != len(labels):
                raise ValueError("coords must match labels one-to-one")
            object.__setattr__(self, "coords", coords)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lbl: k for k, lbl in enumerate(self.labels)}

    def index(self, label: str) -> int:
        """Position of a point label on the grid."""
        try:
            return self._index[str(label)]
        except KeyError:
            raise ValueError(f"unknown grid point {label!r}") from None

    @property
    def npoints(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class FiberedSpace:
    """A base grid with a finite-dimensional fiber over each point.

    ``dims`` may contain zeros: quotient constructions (interior tensor
    products) can kill a fiber entirely.  Model input spaces are validated
    to have positive dimensions where the data format requires it.
    """

    base: BaseSpace
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) != self.base.npoints:
            raise ValueError("need one fiber dimension per grid point")
        if any(d < 0 for d in dims):
            raise ValueError("fiber dimensions must be nonnegative")

    @property
    def npoints(self) -> int:
        return self.base.npoints

    def dim(self, x: int) -> int:
        return self.dims[x]

    @property
    def total_dim(self) -> int:
        """Sum of the fiber dimensions."""
        return sum(self.dims)

    @property
    def endo_dim(self) -> int:
        """Linear dimension of the space of endomorphism fields."""
        return sum(d * d for d in self.dims)

    def same_base(self, other: "FiberedSpace") -> bool:
        return self.base.labels == other.base.labels


# --------------------------------------------------------------------------
# Vector and operator fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField:
    """A choice of fiber vector over every grid point."""

    space: FiberedSpace
    vecs: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.vecs) != self.space.npoints:
            raise ValueError("need one vector per grid point")
        vecs = []
        for x, v in enumerate(self.vecs):
            arr = _frozen_array(v, dtype=complex)
            if arr.shape != (self.space.dim(x),):
                raise ValueError(
                    f"vector at point {x} has shape {arr.shape}, "
                    f"expected ({self.space.dim(x)},)"
                )
            vecs.append(arr)
        object.__setattr__(self, "vecs", tuple(vecs))

    @classmethod
    def zeros(cls, space: FiberedSpace) -> "VectorField":
        return cls(space, tuple(np.zeros(d, dtype=complex) for d in space.dims))

    @classmethod
    def random(cls, space: FiberedSpace, rng: np.random.Generator) -> "VectorField":
        return cls(
            space,
            tuple(
                rng.standard_normal(d) + 1j * rng.standard_normal(d)
                for d in space.dims
            ),
        )

    def inner(self, other: "VectorField") -> np.ndarray:
        """Pointwise fiber inner products <v(x), w(x)>, conjugate-linear on the left."""
        if other.space.dims != self.space.dims or not self.space.same_base(other.space):
            raise ValueError("vector fields live on different fibered spaces")
        return np.array(
            [np.vdot(v, w) for v, w in zip(self.vecs, other.vecs)], dtype=complex
        )

    def norm(self) -> float:
        """Supremum over points of the fiber norm."""
        if not self.vecs:
            return 0.0
        return max(float(np.linalg.norm(v)) for v in self.vecs)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(
            self.space, tuple(v + w for v, w in zip(self.vecs, other.vecs))
        )

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(
            self.space, tuple(v - w for v, w in zip(self.vecs, other.vecs))
        )

    def __mul__(self, scalar: complex) -> "VectorField":
        return VectorField(self.space, tuple(scalar * v for v in self.vecs))

    __rmul__ = __mul__


@dataclass(frozen=True)
class OperatorField:
    """A fiberwise rectangular matrix assignment between two fibered spaces.

    ``mats[x]`` has shape ``(target.dim(x), source.dim(x))``.  These are the
    universal carriers: module elements, algebra elements, and bimodule
    elements are all operator fields over suitable spaces.
    """

    source: FiberedSpace
    target: FiberedSpace
    mats: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.source.same_base(self.target):
            raise ValueError("source and target must share the same base grid")
        if len(self.mats) != self.source.npoints:
            raise ValueError("need one matrix per grid point")
        mats = []
        for x, m in enumerate(self.mats):
            arr = _frozen_array(m, dtype=complex)
            want = (self.target.dim(x), self.source.dim(x))
            if arr.shape != want:
                raise ValueError(
                    f"matrix at point {x} has shape {arr.shape}, expected {want}"
                )
            mats.append(arr)
        object.__setattr__(self, "mats", tuple(mats))

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, source: FiberedSpace, target: FiberedSpace) -> "OperatorField":
        return cls(
            source,
            target,
            tuple(
                np.zeros((dt, ds), dtype=complex)
                for dt, ds in zip(target.dims, source.dims)
            ),
        )

    @classmethod
    def identity(cls, space: FiberedSpace) -> "OperatorField":
        return cls(space, space, tuple(np.eye(d, dtype=complex) for d in space.dims))

    @classmethod
    def random(
        cls,
        source: FiberedSpace,
        target: FiberedSpace,
        rng: np.random.Generator,
    ) -> "OperatorField":
        return cls(
            source,
            target,
            tuple(
                rng.standard_normal((dt, ds)) + 1j * rng.standard_normal((dt, ds))
                for dt, ds in zip(target.dims, source.dims)
            ),
        )

    # -- algebraic operations ------------------------------------------

    @property
    def is_endo(self) -> bool:
        return self.source.dims == self.target.dims

    def compose(self, other: "OperatorField") -> "OperatorField":
        """Pointwise composition self(x) @ other(x)."""
        if other.target.dims != self.source.dims or not self.source.same_base(
            other.target
        ):
            raise ValueError("composition shape mismatch")
        return OperatorField(
            other.source,
            self.target,
            tuple(a @ b for a, b in zip(self.mats, other.mats)),
        )

    def __matmul__(self, other: "OperatorField") -> "OperatorField":
        return self.compose(other)

    def adjoint(self) -> "OperatorField":
        """Pointwise conjugate transpose (swaps source and target)."""
        return OperatorField(
            self.target, self.source, tuple(m.conj().T for m in self.mats)
        )

    def apply(self, v: VectorField) -> VectorField:
        if v.space.dims != self.source.dims or not v.space.same_base(self.source):
            raise ValueError("vector field does not live on the source space")
        return VectorField(self.target, tuple(m @ w for m, w in zip(self.mats, v.vecs)))

    def __add__(self, other: "OperatorField") -> "OperatorField":
        self._check_same_shape(other)
        return OperatorField(
            self.source, self.target, tuple(a + b for a, b in zip(self.mats, other.mats))
        )

    def __sub__(self, other: "OperatorField") -> "OperatorField":
        self._check_same_shape(other)
        return OperatorField(
            self.source, self.target, tuple(a - b for a, b in zip(self.mats, other.mats))
        )

    def __neg__(self) -> "OperatorField":
        return OperatorField(self.source, self.target, tuple(-m for m in self.mats))

    def __mul__(self, scalar: complex) -> "OperatorField":
        return OperatorField(
            self.source, self.target, tuple(scalar * m for m in self.mats)
        )

    __rmul__ = __mul__

    def _check_same_shape(self, other: "OperatorField") -> None:
        if (
            other.source.dims != self.source.dims
            or other.target.dims != self.target.dims
            or not self.source.same_base(other.source)
        ):
            raise ValueError("operator fields have mismatched shapes")

    # -- metrics --------------------------------------------------------

    def norm(self) -> float:
        """Operator norm: supremum over points of the largest singular value."""
        return max((opnorm(m) for m in self.mats), default=0.0)

    def hs_inner(self, other: "OperatorField") -> complex:
        """Hilbert-Schmidt inner product summed over all points."""
        self._check_same_shape(other)
        return complex(
            sum(np.vdot(a, b) for a, b in zip(self.mats, other.mats))
        )

    def hs_norm(self) -> float:
        return float(np.sqrt(max(self.hs_inner(self).real, 0.0)))

    def allclose(self, other: "OperatorField", tol: float = 1e-9) -> bool:
        return (self - other).norm() <= tol

    # -- flattening ------------------------------------------------------

    def to_vec(self) -> np.ndarray:
        """Row-major concatenation of all fiber matrices into one vector."""
        if not self.mats:
            return np.zeros(0, dtype=complex)
        return np.concatenate([m.reshape(-1) for m in self.mats])

    @classmethod
    def from_vec(
        cls, source: FiberedSpace, target: FiberedSpace, vec: np.ndarray
    ) -> "OperatorField":
        mats = []
        pos = 0
        for dt, ds in zip(target.dims, source.dims):
            n = dt * ds
            mats.append(np.asarray(vec[pos : pos + n], dtype=complex).reshape(dt, ds))
            pos += n
        if pos != len(vec):
            raise ValueError("flattened vector has the wrong length")
        return cls(source, target, tuple(mats))


def rank_one(v2: VectorField, v1: VectorField) -> OperatorField:
    """Elementary operator field ``x -> v2(x) v1(x)*``.

    Applying the result to a vector field ``v`` gives ``v2 <v1, v>``
    pointwise; finite sums of these span all operator fields at desk scale.

    Parameters
    ----------
    v2 : VectorField
        Target-side vector (the output direction).
    v1 : VectorField
        Source-side vector (the direction tested against).
    """
    if not v1.space.same_base(v2.space):
        raise ValueError("rank-one factors must live over the same base grid")
    return OperatorField(
        v1.space,
        v2.space,
        tuple(np.outer(b, a.conj()) for a, b in zip(v1.vecs, v2.vecs)),
    )


# --------------------------------------------------------------------------
# Finite groups
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by labeled elements and a multiplication table.

    ``table[i, j]`` is the index of ``elements[i] * elements[j]``.  The
    identity and inverses are derived and validated at construction, and a
    full associativity check runs for small orders.
    """

    elements: tuple
    table: np.ndarray

    def __post_init__(self) -> None:
        table = _frozen_array(self.table, dtype=np.intp)
        object.__setattr__(self, "table", table)
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise ValueError("group element labels must be distinct")
        if table.shape != (n, n):
            raise ValueError("multiplication table shape mismatch")
        if n == 0:
            raise ValueError("a group needs at least the identity")
        if table.min() < 0 or table.max() >= n:
            raise ValueError("multiplication table entries out of range")
        # Latin-square property (cancellation laws).
        for i in range(n):
            if len(set(table[i].tolist())) != n or len(set(table[:, i].tolist())) != n:
                raise ValueError("multiplication table violates cancellation")
        # identity
        ident = None
        for e in range(n):
            if all(table[e, j] == j for j in range(n)) and all(
                table[j, e] == j for j in range(n)
            ):
                ident = e
                break
        if ident is None:
            raise ValueError("multiplication table has no identity element")
        object.__setattr__(self, "_identity", ident)
        inv = np.full(n, -1, dtype=np.intp)
        for i in range(n):
            js = np.where(table[i] == ident)[0]
            if len(js) != 1 or table[js[0], i] != ident:
                raise ValueError("multiplication table has a non-invertible element")
            inv[i] = js[0]
        object.__setattr__(self, "_inverse", _frozen_array(inv, dtype=np.intp))
        if n <= 64:  # exhaustive associativity check is cheap at desk scale
            t = np.asarray(table)
            if not np.array_equal(t[t, :], t[:, t]):  # (ab)c vs a(bc)
                raise ValueError("multiplication table is not associative")

    # -- basic structure -------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return self._identity  # type: ignore[attr-defined]

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return int(self._inverse[i])  # type: ignore[attr-defined]

    def element_index(self, element) -> int:
        try:
            return self.elements.index(element)
        except ValueError:
            raise ValueError(f"{element!r} is not an element of this group") from None

    def subgroup(self, indices: Sequence[int]) -> "FiniteGroup":
        """The subgroup on the given element indices (labels are preserved).

        Raises ValueError if the subset is not closed under the product.
        """
        idx = list(dict.fromkeys(int(i) for i in indices))
        if self.identity not in idx:
            idx = [self.identity] + idx
        pos = {g: k for k, g in enumerate(idx)}
        table = np.zeros((len(idx), len(idx)), dtype=np.intp)
        for a, ga in enumerate(idx):
            for b, gb in enumerate(idx):
                prod = self.mul(ga, gb)
                if prod not in pos:
                    raise ValueError("element subset is not closed under the product")
                table[a, b] = pos[prod]
        return FiniteGroup(tuple(self.elements[g] for g in idx), table)

    # -- constructors -----------------------------------------------------

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls(("e",), np.zeros((1, 1), dtype=np.intp))

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise ValueError("cyclic group order must be positive")
        table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        return cls(tuple(f"r{k}" if k else "e" for k in range(n)), table)

    @classmethod
    def from_permutations(cls, perms: Iterable[tuple[int, ...]]) -> "FiniteGroup":
        """Group of permutation tuples under composition ``(p * q)(i) = p[q[i]]``.

        The element labels are the permutation tuples themselves, so
        subgroup embeddings can be matched by label.
        """
        elems = list(dict.fromkeys(tuple(p) for p in perms))
        if not elems:
            raise ValueError("need at least one permutation")
        k = len(elems[0])
        ident = tuple(range(k))
        if ident not in elems:
            elems.insert(0, ident)
        pos = {p: i for i, p in enumerate(elems)}
        n = len(elems)
        table = np.zeros((n, n), dtype=np.intp)
        for i, p in enumerate(elems):
            for j, q in enumerate(elems):
                comp = tuple(p[q[t]] for t in range(k))
                if comp not in pos:
                    raise ValueError("permutation set is not closed under composition")
                table[i, j] = pos[comp]
        return cls(tuple(elems), table)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        return cls.from_permutations(itertools.permutations(range(n)))

    @classmethod
    def direct_product(cls, a: "FiniteGroup", b: "FiniteGroup") -> "FiniteGroup":
        elems = tuple((x, y) for x in a.elements for y in b.elements)
        na, nb = a.order, b.order
        table = np.zeros((na * nb, na * nb), dtype=np.intp)
        for i in range(na * nb):
            ia, ib = divmod(i, nb)
            for j in range(na * nb):
                ja, jb = divmod(j, nb)
                table[i, j] = a.mul(ia, ja) * nb + b.mul(ib, jb)
        return cls(elems, table)


# --------------------------------------------------------------------------
# Projective actions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectiveAction:
    """A finite group acting on a fibered space by twisted unitaries.

    Parameters
    ----------
    group : FiniteGroup
    space : FiberedSpace
    point_perm : (|W|, |X|) integer array
        ``point_perm[w, x]`` is the index of ``w . x``.  Must be a genuine
        group action (checked exactly at construction).
    unitaries : nested sequence
        ``unitaries[w][x]`` maps the fiber at ``x`` to the fiber at ``w . x``
        and is unitary up to tolerance; the composition law holds up to a
        modulus-one scalar per point (checked by :meth:`validate`).
    """

    group: FiniteGroup
    space: FiberedSpace
    point_perm: np.ndarray
    unitaries: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self) -> None:
        perm = _frozen_array(self.point_perm, dtype=np.intp)
        object.__setattr__(self, "point_perm", perm)
        nw, nx = self.group.order, self.space.npoints
        if perm.shape != (nw, nx):
            raise ValueError("point permutation table shape mismatch")
        e = self.group.identity
        if not np.array_equal(perm[e], np.arange(nx)):
            raise ValueError("identity element must fix every grid point")
        for w in range(nw):
            if len(set(perm[w].tolist())) != nx:
                raise ValueError("point action of some element is not a bijection")
            for z in range(nw):
                if not np.array_equal(perm[z][perm[w]], perm[self.group.mul(z, w)]):
                    raise ValueError("point permutations violate the action law")
        mats = []
        for w in range(nw):
            row = []
            if len(self.unitaries[w]) != nx:
                raise ValueError("need one unitary per (group element, point)")
            for x in range(nx):
                m = _frozen_array(self.unitaries[w][x], dtype=complex)
                want = (self.space.dim(int(perm[w, x])), self.space.dim(x))
                if m.shape != want:
                    raise ValueError(
                        f"unitary for element {w} at point {x} has shape "
                        f"{m.shape}, expected {want}"
                    )
                row.append(m)
            mats.append(tuple(row))
        object.__setattr__(self, "unitaries", tuple(mats))
        iperm = np.zeros_like(perm)
        for w in range(nw):
            iperm[w][perm[w]] = np.arange(nx)
        iperm.setflags(write=False)
        object.__setattr__(self, "_iperm", iperm)

    # -- constructors ------------------------------------------------------

    @classmethod
    def trivial(cls, space: FiberedSpace) -> "ProjectiveAction":
        g = FiniteGroup.trivial()
        perm = np.arange(space.npoints, dtype=np.intp)[None, :]
        units = (tuple(np.eye(d, dtype=complex) for d in space.dims),)
        return cls(g, space, perm, units)

    # -- structure -----------------------------------------------------------

    def act_point(self, w: int, x: int) -> int:
        return int(self.point_perm[w, x])

    def inv_point(self, w: int, x: int) -> int:
        """The point ``w^{-1} . x``."""
        return int(self._iperm[w, x])  # type: ignore[attr-defined]

    def orbit(self, x: int) -> tuple[int, ...]:
        return tuple(sorted(set(int(p) for p in self.point_perm[:, x])))

    def orbit_representatives(self) -> tuple[int, ...]:
        """First-in-grid-order representative of each point orbit."""
        seen: set[int] = set()
        reps = []
        for x in range(self.space.npoints):
            if x not in seen:
                reps.append(x)
                seen.update(self.orbit(x))
        return tuple(reps)

    def isotropy(self, x: int) -> tuple[int, ...]:
        """Indices of the group elements fixing the point ``x``."""
        return tuple(int(w) for w in np.where(self.point_perm[:, x] == x)[0])

    def validate(self, tol: float = 1e-8) -> float:
        """Check unitarity and the scalar-twisted composition law.

        Returns the largest residual seen; raises ValueError if any check
        exceeds ``tol``.  The composition law is
        ``U_z(w.x) U_w(x) = c U_{zw}(x)`` for a per-point scalar ``c`` with
        ``|c| = 1``; the scalars are validated but deliberately not stored.
        """
        worst = 0.0
        nw = self.group.order
        for w in range(nw):
            for x in range(self.space.npoints):
                u = self.unitaries[w][x]
                gram = u.conj().T @ u
                worst = max(worst, opnorm(gram - np.eye(u.shape[1])))
        for z in range(nw):
            for w in range(nw):
                zw = self.group.mul(z, w)
                for x in range(self.space.npoints):
                    wx = self.act_point(w, x)
                    lhs = self.unitaries[z][wx] @ self.unitaries[w][x]
                    rhs = self.unitaries[zw][x]
                    if rhs.size == 0:
                        continue
                    k = int(np.argmax(np.abs(rhs)))
                    denom = rhs.reshape(-1)[k]
                    if abs(denom) < 1e-12:
                        worst = max(worst, opnorm(lhs))
                        continue
                    c = lhs.reshape(-1)[k] / denom
                    worst = max(worst, abs(abs(c) - 1.0))
                    worst = max(worst, opnorm(lhs - c * rhs))
        if worst > tol:
            raise ValueError(
                f"projective action fails validation: residual {worst:.3e} > {tol:.3e}"
            )
        return worst

    # -- the action on fields -------------------------------------------------

    def act(self, w: int, v: VectorField) -> VectorField:
        """Move a vector field: ``(w . v)(x) = U_w(w^{-1}x) v(w^{-1}x)``."""
        out = []
        for x in range(self.space.npoints):
            y = self.inv_point(w, x)
            out.append(self.unitaries[w][y] @ v.vecs[y])
        return VectorField(self.space, tuple(out))

    def ad(self, w: int, t: OperatorField) -> OperatorField:
        """Conjugate an endomorphism field by the action of ``w``.

        ``ad(w, T)(x) = U_w(y) T(y) U_w(y)*`` with ``y = w^{-1} x``.  The
        cocycle scalars cancel, so this is an honest group representation on
        endomorphism fields.
        """
        if t.source.dims != self.space.dims or t.target.dims != self.space.dims:
            raise ValueError("ad acts on endomorphism fields of the acted space")
        out = []
        for x in range(self.space.npoints):
            y = self.inv_point(w, x)
            u = self.unitaries[w][y]
            out.append(u @ t.mats[y] @ u.conj().T)
        return OperatorField(t.source, t.target, tuple(out))

    def average(self, t: OperatorField) -> OperatorField:
        """Group average ``|W|^{-1} sum_w ad(w, T)``.

        Idempotent, linear, adjoint-preserving and norm-contractive; its
        image is exactly the fixed-point algebra.
        """
        total = None
        for w in range(self.group.order):
            term = self.ad(w, t)
            total = term if total is None else total + term
        assert total is not None
        return total * (1.0 / self.group.order)

    def invariance_residual(self, t: OperatorField) -> float:
        """Largest deviation ``max_w ||ad(w,T) - T||``."""
        return max(
            (self.ad(w, t) - t).norm() for w in range(self.group.order)
        )

    def restrict_group(self, indices: Sequence[int]) -> "ProjectiveAction":
        """The action of the subgroup on the given element indices."""
        sub = self.group.subgroup(indices)
        rows = [self.group.element_index(el) for el in sub.elements]
        perm = self.point_perm[rows]
        units = tuple(self.unitaries[r] for r in rows)
        return ProjectiveAction(sub, self.space, perm, units)


# --------------------------------------------------------------------------
# Paired (rectangular) actions
# --------------------------------------------------------------------------


def _check_pair(tgt: ProjectiveAction, src: ProjectiveAction) -> None:
    if tgt.group.order != src.group.order or not np.array_equal(
        np.asarray(tgt.group.table), np.asarray(src.group.table)
    ):
        raise ValueError("paired actions must share one group")
    if not np.array_equal(np.asarray(tgt.point_perm), np.asarray(src.point_perm)):
        raise ValueError("paired actions must move grid points identically")


def ad_pair(
    tgt: ProjectiveAction, src: ProjectiveAction, w: int, s: OperatorField
) -> OperatorField:
    """Move a rectangular field by two compatible actions.

    For ``S`` with source fibered by ``src.space`` and target by
    ``tgt.space`` (same base, same point motion), returns the field
    ``x -> U^tgt_w(y) S(y) U^src_w(y)*`` with ``y = w^{-1} x``.  Fixed
    points of all these maps are the equivariant fields.
    """
    _check_pair(tgt, src)
    if s.source.dims != src.space.dims or s.target.dims != tgt.space.dims:
        raise ValueError("field shape does not match the paired actions")
    out = []
    for x in range(tgt.space.npoints):
        y = tgt.inv_point(w, x)
        out.append(tgt.unitaries[w][y] @ s.mats[y] @ src.unitaries[w][y].conj().T)
    return OperatorField(s.source, s.target, tuple(out))


def average_pair(
    tgt: ProjectiveAction, src: ProjectiveAction, s: OperatorField
) -> OperatorField:
    """Group average of :func:`ad_pair` over all elements."""
    total = None
    for w in range(tgt.group.order):
        term = ad_pair(tgt, src, w, s)
        total = term if total is None else total + term
    assert total is not None
    return total * (1.0 / tgt.group.order)


def pair_invariance_residual(
    tgt: ProjectiveAction, src: ProjectiveAction, s: OperatorField
) -> float:
    return max(
        (ad_pair(tgt, src, w, s) - s).norm() for w in range(tgt.group.order)
    )


# --------------------------------------------------------------------------
# Fixed points
# --------------------------------------------------------------------------


def _small_fixed_basis(mats: list[np.ndarray], shape: tuple[int, int]) -> list[np.ndarray]:
    """Orthonormal basis of joint fixed vectors of an averaging projector.

    ``mats`` are the matrices of a finite group of isometries of the
    flattened (row-major) matrix space of the given shape; the average is an
    orthogonal projection and its top eigenvectors span the fixed space.
    """
    n = shape[0] * shape[1]
    if n == 0:
        return []
    proj = hermitize(sum(mats) / len(mats))
    eigvals, eigvecs = np.linalg.eigh(proj)
    out = []
    for k in range(n):
        if eigvals[k] > 0.5:
            out.append(eigvecs[:, k].reshape(shape))
    return out


def fixed_point_algebra(action: ProjectiveAction) -> list[OperatorField]:
    """Linear basis of the endomorphism fields fixed by every ``ad(w, .)``.

    The basis is orthonormal for the summed Hilbert-Schmidt inner product
    and is built orbit by orbit: on each point orbit an invariant field is
    determined by its value at the representative, which must commute with
    the isotropy unitaries; that small fixed space is transported along the
    orbit.  The span is closed under products and adjoints.
    """
    from .linalg import conjugation_matrix

    space = action.space
    fields: list[OperatorField] = []
    for x0 in action.orbit_representatives():
        d = space.dim(x0)
        iso = action.isotropy(x0)
        mats = [conjugation_matrix(action.unitaries[w][x0]) for w in iso]
        basis_at_rep = _small_fixed_basis(mats, (d, d))
        orbit = action.orbit(x0)
        # first group element carrying the representative to each orbit point
        carriers: dict[int, int] = {}
        for w in range(action.group.order):
            y = action.act_point(w, x0)
            carriers.setdefault(y, w)
        scale = 1.0 / np.sqrt(len(orbit))
        for a in basis_at_rep:
            mats_out = [np.zeros((space.dim(x), space.dim(x)), dtype=complex) for x in range(space.npoints)]
            for y in orbit:
                u = action.unitaries[carriers[y]][x0]
                mats_out[y] = scale * (u @ a @ u.conj().T)
            fields.append(OperatorField(space, space, tuple(mats_out)))
    return fields


def fixed_point_pair_basis(
    tgt: ProjectiveAction, src: ProjectiveAction
) -> list[OperatorField]:
    """Orthonormal basis of the equivariant rectangular fields of a paired action."""
    from .linalg import sandwich_matrix

    _check_pair(tgt, src)
    fields: list[OperatorField] = []
    for x0 in tgt.orbit_representatives():
        dt, ds = tgt.space.dim(x0), src.space.dim(x0)
        iso = tgt.isotropy(x0)
        mats = [
            sandwich_matrix(tgt.unitaries[w][x0], src.unitaries[w][x0]) for w in iso
        ]
        basis_at_rep = _small_fixed_basis(mats, (dt, ds))
        orbit = tgt.orbit(x0)
        carriers: dict[int, int] = {}
        for w in range(tgt.group.order):
            carriers.setdefault(tgt.act_point(w, x0), w)
        scale = 1.0 / np.sqrt(len(orbit))
        for a in basis_at_rep:
            mats_out = [
                np.zeros((tgt.space.dim(x), src.space.dim(x)), dtype=complex)
                for x in range(tgt.space.npoints)
            ]
            for y in orbit:
                w = carriers[y]
                mats_out[y] = scale * (
                    tgt.unitaries[w][x0] @ a @ src.unitaries[w][x0].conj().T
                )
            fields.append(OperatorField(src.space, tgt.space, tuple(mats_out)))
    return fields


def invariant_dimension(action: ProjectiveAction) -> int:
    """Dimension of the fixed-point algebra by the character count.

    Averages the trace of each ``ad(w, .)`` over the group; only points
    fixed by ``w`` contribute, each ``|tr U_w(x)|^2``.  Serves as an
    independent cross-check of :func:`fixed_point_algebra`.
    """
    total = 0.0
    for w in range(action.group.order):
        for x in range(action.space.npoints):
            if action.act_point(w, x) == x:
                tr = np.trace(action.unitaries[w][x])
                total += float(np.abs(tr) ** 2)
    return as_int(total / action.group.order, what="invariant dimension")


def invariant_pair_dimension(tgt: ProjectiveAction, src: ProjectiveAction) -> int:
    """Dimension of the equivariant rectangular fields by the character count."""
    _check_pair(tgt, src)
    total = 0.0 + 0.0j
    for w in range(tgt.group.order):
        for x in range(tgt.space.npoints):
            if tgt.act_point(w, x) == x:
                total += np.trace(tgt.unitaries[w][x]) * np.conj(
                    np.trace(src.unitaries[w][x])
                )
    avg = total / tgt.group.order
    if abs(avg.imag) > 1e-6:
        raise ValueError(f"equivariant dimension came out non-real: {avg!r}")
    return as_int(avg.real, what="equivariant dimension")


# --------------------------------------------------------------------------
# Direct sums
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectSumElement:
    """A tuple of operator fields with coordinatewise operations.

    The norm is the supremum over summands and distinct summands are
    orthogonal for the summed Hilbert-Schmidt pairing.
    """

    parts: tuple[OperatorField, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))

    def _zip(self, other: "DirectSumElement"):
        if len(other.parts) != len(self.parts):
            raise ValueError("direct sums have different numbers of summands")
        return zip(self.parts, other.parts)

    def __add__(self, other: "DirectSumElement") -> "DirectSumElement":
        return DirectSumElement(tuple(a + b for a, b in self._zip(other)))

    def __sub__(self, other: "DirectSumElement") -> "DirectSumElement":
        return DirectSumElement(tuple(a - b for a, b in self._zip(other)))

    def __mul__(self, scalar: complex) -> "DirectSumElement":
        return DirectSumElement(tuple(scalar * p for p in self.parts))

    __rmul__ = __mul__

    def compose(self, other: "DirectSumElement") -> "DirectSumElement":
        return DirectSumElement(tuple(a @ b for a, b in self._zip(other)))

    __matmul__ = compose

    def adjoint(self) -> "DirectSumElement":
        return DirectSumElement(tuple(p.adjoint() for p in self.parts))

    def norm(self) -> float:
        return max((p.norm() for p in self.parts), default=0.0)

    def hs_inner(self, other: "DirectSumElement") -> complex:
        return complex(sum(a.hs_inner(b) for a, b in self._zip(other)))


def direct_sum(parts: Sequence[OperatorField]) -> DirectSumElement:
    """Bundle operator fields into a direct sum with coordinatewise operations."""
    return DirectSumElement(tuple(parts))
