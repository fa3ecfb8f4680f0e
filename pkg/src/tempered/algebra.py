"""The direct-sum model algebra and its representation theory.

The model algebra is a finite direct sum of components, one per
(parabolic associate class, sigma) pair: invariant endomorphism fields
over a character grid, with the stabilizer group acting projectively
(:class:`Component`, :class:`AlgebraModel`, :class:`AlgebraElement`).

At a fixed grid point the isotropy unitaries span the intertwiner algebra
(:class:`IntertwinerAlgebra`); its minimal-projection classes classify the
irreducible constituents of the fiber (:class:`IrrepDescriptor`,
:func:`irreducibles_at`), and the fiber's image under evaluation is
checked against the commutant of the intertwiners (:func:`fiber_image`) —
the model-level completeness statement.

:class:`RepresentationModel` packages a finite-dimensional representation
of the whole model algebra by the matrices of each component's invariant
basis; intertwiner counts between two such representations reduce to one
linear solve (:func:`hom_dim`), which is what the induction/restriction
layers use for adjunction bookkeeping.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .core import (
    BaseSpace,
    FiberedSpace,
    OperatorField,
    ProjectiveAction,
    fixed_point_algebra,
)
from .linalg import as_int, hermitize, nullspace, row_basis, rank_of_rows

__all__ = [
    "Component",
    "AlgebraModel",
    "AlgebraElement",
    "IntertwinerAlgebra",
    "intertwiner_algebra",
    "IrrepDescriptor",
    "irreducibles_at",
    "FiberImage",
    "fiber_image",
    "SurjectivityReport",
    "surjectivity_property_tests",
    "RepresentationModel",
    "hom_dim",
    "decompose",
]


# --------------------------------------------------------------------------
# Components and the model algebra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    """One summand of the model algebra.

    Parameters
    ----------
    cid : str
        Unique component id, conventionally ``"<class>:<sigma>"``.
    parabolic : str
        Label of the parabolic associate class the component sits over.
    sigma : str
        Opaque id of the discrete-parameter label.
    action : ProjectiveAction
        The stabilizer group acting on the character grid and fibers.
    weights : tuple of float
        Spectral weight of each grid point (used by the Plancherel layer);
        must be strictly positive.
    """

    cid: str
    parabolic: str
    sigma: str
    action: ProjectiveAction
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(t) for t in self.weights))
        if len(self.weights) != self.action.space.npoints:
            raise ValueError("need one weight per grid point")
        if any(t <= 0 for t in self.weights):
            raise ValueError("weights must be strictly positive")
        if any(d < 1 for d in self.action.space.dims):
            raise ValueError("component fibers must have dimension at least 1")
        self.action.validate(1e-8)

    @property
    def space(self) -> FiberedSpace:
        return self.action.space

    @property
    def grid(self) -> BaseSpace:
        return self.action.space.base

    @classmethod
    def build(
        cls,
        cid: str,
        parabolic: str,
        sigma: str,
        action: ProjectiveAction,
        weights: Sequence[float] | None = None,
    ) -> "Component":
        if weights is None:
            weights = (1.0,) * action.space.npoints
        return cls(cid, parabolic, sigma, action, tuple(weights))


@dataclass(frozen=True)
class AlgebraModel:
    """A finite direct sum of components with distinct ids."""

    components: tuple[Component, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        ids = [c.cid for c in comps]
        if len(set(ids)) != len(ids):
            raise ValueError("component ids must be pairwise distinct")

    @cached_property
    def _by_id(self) -> dict[str, Component]:
        return {c.cid: c for c in self.components}

    def component(self, cid: str) -> Component:
        try:
            return self._by_id[cid]
        except KeyError:
            raise ValueError(f"unknown component {cid!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.cid for c in self.components)

    @cached_property
    def _bases(self) -> dict[str, tuple[OperatorField, ...]]:
        return {
            c.cid: tuple(fixed_point_algebra(c.action)) for c in self.components
        }

    def invariant_basis(self, cid: str) -> tuple[OperatorField, ...]:
        """Orthonormal basis of the invariant fields of one component (cached)."""
        self.component(cid)
        return self._bases[cid]

    @property
    def dim(self) -> int:
        """Linear dimension of the whole model algebra."""
        return sum(len(self.invariant_basis(cid)) for cid in self.ids)


# --------------------------------------------------------------------------
# Elements
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraElement:
    """A direct-sum element, stored sparsely as per-component invariant fields.

    Components not listed act as zero.  Operations are coordinatewise and
    the norm is the maximum over components, so the C*-identity holds
    because it holds fiberwise.
    """

    model: AlgebraModel
    fields: Mapping[str, OperatorField]

    def __post_init__(self) -> None:
        clean: dict[str, OperatorField] = {}
        for cid, f in dict(self.fields).items():
            comp = self.model.component(cid)
            if f.source.dims != comp.space.dims or not f.source.same_base(comp.space):
                raise ValueError(f"field for component {cid!r} has the wrong shape")
            if not f.is_endo:
                raise ValueError("algebra elements are endomorphism fields")
            res = comp.action.invariance_residual(f)
            if res > 1e-6 * max(1.0, f.norm()):
                raise ValueError(
                    f"field for component {cid!r} is not action-invariant "
                    f"(residual {res:.3e})"
                )
            clean[cid] = f
        object.__setattr__(self, "fields", dict(sorted(clean.items())))

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, model: AlgebraModel) -> "AlgebraElement":
        return cls(model, {})

    @classmethod
    def identity(cls, model: AlgebraModel) -> "AlgebraElement":
        return cls(
            model,
            {c.cid: OperatorField.identity(c.space) for c in model.components},
        )

    @classmethod
    def random_invariant(
        cls, model: AlgebraModel, rng: np.random.Generator,
        support: Sequence[str] | None = None,
    ) -> "AlgebraElement":
        """Average of a random field per component: a generic element."""
        ids = model.ids if support is None else tuple(support)
        out = {}
        for cid in ids:
            comp = model.component(cid)
            raw = OperatorField.random(comp.space, comp.space, rng)
            out[cid] = comp.action.average(raw)
        return cls(model, out)

    # -- coordinatewise operations ---------------------------------------

    def _check(self, other: "AlgebraElement") -> None:
        # models are shared by reference; comparing contents would descend
        # into arrays, so identity is the contract
        if other.model is not self.model:
            raise ValueError("elements belong to different models")

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.fields)

    def component_field(self, cid: str) -> OperatorField:
        """The field of one component, materializing zero when absent."""
        if cid in self.fields:
            return self.fields[cid]
        sp = self.model.component(cid).space
        return OperatorField.zeros(sp, sp)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.fields)
        for cid, f in other.fields.items():
            out[cid] = out[cid] + f if cid in out else f
        return AlgebraElement(self.model, out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "AlgebraElement":
        return AlgebraElement(
            self.model, {cid: scalar * f for cid, f in self.fields.items()}
        )

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        common = set(self.fields) & set(other.fields)
        return AlgebraElement(
            self.model,
            {cid: self.fields[cid] @ other.fields[cid] for cid in common},
        )

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(
            self.model, {cid: f.adjoint() for cid, f in self.fields.items()}
        )

    def norm(self) -> float:
        return max((f.norm() for f in self.fields.values()), default=0.0)


# --------------------------------------------------------------------------
# Intertwiner algebras at a grid point
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntertwinerAlgebra:
    """The span of the isotropy unitaries at one grid point.

    Because products and adjoints of the generating unitaries stay scalar
    multiples of generators, the linear span is already a *-algebra
    containing the identity; this is validated at construction.
    """

    component: Component
    point: int
    generators: tuple[np.ndarray, ...]
    basis: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        d = self.component.space.dim(self.point)
        onb = row_basis(np.array([b.reshape(-1) for b in self.basis]))
        if onb.shape[0] != len(self.basis):
            raise ValueError("intertwiner basis is linearly dependent")
        span = onb  # orthonormal rows spanning the algebra
        def dist(m: np.ndarray) -> float:
            v = m.reshape(-1)
            return float(np.linalg.norm(v - span.T @ (span.conj() @ v)))
        for g in self.generators:
            for h in self.generators:
                if dist(g @ h) > 1e-8 * max(1.0, float(np.linalg.norm(g @ h))):
                    raise ValueError("intertwiner span is not closed under products")
            if dist(g.conj().T) > 1e-8:
                raise ValueError("intertwiner span is not closed under adjoints")
        if dist(np.eye(d, dtype=complex)) > 1e-8:
            raise ValueError("intertwiner span does not contain the identity")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, m: np.ndarray, tol: float = 1e-8) -> bool:
        span = np.array([b.reshape(-1) for b in self.basis])
        onb = row_basis(span)
        v = m.reshape(-1)
        return float(np.linalg.norm(v - onb.T @ (onb.conj() @ v))) <= tol * max(
            1.0, float(np.linalg.norm(v))
        )


def intertwiner_algebra(component: Component, phi) -> IntertwinerAlgebra:
    """Build the intertwiner algebra at a grid point (label or index)."""
    x = phi if isinstance(phi, int) else component.grid.index(phi)
    if not 0 <= x < component.grid.npoints:
        raise ValueError(f"grid index {x} out of range")
    action = component.action
    gens = [action.unitaries[w][x] for w in action.isotropy(x)]
    onb = row_basis(np.array([g.reshape(-1) for g in gens]))
    d = component.space.dim(x)
    basis = tuple(onb[k].reshape(d, d) for k in range(onb.shape[0]))
    return IntertwinerAlgebra(component, x, tuple(gens), basis)


# --------------------------------------------------------------------------
# Minimal projections and irreducible descriptors
# --------------------------------------------------------------------------


def _algebra_center(basis: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Basis of the center of a matrix algebra given by a linear basis."""
    k = len(basis)
    d = basis[0].shape[0]
    # coefficient vectors t with sum_j t_j [c_j, b] = 0 for every basis b
    sys_rows = []
    for b in basis:
        block = np.zeros((d * d, k), dtype=complex)
        for j, c in enumerate(basis):
            block[:, j] = (c @ b - b @ c).reshape(-1)
        sys_rows.append(block)
    coeffs = nullspace(np.concatenate(sys_rows, axis=0))
    return [
        sum(tj * bj for tj, bj in zip(t, basis))
        for t in coeffs.T
    ]


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group sorted real values into runs separated by more than ``tol``."""
    order = np.argsort(values)
    groups: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        if values[idx] - values[groups[-1][-1]] <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return [np.array(g) for g in groups]


@dataclass(frozen=True)
class IrrepDescriptor:
    """One irreducible constituent of a component fiber.

    ``dim`` is the rank of a minimal projection of the intertwiner algebra
    (the dimension of the constituent); ``multiplicity`` is how many times
    it occurs in the fiber; ``orbit`` records the grid labels of the full
    stabilizer orbit the descriptor is attached to, and ``projection`` is a
    representative minimal projection.
    """

    component_id: str
    orbit: tuple[str, ...]
    index: int
    dim: int
    multiplicity: int
    projection: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        p = np.asarray(self.projection, dtype=complex)
        if (
            np.linalg.norm(p @ p - p) > 1e-8
            or np.linalg.norm(p - p.conj().T) > 1e-8
        ):
            raise ValueError("descriptor projection is not a projection")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "projection", p)


def irreducibles_at(component: Component, phi, cluster_tol: float = 1e-8) -> list[IrrepDescriptor]:
    """Classify the irreducible constituents of the fiber over a grid point.

    The intertwiner algebra is decomposed into central blocks by
    clustering the spectrum of a seeded random Hermitian central element;
    each block contributes one descriptor whose dimension is the rank of a
    minimal projection and whose multiplicity is the matrix size of the
    block.  Points on the same stabilizer orbit yield identical descriptor
    lists: the computation is pinned to the orbit representative.
    """
    x_in = phi if isinstance(phi, int) else component.grid.index(phi)
    orbit = component.action.orbit(x_in)
    x = orbit[0]
    labels = tuple(component.grid.labels[y] for y in orbit)
    alg = intertwiner_algebra(component, x)
    d = component.space.dim(x)

    center = _algebra_center(alg.basis)
    herm = []
    for z in center:
        herm.append(hermitize(z))
        herm.append(hermitize(1j * z))
    onb = row_basis(np.array([h.reshape(-1) for h in herm]))
    rng = np.random.default_rng(
        zlib.crc32(f"irreducibles:{component.cid}:{x}".encode())
    )
    h = np.zeros((d, d), dtype=complex)
    for k in range(onb.shape[0]):
        h = h + rng.standard_normal() * onb[k].reshape(d, d)
    h = hermitize(h)

    vals, vecs = np.linalg.eigh(h)
    descriptors = []
    blocks = _cluster(vals, cluster_tol)
    for idxs in blocks:
        frame = vecs[:, idxs]  # orthonormal columns spanning the central block range
        p_central = frame @ frame.conj().T
        compressed = [frame.conj().T @ b @ frame for b in alg.basis]
        block_dim = rank_of_rows(np.array([c.reshape(-1) for c in compressed]))
        m = as_int(np.sqrt(block_dim), what="central block matrix size")
        rank = len(idxs)
        if rank % m != 0:
            raise ValueError("central block rank is not divisible by its matrix size")
        r = rank // m
        # a representative minimal projection: generic Hermitian element of
        # the block algebra, smallest eigenvalue cluster of its compression
        a = np.zeros((d, d), dtype=complex)
        for b in alg.basis:
            a = a + rng.standard_normal() * (p_central @ hermitize(b) @ p_central)
            a = a + rng.standard_normal() * (p_central @ hermitize(1j * b) @ p_central)
        a = hermitize(a)
        avals, avecs = np.linalg.eigh(frame.conj().T @ a @ frame)
        sub = _cluster(avals, cluster_tol)[0]
        if len(sub) != r:
            # degenerate draw; fall back to the central projection scaled
            # by minimality data only when the block is already minimal
            if m == 1:
                minimal = p_central
            else:
                raise ValueError("failed to isolate a minimal projection")
        else:
            subframe = frame @ avecs[:, sub]
            minimal = subframe @ subframe.conj().T
        descriptors.append(
            IrrepDescriptor(
                component_id=component.cid,
                orbit=labels,
                index=0,
                dim=r,
                multiplicity=m,
                projection=minimal,
            )
        )
    if sum(dd.dim * dd.multiplicity for dd in descriptors) != d:
        raise ValueError("constituent dimensions do not add up to the fiber")
    keyed = sorted(
        descriptors,
        key=lambda dd: (
            dd.dim,
            dd.multiplicity,
            tuple(np.round(dd.projection.real.reshape(-1), 6)),
            tuple(np.round(dd.projection.imag.reshape(-1), 6)),
        ),
    )
    return [
        IrrepDescriptor(
            component_id=dd.component_id,
            orbit=dd.orbit,
            index=i,
            dim=dd.dim,
            multiplicity=dd.multiplicity,
            projection=dd.projection,
        )
        for i, dd in enumerate(keyed)
    ]


# --------------------------------------------------------------------------
# Fiber image vs. commutant (completeness)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberImage:
    """Evaluation of the invariant fields at a point, checked against a commutant."""

    component_id: str
    point_label: str
    image_dim: int
    commutant_dim: int
    span_distance: float
    passed: bool


def fiber_image(
    component: Component, phi, model: AlgebraModel | None = None, tol: float = 1e-9
) -> tuple[list[np.ndarray], FiberImage]:
    """Evaluate the invariant fields at a grid point and verify completeness.

    Returns an orthonormal basis of the evaluated subalgebra together with
    the comparison report against the commutant of the intertwiner algebra
    at the same point, computed independently by a linear solve.
    """
    x = phi if isinstance(phi, int) else component.grid.index(phi)
    if model is not None:
        basis_fields = model.invariant_basis(component.cid)
    else:
        basis_fields = tuple(fixed_point_algebra(component.action))
    d = component.space.dim(x)
    evaluated = np.array([b.mats[x].reshape(-1) for b in basis_fields])
    image = row_basis(evaluated)

    alg = intertwiner_algebra(component, x)
    rows = []
    eye = np.eye(d, dtype=complex)
    for u in alg.generators:
        rows.append(np.kron(eye, u.T) - np.kron(u, eye))
    commutant = nullspace(np.concatenate(rows, axis=0)).T  # rows spanning commutant

    def directed(a: np.ndarray, b: np.ndarray) -> float:
        if a.shape[0] == 0:
            return 0.0
        proj = a - (a @ b.conj().T) @ b
        return float(np.max(np.linalg.norm(proj, axis=1)))

    dist = max(directed(image, commutant), directed(commutant, image))
    report = FiberImage(
        component_id=component.cid,
        point_label=component.grid.labels[x],
        image_dim=image.shape[0],
        commutant_dim=commutant.shape[0],
        span_distance=float(dist),
        passed=bool(dist <= tol and image.shape[0] == commutant.shape[0]),
    )
    return [image[k].reshape(d, d) for k in range(image.shape[0])], report


# --------------------------------------------------------------------------
# Disjoint-support surjectivity property tests
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SurjectivityReport:
    """Outcome of the disjoint-support surjectivity property tests."""

    cases: int
    truncation_summands: int
    negative_rank: int
    negative_expected: int
    passed: bool


def surjectivity_property_tests(rng: np.random.Generator | None = None) -> SurjectivityReport:
    """Check that sums of quotients with disjoint supports stay surjective.

    Random finite direct sums of matrix algebras are quotiented onto
    disjoint groups of coordinates; the direct sum of those quotients must
    be surjective (full rank), including a many-summand truncation.  As a
    negative control, repeating the same quotient twice must fail
    surjectivity, with the image collapsing onto the diagonal.
    """
    if rng is None:
        rng = np.random.default_rng(0)

    def alg_basis_dims(sizes: Sequence[int]) -> int:
        return sum(s * s for s in sizes)

    def quotient_rank(sizes: Sequence[int], supports: Sequence[Sequence[int]]) -> tuple[int, int]:
        total = alg_basis_dims(sizes)
        target = sum(alg_basis_dims([sizes[i] for i in sup]) for sup in supports)
        rows = []
        offsets = np.cumsum([0] + [s * s for s in sizes])
        for k in range(total):
            vec_parts = []
            for sup in supports:
                for i in sup:
                    lo, hi = offsets[i], offsets[i + 1]
                    piece = np.zeros(hi - lo, dtype=complex)
                    if lo <= k < hi:
                        piece[k - lo] = 1.0
                    vec_parts.append(piece)
            rows.append(np.concatenate(vec_parts))
        return rank_of_rows(np.array(rows)), target

    cases = 0
    ok = True
    for _ in range(6):
        count = int(rng.integers(2, 5))
        sizes = [int(rng.integers(1, 4)) for _ in range(count)]
        coords = list(range(count))
        rng.shuffle(coords)
        cut = int(rng.integers(1, count))
        supports = [coords[:cut], coords[cut:]]
        rank, target = quotient_rank(sizes, supports)
        ok = ok and rank == target
        cases += 1

    # many-summand truncation: one quotient per coordinate
    sizes = [int(rng.integers(1, 4)) for _ in range(8)]
    supports = [[i] for i in range(len(sizes))]
    rank, target = quotient_rank(sizes, supports)
    ok = ok and rank == target

    # negative control: the same support twice
    sizes = [2, 3]
    rank_neg, target_neg = quotient_rank(sizes, [[0], [0]])
    negative_ok = rank_neg < target_neg and rank_neg == 4
    return SurjectivityReport(
        cases=cases,
        truncation_summands=len(supports),
        negative_rank=int(rank_neg),
        negative_expected=int(target_neg),
        passed=bool(ok and negative_ok),
    )


# --------------------------------------------------------------------------
# Finite-dimensional representations of the model
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RepresentationModel:
    """A finite-dimensional representation of the model algebra.

    ``mats[cid][k]`` is the operator representing the ``k``-th element of
    ``model.invariant_basis(cid)``; components absent from ``mats`` act by
    zero.  All representations used here come from evaluations and
    compressions, so they are automatically *-representations.
    """

    model: AlgebraModel
    dim: int
    mats: Mapping[str, tuple[np.ndarray, ...]]

    def __post_init__(self) -> None:
        clean = {}
        for cid, ms in dict(self.mats).items():
            basis = self.model.invariant_basis(cid)
            if len(ms) != len(basis):
                raise ValueError(
                    f"component {cid!r} needs one matrix per invariant basis element"
                )
            out = []
            for m in ms:
                arr = np.array(m, dtype=complex)
                if arr.shape != (self.dim, self.dim):
                    raise ValueError("representation matrices must be dim x dim")
                arr.setflags(write=False)
                out.append(arr)
            clean[cid] = tuple(out)
        object.__setattr__(self, "mats", dict(sorted(clean.items())))

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.mats)

    def apply(self, a: AlgebraElement) -> np.ndarray:
        """The matrix representing an algebra element."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for cid, f in a.fields.items():
            if cid not in self.mats:
                continue
            basis = self.model.invariant_basis(cid)
            for b, m in zip(basis, self.mats[cid]):
                out = out + b.hs_inner(f) * m
        return out

    @classmethod
    def zero(cls, model: AlgebraModel) -> "RepresentationModel":
        return cls(model, 0, {})

    @classmethod
    def evaluation(cls, model: AlgebraModel, cid: str, phi) -> "RepresentationModel":
        """Evaluation of one component at a grid point, other components acting as zero."""
        comp = model.component(cid)
        x = phi if isinstance(phi, int) else comp.grid.index(phi)
        basis = model.invariant_basis(cid)
        return cls(model, comp.space.dim(x), {cid: tuple(b.mats[x] for b in basis)})

    @classmethod
    def from_descriptor(
        cls, model: AlgebraModel, desc: IrrepDescriptor
    ) -> "RepresentationModel":
        """The irreducible representation attached to a minimal-projection class."""
        comp = model.component(desc.component_id)
        x = comp.grid.index(desc.orbit[0])
        p = desc.projection
        vals, vecs = np.linalg.eigh(hermitize(p))
        frame = vecs[:, vals > 0.5]
        basis = model.invariant_basis(desc.component_id)
        mats = tuple(frame.conj().T @ b.mats[x] @ frame for b in basis)
        return cls(model, frame.shape[1], {desc.component_id: mats})

    def direct_sum(self, other: "RepresentationModel") -> "RepresentationModel":
        if other.model is not self.model:
            raise ValueError("representations belong to different models")
        dim = self.dim + other.dim
        out = {}
        for cid in set(self.mats) | set(other.mats):
            basis = self.model.invariant_basis(cid)
            ms = []
            for k in range(len(basis)):
                m = np.zeros((dim, dim), dtype=complex)
                if cid in self.mats:
                    m[: self.dim, : self.dim] = self.mats[cid][k]
                if cid in other.mats:
                    m[self.dim :, self.dim :] = other.mats[cid][k]
                ms.append(m)
            out[cid] = tuple(ms)
        return RepresentationModel(self.model, dim, out)


def hom_dim(first: RepresentationModel, second: RepresentationModel) -> int:
    """Dimension of the space of intertwiners from ``first`` to ``second``.

    Solves ``T a = a T`` across one matrix per invariant basis element of
    every component supported by either representation; components
    supported by neither impose no condition.
    """
    if first.model is not second.model:
        raise ValueError("representations belong to different models")
    d1, d2 = first.dim, second.dim
    if d1 == 0 or d2 == 0:
        return 0
    rows = []
    eye1 = np.eye(d1, dtype=complex)
    eye2 = np.eye(d2, dtype=complex)
    for cid in sorted(set(first.mats) | set(second.mats)):
        basis = first.model.invariant_basis(cid)
        for k in range(len(basis)):
            a1 = first.mats[cid][k] if cid in first.mats else np.zeros((d1, d1), dtype=complex)
            a2 = second.mats[cid][k] if cid in second.mats else np.zeros((d2, d2), dtype=complex)
            rows.append(np.kron(eye2, a1.T) - np.kron(a2, eye1))
    if not rows:
        return d1 * d2
    return nullspace(np.concatenate(rows, axis=0)).shape[1]


def decompose(
    rep: RepresentationModel,
    candidates: Sequence[tuple[str, RepresentationModel]],
) -> list[tuple[str, int]]:
    """Multiplicities of candidate irreducibles inside a representation.

    The multiplicity of an irreducible is the intertwiner count from it
    into the representation; the candidate list must be complete enough
    that the multiplicities account for the full dimension, otherwise a
    ``ValueError`` is raised.
    """
    out = []
    covered = 0
    for name, cand in candidates:
        m = hom_dim(cand, rep)
        if m:
            out.append((name, m))
            covered += m * cand.dim
    if covered != rep.dim:
        raise ValueError(
            f"constituents cover dimension {covered} of {rep.dim}: "
            "candidate list is incomplete or representation is not semisimple"
        )
    return out
