"""Gram-presented Hilbert modules and interior tensor products.

A module over an algebra of operator fields is presented here by a finite
set of generators and the matrix of their algebra-valued inner products
(:class:`GramModule`).  Tensoring against the fibered space the algebra
acts on turns each generator-vector symbol into a concrete vector; the
scalar Gram matrix of those symbols has a numerical kernel, and the
quotient by that kernel (:func:`interior_tensor`) is again a fibered space,
together with the symbol map and everything it induces: generator maps,
quotient actions, and the corner picture of the compact operators.

Two verifiers drive the randomized suites:

* :func:`verify_module_structure` checks that sending a generator ``e`` to
  the map ``v -> e (x) v`` is an isometry onto the equivariant compact
  operators from the original space into the tensor space, with the
  dimension count made independently three ways.
* :func:`verify_compacts_iso` checks that cutting the ambient matrix
  algebra by the Gram's support projection reproduces, isometrically and
  equivariantly, the invariant endomorphism fields of the tensor space,
  including the averaged-elementary-operator identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    FiberedSpace,
    OperatorField,
    ProjectiveAction,
    VectorField,
    fixed_point_algebra,
    invariant_dimension,
    invariant_pair_dimension,
    pair_invariance_residual,
    rank_one,
)
from .linalg import as_int, hermitize, rank_of_rows

__all__ = [
    "GramModule",
    "TensorModule",
    "ambient_action",
    "interior_tensor",
    "ModuleStructureReport",
    "verify_module_structure",
    "CompactsIsoReport",
    "verify_compacts_iso",
]


# --------------------------------------------------------------------------
# Module presentations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GramModule:
    """A Hilbert module presented by generators and their inner products.

    Parameters
    ----------
    names : tuple of str
        One id per generator.
    gram : nested tuple of OperatorField
        ``gram[i][j]`` is the algebra-valued inner product of generators
        ``i`` and ``j``, given concretely as an endomorphism field on the
        space the algebra acts on.  Must be Hermitian as a matrix of
        algebra elements (``gram[i][j]* == gram[j][i]``); positivity of
        the induced scalar Gram is enforced when tensoring.

    The right action of the algebra is by coefficients on the right of the
    generators and needs no extra data.
    """

    names: tuple[str, ...]
    gram: tuple[tuple[OperatorField, ...], ...]

    def __post_init__(self) -> None:
        names = tuple(str(s) for s in self.names)
        object.__setattr__(self, "names", names)
        n = len(names)
        if len(set(names)) != n or n == 0:
            raise ValueError("generator names must be distinct and nonempty")
        gram = tuple(tuple(row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        if len(gram) != n or any(len(row) != n for row in gram):
            raise ValueError("Gram matrix must be square of size len(names)")
        sp = gram[0][0].source
        scale = 1.0
        for row in gram:
            for g in row:
                if not g.is_endo or g.source.dims != sp.dims or not g.source.same_base(sp):
                    raise ValueError(
                        "Gram entries must be endomorphism fields on one common space"
                    )
                scale = max(scale, g.norm())
        for i in range(n):
            for j in range(n):
                if (gram[i][j].adjoint() - gram[j][i]).norm() > 1e-8 * scale:
                    raise ValueError(
                        "Gram is not Hermitian as a matrix of algebra elements"
                    )

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def space(self) -> FiberedSpace:
        """The fibered space the coefficient algebra acts on."""
        return self.gram[0][0].source

    @classmethod
    def unit(cls, space: FiberedSpace, name: str = "e") -> "GramModule":
        """The free rank-one module: one generator with inner product 1."""
        return cls((name,), ((OperatorField.identity(space),),))

    @classmethod
    def from_block_field(
        cls, blocks: Sequence[Sequence[OperatorField]], names: Sequence[str] | None = None
    ) -> "GramModule":
        """Module presented by an explicit matrix of inner products."""
        n = len(blocks)
        if names is None:
            names = tuple(f"e{i}" for i in range(n))
        return cls(tuple(names), tuple(tuple(row) for row in blocks))

    def scalar_gram(self, x: int) -> np.ndarray:
        """The block matrix ``[G_ij(x)]`` on generator (x) fiber coordinates."""
        n = self.size
        d = self.space.dim(x)
        out = np.zeros((n * d, n * d), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i * d : (i + 1) * d, j * d : (j + 1) * d] = self.gram[i][j].mats[x]
        return hermitize(out)


def ambient_action(action: ProjectiveAction, n: int) -> ProjectiveAction:
    """The same group acting on ``n`` stacked copies of the fibered space.

    The unitary over each point is ``I_n (x) U_w(x)``; cocycle scalars are
    unchanged.  This is the natural action on generator-coefficient
    columns and on the ambient matrix algebra of an ``n``-generator module.
    """
    space = FiberedSpace(action.space.base, tuple(n * d for d in action.space.dims))
    eye = np.eye(n, dtype=complex)
    units = tuple(
        tuple(np.kron(eye, action.unitaries[w][x]) for x in range(space.npoints))
        for w in range(action.group.order)
    )
    return ProjectiveAction(action.group, space, action.point_perm, units)


# --------------------------------------------------------------------------
# Interior tensor product
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TensorModule:
    """The quotient of generator-vector symbols by the Gram kernel.

    Over each point ``x`` the symbols ``e_i (x) v`` with ``v`` in the fiber
    span the column space ``C^{n d(x)}`` with semi-inner product given by
    the scalar Gram; ``sym(x)`` maps a symbol column isometrically onto
    quotient coordinates and ``lift(x)`` is its right inverse.  ``support``
    is the orthogonal projection onto the non-null symbol directions and
    ``sqrt_gram`` the positive square root of the scalar Gram.
    """

    module: GramModule
    space: FiberedSpace
    syms: tuple[np.ndarray, ...]
    lifts: tuple[np.ndarray, ...]
    frames: tuple[np.ndarray, ...]
    supports: tuple[np.ndarray, ...]
    sqrt_grams: tuple[np.ndarray, ...]

    @property
    def source(self) -> FiberedSpace:
        """The fibered space that was tensored against."""
        return self.module.space

    @property
    def ambient(self) -> FiberedSpace:
        """The full symbol space, ``n`` stacked copies of the source."""
        n = self.module.size
        return FiberedSpace(self.source.base, tuple(n * d for d in self.source.dims))

    def generator_map(self, i: int) -> OperatorField:
        """The map ``v -> e_i (x) v`` as an operator field into the quotient."""
        n = self.module.size
        if not 0 <= i < n:
            raise ValueError(f"generator index {i} out of range")
        d = self.source.dims
        mats = tuple(
            self.syms[x][:, i * d[x] : (i + 1) * d[x]] for x in range(self.source.npoints)
        )
        return OperatorField(self.source, self.space, mats)

    def symbol(self, i: int, v: VectorField) -> VectorField:
        """The class of the symbol ``e_i (x) v`` in the quotient."""
        return self.generator_map(i).apply(v)

    def corner_to_quotient(self, m: OperatorField) -> OperatorField:
        """Carry an ambient-corner operator field onto the quotient fibers.

        The frame over each point is an isometry from the quotient fiber
        onto the support of the scalar Gram; conjugating by it identifies
        the support corner of the ambient matrix algebra with the
        endomorphisms of the tensor space.  On the corner (``q m q = m``)
        this is a *-isomorphism and in particular isometric.
        """
        if m.source.dims != self.ambient.dims or m.target.dims != self.ambient.dims:
            raise ValueError("operator field does not live on the ambient symbol space")
        mats = tuple(
            f.conj().T @ mm @ f for f, mm in zip(self.frames, m.mats)
        )
        return OperatorField(self.space, self.space, mats)

    def quotient_to_corner(self, k: OperatorField) -> OperatorField:
        """Inverse of :meth:`corner_to_quotient`, landing in the support corner."""
        if k.source.dims != self.space.dims or k.target.dims != self.space.dims:
            raise ValueError("operator field does not live on the quotient space")
        mats = tuple(f @ kk @ f.conj().T for f, kk in zip(self.frames, k.mats))
        return OperatorField(self.ambient, self.ambient, mats)

    def induced_action(self, action: ProjectiveAction) -> ProjectiveAction:
        """The quotient action on tensor fibers induced by an action on the source.

        Well-defined only when the Gram is invariant for the action; the
        constructed maps are validated and a non-invariant Gram surfaces
        as a unitarity/cocycle failure.
        """
        if action.space.dims != self.source.dims or not action.space.same_base(
            self.source
        ):
            raise ValueError("action does not live on the tensored space")
        amb = ambient_action(action, self.module.size)
        units = []
        for w in range(action.group.order):
            row = []
            for x in range(self.space.npoints):
                wx = action.act_point(w, x)
                row.append(self.syms[wx] @ amb.unitaries[w][x] @ self.lifts[x])
            units.append(tuple(row))
        out = ProjectiveAction(action.group, self.space, action.point_perm, tuple(units))
        out.validate(1e-6)
        return out


def interior_tensor(module: GramModule, rtol: float = 1e-9) -> TensorModule:
    """Tensor a Gram-presented module against the space its algebra acts on.

    Builds the scalar Gram of all generator-vector symbols over each point,
    diagonalizes it, and quotients by the numerical kernel (eigenvalues
    below ``rtol`` times the global maximum).  Raises ``ValueError`` if the
    scalar Gram fails positive semidefiniteness beyond tolerance, which
    signals invalid module data.

    Returns
    -------
    TensorModule
        Quotient fibers with the symbol isometries and support data.
    """
    sp = module.space
    grams = [module.scalar_gram(x) for x in range(sp.npoints)]
    eigs = [np.linalg.eigh(g) if g.size else (np.zeros(0), np.zeros((0, 0), dtype=complex)) for g in grams]
    lam_max = max((float(vals[-1]) for vals, _ in eigs if vals.size), default=0.0)
    lam_min = min((float(vals[0]) for vals, _ in eigs if vals.size), default=0.0)
    if lam_min < -1e-8 * max(1.0, lam_max):
        raise ValueError(
            f"Gram is not positive semidefinite: eigenvalue {lam_min:.3e} "
            "signals invalid module data"
        )
    cut = rtol * lam_max
    syms, lifts, frames, supports, sqrts = [], [], [], [], []
    dims = []
    for vals, vecs in eigs:
        keep = vals > cut
        v_plus = vecs[:, keep]
        lam_plus = vals[keep]
        syms.append(np.sqrt(lam_plus)[:, None] * v_plus.conj().T)
        lifts.append(v_plus / np.sqrt(lam_plus)[None, :])
        frames.append(v_plus)
        supports.append(v_plus @ v_plus.conj().T)
        sqrts.append((vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T)
        dims.append(int(np.sum(keep)))
    return TensorModule(
        module=module,
        space=FiberedSpace(sp.base, tuple(dims)),
        syms=tuple(syms),
        lifts=tuple(lifts),
        frames=tuple(frames),
        supports=tuple(supports),
        sqrt_grams=tuple(sqrts),
    )


# --------------------------------------------------------------------------
# Verifier: generators become equivariant compacts (module recovery)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleStructureReport:
    """Outcome of :func:`verify_module_structure`.

    ``map_rank`` is the dimension of the span of all generator maps
    composed with coefficient-algebra elements, ``module_dim`` the
    dimension of the presented module itself (rank of the Gram on
    coefficient columns), and ``equivariant_dim`` the independently
    counted dimension of the equivariant compact operators the maps are
    supposed to fill out.
    """

    isometry_residual: float
    equivariance_residual: float
    map_rank: int
    module_dim: int
    equivariant_dim: int
    tol: float
    passed: bool


def _check_module_over_invariants(
    module: GramModule, action: ProjectiveAction, tol: float
) -> None:
    if action.space.dims != module.space.dims or not action.space.same_base(
        module.space
    ):
        raise ValueError("module Gram and action live on different fibered spaces")
    for i in range(module.size):
        for j in range(module.size):
            res = action.invariance_residual(module.gram[i][j])
            if res > max(tol, 1e-12) * max(1.0, module.gram[i][j].norm()):
                raise ValueError(
                    f"Gram entry ({i}, {j}) is not invariant under the action "
                    f"(residual {res:.3e}): the module is not over the "
                    "fixed-point algebra"
                )


def verify_module_structure(
    module: GramModule,
    action: ProjectiveAction,
    tol: float = 1e-9,
    rtol: float = 1e-9,
) -> ModuleStructureReport:
    """Check that generators embed isometrically onto the equivariant compacts.

    For each generator ``e`` the map ``T_e : v -> e (x) v`` is assembled
    concretely; the checks are

    * isometry: ``T_e* T_f`` equals the Gram entry ``<e, f>`` as a field;
    * equivariance: each ``T_e`` intertwines the source action with the
      induced quotient action;
    * surjectivity by dimension count: the span of all ``T_e b`` over
      coefficient-algebra elements ``b`` matches both the module dimension
      and the independently counted dimension of equivariant fields.

    Raises
    ------
    ValueError
        If the Gram entries are not invariant (the module is not over the
        fixed-point algebra of the action), or if the scalar Gram is not
        positive semidefinite.
    """
    _check_module_over_invariants(module, action, tol)
    tensor = interior_tensor(module, rtol)
    induced = tensor.induced_action(action)
    n = module.size

    gen_maps = [tensor.generator_map(i) for i in range(n)]
    isometry = max(
        (gen_maps[i].adjoint() @ gen_maps[j] - module.gram[i][j]).norm()
        for i in range(n)
        for j in range(n)
    )
    equivariance = max(
        pair_invariance_residual(induced, action, t) for t in gen_maps
    )

    alg_basis = fixed_point_algebra(action)
    rows = [ (t @ b).to_vec() for t in gen_maps for b in alg_basis ]
    map_rank = rank_of_rows(np.array(rows), rtol)

    cols = []
    for j in range(n):
        for b in alg_basis:
            stacked = [
                np.concatenate(
                    [module.gram[i][j].mats[x] @ b.mats[x] for i in range(n)], axis=0
                ).reshape(-1)
                for x in range(module.space.npoints)
            ]
            cols.append(np.concatenate(stacked))
    module_dim = rank_of_rows(np.array(cols), rtol)

    equivariant_dim = invariant_pair_dimension(induced, action)

    passed = (
        isometry <= tol
        and equivariance <= tol
        and map_rank == module_dim == equivariant_dim
    )
    return ModuleStructureReport(
        isometry_residual=float(isometry),
        equivariance_residual=float(equivariance),
        map_rank=int(map_rank),
        module_dim=int(module_dim),
        equivariant_dim=int(equivariant_dim),
        tol=float(tol),
        passed=bool(passed),
    )


# --------------------------------------------------------------------------
# Verifier: corner algebra matches invariant compacts on the tensor space
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CompactsIsoReport:
    """Outcome of :func:`verify_compacts_iso`.

    The corner of the ambient matrix algebra cut by the Gram's support
    projection is compared against the invariant endomorphism fields of
    the tensor space: dimension three ways (corner span rank, projector
    trace, character count on the quotient), isometry and homomorphism
    residuals on random corner elements, invariance of the images, and
    the averaged-elementary-operator identity.
    """

    corner_dim: int
    corner_trace: int
    invariant_dim: int
    character_dim: int
    isometry_residual: float
    homomorphism_residual: float
    adjoint_residual: float
    invariance_residual: float
    elementary_residual: float
    tol: float
    passed: bool


def verify_compacts_iso(
    module: GramModule,
    action: ProjectiveAction,
    tol: float = 1e-9,
    rtol: float = 1e-9,
    rng: np.random.Generator | None = None,
    samples: int = 6,
) -> CompactsIsoReport:
    """Check the corner picture of the compacts on the tensor space.

    The support projection ``q`` of the scalar Gram cuts a corner out of
    the ambient algebra of matrices over the invariants; conjugation by
    the support frame carries that corner onto endomorphism fields of the
    tensor space.  Verified here:

    * the images are invariant for the induced action and exhaust the
      invariant fields (dimension counted three independent ways);
    * the identification is isometric, multiplicative and adjoint-
      preserving on random corner elements;
    * averaging an elementary operator built from two symbols equals the
      image of the corner element assembled from the averaged source
      elementary operator (both sides computed independently).

    Raises on non-invariant Gram entries, as for
    :func:`verify_module_structure`.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    _check_module_over_invariants(module, action, tol)
    tensor = interior_tensor(module, rtol)
    induced = tensor.induced_action(action)
    n = module.size
    sp = module.space
    npts = sp.npoints

    alg_basis = fixed_point_algebra(action)
    ambient = tensor.ambient

    corner_basis: list[OperatorField] = []
    trace_acc = 0.0
    for i in range(n):
        for j in range(n):
            for b in alg_basis:
                m0_mats = []
                m_mats = []
                for x in range(npts):
                    d = sp.dim(x)
                    m0 = np.zeros((n * d, n * d), dtype=complex)
                    m0[i * d : (i + 1) * d, j * d : (j + 1) * d] = b.mats[x]
                    q = tensor.supports[x]
                    m0_mats.append(m0)
                    m_mats.append(q @ m0 @ q)
                m = OperatorField(ambient, ambient, tuple(m_mats))
                corner_basis.append(m)
                trace_acc += sum(
                    np.vdot(m0, mm).real for m0, mm in zip(m0_mats, m.mats)
                )
    corner_dim = rank_of_rows(np.array([m.to_vec() for m in corner_basis]), rtol)
    corner_trace = as_int(trace_acc, tol=1e-6, what="corner projector trace")

    invariant_dim = len(fixed_point_algebra(induced))
    character_dim = invariant_dimension(induced)

    iso_res = hom_res = adj_res = 0.0
    for _ in range(samples):
        picks = []
        for _k in range(2):
            coeffs = rng.standard_normal(len(corner_basis)) + 1j * rng.standard_normal(
                len(corner_basis)
            )
            m = OperatorField.zeros(ambient, ambient)
            for c, mb in zip(coeffs, corner_basis):
                m = m + c * mb
            picks.append(m)
        m1, m2 = picks
        im1 = tensor.corner_to_quotient(m1)
        im2 = tensor.corner_to_quotient(m2)
        iso_res = max(iso_res, abs(m1.norm() - im1.norm()))
        hom_res = max(
            hom_res, (tensor.corner_to_quotient(m1 @ m2) - im1 @ im2).norm()
        )
        adj_res = max(
            adj_res, (tensor.corner_to_quotient(m1.adjoint()) - im1.adjoint()).norm()
        )

    inv_res = max(
        (induced.invariance_residual(tensor.corner_to_quotient(m)) for m in corner_basis),
        default=0.0,
    )

    elem_res = 0.0
    for i2 in range(n):
        for i1 in range(n):
            v2 = VectorField.random(sp, rng)
            v1 = VectorField.random(sp, rng)
            lhs = induced.average(
                rank_one(tensor.symbol(i2, v2), tensor.symbol(i1, v1))
            )
            bavg = action.average(rank_one(v2, v1))
            m_mats = []
            for x in range(npts):
                d = sp.dim(x)
                s = tensor.sqrt_grams[x]
                m_mats.append(
                    s[:, i2 * d : (i2 + 1) * d]
                    @ bavg.mats[x]
                    @ s[i1 * d : (i1 + 1) * d, :]
                )
            rhs = tensor.corner_to_quotient(
                OperatorField(ambient, ambient, tuple(m_mats))
            )
            elem_res = max(elem_res, (lhs - rhs).norm())

    passed = (
        corner_dim == corner_trace == invariant_dim == character_dim
        and iso_res <= tol
        and hom_res <= tol
        and adj_res <= tol
        and inv_res <= tol
        and elem_res <= tol
    )
    return CompactsIsoReport(
        corner_dim=int(corner_dim),
        corner_trace=int(corner_trace),
        invariant_dim=int(invariant_dim),
        character_dim=int(character_dim),
        isometry_residual=float(iso_res),
        homomorphism_residual=float(hom_res),
        adjoint_residual=float(adj_res),
        invariance_residual=float(inv_res),
        elementary_residual=float(elem_res),
        tol=float(tol),
        passed=bool(passed),
    )
