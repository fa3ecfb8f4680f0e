"""The induction bimodule between two model algebras.

A :class:`UPSComponent` ties one component of the smaller-group model to
one component of the larger-group model over an identified grid and holds
the rectangular operator fields between their fibers that are equivariant
for the smaller stabilizer group.  The direct sum of these spaces
(:class:`UPSModel`, elements :class:`UPSElement`) is a bimodule: the large
model acts by post-composition, the small model by pre-composition, and
``l_inner`` is the pointwise adjoint-product pairing valued in the small
model.

:func:`induce` tensors the bimodule against a finite-dimensional
representation of the small model — the Gram quotient is delegated to
:func:`tempered.modules.interior_tensor` over a one-point base — and
returns the induced representation of the large model.
:func:`induction_in_stages` verifies that composing two nested bimodules
reproduces the one-step bimodule: spanning, isometry, action
compatibility, and functoriality on sample representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .algebra import AlgebraElement, AlgebraModel, Component, RepresentationModel, hom_dim
from .core import (
    BaseSpace,
    FiberedSpace,
    OperatorField,
    ProjectiveAction,
    fixed_point_pair_basis,
    pair_invariance_residual,
)
from .linalg import rank_of_rows
from .modules import GramModule, interior_tensor

__all__ = [
    "UPSComponent",
    "UPSModel",
    "UPSElement",
    "left_act",
    "right_act",
    "l_inner",
    "induce",
    "StagesReport",
    "induction_in_stages",
    "ShapeReport",
    "minimal_parabolic_shape",
]


# --------------------------------------------------------------------------
# Components
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UPSComponent:
    """One summand of the induction bimodule.

    Parameters
    ----------
    uid : str
        Unique id of the summand.
    l_component, g_component : Component
        The linked components of the small and large models.  Their grids
        must carry the same label set; the identification is by label.
    embed : tuple of int
        For each element of the small stabilizer group, the index of its
        image in the large stabilizer group.  Must be an injective
        homomorphism compatible with the two grid actions under the label
        identification.
    """

    uid: str
    l_component: Component
    g_component: Component
    embed: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "embed", tuple(int(i) for i in self.embed))
        lg, gg = self.l_component.action.group, self.g_component.action.group
        if len(self.embed) != lg.order:
            raise ValueError("embed needs one entry per small-group element")
        if len(set(self.embed)) != lg.order:
            raise ValueError("embed must be injective")
        if any(not 0 <= i < gg.order for i in self.embed):
            raise ValueError("embed hits indices outside the large group")
        for a in range(lg.order):
            for b in range(lg.order):
                if self.embed[lg.mul(a, b)] != gg.mul(self.embed[a], self.embed[b]):
                    raise ValueError("embed is not a group homomorphism")
        lgrid, ggrid = self.l_component.grid, self.g_component.grid
        if sorted(lgrid.labels) != sorted(ggrid.labels):
            raise ValueError(
                f"components {self.l_component.cid!r} and {self.g_component.cid!r} "
                "do not share a grid label set"
            )
        gmap = tuple(ggrid.index(lab) for lab in lgrid.labels)
        object.__setattr__(self, "_gmap", gmap)
        lact, gact = self.l_component.action, self.g_component.action
        for w in range(lg.order):
            for x in range(lgrid.npoints):
                if gmap[lact.act_point(w, x)] != gact.act_point(self.embed[w], gmap[x]):
                    raise ValueError(
                        "grid actions disagree under the label identification"
                    )

    @property
    def gmap(self) -> tuple[int, ...]:
        """Small-grid index -> large-grid index, by matching labels."""
        return self._gmap  # type: ignore[attr-defined]

    @property
    def grid(self) -> BaseSpace:
        """The common grid in small-side coordinates."""
        return self.l_component.grid

    @cached_property
    def pulled_space(self) -> FiberedSpace:
        """The large-side fibers pulled back to small-grid coordinates."""
        dims = tuple(self.g_component.space.dim(y) for y in self.gmap)
        return FiberedSpace(self.grid, dims)

    @cached_property
    def target_action(self) -> ProjectiveAction:
        """The small group acting on the pulled-back large fibers."""
        lact = self.l_component.action
        gact = self.g_component.action
        units = tuple(
            tuple(gact.unitaries[self.embed[w]][self.gmap[x]] for x in range(self.grid.npoints))
            for w in range(lact.group.order)
        )
        action = ProjectiveAction(lact.group, self.pulled_space, lact.point_perm, units)
        action.validate(1e-8)
        return action

    @cached_property
    def field_basis(self) -> tuple[OperatorField, ...]:
        """Orthonormal basis of the equivariant rectangular fields."""
        return tuple(fixed_point_pair_basis(self.target_action, self.l_component.action))

    def equivariance_residual(self, field: OperatorField) -> float:
        return pair_invariance_residual(
            self.target_action, self.l_component.action, field
        )

    def zero_field(self) -> OperatorField:
        return OperatorField.zeros(self.l_component.space, self.pulled_space)

    def pull_g_field(self, field: OperatorField) -> OperatorField:
        """Pull an endomorphism field of the large component back along the grid map."""
        mats = tuple(field.mats[y] for y in self.gmap)
        return OperatorField(self.pulled_space, self.pulled_space, mats)

    def push_endo_to_g(self, field: OperatorField) -> OperatorField:
        """Push an endomorphism field of the pulled fibers onto the large grid."""
        gspace = self.g_component.space
        mats: list[np.ndarray] = [np.zeros((0, 0))] * gspace.npoints
        for x, y in enumerate(self.gmap):
            mats[y] = field.mats[x]
        return OperatorField(gspace, gspace, tuple(mats))


@dataclass(frozen=True)
class UPSModel:
    """The direct sum of UPS components between two fixed models.

    Distinct summands are orthogonal by definition: inner products never
    mix them, and the component links must reference the very objects held
    by the two models (identity, not structural equality).
    """

    l_model: AlgebraModel
    g_model: AlgebraModel
    components: tuple[UPSComponent, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        uids = [c.uid for c in comps]
        if len(set(uids)) != len(uids):
            raise ValueError("component uids must be pairwise distinct")
        lcids = [c.l_component.cid for c in comps]
        if len(set(lcids)) != len(lcids):
            raise ValueError("each small-model component may carry at most one summand")
        for c in comps:
            if self.l_model.component(c.l_component.cid) is not c.l_component:
                raise ValueError(f"summand {c.uid!r} does not link into the small model")
            if self.g_model.component(c.g_component.cid) is not c.g_component:
                raise ValueError(f"summand {c.uid!r} does not link into the large model")

    @cached_property
    def _by_uid(self) -> dict[str, UPSComponent]:
        return {c.uid: c for c in self.components}

    def component(self, uid: str) -> UPSComponent:
        try:
            return self._by_uid[uid]
        except KeyError:
            raise ValueError(f"unknown summand {uid!r}") from None

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.uid for c in self.components)

    def zero(self) -> "UPSElement":
        return UPSElement(self, {})

    def random_element(
        self,
        rng: np.random.Generator,
        support: Sequence[str] | None = None,
    ) -> "UPSElement":
        """A random combination of the equivariant basis per summand."""
        ids = self.ids if support is None else tuple(support)
        out = {}
        for uid in ids:
            comp = self.component(uid)
            basis = comp.field_basis
            if not basis:
                out[uid] = comp.zero_field()
                continue
            coeff = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
            acc = comp.zero_field()
            for c, b in zip(coeff, basis):
                acc = acc + complex(c) * b
            out[uid] = acc
        return UPSElement(self, out)


@dataclass(frozen=True)
class UPSElement:
    """A bimodule element, stored sparsely per summand (absent = zero)."""

    model: UPSModel
    fields: Mapping[str, OperatorField]

    def __post_init__(self) -> None:
        clean: dict[str, OperatorField] = {}
        for uid, f in dict(self.fields).items():
            comp = self.model.component(uid)
            src, tgt = comp.l_component.space, comp.pulled_space
            if (
                f.source.dims != src.dims
                or f.target.dims != tgt.dims
                or not f.source.same_base(src)
            ):
                raise ValueError(f"field for summand {uid!r} has the wrong shape")
            res = comp.equivariance_residual(f)
            if res > 1e-6 * max(1.0, f.norm()):
                raise ValueError(
                    f"field for summand {uid!r} is not equivariant (residual {res:.3e})"
                )
            clean[uid] = f
        object.__setattr__(self, "fields", dict(sorted(clean.items())))

    def _check(self, other: "UPSElement") -> None:
        if other.model is not self.model:
            raise ValueError("elements belong to different bimodules")

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.fields)

    def component_field(self, uid: str) -> OperatorField:
        if uid in self.fields:
            return self.fields[uid]
        return self.model.component(uid).zero_field()

    def __add__(self, other: "UPSElement") -> "UPSElement":
        self._check(other)
        out = dict(self.fields)
        for uid, f in other.fields.items():
            out[uid] = out[uid] + f if uid in out else f
        return UPSElement(self.model, out)

    def __sub__(self, other: "UPSElement") -> "UPSElement":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "UPSElement":
        return UPSElement(
            self.model, {uid: scalar * f for uid, f in self.fields.items()}
        )

    __rmul__ = __mul__

    def norm(self) -> float:
        """The module norm: largest fiberwise operator norm over all summands."""
        return max((f.norm() for f in self.fields.values()), default=0.0)


# --------------------------------------------------------------------------
# Bimodule operations
# --------------------------------------------------------------------------


def left_act(a: AlgebraElement, s: UPSElement) -> UPSElement:
    """Post-compose a bimodule element with a large-model element."""
    if a.model is not s.model.g_model:
        raise ValueError("left action takes an element of the large model")
    out = {}
    for uid, f in s.fields.items():
        comp = s.model.component(uid)
        mat = a.fields.get(comp.g_component.cid)
        if mat is None:
            continue
        out[uid] = comp.pull_g_field(mat) @ f
    return UPSElement(s.model, out)


def right_act(s: UPSElement, b: AlgebraElement) -> UPSElement:
    """Pre-compose a bimodule element with a small-model element."""
    if b.model is not s.model.l_model:
        raise ValueError("right action takes an element of the small model")
    out = {}
    for uid, f in s.fields.items():
        comp = s.model.component(uid)
        mat = b.fields.get(comp.l_component.cid)
        if mat is None:
            continue
        out[uid] = f @ mat
    return UPSElement(s.model, out)


def l_inner(s: UPSElement, t: UPSElement) -> AlgebraElement:
    """The small-model-valued inner product ``x -> S(x)* T(x)``.

    Conjugate-linear in the first argument; distinct summands are
    orthogonal, and the output of a shared summand lands in its linked
    small-model component.  Equivariance of both arguments makes the
    result invariant, so it is a genuine algebra element.
    """
    s._check(t)
    out = {}
    for uid in set(s.fields) & set(t.fields):
        comp = s.model.component(uid)
        out[comp.l_component.cid] = s.fields[uid].adjoint() @ t.fields[uid]
    return AlgebraElement(s.model.l_model, out)


# --------------------------------------------------------------------------
# Induction
# --------------------------------------------------------------------------


def _check_nondegenerate(rep: RepresentationModel) -> None:
    if rep.dim == 0:
        return
    one = rep.apply(AlgebraElement.identity(rep.model))
    if np.linalg.norm(one - np.eye(rep.dim)) > 1e-8 * rep.dim:
        raise ValueError("representation is degenerate (identity does not act as 1)")


def _generators(model: UPSModel) -> list[tuple[str, OperatorField]]:
    gens = []
    for comp in model.components:
        for field in comp.field_basis:
            gens.append((comp.uid, field))
    return gens


def induce(model: UPSModel, tau: RepresentationModel, rtol: float = 1e-9) -> RepresentationModel:
    """Tensor the bimodule against a representation of the small model.

    The generators are the equivariant bases of all summands; their
    module inner products are pushed through ``tau`` into a one-point Gram
    module, and the induced space is its interior-tensor quotient.  The
    large model acts through its expansion coefficients on the generators,
    compressed to the quotient — a *-representation because the
    coefficient operators are adjointable for the Gram.
    """
    if tau.model is not model.l_model:
        raise ValueError("induce takes a representation of the small model")
    _check_nondegenerate(tau)
    gens = _generators(model)
    if tau.dim == 0 or not gens:
        return RepresentationModel.zero(model.g_model)

    h = tau.dim
    point = BaseSpace(("*",))
    hspace = FiberedSpace(point, (h,))
    names = []
    seen: dict[str, int] = {}
    for uid, _ in gens:
        k = seen.get(uid, 0)
        seen[uid] = k + 1
        names.append(f"{uid}#{k}")
    n = len(gens)
    # Gram matrix of the generators through tau, assembled blockwise: the
    # generator inner products <f_i, f_j> of one summand are expanded over
    # the invariant basis of its small component and contracted with tau's
    # matrices in a single batched product per grid point.
    gram = np.zeros((n, n, h, h), dtype=complex)
    pos = 0
    for comp in model.components:
        basis = comp.field_basis
        nb = len(basis)
        sl = slice(pos, pos + nb)
        pos += nb
        lbasis = model.l_model.invariant_basis(comp.l_component.cid)
        tmats = tau.mats.get(comp.l_component.cid)
        if nb == 0 or tmats is None or not lbasis:
            continue
        coeffs = np.zeros((nb, nb, len(lbasis)), dtype=complex)
        for x in range(comp.grid.npoints):
            fx = np.stack([f.mats[x] for f in basis])
            lx = np.stack([bb.mats[x] for bb in lbasis])
            coeffs += np.einsum(
                "ist,jsu,ntu->ijn", fx.conj(), fx, lx.conj(), optimize=True
            )
        gram[sl, sl] = np.einsum(
            "ijn,nhk->ijhk", coeffs, np.stack(tmats), optimize=True
        )
    gram_rows = tuple(
        tuple(OperatorField(hspace, hspace, (gram[i, j],)) for j in range(n))
        for i in range(n)
    )
    module = GramModule(tuple(names), gram_rows)
    tensored = interior_tensor(module, rtol=rtol)
    r = tensored.space.dim(0)
    sym, lift = tensored.syms[0], tensored.lifts[0]

    mats: dict[str, tuple[np.ndarray, ...]] = {}
    eye_h = np.eye(h, dtype=complex)
    pos = 0
    for comp in model.components:
        basis = comp.field_basis
        nb = len(basis)
        sl = slice(pos, pos + nb)
        pos += nb
        cid = comp.g_component.cid
        if cid in mats:
            raise ValueError("summands sharing a large-model component are not supported")
        gbasis = model.g_model.invariant_basis(cid)
        # coeff_t[k, i, j] = <f_i, pull(b_k) f_j>, nonzero only within the
        # summand's own generator block
        coeff_t = np.zeros((len(gbasis), n, n), dtype=complex)
        if nb and gbasis:
            pulled = [comp.pull_g_field(b) for b in gbasis]
            for x in range(comp.grid.npoints):
                fx = np.stack([f.mats[x] for f in basis])
                gx = np.stack([p.mats[x] for p in pulled])
                coeff_t[:, sl, sl] += np.einsum(
                    "isl,kst,jtl->kij", fx.conj(), gx, fx, optimize=True
                )
        mats[cid] = tuple(
            sym @ np.kron(coeff_t[k], eye_h) @ lift for k in range(len(gbasis))
        )
    return RepresentationModel(model.g_model, r, mats)


# --------------------------------------------------------------------------
# Induction in stages
# --------------------------------------------------------------------------


def _reps_isomorphic(a: RepresentationModel, b: RepresentationModel) -> bool:
    """Semisimple equivalence via intertwiner counts (Cauchy-Schwarz equality)."""
    if a.dim != b.dim:
        return False
    cross = hom_dim(a, b)
    return cross == hom_dim(a, a) == hom_dim(b, b)


@dataclass(frozen=True)
class StagesReport:
    """Outcome of an induction-in-stages comparison."""

    composition_equivariance: float
    span_rank: int
    glued_dim: int
    isometry_residual: float
    action_residual: float
    functor_dims: tuple[tuple[int, int], ...]
    functor_isomorphic: bool
    tol: float
    passed: bool


def induction_in_stages(
    upper: UPSModel,
    upper_uid: str,
    lower: UPSModel,
    lower_uid: str,
    glued: UPSModel,
    glued_uid: str,
    rng: np.random.Generator | None = None,
    samples: int = 4,
    tol: float = 1e-9,
) -> StagesReport:
    """Verify that composing nested bimodule summands gives the one-step summand.

    ``lower`` runs from the small model up to the middle model, ``upper``
    from the middle to the large; their field compositions must land in —
    and span — the ``glued`` summand, compatibly with inner products and
    the left action, and induction through the two stages must agree with
    one-step induction on sample representations.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    up, low, gl = upper.component(upper_uid), lower.component(lower_uid), glued.component(glued_uid)
    if lower.g_model is not upper.l_model:
        raise ValueError("stage models are not nested (middle model mismatch)")
    if glued.l_model is not lower.l_model or glued.g_model is not upper.g_model:
        raise ValueError("glued model does not span the outer models")
    if up.l_component is not low.g_component:
        raise ValueError("upper and lower summands do not meet in the middle component")
    if gl.l_component is not low.l_component or gl.g_component is not up.g_component:
        raise ValueError("glued summand does not link the outer components")
    for x in range(gl.grid.npoints):
        if up.gmap[low.gmap[x]] != gl.gmap[x]:
            raise ValueError("grid identifications do not compose")

    def compose(sf: OperatorField, tf: OperatorField) -> OperatorField:
        mats = tuple(
            sf.mats[low.gmap[x]] @ tf.mats[x] for x in range(gl.grid.npoints)
        )
        return OperatorField(gl.l_component.space, gl.pulled_space, mats)

    sbasis, tbasis = up.field_basis, low.field_basis
    gbasis = gl.field_basis

    # batched composition of every basis pair:
    # comp_pts[x][a, b] = sbasis[a](gmap x) @ tbasis[b](x)
    npts = gl.grid.npoints
    npairs = len(sbasis) * len(tbasis)
    comp_pts = [
        np.einsum(
            "aij,bjk->abik",
            np.stack([sf.mats[low.gmap[x]] for sf in sbasis]),
            np.stack([tf.mats[x] for tf in tbasis]),
        )
        for x in range(npts)
    ] if npairs else []

    # equivariance of all compositions at once (pointwise Frobenius norm,
    # an upper bound for the operator-norm residual used elsewhere)
    lact, tact = gl.l_component.action, gl.target_action
    equiv = 0.0
    for w in range(lact.group.order if npairs else 0):
        for x in range(npts):
            y = lact.act_point(w, x)
            moved = np.einsum(
                "ij,abjk,lk->abil",
                tact.unitaries[w][x],
                comp_pts[x],
                np.conj(lact.unitaries[w][x]),
            )
            diff = comp_pts[y] - moved
            if diff.size:
                sq = (np.abs(diff) ** 2).sum(axis=(2, 3)).max()
                equiv = max(equiv, float(np.sqrt(sq)))

    # containment: by Parseval the part of a composition missed by the
    # (orthonormal) glued basis has squared norm ||c||^2 - ||coeffs||^2
    if npairs:
        cflat = np.concatenate(
            [p.reshape(npairs, p.shape[2] * p.shape[3]) for p in comp_pts], axis=1
        )
        gflat = np.array([g.to_vec() for g in gbasis])
        coeffs = (
            cflat @ gflat.conj().T
            if len(gbasis)
            else np.zeros((npairs, 0), dtype=complex)
        )
        missed = (np.abs(cflat) ** 2).sum(axis=1) - (np.abs(coeffs) ** 2).sum(axis=1)
        equiv = max(equiv, float(np.sqrt(max(float(missed.max()), 0.0))))
        span_rank = rank_of_rows(coeffs)
    else:
        span_rank = 0

    def random_field(comp: UPSComponent) -> OperatorField:
        basis = comp.field_basis
        acc = comp.zero_field()
        for b in basis:
            acc = acc + complex(rng.standard_normal() + 1j * rng.standard_normal()) * b
        return acc

    isometry = 0.0
    action_res = 0.0
    for _ in range(samples):
        s1, s2 = random_field(up), random_field(up)
        t1, t2 = random_field(low), random_field(low)
        lhs = compose(s1, t1).adjoint() @ compose(s2, t2)
        mid = AlgebraElement(
            upper.l_model, {up.l_component.cid: s1.adjoint() @ s2}
        )
        pulled = low.pull_g_field(mid.fields[low.g_component.cid])
        rhs = t1.adjoint() @ (pulled @ t2)
        isometry = max(isometry, (lhs - rhs).norm())

        a = AlgebraElement.random_invariant(
            upper.g_model, rng, support=(up.g_component.cid,)
        )
        amat = a.fields[up.g_component.cid]
        left_glued = gl.pull_g_field(amat) @ compose(s1, t1)
        left_staged = compose(up.pull_g_field(amat) @ s1, t1)
        action_res = max(action_res, (left_glued - left_staged).norm())

    functor_dims = []
    functor_ok = True
    for _ in range(max(1, samples - 1)):
        comp_l = low.l_component
        x = int(rng.integers(comp_l.grid.npoints))
        tau = RepresentationModel.evaluation(lower.l_model, comp_l.cid, x)
        if rng.random() < 0.5:
            y = int(rng.integers(comp_l.grid.npoints))
            tau = tau.direct_sum(
                RepresentationModel.evaluation(lower.l_model, comp_l.cid, y)
            )
        staged = induce(upper, induce(lower, tau))
        onestep = induce(glued, tau)
        functor_dims.append((staged.dim, onestep.dim))
        functor_ok = functor_ok and _reps_isomorphic(staged, onestep)

    passed = bool(
        equiv <= tol
        and span_rank == len(gbasis)
        and isometry <= tol
        and action_res <= tol
        and functor_ok
    )
    return StagesReport(
        composition_equivariance=float(equiv),
        span_rank=int(span_rank),
        glued_dim=len(gbasis),
        isometry_residual=float(isometry),
        action_residual=float(action_res),
        functor_dims=tuple(functor_dims),
        functor_isomorphic=bool(functor_ok),
        tol=tol,
        passed=passed,
    )


# --------------------------------------------------------------------------
# Minimal-parabolic shape
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeReport:
    """Per-summand check that the equivariance group is trivial and the span full."""

    entries: tuple[tuple[str, int, int, int], ...]
    passed: bool


def minimal_parabolic_shape(model: UPSModel) -> ShapeReport:
    """Check that every summand is a full rectangular field space.

    Each entry records ``(uid, group order, equivariant dimension, full
    dimension)``; the report passes when every summand has a trivial
    equivariance group and its equivariant fields exhaust all rectangular
    fields, the expected shape over a minimal parabolic.
    """
    entries = []
    ok = True
    for comp in model.components:
        order = comp.l_component.action.group.order
        full = sum(
            comp.pulled_space.dim(x) * comp.l_component.space.dim(x)
            for x in range(comp.grid.npoints)
        )
        eq_dim = len(comp.field_basis)
        entries.append((comp.uid, order, eq_dim, full))
        ok = ok and order == 1 and eq_dim == full
    return ShapeReport(entries=tuple(entries), passed=bool(ok))
