"""The adjoint bimodule and parabolic restriction.

Conjugates of induction-bimodule elements (:class:`AdjointElement`) carry
the opposite bimodule structure, ``b . conj(S) . a = conj(a* . S . b*)``,
and a large-model-valued inner product obtained by averaging ``S1 S2*``
over the large stabilizer group (:func:`g_inner`).  The two norms differ
by at most the index of the small stabilizer in the large one
(:func:`norm_equivalence`).

:func:`restrict` tensors the adjoint bimodule against a representation of
the large model, mirroring :func:`tempered.ups.induce` with the averaged
inner product as Gram; :func:`adjunction_check` counts intertwiners on
both sides of induction/restriction and compares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, RepresentationModel, hom_dim
from .core import BaseSpace, FiberedSpace, OperatorField
from .modules import GramModule, interior_tensor
from .ups import UPSElement, UPSModel, _check_nondegenerate, _generators, left_act, right_act

__all__ = [
    "AdjointElement",
    "g_inner",
    "NormEquivalenceReport",
    "norm_equivalence",
    "restrict",
    "AdjunctionReport",
    "adjunction_check",
]


@dataclass(frozen=True)
class AdjointElement:
    """The conjugate of a bimodule element.

    Stored as the underlying element itself; conjugation only swaps the
    module structure.  Scalars act conjugated (``lam * conj(S) =
    conj(conj(lam) * S)``), the small model acts on the left and the large
    model on the right, both through the original actions with adjoints.
    """

    base: UPSElement

    @property
    def model(self) -> UPSModel:
        return self.base.model

    @property
    def support(self) -> tuple[str, ...]:
        return self.base.support

    def conj(self) -> UPSElement:
        """Conjugation is involutive: the conjugate of the conjugate is the base."""
        return self.base

    def __add__(self, other: "AdjointElement") -> "AdjointElement":
        return AdjointElement(self.base + other.base)

    def __sub__(self, other: "AdjointElement") -> "AdjointElement":
        return AdjointElement(self.base - other.base)

    def __mul__(self, scalar: complex) -> "AdjointElement":
        return AdjointElement(np.conj(scalar) * self.base)

    __rmul__ = __mul__

    def left_act(self, b: AlgebraElement) -> "AdjointElement":
        """``b . conj(S) = conj(S . b*)`` — the small model acts on the left."""
        return AdjointElement(right_act(self.base, b.adjoint()))

    def right_act(self, a: AlgebraElement) -> "AdjointElement":
        """``conj(S) . a = conj(a* . S)`` — the large model acts on the right."""
        return AdjointElement(left_act(a.adjoint(), self.base))

    def norm(self) -> float:
        """The adjoint-module norm, from the averaged inner product."""
        return float(np.sqrt(max(g_inner(self, self).norm(), 0.0)))


def g_inner(s: AdjointElement, t: AdjointElement) -> AlgebraElement:
    """The large-model-valued inner product of two conjugates.

    For a shared summand the raw field ``x -> S(x) T(x)*`` is pushed onto
    the large grid and averaged over the large stabilizer group; distinct
    summands are orthogonal.  The result is conjugate-linear in the first
    argument and supported in the linked large-model components.
    """
    s.base._check(t.base)
    out: dict[str, OperatorField] = {}
    for uid in set(s.base.fields) & set(t.base.fields):
        comp = s.model.component(uid)
        raw = s.base.fields[uid] @ t.base.fields[uid].adjoint()
        pushed = comp.push_endo_to_g(raw)
        averaged = comp.g_component.action.average(pushed)
        cid = comp.g_component.cid
        out[cid] = out[cid] + averaged if cid in out else averaged
    return AlgebraElement(s.model.g_model, out)


@dataclass(frozen=True)
class NormEquivalenceReport:
    """The two squared norms of one element and the exact comparison constant."""

    ups_norm_sq: float
    adjoint_norm_sq: float
    constant: float
    lower_slack: float
    upper_slack: float
    passed: bool


def norm_equivalence(s: UPSElement, tol: float = 1e-10) -> NormEquivalenceReport:
    """Compare the bimodule norm of ``S`` with the norm of its conjugate.

    For an element of a single summand, the conjugate's squared norm lies
    between ``|W_small| / |W_large|`` times the original squared norm and
    the original squared norm itself; both slacks are reported and must be
    nonnegative up to ``tol``.
    """
    if len(s.support) != 1:
        raise ValueError("norm comparison is defined per summand")
    uid = s.support[0]
    comp = s.model.component(uid)
    constant = (
        comp.l_component.action.group.order / comp.g_component.action.group.order
    )
    ups_sq = s.norm() ** 2
    adj_sq = g_inner(AdjointElement(s), AdjointElement(s)).norm()
    lower = adj_sq - constant * ups_sq
    upper = ups_sq - adj_sq
    return NormEquivalenceReport(
        ups_norm_sq=float(ups_sq),
        adjoint_norm_sq=float(adj_sq),
        constant=float(constant),
        lower_slack=float(lower),
        upper_slack=float(upper),
        passed=bool(lower >= -tol and upper >= -tol),
    )


def restrict(model: UPSModel, pi: RepresentationModel, rtol: float = 1e-9) -> RepresentationModel:
    """Tensor the adjoint bimodule against a representation of the large model.

    The generators are the conjugates of the same equivariant bases used
    by induction, with the averaged inner product as Gram pushed through
    ``pi``; the small model acts by its left action on conjugates,
    compressed to the Gram quotient.
    """
    if pi.model is not model.g_model:
        raise ValueError("restrict takes a representation of the large model")
    _check_nondegenerate(pi)
    gens = _generators(model)
    if pi.dim == 0 or not gens:
        return RepresentationModel.zero(model.l_model)

    h = pi.dim
    point = BaseSpace(("*",))
    hspace = FiberedSpace(point, (h,))
    names = []
    seen: dict[str, int] = {}
    for uid, _ in gens:
        k = seen.get(uid, 0)
        seen[uid] = k + 1
        names.append(f"{uid}~{k}")
    n = len(gens)
    # Gram matrix through pi, one summand block at a time: the averaged
    # products S_i S_j^* are pushed to the large grid, expanded over the
    # invariant basis of the large component, and contracted with pi's
    # matrices in batched products.
    gram = np.zeros((n, n, h, h), dtype=complex)
    pos = 0
    for comp in model.components:
        basis = comp.field_basis
        nb = len(basis)
        sl = slice(pos, pos + nb)
        pos += nb
        gcid = comp.g_component.cid
        gbasis = model.g_model.invariant_basis(gcid)
        pmats = pi.mats.get(gcid)
        if nb == 0 or pmats is None or not gbasis:
            continue
        gact = comp.g_component.action
        npts = comp.grid.npoints
        # push the raw products onto the large grid by the label map
        pushed: list[np.ndarray] = [np.zeros(0)] * npts
        for x in range(npts):
            fx = np.stack([f.mats[x] for f in basis])
            pushed[comp.gmap[x]] = np.einsum(
                "isl,jtl->ijst", fx, fx.conj(), optimize=True
            )
        avg = [np.zeros_like(p) for p in pushed]
        order = gact.group.order
        for w in range(order):
            for y in range(npts):
                u = gact.unitaries[w][y]
                avg[gact.act_point(w, y)] += (
                    np.einsum("st,ijtu,vu->ijsv", u, pushed[y], u.conj())
                ) / order
        coeffs = np.zeros((nb, nb, len(gbasis)), dtype=complex)
        for y in range(npts):
            gy = np.stack([bb.mats[y] for bb in gbasis])
            coeffs += np.einsum("ijsu,nsu->ijn", avg[y], gy.conj(), optimize=True)
        gram[sl, sl] = np.einsum(
            "ijn,nhk->ijhk", coeffs, np.stack(pmats), optimize=True
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
        cid = comp.l_component.cid
        lbasis = model.l_model.invariant_basis(cid)
        # coeff_t[k, i, j] = <f_i, f_j b_k^*>, the right action of the small
        # model on conjugate generators, inside the summand's block
        coeff_t = np.zeros((len(lbasis), n, n), dtype=complex)
        if nb and lbasis:
            for x in range(comp.grid.npoints):
                fx = np.stack([f.mats[x] for f in basis])
                lx = np.stack([bb.mats[x] for bb in lbasis])
                coeff_t[:, sl, sl] += np.einsum(
                    "isl,jsm,klm->kij", fx.conj(), fx, lx.conj(), optimize=True
                )
        mats[cid] = tuple(
            sym @ np.kron(coeff_t[k], eye_h) @ lift for k in range(len(lbasis))
        )
    return RepresentationModel(model.l_model, r, mats)


@dataclass(frozen=True)
class AdjunctionReport:
    """The four intertwiner counts around one induction/restriction pair."""

    hom_ind_pi: int
    hom_tau_res: int
    hom_pi_ind: int
    hom_res_tau: int
    passed: bool


def adjunction_check(
    model: UPSModel, tau: RepresentationModel, pi: RepresentationModel
) -> AdjunctionReport:
    """Count intertwiners on both sides of induction and restriction.

    Asserts the two dimension equalities ``Hom(Ind tau, pi) = Hom(tau, Res
    pi)`` and ``Hom(pi, Ind tau) = Hom(Res pi, tau)`` by independent
    linear solves.
    """
    from .ups import induce

    ind = induce(model, tau)
    res = restrict(model, pi)
    d1 = hom_dim(ind, pi)
    d2 = hom_dim(tau, res)
    d3 = hom_dim(pi, ind)
    d4 = hom_dim(res, tau)
    return AdjunctionReport(
        hom_ind_pi=d1,
        hom_tau_res=d2,
        hom_pi_ind=d3,
        hom_res_tau=d4,
        passed=bool(d1 == d2 and d3 == d4),
    )
