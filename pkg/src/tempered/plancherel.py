"""The discretized Plancherel pairing and wave-packet consistency checks.

Square-integrable data is modeled by its matrix-valued transform: one
Hilbert-Schmidt field per component, not necessarily invariant
(:class:`FourierField`).  The pairing integrates the pointwise HS inner
product against each component's spectral weights
(:func:`fourier_inner`); averaging over the stabilizer groups is the
orthogonal projection onto invariant fields whenever the weights are
themselves invariant (:func:`averaging_projection`), and the functions
here verify projection identities, the pairing against wave packets, and
the agreement of the averaged product field with the restriction-module
inner product (:func:`inner_product_wavepacket_consistency`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .algebra import AlgebraModel, Component
from .core import OperatorField
from .restriction import AdjointElement, g_inner

__all__ = [
    "FourierField",
    "fourier_inner",
    "weights_invariant",
    "averaging_projection",
    "ProjectionReport",
    "projection_properties",
    "WavePacketReport",
    "wave_packet_pairing_check",
    "ConsistencyReport",
    "inner_product_wavepacket_consistency",
]


@dataclass(frozen=True)
class FourierField:
    """One Hilbert-Schmidt endomorphism field per component, possibly non-invariant."""

    model: AlgebraModel
    fields: Mapping[str, OperatorField]

    def __post_init__(self) -> None:
        clean: dict[str, OperatorField] = {}
        for cid, f in dict(self.fields).items():
            comp = self.model.component(cid)
            if (
                not f.is_endo
                or f.source.dims != comp.space.dims
                or not f.source.same_base(comp.space)
            ):
                raise ValueError(f"field for component {cid!r} has the wrong shape")
            clean[cid] = f
        object.__setattr__(self, "fields", dict(sorted(clean.items())))

    @classmethod
    def random(
        cls,
        model: AlgebraModel,
        rng: np.random.Generator,
        support: Sequence[str] | None = None,
    ) -> "FourierField":
        ids = model.ids if support is None else tuple(support)
        return cls(
            model,
            {
                cid: OperatorField.random(
                    model.component(cid).space, model.component(cid).space, rng
                )
                for cid in ids
            },
        )

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(self.fields)

    def _check(self, other: "FourierField") -> None:
        if other.model is not self.model:
            raise ValueError("fields belong to different models")

    def __add__(self, other: "FourierField") -> "FourierField":
        self._check(other)
        out = dict(self.fields)
        for cid, f in other.fields.items():
            out[cid] = out[cid] + f if cid in out else f
        return FourierField(self.model, out)

    def __sub__(self, other: "FourierField") -> "FourierField":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "FourierField":
        return FourierField(
            self.model, {cid: scalar * f for cid, f in self.fields.items()}
        )

    __rmul__ = __mul__

    def invariance_residual(self) -> float:
        return max(
            (
                self.model.component(cid).action.invariance_residual(f)
                for cid, f in self.fields.items()
            ),
            default=0.0,
        )


def _component_weights(
    comp: Component, override: Mapping[str, Sequence[float]] | None
) -> tuple[float, ...]:
    if override is not None and comp.cid in override:
        w = tuple(float(t) for t in override[comp.cid])
        if len(w) != comp.grid.npoints:
            raise ValueError(f"weight override for {comp.cid!r} has the wrong length")
        return w
    return comp.weights


def fourier_inner(
    f1: FourierField,
    f2: FourierField,
    weights: Mapping[str, Sequence[float]] | None = None,
) -> complex:
    """The weighted Hilbert-Schmidt pairing, conjugate-linear on the left.

    Sums ``m(x) tr(F1(x)* F2(x))`` over every grid point of every shared
    component; weights default to the ones stored on the components.
    """
    f1._check(f2)
    total = 0.0 + 0.0j
    for cid in set(f1.fields) & set(f2.fields):
        comp = f1.model.component(cid)
        m = _component_weights(comp, weights)
        a, b = f1.fields[cid], f2.fields[cid]
        for x in range(comp.grid.npoints):
            total += m[x] * np.trace(a.mats[x].conj().T @ b.mats[x])
    return complex(total)


def weights_invariant(
    model: AlgebraModel,
    weights: Mapping[str, Sequence[float]] | None = None,
    tol: float = 1e-12,
) -> bool:
    """Whether every component's weights are constant along stabilizer orbits."""
    for comp in model.components:
        m = _component_weights(comp, weights)
        scale = max(1.0, max(abs(t) for t in m))
        for w in range(comp.action.group.order):
            for x in range(comp.grid.npoints):
                if abs(m[comp.action.act_point(w, x)] - m[x]) > tol * scale:
                    return False
    return True


def averaging_projection(
    f: FourierField,
    weights: Mapping[str, Sequence[float]] | None = None,
    validate: bool = True,
) -> FourierField:
    """Average each component field over its stabilizer group.

    With invariant weights this is the orthogonal projection onto
    invariant fields for :func:`fourier_inner`; ``validate=False`` skips
    the invariance precondition (used only to demonstrate how the
    projection identities fail for bad weights).
    """
    if validate and not weights_invariant(f.model, weights):
        raise ValueError("weights are not invariant along stabilizer orbits")
    return FourierField(
        f.model,
        {
            cid: f.model.component(cid).action.average(field)
            for cid, field in f.fields.items()
        },
    )


@dataclass(frozen=True)
class ProjectionReport:
    """Projection identities of the averaging map under the weighted pairing."""

    idempotence: float
    self_adjointness: float
    contraction_slack: float
    range_invariance: float
    tol: float
    passed: bool


def projection_properties(
    model: AlgebraModel,
    rng: np.random.Generator | None = None,
    trials: int = 8,
    weights: Mapping[str, Sequence[float]] | None = None,
    validate: bool = True,
    tol: float = 1e-10,
) -> ProjectionReport:
    """Measure how close averaging is to an orthogonal projection.

    Draws random field pairs and reports the worst idempotence defect,
    self-adjointness defect ``|<Av F, H> - <F, Av H>|``, norm-contraction
    slack, and invariance residual of the averaged output.  With invariant
    weights all four must vanish to tolerance; with non-invariant weights
    the self-adjointness defect is expected to survive, which callers use
    as a negative control via ``validate=False``.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    idem = adjy = slack = rangeres = 0.0
    for _ in range(trials):
        f = FourierField.random(model, rng)
        g = FourierField.random(model, rng)
        af = averaging_projection(f, weights, validate=validate)
        ag = averaging_projection(g, weights, validate=validate)
        aaf = averaging_projection(af, weights, validate=validate)
        idem = max(
            idem,
            max(((aaf - af).fields[c].norm() for c in af.fields), default=0.0),
        )
        adjy = max(
            adjy,
            abs(fourier_inner(af, g, weights) - fourier_inner(f, ag, weights)),
        )
        nf = np.sqrt(max(fourier_inner(f, f, weights).real, 0.0))
        naf = np.sqrt(max(fourier_inner(af, af, weights).real, 0.0))
        slack = max(slack, naf - nf)
        rangeres = max(rangeres, af.invariance_residual())
    passed = bool(
        idem <= tol and adjy <= tol and slack <= tol and rangeres <= tol
    )
    return ProjectionReport(
        idempotence=float(idem),
        self_adjointness=float(adjy),
        contraction_slack=float(slack),
        range_invariance=float(rangeres),
        tol=tol,
        passed=passed,
    )


@dataclass(frozen=True)
class WavePacketReport:
    """Pairing an invariant field against a wave packet versus its average."""

    pairing_defect: float
    support_contained: bool
    tol: float
    passed: bool


def wave_packet_pairing_check(
    f: FourierField,
    h: FourierField,
    weights: Mapping[str, Sequence[float]] | None = None,
    tol: float = 1e-10,
) -> WavePacketReport:
    """Check that pairing with ``h`` equals pairing with its average.

    ``f`` must be invariant: then ``<F, h> = <F, Av h>`` under the
    weighted pairing, and the average introduces no new components.
    """
    res = f.invariance_residual()
    if res > 1e-8:
        raise ValueError(f"first field is not invariant (residual {res:.3e})")
    ah = averaging_projection(h, weights)
    defect = abs(fourier_inner(f, h, weights) - fourier_inner(f, ah, weights))
    contained = set(ah.support) <= set(h.support)
    return WavePacketReport(
        pairing_defect=float(defect),
        support_contained=bool(contained),
        tol=tol,
        passed=bool(defect <= tol and contained),
    )


@dataclass(frozen=True)
class ConsistencyReport:
    """Agreement of the averaged product field with the module inner product."""

    field_defect: float
    extra_components: tuple[str, ...]
    tol: float
    passed: bool


def inner_product_wavepacket_consistency(
    s1: AdjointElement,
    s2: AdjointElement,
    weights: Mapping[str, Sequence[float]] | None = None,
    tol: float = 1e-10,
) -> ConsistencyReport:
    """Compare the averaged product field with the adjoint-module inner product.

    The module side is :func:`tempered.restriction.g_inner`; the wave-packet
    side pushes ``S1(x) S2(x)*`` onto the large grid and applies
    :func:`averaging_projection` with the component weights.  The two
    fields must agree on every component, with nothing appearing outside
    the shared support.
    """
    module_side = g_inner(s1, s2)
    model = s1.model.g_model
    raw: dict[str, OperatorField] = {}
    for uid in set(s1.base.fields) & set(s2.base.fields):
        comp = s1.model.component(uid)
        prod = s1.base.fields[uid] @ s2.base.fields[uid].adjoint()
        pushed = comp.push_endo_to_g(prod)
        cid = comp.g_component.cid
        raw[cid] = raw[cid] + pushed if cid in raw else pushed
    packet_side = averaging_projection(FourierField(model, raw), weights)

    defect = 0.0
    for cid in set(module_side.fields) | set(packet_side.fields):
        a = module_side.component_field(cid)
        sp = model.component(cid).space
        b = packet_side.fields.get(cid, OperatorField.zeros(sp, sp))
        defect = max(defect, (a - b).norm())
    extra = tuple(sorted(set(packet_side.support) - set(module_side.support)))
    return ConsistencyReport(
        field_defect=float(defect),
        extra_components=extra,
        tol=tol,
        passed=bool(defect <= tol and not extra),
    )
