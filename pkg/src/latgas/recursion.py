"""Recursive evaluation of effective activities through interpolated interactions.

For a root ``x`` and volume ``Λ``, the effective activity factorises over the
bonds at ``x`` inside ``Λ``. Each factor needs effective activities of an
interpolated, boundary-conditioned interaction on a strictly smaller volume,
so the recursion terminates. The identity checks expose each intermediate
step so it can be compared with :mod:`latgas.exact`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from latgas import exact
from latgas import sitesets as ss
from latgas.criteria import criterion_factor
from latgas.errors import DepthGuardExceeded, ModelError, VanishingDenominator
from latgas.model import CriterionParams, InteractionModel, conditioned, w_conditional

DENOM_EPS = 1e-14


@dataclass(frozen=True)
class InterpolationContext:
    root: int
    bond_order: tuple[int, ...]
    base: InteractionModel

    def __post_init__(self):
        bit = 1 << self.root
        for X in self.bond_order:
            if not X & bit:
                raise ModelError(f"bond {ss.sites_of(X)} misses the root {self.root}")
        if any(a >= b for a, b in zip(self.bond_order, self.bond_order[1:])):
            raise ModelError("bond order must be strictly increasing")

    @classmethod
    def for_volume(cls, model: InteractionModel, x: int, volume: int) -> InterpolationContext:
        return cls(x, relevant_bonds(model, x, volume), model)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex

    @property
    def deviation(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass(frozen=True)
class Bound:
    lhs: float
    rhs: float

    def holds(self, slack: float = 0.0) -> bool:
        return self.lhs <= self.rhs + slack


@dataclass
class TraceEntry:
    root: int
    volume: int
    value: complex
    depth: int
    model: InteractionModel = field(repr=False)


def relevant_bonds(model: InteractionModel, x: int, volume: int) -> tuple[int, ...]:
    """Bonds ``X ∋ x`` with ``W(X) != 1`` and ``X∖{x} ⊂ Λ``, in canonical order."""
    bit = 1 << x
    return tuple(X for X, _ in model.entries_containing(x) if ss.is_subset(X & ~bit, volume))


def interpolated_w(ctx: InterpolationContext, X_marker: int, Y: int) -> complex:
    """``W_X(Y)``: the root interacts only along ``X_marker``; earlier bonds move to ``Y``."""
    if Y == 0:
        raise ModelError("W_X is only queried on non-empty sets")
    bit = 1 << ctx.root
    W = ctx.base.w
    if not Y & bit and (Y | bit) < X_marker:
        return W(Y) * W(Y | bit)
    if Y & bit and Y != X_marker:
        return 1.0 + 0j
    return W(Y)


def interpolated_model(model: InteractionModel, x: int, X_marker: int) -> InteractionModel:
    """Materialise ``W_X`` for root ``x`` as a fresh model."""
    bit = 1 << x
    out: dict[int, complex] = {}
    for E, w in model.w_entries.items():
        if not E & bit:
            key = E
        elif E == X_marker:
            key = E
        elif E < X_marker and E != bit:
            key = E & ~bit
        else:
            continue
        out[key] = out.get(key, 1.0 + 0j) * w
    return model.with_entries(out)


def _ratio(num: complex, den: complex) -> complex:
    if abs(den) <= exact.ZERO_THRESHOLD:
        raise VanishingDenominator(f"denominator {den} vanishes")
    return num / den


def interpolation_identity_check(model: InteractionModel, x: int, volume: int) -> IdentityCheck:
    """Effective activity versus the product of interpolated ratios ``Z_X(Λ|x) / Z_X(Λ)``."""
    lhs = exact.effective_activity(model, x, volume)
    zw = model.activity[x] * model.w(1 << x)
    if zw == 0:
        return IdentityCheck(lhs, 0j)
    rhs = zw
    for X in relevant_bonds(model, x, volume):
        mX = interpolated_model(model, x, X)
        rhs *= _ratio(exact.Z(mX, volume, 1 << x), exact.Z(mX, volume))
    return IdentityCheck(lhs, rhs)


def removal_identity_check(model: InteractionModel, x: int, X: int, volume: int) -> IdentityCheck:
    """Root removal for a single bond ``X``.

    For ``X != {x}`` compares ``Z_X(Λ|x) / Z_X(Λ)`` with
    ``1 + (W(X) - 1) R_X(X', Λ) [X' ⊂ Λ]``. For ``X = {x}`` compares the
    interpolated effective activity with ``z(x) W(x)``.
    """
    bit = 1 << x
    if not X & bit:
        raise ModelError("bond must contain the root")
    if volume & bit:
        raise ModelError("root lies inside the volume")
    mX = interpolated_model(model, x, X)
    if X == bit:
        return IdentityCheck(exact.effective_activity(mX, x, volume),
                             model.activity[x] * model.w(bit))
    lhs = _ratio(exact.Z(mX, volume, bit), exact.Z(mX, volume))
    prime = X & ~bit
    rhs = 1.0 + 0j
    if ss.is_subset(prime, volume):
        rhs += (model.w(X) - 1) * exact.correlation(mX, prime, volume)
    return IdentityCheck(lhs, rhs)


class _Undefined:
    __slots__ = ("error",)

    def __init__(self, error):
        self.error = error


def _product(values: list) -> complex:
    """Product where a vanishing factor wins over ill-defined ones."""
    if any(not isinstance(v, _Undefined) and v == 0 for v in values):
        return 0j
    for v in values:
        if isinstance(v, _Undefined):
            raise v.error
    out = 1.0 + 0j
    for v in values:
        out *= v
    return out


def recursive_effective_activity(model: InteractionModel, x: int, volume: int, boundary: int = 0,
                                 depth_guard: int | None = None,
                                 trace: list[TraceEntry] | None = None) -> complex:
    """Effective activity ``ẑ(x, Λ | B)`` by literal recursion on shrinking volumes.

    Every bond ``X`` at ``x`` inside ``Λ`` contributes
    ``1 + (W(X) - 1) prod q(x')`` over ``x' ∈ X∖{x}`` in site order, with
    ``q = ẑ / (1 + ẑ)`` evaluated for the interpolated interaction conditioned
    on the earlier sites of ``X``. ``trace``, when given, receives one entry
    per returned call.
    """
    if volume >> x & 1:
        raise ModelError(f"site {x} lies inside the volume")
    if depth_guard is None:
        depth_guard = ss.size(volume) + 1
    base = conditioned(model, boundary)
    return _recurse(base, x, volume & ~boundary, 0, depth_guard, (), trace)


def _recurse(model, x, volume, depth, guard, path, trace):
    if depth > guard:
        raise DepthGuardExceeded(f"recursion deeper than {guard}")
    path = path + ((x, volume),)
    bit = 1 << x
    zw = model.activity[x] * model.w(bit)
    if zw == 0:
        value = 0j
    else:
        factors = []
        for X in relevant_bonds(model, x, volume):
            if X == bit:
                continue
            mX = interpolated_model(model, x, X)
            prime = X & ~bit
            inner = []
            for xp in ss.sites_of(prime):
                before = ss.preceding(prime, xp)
                sub = conditioned(mX, before)
                sub_volume = volume & ~(before | 1 << xp)
                try:
                    zh = _recurse(sub, xp, sub_volume, depth + 1, guard, path, trace)
                    if abs(1 + zh) <= DENOM_EPS:
                        raise VanishingDenominator(
                            f"1 + ẑ vanishes at site {xp}", path + ((xp, sub_volume),))
                    inner.append(zh / (1 + zh))
                except VanishingDenominator as err:
                    if not err.path:
                        err = VanishingDenominator(str(err), path)
                    inner.append(_Undefined(err))
            try:
                factors.append(1 + (mX.w(X) - 1) * _product(inner))
            except VanishingDenominator as err:
                factors.append(_Undefined(err))
        value = zw * _product(factors)
    if trace is not None:
        trace.append(TraceEntry(x, volume, value, depth, model))
    return value


def stability_lhs_rhs(model: InteractionModel, params: CriterionParams, x: int, B: int,
                      Y: int) -> Bound:
    """Criterion factor of ``W(Y | B)`` against the product over ``X`` with ``X∖B = Y``."""
    bit = 1 << x
    if B & bit or not Y & bit or Y & B:
        raise ModelError("need x ∉ B, x ∈ Y and Y ∩ B = ∅")
    lhs = criterion_factor(w_conditional(model, Y, B), Y & ~bit, params)
    rhs = 1.0
    for C in ss.subsets(B):
        X = Y | C
        rhs *= criterion_factor(model.w(X), X & ~(bit | B), params)
    return Bound(lhs, rhs)


def site_product(model: InteractionModel, params: CriterionParams, y: int,
                 keep=lambda Y: True) -> float:
    """Product of criterion factors over the non-unit bonds ``Y ∋ y`` accepted by ``keep``."""
    bit = 1 << y
    out = 1.0
    for Y, w in model.entries_containing(y):
        if keep(Y):
            out *= criterion_factor(w, Y & ~bit, params)
    return out


def conditional_stability_product(model: InteractionModel, params: CriterionParams, x: int,
                                  B: int) -> Bound:
    """Criterion product at ``x`` for ``W(· | B)`` against ``1[x ∉ B]`` times the product for ``W``."""
    lhs = site_product(conditioned(model, B), params, x)
    rhs = 0.0 if B >> x & 1 else site_product(model, params, x)
    return Bound(lhs, rhs)


def interpolation_stability(model: InteractionModel, params: CriterionParams, x: int,
                            X_marker: int, y: int) -> Bound:
    """Criterion product at ``y`` for ``W_X`` against ``W`` over bonds ``Y`` with ``x ∈ Y ⇒ Y ⪯ X``."""
    bit = 1 << x
    lhs = site_product(interpolated_model(model, x, X_marker), params, y)
    rhs = site_product(model, params, y, keep=lambda Y: not Y & bit or Y <= X_marker)
    return Bound(lhs, rhs)
