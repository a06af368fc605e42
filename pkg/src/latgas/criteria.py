"""Sufficient conditions for zero-free partition functions, checked site by site."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from latgas import sitesets as ss
from latgas.errors import MissingPotential
from latgas.model import CriterionParams, InteractionModel

CRITERIA = ("dobrushin", "kp_like", "kp_auto", "gms_improved", "galvin", "bencs_buys")


@dataclass(frozen=True)
class SiteCheck:
    site: int
    lhs: float
    rhs: float
    ok: bool


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    sites: tuple[SiteCheck, ...]
    params: CriterionParams | None = None
    labels: tuple[str, ...] = field(default=())

    @property
    def overall(self) -> bool:
        return all(s.ok for s in self.sites)

    def failing(self) -> list[SiteCheck]:
        return [s for s in self.sites if not s.ok]

    def to_json(self) -> dict:
        lab = self.labels or tuple(str(s.site) for s in self.sites)
        name = {s.site: lab[s.site] if s.site < len(lab) else str(s.site) for s in self.sites}
        out = {
            "criterion": self.criterion,
            "overall": self.overall,
            "sites": [{"site": name[s.site], "lhs": s.lhs, "rhs": s.rhs, "ok": s.ok}
                      for s in self.sites],
        }
        if self.params is not None:
            out["params"] = {"r": list(self.params.r), "alpha": list(self.params.alpha)}
        return out


def criterion_factor(w: complex, free: int, params: CriterionParams) -> float:
    """``max{|w|, 1 + |w - 1| alpha^S : S non-empty inside free}``.

    All non-empty ``S`` are enumerated; ``alpha`` may straddle 1 so no
    monotone shortcut applies.
    """
    best = abs(w)
    dev = abs(w - 1)
    if dev == 0:
        return max(best, 1.0) if free else best
    for S in ss.nonempty_subsets(free):
        best = max(best, 1 + dev * params.alpha_pow(S))
    return best


def dobrushin_product(model: InteractionModel, params: CriterionParams, x: int) -> float:
    """Product of criterion factors over the non-unit bonds at ``x``."""
    out = 1.0
    bit = 1 << x
    for X, w in model.entries_containing(x):
        out *= criterion_factor(w, X & ~bit, params)
    return out


def dobrushin_lhs(model: InteractionModel, params: CriterionParams, x: int) -> float:
    return abs(model.activity[x]) * dobrushin_product(model, params, x)


def dobrushin(model: InteractionModel, params: CriterionParams) -> CriterionReport:
    checks = []
    for x in range(model.n):
        lhs = dobrushin_lhs(model, params, x)
        checks.append(SiteCheck(x, lhs, params.r[x], lhs <= params.r[x]))
    return CriterionReport("dobrushin", tuple(checks), params, model.labels)


def _stability(model: InteractionModel, x: int) -> float:
    """``|z(x) W(x)|`` times ``max{|W(X)|, 1}`` over bonds strictly containing ``x``."""
    out = abs(model.activity[x] * model.w(1 << x))
    for X, w in model.entries_containing(x):
        if X != 1 << x:
            out *= max(abs(w), 1.0)
    return out


def kp_like_lhs(model: InteractionModel, params: CriterionParams, x: int) -> float:
    bit = 1 << x
    expo = params.alpha[x]
    for X, w in model.entries_containing(x):
        if X != bit:
            expo += abs(w - 1) * max(params.alpha_pow(S) for S in ss.nonempty_subsets(X & ~bit))
    return _stability(model, x) * math.exp(expo)


def kp_like(model: InteractionModel, params: CriterionParams) -> CriterionReport:
    checks = []
    for x in range(model.n):
        lhs = kp_like_lhs(model, params, x)
        checks.append(SiteCheck(x, lhs, params.alpha[x], lhs <= params.alpha[x]))
    return CriterionReport("kp_like", tuple(checks), params, model.labels)


def c_w(model: InteractionModel, x: int) -> float:
    bit = 1 << x
    return 1.0 + sum(abs(w - 1) for X, w in model.entries_containing(x) if X != bit)


def kp_auto(model: InteractionModel) -> CriterionReport:
    """Criterion with constant ``alpha = 1 / sup_x C_W(x)``; the report carries those params."""
    cbar = max((c_w(model, x) for x in range(model.n)), default=1.0)
    bound = 1.0 / (cbar * math.e)
    checks = []
    for x in range(model.n):
        lhs = _stability(model, x)
        checks.append(SiteCheck(x, lhs, bound, lhs <= bound))
    params = CriterionParams.constant_alpha(model.n, 1.0 / cbar)
    return CriterionReport("kp_auto", tuple(checks), params, model.labels)


def d_v(model: InteractionModel, x: int) -> float:
    if model.potential_entries is None:
        raise MissingPotential("the model has no potential representation")
    bit = 1 << x
    return sum(abs(v) for X, v in model.potential_entries.items() if X & bit and X != bit)


def gms_improved(model: InteractionModel, x: int) -> SiteCheck:
    lhs = 2 * abs(model.activity[x] * model.w(1 << x)) * math.exp(d_v(model, x))
    return SiteCheck(x, lhs, 1.0, lhs <= 1.0)


def gms(model: InteractionModel) -> CriterionReport:
    """Site-wise ``2 |z W(x)| exp(D_V(x)) <= 1``; implies the Dobrushin check at ``alpha = 1``."""
    checks = tuple(gms_improved(model, x) for x in range(model.n))
    return CriterionReport("gms_improved", checks, CriterionParams.constant_alpha(model.n, 1.0),
                           model.labels)
