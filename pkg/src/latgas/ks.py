"""Kirkwood-Salsburg hierarchy on a finite volume.

The kernel ``gamma(s, N | B)`` is available through its alternating-sum
definition and, independently, as a sum over covers of ``N``. Correlation
tables live on all subsets of a support set ``U ⊇ Λ`` and the Picard
iteration ``rho_{n+1} = K_Λ rho_n`` is run as a sparse matrix power.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from latgas import sitesets as ss
from latgas._backend import kernels
from latgas.criteria import criterion_factor
from latgas.errors import ModelError, NoConvergence, SupportTooSmall
from latgas.model import CriterionParams, InteractionModel, kappa_conditional, w_conditional
from latgas.recursion import Bound

Selector = Callable[[int], int]

# sweeps per support site before giving up; near the criterion boundary the
# contraction is slow and ten sweeps per site is not always enough
MAX_ITER_FACTOR = 100


def min_site(X: int) -> int:
    return (X & -X).bit_length() - 1


def max_site(X: int) -> int:
    return X.bit_length() - 1


class RandomSelector:
    """Seeded choice of a site per configuration; the same mask always gives the same site."""

    def __init__(self, seed: int):
        self.seed = seed

    def __call__(self, X: int) -> int:
        sites = ss.sites_of(X)
        return sites[int(np.random.default_rng([self.seed, X]).integers(len(sites)))]


@dataclass
class CorrelationTable:
    """Values on every subset of ``support``, indexed by compressed masks."""

    support: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (1 << ss.size(self.support),):
            raise ModelError("table size does not match its support")

    @property
    def sites(self) -> list[int]:
        return ss.sites_of(self.support)

    def index(self, X: int) -> int:
        if X & ~self.support:
            raise SupportTooSmall(f"{ss.sites_of(X)} is outside the support")
        return ss.compress(X, self.sites)

    def __getitem__(self, X: int) -> complex:
        return complex(self.values[self.index(X)])

    def masks(self) -> list[int]:
        sites = self.sites
        return [ss.spread(i, sites) for i in range(len(self.values))]

    @classmethod
    def from_function(cls, support: int, f: Callable[[int], complex]) -> CorrelationTable:
        sites = ss.sites_of(support)
        return cls(support, np.array([f(ss.spread(i, sites)) for i in range(1 << len(sites))],
                                     dtype=np.complex128))

    @classmethod
    def indicator_empty(cls, support: int) -> CorrelationTable:
        v = np.zeros(1 << ss.size(support), dtype=np.complex128)
        v[0] = 1
        return cls(support, v)

    def to_json(self, labels=None) -> dict:
        sites = self.sites
        lab = labels or [str(i) for i in range(max(sites, default=-1) + 1)]
        return {
            "support": [lab[s] for s in sites],
            "entries": [{"subset": [lab[s] for s in ss.sites_of(ss.spread(i, sites))],
                         "re": float(v.real), "im": float(v.imag)}
                        for i, v in enumerate(self.values)],
        }


def gamma_mobius(model: InteractionModel, s: int, N: int, B: int = 0) -> complex:
    """``sum over M ⊂ N of (-1)^|N∖M| κ(s | B ∪ M)``."""
    if ss.size(N) > 20:
        raise ModelError("shift set too large for the alternating sum")
    out = 0j
    nn = ss.size(N)
    for M in ss.subsets(N):
        term = kappa_conditional(model, 1 << s, B | M)
        out += -term if (nn - ss.size(M)) & 1 else term
    return out


def _cover_sum(factors: dict[int, complex], N: int) -> complex:
    """Sum over collections of the keyed sets whose union is ``N`` of the factor products."""
    dp = {0: 1.0 + 0j}
    for L, f in factors.items():
        for U, acc in list(dp.items()):
            V = U | L
            dp[V] = dp.get(V, 0j) + acc * f
    return dp.get(N, 0j)


def _mayer_factors(model, s, N, B, include_empty):
    out = {}
    for L in ss.subsets(N):
        if L == 0 and not include_empty:
            continue
        f = w_conditional(model, (1 << s) | L, B) - 1
        if f != 0:
            out[L] = f
    return out


def _check_cover_domain(model, s, N, B):
    if N & ((1 << s) | B):
        raise ModelError("shift set must avoid the root and the boundary")
    if ss.size(N) > 12:
        raise ModelError("shift set too large for the cover sum")


def gamma_cover(model: InteractionModel, s: int, N: int, B: int = 0) -> complex:
    """Sum over covers ``C`` of ``N`` by subsets ``L ⊂ N`` of the products of ``W({s} ∪ L | B) - 1``.

    Unions are accumulated over the subsets with a non-unit weight only;
    any collection using a unit weight contributes zero.
    """
    _check_cover_domain(model, s, N, B)
    return _cover_sum(_mayer_factors(model, s, N, B, True), N)


def gamma_hat(model: InteractionModel, s: int, N: int, B: int = 0) -> complex:
    """Cover sum restricted to non-empty members; ``gamma = κ(s | B) gamma_hat``."""
    _check_cover_domain(model, s, N, B)
    return _cover_sum(_mayer_factors(model, s, N, B, False), N)


def minimal_subcover(C: Iterable[int]) -> frozenset[int]:
    """Per covered site, the smallest member (canonical order) containing it."""
    members = sorted(set(C))
    union = 0
    for L in members:
        union |= L
    return frozenset(min(L for L in members if L >> n & 1) for n in ss.sites_of(union))


def gamma_alpha_bound(model: InteractionModel, params: CriterionParams, x: int, N: int) -> Bound:
    """``|gamma(x, N)| alpha^N`` against the cover sum of ``(criterion factor - 1)``."""
    bit = 1 << x
    if N & bit:
        raise ModelError("N must not contain x")
    lhs = abs(gamma_mobius(model, x, N)) * params.alpha_pow(N)
    factors = {}
    for X, w in model.entries_containing(x):
        L = X & ~bit
        if ss.is_subset(L, N):
            factors[L] = criterion_factor(w, L, params) - 1
    return Bound(lhs, _cover_sum(factors, N).real)


@dataclass(frozen=True)
class SumGammaCheck:
    total: float
    factored: float
    lhs: float
    rhs: float


def sum_gamma_alpha_bound_check(model: InteractionModel, params: CriterionParams, x: int,
                                volume: int) -> SumGammaCheck:
    """Weighted kernel sums over ``Λ`` and over ``Λ∖{x}`` against the criterion product.

    ``total`` sums over ``N ⊂ Λ``; ``factored`` is ``(1 + alpha(x) [x ∈ Λ])``
    times ``lhs``, the sum over ``N ⊂ Λ∖{x}``; ``rhs`` is the product of
    criterion factors over bonds ``X ∋ x`` with ``X∖{x} ⊂ Λ``.
    """
    bit = 1 << x
    total = sum(abs(gamma_mobius(model, x, N)) * params.alpha_pow(N) for N in ss.subsets(volume))
    rest = volume & ~bit
    lhs = sum(abs(gamma_mobius(model, x, N)) * params.alpha_pow(N) for N in ss.subsets(rest))
    factored = (1 + (params.alpha[x] if volume & bit else 0.0)) * lhs
    rhs = 1.0
    for X, w in model.entries_containing(x):
        if ss.is_subset(X & ~bit, volume):
            rhs *= criterion_factor(w, X & ~bit, params)
    return SumGammaCheck(total, factored, lhs, rhs)


def ks_operator(model: InteractionModel, volume: int, support: int,
                sel: Selector = min_site) -> sparse.csr_matrix:
    """``K_Λ`` as a sparse matrix over compressed subsets of ``support``."""
    if volume & ~support:
        raise SupportTooSmall("support must contain the volume")
    sites = ss.sites_of(support)
    size = 1 << len(sites)
    selector = np.zeros(size, dtype=np.int64)
    for i in range(1, size):
        X = ss.spread(i, sites)
        s = sel(X)
        if not X >> s & 1:
            raise ModelError(f"selector picked {s} outside {ss.sites_of(X)}")
        selector[i] = sites.index(s)
    emasks, evals = model.entry_arrays
    keep = (emasks & ~support) == 0
    indptr, indices, data = kernels.ks_operator(
        np.array(sites, dtype=np.int64), ss.compress(volume, sites), selector,
        model.z_array, emasks[keep], evals[keep])
    return sparse.csr_matrix((data, indices, indptr), shape=(size, size))


def ks_apply(model: InteractionModel, volume: int, rho: CorrelationTable,
             sel: Selector = min_site) -> CorrelationTable:
    K = ks_operator(model, volume, rho.support, sel)
    return CorrelationTable(rho.support, K @ rho.values)


def ks_tilde_apply(model: InteractionModel, volume: int, xi: CorrelationTable,
                   sel: Selector = min_site) -> CorrelationTable:
    """The majorising operator: absolute kernel values applied to ``xi``."""
    K = ks_operator(model, volume, xi.support, sel)
    K.data = np.abs(K.data).astype(np.complex128)
    return CorrelationTable(xi.support, K @ xi.values)


def ansatz_xi(params: CriterionParams, volume: int, X: int) -> float:
    out = 1.0
    for x in ss.sites_of(X):
        out *= params.alpha[x] if volume >> x & 1 else params.r[x]
    return out


def ansatz_table(params: CriterionParams, volume: int, support: int) -> CorrelationTable:
    return CorrelationTable.from_function(support, lambda X: ansatz_xi(params, volume, X))


@dataclass
class PicardResult:
    table: CorrelationTable
    iterations: int
    residual: float
    residuals: list[float]

    def __getitem__(self, X: int) -> complex:
        return self.table[X]


def picard_solve(model: InteractionModel, volume: int, support: int | None = None,
                 sel: Selector = min_site, tol: float = 1e-12, max_iter: int | None = None,
                 callback: Callable[[int, CorrelationTable], None] | None = None) -> PicardResult:
    """Iterate ``rho_{n+1} = K_Λ rho_n`` from the indicator of the empty set.

    Stops once the sup-norm change drops below ``tol``. ``callback(n, rho_n)``
    sees every iterate, starting with ``rho_0``.
    """
    if not tol > 0:
        raise ModelError("tol must be positive")
    if support is None:
        support = model.lattice
    if max_iter is None:
        max_iter = MAX_ITER_FACTOR * (ss.size(support) + 1)
    K = ks_operator(model, volume, support, sel)
    rho = CorrelationTable.indicator_empty(support).values
    if callback is not None:
        callback(0, CorrelationTable(support, rho))
    residuals = []
    for n in range(1, max_iter + 1):
        nxt = K @ rho
        change = float(np.max(np.abs(nxt - rho)))
        residuals.append(change)
        rho = nxt
        if callback is not None:
            callback(n, CorrelationTable(support, rho))
        if not math.isfinite(change):
            break
        if change < tol:
            final = float(np.max(np.abs(K @ rho - rho)))
            return PicardResult(CorrelationTable(support, rho), n, final, residuals)
    raise NoConvergence(f"no convergence after {max_iter} sweeps "
                        f"(last change {residuals[-1] if residuals else float('nan')})", residuals)


def mu_recover(rho: CorrelationTable, volume: int) -> CorrelationTable:
    """``mu(X) = sum over Y ⊂ Λ∖X of (-1)^|Y| rho(X ∪ Y)``."""
    if volume & ~rho.support:
        raise SupportTooSmall("support must contain the volume")
    bits = ss.compress(volume, rho.sites)
    return CorrelationTable(rho.support, kernels.superset_mobius(rho.values, bits))
