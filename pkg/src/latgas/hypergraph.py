"""Hard-core specialisation: hypergraph independence polynomials.

An edge ``e`` forbids configurations containing it (``W(e) = 0``). Besides
direct enumeration this module provides edge contraction, the interpolated
edge sets used by the hard-core recursion, degree-based criteria, and a
seeded Monte Carlo scan of activity polydiscs.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from latgas import sitesets as ss
from latgas.criteria import CriterionReport, SiteCheck
from latgas.errors import DegreeExceeded, EdgeNotIncident, ModelError, VanishingDenominator
from latgas.model import InteractionModel

STRICT_SHRINK = 0.999
DENOM_EPS = 1e-14


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: frozenset[int]
    annihilated: bool = False
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        edges = frozenset(int(e) for e in self.edges)
        if 0 in edges:
            raise ModelError("empty edge")
        if any(e & ~ss.full(self.n) for e in edges):
            raise ModelError("edge leaves the lattice")
        object.__setattr__(self, "edges", edges)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))

    @classmethod
    def from_lists(cls, n: int, edges, labels=()) -> Hypergraph:
        return cls(n, frozenset(ss.mask_of(e) for e in edges), labels=tuple(labels))

    def incident(self, x: int) -> list[int]:
        """Edges containing ``x`` in canonical order."""
        return sorted(e for e in self.edges if e >> x & 1)

    def degree(self, x: int) -> int:
        return sum(1 for e in self.edges if e >> x & 1)

    def forbidden(self, x: int) -> bool:
        return (1 << x) in self.edges

    def _replace(self, edges, annihilated=None) -> Hypergraph:
        return Hypergraph(self.n, frozenset(edges),
                          self.annihilated if annihilated is None else annihilated, self.labels)


def to_interaction(h: Hypergraph, z) -> InteractionModel:
    return InteractionModel(h.n, tuple(z), {e: 0j for e in h.edges}, labels=h.labels)


def independent_mask(h: Hypergraph, sites: list[int]) -> np.ndarray:
    """Boolean array over compressed subsets of ``sites``: no edge inside."""
    k = len(sites)
    idx = np.arange(1 << k, dtype=np.int64)
    S = np.zeros(1 << k, dtype=np.int64)
    for j, p in enumerate(sites):
        S |= ((idx >> j) & 1) << p
    ok = np.ones(1 << k, dtype=bool)
    for e in h.edges:
        ok &= (S & e) != e
    return ok


def independence_polynomial(h: Hypergraph, z, volume: int) -> complex:
    """Sum of ``z^X`` over independent ``X ⊂ Λ``."""
    sites = ss.sites_of(volume)
    mono = _monomials(np.asarray(z, dtype=np.complex128)[sites][None, :])[0]
    return complex(np.sum(mono[independent_mask(h, sites)]))


def _monomials(zs: np.ndarray) -> np.ndarray:
    """Row-wise ``z^S`` for every compressed subset ``S`` of the columns."""
    rows, k = zs.shape
    out = np.ones((rows, 1 << k), dtype=np.complex128)
    for j in range(k):
        half = 1 << j
        out[:, half:2 * half] = out[:, :half] * zs[:, j:j + 1]
    return out


def contract(h: Hypergraph, B: int) -> Hypergraph:
    """Edges ``e∖B`` plus singletons of ``B``; edges swallowed by ``B`` set ``annihilated``."""
    edges = set()
    annihilated = h.annihilated
    for e in h.edges:
        rest = e & ~B
        if rest:
            edges.add(rest)
        else:
            annihilated = True
    edges.update(1 << b for b in ss.sites_of(B))
    return h._replace(edges, annihilated)


def interpolate_edge(h: Hypergraph, x: int, e: int) -> Hypergraph:
    """Keep ``e`` at ``x``, shrink earlier incident edges to ``b∖{x}``, drop later ones."""
    if e not in h.edges or not e >> x & 1:
        raise EdgeNotIncident(f"{ss.sites_of(e)} is not an edge at site {x}")
    bit = 1 << x
    edges = {b for b in h.edges if not b & bit}
    edges.add(e)
    edges.update(b & ~bit for b in h.edges if b & bit and b < e and b != bit)
    return h._replace(edges)


def galvin_radius(Delta: float, deg: int) -> float:
    return Delta ** deg / (Delta + 1) ** (deg + 1)


def bencs_buys_radius(Delta: float, deg: int) -> tuple[float, bool]:
    """Activity bound and whether it is strict."""
    if deg == 0:
        return 1.0, True
    if deg == 1:
        return 1.0 / Delta, True
    return (Delta - 1) ** (deg - 1) / Delta ** deg, False


def galvin_check(h: Hypergraph, z, Delta: float) -> CriterionReport:
    if Delta < 1:
        raise ModelError("Delta must be at least 1")
    checks = []
    for x in range(h.n):
        if h.forbidden(x):
            checks.append(SiteCheck(x, 0.0, math.inf, True))
            continue
        d = h.degree(x)
        bound = galvin_radius(Delta, d)
        lhs = abs(z[x])
        checks.append(SiteCheck(x, lhs, bound, d <= Delta and lhs <= bound))
    return CriterionReport("galvin", tuple(checks), labels=h.labels)


def bencs_buys_check(h: Hypergraph, z, Delta: float) -> CriterionReport:
    if Delta < 2:
        raise ModelError("Delta must be at least 2")
    checks = []
    for x in range(h.n):
        if h.forbidden(x):
            checks.append(SiteCheck(x, 0.0, math.inf, True))
            continue
        d = h.degree(x)
        bound, strict = bencs_buys_radius(Delta, d)
        lhs = abs(z[x])
        ok = lhs < bound if strict else lhs <= bound
        checks.append(SiteCheck(x, lhs, bound, d <= Delta and ok))
    return CriterionReport("bencs_buys", tuple(checks), labels=h.labels)


@dataclass
class HardCoreTrace:
    root: int
    volume: int
    value: complex
    hypergraph: Hypergraph


def hard_core_recursive_zhat(h: Hypergraph, z, x: int, volume: int,
                             trace: list[HardCoreTrace] | None = None) -> complex:
    """Effective activity of ``x`` over ``Λ`` via the hard-core recursion."""
    if volume >> x & 1:
        raise ModelError(f"site {x} lies inside the volume")
    return _hc(h, tuple(complex(v) for v in z), x, volume, trace)


def _hc(h, z, x, volume, trace):
    bit = 1 << x
    if z[x] == 0 or h.forbidden(x):
        value = 0j
    else:
        value = z[x]
        for e in h.incident(x):
            prime = e & ~bit
            if not ss.is_subset(prime, volume):
                continue
            he = interpolate_edge(h, x, e)
            inner = 1.0 + 0j
            for xp in ss.sites_of(prime):
                before = ss.preceding(prime, xp)
                zh = _hc(contract(he, before), z, xp, volume & ~(before | 1 << xp), trace)
                if abs(1 + zh) <= DENOM_EPS:
                    raise VanishingDenominator(f"1 + ẑ vanishes at site {xp}")
                inner *= zh / (1 + zh)
            value *= 1 - inner
    if trace is not None:
        trace.append(HardCoreTrace(x, volume, value, h))
    return value


@dataclass(frozen=True)
class ScanReport:
    rule: str
    Delta: float
    samples: int
    seed: int
    min_abs_Z: float
    argmin_activity: tuple[complex, ...]
    lower_bound: float | None
    radii: tuple[float, ...]
    labels: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        if not self.min_abs_Z > 0:
            return False
        return self.lower_bound is None or self.min_abs_Z >= self.lower_bound - 1e-9

    def to_json(self) -> dict:
        lab = self.labels or tuple(str(i) for i in range(len(self.argmin_activity)))
        return {
            "rule": self.rule,
            "Delta": self.Delta,
            "samples": self.samples,
            "min_abs_Z": self.min_abs_Z,
            "argmin_activity": {lab[i]: {"re": a.real, "im": a.imag}
                                for i, a in enumerate(self.argmin_activity)},
            "seed": self.seed,
            "lower_bound": self.lower_bound,
            "ok": self.ok,
        }


def scan_radii(h: Hypergraph, rule: str, Delta: float, uniform: bool = False) -> list[float]:
    """Per-site sampling radii; strict bounds are shrunk by ``STRICT_SHRINK``."""
    radii = []
    for x in range(h.n):
        d = Delta if uniform else h.degree(x)
        if rule == "galvin":
            radii.append(galvin_radius(Delta, d))
        elif rule == "bencs_buys":
            bound, strict = bencs_buys_radius(Delta, d)
            radii.append(bound * STRICT_SHRINK if strict else bound)
        else:
            raise ModelError(f"unknown rule {rule!r}")
    return radii


def _sample_block(radii, seed, start, stop):
    out = np.empty((stop - start, len(radii)), dtype=np.complex128)
    for i in range(start, stop):
        g = np.random.default_rng([seed, i])
        u, v = g.random(len(radii)), g.random(len(radii))
        out[i - start] = np.asarray(radii) * np.sqrt(u) * np.exp(2j * np.pi * v)
    return out


def polydisc_scan(h: Hypergraph, rule: str, Delta: float, samples: int, seed: int,
                  uniform: bool = False, workers: int = 1, block: int = 1024) -> ScanReport:
    """Minimum ``|Z|`` over the full lattice for activities drawn uniformly in per-site discs.

    Sample ``i`` uses the stream ``default_rng([seed, i])``, so the report does
    not depend on ``workers`` or ``block``. With ``uniform=True`` every site
    gets the radius of a degree-``Delta`` site.
    """
    if rule == "bencs_buys" and Delta < 2:
        raise ModelError("bencs_buys needs Delta >= 2")
    if rule == "galvin" and Delta < 1:
        raise ModelError("galvin needs Delta >= 1")
    for x in range(h.n):
        if not h.forbidden(x) and h.degree(x) > Delta:
            raise DegreeExceeded(f"site {x} has degree {h.degree(x)} > {Delta}")
    radii = scan_radii(h, rule, Delta, uniform)
    sites = list(range(h.n))
    indep = independent_mask(h, sites)

    def run(start):
        stop = min(start + block, samples)
        zs = _sample_block(radii, seed, start, stop)
        Zs = _monomials(zs)[:, indep].sum(axis=1)
        j = int(np.argmin(np.abs(Zs)))
        return float(abs(Zs[j])), start + j, zs[j]

    starts = range(0, samples, block)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]
    best = min(results, key=lambda t: (t[0], t[1]))
    lower = (Delta / (Delta + 1)) ** h.n if rule == "galvin" else None
    return ScanReport(rule, Delta, samples, seed, best[0], tuple(complex(a) for a in best[2]),
                      lower, tuple(radii), h.labels)
