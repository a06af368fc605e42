"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
Each check uses a fixed seed and also enforces its runtime budget.
"""

from __future__ import annotations

import math
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from _gen import (criterion_model, potential_model, random_entries,  # noqa: E402
                  random_hypergraph, random_model)

from latgas import criteria, exact, hypergraph, ks, recursion  # noqa: E402
from latgas import sitesets as ss  # noqa: E402
from latgas.errors import VanishingDenominator  # noqa: E402
from latgas.model import (CriterionParams, InteractionModel, conditioned,  # noqa: E402
                          kappa_conditional, monomial)

pytestmark = pytest.mark.acceptance


# pytest's capture swallows stdout, so conftest replays these in the summary
LINES: list[str] = []


def _line(k: int, ok: bool, detail: str, elapsed: float, budget: float) -> bool:
    within = elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    text = f"ACCEPTANCE {k}: {status}  {detail}  [{elapsed:.1f}s / {budget:.0f}s]"
    LINES.append(text)
    sys.__stdout__.write(text + "\n")
    sys.__stdout__.flush()
    return ok and within


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# 1. theorem bounds

def _bounds_one(model, params):
    worst_lo = worst_hi = worst_z = -math.inf
    sites, table = exact.partition_table(model)
    r = np.array(params.r)
    for i, Zl in enumerate(table):
        L = ss.spread(i, sites)
        idx = ss.sites_of(L)
        lo, hi = np.prod(1 - r[idx]), np.prod(1 + r[idx])
        worst_lo = max(worst_lo, lo * (1 - 1e-10) - abs(Zl))
        worst_hi = max(worst_hi, abs(Zl) - hi * (1 + 1e-10))
    for x in range(model.n):
        # Z(x, Λ) for every Λ ⊂ lattice∖{x}, divided by Z(Λ) from the full table
        free, num = exact.partition_table(model, pinned=1 << x)
        for i, zx in enumerate(num):
            zl = table[ss.compress(ss.spread(i, free), sites)]
            worst_z = max(worst_z, abs(zx / zl) - params.r[x] - 1e-12)
    return worst_lo, worst_hi, worst_z


def check_theorem_bounds():
    rng = np.random.default_rng(101)
    kept = 0
    worst = [-math.inf] * 3
    for _ in range(500):
        n = int(rng.integers(5, 9))
        model, params = criterion_model(rng, n, int(rng.integers(1, 7)), fill=(0.0, 1.0))
        if not criteria.dobrushin(model, params).overall:
            continue
        kept += 1
        worst = [max(a, b) for a, b in zip(worst, _bounds_one(model, params))]
    ok = kept > 0 and all(w <= 0 for w in worst)
    return ok, (f"{kept} models; max violation lower {worst[0]:.2e}, upper {worst[1]:.2e}, "
                f"|ẑ|-r {worst[2]:.2e}")


# 2. identities

def _rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def check_identities():
    rng = np.random.default_rng(202)
    worst = 0.0
    used = skipped = 0
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        m = random_model(rng, n, int(rng.integers(1, 7)), zscale=0.6)
        B = int(rng.integers(0, 1 << n))
        L = int(rng.integers(0, 1 << n)) & ~B
        X = int(rng.integers(0, 1 << n)) & ~B
        devs = []
        # Z({x} ∪ Λ | B) = Z(Λ | B) + Z(x, Λ | B)
        for x in ss.sites_of(m.lattice & ~(L | B)):
            devs.append(_rel(exact.Z(m, L | 1 << x, B),
                             exact.Z(m, L, B) + exact.Z(m, L, B, pinned=1 << x)))
        # generalised: Λ1 = X∖Λ, Λ2 = Λ
        L1 = X & ~L
        devs.append(_rel(exact.Z(m, L1 | L, B),
                         sum(exact.Z(m, L, B, pinned=Y) for Y in ss.subsets(L1))))
        # pinned/boundary conversion
        devs.append(_rel(exact.Z(m, L, B, pinned=X),
                         monomial(m, X) * kappa_conditional(m, X, B) * exact.Z(m, L & ~X, X | B)))
        # conditional multiplicativity
        Y = L & ~X
        devs.append(_rel(kappa_conditional(m, X | Y, B),
                         kappa_conditional(m, X, Y | B) * kappa_conditional(m, Y, B)))
        try:
            free = ss.sites_of(m.lattice & ~(L | B))
            if free:
                x = free[int(rng.integers(len(free)))]
                zh = exact.effective_activity(m, x, L, B)
                if abs(1 + zh) < 1e-6:
                    raise VanishingDenominator("1 + ẑ")
                devs.append(_rel(exact.correlation(m, 1 << x, L | 1 << x, B), zh / (1 + zh)))
            tele = 1
            for y in ss.sites_of(X):
                tele *= exact.correlation(m, 1 << y, L, ss.preceding(X, y))
            devs.append(_rel(exact.correlation(m, X, L), tele))
        except VanishingDenominator:
            skipped += 1
        used += 1
        worst = max(worst, max(devs))
    return worst <= 1e-11, (f"{used} tuples ({skipped} with an undefined ratio); "
                            f"max relative deviation {worst:.2e}")


# 3. three-way ẑ agreement

def check_three_way():
    rng = np.random.default_rng(303)
    worst = 0.0
    count = 0
    for _ in range(200):
        n = int(rng.integers(2, 8))
        m, _ = criterion_model(rng, n, int(rng.integers(1, 7)), fill=(0.0, 1.0))
        vol = int(rng.integers(0, 1 << n))
        if vol == m.lattice:
            vol &= ~1
        res = ks.picard_solve(m, vol)
        for x in ss.sites_of(m.lattice & ~vol):
            a = exact.effective_activity(m, x, vol)
            b = recursion.recursive_effective_activity(m, x, vol)
            c = res[1 << x]
            worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
            count += 1
    return worst < 1e-9, f"200 models, {count} sites; max pairwise deviation {worst:.2e}"


# 4. kernel suite

def check_kernels():
    rng = np.random.default_rng(404)
    dev_cover = dev_mobius = 0.0
    slack = math.inf
    for _ in range(500):
        n = int(rng.integers(3, 7))
        m = random_model(rng, n, int(rng.integers(1, 7)))
        p = CriterionParams.from_r(rng.uniform(0, 0.6, n))
        x = int(rng.integers(n))
        rest = [s for s in range(n) if s != x]
        B = ss.mask_of([s for s in rest if rng.random() < 0.3])
        pool = [s for s in rest if not B >> s & 1]
        k = int(rng.integers(0, min(4, len(pool)) + 1))
        N = ss.mask_of(rng.choice(pool, k, replace=False).tolist()) if k else 0
        dev_cover = max(dev_cover, abs(ks.gamma_mobius(m, x, N, B) - ks.gamma_cover(m, x, N, B)))
        total = sum(ks.gamma_mobius(m, x, M, B) for M in ss.subsets(N))
        dev_mobius = max(dev_mobius, abs(total - kappa_conditional(m, 1 << x, B | N)))
        b = ks.gamma_alpha_bound(m, p, x, N)
        slack = min(slack, b.rhs - b.lhs)
        chk = ks.sum_gamma_alpha_bound_check(m, p, x, N | (1 << x if rng.random() < 0.5 else 0))
        slack = min(slack, chk.rhs - chk.lhs)
    ok = dev_cover <= 1e-12 and dev_mobius <= 1e-12 and slack >= -1e-12
    return ok, (f"500 (x,N,B); mobius-vs-cover {dev_cover:.2e}, Möbius consistency "
                f"{dev_mobius:.2e}, min bound slack {slack:.2e}")


# 5. KS solver contract

def check_ks_solver():
    rng = np.random.default_rng(505)
    sel_dev = mu_dev = 0.0
    empty_ok = True
    dom_excess = -math.inf
    for i in range(100):
        n = int(rng.integers(2, 8))
        m, p = criterion_model(rng, n, int(rng.integers(1, 7)), fill=(0.0, 1.0))
        vol = int(rng.integers(0, 1 << n))
        xi = np.abs(ks.ansatz_table(p, vol, m.lattice).values)
        state = {"empty": True, "excess": -math.inf}

        def watch(k, rho, xi=xi, state=state):
            state["empty"] &= rho.values[0] == 1
            state["excess"] = max(state["excess"],
                                  float(np.max(np.abs(rho.values) - xi * (1 + 1e-12))))

        base = ks.picard_solve(m, vol, callback=watch)
        for sel in (ks.max_site, ks.RandomSelector(i)):
            other = ks.picard_solve(m, vol, sel=sel)
            sel_dev = max(sel_dev, float(np.max(np.abs(other.table.values - base.table.values))))
        empty_ok &= state["empty"]
        dom_excess = max(dom_excess, state["excess"])
        mu = ks.mu_recover(base.table, vol)
        w = exact._weights(m, m.lattice, 0, 0)
        mu_dev = max(mu_dev, float(np.max(np.abs(mu.values / mu.values[0] - w))))
    ok = sel_dev <= 1e-12 and empty_ok and dom_excess <= 0 and mu_dev < 1e-9
    return ok, (f"100 models; selector divergence {sel_dev:.2e}, ρ_n(∅)=1 {empty_ok}, "
                f"max |ρ_n|-ξ {dom_excess:.2e}, μ residual {mu_dev:.2e}")


# 6. hypergraph radii

def check_radii():
    rng = np.random.default_rng(606)
    galvin_gap = math.inf
    bb_min = math.inf
    graphs = 0
    for Delta in (2, 3):
        for _ in range(8):
            n = int(rng.integers(4, 11))
            h = random_hypergraph(rng, n, Delta, sizes=(2, 4))
            graphs += 1
            seed = int(rng.integers(2**31))
            g = hypergraph.polydisc_scan(h, "galvin", Delta, 10_000, seed, uniform=True)
            galvin_gap = min(galvin_gap, g.min_abs_Z - ((Delta / (Delta + 1)) ** n - 1e-9))
            b = hypergraph.polydisc_scan(h, "bencs_buys", Delta, 10_000, seed, uniform=True)
            bb_min = min(bb_min, b.min_abs_Z)
    ok = galvin_gap >= 0 and bb_min > 0
    return ok, (f"{graphs} hypergraphs x 1e4 samples; min |Z| - Galvin bound {galvin_gap:.3e}, "
                f"Bencs-Buys min |Z| {bb_min:.3e}")


# 7. criterion implications

def check_implications():
    rng = np.random.default_rng(707)
    kp_hits = gms_hits = 0
    broken = 0
    for _ in range(300):
        n = int(rng.integers(2, 9))
        m = potential_model(rng, n, int(rng.integers(1, 7)),
                            zscale=float(rng.choice([0.02, 0.1, 0.3])),
                            vscale=float(rng.choice([0.05, 0.5, 2.0])))
        kp = criteria.kp_auto(m)
        if kp.overall:
            kp_hits += 1
            broken += not criteria.dobrushin(m, kp.params).overall
        if criteria.gms(m).overall:
            gms_hits += 1
            broken += not criteria.dobrushin(m, CriterionParams.constant_alpha(n, 1.0)).overall
    ok = broken == 0 and kp_hits > 0 and gms_hits > 0
    return ok, (f"300 models; kp_auto satisfied {kp_hits}, gms satisfied {gms_hits}, "
                f"implication failures {broken}")


# 8. stability inequalities

def check_stability():
    rng = np.random.default_rng(808)
    slack = math.inf
    root_literal = 0
    for _ in range(500):
        n = int(rng.integers(2, 7))
        m = InteractionModel(n, (0.1,) * n, random_entries(rng, n, int(rng.integers(1, 7))))
        p = CriterionParams.from_r(rng.uniform(0, 0.6, n))
        x = int(rng.integers(n))
        B = int(rng.integers(0, 1 << n)) & ~(1 << x)
        mb = conditioned(m, B)
        for Y, _ in mb.entries_containing(x):
            b = recursion.stability_lhs_rhs(m, p, x, B, Y)
            slack = min(slack, b.rhs - b.lhs)
        for Bc in (B, B | 1 << x):
            b = recursion.conditional_stability_product(m, p, x, Bc)
            slack = min(slack, b.rhs - b.lhs)
        bonds = [X for X, _ in m.entries_containing(x)]
        if not bonds:
            continue
        X = bonds[int(rng.integers(len(bonds)))]
        for y in range(n):
            b = recursion.interpolation_stability(m, p, x, X, y)
            if y != x:
                slack = min(slack, b.rhs - b.lhs)
                continue
            # at the root W_X drops the singleton {x}; compare with max{|W({x})|, 1}
            if not b.holds(1e-12):
                root_literal += 1
            wx = abs(m.w(1 << x))
            if X != 1 << x and wx < 1:
                if wx > 0:
                    slack = min(slack, b.rhs / wx - b.lhs)
            else:
                slack = min(slack, b.rhs - b.lhs)
    return slack >= -1e-12, (f"500 (x,B,bond); min slack {slack:.2e}; literal root-site "
                             f"violations (|W(x)|<1) {root_literal}")


CHECKS = [
    (1, check_theorem_bounds, 60),
    (2, check_identities, 30),
    (3, check_three_way, 120),
    (4, check_kernels, 30),
    (5, check_ks_solver, 60),
    (6, check_radii, 300),
    (7, check_implications, 30),
    (8, check_stability, 30),
]


@pytest.mark.parametrize("k,fn,budget", CHECKS, ids=[f"criterion_{k}" for k, _, _ in CHECKS])
def test_acceptance(k, fn, budget):
    (ok, detail), elapsed = _timed(fn)
    assert _line(k, ok, detail, elapsed, budget), detail


if __name__ == "__main__":
    results = []
    for k, fn, budget in CHECKS:
        (ok, detail), elapsed = _timed(fn)
        results.append(_line(k, ok, detail, elapsed, budget))
    sys.exit(0 if all(results) else 1)
