"""Random model generators shared by the test modules."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from latgas import criteria
from latgas import sitesets as ss
from latgas.hypergraph import Hypergraph
from latgas.model import CriterionParams, InteractionModel


def random_entries(rng, n, m, max_size=4, spread=0.4, allow_zero=True):
    ent = {}
    attempts = 0
    while len(ent) < m and attempts < 200:
        attempts += 1
        k = int(rng.integers(1, min(max_size, n) + 1))
        X = ss.mask_of(rng.choice(n, k, replace=False).tolist())
        if allow_zero and rng.random() < 0.15:
            w = 0j
        else:
            w = complex(rng.normal(1, spread), rng.normal(0, spread))
        if w != 1:
            ent[X] = w
    return ent


def random_model(rng, n, m, zscale=0.5, **kw):
    z = zscale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return InteractionModel(n, tuple(z), random_entries(rng, n, m, **kw))


def criterion_model(rng, n, m, r_max=0.6, fill=(0.5, 1.0), **kw):
    """Model satisfying the Dobrushin check for random ``r``; activities sit at a
    random fraction of the largest allowed modulus with random phases."""
    r = rng.uniform(0.01, r_max, n)
    params = CriterionParams.from_r(r)
    base = InteractionModel(n, (1.0,) * n, random_entries(rng, n, m, **kw))
    prods = np.array([criteria.dobrushin_product(base, params, x) for x in range(n)])
    lim = np.where(prods > 0, r / np.where(prods > 0, prods, 1), 1.0)
    z = lim * rng.uniform(*fill, n) * np.exp(2j * np.pi * rng.random(n))
    model = base.with_activity(z)
    assert criteria.dobrushin(model, params).overall
    return model, params


def potential_model(rng, n, m, zscale=0.3, vscale=1.0):
    pot = {}
    m = min(m, sum(math.comb(n, k) for k in range(1, min(3, n) + 1)))
    while len(pot) < m:
        k = int(rng.integers(1, min(3, n) + 1))
        X = ss.mask_of(rng.choice(n, k, replace=False).tolist())
        pot[X] = complex(rng.exponential(vscale), rng.normal(0, 0.3 * vscale))
    z = zscale * rng.random(n) * np.exp(2j * np.pi * rng.random(n))
    return InteractionModel.from_potential(n, z, pot)


def random_hypergraph(rng, n, Delta, sizes=(2, 4), tries=400):
    """Edges of mixed sizes, added while every degree stays ``<= Delta``."""
    deg = np.zeros(n, dtype=int)
    edges = set()
    for _ in range(tries):
        k = int(rng.integers(sizes[0], min(sizes[1], n) + 1))
        e = rng.choice(n, k, replace=False)
        if np.all(deg[e] < Delta):
            m = ss.mask_of(e.tolist())
            if m not in edges:
                edges.add(m)
                deg[e] += 1
    return Hypergraph(n, frozenset(edges))


# hypothesis strategies

complexes = st.builds(complex, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))


@st.composite
def models(draw, max_sites=5, max_entries=5, zmax=2.0):
    n = draw(st.integers(1, max_sites))
    z = draw(st.lists(st.builds(complex, st.floats(-zmax, zmax), st.floats(-zmax, zmax)),
                      min_size=n, max_size=n))
    keys = draw(st.lists(st.integers(1, (1 << n) - 1), max_size=max_entries, unique=True))
    vals = draw(st.lists(st.one_of(st.just(0j), complexes), min_size=len(keys),
                         max_size=len(keys)))
    return InteractionModel(n, tuple(z), {k: v for k, v in zip(keys, vals) if v != 1})


def masks(n):
    return st.integers(0, (1 << n) - 1)
