"""The compiled kernels and the numpy fallback must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from _gen import random_model
from hypothesis import given
from hypothesis import strategies as st

from latgas import _pykernels as py
from latgas import sitesets as ss

c = pytest.importorskip("latgas._ckernels")
seeds = st.integers(0, 2**32 - 1)


def _args(rng):
    n = int(rng.integers(1, 8))
    m = random_model(rng, n, int(rng.integers(0, 7)))
    emasks, evals = m.entry_arrays
    return m, n, emasks, evals


@given(seeds)
def test_config_weights(seed):
    rng = np.random.default_rng(seed)
    m, n, emasks, evals = _args(rng)
    free = int(rng.integers(0, 1 << n))
    base = int(rng.integers(0, 1 << n)) & ~free
    boundary = int(rng.integers(0, 1 << n))
    sites = np.array(ss.sites_of(free), dtype=np.int64)
    a = py.config_weights(sites, base, boundary, m.z_array, emasks, evals)
    b = c.config_weights(sites, base, boundary, m.z_array, emasks, evals)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


@given(seeds)
def test_transforms(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, 9))
    a = rng.normal(size=1 << k) + 1j * rng.normal(size=1 << k)
    bits = int(rng.integers(0, 1 << k)) if k else 0
    assert np.allclose(py.subset_zeta(a), c.subset_zeta(a))
    assert np.allclose(py.subset_mobius(a), c.subset_mobius(a))
    assert np.allclose(py.superset_mobius(a, bits), c.superset_mobius(a, bits))
    assert np.allclose(c.subset_mobius(c.subset_zeta(a)), a)


@given(seeds)
def test_ks_operator(seed):
    rng = np.random.default_rng(seed)
    m, n, emasks, evals = _args(rng)
    sites = np.arange(n, dtype=np.int64)
    size = 1 << n
    selector = np.zeros(size, dtype=np.int64)
    for i in range(1, size):
        selector[i] = int(rng.choice(ss.sites_of(i)))
    lam = int(rng.integers(0, size))
    ip, ii, idat = py.ks_operator(sites, lam, selector, m.z_array, emasks, evals)
    cp, ci, cdat = c.ks_operator(sites, lam, selector, m.z_array, emasks, evals)
    assert np.array_equal(ip, cp) and np.array_equal(ii, ci)
    assert np.allclose(idat, cdat, rtol=1e-13, atol=1e-15)


def test_env_forces_fallback():
    env = dict(os.environ, LATGAS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import latgas; print(latgas.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
