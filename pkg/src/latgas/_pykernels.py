"""Pure numpy implementations of the enumeration kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is unavailable or ``LATGAS_PURE_PYTHON=1``.
"""

import numpy as np


def _spread_all(k, positions, base):
    idx = np.arange(1 << k, dtype=np.int64)
    S = np.full(1 << k, base, dtype=np.int64)
    for j, p in enumerate(positions):
        S |= ((idx >> j) & 1) << int(p)
    return S


def config_weights(free_sites, base, boundary, z, emasks, evals):
    """``z^S kappa(S | boundary)`` for ``S = base ∪ Y``, ``Y`` over subsets of ``free_sites``.

    Entry ``j`` of the result corresponds to ``Y`` whose bit ``i`` is set iff
    bit ``i`` of ``j`` is set, with bits mapped through ``free_sites``.
    Configurations meeting the boundary get weight 0.
    """
    free_sites = np.asarray(free_sites, dtype=np.int64)
    k = len(free_sites)
    S = _spread_all(k, free_sites, base)
    w = np.ones(1 << k, dtype=np.complex128)
    occupied = base
    for p in free_sites:
        occupied |= 1 << int(p)
    for site in range(len(z)):
        if occupied >> site & 1:
            w = np.where((S >> site) & 1, w * z[site], w)
    closure = S | boundary
    for E, val in zip(np.asarray(emasks, dtype=np.int64), evals):
        hit = ((E & ~closure) == 0) & ((E & S) != 0)
        w = np.where(hit, w * val, w)
    w[(S & boundary) != 0] = 0
    return w


def subset_zeta(a):
    """``out[X] = sum of a[Y]`` over subsets ``Y`` of ``X``."""
    out = np.array(a, dtype=np.complex128)
    k = out.size.bit_length() - 1
    for i in range(k):
        v = out.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return out


def subset_mobius(a):
    """Inverse of :func:`subset_zeta` (alternating subset sum)."""
    out = np.array(a, dtype=np.complex128)
    k = out.size.bit_length() - 1
    for i in range(k):
        v = out.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return out


def superset_mobius(a, bits):
    """``out[X] = sum over Y ⊂ bits∖X of (-1)^|Y| a[X ∪ Y]``."""
    out = np.array(a, dtype=np.complex128)
    k = out.size.bit_length() - 1
    for i in range(k):
        if bits >> i & 1:
            v = out.reshape(-1, 2, 1 << i)
            v[:, 0, :] -= v[:, 1, :]
    return out


def ks_operator(u_sites, lam, selector, z, emasks, evals):
    """CSR arrays of the Kirkwood-Salsburg operator on subsets of ``u_sites``.

    Indices are compressed masks over ``u_sites``; ``lam`` is the compressed
    volume and ``selector[X]`` the compressed position of the selected site.
    Row 0 maps to itself with weight 1; row ``X`` holds
    ``z(s) gamma(s, N | X∖s)`` at column ``(X∖s) ∪ N`` for ``N ⊂ lam∖(X∖s)``.
    """
    u_sites = np.asarray(u_sites, dtype=np.int64)
    u = len(u_sites)
    full_of = _spread_all(u, u_sites, 0)
    emasks = np.asarray(emasks, dtype=np.int64)
    evals = np.asarray(evals, dtype=np.complex128)
    size = 1 << u
    counts = np.empty(size, dtype=np.int64)
    counts[0] = 1
    rows_idx, rows_val = [np.array([0], dtype=np.int64)], [np.array([1.0 + 0j])]
    for X in range(1, size):
        s = int(selector[X])
        T = X & ~(1 << s)
        free = lam & ~T
        pos = [i for i in range(u) if free >> i & 1]
        k = len(pos)
        M = _spread_all(k, pos, 0)
        cols = T | M
        s_full = int(u_sites[s])
        sbit = 1 << s_full
        closure = full_of[cols] | sbit
        kap = np.ones(1 << k, dtype=np.complex128)
        for E, val in zip(emasks, evals):
            if E & sbit:
                kap = np.where((E & ~closure) == 0, kap * val, kap)
        kap[(M >> s) & 1 == 1] = 0
        gam = subset_mobius(kap) * z[s_full]
        rows_idx.append(cols)
        rows_val.append(gam)
        counts[X] = 1 << k
    indptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, np.concatenate(rows_idx), np.concatenate(rows_val)
