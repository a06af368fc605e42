"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sites 14] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from latgas import _pykernels
from latgas import sitesets as ss
from latgas.model import InteractionModel

try:
    from latgas import _ckernels
except ImportError:
    _ckernels = None


def random_model(n, m, seed=0):
    rng = np.random.default_rng(seed)
    entries = {}
    while len(entries) < m:
        k = int(rng.integers(1, 4))
        X = ss.mask_of(rng.choice(n, k, replace=False).tolist())
        entries[X] = complex(rng.normal(1, 0.3), rng.normal(0, 0.3))
    z = 0.1 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return InteractionModel(n, tuple(z), entries)


def cases(n, ks_sites):
    m = random_model(n, 3 * n)
    emasks, evals = m.entry_arrays
    sites = np.arange(n, dtype=np.int64)
    a = np.random.default_rng(1).normal(size=1 << n).astype(np.complex128)
    small = random_model(ks_sites, 2 * ks_sites, seed=2)
    s_emasks, s_evals = small.entry_arrays
    s_sites = np.arange(ks_sites, dtype=np.int64)
    selector = np.array([0] + [(i & -i).bit_length() - 1 for i in range(1, 1 << ks_sites)],
                        dtype=np.int64)
    lam = (1 << (ks_sites // 2)) - 1
    return {
        f"config_weights n={n}": lambda k: k.config_weights(sites, 0, 0, m.z_array, emasks, evals),
        f"subset_zeta n={n}": lambda k: k.subset_zeta(a),
        f"superset_mobius n={n}": lambda k: k.superset_mobius(a, (1 << n) - 1),
        f"ks_operator n={ks_sites}": lambda k: k.ks_operator(s_sites, lam, selector,
                                                             small.z_array, s_emasks, s_evals),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sites", type=int, default=14)
    ap.add_argument("--ks-sites", type=int, default=9)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels unavailable; only the fallback can be timed")
    print(f"{'kernel':<28}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases(args.sites, args.ks_sites).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<28}{t_py * 1e3:>14.2f}{'-':>14}{'-':>10}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        print(f"{name:<28}{t_py * 1e3:>14.2f}{t_c * 1e3:>14.2f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
