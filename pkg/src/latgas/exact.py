"""Brute-force enumeration of partition functions and correlations.

Every quantity here is a direct sum over configurations; other modules are
checked against these values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from latgas import sitesets as ss
from latgas._backend import kernels
from latgas.errors import ModelError, VanishingDenominator
from latgas.model import InteractionModel

ZERO_THRESHOLD = 1e-14


@dataclass(frozen=True)
class PartitionQuery:
    pinned: int = 0
    volume: int = 0
    boundary: int = 0


def _weights(model: InteractionModel, free: int, base: int, boundary: int) -> np.ndarray:
    emasks, evals = model.entry_arrays
    return kernels.config_weights(
        np.array(ss.sites_of(free), dtype=np.int64), base, boundary,
        model.z_array, emasks, evals)


def partition_function(model: InteractionModel, q: PartitionQuery) -> complex:
    """``Z(X, Λ | B)``: sum of ``z^(X∪Y) κ(X∪Y | B)`` over ``Y ⊂ Λ∖X``."""
    lattice = model.lattice
    for name, m in (("pinned", q.pinned), ("volume", q.volume), ("boundary", q.boundary)):
        if m & ~lattice:
            raise ModelError(f"{name} set leaves the lattice")
    w = _weights(model, q.volume & ~q.pinned, q.pinned, q.boundary)
    # numpy reduces contiguous arrays pairwise
    return complex(np.sum(w))


def Z(model: InteractionModel, volume: int, boundary: int = 0, pinned: int = 0) -> complex:
    return partition_function(model, PartitionQuery(pinned, volume, boundary))


def partition_table(model: InteractionModel, pinned: int = 0,
                    boundary: int = 0) -> tuple[list[int], np.ndarray]:
    """``Z(X, Λ | B)`` for every ``Λ`` inside the lattice minus ``X`` at once.

    Returns the free sites and an array indexed by compressed masks over them.
    """
    free = model.lattice & ~pinned
    w = _weights(model, free, pinned, boundary)
    return ss.sites_of(free), kernels.subset_zeta(w)


def _check_denominator(model: InteractionModel, denom: complex, volume: int) -> None:
    zmax = max((abs(model.activity[s]) for s in ss.sites_of(volume)), default=0.0)
    if not abs(denom) > ZERO_THRESHOLD * (1 + zmax) ** ss.size(volume):
        raise VanishingDenominator(
            f"Z(Λ|B) = {denom} vanishes for Λ = {ss.sites_of(volume)}")


def correlation(model: InteractionModel, X: int, volume: int, boundary: int = 0) -> complex:
    """``R(X, Λ | B) = Z(X, Λ | B) / Z(Λ | B)``; ``X`` need not lie inside ``Λ``."""
    denom = Z(model, volume, boundary)
    _check_denominator(model, denom, volume)
    return Z(model, volume, boundary, pinned=X) / denom


def effective_activity(model: InteractionModel, x: int, volume: int, boundary: int = 0) -> complex:
    if volume >> x & 1:
        raise ModelError(f"site {x} lies inside the volume")
    return correlation(model, 1 << x, volume, boundary)
