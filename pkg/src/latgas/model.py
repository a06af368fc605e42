"""Interaction models and conditional Boltzmann factors.

An :class:`InteractionModel` stores activities per site and the sparse map of
subset weights ``W(X) != 1``. Everything else in the package reads models
through the evaluators here or through the array views used by the kernels.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType

import numpy as np

from latgas import sitesets as ss
from latgas.errors import ModelError

POTENTIAL_TOL = 1e-12


def _finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


@dataclass(frozen=True, eq=False)
class InteractionModel:
    """Activities ``z`` and interaction ``W`` on a lattice of ``n`` sites.

    ``w_entries`` maps non-empty site masks to ``W(X)``; absent masks mean
    ``W(X) = 1``. ``potential_entries``, when given, holds ``V`` with
    ``W = exp(-V)``.
    """

    n: int
    activity: tuple[complex, ...]
    w_entries: Mapping[int, complex]
    potential_entries: Mapping[int, complex] | None = None
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not 0 <= self.n <= ss.MAX_SITES:
            raise ModelError(f"site count {self.n} outside [0, {ss.MAX_SITES}]")
        act = tuple(complex(a) for a in self.activity)
        if len(act) != self.n:
            raise ModelError(f"expected {self.n} activities, got {len(act)}")
        if not all(_finite(a) for a in act):
            raise ModelError("activities must be finite")
        lattice = ss.full(self.n)
        entries = {}
        for key, val in self.w_entries.items():
            key = int(key)
            val = complex(val)
            if key == 0:
                raise ModelError("interaction on the empty set")
            if key & ~lattice:
                raise ModelError(f"subset {ss.sites_of(key)} leaves the lattice")
            if val == 1:
                raise ModelError(f"explicit unit weight on {ss.sites_of(key)}")
            if not _finite(val):
                raise ModelError(f"non-finite weight on {ss.sites_of(key)}")
            entries[key] = val
        pot = None
        if self.potential_entries is not None:
            pot = {}
            for key, v in self.potential_entries.items():
                key = int(key)
                v = complex(v)
                if key == 0 or key & ~lattice:
                    raise ModelError(f"bad potential subset {ss.sites_of(key)}")
                if not _finite(v):
                    raise ModelError("potential values must be finite")
                w = entries.get(key, 1.0)
                if abs(cmath.exp(-v) - w) > POTENTIAL_TOL:
                    raise ModelError(
                        f"exp(-V) != W on {ss.sites_of(key)}: {cmath.exp(-v)} vs {w}"
                    )
                pot[key] = v
            pot = MappingProxyType(pot)
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(self.n))
        if len(labels) != self.n or len(set(labels)) != self.n:
            raise ModelError("labels must be distinct, one per site")
        object.__setattr__(self, "activity", act)
        object.__setattr__(self, "w_entries", MappingProxyType(entries))
        object.__setattr__(self, "potential_entries", pot)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_potential(cls, n, activity, potential: Mapping[int, complex], labels=()):
        """Build ``W = exp(-V)``; entries whose weight is exactly 1 are omitted."""
        w = {}
        for key, v in potential.items():
            val = cmath.exp(-complex(v))
            if val != 1:
                w[key] = val
        return cls(n, tuple(activity), w, dict(potential), labels)

    @property
    def lattice(self) -> int:
        return ss.full(self.n)

    def z(self, x: int) -> complex:
        return self.activity[x]

    def w(self, X: int) -> complex:
        return self.w_entries.get(X, 1.0 + 0j)

    def entries_containing(self, x: int) -> list[tuple[int, complex]]:
        """Non-unit entries ``(X, W(X))`` with ``x in X``, in canonical order."""
        bit = 1 << x
        return sorted((k, v) for k, v in self.w_entries.items() if k & bit)

    def with_activity(self, activity) -> InteractionModel:
        return InteractionModel(self.n, tuple(activity), dict(self.w_entries),
                                None if self.potential_entries is None
                                else dict(self.potential_entries), self.labels)

    def with_entries(self, w_entries: Mapping[int, complex]) -> InteractionModel:
        """Same activities and labels, new interaction (potential dropped)."""
        clean = {k: v for k, v in w_entries.items() if v != 1}
        return InteractionModel(self.n, self.activity, clean, None, self.labels)

    # array views consumed by the kernels
    @cached_property
    def z_array(self) -> np.ndarray:
        return np.array(self.activity, dtype=np.complex128)

    @cached_property
    def entry_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        keys = sorted(self.w_entries)
        return (np.array(keys, dtype=np.int64),
                np.array([self.w_entries[k] for k in keys], dtype=np.complex128))

    def __repr__(self):
        ent = {tuple(ss.sites_of(k)): v for k, v in sorted(self.w_entries.items())}
        return f"InteractionModel(n={self.n}, z={list(self.activity)}, W={ent})"


@dataclass(frozen=True)
class CriterionParams:
    """Per-site radii ``r`` in ``[0, 1)`` and ``alpha = r / (1 - r)``."""

    r: tuple[float, ...]
    alpha: tuple[float, ...]

    def __post_init__(self):
        if len(self.r) != len(self.alpha):
            raise ModelError("r and alpha lengths differ")
        for r, a in zip(self.r, self.alpha):
            if not 0 <= r < 1:
                raise ModelError(f"r = {r} outside [0, 1)")
            if a < 0 or abs(r - a / (1 + a)) > 1e-15:
                raise ModelError(f"alpha = {a} inconsistent with r = {r}")

    @classmethod
    def from_r(cls, r: Iterable[float]) -> CriterionParams:
        r = tuple(float(v) for v in r)
        if not all(0 <= v < 1 for v in r):
            raise ModelError("r must lie in [0, 1)")
        return cls(r, tuple(v / (1 - v) for v in r))

    @classmethod
    def from_alpha(cls, alpha: Iterable[float]) -> CriterionParams:
        alpha = tuple(float(a) for a in alpha)
        return cls(tuple(a / (1 + a) for a in alpha), alpha)

    @classmethod
    def constant_alpha(cls, n: int, alpha: float) -> CriterionParams:
        return cls.from_alpha([alpha] * n)

    def alpha_pow(self, S: int) -> float:
        out = 1.0
        for s in ss.sites_of(S):
            out *= self.alpha[s]
        return out

    def r_pow(self, S: int) -> float:
        out = 1.0
        for s in ss.sites_of(S):
            out *= self.r[s]
        return out


def w_conditional(model: InteractionModel, X: int, B: int) -> complex:
    """Conditional weight ``W(X | B)``, enumerating every ``C`` inside ``B``."""
    if X == 0:
        raise ModelError("W(X | B) needs a non-empty X")
    if X & B == 0:
        out = 1.0 + 0j
        for C in ss.subsets(B):
            out *= model.w(X | C)
        return out
    if ss.size(X) == 1:
        return 0j
    return 1.0 + 0j


def kappa_conditional(model: InteractionModel, X: int, B: int = 0) -> complex:
    """Conditional Boltzmann factor, the product of ``W(S | B)`` over non-empty ``S``."""
    if X & B:
        return 0j
    out = 1.0 + 0j
    for S in ss.nonempty_subsets(X):
        out *= w_conditional(model, S, B)
        if out == 0:
            return 0j
    return out


def monomial(model: InteractionModel, X: int) -> complex:
    out = 1.0 + 0j
    for x in ss.sites_of(X):
        out *= model.activity[x]
    return out


def conditioned(model: InteractionModel, B: int) -> InteractionModel:
    """The model whose interaction is ``Y -> W(Y | B)``.

    Entries are grouped by ``E \\ B`` and multiplied; sites of ``B`` get a
    vanishing singleton weight. Entries inside ``B`` only affect ``W(∅ | B)``,
    which never enters a Boltzmann factor, and are dropped.
    """
    if B == 0:
        return model
    out: dict[int, complex] = {}
    for key, val in model.w_entries.items():
        rest = key & ~B
        if rest:
            out[rest] = out.get(rest, 1.0 + 0j) * val
    for b in ss.sites_of(B):
        out[1 << b] = 0j
    return model.with_entries(out)
