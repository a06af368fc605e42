"""Bitmask helpers for finite site sets.

A site set is a plain ``int`` whose bit ``i`` marks site ``i``. The canonical
order on site sets is numeric order of the masks, and sites inside a set are
ordered by index.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

MAX_SITES = 30

EMPTY = 0


def mask_of(sites: Iterable[int]) -> int:
    m = 0
    for s in sites:
        if not 0 <= s < MAX_SITES:
            raise ValueError(f"site index {s} outside [0, {MAX_SITES})")
        m |= 1 << s
    return m


def sites_of(mask: int) -> list[int]:
    """Sites of ``mask`` in ascending order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def size(mask: int) -> int:
    return mask.bit_count()


def full(n: int) -> int:
    return (1 << n) - 1


def contains(mask: int, site: int) -> bool:
    return bool(mask >> site & 1)


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def subsets(mask: int) -> Iterator[int]:
    """All subsets of ``mask`` in ascending numeric order, starting at 0."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def nonempty_subsets(mask: int) -> Iterator[int]:
    it = subsets(mask)
    next(it)
    yield from it


def preceding(mask: int, site: int) -> int:
    """Sites of ``mask`` strictly below ``site``."""
    return mask & ((1 << site) - 1)


def spread(index: int, positions: list[int]) -> int:
    """Map bit ``j`` of ``index`` to bit ``positions[j]``."""
    m = 0
    j = 0
    while index:
        if index & 1:
            m |= 1 << positions[j]
        index >>= 1
        j += 1
    return m


def compress(mask: int, positions: list[int]) -> int:
    """Inverse of :func:`spread` for masks inside ``positions``."""
    idx = 0
    for j, p in enumerate(positions):
        if mask >> p & 1:
            idx |= 1 << j
    return idx
