"""Exhaustive enumeration of normalized potentials over {0,1}^N.

State ``s`` (an integer) encodes agent ``i`` in bit ``i``. Two routes are
provided:

* :func:`gray_code_walk` / :func:`iter_potentials_gray` stream states in
  reflected Gray-code order, updating the potential by one O(K) flip each.
* :func:`potential_blocks` builds the same values with numpy. The low bits
  are filled by doubling (every new entry is a single-flip update of one
  already known); each block then fixes the high bits, so blocks cover
  contiguous index ranges and can be processed independently.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import TooLarge
from .game import GameSpec

MAX_ENUMERATION_N = 24
DEFAULT_BLOCK_BITS = 20
CACHE_MAX_N = 20


def check_enumerable(n: int) -> None:
    if n > MAX_ENUMERATION_N:
        raise TooLarge(f"exhaustive enumeration capped at N={MAX_ENUMERATION_N}, got N={n}")


def to_gray_code(x: int) -> int:
    return x ^ (x >> 1)


def gray_code_walk(n: int) -> Iterator[tuple[int, int | None]]:
    """Yield ``(state, flipped_bit)`` over all 2^n states, one flip per step.

    The first state is 0 with ``flipped_bit=None``.
    """
    state = 0
    yield state, None
    for t in range(1, 1 << n):
        bit = (t & -t).bit_length() - 1
        state ^= 1 << bit
        yield state, bit


def iter_potentials_gray(spec: GameSpec) -> Iterator[tuple[int, float]]:
    """Stream ``(state, normalized potential)`` in Gray-code order."""
    check_enumerable(spec.n)
    masks = spec.graph.neighbor_masks
    k = spec.k
    cost = k * spec.theta / spec.n
    value = 0.0
    for state, bit in gray_code_walk(spec.n):
        if bit is not None:
            gain = (state & masks[bit]).bit_count() / k - cost
            value += gain if state >> bit & 1 else -gain
        yield state, value


def _bit(idx: np.ndarray, j: int) -> np.ndarray:
    return ((idx >> j) & 1).astype(np.int64)


def _subgraph_table(spec: GameSpec, vertices: list[int]) -> np.ndarray:
    """Normalized potential restricted to ``vertices`` (others held inactive).

    Entry ``s`` has bit ``r`` standing for ``vertices[r]``.
    """
    k = spec.k
    cost = k * spec.theta / spec.n
    position = {v: r for r, v in enumerate(vertices)}
    table = np.zeros(1)
    for r, v in enumerate(vertices):
        idx = np.arange(1 << r, dtype=np.int64)
        active = np.zeros(1 << r, dtype=np.int64)
        for u in spec.graph.neighbors(v):
            pu = position.get(u)
            if pu is not None and pu < r:
                active += _bit(idx, pu)
        table = np.concatenate([table, table + (active / k - cost)])
    return table


def potential_blocks(
    spec: GameSpec, block_bits: int = DEFAULT_BLOCK_BITS
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start_state, values)`` blocks of normalized potentials.

    Blocks arrive in ascending ``start_state`` order and together cover
    ``0 .. 2^N - 1``.
    """
    n = spec.n
    check_enumerable(n)
    low_bits = min(n, block_bits)
    low = list(range(low_bits))
    high = list(range(low_bits, n))
    low_table = _subgraph_table(spec, low)
    if not high:
        yield 0, low_table
        return
    high_table = _subgraph_table(spec, high)
    idx = np.arange(1 << low_bits, dtype=np.int64)
    cross = []
    for h in high:
        active = np.zeros(1 << low_bits, dtype=np.int64)
        for u in spec.graph.neighbors(h):
            if u < low_bits:
                active += _bit(idx, u)
        cross.append(active)
    for p in range(1 << len(high)):
        shared = np.zeros(1 << low_bits, dtype=np.int64)
        for r in range(len(high)):
            if p >> r & 1:
                shared += cross[r]
        yield p << low_bits, low_table + high_table[p] + shared / spec.k


@lru_cache(maxsize=16)
def _cached_table(spec: GameSpec) -> np.ndarray:
    table = np.concatenate([values for _, values in potential_blocks(spec)])
    table.setflags(write=False)
    return table


def normalized_potential_table(spec: GameSpec) -> np.ndarray:
    """All 2^N normalized potentials as one read-only array (N <= 20 cached)."""
    check_enumerable(spec.n)
    if spec.n <= CACHE_MAX_N:
        return _cached_table(spec)
    return np.concatenate([values for _, values in potential_blocks(spec)])


def iter_blocks(spec: GameSpec, block_bits: int = DEFAULT_BLOCK_BITS):
    """Blocks from the cache when available, otherwise streamed."""
    if spec.n <= CACHE_MAX_N and block_bits >= spec.n:
        yield 0, _cached_table(spec)
    else:
        yield from potential_blocks(spec, block_bits)

