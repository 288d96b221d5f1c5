"""Bit-packed binary action profiles.

Agent ``i`` maps to bit ``i`` of the packed integer, so the string form
``"1100"`` (agent 0 first) packs to ``0b0011``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, VertexOutOfRange


@dataclass(frozen=True)
class ActionProfile:
    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"profile length must be positive, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits:#x} do not fit in {self.n} agents")

    @classmethod
    def zeros(cls, n: int) -> ActionProfile:
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> ActionProfile:
        return cls(n, (1 << n) - 1)

    @classmethod
    def from_sequence(cls, values: Iterable[int]) -> ActionProfile:
        values = list(values)
        bits = 0
        for i, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError(f"actions must be 0 or 1, got {v!r} at position {i}")
            bits |= int(v) << i
        return cls(len(values), bits)

    @classmethod
    def from_string(cls, text: str) -> ActionProfile:
        """Parse ``"0110"``-style strings, agent 0 first."""
        return cls.from_sequence(int(c) for c in text.strip())

    @classmethod
    def from_hex(cls, text: str, n: int) -> ActionProfile:
        return cls(n, int(text, 16))

    @cached_property
    def ones_count(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise VertexOutOfRange(f"agent {i} outside [0, {self.n})")
        return (self.bits >> i) & 1

    def __iter__(self) -> Iterator[int]:
        return ((self.bits >> i) & 1 for i in range(self.n))

    def flip(self, i: int) -> ActionProfile:
        if not 0 <= i < self.n:
            raise VertexOutOfRange(f"agent {i} outside [0, {self.n})")
        return ActionProfile(self.n, self.bits ^ (1 << i))

    def with_action(self, i: int, action: int) -> ActionProfile:
        if self[i] == action:
            return self
        return self.flip(i)

    def is_consensus(self) -> bool:
        return self.bits == 0 or self.bits == (1 << self.n) - 1

    def to_array(self) -> np.ndarray:
        return np.fromiter(iter(self), dtype=np.int8, count=self.n)

    def to_string(self) -> str:
        return "".join(str(b) for b in self)

    def to_hex(self) -> str:
        return format(self.bits, f"0{(self.n + 3) // 4}x")

    def __str__(self) -> str:
        return self.to_string()


ProfileLike = Union[ActionProfile, str, Sequence[int], np.ndarray]


def as_profile(value: ProfileLike, n: int | None = None) -> ActionProfile:
    """Coerce strings, 0/1 sequences and arrays to an ActionProfile.

    Raises DimensionMismatch when ``n`` is given and the length differs.
    """
    if isinstance(value, ActionProfile):
        profile = value
    elif isinstance(value, str):
        profile = ActionProfile.from_string(value)
    else:
        profile = ActionProfile.from_sequence(int(v) for v in np.asarray(value).ravel())
    if n is not None and profile.n != n:
        raise DimensionMismatch(f"profile has length {profile.n}, expected {n}")
    return profile
