from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modarith import DomainError


@dataclass(frozen=True)
class Interval:
    """The integer interval ``[offset + 1, offset + length]``."""

    offset: int
    length: int

    def __post_init__(self):
        if self.offset < 0 or self.length < 1:
            raise DomainError(f"bad interval offset={self.offset} length={self.length}")

    @classmethod
    def full(cls, p: int) -> Interval:
        return cls(0, p - 1)

    @classmethod
    def single(cls, m: int) -> Interval:
        return cls(m - 1, 1)

    @property
    def start(self) -> int:
        return self.offset + 1

    @property
    def stop(self) -> int:
        """Last element (inclusive)."""
        return self.offset + self.length

    def points(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 1, dtype=np.int64)

    def check(self, p: int) -> Interval:
        if self.stop > p - 1:
            raise DomainError(f"interval [{self.start}, {self.stop}] not inside [1, {p - 1}]")
        return self
