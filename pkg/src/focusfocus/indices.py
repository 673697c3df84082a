"""Exponent bookkeeping for the complex monomial basis z1, z2, zbar1, zbar2.

A monomial is z1^a1 z2^a2 zbar1^b1 zbar2^b2.  Sparse containers key terms by
a packed integer (8 bits per exponent), so that multiplying monomials is a
single integer addition.  Exponents must stay below 128 per variable, far
above any truncation order this package is used at.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Iterator, NamedTuple

_SHIFT_A2 = 8
_SHIFT_B1 = 16
_SHIFT_B2 = 24
_MASK = 0xFF

MAX_EXPONENT = 127


def pack(a1: int, a2: int, b1: int, b2: int) -> int:
    return a1 | (a2 << _SHIFT_A2) | (b1 << _SHIFT_B1) | (b2 << _SHIFT_B2)


def unpack(key: int) -> tuple[int, int, int, int]:
    return (key & _MASK, (key >> _SHIFT_A2) & _MASK,
            (key >> _SHIFT_B1) & _MASK, (key >> _SHIFT_B2) & _MASK)


def packed_degree(key: int) -> int:
    return ((key & _MASK) + ((key >> _SHIFT_A2) & _MASK)
            + ((key >> _SHIFT_B1) & _MASK) + ((key >> _SHIFT_B2) & _MASK))


def packed_weight1(key: int) -> int:
    """Eigenvalue of {q1, .} on the monomial: a1 - a2 + b1 - b2."""
    return ((key & _MASK) - ((key >> _SHIFT_A2) & _MASK)
            + ((key >> _SHIFT_B1) & _MASK) - ((key >> _SHIFT_B2) & _MASK))


def packed_weight2(key: int) -> int:
    """Eigenvalue of {q2, .} / i on the monomial: a1 + a2 - b1 - b2."""
    return ((key & _MASK) + ((key >> _SHIFT_A2) & _MASK)
            - ((key >> _SHIFT_B1) & _MASK) - ((key >> _SHIFT_B2) & _MASK))


def packed_is_resonant(key: int) -> bool:
    a1, a2, b1, b2 = unpack(key)
    return a1 == b2 and a2 == b1


def packed_conjugate(key: int) -> int:
    """Exponent of the complex-conjugate monomial: swap (a1,a2) <-> (b1,b2)."""
    a1, a2, b1, b2 = unpack(key)
    return pack(b1, b2, a1, a2)


class MultiIndex(NamedTuple):
    """Public exponent 4-tuple over (z1, z2, zbar1, zbar2)."""

    a1: int
    a2: int
    b1: int
    b2: int

    def degree(self) -> int:
        return self.a1 + self.a2 + self.b1 + self.b2

    def weight1(self) -> int:
        return self.a1 - self.a2 + self.b1 - self.b2

    def weight2(self) -> int:
        return self.a1 + self.a2 - self.b1 - self.b2

    def is_resonant(self) -> bool:
        return self.a1 == self.b2 and self.a2 == self.b1

    def conjugate(self) -> "MultiIndex":
        return MultiIndex(self.b1, self.b2, self.a1, self.a2)

    def pack(self) -> int:
        return pack(*self)

    @classmethod
    def from_packed(cls, key: int) -> "MultiIndex":
        return cls(*unpack(key))


def as_packed(index) -> int:
    """Accept a MultiIndex, a 4-tuple, or an already-packed key."""
    if isinstance(index, int):
        return index
    a1, a2, b1, b2 = index
    for e in (a1, a2, b1, b2):
        if e < 0 or e > MAX_EXPONENT:
            raise ValueError(f"exponent out of range in {tuple(index)!r}")
    return pack(a1, a2, b1, b2)


def indices_of_degree(d: int) -> Iterator[MultiIndex]:
    """All exponent tuples of total degree d, in lexicographic order."""
    for bars in combinations_with_replacement(range(4), d):
        counts = [0, 0, 0, 0]
        for v in bars:
            counts[v] += 1
        yield MultiIndex(*counts)


def indices_up_to_degree(n: int) -> Iterator[MultiIndex]:
    for d in range(n + 1):
        yield from indices_of_degree(d)
