"""Truncated 2-adic parity vectors of the shortcut map.

The parity vector of x collects the parities of successive shortcut-map
iterates; its first k bits depend only on x mod 2**k, which makes the
map a 2-adic isometry.  Only finite truncations are computed here --
genuine 2-adic inputs are not representable, so every statement about
Z_2 is checked through residues.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import step_shortcut

DEFAULT_TRUNCATION = 64


@dataclass(frozen=True)
class ParityVector:
    """First k parities of the shortcut orbit of ``source``."""

    source: int
    bits: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.bits)

    def as_int(self) -> int:
        """Little-endian packing: sum of bits[i] * 2**i."""
        return sum(bit << i for i, bit in enumerate(self.bits))


def parity_vector(x: int, k: int = DEFAULT_TRUNCATION) -> ParityVector:
    """Record the parity of T^i(x) for i = 0 .. k-1 (T = shortcut map)."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if k < 1:
        raise ValueError(f"truncation length must be >= 1, got {k}")
    bits = []
    cur = x
    for _ in range(k):
        bits.append(cur & 1)
        cur = step_shortcut(cur)
    return ParityVector(source=x, bits=tuple(bits))


def q_truncated(x: int, k: int = DEFAULT_TRUNCATION) -> int:
    """The parity-vector function truncated to k bits, i.e. Q(x) mod 2**k."""
    return parity_vector(x, k).as_int()


def isometry_check(x: int, y: int, k: int = DEFAULT_TRUNCATION) -> bool:
    """Test one instance of the isometry: congruence mod 2**k on inputs
    must coincide with equality of the k-bit parity prefixes."""
    if x < 1 or y < 1:
        raise ValueError("x and y must be >= 1")
    if k < 1:
        raise ValueError(f"truncation length must be >= 1, got {k}")
    same_residue = (x - y) % (2**k) == 0
    same_prefix = q_truncated(x, k) == q_truncated(y, k)
    return same_residue == same_prefix
