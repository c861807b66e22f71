"""Deterministic pseudo-random generator used wherever reproducibility is a contract.

SplitMix64 with a single 64-bit word of state. The same update is implemented
in the compiled Gibbs kernel, so a sampling chain started here continues
bit-identically inside the hot loop regardless of backend.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def next_u64(state: int) -> tuple[int, int]:
    """Advance one step; returns (new_state, 64-bit output)."""
    state = (state + _GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def next_double(state: int) -> tuple[int, float]:
    """Advance one step; returns (new_state, uniform double in [0, 1))."""
    state, z = next_u64(state)
    return state, (z >> 11) * 2.0 ** -53


class SplitMix64:
    """Stateful wrapper around the raw step functions."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def random(self) -> float:
        self.state, x = next_double(self.state)
        return x

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n). n must be positive."""
        if n <= 0:
            raise ValueError("n must be positive")
        # Multiply-and-floor keeps the draw to exactly one stream step, which
        # both kernel implementations reproduce. Bias is < 2**-53 per draw.
        k = int(self.random() * n)
        return n - 1 if k >= n else k

    def choice(self, seq):
        if not seq:
            raise IndexError("cannot choose from an empty sequence")
        return seq[self.randbelow(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
