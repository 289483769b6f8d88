"""Deterministic per-path random streams.

Every simulated path owns one xoshiro256++ stream constructed from
``(master_seed, path_index)``.  Seeding applies the SplitMix64 finalizer
iteratively to ``master_seed XOR (path_index * GOLDEN_GAMMA)``; the gamma
constant is odd, so distinct path indices can never collide in the mixed
seed.  Identical origins give bit-identical draw sequences, which is what
makes ensemble output independent of worker scheduling.

The generator is implemented here rather than taken from a library so that
the exact draw sequence is pinned by this repository.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

# SplitMix64 increment (odd), also used to spread path indices.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_SM_MUL1 = 0xBF58476D1CE4E5B9
_SM_MUL2 = 0x94D049BB133111EB

#: Seed used when the caller supplies none; never derived from the clock.
DEFAULT_MASTER_SEED = 42


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state by one step; return (state, output)."""
    state = (state + GOLDEN_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _SM_MUL1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MUL2) & _MASK64
    return state, z ^ (z >> 31)


def mix_path_seed(master_seed: int, path_index: int) -> int:
    """The documented 64-bit origin mix: master_seed XOR (path_index * gamma)."""
    return (master_seed ^ ((path_index * GOLDEN_GAMMA) & _MASK64)) & _MASK64


def seed_state(master_seed: int, path_index: int) -> tuple[int, int, int, int]:
    """Expand an origin into a 256-bit xoshiro256++ state.

    Four successive SplitMix64 outputs fill the state words.  The all-zero
    state (the one fixed point xoshiro cannot leave) is unreachable from
    SplitMix64 in practice; a guard keeps the contract unconditional.
    """
    sm = mix_path_seed(master_seed, path_index)
    words = []
    for _ in range(4):
        sm, w = splitmix64(sm)
        words.append(w)
    if words[0] == 0 and words[1] == 0 and words[2] == 0 and words[3] == 0:
        words[0] = GOLDEN_GAMMA
    return words[0], words[1], words[2], words[3]


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def xoshiro256pp_next(s: list[int]) -> int:
    """One xoshiro256++ step on a 4-word state list (mutated in place)."""
    s0, s1, s2, s3 = s
    out = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
    t = (s1 << 17) & _MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    s[0], s[1], s[2], s[3] = s0, s1, s2, s3
    return out


def u64_to_unit(raw: int) -> float:
    """Map one 64-bit word to [0, 1) using its top 53 bits."""
    return (raw >> 11) * 2.0**-53


def u64_to_signed(raw: int) -> float:
    """Map one 64-bit word to [-1, 1); -1 is attainable, +1 is not."""
    return 2.0 * u64_to_unit(raw) - 1.0


class RngStream:
    """A single xoshiro256++ stream tagged with its (master_seed, path_index) origin."""

    __slots__ = ("_s", "origin")

    def __init__(self, master_seed: int = DEFAULT_MASTER_SEED, path_index: int = 0):
        if not 0 <= master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
        if not 0 <= path_index < 2**64:
            raise ValueError(f"path_index must be a 64-bit unsigned integer, got {path_index}")
        self._s = list(seed_state(master_seed, path_index))
        self.origin = (master_seed, path_index)

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def next_u64(self) -> int:
        return xoshiro256pp_next(self._s)

    def uniform_unit(self) -> float:
        """One draw in [0, 1).  Consumes exactly one 64-bit output."""
        return u64_to_unit(self.next_u64())

    def uniform_signed(self) -> float:
        """One draw in [-1, 1).  Consumes exactly one 64-bit output."""
        return u64_to_signed(self.next_u64())


def new_stream(master_seed: int = DEFAULT_MASTER_SEED, path_index: int = 0) -> RngStream:
    return RngStream(master_seed, path_index)


def uniform_unit(stream: RngStream) -> float:
    return stream.uniform_unit()


def uniform_signed(stream: RngStream) -> float:
    return stream.uniform_signed()
