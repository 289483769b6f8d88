"""Generator correctness against an independent transliteration.

The oracle below is written directly from the published reference code
for splitmix64 and xoshiro256++ (Blackman & Vigna), kept deliberately
separate from the package implementation so the two can disagree.
"""

import numpy as np
import pytest

from walklab.rng import (
    DEFAULT_MASTER_SEED,
    GOLDEN_GAMMA,
    RngStream,
    mix_path_seed,
    new_stream,
    seed_state,
    splitmix64,
    u64_to_signed,
    u64_to_unit,
    xoshiro256pp_next,
)
from walklab._kernels import fill_raw, fill_uniform_signed, fill_uniform_unit, state_array

MASK = (1 << 64) - 1


# --- independent oracle -------------------------------------------------

def oracle_splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


class OracleXoshiro:
    def __init__(self, seed):
        sm = seed
        self.s = []
        for _ in range(4):
            sm, word = oracle_splitmix64(sm)
            self.s.append(word)

    @staticmethod
    def _rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & MASK

    def next(self):
        s = self.s
        result = (self._rotl((s[0] + s[3]) & MASK, 23) + s[0]) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return result


# --- frozen vectors ------------------------------------------------------

def test_splitmix64_published_vector():
    # first outputs from state 0 in the reference implementation
    s, z0 = splitmix64(0)
    s, z1 = splitmix64(s)
    s, z2 = splitmix64(s)
    assert z0 == 0xE220A8397B1DCDAF
    assert z1 == 0x6E789E6AA1B965F4
    assert z2 == 0x06C45D188009454F


def test_seed_state_frozen():
    assert seed_state(42, 0) == (
        0xBDD732262FEB6E95,
        0x28EFE333B266F103,
        0x47526757130F9F52,
        0x581CE1FF0E4AE394,
    )


def test_first_draws_frozen():
    assert new_stream(42, 0).next_u64() == 0xD0764D4F4476689F
    assert new_stream(42, 1).next_u64() == 0xEFDB3ABE2D004720
    assert DEFAULT_MASTER_SEED == 42


def test_mix_path_seed():
    assert mix_path_seed(7, 0) == 7
    assert mix_path_seed(7, 1) == 7 ^ GOLDEN_GAMMA
    assert mix_path_seed(7, 2) == 7 ^ ((2 * GOLDEN_GAMMA) & MASK)


@pytest.mark.parametrize("seed", [0, 1, 42, 0xDEADBEEF, MASK])
def test_matches_oracle_sequence(seed):
    oracle = OracleXoshiro(seed)
    stream = new_stream(seed, 0)
    for _ in range(256):
        assert stream.next_u64() == oracle.next()


def test_path_index_enters_oracle_through_xor():
    oracle = OracleXoshiro(99 ^ ((5 * GOLDEN_GAMMA) & MASK))
    stream = new_stream(99, 5)
    for _ in range(64):
        assert stream.next_u64() == oracle.next()


def test_all_zero_seed_guard():
    # a state of four zero words would lock xoshiro at 0 forever
    state = seed_state(0, 0)
    if all(w == 0 for w in state):
        pytest.fail("degenerate all-zero state escaped the guard")
    stream = new_stream(0, 0)
    draws = {stream.next_u64() for _ in range(8)}
    assert len(draws) == 8


# --- float mappings ------------------------------------------------------

def test_unit_mapping_endpoints():
    assert u64_to_unit(0) == 0.0
    assert u64_to_unit(MASK) == (2**53 - 1) * 2.0**-53
    assert u64_to_unit(1 << 11) == 2.0**-53  # lowest retained bit


def test_signed_mapping_endpoints():
    assert u64_to_signed(0) == -1.0
    assert u64_to_signed((2**52) << 11) == 0.0
    assert u64_to_signed(MASK) == 1.0 - 2.0**-52


def test_uniform_unit_half_open():
    stream = new_stream(2024, 0)
    for _ in range(10000):
        u = stream.uniform_unit()
        assert 0.0 <= u < 1.0


def test_signed_mean_band():
    stream = new_stream(11, 3)
    n = 1_000_000
    total = sum(stream.uniform_signed() for _ in range(n))
    # stddev of the mean is 1/sqrt(3n) ~ 5.8e-4; 0.004 is almost 7 sigma
    assert abs(total / n) < 0.004


def test_unit_mean_band():
    raw = np.empty(1_000_000, dtype=np.uint64)
    fill_raw(state_array(new_stream(13, 0)), raw)
    mean = float(np.mean((raw >> np.uint64(11)).astype(np.float64) * 2.0**-53))
    assert abs(mean - 0.5) < 0.001


# --- per-path streams ----------------------------------------------------

def test_adjacent_paths_differ():
    a = new_stream(42, 0)
    b = new_stream(42, 1)
    assert [a.next_u64() for _ in range(4)] != [b.next_u64() for _ in range(4)]


def test_path_seed_collisions_absent():
    # one million path seeds from one master seed, all distinct, and the
    # derived first state words are distinct too (vectorised splitmix64)
    idx = np.arange(1_000_000, dtype=np.uint64)
    seeds = np.uint64(DEFAULT_MASTER_SEED) ^ (idx * np.uint64(GOLDEN_GAMMA))
    assert np.unique(seeds).size == idx.size
    z = seeds + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    assert np.unique(z).size == idx.size


def test_stream_state_snapshot():
    stream = new_stream(8, 8)
    before = stream.state
    assert stream.state == before  # property is a copy, not a view
    assert stream.origin == (8, 8)
    stream.next_u64()
    assert stream.state != before


def test_stream_rejects_out_of_range():
    with pytest.raises(ValueError):
        new_stream(-1, 0)
    with pytest.raises(ValueError):
        new_stream(0, 1 << 64)


# --- compiled kernels match the reference --------------------------------

def test_jit_bit_parity_raw():
    stream = new_stream(42, 0)
    expected = [stream.next_u64() for _ in range(4096)]
    out = np.empty(4096, dtype=np.uint64)
    fill_raw(state_array(new_stream(42, 0)), out)
    assert [int(v) for v in out] == expected


@pytest.mark.parametrize("path", [0, 1, 17])
def test_jit_bit_parity_floats(path):
    stream = new_stream(7, path)
    expected_unit = [stream.uniform_unit() for _ in range(512)]
    stream = new_stream(7, path)
    expected_signed = [stream.uniform_signed() for _ in range(512)]

    unit = np.empty(512, dtype=np.float64)
    fill_uniform_unit(state_array(new_stream(7, path)), unit)
    signed = np.empty(512, dtype=np.float64)
    fill_uniform_signed(state_array(new_stream(7, path)), signed)

    assert unit.tolist() == expected_unit
    assert signed.tolist() == expected_signed


def test_pure_step_function_matches_method():
    state = list(seed_state(3, 1))
    stream = RngStream(3, 1)
    for _ in range(32):
        assert xoshiro256pp_next(state) == stream.next_u64()
