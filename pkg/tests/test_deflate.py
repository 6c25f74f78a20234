import heapq
import zlib

import pytest
from hypothesis import given, settings, strategies as st

from elastica import deflate
from elastica.complexity import compress_len
from elastica.rng import Xoshiro256


def _ternary(n, seed):
    g = Xoshiro256(seed)
    return bytes(b"+0-"[int(g.random() * 3)] for _ in range(n))


def _reference_tokens(data):
    """Plain hash-chain walk over every inserted position (zlib-style)."""
    n = len(data)
    head, prev = {}, [-1] * n
    M = deflate

    def insert(pos):
        if pos + 3 <= n:
            key = data[pos:pos + 3]
            prev[pos] = head.get(key, -1)
            head[key] = pos

    def longest(i, best_in):
        if i + 3 > n:
            return 0, 0
        limit = min(M.MAX_MATCH, n - i)
        chain = M.MAX_CHAIN >> 2 if best_in >= M.GOOD_LENGTH else M.MAX_CHAIN
        best_len, best_dist = max(best_in, 2), 0
        cand = head.get(data[i:i + 3], -1)
        while cand >= 0 and cand > i - M.WINDOW_SIZE and chain > 0:
            chain -= 1
            length = 0
            while length < limit and data[cand + length] == data[i + length]:
                length += 1
            if length > best_len:
                best_len, best_dist = length, i - cand
                if length >= limit:
                    break
            cand = prev[cand]
        if not best_dist or (best_len == 3 and best_dist > M.TOO_FAR):
            return 0, 0
        return best_len, best_dist

    tokens, i, pending = [], 0, None
    while i < n:
        if pending is None:
            length, dist = longest(i, 2)
            insert(i)
            if length and length < M.MAX_MATCH and i + 1 < n:
                pending, i = (length, dist), i + 1
                continue
            if length:
                tokens.append((length, dist))
                for k in range(i + 1, i + length):
                    insert(k)
                i += length
            else:
                tokens.append(data[i])
                i += 1
        else:
            plen, pdist = pending
            length, dist = longest(i, plen)
            insert(i)
            if length > plen:
                tokens.append(data[i - 1])
                if length < M.MAX_MATCH and i + 1 < n:
                    pending, i = (length, dist), i + 1
                    continue
                pending = None
                tokens.append((length, dist))
                for k in range(i + 1, i + length):
                    insert(k)
                i += length
            else:
                pending = None
                tokens.append((plen, pdist))
                for k in range(i + 1, i - 1 + plen):
                    insert(k)
                i = i - 1 + plen
    return tokens


FIXTURES = {
    "zeros_6200": (b"0" * 6200, 41),
    "zeros_1000": (b"0" * 1000, 28),
    "ternary_6200_seed2024": (_ternary(6200, 2024), 1646),
    "ternary_1000_prefix": (_ternary(6200, 2024)[:1000], 320),
    "alphabet": (bytes(range(256)) * 4, 297),
    "hello": (b"hello hello hello world", 32),
}


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_golden_lengths(name):
    data, expected = FIXTURES[name]
    assert compress_len(data) == expected


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_stdlib_inflate_recovers_input(name):
    data, _ = FIXTURES[name]
    assert zlib.decompress(deflate.gzip_compress(data), 31) == data


@settings(max_examples=150, deadline=None)
@given(st.binary(min_size=1, max_size=3000))
def test_roundtrip_arbitrary_bytes(data):
    assert zlib.decompress(deflate.gzip_compress(data), 31) == data


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(b"+0-"), min_size=1, max_size=4000).map(bytes))
def test_roundtrip_ternary_text(data):
    assert zlib.decompress(deflate.deflate_raw(data), -15) == data


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(b"+00000-"), min_size=1, max_size=2500).map(bytes))
def test_match_finder_equals_chain_walk(data):
    assert deflate.lz77_tokens(data) == _reference_tokens(data)


def test_match_finder_equals_chain_walk_on_system_shape():
    body = b"0" * 3000 + _ternary(200, 7) + b"0" * 3000
    data = b"ELASTICA header".ljust(145) + body
    assert deflate.lz77_tokens(data) == _reference_tokens(data)


def test_deterministic_repeat():
    data = _ternary(1000, 99)
    assert len({deflate.gzip_compress(data) for _ in range(3)}) == 1


def test_close_to_zlib_level9():
    for data, _ in FIXTURES.values():
        ours = compress_len(data)
        ref = len(zlib.compress(data, 9)) - 6 + 18  # zlib framing -> gzip framing
        assert abs(ours - ref) <= max(4, 0.02 * ref)


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        compress_len(b"")


def _huffman_cost(freqs):
    heap = [f for f in freqs if f]
    heapq.heapify(heap)
    cost = 0
    while len(heap) > 1:
        a, b = heapq.heappop(heap), heapq.heappop(heap)
        cost += a + b
        heapq.heappush(heap, a + b)
    return cost


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 500), min_size=2, max_size=60))
def test_package_merge_is_optimal_when_unconstrained(freqs):
    if sum(1 for f in freqs if f) < 2:
        return
    lengths = deflate.package_merge_lengths(freqs, 15)
    assert sum(2.0 ** -l for l in lengths if l) == pytest.approx(1.0)
    assert sum(f * l for f, l in zip(freqs, lengths)) == _huffman_cost(freqs)


def test_package_merge_respects_limit():
    freqs = [2 ** i for i in range(20)]  # geometric skew forces long codes
    lengths = deflate.package_merge_lengths(freqs, 7)
    assert max(lengths) == 7
    assert sum(2.0 ** -l for l in lengths) <= 1.0 + 1e-12


def test_canonical_codes_match_rfc1951_example():
    lengths = [3, 3, 3, 3, 3, 2, 4, 4]
    codes = deflate.canonical_codes(lengths)
    words = [format(c, f"0{l}b")[::-1] for c, l in zip(codes, lengths)]
    assert words == ["010", "011", "100", "101", "110", "00", "1110", "1111"]
