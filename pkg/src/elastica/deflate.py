"""Pinned DEFLATE (RFC 1951) compressor in a gzip (RFC 1952) container.

Output bytes depend only on the input bytes: there is no dependence on the
platform zlib build, and every matching/coding knob is a module constant.

Policy
------
* LZ77 window 32768 bytes, matches of 3..258 bytes.
* Candidates: every earlier position sharing the 3-byte prefix, most recent
  first (a hash chain with all positions inserted).
* Lazy matching with one step of look-ahead: a match found at ``i`` is
  deferred when ``i + 1`` yields a strictly longer match.
* Chain search stops after ``MAX_CHAIN`` candidates (quartered once the
  current match reaches ``GOOD_LENGTH``) or as soon as a match of
  ``NICE_LENGTH`` bytes is found.
* Length-3 matches farther than ``TOO_FAR`` are emitted as literals.
* One block per ``BLOCK_TOKENS`` LZ77 tokens.  Each block is written as
  stored, fixed-Huffman or dynamic-Huffman, whichever is shortest in bits;
  ties prefer stored, then fixed.
* Dynamic code lengths come from package-merge (optimal length-limited
  Huffman), limited to 15 bits (7 for the code-length alphabet).
* gzip header: no name, no comment, mtime 0, XFL 2, OS 255.
"""

from __future__ import annotations

import zlib

WINDOW_SIZE = 32768
MIN_MATCH = 3
MAX_MATCH = 258
MAX_CHAIN = 4096
GOOD_LENGTH = 32
NICE_LENGTH = 258
TOO_FAR = 4096
BLOCK_TOKENS = 16384

GZIP_HEADER = bytes([0x1F, 0x8B, 0x08, 0x00, 0, 0, 0, 0, 0x02, 0xFF])

# (base length, extra bits) for length codes 257..285
_LENGTH_BASE = [3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31,
                35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258]
_LENGTH_EXTRA = [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2,
                 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0]
_DIST_BASE = [1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193,
              257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097, 6145,
              8193, 12289, 16385, 24577]
_DIST_EXTRA = [0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6,
               7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13]
_CL_ORDER = [16, 17, 18, 0, 8, 7, 9, 6, 10, 5, 11, 4, 12, 3, 13, 2, 14, 1, 15]


def _build_length_table():
    table = [0] * (MAX_MATCH + 1)
    for code, (base, extra) in enumerate(zip(_LENGTH_BASE, _LENGTH_EXTRA)):
        for length in range(base, min(base + (1 << extra), MAX_MATCH + 1)):
            table[length] = code
    table[MAX_MATCH] = 28
    return table


_LENGTH_CODE = _build_length_table()


def _dist_code(dist: int) -> int:
    lo, hi = 0, 29
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _DIST_BASE[mid] <= dist:
            lo = mid
        else:
            hi = mid - 1
    return lo


_FIXED_LITLEN = [8] * 144 + [9] * 112 + [7] * 24 + [8] * 8
_FIXED_DIST = [5] * 30


# ---------------------------------------------------------------------------
# LZ77


def _common_length(data, a, b, limit):
    """Length of the common prefix of data[a:] and data[b:], capped at limit."""
    length = 0
    step = 16
    while length < limit:
        take = min(step, limit - length)
        if data[a + length:a + length + take] == data[b + length:b + length + take]:
            length += take
            step <<= 1
        elif take == 1:
            break
        else:
            step = max(1, take >> 1)
    return length


def _longest_match(data, i, n, lowest, best_len_in):
    """Nearest longest match at ``i`` starting no earlier than ``lowest``.

    Only matches strictly longer than ``best_len_in`` count.  Returns
    ``(0, 0)`` when there is none.
    """
    limit = min(MAX_MATCH, n - i)
    need = max(MIN_MATCH, best_len_in + 1)
    best_len = best_dist = 0
    while need <= limit:
        p = data.rfind(data[i:i + need], lowest, i - 1 + need)
        if p < 0:
            break
        best_len = need + _common_length(data, p + need, i + need, limit - need)
        best_dist = i - p
        if best_len >= NICE_LENGTH or best_len >= limit:
            break
        need = best_len + 1
    if best_len == MIN_MATCH and best_dist > TOO_FAR:
        return 0, 0
    return best_len, best_dist


def lz77_tokens(data: bytes) -> list:
    """LZ77 parse with one step of lazy evaluation.

    Tokens are ints (literal byte) or ``(length, distance)`` tuples.  The
    candidate set at ``i`` is the most recent ``MAX_CHAIN`` earlier
    positions sharing the 3-byte prefix (quartered when the deferred match
    already reaches ``GOOD_LENGTH``) within the window; among them the
    longest match wins, the nearest on ties.  This is what a hash-chain
    walk over every inserted position returns.
    """
    n = len(data)
    occurrences = {}
    tokens = []

    def insert(pos):
        if pos + MIN_MATCH <= n:
            occurrences.setdefault(data[pos:pos + MIN_MATCH], []).append(pos)

    def search(pos, best_len_in):
        if pos + MIN_MATCH > n:
            return 0, 0
        seen = occurrences.get(data[pos:pos + MIN_MATCH])
        if not seen:
            return 0, 0
        chain = MAX_CHAIN >> 2 if best_len_in >= GOOD_LENGTH else MAX_CHAIN
        lowest = seen[-chain] if len(seen) > chain else seen[0]
        lowest = max(lowest, pos - WINDOW_SIZE + 1)
        return _longest_match(data, pos, n, lowest, best_len_in)

    i = 0
    pending = None  # match found at i-1 awaiting the lazy check
    while i < n:
        if pending is None:
            length, dist = search(i, MIN_MATCH - 1)
            insert(i)
            if length and length < MAX_MATCH and i + 1 < n:
                pending = (length, dist)
                i += 1
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
            length, dist = search(i, plen)
            insert(i)
            if length > plen:
                # defer: the byte before becomes a literal
                tokens.append(data[i - 1])
                if length < MAX_MATCH and i + 1 < n:
                    pending = (length, dist)
                    i += 1
                    continue
                pending = None
                tokens.append((length, dist))
                for k in range(i + 1, i + length):
                    insert(k)
                i += length
            else:
                pending = None
                tokens.append((plen, pdist))
                # the pending match started at i-1; i is already inserted
                for k in range(i + 1, i - 1 + plen):
                    insert(k)
                i = i - 1 + plen
    return tokens


# ---------------------------------------------------------------------------
# Huffman


def package_merge_lengths(freqs, max_bits):
    """Optimal length-limited Huffman code lengths (package-merge).

    Symbols with zero frequency get length 0.  A lone used symbol gets
    length 1.
    """
    used = [(f, s) for s, f in enumerate(freqs) if f > 0]
    lengths = [0] * len(freqs)
    if not used:
        return lengths
    if len(used) == 1:
        lengths[used[0][1]] = 1
        return lengths
    if (1 << max_bits) < len(used):
        raise ValueError("too many symbols for the length limit")
    used.sort()
    leaves = [(f, (s,)) for f, s in used]
    packages = list(leaves)
    for _ in range(max_bits - 1):
        paired = [
            (packages[j][0] + packages[j + 1][0], packages[j][1] + packages[j + 1][1])
            for j in range(0, len(packages) - 1, 2)
        ]
        packages = sorted(leaves + paired, key=lambda item: item[0])
    for _, symbols in packages[:2 * len(used) - 2]:
        for s in symbols:
            lengths[s] += 1
    return lengths


def canonical_codes(lengths):
    """RFC 1951 canonical codes, bit-reversed for LSB-first packing."""
    max_len = max(lengths) if lengths else 0
    bl_count = [0] * (max_len + 1)
    for length in lengths:
        if length:
            bl_count[length] += 1
    next_code = [0] * (max_len + 2)
    code = 0
    for bits in range(1, max_len + 1):
        code = (code + bl_count[bits - 1]) << 1
        next_code[bits] = code
    codes = [0] * len(lengths)
    for s, length in enumerate(lengths):
        if length:
            c = next_code[length]
            next_code[length] += 1
            rev = 0
            for _ in range(length):
                rev = (rev << 1) | (c & 1)
                c >>= 1
            codes[s] = rev
    return codes


def _ensure_two(freqs):
    """Force at least two used symbols so every decoder accepts the tree."""
    freqs = list(freqs)
    used = sum(1 for f in freqs if f)
    k = 0
    while used < 2:
        if freqs[k] == 0:
            freqs[k] = 1
            used += 1
        k += 1
    return freqs


def _rle_code_lengths(lengths):
    """Run-length encode code lengths with symbols 16/17/18."""
    out = []
    i = 0
    n = len(lengths)
    while i < n:
        cur = lengths[i]
        run = 1
        while i + run < n and lengths[i + run] == cur:
            run += 1
        if cur == 0:
            left = run
            while left >= 11:
                take = min(left, 138)
                out.append((18, take - 11, 7))
                left -= take
            if left >= 3:
                out.append((17, left - 3, 3))
                left = 0
            out.extend((0, 0, 0) for _ in range(left))
        else:
            out.append((cur, 0, 0))
            left = run - 1
            while left >= 3:
                take = min(left, 6)
                out.append((16, take - 3, 2))
                left -= take
            out.extend((cur, 0, 0) for _ in range(left))
        i += run
    return out


class _BitWriter:
    __slots__ = ("out", "acc", "nbits")

    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value, nbits):
        self.acc |= value << self.nbits
        self.nbits += nbits
        while self.nbits >= 8:
            self.out.append(self.acc & 0xFF)
            self.acc >>= 8
            self.nbits -= 8

    def align(self):
        if self.nbits:
            self.out.append(self.acc & 0xFF)
        self.acc = 0
        self.nbits = 0

    def getvalue(self):
        self.align()
        return bytes(self.out)


def _symbolize(tokens):
    """Map tokens to (litlen code, extra value, extra bits, dist code, dvalue, dbits)."""
    syms = []
    for tok in tokens:
        if isinstance(tok, int):
            syms.append((tok, 0, 0, -1, 0, 0))
        else:
            length, dist = tok
            lc = _LENGTH_CODE[length]
            dc = _dist_code(dist)
            syms.append((257 + lc, length - _LENGTH_BASE[lc], _LENGTH_EXTRA[lc],
                         dc, dist - _DIST_BASE[dc], _DIST_EXTRA[dc]))
    return syms


def _payload_bits(syms, ll_len, d_len):
    bits = ll_len[256]
    for code, _, ebits, dc, _, dbits in syms:
        bits += ll_len[code] + ebits
        if dc >= 0:
            bits += d_len[dc] + dbits
    return bits


def _dynamic_header(syms):
    ll_freq = [0] * 286
    d_freq = [0] * 30
    ll_freq[256] = 1
    for code, _, _, dc, _, _ in syms:
        ll_freq[code] += 1
        if dc >= 0:
            d_freq[dc] += 1
    ll_len = package_merge_lengths(_ensure_two(ll_freq), 15)
    d_len = package_merge_lengths(_ensure_two(d_freq), 15)
    hlit = max(257, max(s for s, length in enumerate(ll_len) if length) + 1)
    hdist = max(1, max(s for s, length in enumerate(d_len) if length) + 1)
    rle = _rle_code_lengths(ll_len[:hlit] + d_len[:hdist])
    cl_freq = [0] * 19
    for sym, _, _ in rle:
        cl_freq[sym] += 1
    cl_len = package_merge_lengths(_ensure_two(cl_freq), 7)
    hclen = 19
    while hclen > 4 and cl_len[_CL_ORDER[hclen - 1]] == 0:
        hclen -= 1
    header_bits = 5 + 5 + 4 + 3 * hclen + sum(cl_len[s] + eb for s, _, eb in rle)
    return ll_len, d_len, hlit, hdist, cl_len, hclen, rle, header_bits


def _write_payload(w, syms, ll_len, d_len):
    ll_code = canonical_codes(ll_len)
    d_code = canonical_codes(d_len)
    write = w.write
    for code, extra, ebits, dc, dextra, dbits in syms:
        write(ll_code[code], ll_len[code])
        if ebits:
            write(extra, ebits)
        if dc >= 0:
            write(d_code[dc], d_len[dc])
            if dbits:
                write(dextra, dbits)
    write(ll_code[256], ll_len[256])


def _write_block(w, raw: bytes, tokens, final: bool):
    syms = _symbolize(tokens)
    ll_len, d_len, hlit, hdist, cl_len, hclen, rle, header_bits = _dynamic_header(syms)
    dynamic_bits = 3 + header_bits + _payload_bits(syms, ll_len, d_len)
    fixed_bits = 3 + _payload_bits(syms, _FIXED_LITLEN, _FIXED_DIST)
    pad = (8 - (w.nbits + 3) % 8) % 8
    stored_bits = 3 + pad + 32 + 8 * len(raw) if len(raw) <= 65535 else None

    bfinal = 1 if final else 0
    if stored_bits is not None and stored_bits <= min(fixed_bits, dynamic_bits):
        w.write(bfinal, 1)
        w.write(0, 2)
        w.align()
        n = len(raw)
        w.write(n, 16)
        w.write(n ^ 0xFFFF, 16)
        w.out.extend(raw)
    elif fixed_bits <= dynamic_bits:
        w.write(bfinal, 1)
        w.write(1, 2)
        _write_payload(w, syms, _FIXED_LITLEN, _FIXED_DIST)
    else:
        w.write(bfinal, 1)
        w.write(2, 2)
        w.write(hlit - 257, 5)
        w.write(hdist - 1, 5)
        w.write(hclen - 4, 4)
        for s in _CL_ORDER[:hclen]:
            w.write(cl_len[s], 3)
        cl_code = canonical_codes(cl_len)
        for sym, extra, ebits in rle:
            w.write(cl_code[sym], cl_len[sym])
            if ebits:
                w.write(extra, ebits)
        _write_payload(w, syms, ll_len, d_len)


def deflate_raw(data: bytes) -> bytes:
    """Raw DEFLATE stream for ``data`` under the pinned policy."""
    data = bytes(data)
    w = _BitWriter()
    if not data:
        w.write(1, 1)
        w.write(1, 2)
        w.write(0, 7)  # fixed-code EOB
        return w.getvalue()
    tokens = lz77_tokens(data)
    pos = 0
    for start in range(0, len(tokens), BLOCK_TOKENS):
        chunk = tokens[start:start + BLOCK_TOKENS]
        span = sum(1 if isinstance(t, int) else t[0] for t in chunk)
        _write_block(w, data[pos:pos + span], chunk,
                     final=start + BLOCK_TOKENS >= len(tokens))
        pos += span
    return w.getvalue()


def gzip_compress(data: bytes) -> bytes:
    """gzip member wrapping :func:`deflate_raw`."""
    data = bytes(data)
    trailer = (zlib.crc32(data) & 0xFFFFFFFF).to_bytes(4, "little")
    trailer += (len(data) & 0xFFFFFFFF).to_bytes(4, "little")
    return GZIP_HEADER + deflate_raw(data) + trailer
