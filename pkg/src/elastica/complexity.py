"""Compression-based complexity estimates: M, O, X' and randomness deficiency."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beam import REFERENCE_CONFIG, BeamConfig, ForceField
from .deflate import gzip_compress
from .symbolize import SymbolSeq, UndefinedStatistic

HEADER_BYTES = 145
# header + information-bearing force symbols, used to express M in bits/char
INFO_BYTES = 345

_SYMBOL_BYTES = {1: b"+", 0: b"0", -1: b"-"}


@dataclass(frozen=True)
class SystemDescription:
    header: bytes
    body: bytes

    def __post_init__(self):
        if len(self.header) != HEADER_BYTES:
            raise ValueError(f"header must be {HEADER_BYTES} bytes, got {len(self.header)}")
        if not set(self.body) <= set(b"+0-"):
            raise ValueError("body must only contain '+', '0', '-'")

    @property
    def total_bytes(self) -> int:
        return len(self.header) + len(self.body)

    def to_bytes(self) -> bytes:
        return self.header + self.body


@dataclass(frozen=True)
class ComplexityReport:
    raw_len: int
    comp_len: int

    @property
    def ratio(self) -> float:
        return self.comp_len / self.raw_len


def make_header(config: BeamConfig, p: float, seed: int) -> bytes:
    text = (f"ELASTICA v1; L={config.L:.9g}; T={config.T:.9g}; E={config.E:.9g}; "
            f"rho={config.rho:.9g}; N={config.N}; M={config.M}; p={p:.9g}; seed={seed};")
    return text.encode("ascii")[:HEADER_BYTES].ljust(HEADER_BYTES, b" ")


def serialize_system(force: ForceField, config: BeamConfig | None = None) -> SystemDescription:
    """Header plus the unscaled system symbols at nodes 0..N, steps 1..M, node-major.

    The input force is not part of the system and is never serialized.
    """
    config = config or force.meta.get("config", REFERENCE_CONFIG)
    symbols = force.meta.get("system_symbols")
    if symbols is None:
        raise ValueError("force field carries no system symbols")
    symbols = np.asarray(symbols)
    if symbols.shape != config.shape:
        raise ValueError(f"force grid shape {symbols.shape} != expected {config.shape}")
    system = force.meta["system"]
    body = b"".join(_SYMBOL_BYTES[int(s)] for s in symbols[:config.N + 1, 1:].ravel())
    return SystemDescription(make_header(config, system.p, system.seed), body)


def parse_system(data: bytes) -> SystemDescription:
    return SystemDescription(bytes(data[:HEADER_BYTES]), bytes(data[HEADER_BYTES:]))


def compress_len(data: bytes) -> int:
    """Size in bytes of the pinned gzip encoding of ``data``."""
    if len(data) == 0:
        raise ValueError("cannot measure the compressed length of empty data")
    return len(gzip_compress(data))


def system_complexity(desc: SystemDescription) -> ComplexityReport:
    """M: compressed over uncompressed length of the whole description."""
    return ComplexityReport(desc.total_bytes, compress_len(desc.to_bytes()))


def output_complexity(seq: SymbolSeq) -> ComplexityReport:
    """O: compressed over uncompressed length of the serialized sequence."""
    data = seq.to_bytes()
    return ComplexityReport(len(data), compress_len(data))


def deficiency_estimate(seq: SymbolSeq) -> float:
    """Bits of incompressibility missing: n*log2|alphabet| - 8*compressed, floored at 0."""
    if len(seq) == 0:
        raise ValueError("empty sequence")
    k = 3 if seq.alphabet == "ternary" else 2
    return max(0.0, len(seq) * math.log2(k) - 8 * compress_len(seq.to_bytes()))


def x_prime(desc: SystemDescription, subseq: SymbolSeq, comp_len: int | None = None) -> float:
    """Compressed system length per symbol of the binary output subsequence."""
    if len(subseq) == 0:
        raise UndefinedStatistic("X' is undefined for an empty output subsequence")
    if comp_len is None:
        comp_len = compress_len(desc.to_bytes())
    return comp_len / len(subseq)


def bits_per_character(desc_report: ComplexityReport) -> float:
    """M rescaled to bits per information-bearing character."""
    return desc_report.ratio * desc_report.raw_len * 8 / INFO_BYTES
