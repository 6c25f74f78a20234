"""Ternary symbolization of displacement series and output statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class UndefinedStatistic(ValueError):
    """A statistic has no value for this input (e.g. an empty sequence)."""


_ALPHABETS = {"ternary": (-1, 0, 1), "binary": (-1, 1)}
_ENCODE = {1: "+", 0: "0", -1: "-"}
_DECODE = {"+": 1, "0": 0, "-": -1}


@dataclass(frozen=True)
class SymbolSeq:
    symbols: tuple
    alphabet: str = "ternary"
    provenance: str = ""

    def __post_init__(self):
        if self.alphabet not in _ALPHABETS:
            raise ValueError(f"unknown alphabet {self.alphabet!r}")
        allowed = set(_ALPHABETS[self.alphabet])
        symbols = tuple(int(s) for s in self.symbols)
        if not allowed.issuperset(symbols):
            raise ValueError(f"symbols outside the {self.alphabet} alphabet")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self):
        return len(self.symbols)

    def to_bytes(self) -> bytes:
        """One byte per symbol: '+', '0', '-'."""
        return "".join(_ENCODE[s] for s in self.symbols).encode("ascii")

    @classmethod
    def from_bytes(cls, data: bytes, alphabet: str = "ternary", provenance: str = "") -> "SymbolSeq":
        return cls(tuple(_DECODE[c] for c in data.decode("ascii")), alphabet, provenance)


def ternarize(a: float, tau: float) -> int:
    """+1 above ``tau``, -1 below ``-tau``, 0 on the closed band between."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if math.isnan(a):
        raise ValueError("cannot ternarize NaN")
    if a > tau:
        return 1
    if a < -tau:
        return -1
    return 0


def ternarize_array(a: np.ndarray, tau: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if np.isnan(a).any():
        raise ValueError("cannot ternarize NaN")
    return np.where(a > tau, 1, np.where(a < -tau, -1, 0)).astype(np.int8)


def output_sequence(field, config, tau: float = 0.1) -> SymbolSeq:
    """Concatenate the symbolized series of nodes N-5..N-1 over steps 1..M."""
    values = np.asarray(getattr(field, "values", field))
    if values.shape != config.shape:
        raise ValueError(f"field shape {values.shape} != expected {config.shape}")
    if config.N < 6:
        raise ValueError("output nodes N-5..N-1 need N >= 6")
    N = config.N
    block = ternarize_array(values[N - 5:N, 1:], tau)
    return SymbolSeq(tuple(block.ravel().tolist()), "ternary", f"nodes {N - 5}..{N - 1}")


def nonzero_subsequence(seq: SymbolSeq) -> SymbolSeq:
    return SymbolSeq(tuple(s for s in seq.symbols if s != 0), "binary",
                     f"nonzero({seq.provenance})")


def frequency_ones(seq: SymbolSeq) -> float:
    """Fraction of +1 symbols."""
    if len(seq) == 0:
        raise UndefinedStatistic("frequency of ones is undefined for an empty sequence")
    return seq.symbols.count(1) / len(seq)
