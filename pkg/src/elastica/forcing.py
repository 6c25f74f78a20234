"""Seeded force sequences for the beam experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beam import BeamConfig, ForceField
from .rng import Xoshiro256
from .symbolize import SymbolSeq


@dataclass(frozen=True)
class TernaryForceSpec:
    """System force: 0 w.p. 1-p, +1 and -1 w.p. p/2 each, times ``amplitude``."""

    p: float
    seed: int
    amplitude: float = 30.0
    length: int = 200
    node: int = 15

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"p must lie in (0, 1], got {self.p!r}")
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if self.length < 1:
            raise ValueError("length must be >= 1")


@dataclass(frozen=True)
class BinaryForceSpec:
    """Input force: fair +-1 draws times ``amplitude``."""

    seed: int
    amplitude: float = 10.0
    length: int = 200
    node: int = 1

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if self.length < 1:
            raise ValueError("length must be >= 1")


def draw_ternary(spec: TernaryForceSpec) -> tuple[SymbolSeq, np.ndarray]:
    """Draw the system symbols and their scaled real series.

    Per symbol: one uniform ``u``; ``u < 1 - p`` gives 0, otherwise the sign
    comes from the top bit of the next draw (1 -> +1, 0 -> -1).
    """
    gen = Xoshiro256(spec.seed)
    zero_below = 1.0 - spec.p
    symbols = []
    for _ in range(spec.length):
        if gen.random() < zero_below:
            symbols.append(0)
        else:
            symbols.append(1 if gen.bit() else -1)
    seq = SymbolSeq(tuple(symbols), "ternary", f"system p={spec.p:.9g} seed={spec.seed}")
    return seq, spec.amplitude * np.array(symbols, dtype=float)


def draw_binary(spec: BinaryForceSpec) -> tuple[SymbolSeq, np.ndarray]:
    """Fair +-1 symbols, one top bit per draw, and the scaled series."""
    gen = Xoshiro256(spec.seed)
    symbols = tuple(1 if gen.bit() else -1 for _ in range(spec.length))
    seq = SymbolSeq(symbols, "binary", f"input seed={spec.seed}")
    return seq, spec.amplitude * np.array(symbols, dtype=float)


def entropy(p: float) -> float:
    """Entropy in bits of the ternary draw: -(1-p)log2(1-p) - p log2(p/2)."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    h = -p * math.log2(p / 2.0)
    if p < 1.0:
        h -= (1.0 - p) * math.log2(1.0 - p)
    return h


def assemble_force_field(
    config: BeamConfig,
    system: TernaryForceSpec,
    input: Optional[BinaryForceSpec] = None,
) -> ForceField:
    """Place the system series (and the input series, if any) on the grid.

    Symbol ``k`` of a sequence lands at time step ``n = k + 1``; step 0 stays
    zero.  ``meta["system_symbols"]`` keeps the unscaled system grid, which
    is what the system description serializes.
    """
    for spec in (system, input):
        if spec is None:
            continue
        if spec.length != config.M:
            raise ValueError(f"sequence length {spec.length} != M = {config.M}")
        if not 1 <= spec.node <= config.N:
            raise ValueError(f"node {spec.node} outside 1..{config.N}")

    values = np.zeros(config.shape)
    sys_symbols = np.zeros(config.shape, dtype=np.int8)
    sys_seq, sys_series = draw_ternary(system)
    values[system.node, 1:] += sys_series
    sys_symbols[system.node, 1:] = sys_seq.symbols

    meta = {"config": config, "system": system, "input": input, "with_input": input is not None,
            "system_symbols": sys_symbols, "system_seq": sys_seq}
    if input is not None:
        in_seq, in_series = draw_binary(input)
        values[input.node, 1:] += in_series
        meta["input_seq"] = in_seq
    return ForceField(values, meta)
