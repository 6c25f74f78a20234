import math

import numpy as np
import pytest

from elastica.beam import REFERENCE_CONFIG, BeamConfig, ForceField
from elastica.complexity import (
    HEADER_BYTES, ComplexityReport, SystemDescription, bits_per_character, compress_len,
    deficiency_estimate, make_header, output_complexity, parse_system, serialize_system,
    system_complexity, x_prime,
)
from elastica.forcing import BinaryForceSpec, TernaryForceSpec, assemble_force_field
from elastica.rng import Xoshiro256
from elastica.symbolize import SymbolSeq, UndefinedStatistic


def _uniform_ternary(n, seed):
    g = Xoshiro256(seed)
    return SymbolSeq(tuple((1, 0, -1)[int(g.random() * 3)] for _ in range(n)))


def _desc(p, seed, with_input=False):
    inp = BinaryForceSpec(seed=seed + 1) if with_input else None
    return serialize_system(assemble_force_field(REFERENCE_CONFIG, TernaryForceSpec(p=p, seed=seed), inp))


def test_header_is_145_bytes_and_carries_parameters():
    h = make_header(REFERENCE_CONFIG, 0.25, 77)
    assert len(h) == HEADER_BYTES
    assert h.startswith(b"ELASTICA v1; L=20; T=70; E=0.7; rho=0.4; N=30; M=200; p=0.25; seed=77;")


def test_all_zero_body_and_total_length():
    desc = _desc(1e-12, 3)
    assert desc.body == b"0" * 6200
    assert desc.total_bytes == 6345


def test_body_is_node_major_and_excludes_input():
    desc = _desc(1.0, 5, with_input=True)
    assert desc.body[:15 * 200] == b"0" * 3000
    assert set(desc.body[15 * 200:16 * 200]) <= set(b"+-")
    assert desc.body[16 * 200:] == b"0" * 3000
    assert desc.body == _desc(1.0, 5).body


def test_seed_changes_header_only():
    f = assemble_force_field(REFERENCE_CONFIG, TernaryForceSpec(p=0.5, seed=9))
    g = ForceField(f.values, dict(f.meta, system=TernaryForceSpec(p=0.5, seed=10)))
    a, b = serialize_system(f), serialize_system(g)
    assert a.body == b.body and a.header != b.header


def test_serialize_rejects_wrong_shape():
    f = assemble_force_field(REFERENCE_CONFIG, TernaryForceSpec(p=0.5, seed=9))
    with pytest.raises(ValueError):
        serialize_system(f, BeamConfig(N=29))
    with pytest.raises(ValueError):
        serialize_system(ForceField.zeros(REFERENCE_CONFIG))


def test_parse_roundtrip():
    desc = _desc(0.4, 11)
    assert parse_system(desc.to_bytes()) == desc
    with pytest.raises(ValueError):
        SystemDescription(b"short", b"")


def test_compress_len_bounds():
    assert compress_len(b"0" * 6200) < 100
    data = _uniform_ternary(6200, 2024).to_bytes()
    assert 6200 * math.log2(3) / 8 * 0.9 <= compress_len(data) <= 6200


def test_system_ratio_of_zero_body():
    assert system_complexity(_desc(1e-12, 1)).ratio < 0.05


def test_entropy_ordering_on_matched_seeds():
    wins = sum(system_complexity(_desc(2 / 3, s)).ratio > system_complexity(_desc(q, s)).ratio
               for s in range(100) for q in (0.05, 0.95))
    assert wins >= 0.95 * 200


@pytest.mark.slow
def test_mean_ratio_increases_with_entropy():
    means = [np.mean([system_complexity(_desc(p, s)).ratio for s in range(200)])
             for p in (0.05, 0.35, 2 / 3)]
    assert means[0] < means[1] < means[2]


def test_campaign_ratios_bounded():
    for s in range(20):
        r = system_complexity(_desc(1.0 - s / 20, s, with_input=True)).ratio
        assert 0 < r <= 1.05


def test_output_complexity_bounds():
    assert output_complexity(SymbolSeq((0,) * 1000)).ratio < 0.05
    s = _uniform_ternary(1000, 5)
    assert output_complexity(s).ratio > 0.15
    doubled = SymbolSeq(s.symbols * 2)
    assert output_complexity(doubled).ratio < output_complexity(s).ratio


def test_deficiency_constant_sequence():
    # 1000*log2(3) - 8*28 with the pinned compressor
    d = deficiency_estimate(SymbolSeq((0,) * 1000))
    assert d == pytest.approx(1000 * math.log2(3) - 8 * compress_len(b"0" * 1000))
    assert d > 1350


def test_deficiency_random_and_floor():
    assert deficiency_estimate(_uniform_ternary(1000, 8)) < 400
    assert deficiency_estimate(SymbolSeq((1, -1, 1), "binary")) == 0.0


def test_x_prime():
    desc = _desc(0.5, 1)
    assert x_prime(desc, SymbolSeq((1,) * 600, "binary"), comp_len=300) == 0.5
    short = x_prime(desc, SymbolSeq((1,) * 10, "binary"))
    long = x_prime(desc, SymbolSeq((1,) * 20, "binary"))
    assert long < short
    with pytest.raises(UndefinedStatistic):
        x_prime(desc, SymbolSeq((), "binary"))


def test_bits_per_character():
    r = ComplexityReport(6345, 317.25)
    assert bits_per_character(r) == pytest.approx(0.05 * 6345 * 8 / 345)
    assert bits_per_character(r) == pytest.approx(7.357, abs=1e-3)
    assert bits_per_character(ComplexityReport(6345, 634.5)) == pytest.approx(2 * bits_per_character(r))
