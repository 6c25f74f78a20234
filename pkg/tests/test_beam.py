import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elastica.beam import (
    REFERENCE_CONFIG, BeamConfig, ConfigError, ForceField, cfl_number, dump_field, simulate,
)

DT2 = 0.35 ** 2
C2 = (0.35 / (20 / 31)) ** 2 * 0.7 / 0.4


def impulse(config, j, n, value=1.0):
    f = ForceField.zeros(config)
    f.values[j, n] = value
    return f


def random_force(config, seed, scale=30.0):
    rng = np.random.default_rng(seed)
    f = ForceField.zeros(config)
    f.values[1:config.N + 1, :] = scale * rng.uniform(-1, 1, (config.N, config.M + 1))
    return f


def test_derived_steps():
    assert REFERENCE_CONFIG.dx == 20 / 31
    assert REFERENCE_CONFIG.dt == 70 / 200


def test_cfl_reference_config():
    # hand evaluation: sqrt(0.7/0.4) * 0.35 / (20/31)
    assert cfl_number(REFERENCE_CONFIG) == pytest.approx(0.717661, abs=1e-6)
    assert cfl_number(REFERENCE_CONFIG) == pytest.approx(math.sqrt(1.75) * 0.35 * 31 / 20, rel=1e-15)


def test_cfl_collapses_to_one():
    cfg = BeamConfig(L=10.0, T=10.0, E=2.0, rho=2.0, N=9, M=10)  # dx = dt = 1
    assert cfl_number(cfg) == pytest.approx(1.0, rel=1e-15)


def test_cfl_linear_in_dt():
    doubled = BeamConfig(M=400)
    assert cfl_number(doubled) == pytest.approx(cfl_number(REFERENCE_CONFIG) / 2, rel=1e-15)


@pytest.mark.parametrize("kw", [dict(L=0), dict(T=-1), dict(E=0), dict(rho=0), dict(N=0), dict(M=1)])
def test_invalid_config_rejected(kw):
    with pytest.raises(ConfigError):
        BeamConfig(**kw)


def test_cfl_violation_refused():
    unstable = BeamConfig(M=50)  # dt = 1.4 -> CFL ~ 2.87
    assert cfl_number(unstable) > 1
    with pytest.raises(ConfigError):
        simulate(unstable, ForceField.zeros(unstable))


def test_force_shape_mismatch():
    with pytest.raises(ValueError):
        simulate(REFERENCE_CONFIG, ForceField(np.zeros((31, 201))))


def test_u0_must_vanish_at_ends():
    with pytest.raises(ValueError):
        simulate(REFERENCE_CONFIG, ForceField.zeros(REFERENCE_CONFIG), u0=lambda j: 1.0)


def test_zero_is_fixed_point():
    u = simulate(REFERENCE_CONFIG, ForceField.zeros(REFERENCE_CONFIG)).values
    assert u.shape == (32, 201)
    assert not np.any(u)  # bitwise zero everywhere


def test_impulse_first_and_second_step():
    u = simulate(REFERENCE_CONFIG, impulse(REFERENCE_CONFIG, 15, 1)).values
    assert not np.any(u[:, :2])
    assert u[15, 2] == pytest.approx(0.1225, abs=1e-15)
    assert np.count_nonzero(u[:, 2]) == 1
    assert C2 == pytest.approx(0.515036, abs=1e-6)
    assert u[14, 3] == pytest.approx(C2 * DT2, abs=1e-12)
    assert u[16, 3] == pytest.approx(C2 * DT2, abs=1e-12)
    # centre node: 2*dt^2 - 2*c2*dt^2
    assert u[15, 3] == pytest.approx(2 * DT2 - 2 * C2 * DT2, abs=1e-12)


def test_boundaries_clamped_under_forcing():
    f = random_force(REFERENCE_CONFIG, 0)
    f.values[0, :] = 100.0  # boundary forces must be ignored
    f.values[-1, :] = -100.0
    u = simulate(REFERENCE_CONFIG, f).values
    assert not np.any(u[0]) and not np.any(u[-1])
    assert np.isfinite(u).all()


def test_step_M_force_ignored():
    f = impulse(REFERENCE_CONFIG, 10, REFERENCE_CONFIG.M, 1000.0)
    assert not np.any(simulate(REFERENCE_CONFIG, f).values)


def test_initial_conditions_enter_first_steps():
    u0 = np.zeros(32)
    u0[5] = 1.0
    u1 = np.zeros(32)
    u1[7] = 2.0
    u = simulate(REFERENCE_CONFIG, ForceField.zeros(REFERENCE_CONFIG), u0, u1).values
    assert u[5, 0] == 1.0 and u[5, 1] == 1.0
    assert u[7, 1] == pytest.approx(0.7)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3))
def test_linearity(seed, alpha):
    f = random_force(REFERENCE_CONFIG, seed)
    rng = np.random.default_rng(seed + 1)
    u0 = np.r_[0.0, rng.normal(size=30), 0.0]
    u1 = np.r_[0.0, rng.normal(size=30), 0.0]
    base = simulate(REFERENCE_CONFIG, f, u0, u1).values
    scaled = simulate(REFERENCE_CONFIG, ForceField(alpha * f.values), alpha * u0, alpha * u1).values
    np.testing.assert_allclose(scaled, alpha * base, rtol=1e-12, atol=1e-12 * np.abs(alpha * base).max())


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_superposition(seed):
    f1 = random_force(REFERENCE_CONFIG, seed)
    f2 = random_force(REFERENCE_CONFIG, seed + 17, scale=10.0)
    both = simulate(REFERENCE_CONFIG, ForceField(f1.values + f2.values)).values
    parts = simulate(REFERENCE_CONFIG, f1).values + simulate(REFERENCE_CONFIG, f2).values
    np.testing.assert_allclose(both, parts, rtol=1e-12, atol=1e-12 * np.abs(parts).max())


def test_mirror_symmetry():
    f = random_force(REFERENCE_CONFIG, 3)
    u = simulate(REFERENCE_CONFIG, f).values
    mirrored = simulate(REFERENCE_CONFIG, ForceField(f.values[::-1].copy())).values
    np.testing.assert_allclose(mirrored, u[::-1], rtol=1e-12, atol=1e-12 * np.abs(u).max())


@pytest.mark.parametrize("j0,n0", [(15, 1), (3, 40), (28, 100)])
def test_finite_speed(j0, n0):
    u = simulate(REFERENCE_CONFIG, impulse(REFERENCE_CONFIG, j0, n0)).values
    for n in range(REFERENCE_CONFIG.M + 1):
        for j in range(32):
            if abs(j - j0) > n - n0:
                assert u[j, n] == 0.0


def test_dump_field_zero():
    text = dump_field(simulate(REFERENCE_CONFIG, ForceField.zeros(REFERENCE_CONFIG)), REFERENCE_CONFIG)
    lines = text.splitlines()
    assert lines[0] == "x\tt\tu"
    assert len(lines) - 1 == 32 * 201 == 6432
    assert all(line.split("\t")[2] == "0" for line in lines[1:])


def test_dump_field_time_major_and_writes_sink():
    u = simulate(REFERENCE_CONFIG, impulse(REFERENCE_CONFIG, 15, 1))
    buf = io.StringIO()
    text = dump_field(u, REFERENCE_CONFIG, buf)
    assert buf.getvalue() == text
    rows = [line.split("\t") for line in text.splitlines()[1:]]
    assert rows[1][:2] == ["0.64516129", "0"]
    assert rows[32][:2] == ["0", "0.35"]
    row = rows[2 * 32 + 15]
    assert float(row[0]) == pytest.approx(15 * 20 / 31) and float(row[1]) == pytest.approx(0.7)
    assert row[2] == "0.1225"
