"""Explicit finite-difference solver for the forced 1D wave equation.

The beam is clamped at both ends.  Nodes are indexed ``j = 0..N+1`` with
``x_j = j * dx`` and time steps ``n = 0..M`` with ``t_n = n * dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO, Union

import numpy as np


class ConfigError(ValueError):
    """Invalid beam configuration, including a CFL violation."""


@dataclass(frozen=True)
class BeamConfig:
    L: float = 20.0
    T: float = 70.0
    E: float = 0.7
    rho: float = 0.4
    N: int = 30
    M: int = 200

    def __post_init__(self):
        if not (self.L > 0 and self.T > 0 and self.E > 0 and self.rho > 0):
            raise ConfigError("L, T, E and rho must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be an integer >= 1, got {self.N!r}")
        if int(self.M) != self.M or self.M < 2:
            raise ConfigError(f"M must be an integer >= 2, got {self.M!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", int(self.M))

    @property
    def dx(self) -> float:
        return self.L / (self.N + 1)

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def shape(self) -> tuple[int, int]:
        return self.N + 2, self.M + 1

    def x(self) -> np.ndarray:
        return np.arange(self.N + 2) * self.dx

    def t(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.dt


REFERENCE_CONFIG = BeamConfig()


def cfl_number(config: BeamConfig) -> float:
    """Courant number sqrt(E/rho) * dt/dx; the scheme is stable iff <= 1."""
    return math.sqrt(config.E / config.rho) * config.dt / config.dx


@dataclass
class ForceField:
    """Applied force grid indexed ``values[j, n]``.

    ``meta`` carries whatever produced the grid (see
    :func:`elastica.forcing.assemble_force_field`).
    """

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, config: BeamConfig) -> "ForceField":
        return cls(np.zeros(config.shape))


@dataclass
class DisplacementField:
    values: np.ndarray

    def __getitem__(self, idx):
        return self.values[idx]


InitialCondition = Union[None, Callable[[int], float], np.ndarray]


def _initial(ic: InitialCondition, config: BeamConfig) -> np.ndarray:
    n = config.N + 2
    if ic is None:
        return np.zeros(n)
    if callable(ic):
        return np.array([float(ic(j)) for j in range(n)])
    arr = np.asarray(ic, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"initial condition must have {n} entries, got shape {arr.shape}")
    return arr.copy()


def simulate(
    config: BeamConfig,
    force: ForceField,
    u0: InitialCondition = None,
    u1: InitialCondition = None,
) -> DisplacementField:
    """Integrate the forced wave equation with the three-level explicit scheme.

    ``u0`` and ``u1`` are the initial displacement and velocity, given as a
    function of the node index or an array over nodes ``0..N+1``; ``None``
    means identically zero.  Step 1 is the first-order start
    ``u(j,1) = u0(j) + dt*u1(j)``.  Forces on the boundary nodes and at step
    ``M`` never enter the recurrence.
    """
    courant = cfl_number(config)
    if courant > 1.0:
        raise ConfigError(f"CFL number {courant:.6f} exceeds 1; scheme is unstable")
    f = np.asarray(force.values, dtype=float)
    if f.shape != config.shape:
        raise ValueError(f"force grid shape {f.shape} != expected {config.shape}")

    N, M, dt = config.N, config.M, config.dt
    c2 = (dt / config.dx) ** 2 * config.E / config.rho
    dt2 = dt * dt

    start = _initial(u0, config)
    velocity = _initial(u1, config)
    if start[0] != 0.0 or start[N + 1] != 0.0:
        raise ValueError("u0 must vanish at both clamped ends")

    u = np.zeros(config.shape)
    inner = slice(1, N + 1)
    u[inner, 0] = start[inner]
    u[inner, 1] = start[inner] + dt * velocity[inner]
    for n in range(1, M):
        cur = u[:, n]
        u[inner, n + 1] = (
            2.0 * cur[inner]
            - u[inner, n - 1]
            + dt2 * f[inner, n]
            + c2 * (cur[2:] - 2.0 * cur[inner] + cur[:-2])
        )
    return DisplacementField(u)


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def dump_field(field: DisplacementField, config: BeamConfig, out: Optional[TextIO] = None) -> str:
    """Tab-separated ``x, t, u`` table, one row per grid point, time-major.

    Returns the text; also writes it to ``out`` when given.
    """
    values = np.asarray(field.values)
    if values.shape != config.shape:
        raise ValueError(f"field shape {values.shape} != expected {config.shape}")
    xs = config.x()
    lines = ["x\tt\tu"]
    for n, t in enumerate(config.t()):
        tt = _fmt(t)
        for j, x in enumerate(xs):
            lines.append(f"{_fmt(x)}\t{tt}\t{_fmt(values[j, n])}")
    text = "\n".join(lines) + "\n"
    if out is not None:
        out.write(text)
    return text
