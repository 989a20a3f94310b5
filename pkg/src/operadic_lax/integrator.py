"""Fixed-step RK4 for the joint flow of (q, p) and the nine structure constants.

This is the independent numerical oracle for the closed-form family: it only
knows the right-hand sides, never the solution formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import IntegrationError, ShapeError
from .lax_dynamics import anticommutative_rhs
from .oscillator import OscState, hamiltonian_vector_field

# relative slack when deciding whether t_end is a whole number of steps
_GRID_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class CoupledState:
    t: float
    osc: OscState
    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.shape != (9,):
            raise ShapeError(f"expected 9 structure-constant coordinates, got shape {mu.shape}")
        if not (math.isfinite(self.t) and np.all(np.isfinite(mu))):
            raise ValueError("coupled state must be finite")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([[self.osc.q, self.osc.p], self.mu])


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float
    t_end: float
    record_every: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.dt <= self.t_end:
            raise ValueError(f"dt={self.dt} exceeds t_end={self.t_end}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded samples: ``times`` (n,), ``q``/``p`` (n,), ``mu`` (n, 9)."""

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    mu: np.ndarray
    omega: float

    def state(self, k: int) -> CoupledState:
        return CoupledState(
            float(self.times[k]), OscState(float(self.q[k]), float(self.p[k]), self.omega), self.mu[k]
        )

    def __len__(self):
        return len(self.times)


def coupled_rhs(x: CoupledState) -> tuple[float, float, np.ndarray]:
    """(dq/dt, dp/dt, dmu/dt).  The mu-part ignores (q, p): the two flows share only time."""
    dq, dp = hamiltonian_vector_field(x.osc)
    return dq, dp, anticommutative_rhs(x.mu, x.osc.omega)


def time_grid(cfg: IntegrationConfig) -> tuple[int, float, np.ndarray, np.ndarray]:
    """``(n_steps, last_dt, record_mask, times)`` for a config.

    ``n_steps`` full steps of ``dt`` are followed by one shortened step of
    ``last_dt`` (0 when ``t_end`` is a whole number of steps), so the grid
    lands exactly on ``t_end``.  Steps 0 and the final one are always recorded.
    """
    ratio = cfg.t_end / cfg.dt
    n_steps = int(round(ratio))
    if abs(ratio - n_steps) <= _GRID_RTOL * max(ratio, 1.0):
        last_dt = 0.0
    else:
        n_steps = int(math.floor(ratio))
        last_dt = cfg.t_end - n_steps * cfg.dt
    mask = np.zeros(n_steps + 1, dtype=bool)
    mask[:: cfg.record_every] = True
    if last_dt == 0.0:
        mask[n_steps] = True
    times = np.arange(n_steps + 1)[mask] * cfg.dt
    if last_dt == 0.0:
        times[-1] = cfg.t_end
    else:
        times = np.append(times, cfg.t_end)
    return n_steps, last_dt, mask, times


def rk4_run_many(x0s: Sequence[CoupledState], cfg: IntegrationConfig, backend: str | None = None) -> list[Trajectory]:
    """Integrate several initial states sharing one omega in a single kernel call."""
    if not x0s:
        return []
    omega = x0s[0].osc.omega
    if any(x.osc.omega != omega for x in x0s):
        raise ValueError("all initial states in a batch must share omega")
    t0 = x0s[0].t
    if any(x.t != t0 for x in x0s):
        raise ValueError("all initial states in a batch must share the start time")
    n_steps, last_dt, mask, times = time_grid(cfg)
    y0 = np.stack([x.as_vector() for x in x0s])
    records, bad = _kernels.rk4_loops(y0, omega, cfg.dt, n_steps, last_dt, mask, backend=backend)
    if bad >= 0:
        raise IntegrationError(
            f"non-finite state at step {bad} (t ~ {t0 + min(bad * cfg.dt, cfg.t_end):.6g}); "
            f"dt={cfg.dt}, omega={omega}"
        )
    return [
        Trajectory(t0 + times, records[:, b, 0].copy(), records[:, b, 1].copy(), records[:, b, 2:].copy(), omega)
        for b in range(len(x0s))
    ]


def rk4_run(x0: CoupledState, cfg: IntegrationConfig, backend: str | None = None) -> Trajectory:
    """Classic four-stage RK4 from ``x0.t`` to ``x0.t + cfg.t_end``."""
    return rk4_run_many([x0], cfg, backend=backend)[0]
