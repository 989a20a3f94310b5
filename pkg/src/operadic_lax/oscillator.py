"""Harmonic oscillator H = (p^2 + w^2 q^2) / 2 and its 3x3 Lax pair.

The auxiliary pair A+/A- is globalized through the phase
``theta = atan2(w q, p)``: with ``r = sqrt(2 sqrt(2H))`` we set
``A+ = r cos(theta/2)`` and ``A- = r sin(theta/2)``.  Along the flow theta
advances at rate w, so A+/A- rotate at w/2.  The cut sits at theta = pi
(q -> 0 from below with p < 0).  Callers that follow a trajectory across the
cut pass the unwrapped phase explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BranchCutError, DomainError

# minimum distance of theta from +-pi when finite differences straddle the cut
CUT_MARGIN = 0.1
DEFAULT_DT = 1e-5


@dataclass(frozen=True)
class OscState:
    q: float
    p: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.p)):
            raise ValueError(f"non-finite phase point ({self.q}, {self.p})")
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class AuxPair:
    a_plus: float
    a_minus: float


@dataclass(frozen=True)
class LaxMatrices:
    L: np.ndarray
    M: np.ndarray


def hamiltonian(s: OscState) -> float:
    return 0.5 * (s.p**2 + s.omega**2 * s.q**2)


def hamiltonian_vector_field(s: OscState) -> tuple[float, float]:
    """(dq/dt, dp/dt) = (p, -w^2 q)."""
    return s.p, -s.omega**2 * s.q


def exact_trajectory(s0: OscState, t: float) -> OscState:
    w = s0.omega
    c, sn = math.cos(w * t), math.sin(w * t)
    return OscState(s0.q * c + s0.p / w * sn, s0.p * c - w * s0.q * sn, w)


def initial_state(p0: float, omega: float) -> OscState:
    """The seeding point q = 0, p = p0 used for parameter fitting."""
    return OscState(0.0, float(p0), float(omega))


def lax_L(s: OscState) -> np.ndarray:
    wq = s.omega * s.q
    return np.array([[s.p, wq, 0.0], [wq, -s.p, 0.0], [0.0, 0.0, 1.0]])


def lax_M(omega: float) -> np.ndarray:
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    return 0.5 * omega * np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])


def lax_pair(s: OscState) -> LaxMatrices:
    return LaxMatrices(lax_L(s), lax_M(s.omega))


def classical_lax_residual(s: OscState) -> np.ndarray:
    """dL/dt along the Hamiltonian field minus (ML - LM); zero for a Lax pair."""
    dq, dp = hamiltonian_vector_field(s)
    wdq = s.omega * dq
    dL = np.array([[dp, wdq, 0.0], [wdq, -dp, 0.0], [0.0, 0.0, 0.0]])
    L, M = lax_L(s), lax_M(s.omega)
    return dL - (M @ L - L @ M)


def lax_spectrum(s: OscState) -> np.ndarray:
    """Sorted eigenvalues of L (symmetric, so real)."""
    return np.linalg.eigvalsh(lax_L(s))


def phase(s: OscState) -> float:
    """theta = atan2(w q, p) in (-pi, pi]."""
    return math.atan2(s.omega * s.q, s.p)


def trajectory_phase(s0: OscState, t: float) -> float:
    """Unwrapped phase of ``exact_trajectory(s0, t)``; continuous in t."""
    return phase(s0) + s0.omega * t


def lift_phase(s: OscState, reference: float) -> float:
    """The lift of ``phase(s)`` (mod 2 pi) closest to ``reference``."""
    theta = phase(s)
    return theta + 2.0 * math.pi * round((reference - theta) / (2.0 * math.pi))


def aux_functions(s: OscState, branch: int = 1, theta: float | None = None) -> AuxPair:
    """A+/A- at ``s``.

    ``theta`` may be any lift of the phase of ``s`` (e.g. from
    :func:`trajectory_phase`); by default the principal value is used.
    """
    if branch not in (1, -1):
        raise ValueError(f"branch must be +1 or -1, got {branch}")
    H = hamiltonian(s)
    if not H > 0:
        raise DomainError("auxiliary functions are undefined at H = 0")
    if theta is None:
        theta = phase(s)
    r = math.sqrt(2.0 * math.sqrt(2.0 * H))
    return AuxPair(branch * r * math.cos(0.5 * theta), branch * r * math.sin(0.5 * theta))


def aux_relations_residual(s: OscState, aux: AuxPair) -> float:
    """Max violation of A+^2 + A-^2 = 2 sqrt(2H), A+^2 - A-^2 = 2p, A+ A- = w q."""
    ap, am = aux.a_plus, aux.a_minus
    H = hamiltonian(s)
    return max(
        abs(ap**2 + am**2 - 2.0 * math.sqrt(2.0 * H)),
        abs(ap**2 - am**2 - 2.0 * s.p),
        abs(ap * am - s.omega * s.q),
    )


def check_cut_distance(s: OscState, margin: float = CUT_MARGIN) -> None:
    if abs(phase(s)) > math.pi - margin:
        raise BranchCutError(
            f"phase {phase(s):.6f} within {margin} of the cut at +-pi (q={s.q}, p={s.p})"
        )


Path = Callable[[float], OscState]


def central_difference(fn: Callable[[float], np.ndarray], t: float, dt: float) -> np.ndarray:
    return (np.asarray(fn(t + dt)) - np.asarray(fn(t - dt))) / (2.0 * dt)


def aux_derivative_residual(
    s0: OscState, t: float = 0.0, branch: int = 1, dt: float = DEFAULT_DT, path: Path | None = None
) -> tuple[float, float]:
    """(dA+/dt + w A-/2, dA-/dt - w A+/2) by central differences along a path.

    The default path is the exact trajectory through ``s0``.  Points within
    :data:`CUT_MARGIN` of the cut are rejected.
    """
    if path is None:
        path = lambda tau: exact_trajectory(s0, tau)  # noqa: E731
    for tau in (t - dt, t, t + dt):
        check_cut_distance(path(tau))

    def aux_at(tau):
        a = aux_functions(path(tau), branch)
        return np.array([a.a_plus, a.a_minus])

    w = path(t).omega
    ap, am = aux_at(t)
    dap, dam = central_difference(aux_at, t, dt)
    return float(dap + 0.5 * w * am), float(dam - 0.5 * w * ap)
