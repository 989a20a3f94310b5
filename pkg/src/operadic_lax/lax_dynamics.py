"""Operadic Lax dynamics of 3-dimensional binary algebras over the oscillator.

A binary multiplication ``mu`` (degree-2 :class:`Operation`, ``dim == 3``)
evolves by ``dmu/dt = [M, mu]`` with ``M`` the constant rotation generator of
the classical 3x3 Lax pair.  For anti-commutative ``mu`` nine numbers suffice;
they are stored in the fixed chart :data:`COORD_LABELS`::

    (mu^1_23, mu^2_13, mu^1_31, mu^2_23, mu^1_12, mu^2_12, mu^3_13, mu^3_23, mu^3_12)

This order is the one in which the Gamma-matrix factorization of the
closed-form residual holds column by column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .operad import gerstenhaber_bracket
from .oscillator import (
    DEFAULT_DT,
    OscState,
    aux_functions,
    central_difference,
    check_cut_distance,
    exact_trajectory,
    hamiltonian,
    initial_state,
    lax_M,
    phase,
)
from .tensor_core import Operation

# (upper, lower1, lower2), 1-based
COORD_INDICES: tuple[tuple[int, int, int], ...] = (
    (1, 2, 3),
    (2, 1, 3),
    (1, 3, 1),
    (2, 2, 3),
    (1, 1, 2),
    (2, 1, 2),
    (3, 1, 3),
    (3, 2, 3),
    (3, 1, 2),
)
COORD_LABELS = tuple(f"mu_{i}_{j}{k}" for i, j, k in COORD_INDICES)
# index of mu^3_12, which is constant in time
CONSTANT_COORD = 8

ANTICOMM_TOL = 1e-12
RIGIDITY_THRESHOLD = 1e-9
RIGIDITY_SAMPLES = 256


def as_structure_constants(mu) -> Operation:
    """Accept an Operation or a (3, 3, 3) array; validate dim 3, degree 2."""
    if not isinstance(mu, Operation):
        mu = Operation.from_array(mu)
    if mu.dim != 3 or mu.degree != 2:
        raise ShapeError(f"expected dim-3 degree-2 structure constants, got {mu!r}")
    return mu


def oscillator_M(omega: float) -> Operation:
    """The Lax generator M as a degree-1 operation (coeffs[a, j] = M^a_j)."""
    return Operation(3, 1, lax_M(omega))


# -- coordinate chart ----------------------------------------------------------


def to_coords(mu) -> np.ndarray:
    """Project structure constants onto the nine anti-commutative coordinates."""
    c = as_structure_constants(mu).coeffs
    return np.array([c[i - 1, j - 1, k - 1] for i, j, k in COORD_INDICES])


def from_coords(x: Sequence[float]) -> Operation:
    """Embed nine coordinates as an anti-commutative multiplication."""
    x = np.asarray(x, dtype=float)
    if x.shape != (9,):
        raise ShapeError(f"expected 9 coordinates, got shape {x.shape}")
    c = np.zeros((3, 3, 3))
    for value, (i, j, k) in zip(x, COORD_INDICES):
        c[i - 1, j - 1, k - 1] = value
        c[i - 1, k - 1, j - 1] = -value
    return Operation(3, 2, c)


# -- right-hand sides ----------------------------------------------------------


def general_lax_rhs(mu, M, method: str = "formula") -> Operation:
    """dmu/dt = [M, mu] for a degree-1 ``M``.

    ``method="formula"`` contracts
    ``mu^s_jk M^i_s - M^s_j mu^i_sk - M^s_k mu^i_js`` directly;
    ``method="bracket"`` goes through the Gerstenhaber bracket.
    """
    if not isinstance(mu, Operation):
        mu = Operation.from_array(mu)
    if not isinstance(M, Operation):
        M = Operation.from_array(M)
    if M.degree != 1 or M.dim != mu.dim or mu.degree != 2:
        raise ShapeError(f"need degree-1 M and degree-2 mu of equal dim, got {M!r}, {mu!r}")
    if method == "bracket":
        return gerstenhaber_bracket(M, mu)
    if method != "formula":
        raise ValueError(f"unknown method {method!r}")
    m, a = mu.coeffs, M.coeffs
    out = (
        np.einsum("is,sjk->ijk", a, m)
        - np.einsum("sj,isk->ijk", a, m)
        - np.einsum("sk,ijs->ijk", a, m)
    )
    return Operation(mu.dim, 2, out)


def lemma52_rhs(mu, omega: float) -> Operation:
    """The 27 component equations for the oscillator M, written out by hand.

    Kept deliberately literal so it can be cross-checked against
    :func:`general_lax_rhs`.
    """
    c = as_structure_constants(mu).coeffs

    def m(i, j, k):
        return c[i - 1, j - 1, k - 1]

    h = 0.5 * omega
    d = np.zeros((3, 3, 3))

    def put(i, j, k, value):
        d[i - 1, j - 1, k - 1] = value

    put(1, 1, 1, -h * (m(2, 1, 1) + m(1, 1, 2) + m(1, 2, 1)))
    put(1, 1, 2, -h * (m(2, 1, 2) - m(1, 1, 1) + m(1, 2, 2)))
    put(1, 2, 1, -h * (m(2, 2, 1) - m(1, 1, 1) + m(1, 2, 2)))
    put(1, 2, 2, -h * (m(2, 2, 2) - m(1, 1, 2) - m(1, 2, 1)))
    put(2, 1, 1, h * (m(1, 1, 1) - m(2, 1, 2) - m(2, 2, 1)))
    put(2, 1, 2, h * (m(1, 1, 2) + m(2, 1, 1) - m(2, 2, 2)))
    put(2, 2, 1, h * (m(1, 2, 1) + m(2, 1, 1) - m(2, 2, 2)))
    put(2, 2, 2, h * (m(1, 2, 2) + m(2, 1, 2) + m(2, 2, 1)))
    put(3, 3, 3, 0.0)

    put(1, 1, 3, -h * (m(2, 1, 3) + m(1, 2, 3)))
    put(1, 2, 3, -h * (m(2, 2, 3) - m(1, 1, 3)))
    put(1, 3, 1, -h * (m(2, 3, 1) + m(1, 3, 2)))
    put(1, 3, 2, -h * (m(2, 3, 2) - m(1, 3, 1)))
    put(2, 1, 3, -h * (m(2, 2, 3) - m(1, 1, 3)))
    put(2, 2, 3, h * (m(1, 2, 3) + m(2, 1, 3)))
    put(2, 3, 1, -h * (m(2, 3, 2) - m(1, 3, 1)))
    put(2, 3, 2, h * (m(1, 3, 2) + m(2, 3, 1)))
    put(3, 3, 2, h * m(3, 3, 1))

    put(1, 3, 3, -h * m(2, 3, 3))
    put(2, 3, 3, h * m(1, 3, 3))
    put(3, 1, 3, -h * m(3, 2, 3))
    put(3, 2, 3, h * m(3, 1, 3))
    put(3, 2, 2, h * (m(3, 1, 2) + m(3, 2, 1)))
    put(3, 2, 1, h * (m(3, 1, 1) - m(3, 2, 2)))
    put(3, 1, 1, -h * (m(3, 2, 1) + m(3, 1, 2)))
    put(3, 1, 2, h * (m(3, 1, 1) - m(3, 2, 2)))
    put(3, 3, 1, -h * m(3, 3, 2))
    return Operation(3, 2, d)


def anticommutative_rhs(x: Sequence[float], omega: float) -> np.ndarray:
    """The nine reduced equations, in the :data:`COORD_LABELS` chart."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 9:
        raise ShapeError(f"expected 9 coordinates, got shape {x.shape}")
    h = 0.5 * omega
    m1_23, m2_13, m1_31, m2_23, m1_12, m2_12, m3_13, m3_23, m3_12 = np.moveaxis(x, -1, 0)
    m1_13 = -m1_31
    return np.stack(
        [
            h * (m1_13 - m2_23),  # d mu^1_23
            -h * (m2_23 - m1_13),  # d mu^2_13
            h * (m1_23 + m2_13),  # d mu^1_31 = -d mu^1_13
            h * (m2_13 + m1_23),  # d mu^2_23
            -h * m2_12,  # d mu^1_12
            h * m1_12,  # d mu^2_12
            -h * m3_23,  # d mu^3_13
            h * m3_13,  # d mu^3_23
            np.zeros_like(m3_12),  # d mu^3_12
        ],
        axis=-1,
    )


# -- closed-form family --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ParamVector:
    """The nine real constants C1..C9 of the closed-form family."""

    c: np.ndarray

    def __post_init__(self):
        arr = np.array(self.c, dtype=float).reshape(-1)
        if arr.shape != (9,):
            raise ShapeError(f"expected 9 parameters, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("parameters must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "c", arr)

    @classmethod
    def from_dict(cls, data: dict) -> ParamVector:
        return cls([float(data.get(f"C{nu}", 0.0)) for nu in range(1, 10)])

    def get(self, nu: int) -> float:
        """C_nu with 1-based nu."""
        if not 1 <= nu <= 9:
            raise IndexError(f"parameter index {nu} out of range 1..9")
        return float(self.c[nu - 1])

    def as_dict(self) -> dict[str, float]:
        return {f"C{nu}": float(v) for nu, v in enumerate(self.c, start=1)}

    @property
    def condition_satisfied(self) -> bool:
        return representation_condition(self)

    @property
    def needs_aux(self) -> bool:
        return bool(np.any(self.c[4:8] != 0.0))

    def __repr__(self):
        body = ", ".join(f"C{nu}={v:g}" for nu, v in enumerate(self.c, start=1))
        return f"ParamVector({body})"


def representation_condition(C: ParamVector) -> bool:
    """C2^2 + C3^2 + C5^2 + C6^2 + C7^2 + C8^2 != 0 (exact comparison).

    Tested as "some entry is nonzero", which is equivalent and immune to
    underflow of the squares.
    """
    return bool(np.any(C.c[[1, 2, 4, 5, 6, 7]] != 0.0))


def _coords_from_phase_space(C, q, p, omega, a_plus, a_minus):
    c1, c2, c3, c4, c5, c6, c7, c8, c9 = C.c
    wq = omega * q
    return np.stack(
        np.broadcast_arrays(
            c2 * p - c3 * wq - c4,
            c2 * p - c3 * wq + c4,
            c2 * wq + c3 * p - c1,
            c2 * wq + c3 * p + c1,
            c5 * a_plus + c6 * a_minus,
            c5 * a_minus - c6 * a_plus,
            c7 * a_plus + c8 * a_minus,
            c7 * a_minus - c8 * a_plus,
            c9 + 0.0 * q,
        ),
        axis=-1,
    )


def closed_form_coords(C: ParamVector, s: OscState, branch: int = 1, theta: float | None = None) -> np.ndarray:
    if C.needs_aux:
        aux = aux_functions(s, branch, theta)
        ap, am = aux.a_plus, aux.a_minus
    else:
        ap = am = 0.0
    return _coords_from_phase_space(C, s.q, s.p, s.omega, ap, am)


def closed_form_mu(C: ParamVector, s: OscState, branch: int = 1, theta: float | None = None) -> Operation:
    """The anti-commutative multiplication of the closed-form family at ``s``.

    ``theta`` optionally fixes the lift of the phase used for A+/A-.
    Raises :class:`DomainError` at H = 0 unless C5..C8 all vanish.
    """
    return from_coords(closed_form_coords(C, s, branch, theta))


def closed_form_series(C: ParamVector, s0: OscState, times, branch: int = 1) -> np.ndarray:
    """Closed form along the exact trajectory through ``s0``, shape (len(times), 9).

    Uses the unwrapped trajectory phase, so the result is smooth in t even
    where the principal phase jumps.
    """
    t = np.asarray(times, dtype=float)
    w = s0.omega
    q = s0.q * np.cos(w * t) + s0.p / w * np.sin(w * t)
    p = s0.p * np.cos(w * t) - w * s0.q * np.sin(w * t)
    if C.needs_aux:
        H = hamiltonian(s0)
        if not H > 0:
            raise DomainError("auxiliary functions are undefined at H = 0")
        r = math.sqrt(2.0 * math.sqrt(2.0 * H))
        theta = phase(s0) + w * t
        ap = branch * r * np.cos(0.5 * theta)
        am = branch * r * np.sin(0.5 * theta)
    else:
        ap = am = np.zeros_like(t)
    return _coords_from_phase_space(C, q, p, w, ap, am)


PathFn = Callable[[float], OscState]


def _resolve_path(s0: OscState, path: PathFn | None) -> PathFn:
    if path is None:
        return lambda tau: exact_trajectory(s0, tau)
    return path


def theorem_residual(
    C: ParamVector,
    s0: OscState,
    t: float,
    dt: float = DEFAULT_DT,
    branch: int = 1,
    path: PathFn | None = None,
) -> np.ndarray:
    """d/dt closed_form (central differences) minus the reduced Lax right-hand side.

    Evaluated along ``path`` (default: the exact trajectory through ``s0``);
    vanishes up to O(dt^2) on genuine solutions.
    """
    path = _resolve_path(s0, path)
    if C.needs_aux:
        for tau in (t - dt, t, t + dt):
            check_cut_distance(path(tau))

    def x_at(tau):
        return closed_form_coords(C, path(tau), branch)

    here = path(t)
    return central_difference(x_at, t, dt) - anticommutative_rhs(x_at(t), here.omega)


def g_values(
    s0: OscState, t: float, dt: float = DEFAULT_DT, branch: int = 1, path: PathFn | None = None
) -> dict[str, float]:
    """The four defect functions G+-^w and G+-^(w/2) along a path at time t."""
    path = _resolve_path(s0, path)
    for tau in (t - dt, t, t + dt):
        check_cut_distance(path(tau))

    def sample(tau):
        s = path(tau)
        aux = aux_functions(s, branch)
        return np.array([s.q, s.p, aux.a_plus, aux.a_minus])

    q, p, ap, am = sample(t)
    dq, dp, dap, dam = central_difference(sample, t, dt)
    w = path(t).omega
    return {
        "G+w": float(dp + w * w * q),
        "G-w": float(w * (dq - p)),
        "G+w/2": float(dap + 0.5 * w * am),
        "G-w/2": float(dam - 0.5 * w * ap),
    }


def gamma_matrix(
    s0: OscState, t: float, dt: float = DEFAULT_DT, branch: int = 1, path: PathFn | None = None
) -> np.ndarray:
    """9x9 matrix Gamma with ``theorem_residual == C.c @ Gamma`` for every C.

    Laid out as displayed in the literature: row index = parameter beta,
    column index = coordinate alpha.  Rows 1, 4 and 9 (C1, C4, C9) and column
    9 (mu^3_12) vanish identically.
    """
    g = g_values(s0, t, dt, branch, path)
    gp, gm, hp, hm = g["G+w"], g["G-w"], g["G+w/2"], g["G-w/2"]
    G = np.zeros((9, 9))
    G[1, :4] = [gp, gp, gm, gm]
    G[2, :4] = [-gm, -gm, gp, gp]
    G[4, 4:6] = [hp, hm]
    G[5, 4:6] = [hm, -hp]
    G[6, 6:8] = [hp, hm]
    G[7, 6:8] = [hm, -hp]
    return G


# -- seeding from initial structure constants ----------------------------------


def check_anticommutative_tensor(mu) -> float:
    c = as_structure_constants(mu).coeffs
    return float(np.max(np.abs(c + np.swapaxes(c, 1, 2))))


def solve_params(mu0, p0: float) -> ParamVector:
    """The unique C with ``closed_form_mu(C, (q=0, p=p0)) == mu0``."""
    if not p0 > 0:
        raise DomainError(f"p0 must be positive, got {p0}")
    mu0 = as_structure_constants(mu0)
    if check_anticommutative_tensor(mu0) > ANTICOMM_TOL:
        raise DomainError("initial multiplication is not anti-commutative")
    x = to_coords(mu0)
    root = math.sqrt(2.0 * p0)
    # + 0.0 turns the -0.0 produced by negated zeros into 0.0
    return ParamVector(
        np.array([
            0.5 * (x[3] - x[2]),
            (x[1] + x[0]) / (2.0 * p0),
            (x[3] + x[2]) / (2.0 * p0),
            0.5 * (x[1] - x[0]),
            x[4] / root,
            -x[5] / root,
            x[6] / root,
            -x[7] / root,
            x[8],
        ])
        + 0.0
    )


@dataclass(frozen=True)
class RigidityResult:
    verdict: str  # "rigid" or "deformed"
    condition_satisfied: bool
    max_deviation: float
    params: ParamVector
    message: str


def classify_rigidity(
    mu0,
    p0: float,
    omega: float,
    n_samples: int = RIGIDITY_SAMPLES,
    threshold: float = RIGIDITY_THRESHOLD,
) -> RigidityResult:
    """Rigid vs dynamically deformed, seeded at q = 0, p = p0.

    The closed form is sampled over one period 2 pi / omega; mu^3_12 is
    ignored since it never moves.
    """
    C = solve_params(mu0, p0)
    cond = representation_condition(C)
    s0 = initial_state(p0, omega)
    times = np.arange(n_samples) * (2.0 * math.pi / omega / n_samples)
    series = closed_form_series(C, s0, times)
    x0 = to_coords(mu0)
    movable = [k for k in range(9) if k != CONSTANT_COORD]
    deviation = float(np.max(np.abs(series[:, movable] - x0[movable])))
    deformed = cond and deviation > threshold
    if deformed:
        message = "dynamical deformation: mu(t) moves along the oscillator flow"
    elif not cond:
        message = (
            "dynamically rigid; the non-degeneracy condition on C2, C3, C5..C8 fails, "
            "so this seeding yields no operadic Lax representation"
        )
    else:
        message = "dynamically rigid although the non-degeneracy condition holds"
    return RigidityResult("deformed" if deformed else "rigid", cond, deviation, C, message)
