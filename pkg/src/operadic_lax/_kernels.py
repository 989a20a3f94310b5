"""RK4 time-stepping kernels for the coupled oscillator + structure-constant flow.

The state vector is ``[q, p, x_0 .. x_8]`` (11 entries) with ``x`` in the
anti-commutative coordinate chart.  Two interchangeable backends:

* ``numba``: scalar loops compiled with ``@njit``.
* ``numpy``: batched matrix form ``dy/dt = A y``.

The numba backend is used when numba imports and ``OPERADIC_LAX_NUMBA`` is not
set to ``0``/``false``/``no``/``off``.
"""

from __future__ import annotations

import os

import numpy as np

STATE_SIZE = 11

_FLAG = os.environ.get("OPERADIC_LAX_NUMBA", "1").strip().lower()
_DISABLED = _FLAG in ("0", "false", "no", "off")

try:
    if _DISABLED:
        raise ImportError("disabled by OPERADIC_LAX_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def coupled_matrix(omega: float) -> np.ndarray:
    """Generator A of the linear flow dy/dt = A y."""
    h = 0.5 * omega
    A = np.zeros((STATE_SIZE, STATE_SIZE))
    A[0, 1] = 1.0
    A[1, 0] = -omega * omega
    # mu^1_23, mu^2_13 <- mu^1_31, mu^2_23
    A[2, 4] = A[2, 5] = -h
    A[3, 4] = A[3, 5] = -h
    # mu^1_31, mu^2_23 <- mu^1_23, mu^2_13
    A[4, 2] = A[4, 3] = h
    A[5, 2] = A[5, 3] = h
    # (mu^1_12, mu^2_12) and (mu^3_13, mu^3_23) rotate at omega/2
    A[6, 7] = -h
    A[7, 6] = h
    A[8, 9] = -h
    A[9, 8] = h
    return A


def rk4_numpy(y0, omega, dt, n_steps, last_dt, record_mask):
    """Classic RK4 on a batch ``y0`` of shape (m, 11).

    Records the states at every step k with ``record_mask[k]`` true
    (k = 0..n_steps), then one extra record after a final step of size
    ``last_dt`` when it is positive.  Returns ``(records, bad_step)`` with
    ``bad_step == -1`` unless a non-finite state appeared.
    """
    A_T = coupled_matrix(omega).T
    y = np.array(y0, dtype=float)
    n_rec = int(np.count_nonzero(record_mask)) + (1 if last_dt > 0 else 0)
    out = np.empty((n_rec,) + y.shape)
    r = 0

    def step(y, h):
        k1 = y @ A_T
        k2 = (y + 0.5 * h * k1) @ A_T
        k3 = (y + 0.5 * h * k2) @ A_T
        k4 = (y + h * k3) @ A_T
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps + 1):
            if k > 0:
                y = step(y, dt)
                if not np.isfinite(y).all():
                    return out[:r], k
            if record_mask[k]:
                out[r] = y
                r += 1
        if last_dt > 0:
            y = step(y, last_dt)
            if not np.isfinite(y).all():
                return out[:r], n_steps + 1
            out[r] = y
            r += 1
    return out, -1


def _rhs_scalar(y, w, out):
    h = 0.5 * w
    out[0] = y[1]
    out[1] = -w * w * y[0]
    out[2] = -h * (y[4] + y[5])
    out[3] = -h * (y[5] + y[4])
    out[4] = h * (y[2] + y[3])
    out[5] = h * (y[3] + y[2])
    out[6] = -h * y[7]
    out[7] = h * y[6]
    out[8] = -h * y[9]
    out[9] = h * y[8]
    out[10] = 0.0


def _step_scalar(y, w, h, k1, k2, k3, k4, tmp):
    n = y.shape[0]
    _rhs_scalar(y, w, k1)
    for i in range(n):
        tmp[i] = y[i] + 0.5 * h * k1[i]
    _rhs_scalar(tmp, w, k2)
    for i in range(n):
        tmp[i] = y[i] + 0.5 * h * k2[i]
    _rhs_scalar(tmp, w, k3)
    for i in range(n):
        tmp[i] = y[i] + h * k3[i]
    _rhs_scalar(tmp, w, k4)
    ok = True
    for i in range(n):
        y[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if not np.isfinite(y[i]):
            ok = False
    return ok


def _rk4_loops(y0, omega, dt, n_steps, last_dt, record_mask):
    m = y0.shape[0]
    n_rec = 0
    for k in range(n_steps + 1):
        if record_mask[k]:
            n_rec += 1
    if last_dt > 0:
        n_rec += 1
    out = np.empty((n_rec, m, y0.shape[1]))
    k1 = np.empty(y0.shape[1])
    k2 = np.empty(y0.shape[1])
    k3 = np.empty(y0.shape[1])
    k4 = np.empty(y0.shape[1])
    tmp = np.empty(y0.shape[1])
    bad = -1
    for b in range(m):
        y = y0[b].copy()
        r = 0
        for k in range(n_steps + 1):
            if k > 0:
                if not _step_scalar(y, omega, dt, k1, k2, k3, k4, tmp):
                    if bad < 0 or k < bad:
                        bad = k
                    break
            if record_mask[k]:
                out[r, b] = y
                r += 1
        if bad >= 0:
            continue
        if last_dt > 0:
            if not _step_scalar(y, omega, last_dt, k1, k2, k3, k4, tmp):
                bad = n_steps + 1
                continue
            out[r, b] = y
    return out, bad


if HAVE_NUMBA:
    _rhs_scalar = njit(cache=True)(_rhs_scalar)
    _step_scalar = njit(cache=True)(_step_scalar)
    rk4_numba = njit(cache=True)(_rk4_loops)
else:
    rk4_numba = None


def rk4_loops(y0, omega, dt, n_steps, last_dt, record_mask, backend: str | None = None):
    """Dispatch to the selected backend; ``backend`` overrides the default."""
    backend = backend or BACKEND
    y0 = np.ascontiguousarray(y0, dtype=float)
    mask = np.ascontiguousarray(record_mask, dtype=np.bool_)
    if backend == "numba":
        if rk4_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable or disabled")
        out, bad = rk4_numba(y0, float(omega), float(dt), int(n_steps), float(last_dt), mask)
        return out, int(bad)
    if backend == "numpy":
        return rk4_numpy(y0, float(omega), float(dt), int(n_steps), float(last_dt), mask)
    if backend == "python":
        # un-jitted scalar loops; slow, kept for kernel cross-checks
        return _rk4_loops_py(y0, float(omega), float(dt), int(n_steps), float(last_dt), mask)
    raise ValueError(f"unknown backend {backend!r}")


_rk4_loops_py = getattr(_rk4_loops, "py_func", _rk4_loops)
