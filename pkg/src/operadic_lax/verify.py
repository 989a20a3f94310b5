"""Numerical verification suites and the JSON report they produce.

Every check reduces to one scalar residual compared against a fixed
tolerance; ``passed`` is ``residual < tolerance``.  Checks whose outcome is a
count or a range test encode it as a residual too (number of mismatches,
distance outside the admissible interval).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import algebras as alg
from .integrator import CoupledState, IntegrationConfig, rk4_run, rk4_run_many
from .lax_dynamics import (
    ParamVector,
    anticommutative_rhs,
    classify_rigidity,
    closed_form_coords,
    closed_form_mu,
    closed_form_series,
    from_coords,
    gamma_matrix,
    general_lax_rhs,
    lemma52_rhs,
    oscillator_M,
    representation_condition,
    solve_params,
    theorem_residual,
    to_coords,
)
from .operad import antisymmetry_residual, jacobi_residual
from .oscillator import (
    OscState,
    classical_lax_residual,
    exact_trajectory,
    hamiltonian,
    initial_state,
    lax_spectrum,
)
from .tensor_core import Operation, max_abs_diff, random_operation

DEFAULT_SEED = 42
OMEGAS = (0.5, 1.0, 2.0)
CUT_SAFE_PHASE = math.pi - 0.15


@dataclass
class CheckResult:
    name: str
    inputs: dict
    residual: float
    tolerance: float
    passed: bool
    runtime_s: float
    details: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    command: str
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, include_runtime: bool = True) -> dict:
        checks = []
        for c in self.checks:
            d = asdict(c)
            if not include_runtime:
                d.pop("runtime_s")
            checks.append(d)
        return {"command": self.command, "passed": self.passed, "checks": checks}

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=2, sort_keys=True) + "\n"

    def summary_lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}: residual={c.residual:.3e} tol={c.tolerance:.1e}"
            for c in self.checks
        ]


def run_check(name: str, inputs: dict, tolerance: float, fn: Callable[[], float | tuple[float, dict]]) -> CheckResult:
    start = time.perf_counter()
    try:
        out = fn()
    except Exception as exc:  # a crashing check is reported, not raised
        out = (math.inf, {"error": f"{type(exc).__name__}: {exc}"})
    runtime = time.perf_counter() - start
    residual, details = out if isinstance(out, tuple) else (out, {})
    residual = float(residual)
    return CheckResult(name, inputs, residual, tolerance, bool(residual < tolerance), runtime, details)


def interval_excess(value: float, lo: float, hi: float) -> float:
    """Distance of ``value`` outside ``[lo, hi]``; 0 inside."""
    if not math.isfinite(value):
        return math.inf
    return max(0.0, lo - value, value - hi)


def cut_safe_times(omega: float, n: int) -> np.ndarray:
    """``n`` times on the trajectory from (q=0, p>0) whose phase stays clear of the cut."""
    return np.linspace(-CUT_SAFE_PHASE, CUT_SAFE_PHASE, n) / omega


def random_admissible_params(rng: np.random.Generator) -> ParamVector:
    while True:
        C = ParamVector(rng.uniform(-1.0, 1.0, 9))
        if representation_condition(C):
            return C


# -- individual residual measurements -----------------------------------------


def classical_lax_grid(omegas=OMEGAS, n: int = 10, extent: float = 5.0) -> float:
    grid = np.linspace(-extent, extent, n)
    worst = 0.0
    for w in omegas:
        for q in grid:
            for p in grid:
                worst = max(worst, float(np.max(np.abs(classical_lax_residual(OscState(q, p, w))))))
    return worst


def isospectral_drift(s0: OscState, t_end: float, n: int = 1000) -> float:
    """Max deviation of spec(L(t)) from {-sqrt(2H0), 1, sqrt(2H0)} along the flow."""
    root = math.sqrt(2.0 * hamiltonian(s0))
    expected = np.sort([-root, root, 1.0])
    worst = 0.0
    for t in np.linspace(0.0, t_end, n):
        worst = max(worst, float(np.max(np.abs(lax_spectrum(exact_trajectory(s0, t)) - expected))))
    return worst


def transcription_crosscheck(rng, omegas=OMEGAS, n: int = 100) -> float:
    worst = 0.0
    for w in omegas:
        M = oscillator_M(w)
        for _ in range(n):
            mu = random_operation(rng, 3, 2)
            ref = general_lax_rhs(mu, M)
            worst = max(worst, max_abs_diff(ref, lemma52_rhs(mu, w)))
            worst = max(worst, max_abs_diff(ref, general_lax_rhs(mu, M, method="bracket")))
    return worst


def reduction_consistency(rng, omegas=OMEGAS, n: int = 100) -> float:
    worst = 0.0
    for w in omegas:
        M = oscillator_M(w)
        for _ in range(n):
            x = rng.uniform(-1.0, 1.0, 9)
            full = general_lax_rhs(from_coords(x), M)
            reduced = anticommutative_rhs(x, w)
            worst = max(worst, float(np.max(np.abs(to_coords(full) - reduced))))
            # the full flow must stay anti-commutative
            worst = max(worst, alg.check_anticommutative(full))
    return worst


def closed_form_sweep(rng, n_params: int = 100, n_times: int = 20, omega: float = 1.0, p0: float = 2.0, dt: float = 1e-5):
    s0 = initial_state(p0, omega)
    times = cut_safe_times(omega, n_times)
    worst_res = worst_fact = 0.0
    for _ in range(n_params):
        C = random_admissible_params(rng)
        for t in times:
            R = theorem_residual(C, s0, t, dt)
            G = gamma_matrix(s0, t, dt)
            worst_res = max(worst_res, float(np.max(np.abs(R))))
            worst_fact = max(worst_fact, float(np.max(np.abs(R - C.c @ G))))
    return worst_res, worst_fact


def oracle_seeds(rng, builtins: Mapping[str, Operation], p0: float, omega: float, n_random: int = 5):
    s0 = initial_state(p0, omega)
    seeds = [(name, solve_params(mu0, p0)) for name, mu0 in builtins.items()]
    seeds += [(f"random{k}", random_admissible_params(rng)) for k in range(n_random)]
    return s0, seeds


def oracle_equivalence(seeds, s0: OscState, dt: float = 1e-4) -> tuple[float, dict]:
    cfg = IntegrationConfig(dt, 2.0 * math.pi / s0.omega, record_every=10)
    x0s = [CoupledState(0.0, s0, closed_form_coords(C, s0)) for _, C in seeds]
    trajs = rk4_run_many(x0s, cfg)
    per_seed = {}
    for (name, C), tr in zip(seeds, trajs):
        exact = closed_form_series(C, s0, tr.times)
        w = s0.omega
        q = s0.q * np.cos(w * tr.times) + s0.p / w * np.sin(w * tr.times)
        p = s0.p * np.cos(w * tr.times) - w * s0.q * np.sin(w * tr.times)
        per_seed[name] = float(
            max(np.max(np.abs(tr.mu - exact)), np.max(np.abs(tr.q - q)), np.max(np.abs(tr.p - p)))
        )
    return max(per_seed.values()), per_seed


def rk4_endpoint_error(C: ParamVector, s0: OscState, dt: float, t_end: float) -> float:
    x0 = CoupledState(0.0, s0, closed_form_coords(C, s0))
    tr = rk4_run(x0, IntegrationConfig(dt, t_end, record_every=10**9))
    exact_mu = closed_form_series(C, s0, [t_end])[0]
    end = exact_trajectory(s0, t_end)
    return float(max(np.max(np.abs(tr.mu[-1] - exact_mu)), abs(tr.q[-1] - end.q), abs(tr.p[-1] - end.p)))


def convergence_ratio(C: ParamVector, s0: OscState, dt: float = 2.0 * math.pi / 64) -> float:
    t_end = 2.0 * math.pi / s0.omega
    return rk4_endpoint_error(C, s0, dt, t_end) / rk4_endpoint_error(C, s0, dt / 2.0, t_end)


PAPER_PARAMS = {
    # the nonzero constants stated for each example, as functions of p0
    "so3": lambda p0: {"C4": -1.0, "C9": 1.0},
    "heisenberg": lambda p0: {"C9": 1.0},
    "sl2": lambda p0: {"C3": 2.0 / p0, "C9": 1.0},
}


def params_deviation(builtins: Mapping[str, Operation], p0s=(0.5, 1.0, 2.0, 3.7)) -> tuple[float, dict]:
    worst = 0.0
    found = {}
    for name, mu0 in builtins.items():
        for p0 in p0s:
            C = solve_params(mu0, p0)
            expected = ParamVector.from_dict(PAPER_PARAMS[name](p0))
            worst = max(worst, float(np.max(np.abs(C.c - expected.c))))
        found[name] = solve_params(mu0, 2.0).as_dict()
    return worst, {"params_at_p0_2": found}


def round_trip(builtins: Mapping[str, Operation], rng, p0s=(0.5, 1.0, 2.0), n_random: int = 20) -> float:
    seeds = list(builtins.values()) + [from_coords(rng.uniform(-2, 2, 9)) for _ in range(n_random)]
    worst = 0.0
    for mu0 in seeds:
        for p0 in p0s:
            C = solve_params(mu0, p0)
            back = closed_form_mu(C, initial_state(p0, 1.0))
            worst = max(worst, max_abs_diff(back, mu0))
    return worst


EXPECTED_VERDICTS = {"so3": ("rigid", False), "heisenberg": ("rigid", False), "sl2": ("deformed", True)}


def rigidity_mismatches(builtins: Mapping[str, Operation], p0: float, omega: float) -> tuple[float, dict]:
    mismatches = 0
    found = {}
    for name, mu0 in builtins.items():
        r = classify_rigidity(mu0, p0, omega)
        found[name] = {"verdict": r.verdict, "condition_satisfied": r.condition_satisfied}
        if (r.verdict, r.condition_satisfied) != EXPECTED_VERDICTS[name]:
            mismatches += 1
    return float(mismatches), found


def sl2_family_pointwise(mu0: Operation, p0: float, omega: float, n: int = 50) -> float:
    C = solve_params(mu0, p0)
    s0 = initial_state(p0, omega)
    worst = 0.0
    for t in np.linspace(0.0, 2.0 * math.pi / omega, n):
        s = exact_trajectory(s0, t)
        worst = max(worst, max_abs_diff(closed_form_mu(C, s), alg.sl2_deformed_mu(s, p0)))
    return worst


def sl2_jacobi_sweep(mu0: Operation, p0: float, omega: float, n: int = 50) -> float:
    C = solve_params(mu0, p0)
    s0 = initial_state(p0, omega)
    series = closed_form_series(C, s0, np.linspace(0.0, 2.0 * math.pi / omega, n))
    return max(alg.check_jacobi(from_coords(x)) for x in series)


def sl2_isomorphism_sweep(mu0: Operation, p0: float, omega: float, n: int = 50, q_cutoff: float = 0.1) -> tuple[float, dict]:
    """Isomorphism residual at trajectory points with |q| > q_cutoff * amplitude."""
    C = solve_params(mu0, p0)
    s0 = initial_state(p0, omega)
    amplitude = p0 / omega
    worst = 0.0
    used = 0
    min_det = math.inf
    for t in np.linspace(0.0, 2.0 * math.pi / omega, n):
        s = exact_trajectory(s0, t)
        if abs(s.q) <= q_cutoff * amplitude:
            continue
        A = alg.sl2_iso_matrix(s, p0)
        min_det = min(min_det, abs(float(np.linalg.det(A))))
        worst = max(worst, alg.check_isomorphism(closed_form_mu(C, s), mu0, A))
        used += 1
    if used == 0:
        return math.inf, {"points": 0}
    return worst, {"points": used, "min_abs_det": min_det}


def operad_laws(rng, n: int = 200, max_degree: int = 2, max_dim: int = 3) -> tuple[float, dict]:
    worst_anti = worst_jac = 0.0
    for _ in range(n):
        d = int(rng.integers(1, max_dim + 1))
        f, g, h = (random_operation(rng, d, int(k)) for k in rng.integers(1, max_degree + 1, size=3))
        worst_anti = max(worst_anti, antisymmetry_residual(f, g))
        worst_jac = max(worst_jac, jacobi_residual(f, g, h))
    return max(worst_anti, worst_jac), {"antisymmetry": worst_anti, "jacobi": worst_jac}


def builtin_structure(builtins: Mapping[str, Operation]) -> float:
    return max(max(alg.check_anticommutative(mu), alg.check_jacobi(mu)) for mu in builtins.values())


# -- suites --------------------------------------------------------------------


def builtin_constants() -> dict[str, Operation]:
    return {name: alg.builtin(name).constants for name in alg.BUILTIN_NAMES}


def corrupted_builtins(name: str) -> dict[str, Operation]:
    """Builtins with ``name`` perturbed (mu^3_12 shifted); a negative control."""
    out = builtin_constants()
    c = np.array(out[name].coeffs)
    c[2, 0, 1] += 1e-3
    c[2, 1, 0] -= 1e-3
    out[name] = Operation(3, 2, c)
    return out


def verify_classical(omega: float = 1.0, n: int = 10, extent: float = 5.0) -> VerificationReport:
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    s0 = initial_state(2.0, omega)
    checks = [
        run_check(
            "classical_lax_identity",
            {"omega": omega, "grid": n, "extent": extent},
            1e-12,
            lambda: classical_lax_grid((omega,), n, extent),
        ),
        run_check(
            "isospectrality",
            {"omega": omega, "p0": 2.0, "t_end": 10 * math.pi},
            1e-10,
            lambda: isospectral_drift(s0, 10 * math.pi),
        ),
    ]
    return VerificationReport("verify-classical", checks)


def verify_all(seed: int = DEFAULT_SEED, builtins: Mapping[str, Operation] | None = None) -> VerificationReport:
    """Run every property suite; each randomized check draws from its own seeded stream."""
    builtins = dict(builtins) if builtins is not None else builtin_constants()

    def rng(k: int) -> np.random.Generator:
        return np.random.default_rng([seed, k])

    p0, omega = 2.0, 1.0
    s0_osc = initial_state(p0, omega)
    oracle_rng = rng(5)
    s0, seeds = oracle_seeds(oracle_rng, builtins, p0, omega)

    checks = [
        run_check("builtin_structure", {}, 1e-14, lambda: builtin_structure(builtins)),
        run_check(
            "classical_lax_identity",
            {"omegas": list(OMEGAS), "grid": 10, "extent": 5.0},
            1e-12,
            lambda: classical_lax_grid(),
        ),
        run_check(
            "isospectrality",
            {"omega": omega, "p0": p0, "t_end": 10 * math.pi},
            1e-10,
            lambda: isospectral_drift(s0_osc, 10 * math.pi),
        ),
        run_check(
            "transcription_vs_general",
            {"omegas": list(OMEGAS), "samples": 100, "seed": seed},
            1e-13,
            lambda: transcription_crosscheck(rng(1)),
        ),
        run_check(
            "anticommutative_reduction",
            {"omegas": list(OMEGAS), "samples": 100, "seed": seed},
            1e-13,
            lambda: reduction_consistency(rng(2)),
        ),
    ]
    thm_inputs = {"params": 100, "times": 20, "omega": 1.0, "p0": 2.0, "dt": 1e-5, "seed": seed}

    def thm():
        res, fact = closed_form_sweep(rng(3))
        return res, {"gamma_factorization": fact}

    checks.append(run_check("closed_form_residual", thm_inputs, 1e-6, thm))
    fact = checks[-1].details.get("gamma_factorization", math.inf)
    checks.append(run_check("gamma_factorization", thm_inputs, 1e-9, lambda: fact))
    checks.append(
        run_check(
            "rk4_oracle_equivalence",
            {"dt": 1e-4, "t_end": 2 * math.pi / omega, "seeds": [n for n, _ in seeds], "seed": seed},
            1e-7,
            lambda: oracle_equivalence(seeds, s0),
        )
    )
    conv_C = random_admissible_params(rng(6))

    def conv():
        ratio = convergence_ratio(conv_C, s0)
        return interval_excess(ratio, 12.0, 20.0), {"ratio": ratio}

    checks.append(run_check("rk4_convergence_ratio", {"interval": [12.0, 20.0]}, 1e-12, conv))
    checks.append(run_check("paper_parameters", {"p0": [0.5, 1.0, 2.0, 3.7]}, 1e-12, lambda: params_deviation(builtins)))
    checks.append(run_check("solve_params_round_trip", {"seed": seed}, 1e-12, lambda: round_trip(builtins, rng(7))))
    checks.append(
        run_check(
            "rigidity_verdicts",
            {"p0": p0, "omega": omega},
            0.5,
            lambda: rigidity_mismatches(builtins, p0, omega),
        )
    )
    sl2 = builtins["sl2"]
    checks.append(
        run_check("sl2_family_pointwise", {"p0": p0, "omega": omega}, 1e-12, lambda: sl2_family_pointwise(sl2, p0, omega))
    )
    checks.append(
        run_check("sl2_jacobi", {"p0": p0, "omega": omega, "points": 50}, 1e-10, lambda: sl2_jacobi_sweep(sl2, p0, omega))
    )
    checks.append(
        run_check(
            "sl2_isomorphism",
            {"p0": p0, "omega": omega, "points": 50, "q_cutoff": 0.1},
            1e-9,
            lambda: sl2_isomorphism_sweep(sl2, p0, omega),
        )
    )
    checks.append(
        run_check("operad_laws", {"triples": 200, "max_degree": 2, "max_dim": 3, "seed": seed}, 1e-10, lambda: operad_laws(rng(4)))
    )
    return VerificationReport("verify-all", checks)
