"""Builtin 3-dimensional Lie algebras and structural checks on multiplications."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError
from .lax_dynamics import as_structure_constants, check_anticommutative_tensor
from .oscillator import OscState, hamiltonian
from .tensor_core import Operation, operation_from_dict, operation_to_dict

ISO_DET_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraDef:
    name: str
    constants: Operation
    expected_rigidity: str


def _antisym(brackets: dict[tuple[int, int], dict[int, float]]) -> Operation:
    """Constants from ``{(j, k): {i: value}}`` meaning [e_j, e_k] = sum value e_i."""
    c = np.zeros((3, 3, 3))
    for (j, k), image in brackets.items():
        for i, value in image.items():
            c[i - 1, j - 1, k - 1] = value
            c[i - 1, k - 1, j - 1] = -value
    return Operation(3, 2, c)


# [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
SO3 = _antisym({(1, 2): {3: 1.0}, (2, 3): {1: 1.0}, (3, 1): {2: 1.0}})
# [e1,e2]=e3
HEISENBERG = _antisym({(1, 2): {3: 1.0}})
# [e1,e2]=e3, [e3,e1]=2e1, [e2,e3]=2e2
SL2 = _antisym({(1, 2): {3: 1.0}, (3, 1): {1: 2.0}, (2, 3): {2: 2.0}})

_BUILTINS = {
    "so3": ("so3", SO3, "rigid"),
    "heisenberg": ("heisenberg", HEISENBERG, "rigid"),
    "sl2": ("sl2", SL2, "deformed"),
}
BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> AlgebraDef:
    try:
        label, constants, rigidity = _BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin algebra {name!r}; choose from {BUILTIN_NAMES}") from None
    return AlgebraDef(label, constants, rigidity)


def builtin_fixture(name: str) -> dict:
    """The JSON definition shipped in the package data for a builtin."""
    text = resources.files("operadic_lax").joinpath("data", f"{name}.json").read_text()
    return json.loads(text)


def export_builtins(directory: str | Path) -> list[Path]:
    out = []
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in BUILTIN_NAMES:
        alg = builtin(name)
        path = directory / f"{name}.json"
        data = operation_to_dict(alg.constants, antisymmetrize=True, name=name)
        path.write_text(json.dumps(data, indent=2) + "\n")
        out.append(path)
    return out


def load_algebra(spec: str) -> AlgebraDef:
    """Resolve a builtin name or a path to an algebra-definition JSON file."""
    if spec in _BUILTINS:
        return builtin(spec)
    path = Path(spec)
    if not path.is_file():
        raise FileNotFoundError(f"{spec!r} is neither a builtin ({', '.join(BUILTIN_NAMES)}) nor a file")
    data = json.loads(path.read_text())
    constants = as_structure_constants(operation_from_dict(data))
    return AlgebraDef(data.get("name", path.stem), constants, "unknown")


# -- structural checks ---------------------------------------------------------


def check_anticommutative(mu) -> float:
    """max |mu^i_jk + mu^i_kj|."""
    return check_anticommutative_tensor(mu)


def jacobi_tensor(mu) -> np.ndarray:
    """J^i_jkl = mu^s_jk mu^i_sl + mu^s_kl mu^i_sj + mu^s_lj mu^i_sk."""
    c = as_structure_constants(mu).coeffs
    t1 = np.einsum("sjk,isl->ijkl", c, c)
    t2 = np.einsum("skl,isj->ijkl", c, c)
    t3 = np.einsum("slj,isk->ijkl", c, c)
    return t1 + t2 + t3


def check_jacobi(mu) -> float:
    return float(np.max(np.abs(jacobi_tensor(mu))))


def check_isomorphism(mu, mu0, A) -> float:
    """max |mu^s_jk A^i_s - mu0^i_lm A^l_j A^m_k| with A^i_j = A[i, j]."""
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3):
        raise ValueError(f"isomorphism matrix must be 3x3, got {A.shape}")
    if abs(np.linalg.det(A)) <= ISO_DET_TOL:
        raise DomainError("isomorphism matrix is singular")
    m = as_structure_constants(mu).coeffs
    m0 = as_structure_constants(mu0).coeffs
    lhs = np.einsum("sjk,is->ijk", m, A)
    rhs = np.einsum("ilm,lj,mk->ijk", m0, A, A)
    return float(np.max(np.abs(lhs - rhs)))


def sl2_iso_matrix(s: OscState, p0: float) -> np.ndarray:
    """The explicit matrix carrying the sl(2) seed onto its deformation at ``s``.

    Singular formula at q = 0 (the (1,1) entry divides by w q).
    """
    if s.q == 0.0:
        raise DomainError("the sl(2) isomorphism matrix is undefined at q = 0")
    if not p0 > 0:
        raise DomainError(f"p0 must be positive, got {p0}")
    H = hamiltonian(s)
    if not H > 0:
        raise DomainError("H must be positive")
    root = math.sqrt(2.0 * H)
    wq = s.omega * s.q
    A = np.array(
        [
            [2.0 * p0 / wq * (s.p + root), 2.0 * p0, 0.0],
            [s.p - root, wq, 0.0],
            [0.0, 0.0, 2.0 * root],
        ]
    )
    return A / (2.0 * p0)


def sl2_deformed_mu(s: OscState, p0: float) -> Operation:
    """The explicit sl(2)-seeded family: mu^1_23 = mu^2_13 = -(2w/p0) q,
    mu^1_31 = mu^2_23 = (2/p0) p, mu^3_12 = 1."""
    a = -2.0 * s.omega / p0 * s.q
    b = 2.0 / p0 * s.p
    return _antisym({(2, 3): {1: a, 2: b}, (1, 3): {2: a}, (3, 1): {1: b}, (1, 2): {3: 1.0}})
