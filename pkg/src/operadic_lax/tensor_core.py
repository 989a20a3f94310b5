"""Dense multilinear operations V^{(x)n} -> V over the reals.

An :class:`Operation` of degree ``n`` on a ``d``-dimensional space stores its
coefficients ``f^a_{j1...jn}`` as an array of shape ``(d,) * (n + 1)`` with the
output index first (row-major, output slowest).  Indices are 0-based in
memory; everything that crosses a file boundary uses 1-based indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ShapeError

MAX_DIM = 8


@dataclass(frozen=True, eq=False)
class Operation:
    """A multilinear map ``V^{(x)degree} -> V`` with ``dim V = dim``."""

    dim: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError(f"dim must be positive, got {self.dim}")
        if self.dim > MAX_DIM:
            raise ShapeError(f"dim {self.dim} exceeds the dense-storage guard {MAX_DIM}")
        if self.degree < 0:
            raise ShapeError(f"degree must be non-negative, got {self.degree}")
        arr = np.array(self.coeffs, dtype=float)
        shape = (self.dim,) * (self.degree + 1)
        if arr.size != self.dim ** (self.degree + 1):
            raise ShapeError(
                f"expected {self.dim ** (self.degree + 1)} coefficients, got {arr.size}"
            )
        arr = arr.reshape(shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zeros(cls, dim: int, degree: int) -> Operation:
        return cls(dim, degree, np.zeros((dim,) * (degree + 1)))

    @classmethod
    def from_array(cls, arr) -> Operation:
        """Wrap an array of shape ``(d,) * (n + 1)``; dim and degree are inferred."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim == 0 or len(set(arr.shape)) != 1:
            raise ShapeError(f"coefficient array must be a cube, got shape {arr.shape}")
        return cls(arr.shape[0], arr.ndim - 1, arr)

    @property
    def reduced_degree(self) -> int:
        return self.degree - 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape

    def __add__(self, other: Operation) -> Operation:
        return linear_combine(1.0, self, 1.0, other)

    def __sub__(self, other: Operation) -> Operation:
        return linear_combine(1.0, self, -1.0, other)

    def __neg__(self) -> Operation:
        return Operation(self.dim, self.degree, -self.coeffs)

    def __mul__(self, scalar: float) -> Operation:
        return Operation(self.dim, self.degree, float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __call__(self, *args) -> np.ndarray:
        return evaluate(self, list(args))

    def __repr__(self):
        return f"Operation(dim={self.dim}, degree={self.degree})"


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Validate ``v`` as an element of V (a finite 1-d real array)."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ShapeError(f"vector must be 1-d, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ShapeError(f"vector has dim {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


def basis_vector(dim: int, index: int) -> np.ndarray:
    """The basis vector e_index (1-based, as in e_1 ... e_d)."""
    if not 1 <= index <= dim:
        raise IndexError(f"basis index {index} out of range 1..{dim}")
    e = np.zeros(dim)
    e[index - 1] = 1.0
    return e


def evaluate(f: Operation, args: Sequence) -> np.ndarray:
    """Apply ``f`` to ``len(args) == f.degree`` vectors."""
    if len(args) != f.degree:
        raise ShapeError(f"operation of degree {f.degree} got {len(args)} arguments")
    out = f.coeffs
    # contract the last input slot first so the remaining axes stay in order
    for v in reversed(args):
        out = out @ as_vector(v, f.dim)
    return np.array(out, dtype=float).reshape(f.dim)


def identity_map(d: int) -> Operation:
    if d < 1:
        raise ShapeError(f"dimension must be positive, got {d}")
    return Operation(d, 1, np.eye(d))


def _check_same_shape(f: Operation, g: Operation):
    if f.dim != g.dim or f.degree != g.degree:
        raise ShapeError(
            f"shape mismatch: (dim={f.dim}, degree={f.degree}) vs (dim={g.dim}, degree={g.degree})"
        )


def linear_combine(a: float, f: Operation, b: float, g: Operation) -> Operation:
    _check_same_shape(f, g)
    return Operation(f.dim, f.degree, a * f.coeffs + b * g.coeffs)


def max_abs_diff(f: Operation, g: Operation) -> float:
    _check_same_shape(f, g)
    return float(np.max(np.abs(f.coeffs - g.coeffs)))


def random_operation(rng: np.random.Generator, dim: int, degree: int) -> Operation:
    """Coefficients drawn uniformly from [-1, 1]."""
    return Operation(dim, degree, rng.uniform(-1.0, 1.0, size=(dim,) * (degree + 1)))


# -- algebra definition files -------------------------------------------------


def operation_from_dict(data: dict) -> Operation:
    """Build an operation from the JSON algebra-definition layout.

    ``{"dim": 3, "degree": 2, "constants": [{"upper": 1, "lower": [2, 3],
    "value": 1.0}, ...], "antisymmetrize": true}``.  Unlisted entries are zero.
    With ``antisymmetrize`` each entry also sets its partner with swapped lower
    indices to the negated value; contradictory entries are rejected.
    """
    try:
        dim = int(data["dim"])
        degree = int(data.get("degree", 2))
        entries = data.get("constants", [])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed algebra definition: {exc}") from None
    antisym = bool(data.get("antisymmetrize", False))
    if antisym and degree != 2:
        raise ValueError("antisymmetrize is only meaningful for degree-2 operations")

    coeffs = np.zeros((dim,) * (degree + 1))
    assigned: dict[tuple[int, ...], float] = {}

    def assign(idx: tuple[int, ...], value: float):
        if idx in assigned and assigned[idx] != value:
            shown = (idx[0] + 1, [i + 1 for i in idx[1:]])
            raise ValueError(
                f"conflicting values for upper={shown[0]} lower={shown[1]}: "
                f"{assigned[idx]} vs {value}"
            )
        assigned[idx] = value
        coeffs[idx] = value

    for entry in entries:
        upper = int(entry["upper"])
        lower = [int(j) for j in entry["lower"]]
        value = float(entry["value"])
        if len(lower) != degree:
            raise ValueError(f"entry {entry} needs {degree} lower indices")
        for k in [upper, *lower]:
            if not 1 <= k <= dim:
                raise ValueError(f"index {k} out of range 1..{dim} in {entry}")
        idx = (upper - 1, *(j - 1 for j in lower))
        assign(idx, value)
        if antisym:
            partner = (idx[0], idx[2], idx[1])
            assign(partner, -value)
    return Operation(dim, degree, coeffs)


def operation_to_dict(f: Operation, *, antisymmetrize: bool = False, name: str | None = None) -> dict:
    """Inverse of :func:`operation_from_dict`; only nonzero entries are listed.

    With ``antisymmetrize`` only entries with ``lower[0] < lower[1]`` are written.
    """
    constants = []
    for idx in zip(*np.nonzero(f.coeffs)):
        idx = tuple(int(i) for i in idx)
        if antisymmetrize and not idx[1] < idx[2]:
            continue
        constants.append(
            {"upper": idx[0] + 1, "lower": [i + 1 for i in idx[1:]], "value": float(f.coeffs[idx])}
        )
    out: dict = {}
    if name is not None:
        out["name"] = name
    out.update({"dim": f.dim, "degree": f.degree, "constants": constants})
    if antisymmetrize:
        out["antisymmetrize"] = True
    return out


def load_operation(path: str | Path) -> Operation:
    with open(path) as fh:
        return operation_from_dict(json.load(fh))


def save_operation(f: Operation, path: str | Path, **kwargs) -> None:
    with open(path, "w") as fh:
        json.dump(operation_to_dict(f, **kwargs), fh, indent=2)
        fh.write("\n")
