"""Endomorphism operad: signed partial compositions and Gerstenhaber brackets."""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .tensor_core import Operation


def graded_sign(exponent: int) -> int:
    """(-1)**exponent for any integer exponent (negative included)."""
    return -1 if exponent % 2 else 1


def partial_composition(f: Operation, i: int, g: Operation) -> Operation:
    """``f o_i g``: plug ``g`` in after the first ``i`` inputs of ``f``.

    Carries the sign ``(-1)**(i * |g|)`` with ``|g| = g.degree - 1``.
    The result has degree ``f.degree + g.degree - 1``.
    """
    if f.dim != g.dim:
        raise ShapeError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if not 0 <= i <= f.reduced_degree:
        raise ShapeError(f"slot index {i} outside [0, {f.reduced_degree}]")
    # axis 0 of f is the output, so slot i sits on axis i + 1
    h = np.tensordot(f.coeffs, g.coeffs, axes=([i + 1], [0]))
    # tensordot appends g's inputs last; move them into slot position
    ng = g.degree
    nf_rest = f.degree - 1
    src = list(range(1 + nf_rest, 1 + nf_rest + ng))
    dst = list(range(1 + i, 1 + i + ng))
    h = np.moveaxis(h, src, dst)
    sign = graded_sign(i * g.reduced_degree)
    return Operation(f.dim, f.degree + g.degree - 1, sign * h)


def total_composition(f: Operation, g: Operation) -> Operation:
    """``f . g = sum_{i=0}^{|f|} f o_i g``."""
    if f.degree < 1:
        raise ShapeError("total composition needs f.degree >= 1")
    if f.dim != g.dim:
        raise ShapeError(f"dimension mismatch: {f.dim} vs {g.dim}")
    acc = np.zeros((f.dim,) * (f.degree + g.degree))
    for i in range(f.degree):
        acc += partial_composition(f, i, g).coeffs
    return Operation(f.dim, f.degree + g.degree - 1, acc)


def gerstenhaber_bracket(f: Operation, g: Operation) -> Operation:
    """Graded commutator ``[f, g] = f.g - (-1)**(|f||g|) g.f``."""
    if f.degree < 1 or g.degree < 1:
        raise ShapeError("brackets are defined here for degrees >= 1 only")
    if f.dim != g.dim:
        raise ShapeError(f"dimension mismatch: {f.dim} vs {g.dim}")
    sign = graded_sign(f.reduced_degree * g.reduced_degree)
    fg = total_composition(f, g).coeffs
    gf = total_composition(g, f).coeffs
    return Operation(f.dim, f.degree + g.degree - 1, fg - sign * gf)


def antisymmetry_residual(f: Operation, g: Operation) -> float:
    """max |[f,g] + (-1)^{|f||g|} [g,f]|."""
    sign = graded_sign(f.reduced_degree * g.reduced_degree)
    lhs = gerstenhaber_bracket(f, g).coeffs
    rhs = gerstenhaber_bracket(g, f).coeffs
    return float(np.max(np.abs(lhs + sign * rhs)))


def jacobi_residual(f: Operation, g: Operation, h: Operation) -> float:
    """Max-norm of the signed cyclic sum of the graded Jacobi identity."""
    a, b, c = f.reduced_degree, g.reduced_degree, h.reduced_degree
    br = gerstenhaber_bracket
    total = (
        graded_sign(a * c) * br(br(f, g), h).coeffs
        + graded_sign(b * a) * br(br(g, h), f).coeffs
        + graded_sign(c * b) * br(br(h, f), g).coeffs
    )
    return float(np.max(np.abs(total)))
