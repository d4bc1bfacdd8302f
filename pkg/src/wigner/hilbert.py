"""Finite-dimensional complex inner-product arithmetic.

Vectors are 1-D ``complex128`` numpy arrays. The inner product is
conjugate-linear in the FIRST argument and linear in the second (physics
convention), so ``inner_product(1j * e1, e1) == -1j``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

ComplexVector = np.ndarray


def default_tol(dim: int) -> float:
    """Default tolerance scaled with dimension (rounding accumulates over sums)."""
    return 1e-10 * max(int(dim), 1)


def as_vector(values) -> ComplexVector:
    """Coerce ``values`` to a finite 1-D complex vector.

    Raises
    ------
    ValueError
        If the input is not one-dimensional, is empty, or has NaN/Inf entries.
    """
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite components")
    return v


def basis_vector(dim: int, index: int) -> ComplexVector:
    """Standard basis vector ``e_index`` of dimension ``dim`` (0-based)."""
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} out of range for dim {dim}")
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def standard_basis(dim: int) -> list[ComplexVector]:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return [basis_vector(dim, k) for k in range(dim)]


def _check_dims(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")


def inner_product(u, v) -> complex:
    """Return ``sum(conj(u_k) * v_k)``."""
    u, v = as_vector(u), as_vector(v)
    _check_dims(u, v)
    return complex(np.vdot(u, v))


def norm(v) -> float:
    v = as_vector(v)
    return float(np.sqrt(np.vdot(v, v).real))


def fourier_coefficients(v, basis: Sequence) -> list[complex]:
    """Coefficients ``<b, v>`` of ``v`` against each vector ``b`` of ``basis``.

    The basis is assumed orthonormal; use :func:`check_orthonormal` to
    confirm. When it is also complete, ``sum(c * b)`` reconstructs ``v``.
    """
    v = as_vector(v)
    out = []
    for b in basis:
        b = as_vector(b)
        _check_dims(b, v)
        out.append(complex(np.vdot(b, v)))
    return out


def reconstruct_from_coefficients(coefficients: Sequence[complex], basis: Sequence) -> ComplexVector:
    if len(basis) == 0:
        raise ValueError("empty basis")
    acc = np.zeros_like(as_vector(basis[0]))
    for c, b in zip(coefficients, basis, strict=True):
        acc = acc + c * as_vector(b)
    return acc


def gram_matrix(vectors: Sequence) -> np.ndarray:
    mat = np.array([as_vector(v) for v in vectors])
    return mat.conj() @ mat.T


def check_orthonormal(vectors: Sequence, tol: float) -> bool:
    """True iff ``|<v_i, v_j> - delta_ij| <= tol`` for every pair.

    An empty list is vacuously orthonormal.
    """
    if len(vectors) == 0:
        return True
    dims = {as_vector(v).shape for v in vectors}
    if len(dims) != 1:
        raise ValueError("vectors have differing dimensions")
    g = gram_matrix(vectors)
    return bool(np.max(np.abs(g - np.eye(len(vectors)))) <= tol)


def parseval_gap(v, orthonormal_set: Sequence) -> float:
    """Return ``||v||^2 - sum_a |<psi_a, v>|^2``.

    Bessel's inequality makes this nonnegative (up to rounding); it vanishes
    exactly when ``v`` lies in the span of the set.
    """
    v = as_vector(v)
    coeffs = fourier_coefficients(v, orthonormal_set)
    return float(np.vdot(v, v).real - sum(abs(c) ** 2 for c in coeffs))


def gram_schmidt(vectors: Iterable, tol: float) -> list[ComplexVector]:
    """Orthonormalize ``vectors`` in order, with two projection passes.

    Raises
    ------
    ValueError
        If a residual norm drops below ``tol`` (rank deficiency).
    """
    out: list[ComplexVector] = []
    for k, v in enumerate(vectors):
        w = as_vector(v).copy()
        if out:
            _check_dims(out[0], w)
        # second pass restores orthogonality lost to cancellation
        for _ in range(2):
            for q in out:
                w = w - np.vdot(q, w) * q
        r = float(np.linalg.norm(w))
        if r < tol:
            raise ValueError(f"rank deficiency at vector {k}: residual norm {r:.3e} < {tol:.3e}")
        out.append(w / r)
    return out


# --- text format: one vector per line, components as `re,im` ---------------

def format_complex(z: complex) -> str:
    return f"{z.real:.17g},{z.imag:.17g}"


def parse_complex(token: str) -> complex:
    try:
        re_s, im_s = token.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise ValueError(f"malformed complex entry {token!r}") from exc


def format_vector(v) -> str:
    return " ".join(format_complex(complex(z)) for z in as_vector(v))


def parse_vector(line: str) -> ComplexVector:
    tokens = line.split()
    if not tokens:
        raise ValueError("empty vector line")
    return as_vector([parse_complex(t) for t in tokens])
