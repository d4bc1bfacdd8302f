"""Rays: unit vectors modulo a global phase."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import as_vector, format_vector, parse_vector


@dataclass(frozen=True, eq=False)
class Ray:
    """A ray stored through one explicit unit-norm representative.

    No canonical gauge is imposed; compare rays with :func:`ray_equal`.
    """

    rep: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        rep = as_vector(self.rep).copy()
        if abs(np.linalg.norm(rep) - 1.0) > 1e-12:
            raise ValueError("ray representative must be unit norm")
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)
        object.__setattr__(self, "dim", rep.shape[0])

    def __repr__(self) -> str:
        return f"Ray({format_vector(self.rep)})"


@dataclass(frozen=True)
class RayPair:
    first: Ray
    second: Ray

    def __post_init__(self):
        if self.first.dim != self.second.dim:
            raise ValueError("rays in a pair must share a dimension")


def ray_from_vector(v) -> Ray:
    v = as_vector(v)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector has no ray")
    return Ray(v / n)


def ray_product(r1: Ray, r2: Ray) -> float:
    """``|<rep1, rep2>|``, independent of either representative's phase."""
    if r1.dim != r2.dim:
        raise ValueError(f"dimension mismatch: {r1.dim} vs {r2.dim}")
    return float(abs(np.vdot(r1.rep, r2.rep)))


def ray_equal(r1: Ray, r2: Ray, tol: float = 1e-10) -> bool:
    return ray_product(r1, r2) >= 1.0 - tol


def rephase(r: Ray, theta: float) -> Ray:
    return Ray(np.exp(1j * theta) * r.rep)


def canonical_gauge(r: Ray) -> np.ndarray:
    """Representative whose largest-modulus component (lowest index on ties)
    is real and positive. For display and hashing only."""
    k = int(np.argmax(np.abs(r.rep)))
    z = r.rep[k]
    return r.rep * (abs(z) / z)


def format_ray(r: Ray) -> str:
    return "ray " + format_vector(r.rep)


def parse_ray(line: str) -> Ray:
    head, _, rest = line.strip().partition(" ")
    if head != "ray":
        raise ValueError("ray line must start with 'ray '")
    return Ray(parse_vector(rest))
