"""Geometric model of a Margulis tube.

A tube is a solid-torus neighbourhood of a short closed geodesic in a
hyperbolic 3-manifold, carrying the model metric

    cosh^2(r) dt^2 + dr^2 + sinh^2(r) dtheta^2

on B^2(R) x S^1.  This module holds the tube data (radius, core length,
filling slope) and the scalar radial functions that appear when the tube
eigenproblems are reduced to one dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FillingSlope",
    "Tube",
    "weight_t",
    "weight_theta",
    "weight_volume",
    "substitution_length",
    "orbit_length_bound",
    "invariance_threshold",
    "core_length_from_boundary_area",
]

# 10-point Gauss-Legendre rule mapped to [0,1], for the singularity-split
# integral in substitution_length.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_GL_NODES = tuple(float(0.5 * (x + 1.0)) for x in _GL_X)
_GL_WEIGHTS = tuple(float(0.5 * w) for w in _GL_W)


@dataclass(frozen=True)
class FillingSlope:
    """A filling slope: a coprime integer pair (p, q), or the unfilled slope.

    The unfilled (cusp) case is represented by ``FillingSlope.infinity()``,
    with ``p`` and ``q`` both None.
    """

    p: int | None
    q: int | None

    def __post_init__(self) -> None:
        if (self.p is None) != (self.q is None):
            raise ValueError("slope must set both p and q, or neither")
        if self.p is None:
            return
        if self.p == 0 and self.q == 0:
            raise ValueError("slope (0, 0) is not allowed")
        if math.gcd(abs(self.p), abs(self.q)) != 1:
            raise ValueError(f"slope ({self.p}, {self.q}) is not coprime")

    @classmethod
    def infinity(cls) -> "FillingSlope":
        return cls(None, None)

    @property
    def is_infinity(self) -> bool:
        return self.p is None


@dataclass(frozen=True)
class Tube:
    """A Margulis tube: radius R, core geodesic length l, filling slope."""

    R: float
    l: float
    slope: FillingSlope

    def __post_init__(self) -> None:
        if not self.R > 0:
            raise ValueError(f"tube radius must be positive, got {self.R}")
        if not self.l > 0:
            raise ValueError(f"core length must be positive, got {self.l}")


def _reject_negative(r, what: str) -> None:
    if np.any(np.asarray(r) < 0):
        raise ValueError(f"{what} requires r >= 0")


def weight_t(r):
    """Radial weight tanh(r) of the core-direction component problem.

    Accepts scalars or arrays; r must be nonnegative.
    """
    _reject_negative(r, "weight_t")
    return np.tanh(r)


def weight_theta(r):
    """Radial weight coth(r) of the angular component problem.

    Has a pole at r = 0, so r must be strictly positive.  Solvers only ever
    sample it at element-interior quadrature points.
    """
    if np.any(np.asarray(r) <= 0):
        raise ValueError("weight_theta has a pole at r = 0; r must be > 0")
    return 1.0 / np.tanh(r)


def weight_volume(r):
    """Radial volume density cosh(r)·sinh(r) of the model metric."""
    _reject_negative(r, "weight_volume")
    return np.cosh(r) * np.sinh(r)


def substitution_length(R: float) -> float:
    """Stretched interval length under the degeneration-removing change of
    variables: the integral of tanh(r)^(-2/3) over [0, R].

    The integrand has an integrable r^(-2/3) singularity at 0.  We split at
    eps = 1e-2 and remove the singular part exactly with the substitution
    r = u^3 (du-integrand is smooth), then use composite Gauss panels.
    Grows like R for large R, and is always >= R.
    """
    if not R > 0:
        raise ValueError(f"substitution_length requires R > 0, got {R}")
    eps = min(1.0e-2, R)

    def tanh23(x: float) -> float:
        return math.tanh(x) ** (-2.0 / 3.0)

    # Singular part: r = u^3 turns tanh(r)^(-2/3) dr into 3 (u^3/tanh u^3)^(2/3) du.
    u_hi = eps ** (1.0 / 3.0)
    sing = 0.0
    for g, w in zip(_GL_NODES, _GL_WEIGHTS):
        u = u_hi * g
        u3 = u * u * u
        ratio = u3 / math.tanh(u3) if u3 > 0 else 1.0
        sing += w * 3.0 * ratio ** (2.0 / 3.0)
    sing *= u_hi

    # Regular part on [eps, R]: composite Gauss panels, geometrically
    # doubling away from eps (the integrand is still steep there) and capped
    # at width 0.25 once it has flattened out.
    total = sing
    a = eps
    width = eps
    while a < R:
        b = min(a + width, R)
        h = b - a
        acc = 0.0
        for g, w in zip(_GL_NODES, _GL_WEIGHTS):
            acc += w * tanh23(a + g * h)
        total += h * acc
        a = b
        width = min(2.0 * width, 0.25)
    return float(total)


def orbit_length_bound(tube: Tube) -> float:
    """Largest circle-orbit length of the torus action on the tube.

    Both coordinate circles have length increasing in r, so the bound is
    attained on the boundary r = R: max(l·cosh R, 2π·sinh R).
    """
    return max(tube.l * math.cosh(tube.R), 2.0 * math.pi * math.sinh(tube.R))


def invariance_threshold(L: float) -> float:
    """Eigenvalue threshold (2π/L)² below which eigenforms are circle-invariant."""
    if not L > 0:
        raise ValueError(f"orbit length bound must be positive, got {L}")
    return (2.0 * math.pi / L) ** 2


def core_length_from_boundary_area(R: float, A: float) -> float:
    """Core length of a tube with boundary torus area A: l = A / (2π cosh R sinh R)."""
    if not R > 0:
        raise ValueError(f"radius must be positive, got {R}")
    if not A > 0:
        raise ValueError(f"boundary area must be positive, got {A}")
    return A / (2.0 * math.pi * math.cosh(R) * math.sinh(R))
