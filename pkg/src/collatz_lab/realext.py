"""Smooth real extensions of the Collatz maps.

The trigonometric blend (z/2)*cos^2(pi*z/2) + (3z+1)*sin^2(pi*z/2)
selects the even branch at even integers and the odd branch at odd
integers, interpolating smoothly in between.  This module evaluates the
maps and their orbits; it makes no claims about real-line dynamics
beyond what evaluation shows (orbits of non-integers typically escape).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernel import Variant

DEFAULT_ESCAPE_BOUND = 1e15


def _require_finite(z: float) -> None:
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")


def smooth_map(z: float) -> float:
    """(z/2)*cos^2(pi*z/2) + (3z+1)*sin^2(pi*z/2)."""
    _require_finite(z)
    c = math.cos(math.pi * z / 2.0)
    s = math.sin(math.pi * z / 2.0)
    return 0.5 * z * c * c + (3.0 * z + 1.0) * s * s


def smooth_map_shortcut(z: float) -> float:
    """(z/2)*cos^2(pi*z/2) + ((3z+1)/2)*sin^2(pi*z/2)."""
    _require_finite(z)
    c = math.cos(math.pi * z / 2.0)
    s = math.sin(math.pi * z / 2.0)
    return 0.5 * z * c * c + 0.5 * (3.0 * z + 1.0) * s * s


@dataclass(frozen=True)
class RealOrbit:
    """A floating orbit with an escape flag."""

    values: tuple[float, ...]
    escaped: bool


def real_orbit(
    z0: float,
    variant: Variant = Variant.STANDARD,
    n_steps: int = 1,
    escape_bound: float = DEFAULT_ESCAPE_BOUND,
) -> RealOrbit:
    """Iterate the chosen smooth map from z0 for n_steps.

    Stops early once |value| exceeds ``escape_bound``; escaping is a
    reported outcome, not an error.
    """
    _require_finite(z0)
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if variant is Variant.STANDARD:
        step = smooth_map
    elif variant is Variant.SHORTCUT:
        step = smooth_map_shortcut
    else:
        raise ValueError("real orbits support the standard and shortcut maps only")

    values = [float(z0)]
    escaped = abs(values[0]) > escape_bound
    for _ in range(n_steps):
        if escaped:
            break
        nxt = step(values[-1])
        values.append(nxt)
        escaped = abs(nxt) > escape_bound
    return RealOrbit(values=tuple(values), escaped=escaped)
