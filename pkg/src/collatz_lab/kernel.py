"""Exact-arithmetic Collatz step maps, trajectories, and 2-adic valuation.

Everything here works on plain Python integers, which are exact and
unbounded (CPython keeps small values on a machine-word fast path and
promotes automatically), so no value is ever rounded or truncated no
matter how far a trajectory climbs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

DEFAULT_MAX_STEPS = 10**6


class Variant(Enum):
    """Which step map drives a trajectory."""

    STANDARD = "standard"
    SHORTCUT = "shortcut"
    SYRACUSE = "syracuse"


class StepKind(Enum):
    """What a single recorded step did to its input."""

    HALVE = "halve"                      # n/2, even n only
    TRIPLE_ADD_ONE = "triple_add_one"    # 3n+1, odd n only
    SHORTCUT_ODD_STEP = "shortcut_odd"   # (3n+1)/2, odd n only
    SYRACUSE_STEP = "syracuse"           # odd part of 3n+1, odd n only


def _require_positive(n: int, name: str = "n") -> None:
    if n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n}")


def step_standard(n: int) -> int:
    """One step of the standard map: n/2 if n is even, 3n+1 if odd."""
    _require_positive(n)
    return n // 2 if n % 2 == 0 else 3 * n + 1


def step_shortcut(n: int) -> int:
    """One step of the shortcut map T: n/2 if even, (3n+1)/2 if odd.

    The odd branch divides exactly: 3(2k+1)+1 = 2(3k+2).
    """
    _require_positive(n)
    return n // 2 if n % 2 == 0 else (3 * n + 1) // 2


def v2_factor(n: int) -> tuple[int, int]:
    """Split n = 2**e * x with x odd; returns (e, x) with e maximal."""
    _require_positive(n)
    e = (n & -n).bit_length() - 1
    return e, n >> e


def syracuse_step(k: int) -> int:
    """The Syracuse function: the odd part of 3k+1, defined on odd k only."""
    _require_positive(k, "k")
    if k % 2 == 0:
        raise ValueError(f"syracuse_step is defined on odd integers only, got {k}")
    m = 3 * k + 1
    return m >> ((m & -m).bit_length() - 1)


def is_power_of_two(n: int) -> bool:
    """True iff n = 2**k for some k >= 0."""
    _require_positive(n)
    return n & (n - 1) == 0


def is_power_of_four(n: int) -> bool:
    """True iff n = 4**m for some m >= 0."""
    return is_power_of_two(n) and (n.bit_length() - 1) % 2 == 0


def apply_step_kind(value: int, kind: StepKind) -> int:
    """Replay a recorded step kind, enforcing its parity precondition."""
    _require_positive(value, "value")
    if kind is StepKind.HALVE:
        if value % 2:
            raise ValueError(f"HALVE recorded for odd value {value}")
        return value // 2
    if value % 2 == 0:
        raise ValueError(f"{kind.name} recorded for even value {value}")
    if kind is StepKind.TRIPLE_ADD_ONE:
        return 3 * value + 1
    if kind is StepKind.SHORTCUT_ODD_STEP:
        return (3 * value + 1) // 2
    return syracuse_step(value)


def _step_and_kind(n: int, variant: Variant) -> tuple[int, StepKind]:
    if variant is Variant.SYRACUSE:
        return syracuse_step(n), StepKind.SYRACUSE_STEP
    if n % 2 == 0:
        return n // 2, StepKind.HALVE
    if variant is Variant.STANDARD:
        return 3 * n + 1, StepKind.TRIPLE_ADD_ONE
    return (3 * n + 1) // 2, StepKind.SHORTCUT_ODD_STEP


@dataclass(frozen=True)
class Trajectory:
    """An orbit record: values visited, per-step kinds, peak, termination."""

    start: int
    variant: Variant
    values: tuple[int, ...]
    steps: tuple[StepKind, ...]
    peak: int
    terminated: bool

    @property
    def step_count(self) -> int:
        return len(self.steps)

    def replay(self) -> tuple[int, ...]:
        """Recompute the value chain from the recorded step kinds."""
        out = [self.start]
        for kind in self.steps:
            out.append(apply_step_kind(out[-1], kind))
        return tuple(out)


def trajectory(
    start: int,
    variant: Variant = Variant.STANDARD,
    max_steps: int = DEFAULT_MAX_STEPS,
    continue_past_one: bool = False,
) -> Trajectory:
    """Iterate the chosen step map from ``start``.

    Stops on reaching 1 (recorded, never stepped past) or when the step
    budget runs out; budget exhaustion is not an error, it just leaves
    ``terminated`` False.  With ``continue_past_one`` the iteration runs
    the full budget, exposing the trivial 1 -> 4 -> 2 -> 1 cycle, and
    ``terminated`` reports whether 1 was visited at all.
    """
    _require_positive(start, "start")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if variant is Variant.SYRACUSE and start % 2 == 0:
        raise ValueError("syracuse trajectories require an odd start")

    values = [start]
    kinds: list[StepKind] = []
    n = start
    while len(kinds) < max_steps:
        if n == 1 and not continue_past_one:
            break
        n, kind = _step_and_kind(n, variant)
        values.append(n)
        kinds.append(kind)
        if n == 1 and not continue_past_one:
            break
    terminated = 1 in values if continue_past_one else values[-1] == 1
    return Trajectory(
        start=start,
        variant=variant,
        values=tuple(values),
        steps=tuple(kinds),
        peak=max(values),
        terminated=terminated,
    )
