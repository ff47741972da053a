"""Stage structure of trajectories: the sets A and B, backward steps, and
the classification pipeline.

A is the set of odd numbers one multiply-step away from a power of four
(3x+1 = 4**m, x != 1); B = 2*A sits one halving before A.  Every
trajectory that is not already inside the power-of-two tail funnels
through ... -> B -> A -> 4**m -> ... -> 1, and ``classify_stage``
records where a given start first hits each stage.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .kernel import (
    DEFAULT_MAX_STEPS,
    Variant,
    is_power_of_four,
    is_power_of_two,
    step_standard,
    trajectory,
)


def a_element(n: int) -> int:
    """n-th element of A: (4**(n+1) - 1) / 3, exactly (5, 21, 85, ...)."""
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    return (4 ** (n + 1) - 1) // 3


def b_element(n: int) -> int:
    """n-th element of B: 2 * a_element(n) (10, 42, 170, ...)."""
    return 2 * a_element(n)


def in_set_a(x: int) -> bool:
    """True iff x is odd, x != 1, and 3x+1 is a power of four.

    1 is excluded: it is the destination, not a stage before the powers
    of two.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    return x % 2 == 1 and x != 1 and is_power_of_four(3 * x + 1)


def in_set_b(x: int) -> bool:
    """True iff x is even and x/2 is in A."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    return x % 2 == 0 and in_set_a(x // 2)


def preimages(n: int, include_one: bool = False) -> set[int]:
    """All m with step_standard(m) == n.

    Always contains 2n; contains (n-1)/3 when that is an odd integer.
    The odd preimage 1 (under n = 4) is suppressed unless ``include_one``:
    1 is the destination, so by default the backward walk never re-enters
    the trivial cycle through it.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = {2 * n}
    if n % 3 == 1:
        m = (n - 1) // 3
        if m >= 1 and m % 2 == 1 and (include_one or m != 1):
            out.add(m)
    return out


@dataclass(frozen=True)
class BackwardNode:
    """One node of the backward (preimage) tree."""

    value: int
    depth: int
    parent: Optional[int]
    via_odd_branch: bool  # True when value == (parent - 1) / 3


def backward_tree(
    root: int,
    depth: int,
    include_one: bool = False,
) -> list[BackwardNode]:
    """Breadth-first preimage expansion from ``root`` down to ``depth``.

    Nodes come back ordered by (depth, value), so output is deterministic.
    With ``include_one`` the walk may re-enter the 1 -> 4 -> 2 -> 1 cycle
    and values can repeat at later depths.
    """
    if root < 1:
        raise ValueError(f"root must be >= 1, got {root}")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")

    nodes = [BackwardNode(value=root, depth=0, parent=None, via_odd_branch=False)]
    frontier = deque([root])
    for d in range(1, depth + 1):
        level: list[BackwardNode] = []
        for parent in frontier:
            for m in preimages(parent, include_one=include_one):
                level.append(
                    BackwardNode(
                        value=m,
                        depth=d,
                        parent=parent,
                        via_odd_branch=(m != 2 * parent),
                    )
                )
        level.sort(key=lambda node: node.value)
        nodes.extend(level)
        frontier = deque(node.value for node in level)
    return nodes


def pow2_minus1_mod3(k: int) -> int:
    """(2**k - 1) mod 3, computed with unbounded integers.

    0 iff k is even (2**2k - 1 = 3r), 1 iff k is odd (2**(2k+1) - 1 = 6r+1).
    """
    if k < 1:
        raise ValueError(f"exponent must be >= 1, got {k}")
    return (2**k - 1) % 3


def odd_quotient_by3(x: int) -> int:
    """x/3 for odd x divisible by 3; the quotient is always odd."""
    if x < 1 or x % 2 == 0:
        raise ValueError(f"x must be a positive odd integer, got {x}")
    if x % 3 != 0:
        raise ValueError(f"x must be divisible by 3, got {x}")
    return x // 3


@dataclass(frozen=True)
class StageReport:
    """Where a trajectory first hits each stage of the pipeline.

    ``first_pow4_hit`` marks entry into the terminal power-of-two stage;
    for a start that is not itself a power of two, that entry value is
    provably a power of four, which is what names the field.
    """

    start: int
    first_b_hit: Optional[tuple[int, int]]      # (index, value)
    first_a_hit: Optional[tuple[int, int]]
    first_pow4_hit: Optional[tuple[int, int]]
    reached_one: bool
    pipeline_consistent: bool


def classify_stage(start: int, max_steps: int = DEFAULT_MAX_STEPS) -> StageReport:
    """Run a standard trajectory and record the first B / A / power-of-two
    stage hits, checking them against the pipeline shape.

    Budget exhaustion is reported as reached_one=False with whatever hits
    were seen.
    """
    traj = trajectory(start, Variant.STANDARD, max_steps=max_steps)

    first_b = first_a = first_pow = None
    for idx, value in enumerate(traj.values):
        if first_b is None and in_set_b(value):
            first_b = (idx, value)
        if first_a is None and in_set_a(value):
            first_a = (idx, value)
        if first_pow is None and is_power_of_two(value):
            first_pow = (idx, value)
        if first_b and first_a and first_pow:
            break

    consistent = True
    if first_a and first_pow and not is_power_of_two(start):
        consistent &= first_pow[0] == first_a[0] + 1
    if first_b:
        consistent &= (
            first_a is not None
            and first_b[0] + 1 == first_a[0]
            and first_b[1] == 2 * first_a[1]
        )

    return StageReport(
        start=start,
        first_b_hit=first_b,
        first_a_hit=first_a,
        first_pow4_hit=first_pow,
        reached_one=traj.terminated,
        pipeline_consistent=bool(consistent),
    )
