"""Collatz trajectories, stage structure, parity vectors, smooth real
extensions, and high-throughput range verification."""

from .kernel import (
    DEFAULT_MAX_STEPS,
    StepKind,
    Trajectory,
    Variant,
    apply_step_kind,
    is_power_of_four,
    is_power_of_two,
    step_shortcut,
    step_standard,
    syracuse_step,
    trajectory,
    v2_factor,
)
from .padic import ParityVector, isometry_check, parity_vector, q_truncated
from .realext import RealOrbit, real_orbit, smooth_map, smooth_map_shortcut
from .structure import (
    BackwardNode,
    StageReport,
    a_element,
    b_element,
    backward_tree,
    classify_stage,
    in_set_a,
    in_set_b,
    odd_quotient_by3,
    pow2_minus1_mod3,
    preimages,
)
from .verifier import (
    Checkpoint,
    CheckpointConfigMismatch,
    CheckpointError,
    CheckpointVersionError,
    MalformedCheckpointError,
    VerificationReport,
    VerifyConfig,
    VerifyMode,
    checkpoint_read,
    checkpoint_write,
    verify_one,
    verify_range,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MAX_STEPS",
    "StepKind",
    "Trajectory",
    "Variant",
    "apply_step_kind",
    "is_power_of_four",
    "is_power_of_two",
    "step_shortcut",
    "step_standard",
    "syracuse_step",
    "trajectory",
    "v2_factor",
    "ParityVector",
    "isometry_check",
    "parity_vector",
    "q_truncated",
    "RealOrbit",
    "real_orbit",
    "smooth_map",
    "smooth_map_shortcut",
    "BackwardNode",
    "StageReport",
    "a_element",
    "b_element",
    "backward_tree",
    "classify_stage",
    "in_set_a",
    "in_set_b",
    "odd_quotient_by3",
    "pow2_minus1_mod3",
    "preimages",
    "Checkpoint",
    "CheckpointConfigMismatch",
    "CheckpointError",
    "CheckpointVersionError",
    "MalformedCheckpointError",
    "VerificationReport",
    "VerifyConfig",
    "VerifyMode",
    "checkpoint_read",
    "checkpoint_write",
    "verify_one",
    "verify_range",
]
