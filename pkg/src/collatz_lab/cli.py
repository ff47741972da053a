"""Command-line surface: orbits, stage classification, sets, trees,
parity vectors, real orbits, range verification, and invariant suites.

Exit codes: 0 success / all checks passed, 1 a property violation or
counterexample (or unresolved candidate) was found, 2 usage error.
All numeric arguments are decimal strings parsed to unbounded integers.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from typing import Optional

from . import kernel, padic, realext, structure, verifier

WORKERS_ENV = "COLLATZ_LAB_WORKERS"
PROP_SUITES = ("syracuse", "mod3", "pipeline", "isometry", "realagree")
DEFAULT_PROP_SEED = 0x3A1


def _positive_int(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a decimal integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _emit_csv(header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    sys.stdout.write(buf.getvalue())


def _emit_json(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


# --- trajectory ---------------------------------------------------------

def _cmd_trajectory(args: argparse.Namespace) -> int:
    traj = kernel.trajectory(
        args.n,
        kernel.Variant(args.variant),
        max_steps=args.max_steps,
        continue_past_one=args.continue_past_one,
    )
    kinds = [k.value for k in traj.steps]
    if args.format == "json":
        _emit_json(
            {
                "start": traj.start,
                "variant": traj.variant.value,
                "values": list(traj.values),
                "step_kinds": kinds,
                "steps": traj.step_count,
                "peak": traj.peak,
                "terminated": traj.terminated,
            }
        )
    elif args.format == "csv":
        rows = [
            [i, v, kinds[i] if i < len(kinds) else ""]
            for i, v in enumerate(traj.values)
        ]
        _emit_csv(["index", "value", "step_kind"], rows)
    else:
        print(" -> ".join(str(v) for v in traj.values))
        print(
            f"steps={traj.step_count} peak={traj.peak} "
            f"terminated={str(traj.terminated).lower()} variant={traj.variant.value}"
        )
    return 0


# --- classify -----------------------------------------------------------

def _hit(report_field: Optional[tuple[int, int]]) -> tuple[str, str]:
    if report_field is None:
        return "", ""
    return str(report_field[0]), str(report_field[1])


def _cmd_classify(args: argparse.Namespace) -> int:
    if args.range is not None:
        numbers = range(args.range[0], args.range[1] + 1)
    else:
        numbers = [args.n]

    reports = [structure.classify_stage(n, max_steps=args.max_steps) for n in numbers]
    if args.format == "json":
        _emit_json(
            [
                {
                    "n": r.start,
                    "b_index": None if r.first_b_hit is None else r.first_b_hit[0],
                    "b_value": None if r.first_b_hit is None else r.first_b_hit[1],
                    "a_index": None if r.first_a_hit is None else r.first_a_hit[0],
                    "a_value": None if r.first_a_hit is None else r.first_a_hit[1],
                    "pow4_index": None if r.first_pow4_hit is None else r.first_pow4_hit[0],
                    "pow4_value": None if r.first_pow4_hit is None else r.first_pow4_hit[1],
                    "reached_one": r.reached_one,
                    "consistent": r.pipeline_consistent,
                }
                for r in reports
            ]
        )
        return 0
    header = [
        "n", "b_index", "b_value", "a_index", "a_value",
        "pow4_index", "pow4_value", "reached_one", "consistent",
    ]
    rows = []
    for r in reports:
        bi, bv = _hit(r.first_b_hit)
        ai, av = _hit(r.first_a_hit)
        pi, pv = _hit(r.first_pow4_hit)
        rows.append(
            [r.start, bi, bv, ai, av, pi, pv,
             str(r.reached_one).lower(), str(r.pipeline_consistent).lower()]
        )
    if args.format == "csv":
        _emit_csv(header, rows)
    else:
        for row in rows:
            print(" ".join(f"{k}={v if v != '' else '-'}" for k, v in zip(header, row)))
    return 0


# --- sets ----------------------------------------------------------------

def _cmd_sets(args: argparse.Namespace) -> int:
    element = structure.a_element if args.set == "a" else structure.b_element
    values = [element(i) for i in range(1, args.count + 1)]
    if args.format == "json":
        _emit_json({"set": args.set, "count": args.count, "elements": values})
    elif args.format == "csv":
        _emit_csv(["index", "value"], [[i + 1, v] for i, v in enumerate(values)])
    else:
        print(" ".join(map(str, values)))
    return 0


# --- tree ------------------------------------------------------------------

def _cmd_tree(args: argparse.Namespace) -> int:
    nodes = structure.backward_tree(args.root, args.depth, include_one=args.include_one)
    if args.format == "json":
        _emit_json(
            [
                {
                    "value": n.value,
                    "depth": n.depth,
                    "parent": n.parent,
                    "via_odd_branch": n.via_odd_branch,
                }
                for n in nodes
            ]
        )
    elif args.format == "csv":
        rows = [
            [n.value, n.depth, "" if n.parent is None else n.parent,
             str(n.via_odd_branch).lower()]
            for n in nodes
        ]
        _emit_csv(["value", "depth", "parent", "via_odd_branch"], rows)
    else:
        print(" ".join(str(n.value) for n in nodes))
    return 0


# --- parity ------------------------------------------------------------------

def _cmd_parity(args: argparse.Namespace) -> int:
    vec = padic.parity_vector(args.x, args.bits)
    q = vec.as_int()
    if args.format == "json":
        _emit_json(
            {"x": args.x, "k": vec.length, "bits": list(vec.bits), "q": q}
        )
    elif args.format == "csv":
        _emit_csv(["index", "bit"], [[i, b] for i, b in enumerate(vec.bits)])
    else:
        print(
            f"x={args.x} k={vec.length} "
            f"bits={''.join(map(str, vec.bits))} q={q}"
        )
    return 0


# --- real -------------------------------------------------------------------

def _cmd_real(args: argparse.Namespace) -> int:
    orbit = realext.real_orbit(
        args.z,
        kernel.Variant(args.variant),
        n_steps=args.steps,
        escape_bound=args.escape_bound,
    )
    if args.format == "json":
        _emit_json(
            {
                "z0": orbit.values[0],
                "variant": args.variant,
                "values": list(orbit.values),
                "escaped": orbit.escaped,
            }
        )
    elif args.format == "csv":
        _emit_csv(["step", "value"], [[i, repr(v)] for i, v in enumerate(orbit.values)])
    else:
        for i, v in enumerate(orbit.values):
            print(f"{i} {v!r}")
        print(f"escaped={str(orbit.escaped).lower()}")
    return 0


# --- verify -------------------------------------------------------------------

def _cmd_verify(args: argparse.Namespace) -> int:
    mode = (
        verifier.VerifyMode.DROP_BELOW_START
        if args.mode == "drop-below-start"
        else verifier.VerifyMode.FULL_TO_ONE
    )
    cfg = verifier.VerifyConfig(
        lo=args.lo,
        hi=args.hi,
        chunk_size=args.chunk_size,
        mode=mode,
        max_steps=args.max_steps,
        worker_count=args.workers,
        checkpoint_path=args.checkpoint,
        checkpoint_interval=args.checkpoint_interval,
        use_small_cache=args.small_cache,
    )
    report = verifier.verify_range(cfg)
    if args.format == "json":
        _emit_json(report.to_json_dict())
    elif args.format == "csv":
        fields = report.to_json_dict()
        row = [
            ",".join(map(str, v)) if isinstance(v, list) else v
            for v in fields.values()
        ]
        _emit_csv(list(fields.keys()), [row])
    else:
        sys.stdout.write(report.to_text())
    return 1 if (report.counterexamples or report.unresolved) else 0


# --- props ---------------------------------------------------------------------

def _suite_syracuse(bound: int) -> tuple[int, Optional[str]]:
    checks = 0
    for k in range(1, bound + 1, 2):
        checks += 1
        if kernel.syracuse_step(4 * k + 1) != kernel.syracuse_step(k):
            return checks, f"f(4k+1) != f(k) at k={k}"
    for h in range(1, min(bound, 1000) + 1, 2):
        for p in range(1, 21):
            checks += 1
            value = (1 << p) * h - 1
            for _ in range(p - 1):
                value = kernel.syracuse_step(value)
            if value != 2 * 3 ** (p - 1) * h - 1:
                return checks, f"iterate identity fails at h={h} p={p}"
    for h in range(1, bound + 1, 2):
        checks += 1
        if kernel.syracuse_step(2 * h - 1) > (3 * h - 1) // 2:
            return checks, f"f(2h-1) > (3h-1)/2 at h={h}"
    return checks, None


def _suite_mod3(bound: int) -> tuple[int, Optional[str]]:
    for k in range(1, bound + 1):
        residue = structure.pow2_minus1_mod3(k)
        if residue != (0 if k % 2 == 0 else 1):
            return k, f"(2^{k} - 1) mod 3 = {residue}"
    return bound, None


def _suite_pipeline(bound: int) -> tuple[int, Optional[str]]:
    checks = 0
    for n in range(2, bound + 1):
        if kernel.is_power_of_two(n):
            continue
        checks += 1
        report = structure.classify_stage(n)
        if not (report.reached_one and report.pipeline_consistent):
            return checks, f"inconsistent stage report at n={n}"
        if report.first_pow4_hit is None or not kernel.is_power_of_four(
            report.first_pow4_hit[1]
        ):
            return checks, f"first power-of-two stage is not a power of 4 at n={n}"
    return checks, None


def _suite_isometry(bound: int, seed: int) -> tuple[int, Optional[str]]:
    rng = random.Random(seed)
    checks = 0
    for _ in range(bound):
        x = rng.randint(1, 10**9)
        y = rng.randint(1, 10**9)
        for k in range(1, 33):
            checks += 1
            if not padic.isometry_check(x, y, k):
                return checks, f"isometry disagrees at x={x} y={y} k={k}"
    return checks, None


def _suite_realagree(bound: int) -> tuple[int, Optional[str]]:
    for n in range(1, bound + 1):
        expected = kernel.step_standard(n)
        got = realext.smooth_map(float(n))
        if abs(got - expected) > 1e-9 * (1 + expected):
            return n, f"smooth_map({n}) = {got!r}, integer map gives {expected}"
        expected = kernel.step_shortcut(n)
        got = realext.smooth_map_shortcut(float(n))
        if abs(got - expected) > 1e-9 * (1 + expected):
            return n, f"smooth_map_shortcut({n}) = {got!r}, integer map gives {expected}"
    return bound, None


def _cmd_props(args: argparse.Namespace) -> int:
    if args.suite == "syracuse":
        checks, violation = _suite_syracuse(args.bound)
    elif args.suite == "mod3":
        checks, violation = _suite_mod3(args.bound)
    elif args.suite == "pipeline":
        checks, violation = _suite_pipeline(args.bound)
    elif args.suite == "isometry":
        checks, violation = _suite_isometry(args.bound, args.seed)
    else:
        checks, violation = _suite_realagree(args.bound)
    if violation is None:
        print(f"suite={args.suite} bound={args.bound} checks={checks} result=pass")
        return 0
    print(f"suite={args.suite} bound={args.bound} result=FAIL: {violation}")
    return 1


# --- parser ---------------------------------------------------------------

def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("text", "json", "csv"), default="text",
        help="output format (default: text)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collatz-lab",
        description="Collatz trajectories, stage structure, parity vectors, "
        "smooth extensions, and range verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory", help="iterate a step map from n")
    p.add_argument("n", type=_positive_int)
    p.add_argument(
        "--variant", choices=[v.value for v in kernel.Variant], default="standard"
    )
    p.add_argument("--max-steps", type=_positive_int, default=kernel.DEFAULT_MAX_STEPS)
    p.add_argument(
        "--continue-past-one", action="store_true",
        help="do not stop at 1 (exposes the trivial 1-4-2-1 cycle)",
    )
    _add_format(p)
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("classify", help="stage-classify one number or a range")
    p.add_argument("n", type=_positive_int, nargs="?")
    p.add_argument(
        "--range", nargs=2, type=_positive_int, metavar=("LO", "HI"), default=None
    )
    p.add_argument("--max-steps", type=_positive_int, default=kernel.DEFAULT_MAX_STEPS)
    _add_format(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("sets", help="list leading elements of set A or B")
    p.add_argument("--set", choices=("a", "b"), required=True)
    p.add_argument("--count", type=_positive_int, required=True)
    _add_format(p)
    p.set_defaults(func=_cmd_sets)

    p = sub.add_parser("tree", help="backward (preimage) tree expansion")
    p.add_argument("--root", type=_positive_int, required=True)
    p.add_argument("--depth", type=_nonnegative_int, required=True)
    p.add_argument(
        "--include-one", action="store_true",
        help="allow the odd preimage 1 (re-enters the trivial cycle)",
    )
    _add_format(p)
    p.set_defaults(func=_cmd_tree)

    p = sub.add_parser("parity", help="truncated parity vector of the shortcut map")
    p.add_argument("x", type=_positive_int)
    p.add_argument("--bits", type=_positive_int, default=padic.DEFAULT_TRUNCATION)
    _add_format(p)
    p.set_defaults(func=_cmd_parity)

    p = sub.add_parser("real", help="orbit of the smooth real extension")
    p.add_argument("z", type=float)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--variant", choices=("standard", "shortcut"), default="standard")
    p.add_argument(
        "--escape-bound", type=float, default=realext.DEFAULT_ESCAPE_BOUND
    )
    _add_format(p)
    p.set_defaults(func=_cmd_real)

    p = sub.add_parser("verify", help="verify convergence over [lo, hi]")
    p.add_argument("--lo", type=_positive_int, required=True)
    p.add_argument("--hi", type=_positive_int, required=True)
    p.add_argument(
        "--mode", choices=("drop-below-start", "full-to-one"),
        default="drop-below-start",
    )
    p.add_argument(
        "--workers", type=_positive_int,
        default=int(os.environ.get(WORKERS_ENV, "1") or "1"),
        help=f"worker processes (default: ${WORKERS_ENV} or 1)",
    )
    p.add_argument(
        "--chunk-size", type=_positive_int, default=verifier.DEFAULT_CHUNK_SIZE
    )
    p.add_argument(
        "--max-steps", type=_positive_int, default=verifier.DEFAULT_MAX_STEPS
    )
    p.add_argument("--checkpoint", default=None, help="checkpoint file path")
    p.add_argument("--checkpoint-interval", type=_positive_int, default=16)
    p.add_argument(
        "--small-cache", action="store_true",
        help="memoize full-to-one results below 2^16 in the exact kernel",
    )
    _add_format(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("props", help="run a named invariant suite")
    p.add_argument("--suite", choices=PROP_SUITES, required=True)
    p.add_argument("--bound", type=_positive_int, required=True)
    p.add_argument("--seed", type=_nonnegative_int, default=DEFAULT_PROP_SEED)
    p.set_defaults(func=_cmd_props)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "classify" and (args.n is None) == (args.range is None):
        parser.error("classify needs exactly one of: a positional n, or --range LO HI")
    if args.command == "classify" and args.range is not None and args.range[0] > args.range[1]:
        parser.error(f"inverted range: {args.range[0]} > {args.range[1]}")
    if args.command == "verify" and args.lo > args.hi:
        parser.error(f"inverted range: {args.lo} > {args.hi}")
    if args.command == "verify" and args.lo < 2:
        parser.error("verification starts at 2 (1 is the destination)")
    try:
        return args.func(args)
    except verifier.CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
