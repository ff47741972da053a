"""Range convergence verification with chunked parallelism and resumable
checkpoints.

A range [lo, hi] is split into fixed-size chunks; each chunk is swept
independently (optionally by a pool of worker processes) and results are
merged strictly in chunk order, so the report is identical no matter how
many workers ran.  Chunks whose values fit comfortably in int64 go
through a vectorized numpy kernel; any lane that could overflow is
promoted to the exact pure-Python kernel first, so results never depend
on machine word width.

Verification predicates:

* drop-below-start: a number passes once an iterate falls below it.
  Sound for ranges swept in ascending order, since every smaller number
  was already verified.
* full-to-one: iterate the standard map all the way to 1.

A number that exhausts its step budget is reported as *unresolved* (a
candidate needing a bigger budget, not a disproof).  A number whose
orbit provably returns to its start without converging would be a
genuine *counterexample*; none exists in any range ever checked.
"""

from __future__ import annotations

import hashlib
import itertools
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Optional

import numpy as np

DEFAULT_CHUNK_SIZE = 1 << 20
DEFAULT_MAX_STEPS = 10**5
SMALL_CACHE_BOUND = 1 << 16

CHECKPOINT_MAGIC = "COLLATZ-CKPT"
CHECKPOINT_VERSION = 1

# Lanes are promoted to exact Python arithmetic before 3v+1 could exceed
# int64; ranges whose starts are already too large skip numpy entirely.
_NP_SAFE_LIMIT = (2**63 - 2) // 3
_NP_RANGE_LIMIT = 2**62


class VerifyMode(Enum):
    DROP_BELOW_START = "drop_below_start"
    FULL_TO_ONE = "full_to_one"


class CheckpointError(Exception):
    """Base class for checkpoint read/validation failures."""


class MalformedCheckpointError(CheckpointError):
    """File is truncated, misordered, or not decimal where it should be."""


class CheckpointVersionError(CheckpointError):
    """File declares a format version this code does not speak."""


class CheckpointConfigMismatch(CheckpointError):
    """Checkpoint digest does not match the active configuration."""


@dataclass(frozen=True)
class VerifyConfig:
    """Parameters of a range verification run."""

    lo: int
    hi: int
    chunk_size: int = DEFAULT_CHUNK_SIZE
    mode: VerifyMode = VerifyMode.DROP_BELOW_START
    max_steps: int = DEFAULT_MAX_STEPS
    worker_count: int = 1
    checkpoint_path: Optional[str] = None
    checkpoint_interval: int = 16
    use_small_cache: bool = False

    def __post_init__(self) -> None:
        if not 2 <= self.lo <= self.hi:
            raise ValueError(f"need 2 <= lo <= hi, got lo={self.lo} hi={self.hi}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.worker_count < 1:
            raise ValueError(f"worker_count must be >= 1, got {self.worker_count}")
        if self.checkpoint_interval < 1:
            raise ValueError(
                f"checkpoint_interval must be >= 1, got {self.checkpoint_interval}"
            )

    def digest(self) -> str:
        """16 hex chars over the fields that determine results.

        Worker count, checkpoint placement, and the small-value cache do
        not change what gets computed, so a run may be resumed with any
        of them changed.
        """
        text = (
            f"lo={self.lo};hi={self.hi};chunk={self.chunk_size};"
            f"mode={self.mode.value};max_steps={self.max_steps}"
        )
        return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]

    def chunks(self) -> list[tuple[int, int, int]]:
        """(index, chunk_lo, chunk_hi) covering [lo, hi] in order."""
        out = []
        index = 0
        lo = self.lo
        while lo <= self.hi:
            hi = min(lo + self.chunk_size - 1, self.hi)
            out.append((index, lo, hi))
            lo = hi + 1
            index += 1
        return out


@dataclass(frozen=True)
class VerificationReport:
    """Merged outcome of a range sweep."""

    range_lo: int
    range_hi: int
    counterexamples: tuple[int, ...]
    unresolved: tuple[int, ...]
    numbers_checked: int
    max_steps_n: int
    max_steps: int
    max_peak_n: int
    max_peak: int
    elapsed_seconds: float

    def _fields(self, include_elapsed: bool) -> list[tuple[str, str]]:
        rows = [
            ("range_lo", str(self.range_lo)),
            ("range_hi", str(self.range_hi)),
            ("counterexamples", ",".join(map(str, self.counterexamples))),
            ("unresolved", ",".join(map(str, self.unresolved))),
            ("numbers_checked", str(self.numbers_checked)),
            ("max_steps_n", str(self.max_steps_n)),
            ("max_steps", str(self.max_steps)),
            ("max_peak_n", str(self.max_peak_n)),
            ("max_peak", str(self.max_peak)),
        ]
        if include_elapsed:
            rows.append(("elapsed_seconds", f"{self.elapsed_seconds:.3f}"))
        return rows

    def to_text(self) -> str:
        """Flat key=value block, one field per line."""
        return "\n".join(f"{k}={v}" for k, v in self._fields(True)) + "\n"

    def canonical(self) -> str:
        """The comparable form: everything except wall-clock time."""
        return "\n".join(f"{k}={v}" for k, v in self._fields(False)) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "range_lo": self.range_lo,
            "range_hi": self.range_hi,
            "counterexamples": list(self.counterexamples),
            "unresolved": list(self.unresolved),
            "numbers_checked": self.numbers_checked,
            "max_steps_n": self.max_steps_n,
            "max_steps": self.max_steps,
            "max_peak_n": self.max_peak_n,
            "max_peak": self.max_peak,
            "elapsed_seconds": self.elapsed_seconds,
        }


@dataclass(frozen=True)
class Checkpoint:
    """Resumable progress: everything needed to continue a sweep."""

    digest: str
    lo: int
    hi: int
    next_unverified: int
    checked: int
    max_steps_n: int
    max_steps: int
    max_peak_n: int
    max_peak: int
    counterexamples: tuple[int, ...] = ()
    unresolved: tuple[int, ...] = ()


@dataclass(frozen=True)
class _ChunkResult:
    index: int
    checked: int
    max_steps: int
    max_steps_n: int
    max_peak: int
    max_peak_n: int
    counterexamples: tuple[int, ...]
    unresolved: tuple[int, ...]


# --- single-number kernel -------------------------------------------------

_small_cache: dict[int, tuple[int, int]] = {}


def _iterate_exact(
    start: int,
    cur: int,
    steps: int,
    peak: int,
    mode: VerifyMode,
    max_steps: int,
    use_cache: bool = False,
) -> tuple[bool, int, int]:
    """Exact continuation of a partially-run orbit; the reference kernel."""
    drop = mode is VerifyMode.DROP_BELOW_START
    cache = _small_cache if (use_cache and not drop) else None
    while steps < max_steps:
        if cache is not None and cur < SMALL_CACHE_BOUND and cur != start:
            hit = cache.get(cur)
            if hit is not None and steps + hit[0] <= max_steps:
                return True, steps + hit[0], max(peak, hit[1])
        cur = cur // 2 if cur % 2 == 0 else 3 * cur + 1
        steps += 1
        if cur > peak:
            peak = cur
        if drop:
            if cur < start:
                return True, steps, peak
        elif cur == 1:
            if cache is not None and start < SMALL_CACHE_BOUND:
                cache[start] = (steps, peak)
            return True, steps, peak
        if cur == start:
            # The orbit returned to its start: a genuine cycle.
            return False, steps, peak
    return False, steps, peak


def verify_one(
    n: int,
    mode: VerifyMode = VerifyMode.DROP_BELOW_START,
    max_steps: int = DEFAULT_MAX_STEPS,
    use_small_cache: bool = False,
) -> tuple[bool, int, int]:
    """Check one number; returns (converged, steps, peak).

    converged=False after exactly max_steps means the budget ran out (an
    unresolved candidate); converged=False earlier means the orbit came
    back to n, i.e. a real cycle.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    return _iterate_exact(n, n, 0, n, mode, max_steps, use_cache=use_small_cache)


# --- chunk kernels ----------------------------------------------------------

def _sweep_chunk_py(
    lo: int, hi: int, mode: VerifyMode, max_steps: int, use_cache: bool
) -> _ChunkResult:
    """Exact per-number sweep; handles values of any size."""
    best_steps = best_steps_n = 0
    best_peak = best_peak_n = 0
    counterexamples: list[int] = []
    unresolved: list[int] = []
    for n in range(lo, hi + 1):
        converged, steps, peak = _iterate_exact(
            n, n, 0, n, mode, max_steps, use_cache=use_cache
        )
        if not converged:
            (unresolved if steps >= max_steps else counterexamples).append(n)
        if steps > best_steps:
            best_steps, best_steps_n = steps, n
        if peak > best_peak:
            best_peak, best_peak_n = peak, n
    return _ChunkResult(
        index=-1,
        checked=hi - lo + 1,
        max_steps=best_steps,
        max_steps_n=best_steps_n,
        max_peak=best_peak,
        max_peak_n=best_peak_n,
        counterexamples=tuple(counterexamples),
        unresolved=tuple(unresolved),
    )


def _sweep_chunk_numpy(
    lo: int, hi: int, mode: VerifyMode, max_steps: int
) -> _ChunkResult:
    """Vectorized sweep of [lo, hi]; requires hi <= _NP_RANGE_LIMIT."""
    drop = mode is VerifyMode.DROP_BELOW_START
    count = hi - lo + 1

    fin_steps = np.zeros(count, dtype=np.int64)
    fin_peak = np.zeros(count, dtype=np.int64)
    status = np.zeros(count, dtype=np.int8)  # 0 ok, 1 unresolved, 2 cycle

    start = np.arange(lo, hi + 1, dtype=np.int64)
    pos = np.arange(count, dtype=np.int64)
    cur = start.copy()
    peak = start.copy()
    steps = np.zeros(count, dtype=np.int64)

    def retire(mask: np.ndarray, code: int) -> None:
        idx = pos[mask]
        fin_steps[idx] = steps[mask]
        fin_peak[idx] = peak[mask]
        status[idx] = code

    while cur.size:
        huge = cur > _NP_SAFE_LIMIT
        if huge.any():
            # Finish oversized lanes exactly; int64 must never wrap.
            for i in np.flatnonzero(huge):
                ok, st, pk = _iterate_exact(
                    int(start[i]), int(cur[i]), int(steps[i]), int(peak[i]),
                    mode, max_steps,
                )
                fin_steps[pos[i]] = st
                fin_peak[pos[i]] = pk
                status[pos[i]] = 0 if ok else (1 if st >= max_steps else 2)
            keep = ~huge
            start, pos, cur, peak, steps = (
                a[keep] for a in (start, pos, cur, peak, steps)
            )
            if not cur.size:
                break

        odd = (cur & 1).astype(bool)
        cur = np.where(odd, 3 * cur + 1, cur >> 1)
        steps += 1
        np.maximum(peak, cur, out=peak)

        done_ok = cur < start if drop else cur == 1
        cycle = (cur == start) & ~done_ok
        out_of_budget = (steps >= max_steps) & ~done_ok & ~cycle

        finished = done_ok | cycle | out_of_budget
        if finished.any():
            retire(done_ok, 0)
            retire(cycle, 2)
            retire(out_of_budget, 1)
            keep = ~finished
            start, pos, cur, peak, steps = (
                a[keep] for a in (start, pos, cur, peak, steps)
            )

    i_steps = int(np.argmax(fin_steps))
    i_peak = int(np.argmax(fin_peak))
    return _ChunkResult(
        index=-1,
        checked=count,
        max_steps=int(fin_steps[i_steps]),
        max_steps_n=lo + i_steps,
        max_peak=int(fin_peak[i_peak]),
        max_peak_n=lo + i_peak,
        counterexamples=tuple(int(n) for n in np.flatnonzero(status == 2) + lo),
        unresolved=tuple(int(n) for n in np.flatnonzero(status == 1) + lo),
    )


def _run_chunk(spec: tuple[int, int, int, str, int, bool]) -> _ChunkResult:
    """Worker entry point: sweep one chunk and tag it with its index."""
    index, lo, hi, mode_value, max_steps, use_cache = spec
    mode = VerifyMode(mode_value)
    if hi <= _NP_RANGE_LIMIT:
        result = _sweep_chunk_numpy(lo, hi, mode, max_steps)
    else:
        result = _sweep_chunk_py(lo, hi, mode, max_steps, use_cache)
    return replace(result, index=index)


# --- checkpoint serialization ----------------------------------------------

def checkpoint_write(ck: Checkpoint, path: str) -> None:
    """Write the line-based checkpoint format atomically."""
    lines = [
        f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}",
        f"digest={ck.digest}",
        f"lo={ck.lo}",
        f"hi={ck.hi}",
        f"next={ck.next_unverified}",
        f"checked={ck.checked}",
        f"max_steps_n={ck.max_steps_n}",
        f"max_steps={ck.max_steps}",
        f"max_peak_n={ck.max_peak_n}",
        f"max_peak={ck.max_peak}",
    ]
    # Extension lines appear only when there is something to carry, so a
    # clean run's file is exactly the nine fixed fields above.
    if ck.counterexamples:
        lines.append("counterexamples=" + ",".join(map(str, ck.counterexamples)))
    if ck.unresolved:
        lines.append("unresolved=" + ",".join(map(str, ck.unresolved)))
    payload = "\n".join(lines) + "\n"
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(payload)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _parse_decimal(text: str, key: str) -> int:
    if not text or not all(c in "0123456789" for c in text):
        raise MalformedCheckpointError(f"field {key!r} is not a decimal: {text!r}")
    return int(text)


def _parse_int_list(text: str, key: str) -> tuple[int, ...]:
    if text == "":
        return ()
    return tuple(_parse_decimal(part, key) for part in text.split(","))


def checkpoint_read(path: str) -> Checkpoint:
    """Parse and validate a checkpoint file."""
    with open(path, "r", encoding="ascii") as fh:
        raw = fh.read()
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedCheckpointError("empty checkpoint file")

    header = lines[0].split(" ")
    if len(header) != 2 or header[0] != CHECKPOINT_MAGIC:
        raise MalformedCheckpointError(f"bad header line: {lines[0]!r}")
    if header[1] != str(CHECKPOINT_VERSION):
        raise CheckpointVersionError(f"unsupported checkpoint version {header[1]!r}")

    expected = [
        "digest", "lo", "hi", "next",
        "checked", "max_steps_n", "max_steps", "max_peak_n", "max_peak",
    ]
    if len(lines) - 1 < len(expected):
        raise MalformedCheckpointError("truncated checkpoint file")

    values: dict[str, str] = {}
    for want, line in zip(expected, lines[1:]):
        key, sep, val = line.partition("=")
        if not sep or key != want:
            raise MalformedCheckpointError(f"expected field {want!r}, got {line!r}")
        values[key] = val

    extras = {"counterexamples": (), "unresolved": ()}
    for line in lines[1 + len(expected):]:
        key, sep, val = line.partition("=")
        if not sep or key not in extras:
            raise MalformedCheckpointError(f"unexpected trailing line {line!r}")
        extras[key] = _parse_int_list(val, key)

    digest = values["digest"]
    if len(digest) != 16 or not all(c in "0123456789abcdef" for c in digest):
        raise MalformedCheckpointError(f"digest is not 16 lowercase hex: {digest!r}")

    return Checkpoint(
        digest=digest,
        lo=_parse_decimal(values["lo"], "lo"),
        hi=_parse_decimal(values["hi"], "hi"),
        next_unverified=_parse_decimal(values["next"], "next"),
        checked=_parse_decimal(values["checked"], "checked"),
        max_steps_n=_parse_decimal(values["max_steps_n"], "max_steps_n"),
        max_steps=_parse_decimal(values["max_steps"], "max_steps"),
        max_peak_n=_parse_decimal(values["max_peak_n"], "max_peak_n"),
        max_peak=_parse_decimal(values["max_peak"], "max_peak"),
        counterexamples=extras["counterexamples"],
        unresolved=extras["unresolved"],
    )


# --- range driver -----------------------------------------------------------

@dataclass
class _RunningStats:
    checked: int = 0
    max_steps: int = 0
    max_steps_n: int = 0
    max_peak: int = 0
    max_peak_n: int = 0
    counterexamples: list[int] = field(default_factory=list)
    unresolved: list[int] = field(default_factory=list)

    def fold(self, chunk: _ChunkResult) -> None:
        self.checked += chunk.checked
        if chunk.max_steps > self.max_steps:
            self.max_steps, self.max_steps_n = chunk.max_steps, chunk.max_steps_n
        if chunk.max_peak > self.max_peak:
            self.max_peak, self.max_peak_n = chunk.max_peak, chunk.max_peak_n
        self.counterexamples.extend(chunk.counterexamples)
        self.unresolved.extend(chunk.unresolved)


def _stats_from_checkpoint(ck: Checkpoint) -> _RunningStats:
    return _RunningStats(
        checked=ck.checked,
        max_steps=ck.max_steps,
        max_steps_n=ck.max_steps_n,
        max_peak=ck.max_peak,
        max_peak_n=ck.max_peak_n,
        counterexamples=list(ck.counterexamples),
        unresolved=list(ck.unresolved),
    )


def _checkpoint_from_stats(
    cfg: VerifyConfig, stats: _RunningStats, next_unverified: int
) -> Checkpoint:
    return Checkpoint(
        digest=cfg.digest(),
        lo=cfg.lo,
        hi=cfg.hi,
        next_unverified=next_unverified,
        checked=stats.checked,
        max_steps_n=stats.max_steps_n,
        max_steps=stats.max_steps,
        max_peak_n=stats.max_peak_n,
        max_peak=stats.max_peak,
        counterexamples=tuple(stats.counterexamples),
        unresolved=tuple(stats.unresolved),
    )


def _chunk_results(
    cfg: VerifyConfig, specs: list[tuple[int, int, int, str, int, bool]]
) -> Iterator[_ChunkResult]:
    if cfg.worker_count == 1 or len(specs) <= 1:
        for spec in specs:
            yield _run_chunk(spec)
        return
    # Windowed submission keeps at most ~2x workers in flight, so an early
    # stop never has to drain the whole remaining range; results still
    # come back strictly in chunk order.
    window = 2 * cfg.worker_count
    with ProcessPoolExecutor(max_workers=cfg.worker_count) as pool:
        it = iter(specs)
        pending = deque(pool.submit(_run_chunk, s) for s in itertools.islice(it, window))
        while pending:
            yield pending.popleft().result()
            for spec in itertools.islice(it, 1):
                pending.append(pool.submit(_run_chunk, spec))


def verify_range(
    cfg: VerifyConfig,
    stop_after_chunks: Optional[int] = None,
) -> VerificationReport:
    """Sweep [cfg.lo, cfg.hi], resuming from cfg.checkpoint_path if a
    checkpoint is already there.

    ``stop_after_chunks`` ends the run gracefully at a chunk boundary
    after that many chunks (a checkpoint is written if configured); the
    returned report then covers only the verified prefix.
    """
    chunks = cfg.chunks()
    stats = _RunningStats()
    first_chunk = 0

    if cfg.checkpoint_path and os.path.exists(cfg.checkpoint_path):
        ck = checkpoint_read(cfg.checkpoint_path)
        if ck.digest != cfg.digest():
            raise CheckpointConfigMismatch(
                f"checkpoint digest {ck.digest} does not match config {cfg.digest()}"
            )
        offset = ck.next_unverified - cfg.lo
        if ck.next_unverified <= cfg.hi and offset % cfg.chunk_size != 0:
            raise MalformedCheckpointError(
                f"next={ck.next_unverified} is not a chunk boundary"
            )
        stats = _stats_from_checkpoint(ck)
        first_chunk = offset // cfg.chunk_size

    t0 = time.perf_counter()
    specs = [
        (index, lo, hi, cfg.mode.value, cfg.max_steps, cfg.use_small_cache)
        for index, lo, hi in chunks[first_chunk:]
    ]

    next_unverified = chunks[first_chunk][1] if first_chunk < len(chunks) else cfg.hi + 1
    processed = 0
    for result in _chunk_results(cfg, specs):
        stats.fold(result)
        next_unverified = chunks[result.index][2] + 1
        processed += 1
        done = result.index == len(chunks) - 1
        if cfg.checkpoint_path and (done or processed % cfg.checkpoint_interval == 0):
            checkpoint_write(
                _checkpoint_from_stats(cfg, stats, next_unverified),
                cfg.checkpoint_path,
            )
        if stop_after_chunks is not None and processed >= stop_after_chunks:
            if cfg.checkpoint_path:
                checkpoint_write(
                    _checkpoint_from_stats(cfg, stats, next_unverified),
                    cfg.checkpoint_path,
                )
            break
    elapsed = time.perf_counter() - t0

    return VerificationReport(
        range_lo=cfg.lo,
        range_hi=cfg.hi,
        counterexamples=tuple(stats.counterexamples),
        unresolved=tuple(stats.unresolved),
        numbers_checked=stats.checked,
        max_steps_n=stats.max_steps_n,
        max_steps=stats.max_steps,
        max_peak_n=stats.max_peak_n,
        max_peak=stats.max_peak,
        elapsed_seconds=elapsed,
    )
