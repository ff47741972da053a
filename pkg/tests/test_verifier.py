import os

import pytest

from collatz_lab.verifier import (
    Checkpoint,
    CheckpointConfigMismatch,
    CheckpointVersionError,
    MalformedCheckpointError,
    VerificationReport,
    VerifyConfig,
    VerifyMode,
    _sweep_chunk_numpy,
    _sweep_chunk_py,
    checkpoint_read,
    checkpoint_write,
    verify_одно,
    verify_range,
)

DROP = VerifyMode.DROP_BELOW_START
FULL = VerifyMode.FULL_TO_ONE


def brute_verify(n, mode, max_steps):
    """Independent single-number oracle."""
    cur, steps, peak = n, 0, n
    while steps < max_steps:
        cur = cur // 2 if cur % 2 == 0 else 3 * cur + 1
        steps += 1
        peak = max(peak, cur)
        if (mode is DROP and cur < n) or (mode is FULL and cur == 1):
            return True, steps, peak
    return False, steps, peak


def test_verify_one_examples():
    assert verify_one(2) == (True, 1, 2)
    assert verify_one(2, FULL) == (True, 1, 2)
    assert verify_one(17, FULL) == (True, 12, 52)
    # frozen from the straight-line oracle
    assert verify_one(27, FULL) == (True, 111, 9232)
    assert verify_one(27, DROP) == (True, 96, 9232)


def test_verify_one_matches_oracle():
    for n in range(2, 400):
        for mode in (DROP, FULL):
            assert verify_one(n, mode) == brute_verify(n, mode, 10**5)


def test_verify_one_budget_exhaustion():
    converged, steps, peak = verify_one(27, FULL, max_steps=10)
    assert (converged, steps) == (False, 10)
    assert peak == 214  # max of 27,82,41,124,62,31,94,47,142,71,214


def test_verify_one_validation():
    with pytest.raises(ValueError):
        verify_one(1)
    with pytest.raises(ValueError):
        verify_one(5, max_steps=0)


def test_small_cache_gives_identical_results():
    plain = [verify_one(n, FULL, use_small_cache=False) for n in range(2, 3000)]
    cached = [verify_one(n, FULL, use_small_cache=True) for n in range(2, 3000)]
    assert plain == cached


@pytest.mark.parametrize("mode", [DROP, FULL])
@pytest.mark.parametrize("max_steps", [5, 10**5])
def test_chunk_kernels_agree(mode, max_steps):
    py = _sweep_chunk_py(2, 5000, mode, max_steps, False)
    np_ = _sweep_chunk_numpy(2, 5000, mode, max_steps)
    assert py == np_


@pytest.mark.parametrize("mode", [DROP, FULL])
def test_chunk_kernels_agree_near_int64_escalation(mode):
    # starts just above 2^61: first odd step exceeds the int64 safety
    # limit, forcing mid-flight promotion to exact arithmetic
    lo = 2**61 + 1
    py = _sweep_chunk_py(lo, lo + 64, mode, 2000, False)
    np_ = _sweep_chunk_numpy(lo, lo + 64, mode, 2000)
    assert py == np_
    assert py.max_peak > 2**62  # promotion territory actually reached


def test_python_kernel_handles_beyond_int64():
    lo = 2**70 + 1
    result = _sweep_chunk_py(lo, lo + 8, DROP, 10**4, False)
    assert result.checked == 9
    assert not result.counterexamples and not result.unresolved
    assert result.max_peak > 2**70


def test_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(lo=1, hi=10)
    with pytest.raises(ValueError):
        VerifyConfig(lo=10, hi=2)
    with pytest.raises(ValueError):
        VerifyConfig(lo=2, hi=10, chunk_size=0)
    with pytest.raises(ValueError):
        VerifyConfig(lo=2, hi=10, worker_count=0)
    with pytest.raises(ValueError):
        VerifyConfig(lo=2, hi=10, max_steps=0)


def test_config_digest_semantics():
    base = VerifyConfig(lo=2, hi=10**6)
    assert len(base.digest()) == 16
    assert all(c in "0123456789abcdef" for c in base.digest())
    # run-shaping fields change the digest
    assert base.digest() != VerifyConfig(lo=2, hi=10**6 + 1).digest()
    assert base.digest() != VerifyConfig(lo=2, hi=10**6, mode=FULL).digest()
    assert base.digest() != VerifyConfig(lo=2, hi=10**6, chunk_size=512).digest()
    # execution knobs do not
    assert base.digest() == VerifyConfig(lo=2, hi=10**6, worker_count=8).digest()
    assert base.digest() == VerifyConfig(lo=2, hi=10**6, use_small_cache=True).digest()


def test_chunk_partition_covers_range():
    cfg = VerifyConfig(lo=2, hi=1000, chunk_size=64)
    chunks = cfg.chunks()
    assert chunks[0][1] == 2 and chunks[-1][2] == 1000
    assert [c[0] for c in chunks] == list(range(len(chunks)))
    for (_, lo_a, hi_a), (_, lo_b, _) in zip(chunks, chunks[1:]):
        assert lo_b == hi_a + 1
    assert sum(hi - lo + 1 for _, lo, hi in chunks) == 999


def test_verify_range_single_number():
    report = verify_range(VerifyConfig(lo=2, hi=2))
    assert report.numbers_checked == 1
    assert report.counterexamples == ()
    assert report.unresolved == ()
    assert (report.max_steps_n, report.max_steps) == (2, 1)
    assert (report.max_peak_n, report.max_peak) == (2, 2)


def test_report_stats_match_brute_force():
    report = verify_range(VerifyConfig(lo=2, hi=500, chunk_size=37, mode=FULL))
    best_steps = best_steps_n = best_peak = best_peak_n = 0
    for n in range(2, 501):
        _, steps, peak = brute_verify(n, FULL, 10**5)
        if steps > best_steps:
            best_steps, best_steps_n = steps, n
        if peak > best_peak:
            best_peak, best_peak_n = peak, n
    assert (report.max_steps_n, report.max_steps) == (best_steps_n, best_steps)
    assert (report.max_peak_n, report.max_peak) == (best_peak_n, best_peak)
    assert report.numbers_checked == 499


def test_cross_mode_equivalence():
    drop = verify_range(VerifyConfig(lo=2, hi=10**4, chunk_size=2**10, mode=DROP))
    full = verify_range(VerifyConfig(lo=2, hi=10**4, chunk_size=2**10, mode=FULL))
    assert drop.counterexamples == full.counterexamples == ()
    assert drop.unresolved == full.unresolved == ()
    assert drop.numbers_checked == full.numbers_checked


def test_unresolved_distinct_from_counterexamples():
    report = verify_range(VerifyConfig(lo=2, hi=100, chunk_size=16, mode=FULL, max_steps=3))
    expected = tuple(
        n for n in range(2, 101) if not brute_verify(n, FULL, 3)[0]
    )
    assert report.unresolved == expected
    assert report.counterexamples == ()
    assert len(expected) > 0


def test_determinism_across_workers_and_chunking():
    reports = [
        verify_range(VerifyConfig(lo=2, hi=60000, chunk_size=2**13, worker_count=w))
        for w in (1, 2, 3)
    ]
    assert reports[0].canonical() == reports[1].canonical() == reports[2].canonical()
    rechunked = verify_range(VerifyConfig(lo=2, hi=60000, chunk_size=999))
    assert rechunked.canonical() == reports[0].canonical()


def test_report_text_and_json_fields():
    report = verify_range(VerifyConfig(lo=2, hi=50))
    text = report.to_text()
    keys = [line.split("=", 1)[0] for line in text.strip().split("\n")]
    assert keys == [
        "range_lo", "range_hi", "counterexamples", "unresolved",
        "numbers_checked", "max_steps_n", "max_steps", "max_peak_n",
        "max_peak", "elapsed_seconds",
    ]
    doc = report.to_json_dict()
    assert list(doc.keys()) == keys
    assert report.canonical() == text[: text.rindex("elapsed_seconds")]


# --- checkpoints -------------------------------------------------------------


def sample_checkpoint(**overrides):
    fields = dict(
        digest="abcdef0123456789",
        lo=2,
        hi=1000,
        next_unverified=514,
        checked=512,
        max_steps_n=27,
        max_steps=96,
        max_peak_n=27,
        max_peak=9232,
    )
    fields.update(overrides)
    return Checkpoint(**fields)


def test_checkpoint_round_trip(tmp_path):
    path = str(tmp_path / "run.ckpt")
    for ck in (
        sample_checkpoint(),
        sample_checkpoint(counterexamples=(101, 202), unresolved=(303,)),
    ):
        checkpoint_write(ck, path)
        assert checkpoint_read(path) == ck


def test_checkpoint_exact_bytes(tmp_path):
    path = str(tmp_path / "run.ckpt")
    checkpoint_write(sample_checkpoint(), path)
    with open(path, "rb") as fh:
        raw = fh.read()
    assert raw == (
        b"COLLATZ-CKPT 1\n"
        b"digest=abcdef0123456789\n"
        b"lo=2\n"
        b"hi=1000\n"
        b"next=514\n"
        b"checked=512\n"
        b"max_steps_n=27\n"
        b"max_steps=96\n"
        b"max_peak_n=27\n"
        b"max_peak=9232\n"
    )


def test_checkpoint_truncated_file(tmp_path):
    path = str(tmp_path / "run.ckpt")
    checkpoint_write(sample_checkpoint(), path)
    with open(path) as fh:
        content = fh.read()
    with open(path, "w") as fh:
        fh.write("".join(content.splitlines(True)[:5]))
    with pytest.raises(MalformedCheckpointError):
        checkpoint_read(path)


@pytest.mark.parametrize(
    "mutate,error",
    [
        (lambda s: s.replace("COLLATZ-CKPT 1", "COLLATZ-CKPT 2"), CheckpointVersionError),
        (lambda s: s.replace("COLLATZ-CKPT 1", "SOMETHING ELSE"), MalformedCheckpointError),
        (lambda s: s.replace("next=514", "next=fourteen"), MalformedCheckpointError),
        (lambda s: s.replace("next=514", "later=514"), MalformedCheckpointError),
        (lambda s: s.replace("digest=abcdef0123456789", "digest=ABCDEF0123456789"),
         MalformedCheckpointError),
        (lambda s: s + "garbage=1\n", MalformedCheckpointError),
        (lambda s: "", MalformedCheckpointError),
    ],
)
def test_checkpoint_malformations(tmp_path, mutate, error):
    path = str(tmp_path / "run.ckpt")
    checkpoint_write(sample_checkpoint(), path)
    with open(path) as fh:
        content = fh.read()
    with open(path, "w") as fh:
        fh.write(mutate(content))
    with pytest.raises(error):
        checkpoint_read(path)


def test_resume_with_wrong_config_is_hard_error(tmp_path):
    path = str(tmp_path / "run.ckpt")
    cfg = VerifyConfig(lo=2, hi=2000, chunk_size=256, checkpoint_path=path)
    verify_range(cfg, stop_after_chunks=2)
    assert os.path.exists(path)
    other = VerifyConfig(lo=2, hi=4000, chunk_size=256, checkpoint_path=path)
    with pytest.raises(CheckpointConfigMismatch):
        verify_range(other)


def test_resume_rejects_unaligned_boundary(tmp_path):
    path = str(tmp_path / "run.ckpt")
    cfg = VerifyConfig(lo=2, hi=2000, chunk_size=256, checkpoint_path=path)
    verify_range(cfg, stop_after_chunks=2)
    ck = checkpoint_read(path)
    checkpoint_write(
        Checkpoint(**{**ck.__dict__, "next_unverified": ck.next_unverified + 1}), path
    )
    with pytest.raises(MalformedCheckpointError):
        verify_range(cfg)


def test_resume_equivalence_after_every_chunk(tmp_path):
    cfg_plain = VerifyConfig(lo=2, hi=513, chunk_size=64)
    uninterrupted = verify_range(cfg_plain).canonical()
    n_chunks = len(cfg_plain.chunks())
    assert n_chunks == 8
    for k in range(1, n_chunks + 1):
        path = str(tmp_path / f"resume-{k}.ckpt")
        cfg = VerifyConfig(
            lo=2, hi=513, chunk_size=64, checkpoint_path=path, checkpoint_interval=1
        )
        partial = verify_range(cfg, stop_after_chunks=k)
        assert partial.numbers_checked == min(64 * k, 512)
        resumed = verify_range(cfg)
        assert resumed.canonical() == uninterrupted


def test_resume_preserves_unresolved_lists(tmp_path):
    # nonempty carry-over exercises the checkpoint extension lines
    path = str(tmp_path / "run.ckpt")
    kwargs = dict(lo=2, hi=200, chunk_size=32, mode=FULL, max_steps=3)
    uninterrupted = verify_range(VerifyConfig(**kwargs))
    assert uninterrupted.unresolved
    cfg = VerifyConfig(**kwargs, checkpoint_path=path)
    verify_range(cfg, stop_after_chunks=3)
    assert "unresolved=" in open(path).read()
    resumed = verify_range(cfg)
    assert resumed.canonical() == uninterrupted.canonical()


def test_resume_after_completion_is_identity(tmp_path):
    path = str(tmp_path / "run.ckpt")
    cfg = VerifyConfig(lo=2, hi=1000, chunk_size=128, checkpoint_path=path)
    first = verify_range(cfg)
    again = verify_range(cfg)
    assert first.canonical() == again.canonical()
    assert checkpoint_read(path).next_unverified == 1001


def test_checkpoint_invariant_fields(tmp_path):
    path = str(tmp_path / "run.ckpt")
    cfg = VerifyConfig(
        lo=2, hi=4096, chunk_size=512, checkpoint_path=path, checkpoint_interval=2
    )
    verify_range(cfg, stop_after_chunks=3)
    ck = checkpoint_read(path)
    assert ck.digest == cfg.digest()
    assert ck.lo == 2 and ck.hi == 4096
    assert ck.next_unverified == 2 + 3 * 512
    assert ck.checked == 3 * 512
