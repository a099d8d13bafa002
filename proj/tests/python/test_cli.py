"""End-to-end CLI tests driven through subprocess."""

import json
import os
import subprocess
import sys

import pytest

CLI = os.environ.get("SUBALIGN_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="SUBALIGN_CLI not set")


def run(*args, check=True):
    proc = subprocess.run(
        [CLI, *map(str, args)], capture_output=True, text=True
    )
    if check and proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise AssertionError(f"command failed: {args} -> {proc.returncode}")
    return proc


@pytest.fixture(scope="module")
def episode(tmp_path_factory):
    out = tmp_path_factory.mktemp("episode")
    run("synth", "-o", out, "--seed", 21)
    return out


def test_synth_outputs_parse(episode):
    manifest = json.loads((episode / "manifest.json").read_text())
    for key in ("subtitles", "gold", "probs", "segments", "text_embeddings", "sign_embeddings"):
        assert (episode / manifest[key]).exists()


def test_synth_is_byte_deterministic(tmp_path, episode):
    again = tmp_path / "again"
    run("synth", "-o", again, "--seed", 21)
    for name in ("manifest.json", "gold.srt", "prior.srt", "segments.txt", "probs.txt",
                 "text.emb", "sign.emb"):
        assert (again / name).read_bytes() == (episode / name).read_bytes()


def test_invalid_synth_spec_writes_nothing(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"n_sentences": 0}')
    out = tmp_path / "bad"
    proc = run("synth", "--spec", spec, "-o", out, check=False)
    assert proc.returncode == 1
    assert "error" in proc.stderr
    assert not out.exists()


def test_decode_matches_segments_file(episode, tmp_path):
    decoded = tmp_path / "decoded.txt"
    run("decode", "--probs", episode / "probs.txt", "-o", decoded,
        "--b-threshold", 50, "--o-threshold", 50)
    got = [line.split()[:2] for line in decoded.read_text().splitlines()]
    want = [line.split()[:2] for line in (episode / "segments.txt").read_text().splitlines()]
    assert got == want  # same timings; the synthetic gloss labels are absent


def test_align_eval_round_trip(episode, tmp_path):
    aligned = tmp_path / "aligned.srt"
    diag = tmp_path / "diag.jsonl"
    run("align", "--manifest", episode / "manifest.json", "--variant", "sea",
        "--pre-offsets", "2.7,2.7", "-o", aligned, "--diagnostics", diag)
    report = tmp_path / "report.json"
    run("eval", "--pred", aligned, "--gold", episode / "gold.srt",
        "--thresholds", "0.25,0.5,0.75", "--fps", 25, "-o", report)
    doc = json.loads(report.read_text())
    agg = doc["aggregate"]["f1"]
    assert agg["0.5"] == 1.0
    assert agg["0.25"] >= agg["0.5"] >= agg["0.75"]

    lines = [json.loads(line) for line in diag.read_text().splitlines()]
    assert lines[0]["type"] == "summary"
    assert len(lines) == 1 + doc["aggregate"]["n_cues"]


def test_align_is_idempotent(episode, tmp_path):
    a = tmp_path / "a.srt"
    b = tmp_path / "b.srt"
    for out in (a, b):
        run("align", "--manifest", episode / "manifest.json", "--variant", "segment-align",
            "--pre-offsets", "2.7,2.7", "-o", out)
    assert a.read_bytes() == b.read_bytes()


def absolutize(manifest, episode):
    for key in ("subtitles", "gold", "probs", "segments", "text_embeddings",
                "sign_embeddings"):
        if key in manifest:
            manifest[key] = str(episode / manifest[key])
    return manifest


def test_sea_without_embeddings_fails_without_output(episode, tmp_path):
    manifest = absolutize(json.loads((episode / "manifest.json").read_text()), episode)
    manifest.pop("text_embeddings")
    stripped = tmp_path / "stripped.json"
    stripped.write_text(json.dumps(manifest))
    out = tmp_path / "never.srt"
    proc = run("align", "--manifest", stripped, "--variant", "sea", "-o", out, check=False)
    assert proc.returncode == 1
    assert not out.exists()
    err = json.loads(proc.stderr)
    assert err["error"]["kind"] == "validation"


def test_segment_align_runs_without_embeddings(episode, tmp_path):
    manifest = absolutize(json.loads((episode / "manifest.json").read_text()), episode)
    manifest.pop("text_embeddings")
    manifest.pop("sign_embeddings")
    stripped = tmp_path / "stripped.json"
    stripped.write_text(json.dumps(manifest))
    out = tmp_path / "timing.srt"
    run("align", "--manifest", stripped, "--variant", "segment-align",
        "--pre-offsets", "2.7,2.7", "-o", out)
    assert out.exists()


def test_infeasible_exit_code(tmp_path):
    subs = tmp_path / "two.srt"
    subs.write_text(
        "1\n00:00:00,000 --> 00:00:01,000\na\n\n2\n00:00:02,000 --> 00:00:03,000\nb\n\n"
    )
    segments = tmp_path / "one.txt"
    segments.write_text("0.0 1.0\n")
    proc = run("align", "--subs", subs, "--segments", segments, "-o", tmp_path / "x.srt",
               check=False)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"]["kind"] == "infeasible"


def test_missing_input_exit_code(tmp_path):
    proc = run("decode", "--probs", tmp_path / "nope.txt", "-o", tmp_path / "out.txt",
               check=False)
    assert proc.returncode == 3
    assert json.loads(proc.stderr)["error"]["kind"] == "io"


def test_eval_vtt_and_offsets(episode, tmp_path):
    gold_vtt = tmp_path / "gold.vtt"
    run("align", "--manifest", episode / "manifest.json", "--variant", "segment-align",
        "--pre-offsets", "2.7,2.7", "-o", gold_vtt, "--format", "vtt")
    assert gold_vtt.read_text().startswith("WEBVTT")

    proc = run("eval", "--pred", episode / "prior.srt", "--gold", episode / "gold.srt",
               "--estimate-offsets", "median")
    doc = json.loads(proc.stdout)
    est = doc["episodes"][0]["estimated_offsets"]
    assert 2.4 <= est["start"] <= 3.0


def test_probs_and_predecoded_segments_agree(episode, tmp_path):
    decoded = tmp_path / "decoded.txt"
    run("decode", "--probs", episode / "probs.txt", "-o", decoded,
        "--b-threshold", 50, "--o-threshold", 50)
    via_probs = tmp_path / "via-probs.srt"
    via_segments = tmp_path / "via-segments.srt"
    run("align", "--subs", episode / "prior.srt", "--probs", episode / "probs.txt",
        "--b-threshold", 50, "--o-threshold", 50, "--pre-offsets", "2.7,2.7",
        "-o", via_probs)
    run("align", "--subs", episode / "prior.srt", "--segments", decoded,
        "--pre-offsets", "2.7,2.7", "-o", via_segments)
    assert via_probs.read_bytes() == via_segments.read_bytes()


def test_align_with_bundled_preset(episode, tmp_path):
    configs = os.environ.get("SUBALIGN_CONFIGS")
    if not configs:
        pytest.skip("SUBALIGN_CONFIGS not set")
    out = tmp_path / "preset.srt"
    diag = tmp_path / "preset-diag.jsonl"
    run("align", "--manifest", episode / "manifest.json", "--variant", "sea",
        "--config", os.path.join(configs, "bobsl.json"), "-o", out, "--diagnostics", diag)
    # The preset's 1 s post end offset is visible in the rewritten timings.
    lines = [json.loads(line) for line in diag.read_text().splitlines()][1:]
    segments = [line.split() for line in (episode / "segments.txt").read_text().splitlines()]
    for rec in lines:
        assert rec["new_end"] == pytest.approx(float(segments[rec["refined"][1]][1]) + 1.0)


def test_search_determinism_and_resume(episode, tmp_path):
    space = tmp_path / "space.json"
    space.write_text(json.dumps({
        "params": {
            "pre_start_offset": {"type": "real", "low": 0.0, "high": 4.0},
            "pre_end_offset": {"type": "real", "low": 0.0, "high": 4.0},
            "b_threshold": {"type": "grid", "values": [30, 50, 70]},
            "window_size": {"type": "int", "low": 10, "high": 60},
        }
    }))
    dataset = tmp_path / "dataset"
    dataset.mkdir()
    manifest = absolutize(json.loads((episode / "manifest.json").read_text()), episode)
    (dataset / "ep0.json").write_text(json.dumps(manifest))

    def search(workers, tag):
        log = tmp_path / f"trials-{tag}.jsonl"
        best = tmp_path / f"best-{tag}.json"
        run("search", "--dataset", dataset, "--space", space, "--iterations", 12,
            "--seed", 9, "--workers", workers, "-o", best, "--log", log)
        return log.read_bytes(), json.loads(best.read_text())

    log1, best1 = search(1, "a")
    log2, best2 = search(1, "b")
    log8, best8 = search(8, "c")
    assert log1 == log2 == log8
    assert best1 == best2 == best8

    # Resume: truncate the log and rerun; bytes must come back identical.
    partial = b"".join(log1.splitlines(keepends=True)[:5])
    resumed_log = tmp_path / "trials-resumed.jsonl"
    resumed_log.write_bytes(partial)
    run("search", "--dataset", dataset, "--space", space, "--iterations", 12,
        "--seed", 9, "--workers", 2, "-o", tmp_path / "best-resumed.json",
        "--log", resumed_log)
    assert resumed_log.read_bytes() == log1
    assert json.loads((tmp_path / "best-resumed.json").read_text()) == best1
