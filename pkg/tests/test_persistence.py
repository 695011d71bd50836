import json
import os

import pytest

from polariscope.core.errors import SpectrumIOError

from polariscope.core.persistence import (
    MANIFEST_FILE,
    OutputBundle,
    RunManifest,
    RunRecordModel,
    RunStorageService,
    json_text,
    sha256_text,
)


def staged_bundle():
    bundle = OutputBundle("simulate", "abc123", seed=7)
    bundle.add("reflectance.csv", "energy_ev,value\n2,0.5\n")
    bundle.add("report.json", json_text({"b": 1, "a": [1.5, 2]}))
    return bundle


def test_json_text_is_stable():
    assert json_text({"b": 1, "a": 2}) == json_text({"a": 2, "b": 1})
    assert json_text({}).endswith("\n")


def test_manifest_has_no_timestamps():
    manifest = RunManifest("simulate", "abc", 1, "1.0.0", {"numpy": "2"}, {"x.csv": "00"})
    document = json.loads(manifest.to_json())
    assert document == {
        "package": "polariscope",
        "package_version": "1.0.0",
        "subcommand": "simulate",
        "inputs_sha256": "abc",
        "seed": 1,
        "libraries": {"numpy": "2"},
        "outputs": {"x.csv": "00"},
    }
    assert manifest.to_json() == manifest.to_json()


def test_commit_writes_outputs_and_manifest(tmp_path):
    written = staged_bundle().commit(tmp_path, "1.0.0")
    assert sorted(p.name for p in written) == [MANIFEST_FILE, "reflectance.csv", "report.json"]
    manifest = json.loads((tmp_path / MANIFEST_FILE).read_text(encoding="utf-8"))
    text = (tmp_path / "reflectance.csv").read_text(encoding="utf-8")
    assert manifest["outputs"]["reflectance.csv"] == sha256_text(text)
    assert manifest["seed"] == 7
    assert not list(tmp_path.glob(".*.partial"))


def test_manifest_is_renamed_last(tmp_path, monkeypatch):
    order = []
    real_replace = os.replace

    def recording_replace(source, target):
        order.append(os.path.basename(target))
        real_replace(source, target)

    monkeypatch.setattr(os, "replace", recording_replace)
    written = staged_bundle().commit(tmp_path, "1.0.0")
    assert order == ["reflectance.csv", "report.json", MANIFEST_FILE]
    assert written[-1].name == MANIFEST_FILE


def test_failed_commit_leaves_nothing_behind(tmp_path, monkeypatch):
    real_replace = os.replace
    calls = []

    def failing_replace(source, target):
        calls.append(target)
        if len(calls) == 2:
            raise OSError("disk full")
        real_replace(source, target)

    monkeypatch.setattr(os, "replace", failing_replace)
    with pytest.raises(SpectrumIOError, match="disk full"):
        staged_bundle().commit(tmp_path, "1.0.0")
    assert list(tmp_path.iterdir()) == []


def test_identical_bundles_give_identical_files(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    staged_bundle().commit(first, "1.0.0")
    staged_bundle().commit(second, "1.0.0")
    for name in (MANIFEST_FILE, "reflectance.csv", "report.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_bundle_rejects_bad_names():
    bundle = OutputBundle("simulate", "abc", None)
    bundle.add("a.csv", "")
    with pytest.raises(ValueError):
        bundle.add("a.csv", "again")
    with pytest.raises(ValueError):
        bundle.add(MANIFEST_FILE, "{}")
    with pytest.raises(ValueError):
        bundle.add("sub/a.csv", "")


def test_uncommitted_bundle_writes_nothing(tmp_path):
    staged_bundle()
    assert list(tmp_path.iterdir()) == []


def test_run_registry_round_trip(tmp_path):
    storage = RunStorageService(tmp_path)
    assert RunStorageService(tmp_path) is storage

    record = RunRecordModel.from_invocation("sweep", "hash", 3, str(tmp_path))
    row_id = storage.save_run(record)
    record.mark_completed(["series.csv", "manifest.json"])
    assert storage.update_run(record)

    stored = storage.get_run(row_id)
    assert stored.status == "completed"
    assert stored.exit_code == 0
    assert stored.output_files == ["manifest.json", "series.csv"]
    assert storage.count_runs() == 1


def test_runs_are_listed_newest_first(tmp_path):
    storage = RunStorageService(tmp_path / "registry")
    first = RunRecordModel.from_invocation("simulate", "h1", 0, "out")
    storage.save_run(first)
    second = RunRecordModel.from_invocation("hopfield", "h2", 0, "out")
    storage.save_run(second)
    second.mark_failed("no strengths", 3)
    storage.update_run(second)

    runs = storage.list_runs()
    assert [r.subcommand for r in runs] == ["hopfield", "simulate"]
    assert runs[0].status == "failed"
    assert runs[0].exit_code == 3
    assert runs[0].error_message == "no strengths"


def test_run_id_depends_on_the_inputs():
    a = RunRecordModel.from_invocation("simulate", "h", 1, "out")
    b = RunRecordModel.from_invocation("simulate", "h", 2, "out")
    assert a.run_id != b.run_id
    assert len(a.run_id) == 16


def test_unsaved_record_cannot_be_updated(tmp_path):
    storage = RunStorageService(tmp_path)
    with pytest.raises(ValueError):
        storage.update_run(RunRecordModel.from_invocation("simulate", "h", 0, "out"))
