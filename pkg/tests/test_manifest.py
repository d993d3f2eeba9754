"""Manifest state machine, persistence, and locking."""

import json
import os

import pytest

from mattekit import ManifestLockError, StateTransitionError
from mattekit.config import PipelineConfig, config_from_dict, load_config, parse_key_color
from mattekit.connectivity import ScreeningStats
from mattekit.errors import ConfigError, ManifestError
from mattekit.manifest import DatasetManifest, ManifestLock, SampleRecord


def record(sample_id="s1", status="pending"):
    return SampleRecord(id=sample_id, status=status,
                        screening=ScreeningStats(0.1, 0.0, 0.0))


class TestStateMachine:
    @pytest.mark.parametrize("target", ["flagged", "accepted", "rejected"])
    def test_pending_transitions(self, target):
        r = record()
        r.transition(target, "auto")
        assert r.status == target

    def test_flagged_requires_human(self):
        r = record(status="flagged")
        with pytest.raises(StateTransitionError):
            r.transition("accepted", "auto")
        r.transition("accepted", "human")
        assert r.decided_by == "human"

    def test_accepted_to_refined(self):
        r = record(status="accepted")
        r.transition("refined", "auto")
        assert r.status == "refined"

    @pytest.mark.parametrize(
        "start,target",
        [("rejected", "accepted"), ("refined", "pending"),
         ("pending", "refined"), ("flagged", "refined")],
    )
    def test_illegal_transitions(self, start, target):
        with pytest.raises(StateTransitionError):
            record(status=start).transition(target, "human")

    def test_unknown_decider_rejected(self):
        with pytest.raises(StateTransitionError):
            record().transition("accepted", "robot")


class TestPersistence:
    def test_round_trip(self, tmp_path):
        m = DatasetManifest()
        m.add(record("a"))
        m.add(record("b", status="flagged"))
        m.attributes = {"template": "x"}
        m.config = PipelineConfig().to_dict()
        path = tmp_path / "manifest.json"
        m.save(path)
        loaded = DatasetManifest.load(path)
        assert loaded.version == 1
        assert sorted(loaded.samples) == ["a", "b"]
        assert loaded.samples["b"].status == "flagged"
        assert loaded.samples["a"].screening.semi_fraction == 0.1

    def test_version_monotone(self, tmp_path):
        m = DatasetManifest()
        path = tmp_path / "m.json"
        m.save(path)
        m.save(path)
        assert DatasetManifest.load(path).version == 2

    def test_duplicate_id_rejected(self):
        m = DatasetManifest()
        m.add(record("a"))
        with pytest.raises(ManifestError):
            m.add(record("a"))

    def test_atomic_write_leaves_no_temp(self, tmp_path):
        m = DatasetManifest()
        m.add(record("a"))
        path = tmp_path / "m.json"
        m.save(path)
        assert not list(tmp_path.glob("*.tmp"))
        json.loads(path.read_text())  # parseable

    def test_stable_key_order(self, tmp_path):
        m = DatasetManifest()
        m.add(record("a"))
        path = tmp_path / "m.json"
        m.save(path)
        first = path.read_text()
        DatasetManifest.load(path).save(path)
        second = path.read_text()
        assert first.replace('"version": 1', "") == second.replace('"version": 2', "")

    def test_missing_sample_lookup(self):
        with pytest.raises(ManifestError):
            DatasetManifest().get("ghost")

    def test_fixed_timestamp_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        r = record("a")
        assert r.created_at == "2023-11-14T22:13:20Z"


class TestLock:
    def test_exclusive(self, tmp_path):
        path = tmp_path / "m.json"
        with ManifestLock(path):
            with pytest.raises(ManifestLockError):
                ManifestLock(path).acquire()
        # released: can take it again
        with ManifestLock(path):
            pass

    def test_stale_lock_stolen(self, tmp_path):
        path = tmp_path / "m.json"
        lock_file = tmp_path / "m.json.lock"
        lock_file.write_text("999999999")  # no such pid
        with ManifestLock(path):
            assert lock_file.read_text() == str(os.getpid())


class TestConfig:
    def test_defaults(self):
        cfg = load_config(None)
        assert cfg.seed == 1234
        assert cfg.per_sample == 5
        assert cfg.key_color.g == 255

    def test_toml_round_trip(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text(
            "[random]\nseed = 7\n\n[screening]\nremoved_fraction = 0.5\n"
            "[chroma]\nkey_color = [1, 2, 3]\n[composite]\nper_sample = 2\n",
            encoding="utf-8",
        )
        cfg = load_config(path)
        assert cfg.seed == 7
        assert cfg.thresholds.removed_fraction == 0.5
        assert cfg.thresholds.semi_fraction == 0.25  # default retained
        assert (cfg.key_color.r, cfg.key_color.g, cfg.key_color.b) == (1, 2, 3)
        assert cfg.per_sample == 2

    def test_bad_toml_rejected(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text("not valid = = toml", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unknown_generator_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict({"random": {"generator": "mt19937"}})

    def test_key_color_parsing(self):
        k = parse_key_color("10, 20,30")
        assert (k.r, k.g, k.b) == (10, 20, 30)
        with pytest.raises(ConfigError):
            parse_key_color("1,2")
        with pytest.raises(ConfigError):
            parse_key_color("a,b,c")

    def test_snapshot_shape(self):
        snap = PipelineConfig().to_dict()
        assert snap["random"]["generator"] == "pcg64"
        assert snap["screening"]["semi_fraction"] == 0.25
