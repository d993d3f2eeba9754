"""Review service API: listing, images, decisions, persistence, locking."""

import json
import threading
import urllib.request
from urllib.error import HTTPError

import numpy as np
import pytest

from mattekit import AlphaMatte, RgbImage, save_alpha, save_rgb
from mattekit.connectivity import ScreeningStats
from mattekit.errors import ManifestLockError
from mattekit.manifest import DatasetManifest, ManifestLock, SampleRecord
from mattekit.matte import invert_alpha
from mattekit.image import save_inverse
from mattekit.server import make_server


@pytest.fixture
def workspace(tmp_path, rng):
    """A manifest with three flagged and one pending sample plus images."""
    manifest = DatasetManifest()
    for i in range(4):
        sample_id = f"s{i}"
        alpha = AlphaMatte(rng.integers(0, 256, size=(12, 12), dtype=np.uint8))
        rgb = RgbImage(rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8))
        save_alpha(alpha, tmp_path / f"{sample_id}_alpha.png")
        save_rgb(rgb, tmp_path / f"{sample_id}_rgb.png")
        save_inverse(invert_alpha(alpha), tmp_path / f"{sample_id}_inverse.png")
        rec = SampleRecord(
            id=sample_id,
            paths={
                "alpha": f"{sample_id}_alpha.png",
                "rgb": f"{sample_id}_rgb.png",
                "inverse": f"{sample_id}_inverse.png",
            },
            screening=ScreeningStats(0.1, 0.0, 0.0),
        )
        if i < 3:
            rec.transition("flagged", "auto")
        manifest.add(rec)
    path = tmp_path / "manifest.json"
    manifest.save(path)
    return path


@pytest.fixture
def live_server(workspace):
    server, lock = make_server(workspace, "127.0.0.1", 0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        yield base, workspace
    finally:
        server.shutdown()
        server.server_close()
        lock.release()
        thread.join(timeout=5)


def get_json(url):
    with urllib.request.urlopen(url) as resp:
        return json.loads(resp.read().decode("utf-8"))


def post_json(url, payload):
    req = urllib.request.Request(
        url,
        data=json.dumps(payload).encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode("utf-8"))


class TestApi:
    def test_sample_list_matches_manifest_scan(self, live_server):
        base, manifest_path = live_server
        listed = get_json(f"{base}/api/samples?status=flagged&offset=0&limit=50")
        manifest = DatasetManifest.load(manifest_path)
        expected = sorted(r.id for r in manifest.samples.values() if r.status == "flagged")
        assert [r["id"] for r in listed] == expected

    def test_pagination_matches_offsets(self, live_server):
        base, _ = live_server
        all_rows = get_json(f"{base}/api/samples?limit=100")
        page1 = get_json(f"{base}/api/samples?offset=0&limit=2")
        page2 = get_json(f"{base}/api/samples?offset=2&limit=2")
        assert [r["id"] for r in page1 + page2] == [r["id"] for r in all_rows]

    def test_image_bytes_are_exact_png(self, live_server, workspace):
        base, _ = live_server
        served = urllib.request.urlopen(
            f"{base}/api/samples/s0/image?kind=inverse"
        ).read()
        on_disk = (workspace.parent / "s0_inverse.png").read_bytes()
        assert served == on_disk

    def test_stats_counts(self, live_server):
        base, _ = live_server
        stats = get_json(f"{base}/api/stats")
        assert stats["counts"]["flagged"] == 3
        assert stats["counts"]["pending"] == 1
        assert stats["total"] == 4

    def test_accept_flagged_sample(self, live_server):
        base, manifest_path = live_server
        updated = post_json(f"{base}/api/samples/s0/decision", {"decision": "accept"})
        assert updated["status"] == "accepted"
        assert updated["decided_by"] == "human"
        # persisted before the response
        manifest = DatasetManifest.load(manifest_path)
        assert manifest.samples["s0"].status == "accepted"

    def test_reject_pending_sample(self, live_server):
        base, manifest_path = live_server
        post_json(f"{base}/api/samples/s3/decision", {"decision": "reject"})
        assert DatasetManifest.load(manifest_path).samples["s3"].status == "rejected"

    def test_unknown_sample_404(self, live_server):
        base, _ = live_server
        with pytest.raises(HTTPError) as err:
            post_json(f"{base}/api/samples/ghost/decision", {"decision": "accept"})
        assert err.value.code == 404
        assert "error" in json.loads(err.value.read().decode())

    def test_bad_decision_400(self, live_server):
        base, _ = live_server
        with pytest.raises(HTTPError) as err:
            post_json(f"{base}/api/samples/s1/decision", {"decision": "maybe"})
        assert err.value.code == 400

    def test_double_decision_conflict_409(self, live_server):
        base, _ = live_server
        post_json(f"{base}/api/samples/s1/decision", {"decision": "reject"})
        with pytest.raises(HTTPError) as err:
            post_json(f"{base}/api/samples/s1/decision", {"decision": "accept"})
        assert err.value.code == 409

    def test_unknown_image_kind_404(self, live_server):
        base, _ = live_server
        with pytest.raises(HTTPError) as err:
            urllib.request.urlopen(f"{base}/api/samples/s0/image?kind=bogus")
        assert err.value.code == 404

    def test_fallback_page_served(self, live_server):
        base, _ = live_server
        body = urllib.request.urlopen(f"{base}/").read().decode()
        assert "review" in body

    def test_static_ui_dir_served(self, workspace, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html>console shell</html>")
        (ui / "main.js").write_text("export {};")
        server, lock = make_server(workspace, "127.0.0.1", 0, ui_dir=ui)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{server.server_address[1]}"
        try:
            body = urllib.request.urlopen(f"{base}/").read().decode()
            assert body == "<html>console shell</html>"
            js = urllib.request.urlopen(f"{base}/main.js")
            assert js.headers["Content-Type"].startswith("text/javascript")
            with pytest.raises(HTTPError) as err:
                urllib.request.urlopen(f"{base}/../secrets")
            assert err.value.code == 404
        finally:
            server.shutdown()
            server.server_close()
            lock.release()
            thread.join(timeout=5)

    def test_lock_conflict_while_serving(self, live_server, workspace):
        with pytest.raises(ManifestLockError):
            ManifestLock(workspace).acquire()

    def test_decisions_survive_lookup_after_many_posts(self, live_server):
        base, manifest_path = live_server
        post_json(f"{base}/api/samples/s0/decision", {"decision": "accept"})
        post_json(f"{base}/api/samples/s1/decision", {"decision": "reject"})
        post_json(f"{base}/api/samples/s2/decision", {"decision": "accept"})
        manifest = DatasetManifest.load(manifest_path)
        assert manifest.samples["s0"].status == "accepted"
        assert manifest.samples["s1"].status == "rejected"
        assert manifest.samples["s2"].status == "accepted"
        assert manifest.version >= 4
