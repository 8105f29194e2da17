"""Session hub: lifecycle, ordering, content addressing, long-poll, persistence."""

import re
import threading
import time

import pytest

from conftest import make_document
from tilecast.errors import (
    SequenceError,
    ServerFullError,
    SessionEndedError,
    SessionUnknownError,
    TileIntegrityError,
    WireValidationError,
)
from tilecast.protocol import (
    PNG,
    CursorState,
    TileRecord,
    encode_tile,
    tile_rect,
)
from tilecast.publisher import SentSet, capture_tick
from tilecast.server.hub import SessionHub
from tilecast.textindex import TextRun


def make_update_and_tiles(doc, seq, ts=None, sy=0):
    from tilecast.protocol import ViewportState

    viewport = ViewportState(512, 512, 0, sy, doc.width, doc.height)
    return capture_tick(doc, viewport, CursorState(), SentSet(), seq, ts if ts is not None else (seq - 1) * 250)


@pytest.fixture
def hub():
    h = SessionHub(storage_root=None)
    yield h
    h.close()


@pytest.fixture
def doc():
    return make_document(width=700, height=900, seed=11)


class TestCreateSession:
    def test_id_format_and_uniqueness(self, hub):
        ids = {hub.create_session() for _ in range(20)}
        assert len(ids) == 20
        for sid in ids:
            assert re.fullmatch(r"[a-z0-9]{8}", sid)

    def test_new_session_has_no_state(self, hub):
        sid = hub.create_session()
        assert hub.get_state(sid, since=0, wait_ms=0) is None

    def test_max_sessions(self):
        h = SessionHub(storage_root=None, max_sessions=2)
        h.create_session()
        h.create_session()
        with pytest.raises(ServerFullError):
            h.create_session()


class TestIngest:
    def test_first_update_missing_lists_all(self, hub, doc):
        sid = hub.create_session()
        update, _ = make_update_and_tiles(doc, 1)
        missing = hub.ingest_update(sid, update)
        assert sorted(missing) == sorted(set(update.tile_map.values()))
        assert len(missing) == len(update.tile_map)

    def test_heartbeat_on_uploaded_session_missing_empty(self, hub, doc):
        sid = hub.create_session()
        update, records = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        for r in records:
            hub.put_tile(sid, r)
        # only viewport tiles uploaded; upload the rest too
        tile_map = doc.tile_signatures()
        for pos, sig in tile_map.items():
            rect = tile_rect(doc.width, doc.height, pos)
            pixels = doc.raster.crop(rect.x, rect.y, rect.width, rect.height)
            hub.put_tile(sid, encode_tile(pixels, rect.width, rect.height, PNG,
                                          url=doc.url, pos=pos))
        update2, _ = make_update_and_tiles(doc, 2)
        assert hub.ingest_update(sid, update2) == []

    def test_seq_gap_rejected_and_recording_unchanged(self, hub, doc):
        sid = hub.create_session()
        update1, _ = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update1)
        update3, _ = make_update_and_tiles(doc, 3)
        with pytest.raises(SequenceError) as exc_info:
            hub.ingest_update(sid, update3)
        assert exc_info.value.expected == 2
        assert len(hub.get_recording(sid).updates) == 1

    def test_unknown_session(self, hub, doc):
        update, _ = make_update_and_tiles(doc, 1)
        with pytest.raises(SessionUnknownError):
            hub.ingest_update("zzzzzzzz", update)

    def test_ingest_after_end_conflicts(self, hub, doc):
        sid = hub.create_session()
        update, _ = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        hub.end_session(sid)
        update2, _ = make_update_and_tiles(doc, 2)
        with pytest.raises(SessionEndedError):
            hub.ingest_update(sid, update2)

    def test_recording_seqs_are_linear(self, hub, doc):
        sid = hub.create_session()
        for seq in range(1, 8):
            update, _ = make_update_and_tiles(doc, seq)
            hub.ingest_update(sid, update)
        recording = hub.get_recording(sid)
        assert [u.seq for _, u in recording.updates] == list(range(1, 8))


class TestTiles:
    def test_round_trip(self, hub, doc):
        sid = hub.create_session()
        update, records = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        hub.put_tile(sid, records[0])
        got = hub.get_tile(sid, records[0].signature)
        assert got.data == records[0].data

    def test_duplicate_upload_is_silent_noop(self, hub, doc):
        sid = hub.create_session()
        update, records = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        hub.put_tile(sid, records[0])
        hub.put_tile(sid, records[0])  # no error
        assert hub.get_tile(sid, records[0].signature).data == records[0].data

    def test_same_signature_different_bytes_rejected(self, hub, doc):
        sid = hub.create_session()
        update, records = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        hub.put_tile(sid, records[0])
        forged = TileRecord(
            signature=records[0].signature, width=records[0].width,
            height=records[0].height, codec="png", data=records[0].data + b"x",
        )
        with pytest.raises(TileIntegrityError):
            hub.put_tile(sid, forged)

    def test_cross_session_visibility(self, hub, doc):
        sid_a = hub.create_session()
        sid_b = hub.create_session()
        update, records = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid_a, update)
        hub.put_tile(sid_a, records[0])
        with pytest.raises(SessionUnknownError):
            hub.get_tile(sid_b, records[0].signature)

    def test_verify_signatures_rejects_forged_identity(self, doc):
        h = SessionHub(storage_root=None, verify_signatures=True)
        sid = h.create_session()
        update, records = make_update_and_tiles(doc, 1)
        h.ingest_update(sid, update)
        real = records[0]
        other = records[1]
        forged = TileRecord(signature=real.signature, width=other.width,
                            height=other.height, codec=other.codec, data=other.data)
        with pytest.raises(TileIntegrityError):
            h.put_tile(sid, forged)
        h.put_tile(sid, real)  # honest upload passes


class TestGetState:
    def test_latest_wins(self, hub, doc):
        sid = hub.create_session()
        for seq in range(1, 8):
            update, _ = make_update_and_tiles(doc, seq)
            hub.ingest_update(sid, update)
        got = hub.get_state(sid, since=0)
        assert got.seq == 7

    def test_polling_miss_returns_none(self, hub, doc):
        sid = hub.create_session()
        update, _ = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        assert hub.get_state(sid, since=1, wait_ms=0) is None

    def test_never_returns_seq_at_or_below_since(self, hub, doc):
        sid = hub.create_session()
        for seq in range(1, 5):
            update, _ = make_update_and_tiles(doc, seq)
            hub.ingest_update(sid, update)
        for since in range(0, 4):
            got = hub.get_state(sid, since=since)
            assert got is not None and got.seq > since

    def test_long_poll_woken_by_ingest(self, hub, doc):
        sid = hub.create_session()
        update, _ = make_update_and_tiles(doc, 1)
        result = {}

        def poller():
            start = time.monotonic()
            result["update"] = hub.get_state(sid, since=0, wait_ms=5000)
            result["elapsed"] = time.monotonic() - start

        thread = threading.Thread(target=poller)
        thread.start()
        time.sleep(0.2)
        hub.ingest_update(sid, update)
        thread.join(timeout=5)
        assert result["update"].seq == 1
        assert 0.15 <= result["elapsed"] < 1.0

    def test_long_poll_timeout(self, hub, doc):
        sid = hub.create_session()
        start = time.monotonic()
        assert hub.get_state(sid, since=0, wait_ms=150) is None
        assert time.monotonic() - start >= 0.14

    def test_wait_capped_by_config(self, doc):
        h = SessionHub(storage_root=None, long_poll_cap_ms=100)
        sid = h.create_session()
        start = time.monotonic()
        assert h.get_state(sid, since=0, wait_ms=60000) is None
        assert time.monotonic() - start < 1.0

    def test_ended_session_raises(self, hub, doc):
        sid = hub.create_session()
        update, _ = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        hub.end_session(sid)
        with pytest.raises(SessionEndedError):
            hub.get_state(sid, since=0)

    def test_long_poll_woken_by_end(self, hub, doc):
        sid = hub.create_session()
        errors = []

        def poller():
            try:
                hub.get_state(sid, since=0, wait_ms=10000)
            except SessionEndedError:
                errors.append("ended")

        thread = threading.Thread(target=poller)
        thread.start()
        time.sleep(0.1)
        hub.end_session(sid)
        thread.join(timeout=5)
        assert errors == ["ended"]


class TestEndAndRecording:
    def seeded(self, hub, doc, n=3):
        sid = hub.create_session()
        for seq in range(1, n + 1):
            update, records = make_update_and_tiles(doc, seq, ts=(seq - 1) * 250)
            hub.ingest_update(sid, update)
            for r in records:
                hub.put_tile(sid, r)
        return sid

    def test_end_summary_and_double_end(self, hub, doc):
        sid = self.seeded(hub, doc)
        summary = hub.end_session(sid)
        assert summary["updates"] == 3
        assert summary["duration_ms"] == 500
        with pytest.raises(SessionEndedError):
            hub.end_session(sid)

    def test_floor_semantics(self, hub, doc):
        sid = self.seeded(hub, doc)  # updates at 0, 250, 500
        assert hub.recording_state(sid, 300).timestamp_ms == 250
        assert hub.recording_state(sid, 250).timestamp_ms == 250
        assert hub.recording_state(sid, 0).timestamp_ms == 0

    def test_clamp_beyond_duration(self, hub, doc):
        sid = self.seeded(hub, doc)
        assert hub.recording_state(sid, 10**9).timestamp_ms == 500

    def test_not_ready_before_first(self, hub, doc):
        sid = self.seeded(hub, doc)
        assert hub.recording_state(sid, -1) is None

    def test_recording_readable_while_live(self, hub, doc):
        sid = self.seeded(hub, doc)
        assert len(hub.get_recording(sid).updates) == 3
        assert hub.recording_manifest(sid)["status"] == "live"
        hub.end_session(sid)
        assert hub.recording_manifest(sid)["status"] == "ended"
        assert len(hub.get_recording(sid).updates) == 3

    def test_tiles_survive_end(self, hub, doc):
        sid = self.seeded(hub, doc)
        sig = next(iter(doc.tile_signatures().values()))
        before = hub.get_tile(sid, sig).data
        hub.end_session(sid)
        assert hub.get_tile(sid, sig).data == before


class TestPersistence:
    def test_restart_serves_recordings_not_live(self, tmp_path, doc):
        h1 = SessionHub(storage_root=tmp_path)
        ended = h1.create_session()
        live = h1.create_session()
        for seq in (1, 2):
            update, records = make_update_and_tiles(doc, seq)
            h1.ingest_update(ended, update)
            for r in records:
                h1.put_tile(ended, r)
        update, _ = make_update_and_tiles(doc, 1)
        h1.ingest_update(live, update)
        h1.index_text(ended, 1, [TextRun(text="persisted token", x=1, y=2, w=30, h=10,
                                         url=doc.url, seq=1)])
        h1.end_session(ended)
        h1.close()

        h2 = SessionHub(storage_root=tmp_path)
        # recorded session is fully served
        assert h2.recording_manifest(ended)["updates"] == 2
        assert h2.recording_state(ended, 250).seq == 2
        sig = next(iter(doc.tile_signatures().values()))
        assert h2.get_tile(ended, sig).data
        hits = h2.search("persisted")
        assert len(hits) == 1 and hits[0].session == ended
        with pytest.raises(SessionEndedError):
            h2.get_state(ended, since=0)
        # the dead live session is gone entirely
        with pytest.raises(SessionUnknownError):
            h2.get_state(live, since=0)

    def test_recording_files_exist(self, tmp_path, doc):
        h = SessionHub(storage_root=tmp_path)
        sid = h.create_session()
        update, records = make_update_and_tiles(doc, 1)
        h.ingest_update(sid, update)
        for r in records:
            h.put_tile(sid, r)
        h.end_session(sid)
        root = tmp_path / sid
        assert (root / "meta.json").exists()
        assert (root / "updates.jsonl").exists()
        assert (root / "tokens.jsonl").exists()
        assert len(list((root / "tiles").iterdir())) == len(records)


class TestText:
    def test_index_requires_known_seq(self, hub, doc):
        sid = hub.create_session()
        run = TextRun(text="hello", x=0, y=0, w=10, h=10, url=doc.url, seq=5)
        with pytest.raises(WireValidationError):
            hub.index_text(sid, 5, [run])
        update, _ = make_update_and_tiles(doc, 1)
        hub.ingest_update(sid, update)
        run1 = TextRun(text="hello", x=0, y=0, w=10, h=10, url=doc.url, seq=1)
        assert hub.index_text(sid, 1, [run1]) == 1
        hits = hub.search("hello")
        assert hits and hits[0].timestamp_ms == 0
