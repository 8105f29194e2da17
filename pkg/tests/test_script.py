"""Session script parsing, ordering invariants, and bounds validation."""

import pytest

from conftest import make_document, solid_raster
from tilecast.errors import ScriptError
from tilecast.protocol import CursorShape
from tilecast.script import (
    EndEvent,
    NavigateEvent,
    event_to_json,
    parse_script,
    validate_script,
)

GOOD = """
{"t_ms":0,"ev":"navigate","doc":"a"}
{"t_ms":1000,"ev":"scroll","x":0,"y":256}
{"t_ms":1200,"ev":"cursor","x":10,"y":300,"shape":"pointer"}
{"t_ms":5000,"ev":"end"}
"""


class TestParse:
    def test_good_script(self):
        script = parse_script(GOOD)
        assert script.duration_ms == 5000
        assert script.navigate_count() == 1
        assert isinstance(script.events[0], NavigateEvent)
        assert isinstance(script.events[-1], EndEvent)
        assert script.events[2].shape is CursorShape.POINTER

    def test_unknown_cursor_shape_coerced(self):
        script = parse_script(
            '{"t_ms":0,"ev":"navigate","doc":"a"}\n'
            '{"t_ms":1,"ev":"cursor","x":0,"y":0,"shape":"lightning"}\n'
            '{"t_ms":2,"ev":"end"}'
        )
        assert script.events[1].shape is CursorShape.DEFAULT

    def test_first_event_must_be_navigate_at_zero(self):
        with pytest.raises(ScriptError, match="navigate"):
            parse_script('{"t_ms":0,"ev":"scroll","x":0,"y":0}\n{"t_ms":1,"ev":"end"}')
        with pytest.raises(ScriptError, match="navigate"):
            parse_script('{"t_ms":5,"ev":"navigate","doc":"a"}\n{"t_ms":9,"ev":"end"}')

    def test_last_event_must_be_end(self):
        with pytest.raises(ScriptError, match="end"):
            parse_script('{"t_ms":0,"ev":"navigate","doc":"a"}')

    def test_times_non_decreasing(self):
        with pytest.raises(ScriptError, match="non-decreasing"):
            parse_script(
                '{"t_ms":0,"ev":"navigate","doc":"a"}\n'
                '{"t_ms":500,"ev":"scroll","x":0,"y":0}\n'
                '{"t_ms":400,"ev":"scroll","x":0,"y":0}\n'
                '{"t_ms":600,"ev":"end"}'
            )

    def test_unknown_event_kind(self):
        with pytest.raises(ScriptError, match="unknown event"):
            parse_script('{"t_ms":0,"ev":"navigate","doc":"a"}\n{"t_ms":1,"ev":"warp"}\n{"t_ms":2,"ev":"end"}')

    def test_invalid_json_line(self):
        with pytest.raises(ScriptError, match="line 2"):
            parse_script('{"t_ms":0,"ev":"navigate","doc":"a"}\nnot json\n{"t_ms":2,"ev":"end"}')

    def test_empty_script(self):
        with pytest.raises(ScriptError, match="no events"):
            parse_script("\n\n")

    def test_round_trip_through_json(self):
        script = parse_script(GOOD)
        text = "\n".join(event_to_json(e) for e in script.events)
        assert parse_script(text) == script


class TestValidate:
    def docs(self):
        return {"a": make_document(width=1024, height=2048)}

    def test_valid(self):
        validate_script(parse_script(GOOD), self.docs(), 1024, 768)

    def test_unknown_document(self):
        script = parse_script('{"t_ms":0,"ev":"navigate","doc":"zzz"}\n{"t_ms":1,"ev":"end"}')
        with pytest.raises(ScriptError, match="unknown document"):
            validate_script(script, self.docs(), 1024, 768)

    def test_scroll_out_of_bounds(self):
        script = parse_script(
            '{"t_ms":0,"ev":"navigate","doc":"a"}\n'
            '{"t_ms":1,"ev":"scroll","x":0,"y":9999}\n'
            '{"t_ms":2,"ev":"end"}'
        )
        with pytest.raises(ScriptError, match="scroll"):
            validate_script(script, self.docs(), 1024, 768)

    def test_scroll_bounds_depend_on_viewport(self):
        script = parse_script(
            '{"t_ms":0,"ev":"navigate","doc":"a"}\n'
            '{"t_ms":1,"ev":"scroll","x":0,"y":1280}\n'
            '{"t_ms":2,"ev":"end"}'
        )
        validate_script(script, self.docs(), 1024, 768)  # max_y = 2048-768 = 1280
        with pytest.raises(ScriptError):
            validate_script(script, self.docs(), 1024, 800)

    def test_mutate_bounds(self, tmp_path):
        solid_raster(64, 64).to_image().save(tmp_path / "patch.png")
        script = parse_script(
            '{"t_ms":0,"ev":"navigate","doc":"a"}\n'
            '{"t_ms":1,"ev":"mutate","x":1000,"y":2030,"patch":"patch.png"}\n'
            '{"t_ms":2,"ev":"end"}',
            patch_dir=tmp_path,
        )
        with pytest.raises(ScriptError, match="mutate"):
            validate_script(script, self.docs(), 1024, 768)

    def test_missing_patch_file(self, tmp_path):
        with pytest.raises(ScriptError, match="patch not found"):
            parse_script(
                '{"t_ms":0,"ev":"navigate","doc":"a"}\n'
                '{"t_ms":1,"ev":"mutate","x":0,"y":0,"patch":"nope.png"}\n'
                '{"t_ms":2,"ev":"end"}',
                patch_dir=tmp_path,
            )
