import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epilog.errors import InvalidMap, OutsideArena, UnknownAnchor
from epilog.space import (
    INSIDE,
    OUTSIDE,
    ArenaMap,
    Rect,
    SemanticLocation,
    default_map,
    describe_location,
    load_map,
    relative_position,
    render_map_marker,
    resolve_pose,
    svg_map_marker,
)


def test_default_map_round_trips_through_json(arena):
    assert ArenaMap.from_json(arena.to_json()) == arena


def test_resolve_room_only(arena):
    assert resolve_pose(arena, 3.0, 3.5) == SemanticLocation(INSIDE, "kitchen")


def test_resolve_furniture_within_inflation(arena):
    assert resolve_pose(arena, 1.3, 0.6) == SemanticLocation(INSIDE, "kitchen", "fridge")
    assert resolve_pose(arena, 1.6, 0.6) == SemanticLocation(INSIDE, "kitchen")


def test_resolve_outside_and_named_area(arena):
    assert resolve_pose(arena, -1.0, 4.0) == SemanticLocation(OUTSIDE)
    assert resolve_pose(arena, 11.0, 2.0) == SemanticLocation(INSIDE, "bar")


def test_furniture_only_counts_in_its_own_room(arena):
    # just across the wall from the desk (bedroom), still within its inflated box
    loc = resolve_pose(arena, 4.3, 3.9)
    assert loc.room == "kitchen" and loc.furniture is None


@settings(max_examples=300)
@given(st.floats(-3, 15, allow_nan=False), st.floats(-3, 11, allow_nan=False))
def test_resolution_is_total_and_coordinate_free(x, y):
    arena = default_map()
    loc = resolve_pose(arena, x, y)
    text = loc.text
    assert text and not any(ch.isdigit() for ch in text)
    if loc.furniture is not None:
        assert arena.region(loc.furniture).room == loc.room


def test_location_phrasing():
    assert describe_location(SemanticLocation(INSIDE, "kitchen")) == "kitchen"
    assert describe_location(SemanticLocation(INSIDE, "kitchen", "fridge")) == "kitchen, at the fridge"
    assert (describe_location(SemanticLocation(INSIDE, "kitchen", None, ("left_of", "fridge")))
            == "kitchen, at the left of the fridge")
    assert describe_location(SemanticLocation(OUTSIDE)) == "outside the arena"
    assert describe_location(SemanticLocation(INSIDE)) == "inside the arena"
    assert SemanticLocation(INSIDE, "living_room", "coffee_table").text == "living room, at the coffee table"


def test_location_validation():
    with pytest.raises(ValueError):
        SemanticLocation("somewhere")
    with pytest.raises(ValueError):
        SemanticLocation(INSIDE, None, "fridge")
    with pytest.raises(ValueError):
        SemanticLocation(INSIDE, "kitchen", None, ("behind", "fridge"))


def test_location_json_round_trip():
    loc = SemanticLocation(INSIDE, "kitchen", None, ("under", "table"))
    assert SemanticLocation.from_json(json.loads(json.dumps(loc.to_json()))) == loc


def test_relative_positions(arena):
    table = arena.region("table").rect  # [2.5, 1.5, 3.5, 2.5]
    assert relative_position(arena, Rect(2.9, 2.6, 3.1, 2.8), "table") == "over"
    assert relative_position(arena, Rect(2.9, 1.2, 3.1, 1.4), "table") == "under"
    assert relative_position(arena, Rect(2.0, 1.9, 2.2, 2.1), "table") == "left_of"
    assert relative_position(arena, Rect(3.8, 1.9, 4.0, 2.1), "table") == "right_of"
    cx, cy = table.centroid
    assert relative_position(arena, Rect(cx - 0.1, cy - 0.1, cx + 0.1, cy + 0.1), "table") == "near"
    with pytest.raises(UnknownAnchor):
        relative_position(arena, table, "piano")


def test_map_validation():
    room = {"name": "kitchen", "rect": [0, 0, 4, 4]}
    with pytest.raises(InvalidMap):
        ArenaMap.from_json({"bounds": [0, 0, 10, 10], "rooms": [room, dict(room)]})
    with pytest.raises(InvalidMap):
        ArenaMap.from_json({"bounds": [0, 0, 10, 10], "rooms": [room],
                            "furniture": [{"name": "bed", "room": "bedroom", "rect": [1, 1, 2, 2]}]})
    with pytest.raises(InvalidMap):
        ArenaMap.from_json({"bounds": [0, 0, 10, 10], "rooms": [room],
                            "furniture": [{"name": "bed", "room": "kitchen", "rect": [6, 6, 7, 7]}]})
    with pytest.raises(InvalidMap):
        ArenaMap.from_json({"bounds": [0, 0, 10, 10], "rooms": [{"name": "Kitchen Area", "rect": [0, 0, 1, 1]}]})


def test_load_map_rejects_bad_json(tmp_path):
    bad = tmp_path / "map.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidMap):
        load_map(bad)


def test_svg_is_deterministic_and_highlights_the_room(arena, tmp_path):
    loc = SemanticLocation(INSIDE, "kitchen", "fridge")
    svg = svg_map_marker(arena, loc)
    assert svg == svg_map_marker(arena, loc)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") == 1
    out = render_map_marker(arena, loc, tmp_path / "m.svg")
    assert out.read_text() == svg
    assert svg != svg_map_marker(arena, SemanticLocation(INSIDE, "bedroom"))


def test_svg_refuses_outside(arena):
    with pytest.raises(OutsideArena):
        svg_map_marker(arena, SemanticLocation(OUTSIDE))
