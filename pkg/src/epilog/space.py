"""Arena maps and coordinate-free location descriptions.

Poses are metric ``(x, y)`` points in the map frame (y grows "up" on the
rendered map).  Nothing that leaves this module as text carries
coordinates; positions are always phrased as rooms, furniture and relative
predicates.
"""

from __future__ import annotations

import html
import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from epilog.errors import InvalidMap, OutsideArena, UnknownAnchor

INSIDE = "inside_arena"
OUTSIDE = "outside_arena"
PREDICATES = ("left_of", "right_of", "over", "under", "near")

_PREDICATE_TEXT = {
    "left_of": "at the left of",
    "right_of": "at the right of",
    "over": "over",
    "under": "under",
    "near": "near",
}
_SLUG = re.compile(r"^[a-z][a-z0-9_]*$")


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError(f"degenerate rectangle {self}")

    @classmethod
    def of(cls, seq) -> "Rect":
        x0, y0, x1, y1 = (float(v) for v in seq)
        return cls(x0, y0, x1, y1)

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def intersects(self, other: "Rect") -> bool:
        return (self.x0 <= other.x1 and other.x0 <= self.x1
                and self.y0 <= other.y1 and other.y0 <= self.y1)

    def inflate(self, d: float) -> "Rect":
        return Rect(self.x0 - d, self.y0 - d, self.x1 + d, self.y1 + d)

    def distance(self, x: float, y: float) -> float:
        dx = max(self.x0 - x, 0.0, x - self.x1)
        dy = max(self.y0 - y, 0.0, y - self.y1)
        return math.hypot(dx, dy)

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    @property
    def centroid(self) -> tuple[float, float]:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def as_list(self) -> list[float]:
        return [self.x0, self.y0, self.x1, self.y1]


@dataclass(frozen=True)
class Region:
    name: str
    rect: Rect
    room: Optional[str] = None  # furniture only


@dataclass(frozen=True)
class ArenaMap:
    bounds: Rect
    rooms: tuple[Region, ...] = ()
    furniture: tuple[Region, ...] = ()
    named_areas: tuple[Region, ...] = ()
    furniture_inflation: float = 0.5
    near_threshold: float = 1.0

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for region in (*self.rooms, *self.furniture, *self.named_areas):
            if not _SLUG.match(region.name):
                raise InvalidMap(f"region name {region.name!r} is not a lowercase slug")
            if region.name in seen:
                raise InvalidMap(f"duplicate region name {region.name!r}")
            seen.add(region.name)
        rooms = {r.name: r for r in self.rooms}
        for item in self.furniture:
            room = rooms.get(item.room)
            if room is None:
                raise InvalidMap(f"furniture {item.name!r} refers to unknown room {item.room!r}")
            if not item.rect.intersects(room.rect):
                raise InvalidMap(f"furniture {item.name!r} lies outside room {item.room!r}")

    def room(self, name: str) -> Optional[Region]:
        return next((r for r in (*self.rooms, *self.named_areas) if r.name == name), None)

    def region(self, name: str) -> Optional[Region]:
        return next((r for r in (*self.furniture, *self.rooms, *self.named_areas) if r.name == name), None)

    def to_json(self) -> dict:
        return {
            "bounds": self.bounds.as_list(),
            "rooms": [{"name": r.name, "rect": r.rect.as_list()} for r in self.rooms],
            "furniture": [{"name": f.name, "room": f.room, "rect": f.rect.as_list()} for f in self.furniture],
            "named_areas": [{"name": a.name, "rect": a.rect.as_list()} for a in self.named_areas],
            "furniture_inflation": self.furniture_inflation,
            "near_threshold": self.near_threshold,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ArenaMap":
        try:
            return cls(
                bounds=Rect.of(doc["bounds"]),
                rooms=tuple(Region(r["name"], Rect.of(r["rect"])) for r in doc.get("rooms", [])),
                furniture=tuple(Region(f["name"], Rect.of(f["rect"]), f["room"]) for f in doc.get("furniture", [])),
                named_areas=tuple(Region(a["name"], Rect.of(a["rect"])) for a in doc.get("named_areas", [])),
                furniture_inflation=float(doc.get("furniture_inflation", 0.5)),
                near_threshold=float(doc.get("near_threshold", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidMap(f"malformed map document: {exc}") from exc


@dataclass(frozen=True)
class SemanticLocation:
    scope: str = INSIDE
    room: Optional[str] = None
    furniture: Optional[str] = None
    relation: Optional[tuple[str, str]] = None

    def __post_init__(self) -> None:
        if self.scope not in (INSIDE, OUTSIDE):
            raise ValueError(f"unknown scope {self.scope!r}")
        if self.furniture is not None and self.room is None:
            raise ValueError("furniture requires a room")
        if self.scope == OUTSIDE and (self.room or self.relation):
            raise ValueError("outside_arena locations carry no room or relation")
        if self.relation is not None:
            predicate, anchor = self.relation
            if predicate not in PREDICATES:
                raise ValueError(f"unknown predicate {predicate!r}")
            object.__setattr__(self, "relation", (predicate, anchor))

    @property
    def text(self) -> str:
        return describe_location(self)

    def mentions(self, name: str) -> bool:
        return name in (self.room, self.furniture) or (self.relation is not None and self.relation[1] == name)

    def to_json(self) -> dict:
        doc: dict = {"scope": self.scope}
        if self.room is not None:
            doc["room"] = self.room
        if self.furniture is not None:
            doc["furniture"] = self.furniture
        if self.relation is not None:
            doc["relation"] = list(self.relation)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SemanticLocation":
        relation = doc.get("relation")
        return cls(doc["scope"], doc.get("room"), doc.get("furniture"),
                   tuple(relation) if relation is not None else None)


def _words(slug: str) -> str:
    return slug.replace("_", " ")


def describe_location(loc: SemanticLocation) -> str:
    """Phrase a location: "kitchen", "kitchen, at the fridge", "outside the arena"."""
    if loc.scope == OUTSIDE:
        return "outside the arena"
    base = _words(loc.room) if loc.room else "inside the arena"
    if loc.relation is not None:
        predicate, anchor = loc.relation
        return f"{base}, {_PREDICATE_TEXT[predicate]} the {_words(anchor)}"
    if loc.furniture is not None:
        return f"{base}, at the {_words(loc.furniture)}"
    return base


# --- loading --------------------------------------------------------------

def load_map(path: Union[str, Path]) -> ArenaMap:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidMap(f"{path}: {exc}") from exc
    return ArenaMap.from_json(doc)


def default_map() -> ArenaMap:
    """The packaged four-room apartment used by the harness."""
    text = resources.files("epilog.data").joinpath("default_arena.json").read_text(encoding="utf-8")
    return ArenaMap.from_json(json.loads(text))


# --- resolution -------------------------------------------------------------

def _smallest(regions, x: float, y: float) -> Optional[Region]:
    best = None
    for region in regions:
        if region.rect.contains(x, y) and (best is None or region.rect.area < best.rect.area):
            best = region
    return best


def resolve_pose(arena: ArenaMap, x: float, y: float) -> SemanticLocation:
    if not arena.bounds.contains(x, y):
        return SemanticLocation(OUTSIDE)
    room = _smallest(arena.rooms, x, y)
    if room is None:
        area = _smallest(arena.named_areas, x, y)
        return SemanticLocation(INSIDE, area.name if area else None)
    nearest, nearest_d = None, math.inf
    for item in arena.furniture:
        if item.room != room.name or not item.rect.inflate(arena.furniture_inflation).contains(x, y):
            continue
        d = item.rect.distance(x, y)
        if d < nearest_d:
            nearest, nearest_d = item, d
    return SemanticLocation(INSIDE, room.name, nearest.name if nearest else None)


def relative_position(arena: ArenaMap, subject: Rect, anchor: str) -> str:
    """Predicate relating ``subject`` to the named anchor region.

    Stacking (x-ranges overlap, y-ranges disjoint) gives over/under; otherwise
    the centroid x comparison gives left_of/right_of.  Horizontally aligned
    centroids fall back to near (within the near threshold) or to over/under
    by centroid height.
    """
    region = arena.region(anchor)
    if region is None:
        raise UnknownAnchor(anchor)
    a = region.rect
    x_overlap = subject.x0 < a.x1 and a.x0 < subject.x1
    if x_overlap and subject.y0 >= a.y1:
        return "over"
    if x_overlap and subject.y1 <= a.y0:
        return "under"
    (sx, sy), (ax, ay) = subject.centroid, a.centroid
    if sx < ax:
        return "left_of"
    if sx > ax:
        return "right_of"
    if math.hypot(sx - ax, sy - ay) < arena.near_threshold or sy == ay:
        return "near"
    return "over" if sy > ay else "under"


# --- rendering --------------------------------------------------------------

_SCALE = 40.0
_MARGIN = 20.0
_PALETTE = {
    "background": "#ffffff",
    "room": "#f4f4f4",
    "highlight": "#ffcc66",
    "area": "#e8f0fe",
    "furniture": "#c8c8c8",
    "stroke": "#444444",
    "marker": "#d62728",
}


def svg_map_marker(arena: ArenaMap, loc: SemanticLocation) -> str:
    """Deterministic SVG text for a map with ``loc`` highlighted."""
    if loc.scope == OUTSIDE:
        raise OutsideArena(describe_location(loc))
    b = arena.bounds
    width = (b.x1 - b.x0) * _SCALE + 2 * _MARGIN
    height = (b.y1 - b.y0) * _SCALE + 2 * _MARGIN

    def px(x: float) -> float:
        return _MARGIN + (x - b.x0) * _SCALE

    def py(y: float) -> float:
        return _MARGIN + (b.y1 - y) * _SCALE

    def rect(r: Rect, fill: str, extra: str = "") -> str:
        return (f'<rect x="{px(r.x0):.1f}" y="{py(r.y1):.1f}" width="{(r.x1 - r.x0) * _SCALE:.1f}" '
                f'height="{(r.y1 - r.y0) * _SCALE:.1f}" fill="{fill}" stroke="{_PALETTE["stroke"]}"{extra}/>')

    def label(r: Rect, name: str, size: int) -> str:
        cx, cy = r.centroid
        return (f'<text x="{px(cx):.1f}" y="{py(cy):.1f}" font-size="{size}" text-anchor="middle" '
                f'font-family="sans-serif">{html.escape(_words(name))}</text>')

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="{_PALETTE["background"]}"/>',
        rect(b, "none", ' stroke-width="2"'),
    ]
    for room in arena.rooms:
        fill = _PALETTE["highlight"] if room.name == loc.room else _PALETTE["room"]
        lines.append(rect(room.rect, fill))
        lines.append(label(room.rect, room.name, 14))
    for area in arena.named_areas:
        fill = _PALETTE["highlight"] if area.name == loc.room else _PALETTE["area"]
        lines.append(rect(area.rect, fill, ' stroke-dasharray="4 3"'))
        lines.append(label(area.rect, area.name, 12))
    for item in arena.furniture:
        lines.append(rect(item.rect, _PALETTE["furniture"]))
        lines.append(label(item.rect, item.name, 9))

    target = None
    for name in (loc.furniture, loc.relation[1] if loc.relation else None, loc.room):
        if name is not None and arena.region(name) is not None:
            target = arena.region(name).rect
            break
    if target is None:
        target = b
    mx, my = target.centroid
    lines.append(f'<circle cx="{px(mx):.1f}" cy="{py(my):.1f}" r="7" fill="{_PALETTE["marker"]}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_map_marker(arena: ArenaMap, loc: SemanticLocation, out_path: Union[str, Path]) -> Path:
    out = Path(out_path)
    out.write_text(svg_map_marker(arena, loc), encoding="utf-8")
    return out
