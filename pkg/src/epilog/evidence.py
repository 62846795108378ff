"""Referee evidence for answers: assembly, report files, and coherence checking.

A bundle carries the fields a referee needs to verify an answer: the context
chain, the start date-time, per-group emotion intensities, the location name
with a highlighted map, media recorded in the cited episodes, and subtitles
plus the narration.  Coherence means every bundle field can be reproduced from
the cited episodes and the answer itself can be re-derived from them alone.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from epilog.errors import EmptyProvenance, EpilogError, UnknownEpisode
from epilog.model import EmotionGroup, Entity, MediaRef, Utterance, item_media
from epilog.query.engine import Answer, eval_query
from epilog.query.narrate import narrate
from epilog.query.parser import parse_query
from epilog.space import INSIDE, ArenaMap, svg_map_marker
from epilog.store import Store, canonical_json, media_to_json

MAP_FILE = "map.svg"
BUNDLE_FILE = "bundle.json"

_DAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_MONTHS = ("January", "February", "March", "April", "May", "June", "July",
           "August", "September", "October", "November", "December")


def format_datetime(t: int) -> str:
    """``"Wed, July 17, 2019 15:40:15"`` (UTC)."""
    d = dt.datetime.fromtimestamp(t / 1000.0, tz=dt.timezone.utc)
    return f"{_DAYS[d.weekday()]}, {_MONTHS[d.month - 1]} {d.day}, {d.year} {d:%H:%M:%S}"


@dataclass
class EvidenceBundle:
    context_line: str
    datetime_line: str
    emotion_series: dict[str, int]
    location_name: str
    map_svg_path: Optional[str]
    media: list[MediaRef]
    text_lines: list[str]
    supporting_ids: list[int]
    map_svg: Optional[str] = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "context": self.context_line,
            "datetime": self.datetime_line,
            "emotions": dict(self.emotion_series),
            "location": self.location_name,
            "map_svg": self.map_svg_path,
            "media": [media_to_json(m) for m in self.media],
            "text": list(self.text_lines),
            "supporting_ids": list(self.supporting_ids),
        }


def context_chain(store: Store, episode_id: int) -> str:
    labels = []
    current: Optional[int] = episode_id
    while current is not None:
        ep = store.episode(current)
        labels.append(ep.label)
        current = ep.parent
    return " / ".join(reversed(labels))


def _support_media(store: Store, ids: list[int]) -> list[MediaRef]:
    out: list[MediaRef] = []
    for i in ids:
        for item in store.episodes[i].what:
            for media in item_media(item):
                plain = MediaRef(media.path, media.kind)
                if plain not in out:
                    out.append(plain)
    return out


def _text_lines(store: Store, ids: list[int], primary: int, now: int) -> list[str]:
    lines = []
    for i in ids:
        for item in store.episodes[i].what:
            if isinstance(item, Utterance):
                lines.append(f"{item.speaker}: {item.text}")
    lines.append(narrate(store, primary, now))
    return lines


def assemble(store: Store, answer: Answer, arena: ArenaMap) -> EvidenceBundle:
    if not answer.supporting_ids:
        raise EmptyProvenance(f"answer to {answer.query!r} cites no episode")
    ids = list(answer.supporting_ids)
    for i in ids:
        store.episode(i)
    primary = store.episodes[ids[0]]
    location = primary.where[0] if primary.where else None
    svg = svg_map_marker(arena, location) if location is not None and location.scope == INSIDE else None
    return EvidenceBundle(
        context_line=context_chain(store, primary.id),
        datetime_line=format_datetime(primary.when.start),
        emotion_series={g.value: primary.emotions.get(g, 0) for g in EmotionGroup},
        location_name=location.text if location is not None else "",
        map_svg_path=MAP_FILE if svg is not None else None,
        media=_support_media(store, ids),
        text_lines=_text_lines(store, ids, primary.id, answer.now),
        supporting_ids=ids,
        map_svg=svg,
    )


def write_report(bundle: EvidenceBundle, out_dir: Union[str, Path]) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / BUNDLE_FILE]
    written[0].write_text(canonical_json(bundle.to_json()), encoding="utf-8")
    if bundle.map_svg is not None and bundle.map_svg_path is not None:
        svg_path = out / bundle.map_svg_path
        svg_path.write_text(bundle.map_svg, encoding="utf-8")
        written.append(svg_path)
    return written


# --- coherence -----------------------------------------------------------------------


@dataclass(frozen=True)
class Coherence:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def sub_store(store: Store, ids: list[int]) -> Store:
    """The store restricted to ``ids`` and the entity state those episodes recorded."""
    keep = set(ids)
    sub = Store(next_id=store.next_id)
    sub.episodes = {i: store.episodes[i] for i in ids if i in store.episodes}
    sub.roots = [r for r in store.roots if r in keep]
    for entity in store.entities.values():
        sub.entities[entity.id] = Entity(entity.id, entity.cls, dict(entity.static_fields),
                                         [e for e in entity.state_history if e.source in keep])
    return sub


def check_coherence(answer: Answer, bundle: EvidenceBundle, store: Store,
                    arena: Optional[ArenaMap] = None) -> Coherence:
    reasons: list[str] = []
    if not bundle.supporting_ids:
        return Coherence(False, ("EmptyProvenance",))
    if list(bundle.supporting_ids) != list(answer.supporting_ids):
        reasons.append("ProvenanceMismatch")
    missing = [i for i in bundle.supporting_ids if i not in store.episodes]
    if missing:
        return Coherence(False, tuple(reasons + ["UnknownSupport"]))

    ids = list(bundle.supporting_ids)
    primary = store.episodes[ids[0]]
    if bundle.context_line != context_chain(store, primary.id):
        reasons.append("ContextMismatch")
    if bundle.datetime_line != format_datetime(primary.when.start):
        reasons.append("DateTimeMismatch")
    location = primary.where[0] if primary.where else None
    if bundle.location_name != (location.text if location is not None else ""):
        reasons.append("LocationMismatch")
    if bundle.emotion_series != {g.value: primary.emotions.get(g, 0) for g in EmotionGroup}:
        reasons.append("EmotionMismatch")
    if list(bundle.media) != _support_media(store, ids):
        reasons.append("MediaMismatch")
    try:
        if list(bundle.text_lines) != _text_lines(store, ids, primary.id, answer.now):
            reasons.append("TextMismatch")
    except EpilogError:
        reasons.append("TextMismatch")
    if arena is not None and location is not None and location.scope == INSIDE:
        if bundle.map_svg is not None and bundle.map_svg != svg_map_marker(arena, location):
            reasons.append("MapMismatch")

    try:
        rederived = eval_query(parse_query(answer.query), sub_store(store, ids), answer.now, answer.params)
        if rederived.payload != answer.payload:
            reasons.append("UnderivableAnswer")
    except (EpilogError, UnknownEpisode):
        reasons.append("UnderivableAnswer")
    return Coherence(not reasons, tuple(reasons))
