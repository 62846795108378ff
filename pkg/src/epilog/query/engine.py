"""Query evaluation over a consolidated store.

Evaluation goes through a :class:`StoreIndex` that is rebuilt lazily whenever
the store's revision changes.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Optional

from epilog.errors import OpenEpisode, UnknownEntity, UnknownEpisode
from epilog.model import (
    ActionRecord,
    EmotionGroup,
    EmotionTag,
    EntityObservation,
    Episode,
    Kind,
    StateEntry,
    Timestamp,
    Utterance,
    emotion_phrase,
    interval_overlaps,
    TimeInterval,
)
from epilog.query.ast import (
    Condition,
    Conditions,
    Describe,
    During,
    EmotionAtLeast,
    EntityIs,
    Feeling,
    FindEpisodes,
    KindIs,
    LabelHas,
    Last,
    LocationIs,
    Query,
    StateOf,
    When,
    WhereIs,
    to_dsl,
)
from epilog.query.narrate import narrate
from epilog.relevance import RelevanceParams, rank
from epilog.store import Store


@dataclass
class Answer:
    kind: str
    query: str
    now: Timestamp
    payload: dict[str, Any]
    supporting_ids: list[int] = field(default_factory=list)
    params: RelevanceParams = field(default=RelevanceParams(), compare=False, repr=False)

    @property
    def empty(self) -> bool:
        return not self.supporting_ids

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "query": self.query, "now": self.now,
                "payload": self.payload, "supporting_ids": list(self.supporting_ids)}


def episode_entities(ep: Episode) -> set[str]:
    """Entities an episode's own content refers to."""
    out: set[str] = set()
    for item in ep.what:
        if isinstance(item, EntityObservation):
            out.add(item.entity)
        elif isinstance(item, Utterance):
            out.add(item.speaker)
        elif isinstance(item, ActionRecord):
            out.update(item.args)
    return out


def episode_places(ep: Episode) -> set[str]:
    out: set[str] = set()
    for loc in ep.where:
        out.update(n for n in (loc.room, loc.furniture) if n is not None)
        if loc.relation is not None:
            out.add(loc.relation[1])
    return out


class StoreIndex:
    """Secondary indexes over the closed episodes and entity timelines of a store."""

    def __init__(self, store: Store):
        eps = sorted((ep for ep in store.episodes.values() if ep.closed), key=lambda e: (e.when.start, e.id))
        self.order = [ep.id for ep in eps]
        self.rank = {ep_id: i for i, ep_id in enumerate(self.order)}
        self.starts = [ep.when.start for ep in eps]
        self.by_kind: dict[Kind, set[int]] = defaultdict(set)
        self.by_place: dict[str, set[int]] = defaultdict(set)
        self.by_entity: dict[str, set[int]] = defaultdict(set)
        # group -> level -> ids whose tag in that group is at least level
        self.by_emotion: dict[EmotionGroup, list[set[int]]] = {g: [set() for _ in range(4)] for g in EmotionGroup}
        for ep in eps:
            self.by_kind[ep.kind].add(ep.id)
            for place in episode_places(ep):
                self.by_place[place].add(ep.id)
            for entity in episode_entities(ep):
                self.by_entity[entity].add(ep.id)
            for group, level in ep.emotions.items():
                for lv in range(level + 1):
                    self.by_emotion[group][lv].add(ep.id)
        self.timelines: dict[tuple[str, str], tuple[list[int], list[StateEntry]]] = {}
        self.fields: dict[str, list[str]] = {}
        for entity in store.entities.values():
            per_field: dict[str, list[StateEntry]] = defaultdict(list)
            for entry in entity.state_history:
                per_field[entry.field].append(entry)
            self.fields[entity.id] = sorted(per_field)
            for name, entries in per_field.items():
                self.timelines[(entity.id, name)] = ([e.t for e in entries], entries)

    def latest(self, entity: str, field_name: str, at: Timestamp) -> Optional[StateEntry]:
        """Last-written value of ``field_name`` at or before ``at``."""
        timeline = self.timelines.get((entity, field_name))
        if timeline is None:
            return None
        times, entries = timeline
        i = bisect.bisect_right(times, at)
        return entries[i - 1] if i else None


def index_of(store: Store) -> StoreIndex:
    cached = store.__dict__.get("_index")
    if cached is None or cached[0] != store.revision or cached[1] != len(store.episodes):
        cached = (store.revision, len(store.episodes), StoreIndex(store))
        store.__dict__["_index"] = cached
    return cached[2]


def match(store: Store, conds: Conditions) -> list[int]:
    """Closed episodes satisfying every condition, ordered by (start, id)."""
    idx = index_of(store)
    candidates: Optional[set[int]] = None

    def narrow(ids: set[int]) -> None:
        nonlocal candidates
        candidates = set(ids) if candidates is None else candidates & ids

    residual: list[Condition] = []
    for c in conds:
        if isinstance(c, KindIs):
            narrow(idx.by_kind.get(c.kind, set()))
        elif isinstance(c, LocationIs):
            narrow(idx.by_place.get(c.name, set()))
        elif isinstance(c, EntityIs):
            narrow(idx.by_entity.get(c.entity, set()))
        elif isinstance(c, EmotionAtLeast):
            narrow(idx.by_emotion[c.group][c.level])
        elif isinstance(c, During):
            hi = bisect.bisect_right(idx.starts, c.end)
            narrow(set(idx.order[:hi]))
            residual.append(c)
        else:
            residual.append(c)
    if candidates is None:
        ids = list(idx.order)
    else:
        ids = sorted(candidates, key=idx.rank.__getitem__)
    for c in residual:
        if isinstance(c, LabelHas):
            needle = c.text.lower()
            ids = [i for i in ids if needle in store.episodes[i].label.lower()]
        elif isinstance(c, During):
            window = TimeInterval(c.start, c.end) if c.end >= c.start else None
            ids = [] if window is None else [i for i in ids if interval_overlaps(store.episodes[i].when, window)]
    return ids


def _last(store: Store, ids: list[int]) -> Optional[int]:
    if not ids:
        return None
    eps = [store.episodes[i] for i in ids]
    return min(eps, key=lambda e: (-e.when.end, e.when.start, e.id)).id


def describe_supporting(store: Store, episode_id: int) -> list[int]:
    ep = store.episodes[episode_id]
    children = sorted((store.episodes[c] for c in ep.children if c in store.episodes),
                      key=lambda c: (c.when.start, c.id))
    return [episode_id, *(c.id for c in children)]


def feeling_payload(episodes: list[Episode]) -> dict[str, Any]:
    best: dict[EmotionGroup, int] = {}
    for ep in episodes:
        for group, level in ep.emotions.items():
            if level > best.get(group, -1):
                best[group] = level
    tags = [EmotionTag(g, best[g]) for g in EmotionGroup if g in best]
    strongest = max(tags, key=lambda t: (t.intensity, -t.group.rank), default=None)
    return {
        "emotions": [{"group": t.group.value, "intensity": t.intensity, "phrase": emotion_phrase(t)} for t in tags],
        "summary": emotion_phrase(strongest) if strongest is not None else None,
    }


def eval_query(q: Query, store: Store, now: Timestamp, params: RelevanceParams = RelevanceParams()) -> Answer:
    text = to_dsl(q)

    def answer(kind: str, payload: dict, support: list[int]) -> Answer:
        return Answer(kind, text, now, payload, support, params)

    if isinstance(q, FindEpisodes):
        ids = match(store, q.conditions)
        if q.order == "relevance":
            ids = rank(store, ids, now, params)
        if q.limit is not None:
            ids = ids[: q.limit]
        return answer("find", {"episodes": ids}, list(ids))

    if isinstance(q, When):
        ids = match(store, q.conditions)
        intervals = [[store.episodes[i].when.start, store.episodes[i].when.end] for i in ids]
        return answer("when", {"intervals": intervals}, ids)

    if isinstance(q, (WhereIs, StateOf)):
        if q.entity not in store.entities:
            raise UnknownEntity(f"unknown entity {q.entity!r}")
        idx = index_of(store)
        at = now if q.at is None else q.at
        if isinstance(q, WhereIs) or q.field is not None:
            name = "location" if isinstance(q, WhereIs) else q.field
            entry = idx.latest(q.entity, name, at)
            value = entry.value if entry else None
            support = [entry.source] if entry else []
            if isinstance(q, WhereIs):
                return answer("where_is", {"entity": q.entity, "location": value}, support)
            return answer("state_of", {"entity": q.entity, "values": {name: value} if entry else {}}, support)
        values, sources = {}, set()
        for name in idx.fields.get(q.entity, []):
            entry = idx.latest(q.entity, name, at)
            if entry is not None:
                values[name] = entry.value
                sources.add(entry.source)
        return answer("state_of", {"entity": q.entity, "values": values}, sorted(sources))

    if isinstance(q, Feeling):
        ids = match(store, q.conditions)
        return answer("feeling", feeling_payload([store.episodes[i] for i in ids]), ids)

    if isinstance(q, Describe):
        if isinstance(q.target, Last):
            target = _last(store, match(store, q.target.conditions))
            if target is None:
                return answer("describe", {"episode": None, "narration": None}, [])
        else:
            target = q.target
            if target not in store.episodes:
                raise UnknownEpisode(f"unknown episode {target}")
            if not store.episodes[target].closed:
                raise OpenEpisode(f"episode {target} is open")
        payload = {"episode": target, "narration": narrate(store, target, now)}
        return answer("describe", payload, describe_supporting(store, target))

    raise TypeError(f"unknown query {q!r}")
