"""Episode tree construction from an event stream, plus validation and snapshots.

Events are ingested into a :class:`WorkingMemory` holding the episodes that
are still open (or closed but not yet consolidated).  Consolidation (see
:mod:`epilog.relevance`) moves finished Context subtrees into the long-term
:class:`Store`.

Begin attaches the new episode to the innermost open episode whose kind may
parent it, so two Capabilities begun under the same Task are open at the same
time and become transposed siblings.  End closes the innermost open episode,
or the innermost one carrying the given label.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional, Union

from epilog.errors import (
    CorruptSnapshot,
    EndWithoutOpen,
    InvalidEvent,
    NestingViolation,
    OpenEpisode,
    OutOfOrderTimestamp,
    UnknownEpisode,
)
from epilog.model import (
    ActionRecord,
    ContentItem,
    EmotionGroup,
    EmotionTag,
    Entity,
    EntityObservation,
    Episode,
    Kind,
    MediaRef,
    PARENT_KINDS,
    StateEntry,
    TimeInterval,
    Timestamp,
    Utterance,
    check_kind,
    interval_contains,
    interval_overlaps,
)
from epilog.space import SemanticLocation

# --- events -------------------------------------------------------------------


@dataclass(frozen=True)
class Begin:
    kind: Kind
    label: str
    subtype: Optional[str] = None

    def __post_init__(self) -> None:
        check_kind(self.kind, self.subtype)


@dataclass(frozen=True)
class End:
    label: Optional[str] = None


@dataclass(frozen=True)
class Observe:
    entity: str
    cls: str
    fields: dict[str, str]
    media: Optional[MediaRef] = None


@dataclass(frozen=True)
class Say:
    speaker: str
    text: str


@dataclass(frozen=True)
class Act:
    verb: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Emotion:
    group: EmotionGroup
    intensity: int


@dataclass(frozen=True)
class Pose:
    x: float
    y: float


Payload = Union[Begin, End, Observe, Say, Act, Emotion, Pose]


@dataclass(frozen=True)
class Event:
    t: Timestamp
    payload: Payload


def media_to_json(media: MediaRef) -> dict:
    return {"path": media.path, "kind": media.kind}


def event_to_json(event: Event) -> dict[str, Any]:
    p = event.payload
    if isinstance(p, Begin):
        doc = {"type": "begin", "kind": p.kind.value, "label": p.label}
        if p.subtype is not None:
            doc["subtype"] = p.subtype
    elif isinstance(p, End):
        doc = {"type": "end"}
        if p.label is not None:
            doc["label"] = p.label
    elif isinstance(p, Observe):
        doc = {"type": "observe", "entity": p.entity, "class": p.cls, "fields": dict(p.fields)}
        if p.media is not None:
            doc["media"] = media_to_json(p.media)
    elif isinstance(p, Say):
        doc = {"type": "say", "speaker": p.speaker, "text": p.text}
    elif isinstance(p, Act):
        doc = {"type": "act", "verb": p.verb, "args": list(p.args)}
    elif isinstance(p, Emotion):
        doc = {"type": "emotion", "group": p.group.value, "intensity": p.intensity}
    elif isinstance(p, Pose):
        doc = {"type": "pose", "x": p.x, "y": p.y}
    else:  # pragma: no cover
        raise TypeError(f"unknown payload {p!r}")
    doc["t"] = event.t
    return doc


def event_from_json(doc: dict[str, Any]) -> Event:
    try:
        t = doc["t"]
        if not isinstance(t, int) or isinstance(t, bool) or t < 0:
            raise InvalidEvent(f"event time must be a non-negative integer, got {t!r}")
        kind = doc["type"]
        if kind == "begin":
            payload: Payload = Begin(Kind(doc["kind"]), str(doc["label"]), doc.get("subtype"))
        elif kind == "end":
            payload = End(doc.get("label"))
        elif kind == "observe":
            media = doc.get("media")
            payload = Observe(
                str(doc["entity"]), str(doc["class"]),
                {str(k): str(v) for k, v in doc["fields"].items()},
                MediaRef(media["path"], media.get("kind", "image")) if media else None,
            )
        elif kind == "say":
            payload = Say(str(doc["speaker"]), str(doc["text"]))
        elif kind == "act":
            payload = Act(str(doc["verb"]), tuple(str(a) for a in doc.get("args", [])))
        elif kind == "emotion":
            tag = EmotionTag(EmotionGroup(doc["group"]), int(doc["intensity"]))
            payload = Emotion(tag.group, tag.intensity)
        elif kind == "pose":
            payload = Pose(float(doc["x"]), float(doc["y"]))
        else:
            raise InvalidEvent(f"unknown event type {kind!r}")
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidEvent(f"malformed event {doc!r}: {exc}") from exc
    return Event(t, payload)


def read_events(path: Union[str, Path]) -> Iterator[Event]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidEvent(f"{path}:{lineno}: {exc}") from exc
            yield event_from_json(doc)


def dump_events(events: Iterable[Event]) -> str:
    return "".join(json.dumps(event_to_json(e), sort_keys=True, ensure_ascii=False) + "\n" for e in events)


# --- memory containers ----------------------------------------------------------


@dataclass
class PendingObservation:
    """Entity state waiting for its source episode to be consolidated.

    ``t`` is None for post-hoc observations on a still-open episode; they are
    stamped with the episode's end time when it is consolidated.
    """

    t: Optional[Timestamp]
    entity: str
    cls: str
    fields: dict[str, str]
    episode: int


@dataclass
class WorkingMemory:
    episodes: dict[int, Episode] = field(default_factory=dict)
    open: list[int] = field(default_factory=list)
    closed_roots: list[int] = field(default_factory=list)
    poses: list[tuple[Timestamp, float, float]] = field(default_factory=list)
    pending: list[PendingObservation] = field(default_factory=list)
    last_t: Optional[Timestamp] = None

    def innermost(self) -> Optional[Episode]:
        return self.episodes[self.open[-1]] if self.open else None


@dataclass
class Store:
    episodes: dict[int, Episode] = field(default_factory=dict)
    entities: dict[str, Entity] = field(default_factory=dict)
    roots: list[int] = field(default_factory=list)
    next_id: int = 1
    revision: int = field(default=0, compare=False, repr=False)

    def touch(self) -> None:
        """Mark derived indexes stale; call after mutating episodes or entities."""
        self.revision += 1

    def episode(self, episode_id: int) -> Episode:
        try:
            return self.episodes[episode_id]
        except KeyError:
            raise UnknownEpisode(f"unknown episode {episode_id}") from None


# --- ingestion -------------------------------------------------------------------


def _entity_class(wm: WorkingMemory, store: Store, entity: str) -> Optional[str]:
    known = store.entities.get(entity)
    if known is not None:
        return known.cls
    for p in wm.pending:
        if p.entity == entity:
            return p.cls
    return None


def _require_open(wm: WorkingMemory, what: str) -> Episode:
    ep = wm.innermost()
    if ep is None:
        raise NestingViolation(f"{what} event outside any open episode")
    return ep


def _has_open_descendant(wm: WorkingMemory, episode_id: int) -> bool:
    for other in wm.open:
        parent = wm.episodes[other].parent
        while parent is not None:
            if parent == episode_id:
                return True
            parent = wm.episodes[parent].parent if parent in wm.episodes else None
    return False


def ingest_event(wm: WorkingMemory, store: Store, event: Event) -> None:
    """Apply one event to working memory (ids are drawn from ``store.next_id``)."""
    if wm.last_t is not None and event.t < wm.last_t:
        raise OutOfOrderTimestamp(f"event at t={event.t} after t={wm.last_t}")
    p = event.payload

    if isinstance(p, Begin):
        check_kind(p.kind, p.subtype)
        if p.kind is Kind.CONTEXT:
            if wm.open:
                raise NestingViolation("a Context episode is already open")
            parent = None
        else:
            allowed = PARENT_KINDS[p.kind]
            parent = next((wm.episodes[i] for i in reversed(wm.open) if wm.episodes[i].kind in allowed), None)
            if parent is None:
                names = "/".join(sorted(k.value for k in allowed))
                raise NestingViolation(f"{p.kind.value} episode {p.label!r} needs an open {names}")
        ep = Episode(store.next_id, p.kind, p.label, TimeInterval(event.t), p.subtype,
                     parent=parent.id if parent else None)
        store.next_id += 1
        if parent is not None:
            parent.children.append(ep.id)
        wm.episodes[ep.id] = ep
        wm.open.append(ep.id)

    elif isinstance(p, End):
        if not wm.open:
            raise EndWithoutOpen(f"end at t={event.t} with no open episode")
        if p.label is None:
            target = wm.open[-1]
        else:
            target = next((i for i in reversed(wm.open) if wm.episodes[i].label == p.label), None)
            if target is None:
                raise NestingViolation(f"end label {p.label!r} matches no open episode")
        if _has_open_descendant(wm, target):
            raise NestingViolation(f"episode {target} closed while a descendant is still open")
        ep = wm.episodes[target]
        ep.when = TimeInterval(ep.when.start, event.t)
        wm.open.remove(target)
        if ep.parent is None:
            wm.closed_roots.append(target)

    elif isinstance(p, Observe):
        ep = _require_open(wm, "observe")
        known = _entity_class(wm, store, p.entity)
        if known is not None and known != p.cls:
            raise InvalidEvent(f"entity {p.entity!r} is a {known}, observed as {p.cls}")
        ep.what.append(EntityObservation(p.entity, dict(p.fields), p.media))
        wm.pending.append(PendingObservation(event.t, p.entity, p.cls, dict(p.fields), ep.id))

    elif isinstance(p, Say):
        _require_open(wm, "say").what.append(Utterance(p.speaker, p.text))

    elif isinstance(p, Act):
        _require_open(wm, "act").what.append(ActionRecord(p.verb, p.args))

    elif isinstance(p, Emotion):
        _require_open(wm, "emotion").merge_emotion(EmotionTag(p.group, p.intensity))

    elif isinstance(p, Pose):
        wm.poses.append((event.t, p.x, p.y))

    else:  # pragma: no cover
        raise InvalidEvent(f"unknown payload {p!r}")
    wm.last_t = event.t


def ingest(wm: WorkingMemory, store: Store, events: Iterable[Event]) -> int:
    n = 0
    for event in events:
        ingest_event(wm, store, event)
        n += 1
    return n


# --- access and modification ---------------------------------------------------------


def _find(store: Store, episode_id: int, wm: Optional[WorkingMemory]) -> Episode:
    if episode_id in store.episodes:
        return store.episodes[episode_id]
    if wm is not None and episode_id in wm.episodes:
        return wm.episodes[episode_id]
    raise UnknownEpisode(f"unknown episode {episode_id}")


def get_what(store: Store, episode_id: int, wm: Optional[WorkingMemory] = None) -> list[ContentItem]:
    return list(_find(store, episode_id, wm).what)


def update_what(store: Store, episode_id: int, item: ContentItem,
                wm: Optional[WorkingMemory] = None, cls: str = "object") -> None:
    """Append content to an episode; items added after it closed are flagged post-hoc.

    Observations also update entity state, stamped with the episode's end time
    (``cls`` is used only when the entity is not yet known).
    """
    ep = _find(store, episode_id, wm)
    if ep.closed:
        item = replace(item, post_hoc=True)
    ep.what.append(item)
    if isinstance(item, EntityObservation):
        if ep.id in store.episodes:
            entity = store.entities.get(item.entity)
            if entity is None:
                entity = store.entities[item.entity] = Entity(item.entity, cls)
            for name, value in item.fields.items():
                entity.record(StateEntry(ep.when.end, name, value, ep.id))
        else:
            known = _entity_class(wm, store, item.entity) or cls
            wm.pending.append(PendingObservation(ep.when.end, item.entity, known, dict(item.fields), ep.id))
    store.touch()


def transposed_with(store: Store, episode_id: int) -> list[int]:
    """Siblings (same parent) whose intervals overlap the episode's."""
    ep = store.episode(episode_id)
    if not ep.closed:
        raise OpenEpisode(f"episode {episode_id} is open")
    siblings = store.episodes[ep.parent].children if ep.parent is not None else store.roots
    out = [store.episodes[s] for s in siblings
           if s != episode_id and s in store.episodes and interval_overlaps(ep.when, store.episodes[s].when)]
    return [s.id for s in sorted(out, key=lambda s: (s.when.start, s.id))]


# --- validation -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Violation:
    code: str
    episode: Optional[int] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {"code": self.code, "episode": self.episode, "detail": self.detail}


def validate(store: Store) -> list[Violation]:
    """Check every structural invariant; returns violation records (empty = valid)."""
    out: list[Violation] = []
    eps = store.episodes
    for key, ep in eps.items():
        if key != ep.id:
            out.append(Violation("IdMismatch", key, f"stored under {key} but has id {ep.id}"))
        if key >= store.next_id:
            out.append(Violation("IdViolation", key, f"id not below next_id {store.next_id}"))
        if not ep.closed:
            out.append(Violation("OpenEpisodeViolation", ep.id, "stored episode has no end"))
        try:
            check_kind(ep.kind, ep.subtype)
        except ValueError as exc:
            out.append(Violation("KindViolation", ep.id, str(exc)))
        allowed = PARENT_KINDS[ep.kind]
        if ep.parent is None:
            if allowed:
                out.append(Violation("NestingKindViolation", ep.id, f"{ep.kind.value} without parent"))
        elif ep.parent not in eps:
            out.append(Violation("DanglingReference", ep.id, f"parent {ep.parent} missing"))
        else:
            parent = eps[ep.parent]
            if parent.kind not in allowed:
                out.append(Violation("NestingKindViolation", ep.id,
                                     f"{ep.kind.value} under {parent.kind.value} {parent.id}"))
            if ep.id not in parent.children:
                out.append(Violation("DanglingReference", ep.id, f"not listed by parent {parent.id}"))
            if not interval_contains(parent.when, ep.when):
                out.append(Violation("ContainmentViolation", ep.id, f"interval escapes parent {parent.id}"))
        previous = None
        for child_id in ep.children:
            child = eps.get(child_id)
            if child is None:
                out.append(Violation("DanglingReference", ep.id, f"child {child_id} missing"))
                continue
            if child.parent != ep.id:
                out.append(Violation("DanglingReference", ep.id, f"child {child_id} names parent {child.parent}"))
            if previous is not None and (child.when.start, child.id) < (previous.when.start, previous.id):
                out.append(Violation("ChildOrderViolation", ep.id, f"child {child_id} out of start order"))
            previous = child
        if len(set(ep.children)) != len(ep.children):
            out.append(Violation("DanglingReference", ep.id, "duplicate child ids"))
        if not ep.emotions:
            out.append(Violation("MissingEmotion", ep.id, "no emotion tag"))
        for group, level in ep.emotions.items():
            if not isinstance(group, EmotionGroup) or not 0 <= level <= 3:
                out.append(Violation("EmotionViolation", ep.id, f"bad tag {group}={level}"))

    for root in store.roots:
        ep = eps.get(root)
        if ep is None:
            out.append(Violation("DanglingReference", root, "root missing"))
        elif ep.kind is not Kind.CONTEXT or ep.parent is not None:
            out.append(Violation("RootViolation", root, "roots must be parentless Context episodes"))
    listed = set(store.roots)
    for ep in eps.values():
        if ep.kind is Kind.CONTEXT and ep.id not in listed:
            out.append(Violation("RootViolation", ep.id, "Context episode not listed as a root"))

    for entity in store.entities.values():
        times = [e.t for e in entity.state_history]
        if times != sorted(times):
            out.append(Violation("HistoryOrderViolation", None, f"entity {entity.id} history unsorted"))
        for entry in entity.state_history:
            if entry.source not in eps:
                out.append(Violation("DanglingReference", entry.source,
                                     f"entity {entity.id} cites missing episode {entry.source}"))
    return sorted(out, key=lambda v: (v.episode if v.episode is not None else -1, v.code, v.detail))


# --- persistence ---------------------------------------------------------------------


def item_to_json(item: ContentItem) -> dict[str, Any]:
    if isinstance(item, EntityObservation):
        doc: dict[str, Any] = {"type": "observation", "entity": item.entity, "fields": dict(item.fields)}
        if item.media is not None:
            doc["media"] = media_to_json(item.media)
    elif isinstance(item, Utterance):
        doc = {"type": "utterance", "speaker": item.speaker, "text": item.text}
    elif isinstance(item, ActionRecord):
        doc = {"type": "action", "verb": item.verb, "args": list(item.args)}
    elif isinstance(item, MediaRef):
        doc = {"type": "media", **media_to_json(item)}
    else:  # pragma: no cover
        raise TypeError(f"unknown content item {item!r}")
    if item.post_hoc:
        doc["post_hoc"] = True
    return doc


def item_from_json(doc: dict[str, Any]) -> ContentItem:
    post_hoc = bool(doc.get("post_hoc", False))
    kind = doc["type"]
    if kind == "observation":
        media = doc.get("media")
        return EntityObservation(doc["entity"], dict(doc["fields"]),
                                 MediaRef(media["path"], media["kind"]) if media else None, post_hoc)
    if kind == "utterance":
        return Utterance(doc["speaker"], doc["text"], post_hoc)
    if kind == "action":
        return ActionRecord(doc["verb"], tuple(doc["args"]), post_hoc)
    if kind == "media":
        return MediaRef(doc["path"], doc["kind"], post_hoc)
    raise ValueError(f"unknown content item type {kind!r}")


def episode_to_json(ep: Episode) -> dict[str, Any]:
    return {
        "id": ep.id,
        "kind": ep.kind.value,
        "subtype": ep.subtype,
        "label": ep.label,
        "when": {"start": ep.when.start, "end": ep.when.end},
        "where": [loc.to_json() for loc in ep.where],
        "what": [item_to_json(item) for item in ep.what],
        "emotions": [{"group": t.group.value, "intensity": t.intensity} for t in ep.tags],
        "parent": ep.parent,
        "children": list(ep.children),
    }


def episode_from_json(doc: dict[str, Any]) -> Episode:
    emotions: dict[EmotionGroup, int] = {}
    for tag in doc["emotions"]:
        t = EmotionTag(EmotionGroup(tag["group"]), int(tag["intensity"]))
        if t.group in emotions:
            raise ValueError(f"duplicate emotion group {t.group.value}")
        emotions[t.group] = t.intensity
    return Episode(
        id=int(doc["id"]),
        kind=Kind(doc["kind"]),
        label=str(doc["label"]),
        when=TimeInterval(int(doc["when"]["start"]), doc["when"]["end"]),
        subtype=doc["subtype"],
        where=[SemanticLocation.from_json(loc) for loc in doc["where"]],
        what=[item_from_json(item) for item in doc["what"]],
        emotions=emotions,
        parent=doc["parent"],
        children=[int(c) for c in doc["children"]],
    )


def entity_to_json(entity: Entity) -> dict[str, Any]:
    return {
        "id": entity.id,
        "class": entity.cls,
        "static_fields": dict(entity.static_fields),
        "state_history": [{"t": e.t, "field": e.field, "value": e.value, "source": e.source}
                          for e in entity.state_history],
    }


def entity_from_json(doc: dict[str, Any]) -> Entity:
    return Entity(
        doc["id"], doc["class"], dict(doc["static_fields"]),
        [StateEntry(int(e["t"]), e["field"], e["value"], int(e["source"])) for e in doc["state_history"]],
    )


def store_to_json(store: Store) -> dict[str, Any]:
    return {
        "episodes": [episode_to_json(store.episodes[i]) for i in sorted(store.episodes)],
        "entities": [entity_to_json(store.entities[k]) for k in sorted(store.entities)],
        "roots": list(store.roots),
        "next_id": store.next_id,
    }


def store_from_json(doc: dict[str, Any]) -> Store:
    store = Store(next_id=int(doc["next_id"]))
    for item in doc["episodes"]:
        ep = episode_from_json(item)
        if ep.id in store.episodes:
            raise ValueError(f"duplicate episode id {ep.id}")
        store.episodes[ep.id] = ep
    for item in doc["entities"]:
        entity = entity_from_json(item)
        store.entities[entity.id] = entity
    store.roots = [int(r) for r in doc["roots"]]
    return store


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def save(store: Store, path: Union[str, Path]) -> Path:
    path = Path(path)
    _atomic_write(path, canonical_json(store_to_json(store)))
    return path


def load(path: Union[str, Path]) -> Store:
    text = Path(path).read_text(encoding="utf-8")
    try:
        store = store_from_json(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CorruptSnapshot(f"{path}: {exc}") from exc
    violations = validate(store)
    if violations:
        raise CorruptSnapshot(f"{path}: {len(violations)} invariant violations, first: {violations[0]}")
    return store


def working_to_json(wm: WorkingMemory) -> dict[str, Any]:
    return {
        "episodes": [episode_to_json(wm.episodes[i]) for i in sorted(wm.episodes)],
        "open": list(wm.open),
        "closed_roots": list(wm.closed_roots),
        "poses": [list(p) for p in wm.poses],
        "pending": [{"t": p.t, "entity": p.entity, "class": p.cls, "fields": p.fields, "episode": p.episode}
                    for p in wm.pending],
        "last_t": wm.last_t,
    }


def working_from_json(doc: dict[str, Any]) -> WorkingMemory:
    try:
        return WorkingMemory(
            episodes={ep.id: ep for ep in map(episode_from_json, doc["episodes"])},
            open=[int(i) for i in doc["open"]],
            closed_roots=[int(i) for i in doc["closed_roots"]],
            poses=[(int(t), float(x), float(y)) for t, x, y in doc["poses"]],
            pending=[PendingObservation(p["t"], p["entity"], p["class"], dict(p["fields"]), int(p["episode"]))
                     for p in doc["pending"]],
            last_t=doc["last_t"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptSnapshot(f"working memory: {exc}") from exc
