"""Domain types: time intervals, emotion tags, episodes, content items and entities.

Timestamps are plain ``int`` milliseconds since the Unix epoch (UTC).  All
intervals are half-open ``[start, end)``; an absent end means the episode is
still open and is treated as +infinity by the interval algebra.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from epilog.space import SemanticLocation

Timestamp = int


@dataclass(frozen=True)
class TimeInterval:
    start: Timestamp
    end: Optional[Timestamp] = None

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"negative timestamp {self.start}")
        if self.end is not None and self.end < self.start:
            raise ValueError(f"interval end {self.end} before start {self.start}")

    @property
    def closed(self) -> bool:
        return self.end is not None

    @property
    def upper(self) -> float:
        return float("inf") if self.end is None else self.end


def interval_overlaps(a: TimeInterval, b: TimeInterval) -> bool:
    """True iff the half-open intervals share at least one instant.

    A zero-length interval ``[t, t)`` stands for the instant ``t``.
    """
    if a.start == a.upper:
        return b.start <= a.start < b.upper or a.start == b.start == b.upper
    if b.start == b.upper:
        return a.start <= b.start < a.upper
    return max(a.start, b.start) < min(a.upper, b.upper)


def interval_contains(outer: TimeInterval, inner: TimeInterval) -> bool:
    return outer.start <= inner.start and inner.upper <= outer.upper


class EmotionGroup(enum.Enum):
    JOY_TRUST = "joy_trust"
    SADNESS_FEAR = "sadness_fear"
    SURPRISE_ANTICIPATION = "surprise_anticipation"
    ANGER_DISGUST = "anger_disgust"

    @property
    def rank(self) -> int:
        return _GROUP_ORDER[self]

    @property
    def adjective(self) -> str:
        return _ADJECTIVES[self]


_GROUP_ORDER = {g: i for i, g in enumerate(EmotionGroup)}
_ADJECTIVES = {
    EmotionGroup.JOY_TRUST: "happy",
    EmotionGroup.SADNESS_FEAR: "sad",
    EmotionGroup.SURPRISE_ANTICIPATION: "surprised",
    EmotionGroup.ANGER_DISGUST: "angry",
}
MAX_INTENSITY = 3


@dataclass(frozen=True)
class EmotionTag:
    group: EmotionGroup
    intensity: int

    def __post_init__(self) -> None:
        if not isinstance(self.group, EmotionGroup):
            object.__setattr__(self, "group", EmotionGroup(self.group))
        if not 0 <= self.intensity <= MAX_INTENSITY:
            raise ValueError(f"emotion intensity {self.intensity} outside 0..{MAX_INTENSITY}")


def emotion_phrase(tag: EmotionTag) -> str:
    """Render a tag as "normal", "a little happy", "happy" or "very happy"."""
    if tag.intensity == 0:
        return "normal"
    adjective = tag.group.adjective
    if tag.intensity == 1:
        return f"a little {adjective}"
    if tag.intensity == 2:
        return adjective
    return f"very {adjective}"


class Kind(enum.Enum):
    CONTEXT = "context"
    TASK = "task"
    CAPABILITY = "capability"


CAPABILITIES = ("navigation", "manipulation", "perception", "hri")

# kind -> kinds allowed as its parent (empty: must be a root)
PARENT_KINDS: dict[Kind, frozenset[Kind]] = {
    Kind.CONTEXT: frozenset(),
    Kind.TASK: frozenset({Kind.CONTEXT, Kind.TASK}),
    Kind.CAPABILITY: frozenset({Kind.TASK}),
}


def check_kind(kind: Kind, subtype: Optional[str]) -> None:
    if kind is Kind.CAPABILITY:
        if subtype not in CAPABILITIES:
            raise ValueError(f"capability subtype must be one of {CAPABILITIES}, got {subtype!r}")
    elif subtype is not None:
        raise ValueError(f"{kind.value} episodes take no subtype")


# --- content items -------------------------------------------------------

@dataclass(frozen=True)
class MediaRef:
    path: str
    kind: str = "image"
    post_hoc: bool = False

    def __post_init__(self) -> None:
        if not self.path:
            raise ValueError("media path must be non-empty")
        if self.kind not in ("image", "video"):
            raise ValueError(f"media kind must be image or video, got {self.kind!r}")


@dataclass(frozen=True)
class EntityObservation:
    entity: str
    fields: dict[str, str]
    media: Optional[MediaRef] = None
    post_hoc: bool = False


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str
    post_hoc: bool = False


@dataclass(frozen=True)
class ActionRecord:
    verb: str
    args: tuple[str, ...] = ()
    post_hoc: bool = False

    def __post_init__(self) -> None:
        if not self.verb:
            raise ValueError("action verb must be non-empty")
        object.__setattr__(self, "args", tuple(self.args))


ContentItem = Union[EntityObservation, Utterance, ActionRecord, MediaRef]


def item_media(item: ContentItem) -> list[MediaRef]:
    if isinstance(item, MediaRef):
        return [item]
    if isinstance(item, EntityObservation) and item.media is not None:
        return [item.media]
    return []


# --- episodes and entities -----------------------------------------------

@dataclass
class Episode:
    id: int
    kind: Kind
    label: str
    when: TimeInterval
    subtype: Optional[str] = None
    where: list[SemanticLocation] = field(default_factory=list)
    what: list[ContentItem] = field(default_factory=list)
    emotions: dict[EmotionGroup, int] = field(default_factory=dict)
    parent: Optional[int] = None
    children: list[int] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return self.when.end is not None

    @property
    def tags(self) -> list[EmotionTag]:
        return [EmotionTag(g, self.emotions[g]) for g in sorted(self.emotions, key=lambda g: g.rank)]

    def merge_emotion(self, tag: EmotionTag) -> None:
        """Keep the maximum intensity seen per group."""
        if tag.intensity > self.emotions.get(tag.group, -1):
            self.emotions[tag.group] = tag.intensity

    @property
    def max_intensity(self) -> int:
        return max(self.emotions.values(), default=-1)


ENTITY_CLASSES = ("person", "object", "location")
STATIC_FIELDS = frozenset({"name", "age"})


@dataclass(frozen=True)
class StateEntry:
    t: Timestamp
    field: str
    value: str
    source: int


@dataclass
class Entity:
    id: str
    cls: str
    static_fields: dict[str, str] = field(default_factory=dict)
    state_history: list[StateEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.cls not in ENTITY_CLASSES:
            raise ValueError(f"entity class must be one of {ENTITY_CLASSES}, got {self.cls!r}")

    def record(self, entry: StateEntry) -> None:
        """Insert keeping the history sorted by time; equal times keep arrival order."""
        history = self.state_history
        i = len(history)
        while i > 0 and history[i - 1].t > entry.t:
            i -= 1
        history.insert(i, entry)
        if entry.field in STATIC_FIELDS:
            latest = [e for e in history if e.field == entry.field][-1]
            self.static_fields[entry.field] = latest.value
