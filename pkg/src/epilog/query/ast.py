"""Query syntax tree and its canonical text form."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from epilog.model import EmotionGroup, Kind


@dataclass(frozen=True)
class KindIs:
    kind: Kind


@dataclass(frozen=True)
class LabelHas:
    text: str


@dataclass(frozen=True)
class LocationIs:
    name: str


@dataclass(frozen=True)
class EntityIs:
    entity: str


@dataclass(frozen=True)
class EmotionAtLeast:
    group: EmotionGroup
    level: int = 1


@dataclass(frozen=True)
class During:
    start: int
    end: int


Condition = Union[KindIs, LabelHas, LocationIs, EntityIs, EmotionAtLeast, During]
Conditions = tuple[Condition, ...]


@dataclass(frozen=True)
class FindEpisodes:
    conditions: Conditions = ()
    order: str = "time"  # or "relevance"
    limit: Optional[int] = None


@dataclass(frozen=True)
class When:
    conditions: Conditions


@dataclass(frozen=True)
class WhereIs:
    entity: str
    at: Optional[int] = None


@dataclass(frozen=True)
class StateOf:
    entity: str
    field: Optional[str] = None
    at: Optional[int] = None


@dataclass(frozen=True)
class Feeling:
    conditions: Conditions = ()


@dataclass(frozen=True)
class Last:
    conditions: Conditions = ()


@dataclass(frozen=True)
class Describe:
    target: Union[int, Last]


Query = Union[FindEpisodes, When, WhereIs, StateOf, Feeling, Describe]


def _cond_text(c: Condition) -> str:
    if isinstance(c, KindIs):
        return f"KIND={c.kind.value}"
    if isinstance(c, LabelHas):
        return f"LABEL~{json.dumps(c.text, ensure_ascii=False)}"
    if isinstance(c, LocationIs):
        return f"LOCATION={c.name}"
    if isinstance(c, EntityIs):
        return f"ENTITY={c.entity}"
    if isinstance(c, EmotionAtLeast):
        return f"EMOTION={c.group.value}>={c.level}"
    if isinstance(c, During):
        return f"DURING [{c.start}, {c.end}]"
    raise TypeError(f"unknown condition {c!r}")


def conditions_text(conds: Conditions) -> str:
    return " AND ".join(_cond_text(c) for c in conds)


def to_dsl(q: Query) -> str:
    """Canonical text; ``parse_query(to_dsl(q)) == q``."""
    if isinstance(q, FindEpisodes):
        parts = ["FIND EPISODES"]
        if q.conditions:
            parts.append("WHERE " + conditions_text(q.conditions))
        parts.append(f"ORDER BY {q.order.upper()}")
        if q.limit is not None:
            parts.append(f"LIMIT {q.limit}")
        return " ".join(parts)
    if isinstance(q, When):
        return "WHEN " + conditions_text(q.conditions)
    if isinstance(q, WhereIs):
        return f"WHERE-IS {q.entity}" + (f" AT {q.at}" if q.at is not None else "")
    if isinstance(q, StateOf):
        text = f"STATE OF {q.entity}"
        if q.field is not None:
            text += f" FIELD {q.field}"
        if q.at is not None:
            text += f" AT {q.at}"
        return text
    if isinstance(q, Feeling):
        return "FEELING" + (" WHERE " + conditions_text(q.conditions) if q.conditions else "")
    if isinstance(q, Describe):
        if isinstance(q.target, Last):
            conds = q.target.conditions
            return "DESCRIBE LAST" + (" WHERE " + conditions_text(conds) if conds else "")
        return f"DESCRIBE {q.target}"
    raise TypeError(f"unknown query {q!r}")
