"""Expected answers computed straight from scenario tables.

Nothing here calls into the engine: emotion roll-ups, phrasing, narration and
state lookups are re-derived from what the script recorded while emitting
events.  Agreement between this module and the engine is what the harness
scores.
"""

from __future__ import annotations

from typing import Iterable, Optional

from epilog.harness.scenario import EpisodeRow, StateRow

GROUPS = ("joy_trust", "sadness_fear", "surprise_anticipation", "anger_disgust")
_MOOD = {"joy_trust": "happy", "sadness_fear": "sad", "surprise_anticipation": "surprised",
         "anger_disgust": "angry"}
_LEVEL = {1: "a little {}", 2: "{}", 3: "very {}"}

_MIN = 60_000
_SPANS = ((365 * 1440 * _MIN, "year"), (30 * 1440 * _MIN, "month"), (7 * 1440 * _MIN, "week"),
          (1440 * _MIN, "day"), (60 * _MIN, "hour"), (_MIN, "minute"))


def feeling_words(group: str, level: int) -> str:
    return "normal" if level == 0 else _LEVEL[level].format(_MOOD[group])


def ago(t: int, now: int) -> str:
    delta = now - t
    for span, unit in _SPANS:
        if delta >= span:
            n = delta // span
            return f"{n} {unit}s ago" if n > 1 else f"1 {unit} ago"
    return "less than a minute ago"


def _subtree_rows(rows: dict[int, EpisodeRow], root: int) -> Iterable[EpisodeRow]:
    stack = [root]
    while stack:
        row = rows[stack.pop()]
        yield row
        stack.extend(row.children)


def rolled_emotions(rows: dict[int, EpisodeRow], episode: int) -> dict[str, int]:
    """Highest raw intensity per group over the episode's subtree; neutral joy when none."""
    out: dict[str, int] = {}
    for row in _subtree_rows(rows, episode):
        for group, level in row.emotions.items():
            out[group] = max(out.get(group, -1), level)
    return out or {"joy_trust": 0}


def select(rows: dict[int, EpisodeRow], kind: Optional[str] = None, label: Optional[str] = None,
           emotion: Optional[tuple[str, int]] = None) -> list[int]:
    """Episode ids passing the filters, ordered by (start, id)."""
    out = []
    for row in rows.values():
        if row.end is None:
            continue
        if kind is not None and row.kind != kind:
            continue
        if label is not None and label.lower() not in row.label.lower():
            continue
        if emotion is not None and rolled_emotions(rows, row.id).get(emotion[0], -1) < emotion[1]:
            continue
        out.append(row.id)
    return sorted(out, key=lambda i: (rows[i].start, i))


def feeling(rows: dict[int, EpisodeRow], ids: list[int]) -> dict:
    peak: dict[str, int] = {}
    for i in ids:
        for group, level in rolled_emotions(rows, i).items():
            peak[group] = max(peak.get(group, -1), level)
    listed = [(g, peak[g]) for g in GROUPS if g in peak]
    summary = None
    for g, level in listed:  # earliest group wins ties
        if summary is None or level > summary[1]:
            summary = (g, level)
    return {
        "emotions": [{"group": g, "intensity": lv, "phrase": feeling_words(g, lv)} for g, lv in listed],
        "summary": feeling_words(*summary) if summary else None,
    }


def intervals(rows: dict[int, EpisodeRow], ids: list[int]) -> dict:
    return {"intervals": [[rows[i].start, rows[i].end] for i in ids]}


def _clause(row: EpisodeRow) -> str:
    if not row.actions:
        return f"I worked on {row.label}"
    best = row.actions[0]
    for action in row.actions[1:]:
        if len(action[1]) > len(best[1]):
            best = action
    return "I " + best[2]


def story(rows: dict[int, EpisodeRow], episode: int, now: int) -> str:
    row = rows[episode]
    kids = sorted((rows[c] for c in row.children), key=lambda r: (r.start, r.id))
    if not kids:
        return f"{_clause(row)}, {ago(row.end, now)}."
    groups: list[list[str]] = []
    horizon = None
    for kid in kids:
        if groups and kid.start < horizon:
            groups[-1].append(_clause(kid))
            horizon = max(horizon, kid.end)
        else:
            groups.append([_clause(kid)])
            horizon = kid.end
    return ", then ".join(" while ".join(g) for g in groups) + f", {ago(row.end, now)}."


def describe_last(rows: dict[int, EpisodeRow], ids: list[int], now: int) -> dict:
    if not ids:
        return {"episode": None, "narration": None}
    target = sorted(ids, key=lambda i: (-rows[i].end, rows[i].start, i))[0]
    return {"episode": target, "narration": story(rows, target, now)}


def value_at(state: Iterable[StateRow], entity: str, field: str, at: int) -> Optional[str]:
    """Last value written to ``entity.field`` at or before ``at``."""
    best: Optional[StateRow] = None
    for row in state:
        if row.entity == entity and row.field == field and row.t <= at:
            if best is None or row.t >= best.t:
                best = row
    return best.value if best else None
