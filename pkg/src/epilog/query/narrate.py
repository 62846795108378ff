"""Story-style episode narration and relative-time phrases."""

from __future__ import annotations

from typing import Optional

from epilog.errors import FutureTimestamp, OpenEpisode
from epilog.model import ActionRecord, Episode, Timestamp
from epilog.store import Store

_SECOND = 1000
_UNITS = (
    ("year", 365 * 86400 * _SECOND),
    ("month", 30 * 86400 * _SECOND),
    ("week", 7 * 86400 * _SECOND),
    ("day", 86400 * _SECOND),
    ("hour", 3600 * _SECOND),
    ("minute", 60 * _SECOND),
)


def describe_time(t: Timestamp, now: Timestamp) -> str:
    """``"2 hours ago"``: the largest unit that fits at least once, floored."""
    if t > now:
        raise FutureTimestamp(f"timestamp {t} is after now={now}")
    age = now - t
    for unit, size in _UNITS:
        n = age // size
        if n >= 1:
            return f"{n} {unit}{'' if n == 1 else 's'} ago"
    return "less than a minute ago"


# verb -> past-tense phrase; {0}, {1} are the action arguments in order
VERB_PHRASES = {
    "answer": "answered the questions of {0}",
    "ask": "asked {0}",
    "assist": "offered help to the {0}",
    "bring": "brought the {0} to the {1}",
    "count": "counted the {0}",
    "deliver": "delivered the {0} to {1}",
    "enter": "entered the {0}",
    "find": "found the {0}",
    "follow": "followed {0}",
    "give": "gave the {0} to {1}",
    "grasp": "grasped the {0}",
    "greet": "greeted {0}",
    "inspect": "inspected the {0}",
    "leave": "left the {0}",
    "listen": "listened to {0}",
    "meet": "met {0}",
    "move": "moved towards the {0}",
    "place": "placed the {0} on the {1}",
    "recognize": "recognized {0}",
    "search": "searched for {0}",
    "serve": "served {0}",
    "take_order": "took the order of {0}",
    "talk": "talked with {0}",
}
_IRREGULAR = {"go": "went", "bring": "brought", "find": "found", "give": "gave", "take": "took",
              "leave": "left", "meet": "met", "see": "saw", "tell": "told", "hold": "held"}


def past_tense(verb: str) -> str:
    verb = verb.replace("_", " ")
    head, _, tail = verb.partition(" ")
    if head in _IRREGULAR:
        head = _IRREGULAR[head]
    elif head.endswith("e"):
        head += "d"
    elif head.endswith("y") and len(head) > 1 and head[-2] not in "aeiou":
        head = head[:-1] + "ied"
    else:
        head += "ed"
    return f"{head} {tail}".rstrip()


def action_phrase(action: ActionRecord) -> str:
    """Past-tense phrase keeping every argument ("moved towards the door")."""
    args = [a.replace("_", " ") for a in action.args]
    template = VERB_PHRASES.get(action.verb)
    if template is not None:
        slots = template.count("{")
        if len(args) >= slots:
            text = template.format(*args[:slots])
            return " ".join([text, *args[slots:]])
    return " ".join([past_tense(action.verb), *args])


def most_specific_action(ep: Episode) -> Optional[ActionRecord]:
    best = None
    for item in ep.what:
        if isinstance(item, ActionRecord) and (best is None or len(item.args) > len(best.args)):
            best = item
    return best


def clause(ep: Episode) -> str:
    action = most_specific_action(ep)
    if action is not None:
        return f"I {action_phrase(action)}"
    return f"I worked on {ep.label}"


def sequence_runs(episodes: list[Episode]) -> list[list[Episode]]:
    """Group start-ordered episodes into runs of mutually concurrent ones."""
    runs: list[list[Episode]] = []
    run_end = None
    for ep in episodes:
        if runs and ep.when.start < run_end:
            runs[-1].append(ep)
            run_end = max(run_end, ep.when.end)
        else:
            runs.append([ep])
            run_end = ep.when.end
    return runs


def narrate(store: Store, episode_id: int, now: Timestamp) -> str:
    """Children in start order joined by ", then "; concurrent ones by " while "."""
    ep = store.episode(episode_id)
    if not ep.closed:
        raise OpenEpisode(f"episode {episode_id} is open")
    children = sorted((store.episodes[c] for c in ep.children if c in store.episodes),
                      key=lambda c: (c.when.start, c.id))
    if not children:
        body = clause(ep)
    else:
        body = ", then ".join(" while ".join(clause(c) for c in run) for run in sequence_runs(children))
    return f"{body}, {describe_time(ep.when.end, now)}."
