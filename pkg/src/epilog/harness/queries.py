"""Operator questions for the EpLTM test, with expected answers.

Items are laid out round-robin over the three categories (Cat1, Cat2, Cat3,
Cat1, ...), one per time slot after the scenario ends.  Cat2 and Cat3 items
carry fresh events that simulate the robot investigating an object or talking
to a person right before it answers.

Each item's expected answer must not depend on which other items were run
before it.  Two rules make that hold: every (entity, field) pair that an item
observes or asks about at the current time belongs to that item alone, and
Cat1 items only target labels and emotion levels that fresh events never
produce.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from epilog.errors import InsufficientScenario
from epilog.harness import truth
from epilog.harness.scenario import (
    GARMENTS,
    EpisodeRow,
    Placement,
    Scenario,
    Script,
    StateRow,
    placements,
    words,
)
from epilog.model import EmotionGroup, Kind
from epilog.query.ast import (
    Describe,
    EmotionAtLeast,
    Feeling,
    FindEpisodes,
    KindIs,
    LabelHas,
    Last,
    StateOf,
    When,
    WhereIs,
    to_dsl,
)
from epilog.store import Event, event_from_json, event_to_json

CATEGORIES = ("Cat1", "Cat2", "Cat3")
SLOT = 10 * 60 * 1000
ASK_OFFSET = 9 * 60 * 1000


@dataclass
class QueryItem:
    category: str
    dsl: str
    truth: dict
    asked_at: int
    fresh: list[Event] = field(default_factory=list)
    slot: int = 0

    def to_json(self) -> dict:
        return {"category": self.category, "dsl": self.dsl, "truth": self.truth, "asked_at": self.asked_at,
                "slot": self.slot, "fresh": [event_to_json(e) for e in self.fresh]}

    @classmethod
    def from_json(cls, doc: dict) -> "QueryItem":
        return cls(doc["category"], doc["dsl"], doc["truth"], int(doc["asked_at"]),
                   [event_from_json(e) for e in doc.get("fresh", [])], int(doc.get("slot", 0)))


def subtest_label(slot: int) -> str:
    return f"RoboCup, Stage 2, Test: EpLTM, Subtest: Query {slot + 1}"


class _Planner:
    def __init__(self, s: Scenario):
        self.s = s
        self.rng = random.Random(s.config.seed * 7919 + 17)
        self.claimed: set[tuple[str, str]] = set()
        self.fresh_labels: list[str] = []
        self.robot = s.robot
        self.next_id = s.next_id
        self.where = {o.id: o.placement for o in s.objects}
        self.spots = placements(s.arena)

    def slot_start(self, slot: int) -> int:
        return self.s.end_time + (slot + 1) * SLOT

    def free(self, *pairs: tuple[str, str]) -> bool:
        return not any(p in self.claimed for p in pairs)

    def script(self, slot: int) -> Script:
        sc = Script(self.s.arena, self.rng, self.slot_start(slot), self.next_id, self.robot)
        sc.begin(Kind.CONTEXT, subtest_label(slot))
        return sc

    def finish(self, sc: Script, slot: int) -> tuple[list[Event], list[StateRow]]:
        sc.end(sc.open[0])
        if sc.t >= self.slot_start(slot) + ASK_OFFSET:
            raise InsufficientScenario(f"fresh events of slot {slot} overrun the question time")
        self.robot = sc.robot
        self.next_id = sc.next_id
        self.fresh_labels.extend(r.label for r in sc.episodes.values())
        return sc.events, sc.state

    def asked_at(self, slot: int) -> int:
        return self.slot_start(slot) + ASK_OFFSET

    # --- Cat2: objects --------------------------------------------------------------

    def investigate(self, sc: Script, o_id: str, spot: Placement, fields: dict[str, str]) -> None:
        task = sc.task(f"look for the {o_id}", "search", (o_id,), f"searched for {o_id}")
        sc.navigate(f"go to the {words(spot.furniture)}", spot.furniture)
        cap = sc.begin(Kind.CAPABILITY, f"inspect the {o_id}", "perception")
        sc.act("inspect", (o_id,), f"inspected the {o_id}")
        if fields:
            sc.observe(o_id, "object", fields)
        sc.end(cap)
        sc.end_task(task)

    def cat2(self, slot: int, k: int) -> QueryItem:
        objects = list(self.s.objects)
        self.rng.shuffle(objects)
        at = self.asked_at(slot)
        for template in range(3):
            kind = (k + template) % 3
            for o in objects:
                if kind == 0 and self.free((o.id, "location")):
                    # someone moved the object; the robot finds it in its new place
                    moved = [p for p in self.spots if p.furniture != self.where[o.id].furniture] or self.spots
                    spot = self.rng.choice(moved)
                    sc = self.script(slot)
                    self.investigate(sc, o.id, spot, {"location": spot.text})
                    events, rows = self.finish(sc, slot)
                    self.claimed.add((o.id, "location"))
                    self.where[o.id] = spot
                    q = WhereIs(o.id)
                    value = truth.value_at([*self.s.state, *rows], o.id, "location", at)
                    return QueryItem("Cat2", to_dsl(q), {"entity": o.id, "location": value}, at, events, slot)
                if kind == 1 and self.free((o.id, "color")):
                    known = truth.value_at(self.s.state, o.id, "color", self.s.end_time) is not None
                    sc = self.script(slot)
                    self.investigate(sc, o.id, self.where[o.id], {} if known else {"color": o.color})
                    events, rows = self.finish(sc, slot)
                    self.claimed.add((o.id, "color"))
                    q = StateOf(o.id, "color")
                    value = truth.value_at([*self.s.state, *rows], o.id, "color", at)
                    return QueryItem("Cat2", to_dsl(q), {"entity": o.id, "values": {"color": value}}, at,
                                     events, slot)
                history = [r for r in self.s.state if r.entity == o.id and r.field == "location"]
                if kind == 2 and len(history) >= 2:
                    # a past whereabouts: midway between two recorded placements
                    i = self.rng.randrange(len(history) - 1)
                    t = (history[i].t + history[i + 1].t) // 2
                    if t <= history[i].t:
                        continue
                    sc = self.script(slot)
                    self.investigate(sc, o.id, self.where[o.id], {})
                    events, _ = self.finish(sc, slot)
                    q = WhereIs(o.id, t)
                    value = truth.value_at(self.s.state, o.id, "location", t)
                    return QueryItem("Cat2", to_dsl(q), {"entity": o.id, "location": value}, at, events, slot)
        raise InsufficientScenario("not enough objects for the requested Cat2 questions")

    # --- Cat3: people ----------------------------------------------------------------

    def cat3(self, slot: int, k: int) -> QueryItem:
        people = list(self.s.people)
        self.rng.shuffle(people)
        at = self.asked_at(slot)
        order = ("location", "clothes", "age", "name")
        for template in range(len(order)):
            name = order[(k + template) % len(order)]
            for p in people:
                if not self.free((p.id, name)):
                    continue
                known = truth.value_at(self.s.state, p.id, name, self.s.end_time)
                if name in ("age", "name") and known is None:
                    continue
                sc = self.script(slot)
                task = sc.task(f"talk to {p.name}", "talk", (p.id,), f"talked with {p.id}")
                if name == "location":
                    rooms = [r.name for r in self.s.arena.rooms if words(r.name) != known] or [p.room]
                    room = self.rng.choice(rooms)
                    sc.navigate(f"go to the {words(room)}", room)
                    cap = sc.begin(Kind.CAPABILITY, f"spot {p.name}", "perception")
                    sc.act("recognize", (p.id,), f"recognized {p.id}")
                    sc.observe(p.id, "person", {"location": words(room)})
                    sc.end(cap)
                elif name == "clothes":
                    cap = sc.begin(Kind.CAPABILITY, f"look at {p.name}", "perception")
                    sc.act("recognize", (p.id,), f"recognized {p.id}")
                    garment = GARMENTS[(p.garment + 1 + self.rng.randrange(len(GARMENTS) - 1)) % len(GARMENTS)]
                    sc.observe(p.id, "person", {"clothes": f"{p.color} {garment}"})
                    sc.end(cap)
                else:
                    cap = sc.begin(Kind.CAPABILITY, f"chat with {p.name}", "hri")
                    question = "how old I am" if name == "age" else "what my name is"
                    sc.say(p.id, f"Hello robot, do you remember {question}?")
                    sc.act("listen", (p.id,), f"listened to {p.id}")
                    sc.end(cap)
                sc.end_task(task)
                events, rows = self.finish(sc, slot)
                self.claimed.add((p.id, name))
                value = truth.value_at([*self.s.state, *rows], p.id, name, at)
                if name == "location":
                    q = WhereIs(p.id)
                    payload = {"entity": p.id, "location": value}
                else:
                    q = StateOf(p.id, name)
                    payload = {"entity": p.id, "values": {name: value}}
                return QueryItem("Cat3", to_dsl(q), payload, at, events, slot)
        raise InsufficientScenario("not enough people for the requested Cat3 questions")

    # --- Cat1: memories and emotions ---------------------------------------------------

    def safe(self, label: str) -> bool:
        needle = label.lower()
        return not any(needle in fresh.lower() for fresh in self.fresh_labels)

    def cat1_pool(self) -> list[tuple]:
        rows = self.s.episodes
        tasks = sorted({r.label for r in rows.values() if r.kind == "task" and self.safe(r.label)})
        contexts = sorted({r.label for r in rows.values() if r.kind == "context"
                           and "EpLTM" not in r.label and self.safe(r.label)})
        levels = sorted({(g, lv) for r in rows.values() for g, lv in truth.rolled_emotions(rows, r.id).items()
                         if lv >= 1})
        return [tasks, contexts, levels]

    def cat1(self, slot: int, k: int, used: set[str]) -> QueryItem:
        rows: dict[int, EpisodeRow] = self.s.episodes
        tasks, contexts, levels = self.cat1_pool()
        at = self.asked_at(slot)
        for template in range(5):
            kind = (k + template) % 5
            options: list = {0: tasks, 1: levels, 2: tasks, 3: tasks, 4: contexts}[kind]
            options = list(options)
            self.rng.shuffle(options)
            for choice in options:
                if kind == 1:
                    group, level = choice
                    q = FindEpisodes((EmotionAtLeast(EmotionGroup(group), level),), "time")
                    ids = truth.select(rows, emotion=(group, level))
                    payload = {"episodes": ids}
                elif kind == 4:
                    q = Feeling((KindIs(Kind.CONTEXT), LabelHas(choice)))
                    payload = truth.feeling(rows, truth.select(rows, "context", choice))
                else:
                    conds = (KindIs(Kind.TASK), LabelHas(choice))
                    ids = truth.select(rows, "task", choice)
                    if kind == 0:
                        q, payload = Feeling(conds), truth.feeling(rows, ids)
                    elif kind == 2:
                        q, payload = Describe(Last(conds)), truth.describe_last(rows, ids, at)
                    else:
                        q, payload = When(conds), truth.intervals(rows, ids)
                dsl = to_dsl(q)
                if dsl not in used:
                    used.add(dsl)
                    return QueryItem("Cat1", dsl, payload, at, [], slot)
        raise InsufficientScenario("not enough recorded episodes for the requested Cat1 questions")


def generate_queries(s: Scenario, n_per_cat: int = 4) -> list[QueryItem]:
    """``3 * n_per_cat`` items, round-robin over Cat1, Cat2, Cat3."""
    if n_per_cat < 1:
        raise InsufficientScenario("n_per_cat must be at least 1")
    if not any(r.emotions for r in s.episodes.values()):
        raise InsufficientScenario("the scenario has no emotion events to ask about")
    planner = _Planner(s)
    items: list[Optional[QueryItem]] = [None] * (3 * n_per_cat)
    for k in range(n_per_cat):  # fresh events first, so Cat1 can avoid their labels
        items[3 * k + 1] = planner.cat2(3 * k + 1, k)
        items[3 * k + 2] = planner.cat3(3 * k + 2, k)
    used: set[str] = set()
    for k in range(n_per_cat):
        items[3 * k] = planner.cat1(3 * k, k, used)
    return [item for item in items if item is not None]


def default_session(items: list[QueryItem]) -> list[int]:
    """Indexes of the 4-question session: first of each category plus the second Cat1."""
    by_cat: dict[str, list[int]] = {c: [] for c in CATEGORIES}
    for i, item in enumerate(items):
        by_cat[item.category].append(i)
    chosen = [lst[0] for lst in by_cat.values() if lst]
    extra = by_cat["Cat1"][1:2] or [i for i in range(len(items)) if i not in chosen][:1]
    return sorted(set(chosen + extra))
