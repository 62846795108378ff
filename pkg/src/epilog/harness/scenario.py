"""Seeded competition scenarios: scripted event logs plus ground-truth tables.

A scenario covers the tests of one competition only.  It opens with the
Memory Setup stage (the robot meets the people it will see later) and ends
with the EpLTM test.  The script records what it emits in plain tables
(episodes, entity state, poses with the place each pose was aimed at) so that
expected answers can be computed without going through the engine.

Episode ids are predicted from the engine's allocation contract: ids are
handed out sequentially from 1 in Begin order.
"""

from __future__ import annotations

import datetime as dt
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from epilog.errors import InvalidConfig
from epilog.model import CAPABILITIES, EmotionGroup, Kind, MediaRef, PARENT_KINDS
from epilog.space import INSIDE, OUTSIDE, ArenaMap, Rect, Region, SemanticLocation, default_map, load_map
from epilog.store import Act, Begin, Emotion, End, Event, Observe, Pose, Say

DEFAULT_TESTS = ("MemorySetup", "Stage1/SPR", "Stage1/GPSR", "Stage2/Restaurant", "Stage2/EpLTM")
_TEST_NAME = re.compile(r"^(MemorySetup|Stage(\d+)/([A-Za-z][A-Za-z0-9]*))$")

COMPETITION_START = int(dt.datetime(2019, 7, 15, tzinfo=dt.timezone.utc).timestamp() * 1000)
_HOUR = 3600 * 1000
_DAY = 24 * _HOUR

PEOPLE = (("john", "John"), ("mary", "Mary"), ("alex", "Alex"), ("sophie", "Sophie"),
          ("james", "James"), ("emma", "Emma"), ("lucas", "Lucas"), ("olivia", "Olivia"),
          ("noah", "Noah"), ("mia", "Mia"), ("peter", "Peter"), ("anna", "Anna"))
OBJECTS = (("apple", "red"), ("cup", "white"), ("book", "blue"), ("bottle", "green"),
           ("phone", "black"), ("keys", "silver"), ("remote", "grey"), ("bowl", "yellow"),
           ("glasses", "brown"), ("newspaper", "grey"), ("pillow", "pink"), ("towel", "orange"))
COLORS = ("red", "blue", "green", "black", "white", "yellow", "purple", "orange", "grey", "brown")
GARMENTS = ("shirt", "jacket", "sweater", "t-shirt", "hoodie", "coat", "vest")
OPERATOR = "operator"
OUTSIDE_POSE = (-1.0, 4.0)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    people: int = 3
    objects: int = 5
    tests: tuple[str, ...] = DEFAULT_TESTS
    map_path: Optional[str] = None
    emotion_event_rate: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tests", tuple(self.tests))

    def check(self) -> None:
        if self.people < 1 or self.objects < 1:
            raise InvalidConfig("people and objects counts must be at least 1")
        if self.people > len(PEOPLE) or self.objects > len(OBJECTS):
            raise InvalidConfig(f"at most {len(PEOPLE)} people and {len(OBJECTS)} objects are supported")
        if self.emotion_event_rate < 0:
            raise InvalidConfig("emotion_event_rate must be non-negative")
        if not self.tests or not self.tests[-1].endswith("/EpLTM"):
            raise InvalidConfig("the EpLTM test must come last")
        stages = []
        for i, name in enumerate(self.tests):
            m = _TEST_NAME.match(name)
            if m is None:
                raise InvalidConfig(f"bad test name {name!r}; use MemorySetup or Stage<N>/<Name>")
            if m.group(1) == "MemorySetup" and i != 0:
                raise InvalidConfig("MemorySetup must be the first test")
            stages.append(0 if m.group(1) == "MemorySetup" else int(m.group(2)))
        if stages != sorted(stages) or min(stages) < 0:
            raise InvalidConfig("tests must be listed in stage order")
        if len(set(self.tests)) != len(self.tests):
            raise InvalidConfig("duplicate test names")

    def arena(self) -> ArenaMap:
        return load_map(self.map_path) if self.map_path else default_map()

    def to_json(self) -> dict:
        return {"seed": self.seed, "people": self.people, "objects": self.objects, "tests": list(self.tests),
                "map": self.map_path, "emotion_event_rate": self.emotion_event_rate}

    @classmethod
    def from_json(cls, doc: dict, base: Optional[Path] = None) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise InvalidConfig("a scenario config must be a JSON object")
        try:
            map_path = doc.get("map")
            if map_path and base is not None and not Path(map_path).is_absolute():
                map_path = str(base / map_path)
            return cls(int(doc.get("seed", 0)), int(doc.get("people", 3)), int(doc.get("objects", 5)),
                       tuple(doc.get("tests", DEFAULT_TESTS)), map_path,
                       float(doc.get("emotion_event_rate", 1.0)))
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(str(exc)) from exc

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ScenarioConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from exc
        return cls.from_json(doc, path.parent)


# --- ground-truth tables ----------------------------------------------------------


@dataclass
class EpisodeRow:
    id: int
    kind: str
    label: str
    start: int
    parent: Optional[int]
    subtype: Optional[str] = None
    end: Optional[int] = None
    children: list[int] = field(default_factory=list)
    emotions: dict[str, int] = field(default_factory=dict)  # raw tags emitted into this episode
    actions: list[tuple[str, tuple[str, ...], str]] = field(default_factory=list)  # verb, args, phrase
    utterances: list[tuple[str, str]] = field(default_factory=list)
    media: list[str] = field(default_factory=list)
    content: int = 0

    def to_json(self) -> dict:
        return {"id": self.id, "kind": self.kind, "subtype": self.subtype, "label": self.label,
                "start": self.start, "end": self.end, "parent": self.parent, "children": self.children,
                "emotions": self.emotions,
                "actions": [{"verb": v, "args": list(a), "phrase": p} for v, a, p in self.actions],
                "utterances": [list(u) for u in self.utterances], "media": self.media}


@dataclass(frozen=True)
class StateRow:
    t: int
    entity: str
    field: str
    value: str
    episode: int


@dataclass(frozen=True)
class PoseRow:
    t: int
    x: float
    y: float
    place: SemanticLocation  # where the script aimed the pose


@dataclass(frozen=True)
class Placement:
    room: str
    furniture: str
    predicate: str
    rect: Rect

    @property
    def location(self) -> SemanticLocation:
        return SemanticLocation(INSIDE, self.room, None, (self.predicate, self.furniture))

    @property
    def text(self) -> str:
        return self.location.text


@dataclass
class Person:
    id: str
    name: str
    age: int
    color: str
    room: str
    garment: int = 0

    @property
    def clothes(self) -> str:
        return f"{self.color} {GARMENTS[self.garment % len(GARMENTS)]}"


@dataclass
class Thing:
    id: str
    color: str
    placement: Placement


@dataclass
class Scenario:
    config: ScenarioConfig
    people: list[Person]
    objects: list[Thing]
    events: list[Event]
    episodes: dict[int, EpisodeRow]
    state: list[StateRow]
    poses: list[PoseRow]
    end_time: int
    next_id: int
    robot: tuple[float, float, SemanticLocation]
    arena: ArenaMap = field(repr=False, default=None)

    def truth_json(self) -> dict:
        return {
            "people": [{"id": p.id, "name": p.name, "age": p.age, "color": p.color} for p in self.people],
            "objects": [{"id": o.id, "color": o.color} for o in self.objects],
            "episodes": [self.episodes[i].to_json() for i in sorted(self.episodes)],
            "state": [{"t": s.t, "entity": s.entity, "field": s.field, "value": s.value, "episode": s.episode}
                      for s in self.state],
            "poses": [{"t": p.t, "place": p.place.to_json()} for p in self.poses],
            "end_time": self.end_time,
        }


# --- geometry helpers for aiming poses and placing objects ----------------------------


def _approach_point(arena: ArenaMap, item: Region) -> tuple[float, float]:
    """A point 0.25 m from ``item`` that resolves to it and nothing else."""
    room = arena.room(item.room).rect
    r = item.rect
    cx, cy = r.centroid
    d = 0.25
    candidates = [(cx, r.y1 + d), (cx, r.y0 - d), (r.x0 - d, cy), (r.x1 + d, cy)]
    rcx, rcy = room.centroid
    candidates.sort(key=lambda p: (p[0] - rcx) ** 2 + (p[1] - rcy) ** 2)
    inner = room.inflate(-0.1)
    for x, y in candidates:
        if not inner.contains(x, y):
            continue
        others = [f for f in arena.furniture if f.name != item.name
                  and f.rect.distance(x, y) <= arena.furniture_inflation + 0.1]
        if not others:
            return (round(x, 2), round(y, 2))
    raise InvalidConfig(f"no clear approach point next to {item.name!r}")


def _free_point(arena: ArenaMap, region: Region, rng: random.Random) -> tuple[float, float]:
    """A point inside ``region`` well away from every piece of furniture."""
    r = region.rect
    for _ in range(500):
        x = round(rng.uniform(r.x0 + 0.4, r.x1 - 0.4), 2)
        y = round(rng.uniform(r.y0 + 0.4, r.y1 - 0.4), 2)
        if all(f.rect.distance(x, y) > arena.furniture_inflation + 0.2 for f in arena.furniture):
            return (x, y)
    raise InvalidConfig(f"no free standing point in {region.name!r}")


_PREDICATES = ("over", "under", "left_of", "right_of")


def _placement_rect(r: Rect, predicate: str) -> Rect:
    cx, cy = r.centroid
    if predicate == "over":
        return Rect(cx - 0.1, r.y1 + 0.05, cx + 0.1, r.y1 + 0.25)
    if predicate == "under":
        return Rect(cx - 0.1, r.y0 - 0.25, cx + 0.1, r.y0 - 0.05)
    if predicate == "left_of":
        return Rect(r.x0 - 0.25, cy - 0.1, r.x0 - 0.05, cy + 0.1)
    return Rect(r.x1 + 0.05, cy - 0.1, r.x1 + 0.25, cy + 0.1)


def placements(arena: ArenaMap) -> list[Placement]:
    out = []
    for item in arena.furniture:
        room = arena.room(item.room).rect
        for predicate in _PREDICATES:
            rect = _placement_rect(item.rect, predicate)
            if room.contains(rect.x0, rect.y0) and room.contains(rect.x1, rect.y1):
                out.append(Placement(item.room, item.name, predicate, rect))
    return out


def words(slug: str) -> str:
    return slug.replace("_", " ")


# --- the script ----------------------------------------------------------------------


class Script:
    """Emits events while mirroring them into ground-truth tables."""

    def __init__(self, arena: ArenaMap, rng: random.Random, t: int, next_id: int,
                 robot: tuple[float, float, SemanticLocation], emotion_rate: float = 0.0):
        self.arena = arena
        self.rng = rng
        self.t = t
        self.next_id = next_id
        self.robot = robot
        self.emotion_rate = emotion_rate
        self.events: list[Event] = []
        self.episodes: dict[int, EpisodeRow] = {}
        self.state: list[StateRow] = []
        self.poses: list[PoseRow] = []
        self.open: list[int] = []
        self.pending_emotions = 0
        self.approach = {f.name: _approach_point(arena, f) for f in arena.furniture}
        self.free_spots: dict[str, tuple[float, float]] = {}

    # time and raw emission
    def tick(self, lo: int = 2, hi: int = 25) -> None:
        self.t += self.rng.randint(lo, hi) * 1000

    def emit(self, payload) -> None:
        self.events.append(Event(self.t, payload))

    @property
    def innermost(self) -> EpisodeRow:
        return self.episodes[self.open[-1]]

    def begin(self, kind: Kind, label: str, subtype: Optional[str] = None) -> int:
        self.tick()
        if kind is Kind.CONTEXT:
            parent = None
        else:
            allowed = {k.value for k in PARENT_KINDS[kind]}
            parent = next(i for i in reversed(self.open) if self.episodes[i].kind in allowed)
        row = EpisodeRow(self.next_id, kind.value, label, self.t, parent, subtype)
        self.next_id += 1
        self.episodes[row.id] = row
        if parent is not None and parent in self.episodes:
            self.episodes[parent].children.append(row.id)
        self.open.append(row.id)
        self.emit(Begin(kind, label, subtype))
        return row.id

    def end(self, episode_id: int) -> None:
        self.tick()
        row = self.episodes[episode_id]
        innermost = self.open[-1] == episode_id
        row.end = self.t
        self.open.remove(episode_id)
        self.emit(End(None if innermost else row.label))

    def pose(self, x: float, y: float, place: SemanticLocation) -> None:
        self.tick(1, 4)
        self.robot = (x, y, place)
        self.poses.append(PoseRow(self.t, x, y, place))
        self.emit(Pose(x, y))

    def act(self, verb: str, args: tuple[str, ...], phrase: str) -> None:
        self.tick()
        row = self.innermost
        row.actions.append((verb, tuple(args), phrase))
        row.content += 1
        self.emit(Act(verb, tuple(args)))

    def say(self, speaker: str, text: str) -> None:
        self.tick()
        row = self.innermost
        row.utterances.append((speaker, text))
        row.content += 1
        self.emit(Say(speaker, text))

    def observe(self, entity: str, cls: str, fields: dict[str, str], media: Optional[str] = None) -> None:
        self.tick()
        row = self.innermost
        row.content += 1
        if media is not None:
            row.media.append(media)
        for name, value in fields.items():
            self.state.append(StateRow(self.t, entity, name, value, row.id))
        self.emit(Observe(entity, cls, dict(fields), MediaRef(media, "image") if media else None))

    def emotion(self, group: EmotionGroup, level: int) -> None:
        self.tick(1, 5)
        row = self.innermost
        if level > row.emotions.get(group.value, -1):
            row.emotions[group.value] = level
        self.emit(Emotion(group, level))

    def random_emotion(self) -> None:
        group = self.rng.choice(list(EmotionGroup))
        self.emotion(group, self.rng.choice((0, 1, 1, 2, 2, 3)))

    def emotion_hook(self) -> None:
        if self.pending_emotions > 0 and self.rng.random() < 0.5:
            self.pending_emotions -= 1
            self.random_emotion()

    # places
    def go_to_furniture(self, name: str) -> None:
        x, y = self.approach[name]
        item = self.arena.region(name)
        self.pose(x, y, SemanticLocation(INSIDE, item.room, item.name))

    def go_to_room(self, name: str) -> None:
        if name not in self.free_spots:
            self.free_spots[name] = _free_point(self.arena, self.arena.room(name), self.rng)
        x, y = self.free_spots[name]
        self.pose(x, y, SemanticLocation(INSIDE, name))

    def go_outside(self) -> None:
        self.pose(*OUTSIDE_POSE, SemanticLocation(OUTSIDE))

    # compound steps
    def task(self, label: str, verb: str, args: tuple[str, ...], phrase: str) -> int:
        task_id = self.begin(Kind.TASK, label)
        rate = self.emotion_rate
        self.pending_emotions = int(rate) + (1 if self.rng.random() < rate - int(rate) else 0)
        self.act(verb, args, phrase)
        return task_id

    def end_task(self, task_id: int) -> None:
        while self.pending_emotions > 0:  # flush into the task itself
            self.pending_emotions -= 1
            self.random_emotion()
        self.end(task_id)

    def navigate(self, label: str, target: str) -> None:
        """A navigation capability ending at a furniture item, room or named area."""
        cap = self.begin(Kind.CAPABILITY, label, "navigation")
        if target in self.approach:
            self.go_to_furniture(target)
        else:
            self.go_to_room(target)
        self.act("move", (target,), f"moved towards the {words(target)}")
        self.emotion_hook()
        self.end(cap)


# --- scenario generation ---------------------------------------------------------------


def _schedule(tests: tuple[str, ...]) -> list[int]:
    """Start time for each test: Memory Setup on the last setup day, stages on later days."""
    starts, per_stage, last = [], {}, COMPETITION_START
    for name in tests:
        m = _TEST_NAME.match(name)
        stage = 0 if m.group(1) == "MemorySetup" else int(m.group(2))
        k = per_stage.get(stage, 0)
        per_stage[stage] = k + 1
        if stage == 0:
            t = COMPETITION_START + 17 * _HOUR + k * 2 * _HOUR
        else:
            t = COMPETITION_START + stage * _DAY + 10 * _HOUR + k * 2 * _HOUR
        if name.endswith("/EpLTM"):
            t = max(t, COMPETITION_START + stage * _DAY + 15 * _HOUR + 40 * 60 * 1000 + 15 * 1000)
        t = max(t, last)
        starts.append(t)
        last = t
    return starts


def context_label(test: str) -> str:
    if test == "MemorySetup":
        return "RoboCup, Setup Days, Test: Memory Setup"
    stage, name = test.split("/")
    return f"RoboCup, Stage {stage[len('Stage'):]}, Test: {name}"


class _Builder:
    def __init__(self, cfg: ScenarioConfig, arena: ArenaMap):
        self.cfg = cfg
        self.arena = arena
        self.rng = random.Random(cfg.seed)
        rng = self.rng
        room_names = [r.name for r in arena.rooms] or [a.name for a in arena.named_areas]
        if not room_names:
            raise InvalidConfig("the map needs at least one room")
        colors = list(COLORS)
        rng.shuffle(colors)
        self.people = [Person(pid, name, rng.randint(20, 80), colors[i % len(colors)], rng.choice(room_names),
                              rng.randrange(len(GARMENTS)))
                       for i, (pid, name) in enumerate(PEOPLE[: cfg.people])]
        self.spots = placements(arena)
        if not self.spots:
            raise InvalidConfig("the map has no furniture to place objects on")
        self.objects = [Thing(oid, color, rng.choice(self.spots)) for oid, color in OBJECTS[: cfg.objects]]
        self.script = Script(arena, rng, COMPETITION_START, 1,
                             (*OUTSIDE_POSE, SemanticLocation(OUTSIDE)), cfg.emotion_event_rate)
        self.seen_objects: set[str] = set()

    # task templates
    def media(self, ctx: int, name: str) -> str:
        return f"media/ctx{ctx}/{name}.jpg"

    def greet_person(self, ctx: int, p: Person) -> None:
        s = self.script
        task = s.task(f"get to know {p.name}", "meet", (p.id,), f"met {p.id}")
        s.navigate(f"go to the {words(p.room)}", p.room)
        cap = s.begin(Kind.CAPABILITY, f"introduce myself to {p.name}", "hri")
        s.say(p.id, f"Hi, I am {p.name} and I am {p.age} years old.")
        s.act("greet", (p.id,), f"greeted {p.id}")
        s.emotion_hook()
        s.observe(p.id, "person", {"name": p.name, "age": str(p.age), "clothes": p.clothes,
                                   "location": words(p.room)}, self.media(ctx, p.id))
        s.end(cap)
        s.end_task(task)

    def find_person(self, ctx: int, p: Person) -> None:
        """Navigation and perception run concurrently (transposed capabilities)."""
        s = self.script
        task = s.task(f"find {p.name}", "search", (p.id,), f"searched for {p.id}")
        nav = s.begin(Kind.CAPABILITY, f"navigate to the {words(p.room)}", "navigation")
        s.go_to_room(p.room)
        s.act("move", (p.room,), f"moved towards the {words(p.room)}")
        look = s.begin(Kind.CAPABILITY, f"look for {p.name}", "perception")
        s.act("recognize", (p.id,), f"recognized {p.id}")
        s.emotion_hook()
        s.observe(p.id, "person", {"clothes": p.clothes, "location": words(p.room)}, self.media(ctx, p.id))
        if self.rng.random() < 0.5:
            s.end(nav)
            s.end(look)
        else:
            s.end(look)
            s.end(nav)
        s.end_task(task)

    def move_object(self, ctx: int, o: Thing, target: Placement) -> None:
        s = self.script
        here = o.placement
        task = s.task(f"bring the {o.id} to the {words(target.furniture)}", "bring", (o.id, target.furniture),
                      f"brought the {o.id} to the {words(target.furniture)}")
        s.navigate(f"go to the {words(here.furniture)}", here.furniture)
        cap = s.begin(Kind.CAPABILITY, f"spot the {o.id}", "perception")
        s.act("find", (o.id,), f"found the {o.id}")
        fields = {"location": here.text}
        if o.id not in self.seen_objects:
            fields["color"] = o.color
            self.seen_objects.add(o.id)
        s.observe(o.id, "object", fields, self.media(ctx, o.id))
        s.end(cap)
        cap = s.begin(Kind.CAPABILITY, f"pick up the {o.id}", "manipulation")
        s.act("grasp", (o.id,), f"grasped the {o.id}")
        s.emotion_hook()
        s.end(cap)
        s.navigate(f"carry the {o.id} to the {words(target.furniture)}", target.furniture)
        cap = s.begin(Kind.CAPABILITY, f"put down the {o.id}", "manipulation")
        s.act("place", (o.id, target.furniture), f"placed the {o.id} on the {words(target.furniture)}")
        o.placement = target
        s.observe(o.id, "object", {"location": target.text})
        s.end(cap)
        s.end_task(task)

    def answer_questions(self, ctx: int, p: Person) -> None:
        s = self.script
        task = s.task(f"answer the questions of {p.name}", "answer", (p.id,), f"answered the questions of {p.id}")
        cap = s.begin(Kind.CAPABILITY, f"turn to {p.name}", "perception")
        s.act("recognize", (p.id,), f"recognized {p.id}")
        s.observe(p.id, "person", {"clothes": p.clothes, "location": words(p.room)})
        s.end(cap)
        cap = s.begin(Kind.CAPABILITY, f"talk to {p.name}", "hri")
        s.say(p.id, "How many people are in the room?")
        s.say("robot", f"There are {len(self.people)} people I know here.")
        s.act("talk", (p.id,), f"talked with {p.id}")
        s.emotion_hook()
        s.end(cap)
        s.end_task(task)

    def serve(self, ctx: int, p: Person, o: Thing, target: Placement) -> None:
        s = self.script
        task = s.task(f"serve {p.name}", "serve", (p.id,), f"served {p.id}")
        bar = "bar" if self.arena.room("bar") is not None else p.room  # named area or plain room
        s.navigate(f"wait at the {words(bar)}", bar)
        cap = s.begin(Kind.CAPABILITY, f"take the order of {p.name}", "hri")
        s.say(p.id, f"I would like the {o.id}, please.")
        s.act("take_order", (p.id,), f"took the order of {p.id}")
        s.emotion_hook()
        s.end(cap)
        s.navigate(f"fetch the {o.id}", o.placement.furniture)
        cap = s.begin(Kind.CAPABILITY, f"grab the {o.id}", "manipulation")
        s.act("grasp", (o.id,), f"grasped the {o.id}")
        s.end(cap)
        s.navigate(f"return to {p.name}", target.furniture)
        cap = s.begin(Kind.CAPABILITY, f"hand over the {o.id}", "manipulation")
        s.act("deliver", (o.id, p.id), f"delivered the {o.id} to {p.id}")
        o.placement = target
        s.observe(o.id, "object", {"location": target.text})
        s.emotion_hook()
        s.end(cap)
        s.end_task(task)

    def assist_operator(self, ctx: int) -> None:
        s = self.script
        task = s.task("assist the operator", "assist", (OPERATOR,), "offered help to the operator")
        bed = "bed" if self.arena.region("bed") is not None else None
        if bed is not None:
            s.navigate("go to the bed", bed)
            room = self.arena.region(bed).room
        else:
            room = self.people[0].room
            s.navigate(f"go to the {words(room)}", room)
        cap = s.begin(Kind.CAPABILITY, "ask the operator", "hri")
        s.say("robot", "Do you need any assistance?")
        s.say(OPERATOR, "I am sick and cannot move, so I will ask you some questions.")
        s.act("talk", (OPERATOR,), f"talked with {OPERATOR}")
        s.observe(OPERATOR, "person", {"location": words(room)})
        s.emotion_hook()
        s.end(cap)
        s.end_task(task)

    def other_spot(self, o: Thing) -> Placement:
        choices = [sp for sp in self.spots if sp.furniture != o.placement.furniture]
        return self.rng.choice(choices or self.spots)

    def run_test(self, test: str, start: int) -> None:
        s, rng = self.script, self.rng
        s.t = max(s.t, start)
        ctx = s.begin(Kind.CONTEXT, context_label(test))
        s.go_outside()
        s.act("enter", ("arena",), "entered the arena")
        name = test.split("/")[-1]
        if test == "MemorySetup":
            for p in self.people:
                self.greet_person(ctx, p)
        elif name == "SPR":
            self.answer_questions(ctx, rng.choice(self.people))
            self.find_person(ctx, rng.choice(self.people))
        elif name == "Restaurant":
            for _ in range(2):
                o = rng.choice(self.objects)
                self.serve(ctx, rng.choice(self.people), o, self.other_spot(o))
        elif name == "EpLTM":
            self.assist_operator(ctx)
        else:
            for _ in range(2):
                o = rng.choice(self.objects)
                self.move_object(ctx, o, self.other_spot(o))
            self.find_person(ctx, rng.choice(self.people))
        if name != "EpLTM":
            s.go_outside()
            s.act("leave", ("arena",), "left the arena")
        s.end(ctx)
        for p in self.people:  # similar clothes, different garment, next time
            p.garment += 1


def generate_scenario(cfg: ScenarioConfig) -> Scenario:
    cfg.check()
    arena = cfg.arena()
    b = _Builder(cfg, arena)
    for test, start in zip(cfg.tests, _schedule(cfg.tests)):
        b.run_test(test, start)
    s = b.script
    return Scenario(cfg, b.people, b.objects, s.events, s.episodes, s.state, s.poses, s.t, s.next_id,
                    s.robot, arena)
