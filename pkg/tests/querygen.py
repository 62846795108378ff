"""Random queries drawn from the vocabulary of a given store."""

from __future__ import annotations

import random

from epilog.model import EmotionGroup, Kind
from epilog.query.ast import (
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
    StateOf,
    When,
    WhereIs,
)


class QueryGen:
    def __init__(self, store, arena, rng: random.Random):
        self.store = store
        self.rng = rng
        eps = list(store.episodes.values())
        self.labels = sorted({ep.label for ep in eps})
        self.places = sorted({r.name for r in (*arena.rooms, *arena.furniture, *arena.named_areas)})
        self.entities = sorted(store.entities) + ["nobody"]
        self.times = sorted({t for ep in eps for t in (ep.when.start, ep.when.end)})
        self.ids = sorted(store.episodes)

    def time(self) -> int:
        return self.rng.choice(self.times) + self.rng.randint(-90_000, 90_000)

    def label_fragment(self) -> str:
        label = self.rng.choice(self.labels)
        words = label.split()
        i = self.rng.randrange(len(words))
        frag = " ".join(words[i: i + self.rng.randint(1, 3)])
        return frag.upper() if self.rng.random() < 0.2 else frag

    def cond(self):
        r, k = self.rng, self.rng.randrange(6)
        if k == 0:
            return KindIs(r.choice(list(Kind)))
        if k == 1:
            return LabelHas(self.label_fragment())
        if k == 2:
            return LocationIs(r.choice(self.places))
        if k == 3:
            return EntityIs(r.choice(self.entities))
        if k == 4:
            return EmotionAtLeast(r.choice(list(EmotionGroup)), r.randint(0, 3))
        a, b = sorted((self.time(), self.time()))
        if r.random() < 0.1:
            a, b = b, a
        return During(a, b)

    def conds(self, lo: int = 0):
        return tuple(self.cond() for _ in range(self.rng.randint(lo, 3)))

    def query(self):
        r, k = self.rng, self.rng.randrange(7)
        if k == 0:
            return FindEpisodes(self.conds(), r.choice(["time", "relevance"]), r.choice([None, 1, 3, 10]))
        if k == 1:
            return When(self.conds(1))
        if k == 2:
            return WhereIs(r.choice(self.entities), r.choice([None, self.time()]))
        if k == 3:
            field = r.choice([None, "location", "clothes", "age", "name", "color", "mood"])
            return StateOf(r.choice(self.entities), field, r.choice([None, self.time()]))
        if k == 4:
            return Feeling(self.conds())
        if k == 5:
            return Describe(Last(self.conds()))
        return Describe(r.choice(self.ids))
