"""Engine configuration and a small facade bundling working memory, store and map."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from epilog.errors import InvalidConfig
from epilog.evidence import EvidenceBundle, assemble
from epilog.query import Answer, eval_query, parse_query
from epilog.relevance import ConsolidationStats, RelevanceParams, consolidate, forget
from epilog.space import ArenaMap, default_map, load_map
from epilog.store import (
    Event,
    Store,
    Violation,
    WorkingMemory,
    canonical_json,
    ingest_event,
    validate,
    working_from_json,
    working_to_json,
)
from epilog import store as store_io

DATA_DIR_ENV = "EPILOG_DATA_DIR"


@dataclass(frozen=True)
class EngineConfig:
    params: RelevanceParams = field(default_factory=RelevanceParams)
    map_path: Optional[str] = None
    data_dir: str = "epilog-data"
    clock: str = "fixed"  # "fixed" or "wall"
    fixed_time: Optional[int] = None

    def __post_init__(self) -> None:
        if self.clock not in ("fixed", "wall"):
            raise InvalidConfig(f"clock must be 'fixed' or 'wall', got {self.clock!r}")

    def arena(self) -> ArenaMap:
        return load_map(self.map_path) if self.map_path else default_map()

    def now(self, fallback: Optional[int]) -> int:
        """Current time: wall clock, the fixed time, or the latest known event."""
        if self.clock == "wall":
            return int(time.time() * 1000)
        if self.fixed_time is not None:
            return self.fixed_time
        return fallback if fallback is not None else 0

    def to_json(self) -> dict:
        p = self.params
        return {"half_life": p.half_life, "w_h": p.w_h, "w_e": p.w_e, "forget_threshold": p.forget_threshold,
                "map": self.map_path, "data_dir": self.data_dir, "clock": self.clock,
                "fixed_time": self.fixed_time}

    @classmethod
    def from_json(cls, doc: dict, base: Optional[Path] = None) -> "EngineConfig":
        if not isinstance(doc, dict):
            raise InvalidConfig("an engine config must be a JSON object")
        try:
            params = RelevanceParams(
                half_life=float(doc.get("half_life", 3600.0)),
                w_h=float(doc.get("w_h", 0.5)),
                w_e=float(doc.get("w_e", 0.5)),
                forget_threshold=float(doc.get("forget_threshold", 0.05)),
            )
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        map_path = doc.get("map")
        if map_path and base is not None and not Path(map_path).is_absolute():
            map_path = str(base / map_path)
        fixed = doc.get("fixed_time")
        return cls(params, map_path, str(doc.get("data_dir", "epilog-data")), doc.get("clock", "fixed"),
                   int(fixed) if fixed is not None else None)

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "EngineConfig":
        if path is None:
            config = cls()
        else:
            path = Path(path)
            config = cls.from_json(json.loads(path.read_text(encoding="utf-8")), path.parent)
        override = os.environ.get(DATA_DIR_ENV)
        if override:
            config = EngineConfig(config.params, config.map_path, override, config.clock, config.fixed_time)
        return config


class Memory:
    """Working memory, long-term store and arena map used together."""

    STORE_FILE = "store.json"
    WORKING_FILE = "working.json"

    def __init__(self, arena: Optional[ArenaMap] = None, params: RelevanceParams = RelevanceParams()):
        self.arena = arena if arena is not None else default_map()
        self.params = params
        self.wm = WorkingMemory()
        self.store = Store()

    def ingest(self, events: Iterable[Event]) -> int:
        n = 0
        for event in events:
            ingest_event(self.wm, self.store, event)
            n += 1
        return n

    def consolidate(self, now: Optional[int] = None) -> ConsolidationStats:
        return consolidate(self.wm, self.store, self.arena, now)

    def forget(self, now: int) -> list[int]:
        return forget(self.store, now, self.params)

    def query(self, text: str, now: int) -> Answer:
        return eval_query(parse_query(text), self.store, now, self.params)

    def evidence(self, answer: Answer) -> EvidenceBundle:
        return assemble(self.store, answer, self.arena)

    def validate(self) -> list[Violation]:
        return validate(self.store)

    @property
    def last_time(self) -> Optional[int]:
        return self.wm.last_t

    # persistence of a data directory
    def save(self, data_dir: Union[str, Path]) -> None:
        data_dir = Path(data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        store_io.save(self.store, data_dir / self.STORE_FILE)
        (data_dir / self.WORKING_FILE).write_text(canonical_json(working_to_json(self.wm)), encoding="utf-8")

    @classmethod
    def open(cls, data_dir: Union[str, Path], arena: Optional[ArenaMap] = None,
             params: RelevanceParams = RelevanceParams()) -> "Memory":
        data_dir = Path(data_dir)
        memory = cls(arena, params)
        if (data_dir / cls.STORE_FILE).exists():
            memory.store = store_io.load(data_dir / cls.STORE_FILE)
        if (data_dir / cls.WORKING_FILE).exists():
            memory.wm = working_from_json(json.loads((data_dir / cls.WORKING_FILE).read_text(encoding="utf-8")))
        return memory

    @classmethod
    def exists(cls, data_dir: Union[str, Path]) -> bool:
        data_dir = Path(data_dir)
        return (data_dir / cls.STORE_FILE).exists() or (data_dir / cls.WORKING_FILE).exists()
