"""Historic and emotional relevance, consolidation and forgetting."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from epilog.errors import MissingEmotion, OpenEpisode
from epilog.model import MAX_INTENSITY, EmotionGroup, Episode, Kind, StateEntry, Timestamp, Entity
from epilog.space import ArenaMap, SemanticLocation, resolve_pose
from epilog.store import Store, WorkingMemory


@dataclass(frozen=True)
class RelevanceParams:
    half_life: float = 3600.0  # seconds
    w_h: float = 0.5
    w_e: float = 0.5
    forget_threshold: float = 0.05

    def __post_init__(self) -> None:
        if not self.half_life > 0:
            raise ValueError("half_life must be positive")
        for name in ("w_h", "w_e", "forget_threshold"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not math.isclose(self.w_h + self.w_e, 1.0, abs_tol=1e-9):
            raise ValueError("w_h + w_e must equal 1")


def historic_relevance(ep: Episode, now: Timestamp, p: RelevanceParams = RelevanceParams()) -> float:
    """``2 ** (-age / half_life)`` with age measured from the episode's end."""
    if ep.when.end is None:
        raise OpenEpisode(f"episode {ep.id} is open")
    age_s = max(now - ep.when.end, 0) / 1000.0
    return 2.0 ** (-age_s / p.half_life)


def emotional_relevance(ep: Episode) -> float:
    if not ep.emotions:
        raise MissingEmotion(f"episode {ep.id} has no emotion tag")
    return max(ep.emotions.values()) / MAX_INTENSITY


def relevance(ep: Episode, now: Timestamp, p: RelevanceParams = RelevanceParams()) -> float:
    return p.w_h * historic_relevance(ep, now, p) + p.w_e * emotional_relevance(ep)


def rank(store: Store, ids: Iterable[int], now: Timestamp, p: RelevanceParams = RelevanceParams()) -> list[int]:
    """Most relevant first; ties go to the later end, then the lower id."""
    eps = [store.episode(i) for i in ids]
    scored = [(-relevance(ep, now, p), -ep.when.end, ep.id) for ep in eps]
    return [key[2] for key in sorted(scored)]


# --- consolidation ------------------------------------------------------------------


@dataclass(frozen=True)
class ConsolidationStats:
    moved: int = 0  # root subtrees
    episodes: int = 0
    observations: int = 0

    def to_json(self) -> dict:
        return {"moved": self.moved, "episodes": self.episodes, "observations": self.observations}


def _subtree(episodes: dict[int, Episode], root: int) -> list[Episode]:
    """Episodes of the subtree in pre-order."""
    out, stack = [], [root]
    while stack:
        ep = episodes[stack.pop()]
        out.append(ep)
        stack.extend(reversed(ep.children))
    return out


def resolve_where(ep: Episode, poses: list[tuple[Timestamp, float, float]], times: list[Timestamp],
                  arena: ArenaMap) -> list[SemanticLocation]:
    """Distinct places visited during the episode, starting where the agent stood at its start."""
    lo = bisect.bisect_right(times, ep.when.start)
    hi = bisect.bisect_left(times, ep.when.end, lo=lo)
    samples = poses[max(lo - 1, 0):hi] if lo > 0 else poses[lo:hi]
    out: list[SemanticLocation] = []
    for _, x, y in samples:
        loc = resolve_pose(arena, x, y)
        if loc not in out:
            out.append(loc)
    return out


def roll_up_emotions(episodes: list[Episode], lookup: dict[int, Episode]) -> None:
    """Per-group max over each episode and its children, then the neutral default."""
    for ep in reversed(episodes):  # children before parents
        for child_id in ep.children:
            for group, level in lookup[child_id].emotions.items():
                if level > ep.emotions.get(group, -1):
                    ep.emotions[group] = level
    for ep in episodes:
        if not ep.emotions:
            ep.emotions[EmotionGroup.JOY_TRUST] = 0


def consolidate(wm: WorkingMemory, store: Store, arena: ArenaMap,
                now: Optional[Timestamp] = None) -> ConsolidationStats:
    """Move every closed root subtree (ending at or before ``now``) into the store."""
    ready = [r for r in wm.closed_roots if now is None or wm.episodes[r].when.end <= now]
    if not ready:
        return ConsolidationStats()
    times = [t for t, _, _ in wm.poses]
    moved: set[int] = set()
    for root in ready:
        subtree = _subtree(wm.episodes, root)
        for ep in subtree:
            ep.where = resolve_where(ep, wm.poses, times, arena)
        roll_up_emotions(subtree, wm.episodes)
        for ep in subtree:
            store.episodes[ep.id] = ep
            moved.add(ep.id)
        store.roots.append(root)

    applied, remaining = 0, []
    for obs in wm.pending:
        if obs.episode not in moved:
            remaining.append(obs)
            continue
        entity = store.entities.get(obs.entity)
        if entity is None:
            entity = store.entities[obs.entity] = Entity(obs.entity, obs.cls)
        t = obs.t if obs.t is not None else store.episodes[obs.episode].when.end
        for name, value in obs.fields.items():
            entity.record(StateEntry(t, name, value, obs.episode))
        applied += 1
    wm.pending = remaining
    for ep_id in moved:
        del wm.episodes[ep_id]
    wm.closed_roots = [r for r in wm.closed_roots if r not in moved]
    _trim_poses(wm)
    store.touch()
    return ConsolidationStats(len(ready), len(moved), applied)


def _trim_poses(wm: WorkingMemory) -> None:
    # keep the last pose before the oldest pending start: it locates that episode's start
    if wm.episodes:
        horizon = min(ep.when.start for ep in wm.episodes.values())
        times = [t for t, _, _ in wm.poses]
        cut = max(bisect.bisect_right(times, horizon) - 1, 0)
    else:
        cut = max(len(wm.poses) - 1, 0)
    del wm.poses[:cut]


# --- forgetting ---------------------------------------------------------------------


def forget(store: Store, now: Timestamp, p: RelevanceParams = RelevanceParams()) -> list[int]:
    """Prune non-Context episodes below the threshold that have no retained descendant.

    Entity state recorded by a pruned episode is re-attributed to its nearest
    retained ancestor.  Returns the pruned ids in ascending order.
    """
    pruned: set[int] = set()
    for root in store.roots:
        for ep in reversed(_subtree(store.episodes, root)):  # post-order
            if ep.kind is Kind.CONTEXT:
                continue
            if any(c not in pruned for c in ep.children):
                continue
            if relevance(ep, now, p) < p.forget_threshold:
                pruned.add(ep.id)
    if not pruned:
        return []

    def survivor(ep_id: int) -> int:
        while ep_id in pruned:
            ep_id = store.episodes[ep_id].parent
        return ep_id

    for entity in store.entities.values():
        entity.state_history = [
            e if e.source not in pruned else StateEntry(e.t, e.field, e.value, survivor(e.source))
            for e in entity.state_history
        ]
    for ep_id in pruned:
        parent = store.episodes[ep_id].parent
        if parent is not None and parent not in pruned:
            siblings = store.episodes[parent].children
            siblings[:] = [c for c in siblings if c not in pruned]
    for ep_id in pruned:
        del store.episodes[ep_id]
    store.touch()
    return sorted(pruned)
