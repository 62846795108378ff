from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from epilog.harness import ScenarioConfig, generate_scenario  # noqa: E402
from epilog.model import EmotionGroup, Kind  # noqa: E402
from epilog.relevance import consolidate  # noqa: E402
from epilog.space import default_map  # noqa: E402
from epilog.store import Act, Begin, Emotion, End, Event, Observe, Pose, Say, Store, WorkingMemory, ingest  # noqa: E402

T0 = 1_563_200_000_000  # mid-July 2019, in milliseconds


def build(events, arena=None, now=None):
    """Ingest and consolidate; returns (working memory, store)."""
    wm, store = WorkingMemory(), Store()
    ingest(wm, store, events)
    consolidate(wm, store, arena or default_map(), now)
    return wm, store


def random_config(seed: int) -> ScenarioConfig:
    r = random.Random(seed)
    return ScenarioConfig(seed=seed, people=r.randint(1, 6), objects=r.randint(1, 8),
                          emotion_event_rate=r.choice([0.5, 1.0, 1.5, 2.5]))


def scenario_store(seed: int, cfg: ScenarioConfig = None):
    s = generate_scenario(cfg or random_config(seed))
    _, store = build(s.events, s.arena)
    return s, store


def simple_task_events(t: int = T0) -> list[Event]:
    """One context with a task: navigate to the door, then search for john."""
    s = 1000
    return [
        Event(t, Begin(Kind.CONTEXT, "RoboCup, Stage 2, Test: EpLTM")),
        Event(t, Pose(3.0, 3.5)),
        Event(t + 1 * s, Begin(Kind.TASK, "find john")),
        Event(t + 2 * s, Begin(Kind.CAPABILITY, "go to the door", "navigation")),
        Event(t + 3 * s, Act("move", ("door",))),
        Event(t + 4 * s, Pose(0.6, 1.5)),
        Event(t + 5 * s, End()),
        Event(t + 6 * s, Begin(Kind.CAPABILITY, "look around", "perception")),
        Event(t + 7 * s, Act("search", ("john",))),
        Event(t + 8 * s, Observe("john", "person", {"location": "kitchen"})),
        Event(t + 8 * s, Emotion(EmotionGroup.JOY_TRUST, 2)),
        Event(t + 9 * s, End()),
        Event(t + 10 * s, Say("john", "Hello robot")),
        Event(t + 11 * s, End()),
        Event(t + 12 * s, End()),
    ]


@pytest.fixture
def arena():
    return default_map()


@pytest.fixture(scope="session")
def seed0():
    return generate_scenario(ScenarioConfig())


# --- acceptance summary: one PASS/FAIL line per criterion ----------------------------

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_ac" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[name] = (report.outcome, report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[1][2:])):
        outcome, _ = _ACCEPTANCE[name]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        number = name.split("_")[1][2:]
        title = name.split("_", 2)[2].replace("_", " ")
        terminalreporter.write_line(f"AC{number} {verdict}: {title}")
