import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import T0, build, simple_task_events
from epilog.errors import MissingEmotion, OpenEpisode
from epilog.model import EmotionGroup, Episode, Kind, StateEntry, TimeInterval
from epilog.relevance import (
    RelevanceParams,
    emotional_relevance,
    forget,
    historic_relevance,
    rank,
    relevance,
)
from epilog.store import Act, Begin, Emotion, End, Event, validate


def ep(end, levels=None, start=0, id=1):
    return Episode(id, Kind.TASK, "t", TimeInterval(start, end),
                   emotions=levels if levels is not None else {EmotionGroup.JOY_TRUST: 0})


@pytest.mark.parametrize("kwargs", [
    {"half_life": 0}, {"w_h": 0.7, "w_e": 0.7}, {"forget_threshold": 1.5}, {"w_h": -0.1, "w_e": 1.1},
])
def test_params_are_validated(kwargs):
    with pytest.raises(ValueError):
        RelevanceParams(**kwargs)


def test_historic_relevance_anchors():
    p = RelevanceParams(half_life=10.0)
    assert historic_relevance(ep(1000), 1000, p) == 1.0
    assert historic_relevance(ep(1000), 11_000, p) == pytest.approx(0.5, abs=1e-12)
    assert historic_relevance(ep(1000), 21_000, p) == pytest.approx(0.25, abs=1e-12)


def test_open_or_untagged_episodes_are_refused():
    with pytest.raises(OpenEpisode):
        historic_relevance(Episode(1, Kind.TASK, "t", TimeInterval(0)), 10)
    with pytest.raises(MissingEmotion):
        emotional_relevance(ep(10, {}))


@given(st.integers(0, 3), st.integers(0, 3))
def test_emotional_relevance_uses_the_strongest_tag(a, b):
    e = ep(0, {EmotionGroup.SADNESS_FEAR: a, EmotionGroup.ANGER_DISGUST: b})
    assert emotional_relevance(e) == max(a, b) / 3


@given(st.integers(0, 10**9), st.integers(1, 10**9), st.integers(0, 3))
def test_relevance_decreases_with_age(age, extra, level):
    p = RelevanceParams()
    now = 2 * 10**9
    young = ep(now - age, {EmotionGroup.JOY_TRUST: level})
    old = ep(now - age - extra, {EmotionGroup.JOY_TRUST: level})
    assert relevance(young, now, p) >= relevance(old, now, p)


@given(st.integers(0, 10**8), st.integers(0, 2))
def test_stronger_emotion_is_more_relevant_at_equal_age(age, level):
    now = 10**9
    weak = ep(now - age, {EmotionGroup.JOY_TRUST: level})
    strong = ep(now - age, {EmotionGroup.JOY_TRUST: level + 1})
    assert relevance(strong, now) > relevance(weak, now)


def test_rank_breaks_ties_by_end_then_id():
    from epilog.store import Store

    store = Store()
    for i, end in ((1, 100), (2, 100), (3, 50)):
        store.episodes[i] = ep(end, id=i)
    # 1 and 2 tie on relevance and end, so the lower id wins; 3 ended earlier
    assert rank(store, [3, 2, 1], 100) == [1, 2, 3]


def _memory_with_emotions():
    s = 1000
    events = [
        Event(T0, Begin(Kind.CONTEXT, "ctx")),
        Event(T0 + s, Begin(Kind.TASK, "calm task")), Event(T0 + 2 * s, Act("wave")), Event(T0 + 3 * s, End()),
        Event(T0 + 4 * s, Begin(Kind.TASK, "scary task")), Event(T0 + 5 * s, Act("run")),
        Event(T0 + 6 * s, Emotion(EmotionGroup.SADNESS_FEAR, 3)), Event(T0 + 7 * s, End()),
        Event(T0 + 8 * s, End()),
    ]
    return build(events)[1]


def test_roll_up_reaches_the_context():
    store = _memory_with_emotions()
    assert store.episodes[1].emotions == {EmotionGroup.SADNESS_FEAR: 3}
    assert store.episodes[2].emotions == {EmotionGroup.JOY_TRUST: 0}


def test_forget_keeps_emotional_episodes_and_contexts():
    store = _memory_with_emotions()
    p = RelevanceParams(half_life=1.0, forget_threshold=0.3)
    pruned = forget(store, T0 + 10**7, p)
    assert pruned == [2]
    assert set(store.episodes) == {1, 3}
    assert store.episodes[1].children == [3]
    assert validate(store) == []
    assert forget(store, T0 + 10**7, p) == []


def test_forget_keeps_a_weak_parent_of_a_strong_child():
    _, store = build(simple_task_events())
    store.episodes[4].emotions = {EmotionGroup.ANGER_DISGUST: 3}
    store.episodes[2].emotions = {EmotionGroup.JOY_TRUST: 0}
    pruned = forget(store, T0 + 10**8, RelevanceParams(half_life=1.0, forget_threshold=0.4))
    assert pruned == [3]
    assert 2 in store.episodes and 4 in store.episodes


def test_forget_repoints_entity_state_to_the_surviving_ancestor():
    _, store = build(simple_task_events())
    for e in store.episodes.values():
        e.emotions = {EmotionGroup.JOY_TRUST: 0}
    forget(store, T0 + 10**9, RelevanceParams(half_life=1.0, forget_threshold=0.4))
    assert set(store.episodes) == {1}
    assert [e.source for e in store.entities["john"].state_history] == [1]
    assert validate(store) == []


def test_forget_threshold_zero_prunes_nothing():
    store = _memory_with_emotions()
    assert forget(store, T0 + 10**12, RelevanceParams(forget_threshold=0.0)) == []


def test_relevance_is_stable_for_far_future_now():
    p = RelevanceParams(half_life=1.0)
    assert historic_relevance(ep(0), 10**15, p) == 0.0
    assert math.isclose(relevance(ep(0, {EmotionGroup.JOY_TRUST: 3}), 10**15, p), 0.5)
