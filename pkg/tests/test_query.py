import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T0, build, scenario_store, simple_task_events
from epilog.errors import FutureTimestamp, OpenEpisode, QuerySyntaxError, UnknownEntity, UnknownEpisode
from epilog.model import EmotionGroup, Kind
from epilog.query import describe_time, eval_query, narrate, parse_query, to_dsl
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
from epilog.query.narrate import action_phrase, past_tense
from epilog.model import ActionRecord
from epilog.store import Act, Begin, End, Event, Observe
from querygen import QueryGen

# --- parsing -----------------------------------------------------------------------


def test_grammar_examples():
    assert parse_query("WHERE-IS apple") == WhereIs("apple")
    assert parse_query(
        "FIND EPISODES WHERE KIND=task AND EMOTION=sadness_fear>=2 ORDER BY RELEVANCE LIMIT 3"
    ) == FindEpisodes((KindIs(Kind.TASK), EmotionAtLeast(EmotionGroup.SADNESS_FEAR, 2)), "relevance", 3)
    assert parse_query('when label~"find" and during [1, 5]') == When((LabelHas("find"), During(1, 5)))
    assert parse_query("STATE OF john FIELD clothes AT 12") == StateOf("john", "clothes", 12)
    assert parse_query("feeling") == Feeling()
    assert parse_query("DESCRIBE 7") == Describe(7)
    assert parse_query("DESCRIBE LAST WHERE LOCATION=kitchen AND ENTITY=john") == Describe(
        Last((LocationIs("kitchen"), EntityIs("john"))))
    assert parse_query("FEELING WHERE EMOTION=joy_trust") == Feeling((EmotionAtLeast(EmotionGroup.JOY_TRUST, 1),))


def test_dangling_equals_reports_its_position():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("WHEN KIND=")
    assert err.value.position == 9
    assert err.value.expected == {"context", "task", "capability"}
    assert err.value.code == "SyntaxError"


@pytest.mark.parametrize("text, position", [
    ("", 0),
    ("FIND EPISODES LIMIT x", 20),
    ("WHERE-IS", 0),
    ("WHEN KIND=robot", 10),
    ("FEELING WHERE EMOTION=joy_trust>=", 31),
    ("DESCRIBE FIRST", 9),
    ("WHERE-IS apple extra", 15),
    ('WHEN LABEL~"open', 11),
    ("WHEN DURING [1 2]", 15),
])
def test_syntax_errors_point_at_the_first_bad_token(text, position):
    with pytest.raises(QuerySyntaxError) as err:
        parse_query(text)
    assert err.value.position == position


@st.composite
def queries(draw):
    groups = st.sampled_from(list(EmotionGroup))
    ident = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True).filter(
        lambda w: w.upper() not in {"AT", "FIELD", "AND", "ORDER", "LIMIT", "WHERE"})
    cond = st.one_of(
        st.builds(KindIs, st.sampled_from(list(Kind))),
        st.builds(LabelHas, st.text(min_size=0, max_size=12)),
        st.builds(LocationIs, ident),
        st.builds(EntityIs, ident),
        st.builds(EmotionAtLeast, groups, st.integers(0, 3)),
        st.builds(During, st.integers(0, 10**13), st.integers(0, 10**13)),
    )
    conds = st.lists(cond, max_size=3).map(tuple)
    maybe_t = st.one_of(st.none(), st.integers(0, 10**13))
    return draw(st.one_of(
        st.builds(FindEpisodes, conds, st.sampled_from(["time", "relevance"]), st.one_of(st.none(), st.integers(0, 99))),
        st.builds(When, st.lists(cond, min_size=1, max_size=3).map(tuple)),
        st.builds(WhereIs, ident, maybe_t),
        st.builds(StateOf, ident, st.one_of(st.none(), ident), maybe_t),
        st.builds(Feeling, conds),
        st.builds(Describe, st.one_of(st.integers(0, 10**6), st.builds(Last, conds))),
    ))


@settings(max_examples=400)
@given(queries())
def test_parse_print_identity(q):
    assert parse_query(to_dsl(q)) == q


# --- evaluation --------------------------------------------------------------------


@pytest.fixture
def small():
    _, store = build(simple_task_events())
    return store


def test_where_is_returns_last_write_with_provenance(small):
    a = eval_query(WhereIs("john"), small, T0 + 60_000)
    assert a.payload == {"entity": "john", "location": "kitchen"}
    assert a.supporting_ids == [4]
    assert eval_query(WhereIs("john", T0), small, T0 + 60_000).payload["location"] is None


def test_where_is_never_uses_later_state():
    s = 1000
    events = [Event(T0, Begin(Kind.CONTEXT, "c")),
              Event(T0 + s, Observe("john", "person", {"location": "kitchen"})),
              Event(T0 + 5 * s, Observe("john", "person", {"location": "bedroom"})),
              Event(T0 + 9 * s, End())]
    _, store = build(events)
    assert eval_query(WhereIs("john", T0 + 4 * s), store, T0 + 10 * s).payload["location"] == "kitchen"
    assert eval_query(WhereIs("john", T0 + 5 * s), store, T0 + 10 * s).payload["location"] == "bedroom"
    assert eval_query(WhereIs("john"), store, T0 + 10 * s).payload["location"] == "bedroom"


def test_state_of_all_fields(small):
    a = eval_query(StateOf("john"), small, T0 + 60_000)
    assert a.payload == {"entity": "john", "values": {"location": "kitchen"}}


def test_unknown_entity_and_episode(small):
    with pytest.raises(UnknownEntity):
        eval_query(WhereIs("ghost"), small, T0)
    with pytest.raises(UnknownEpisode):
        eval_query(Describe(99), small, T0)


def test_feeling_max_tag_phrase(small):
    a = eval_query(parse_query('FEELING WHERE LABEL~"find"'), small, T0 + 60_000)
    assert a.payload == {"emotions": [{"group": "joy_trust", "intensity": 2, "phrase": "happy"}],
                         "summary": "happy"}
    assert a.supporting_ids == [2]


def test_empty_result_is_an_answer(small):
    a = eval_query(parse_query('FIND EPISODES WHERE LABEL~"nonexistent"'), small, T0)
    assert a.payload == {"episodes": []} and a.empty


def test_find_filters_and_orders(small):
    assert eval_query(parse_query("FIND EPISODES WHERE KIND=capability"), small, T0).payload == {"episodes": [3, 4]}
    assert eval_query(parse_query("FIND EPISODES WHERE LOCATION=fridge"), small, T0).payload == {
        "episodes": [1, 2, 3, 4]}
    assert eval_query(parse_query("FIND EPISODES WHERE ENTITY=door"), small, T0).payload == {"episodes": [3]}
    ranked = eval_query(parse_query("FIND EPISODES ORDER BY RELEVANCE LIMIT 2"), small, T0 + 20_000)
    assert ranked.payload == {"episodes": [1, 2]}


def test_during_is_interval_overlap(small):
    assert eval_query(When((During(T0 + 5000, T0 + 6000),)), small, T0).supporting_ids == [1, 2]
    assert eval_query(When((During(T0 + 4000, T0 + 6000),)), small, T0).supporting_ids == [1, 2, 3]
    assert eval_query(When((During(T0 + 6000, T0 + 4000),)), small, T0).supporting_ids == []


def test_index_tracks_store_changes(small):
    from epilog.store import update_what
    from epilog.model import EntityObservation

    assert eval_query(parse_query("FIND EPISODES WHERE ENTITY=mary"), small, T0).payload["episodes"] == []
    update_what(small, 3, EntityObservation("mary", {"location": "hall"}), cls="person")
    assert eval_query(parse_query("FIND EPISODES WHERE ENTITY=mary"), small, T0).payload["episodes"] == [3]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_engine_matches_full_scan(seed):
    from oracle_scan import naive_eval
    from epilog.errors import EpilogError
    from epilog.relevance import RelevanceParams

    s, store = scenario_store(seed)
    gen = QueryGen(store, s.arena, random.Random(seed))
    now = max(e.when.end for e in store.episodes.values()) + 1000
    for _ in range(10):
        q = gen.query()
        expected = naive_eval(q, store, now, RelevanceParams())
        try:
            a = eval_query(q, store, now)
        except EpilogError as exc:
            assert expected[:2] == ("error", exc.code)
            continue
        assert (a.kind, a.payload, sorted(a.supporting_ids)) == (expected[0], expected[1], sorted(expected[2]))


# --- narration ---------------------------------------------------------------------


def test_story_for_sequential_children(small):
    now = small.episodes[2].when.end + 2 * 3_600_000
    assert narrate(small, 2, now) == "I moved towards the door, then I searched for john, 2 hours ago."


def test_story_for_transposed_children():
    e = [Event(T0, Begin(Kind.CONTEXT, "c")), Event(T0 + 1, Begin(Kind.TASK, "t")),
         Event(T0 + 2, Begin(Kind.CAPABILITY, "walk", "navigation")), Event(T0 + 3, Act("move", ("door",))),
         Event(T0 + 4, Begin(Kind.CAPABILITY, "look", "perception")), Event(T0 + 5, Act("search", ("john",))),
         Event(T0 + 6, End("walk")), Event(T0 + 7, End()),
         Event(T0 + 8, Begin(Kind.CAPABILITY, "talk", "hri")), Event(T0 + 9, Act("greet", ("john",))),
         Event(T0 + 10, End()), Event(T0 + 11, End()), Event(T0 + 12, End())]
    _, store = build(e)
    assert narrate(store, 2, T0 + 11) == (
        "I moved towards the door while I searched for john, then I greeted john, less than a minute ago.")


def test_childless_episode_and_fallback():
    e = [Event(T0, Begin(Kind.CONTEXT, "c")), Event(T0 + 1, Act("wave")), Event(T0 + 2, End()),
         Event(T0 + 3, Begin(Kind.CONTEXT, "silent work")), Event(T0 + 4, End())]
    _, store = build(e)
    assert narrate(store, 1, T0 + 60_002) == "I waved, 1 minute ago."
    assert narrate(store, 2, T0 + 4) == "I worked on silent work, less than a minute ago."


def test_most_specific_action_wins():
    e = [Event(T0, Begin(Kind.CONTEXT, "c")), Event(T0 + 1, Act("move")), Event(T0 + 2, Act("move", ("door",))),
         Event(T0 + 3, End())]
    _, store = build(e)
    assert narrate(store, 1, T0 + 3) == "I moved towards the door, less than a minute ago."


def test_narrating_open_episode_fails():
    wm, store = build(simple_task_events()[:4])
    store.episodes.update(wm.episodes)
    with pytest.raises(OpenEpisode):
        narrate(store, 1, T0)


def test_verb_phrasing():
    assert past_tense("wave") == "waved"
    assert past_tense("carry") == "carried"
    assert past_tense("look") == "looked"
    assert past_tense("take_order") == "took order"
    assert action_phrase(ActionRecord("place", ("cup", "coffee_table"))) == "placed the cup on the coffee table"
    assert action_phrase(ActionRecord("open", ("door", "slowly"))) == "opened door slowly"


@pytest.mark.parametrize("age_ms, phrase", [
    (0, "less than a minute ago"),
    (59_999, "less than a minute ago"),
    (60_000, "1 minute ago"),
    (3_599_999, "59 minutes ago"),
    (3_600_000, "1 hour ago"),
    (86_400_000 * 6, "6 days ago"),
    (86_400_000 * 29, "4 weeks ago"),
    (86_400_000 * 364, "12 months ago"),
    (86_400_000 * 365 * 3, "3 years ago"),
])
def test_describe_time_units(age_ms, phrase):
    assert describe_time(10**12 - age_ms, 10**12) == phrase


def test_describe_time_rejects_the_future():
    with pytest.raises(FutureTimestamp):
        describe_time(11, 10)
