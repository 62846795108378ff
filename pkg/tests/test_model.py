import pytest
from hypothesis import given
from hypothesis import strategies as st

from epilog.model import (
    CAPABILITIES,
    EmotionGroup,
    EmotionTag,
    Entity,
    Kind,
    MediaRef,
    StateEntry,
    TimeInterval,
    ActionRecord,
    check_kind,
    emotion_phrase,
    interval_contains,
    interval_overlaps,
)

times = st.integers(min_value=0, max_value=10**6)


@st.composite
def intervals(draw):
    a, b = sorted((draw(times), draw(times)))
    return TimeInterval(a, b)


def instants(iv: TimeInterval, probe: range):
    if iv.start == iv.end:
        return {iv.start}
    return {t for t in probe if iv.start <= t < iv.end}


def test_interval_rejects_end_before_start():
    with pytest.raises(ValueError):
        TimeInterval(10, 5)
    with pytest.raises(ValueError):
        TimeInterval(-1)


def test_open_interval_is_unbounded():
    iv = TimeInterval(5)
    assert not iv.closed and iv.upper == float("inf")
    assert interval_overlaps(iv, TimeInterval(100, 200))
    assert not interval_overlaps(iv, TimeInterval(0, 5))


def test_half_open_boundaries():
    assert not interval_overlaps(TimeInterval(0, 10), TimeInterval(10, 20))
    assert interval_overlaps(TimeInterval(0, 11), TimeInterval(10, 20))
    assert interval_overlaps(TimeInterval(10, 10), TimeInterval(10, 20))
    assert not interval_overlaps(TimeInterval(20, 20), TimeInterval(10, 20))


@given(intervals(), intervals())
def test_overlap_is_symmetric(a, b):
    assert interval_overlaps(a, b) == interval_overlaps(b, a)


@given(st.integers(0, 60), st.integers(0, 60), st.integers(0, 60), st.integers(0, 60))
def test_overlap_means_a_shared_instant(a0, a1, b0, b1):
    a = TimeInterval(*sorted((a0, a1)))
    b = TimeInterval(*sorted((b0, b1)))
    probe = range(0, 61)
    assert interval_overlaps(a, b) == bool(instants(a, probe) & instants(b, probe))


@given(intervals(), intervals())
def test_containment_implies_overlap_for_non_empty_intervals(a, b):
    if interval_contains(a, b) and b.start < b.end:
        assert interval_overlaps(a, b)


@given(intervals())
def test_containment_is_reflexive(a):
    assert interval_contains(a, a)


def test_emotion_phrases_follow_the_intensity_scale():
    assert emotion_phrase(EmotionTag(EmotionGroup.JOY_TRUST, 3)) == "very happy"
    assert emotion_phrase(EmotionTag(EmotionGroup.SADNESS_FEAR, 2)) == "sad"
    assert emotion_phrase(EmotionTag(EmotionGroup.SURPRISE_ANTICIPATION, 1)) == "a little surprised"
    assert emotion_phrase(EmotionTag(EmotionGroup.ANGER_DISGUST, 0)) == "normal"


def test_emotion_phrases_are_injective_above_zero():
    phrases = [emotion_phrase(EmotionTag(g, i)) for g in EmotionGroup for i in (1, 2, 3)]
    assert len(set(phrases)) == len(phrases)


@pytest.mark.parametrize("level", [-1, 4])
def test_emotion_intensity_range(level):
    with pytest.raises(ValueError):
        EmotionTag(EmotionGroup.JOY_TRUST, level)


def test_emotion_group_accepts_value_strings():
    assert EmotionTag("anger_disgust", 1).group is EmotionGroup.ANGER_DISGUST


def test_subtype_present_iff_capability():
    for subtype in CAPABILITIES:
        check_kind(Kind.CAPABILITY, subtype)
    with pytest.raises(ValueError):
        check_kind(Kind.CAPABILITY, None)
    with pytest.raises(ValueError):
        check_kind(Kind.CAPABILITY, "dancing")
    with pytest.raises(ValueError):
        check_kind(Kind.TASK, "navigation")
    check_kind(Kind.CONTEXT, None)


def test_content_items_reject_empty_required_text():
    with pytest.raises(ValueError):
        ActionRecord("", ())
    with pytest.raises(ValueError):
        MediaRef("")
    with pytest.raises(ValueError):
        MediaRef("a.jpg", "audio")


def test_entity_history_stays_sorted_and_tracks_static_fields():
    e = Entity("john", "person")
    e.record(StateEntry(30, "age", "41", 2))
    e.record(StateEntry(10, "age", "40", 1))
    e.record(StateEntry(20, "location", "kitchen", 1))
    assert [x.t for x in e.state_history] == [10, 20, 30]
    assert e.static_fields == {"age": "41"}


def test_entity_class_is_checked():
    with pytest.raises(ValueError):
        Entity("x", "robot")
