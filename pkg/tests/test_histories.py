import pytest
from hypothesis import given
from hypothesis import strategies as st

from causalspace import histories as hst
from causalspace.encoding import history, is_subset

EVENTS = "ABCD"


def dict_of(assignment):
    return history(assignment)


histories_st = st.dictionaries(st.sampled_from(list(EVENTS)), st.integers(0, 1)).map(
    history
)


def as_dict(h):
    from causalspace.encoding import history_dict

    return history_dict(h)


def test_restriction_examples():
    assert hst.restriction_leq(dict_of({"A": 0}), dict_of({"A": 0, "B": 1}))
    assert not hst.restriction_leq(dict_of({"A": 0}), dict_of({"A": 1, "B": 1}))
    assert hst.restriction_leq(0, dict_of({"B": 1}))


def test_meet_examples():
    f = dict_of({"A": 0, "B": 1})
    g = dict_of({"A": 0, "C": 0})
    assert hst.meet(f, g) == dict_of({"A": 0})
    assert hst.meet(f, f) == f
    assert hst.meet(dict_of({"A": 0}), dict_of({"A": 1})) == 0


def test_compatible_examples():
    assert hst.compatible(dict_of({"A": 0, "B": 1}), dict_of({"B": 1, "C": 0}))
    assert not hst.compatible(dict_of({"A": 0}), dict_of({"A": 1}))
    assert hst.compatible(dict_of({"A": 0}), dict_of({"B": 1}))


def test_join_examples():
    assert hst.join([dict_of({"A": 0}), dict_of({"B": 1})]) == dict_of(
        {"A": 0, "B": 1}
    )
    f = dict_of({"A": 1, "C": 0})
    assert hst.join([f]) == f
    assert hst.join(
        [dict_of({"A": 0, "B": 0}), dict_of({"B": 0, "C": 1})]
    ) == dict_of({"A": 0, "B": 0, "C": 1})


def test_join_rejects_incompatible():
    with pytest.raises(ValueError):
        hst.join([dict_of({"A": 0}), dict_of({"A": 1})])


# the dict model of partial functions is the independent reference for the
# bit encoding


@given(histories_st, histories_st)
def test_restriction_matches_dict_model(f, g):
    fd, gd = as_dict(f), as_dict(g)
    expected = set(fd) <= set(gd) and all(gd[e] == v for e, v in fd.items())
    assert hst.restriction_leq(f, g) == expected
    assert hst.restriction_leq(f, g) == is_subset(f, g)


@given(histories_st, histories_st)
def test_meet_matches_dict_model(f, g):
    fd, gd = as_dict(f), as_dict(g)
    agree = {e: v for e, v in fd.items() if gd.get(e) == v}
    assert hst.meet(f, g) == history(agree)


@given(histories_st, histories_st)
def test_compatible_matches_dict_model(f, g):
    fd, gd = as_dict(f), as_dict(g)
    expected = all(gd[e] == v for e, v in fd.items() if e in gd)
    assert hst.compatible(f, g) == expected


@given(st.lists(histories_st, max_size=5))
def test_compatible_set_is_pairwise(fs):
    pairwise = all(
        hst.compatible(a, b) for i, a in enumerate(fs) for b in fs[i + 1 :]
    )
    assert hst.compatible_set(fs) == pairwise
    if pairwise:
        joined = hst.join(fs)
        merged = {}
        for f in fs:
            merged.update(as_dict(f))
        assert joined == history(merged)
    else:
        with pytest.raises(ValueError):
            hst.join(fs)


@given(histories_st, histories_st, histories_st)
def test_meet_is_greatest_lower_bound(f, g, w):
    m = hst.meet(f, g)
    assert hst.restriction_leq(m, f) and hst.restriction_leq(m, g)
    if hst.restriction_leq(w, f) and hst.restriction_leq(w, g):
        assert hst.restriction_leq(w, m)
