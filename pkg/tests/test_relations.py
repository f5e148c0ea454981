import pytest

from error_handler import UnknownSuite
from relations import RELATIONS, SUITES, check_relation, check_suite, relations_in

K_VALUES = [-2, -1, 0, 1, 2]


def test_every_relation_belongs_to_a_suite():
    assert {r.suite for r in RELATIONS} == set(SUITES)
    assert len(relations_in("all")) == len(RELATIONS)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        relations_in("teleporting")


def test_relation_names_are_unique():
    names = [r.name for r in RELATIONS]
    assert len(names) == len(set(names))


@pytest.mark.parametrize("k", K_VALUES)
@pytest.mark.parametrize("suite", SUITES)
def test_relation_suites_have_zero_residual(suite, k):
    failures = [r.to_dict() for r in check_suite(suite, k) if not r.passed]
    assert failures == []


@pytest.mark.parametrize("k,expected", [(-1, True), (0, True), (1, False)])
def test_left_curl_applies_only_for_nonpositive_k(k, expected):
    [left_curl] = [r for r in RELATIONS if r.name == "left-curl"]
    results = check_relation(left_curl, k)
    assert bool(results) == expected
    assert all(r.passed for r in results)


def test_window_relations_follow_k():
    [cw_window] = [r for r in RELATIONS if r.name == "cw-window"]
    assert [name for name, _, _ in cw_window.instances(2)] == ["cw-window[0]", "cw-window[1]", "cw-window[2]"]
    assert list(cw_window.instances(-1)) == []


def test_result_serialisation():
    [skein] = [r for r in RELATIONS if r.name == "skein"]
    [result] = check_relation(skein, 0)
    assert result.to_dict() == {
        "name": "skein",
        "suite": "core",
        "k": 0,
        "passed": True,
        "residual": "",
        "error": "",
    }


def _relation(name):
    [relation] = [r for r in RELATIONS if r.name == name]
    return relation


@pytest.mark.parametrize("k", K_VALUES)
@pytest.mark.parametrize(
    "name",
    [
        "sideways-inverse-up-down",
        "pivotal-down-crossing",
        "pivotal-left-crossing-negative",
        "cap-slide-right",
        "cap-slide-left-down-negative",
        "cup-slide-left-down",
        "cap-dot-left",
    ],
)
def test_relations_added_for_every_k(name, k):
    results = check_relation(_relation(name), k)
    assert results
    assert [r.to_dict() for r in results if not r.passed] == []


@pytest.mark.parametrize(
    "name,k,labels",
    [
        ("sideways-curl-left-cup", 2, [0, 1, 2]),
        ("sideways-curl-left-cup", -1, []),
        ("sideways-curl-right-cup", -3, [0, 1, 2]),
        ("sideways-curl-right-cup", 0, [0]),
        ("sideways-curl-left-cap-negative", 2, [0, 1]),
        ("sideways-curl-right-cap", 1, []),
    ],
)
def test_sideways_curls_follow_k(name, k, labels):
    relation = _relation(name)
    assert [instance for instance, _, _ in relation.instances(k)] == [f"{name}[{a}]" for a in labels]
    assert all(r.passed for r in check_relation(relation, k))


@pytest.mark.parametrize("k,names", [(-1, ["sideways-inverse-up-down-positive"]),
                                     (1, ["sideways-inverse-negative", "sideways-inverse-mixed"])])
def test_simplified_sideways_inverses(k, names):
    for name in names:
        [result] = check_relation(_relation(name), k)
        assert result.passed, result.to_dict()
    assert check_relation(_relation("sideways-inverse-mixed"), 0) == []
