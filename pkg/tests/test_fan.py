import json
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from toricount.fan import (Fan, FanError, all_cones, cone_supported, degree_admissible,
                           dump_fan, library_fan, load_fan, log_anticanonical_degree,
                           parse_fan, picard_lattice, primitive_collections, validate)

LIBRARY = ["p1", "p2", "p1xp1", "dp6", "f1", "f2", "f3"]


def test_parse_p2_document():
    fan = parse_fan({"n": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [0, 2]]})
    assert fan == library_fan("p2")
    assert validate(fan).ok


def test_parse_p1_document():
    fan = parse_fan({"n": 1, "rays": [[1], [-1]], "cones": [[0], [1]]})
    report = validate(fan)
    assert report.smooth and report.complete


def test_non_primitive_ray_rejected():
    with pytest.raises(FanError, match="primitive"):
        parse_fan({"n": 2, "rays": [[1, 0], [0, 2]], "cones": [[0, 1]]})


def test_bad_json_and_missing_keys():
    with pytest.raises(FanError):
        parse_fan("{not json")
    with pytest.raises(FanError):
        parse_fan({"rays": [[1]]})


def test_deleted_cone_is_incomplete():
    fan = parse_fan({"n": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2]]})
    report = validate(fan)
    assert report.smooth and not report.complete and not report.ok
    assert report.details


def test_hidden_ray_is_reported():
    fan = parse_fan({"n": 2, "rays": [[1, 0], [1, 1], [0, 1]], "cones": [[0, 2]]})
    report = validate(fan)
    assert report.smooth
    assert not report.complete
    assert any("ray 1" in line for line in report.details)


def test_singular_cone_is_not_smooth():
    fan = parse_fan({"n": 2, "rays": [[1, 0], [1, 2], [-1, -1], [0, 1]],
                     "cones": [[0, 1], [1, 3], [3, 2], [2, 0]]})
    assert not validate(fan).smooth


@pytest.mark.parametrize("name,rank", [("p1", 1), ("p2", 1), ("p1xp1", 2), ("f1", 2),
                                       ("f2", 2), ("dp6", 4)])
def test_picard_rank(name, rank):
    assert picard_lattice(library_fan(name)).rank == rank


def test_primitive_collections_of_small_fans():
    assert primitive_collections(library_fan("p2")) == {frozenset({0, 1, 2})}
    assert primitive_collections(library_fan("p1xp1")) == {frozenset({0, 1}), frozenset({2, 3})}


def test_dp6_has_nine_nonadjacent_pairs():
    fan = library_fan("dp6")
    cols = primitive_collections(fan)
    assert len(cols) == 9
    assert all(len(c) == 2 for c in cols)
    adjacent = {frozenset(c) for c in fan.max_cones}
    assert not cols & adjacent


def test_cone_supported_examples():
    p2 = library_fan("p2")
    assert cone_supported(p2, {0, 1})
    assert not cone_supported(p2, {0, 1, 2})
    for name in LIBRARY:
        assert cone_supported(library_fan(name), set())


def test_degree_admissible_examples():
    p2, p1 = library_fan("p2"), library_fan("p1")
    assert degree_admissible(p2, (1, 1, 1))
    assert not degree_admissible(p2, (1, 2, 1))
    assert all(degree_admissible(p1, (d, d)) for d in range(5))
    assert not degree_admissible(p1, (1, 2))


def test_anticanonical_degree():
    assert log_anticanonical_degree(library_fan("p2"), (1, 1, 1), (1, 1, 1)) == 3
    assert log_anticanonical_degree(library_fan("p1"), (2, 2), (2, 2)) == 2
    assert log_anticanonical_degree(library_fan("p1"), (2, 3), (4, 3)) == 3
    assert log_anticanonical_degree(library_fan("p1"), (2, 2), (3, 3)) == Fraction(3)


@pytest.mark.parametrize("name", LIBRARY)
def test_library_fans_validate_and_round_trip(name, tmp_path):
    fan = library_fan(name)
    assert validate(fan).ok
    assert parse_fan(dump_fan(fan)) == fan
    path = tmp_path / "fan.json"
    path.write_text(dump_fan(fan))
    assert load_fan(str(path)) == fan


@pytest.mark.parametrize("name", LIBRARY)
def test_primitive_collections_match_brute_force(name):
    fan = library_fan(name)
    n = fan.n_rays
    supported = {frozenset(S) for k in range(n + 1) for S in combinations(range(n), k)
                 if cone_supported(fan, S)}
    expected = {frozenset(S) for k in range(n + 1) for S in combinations(range(n), k)
                if frozenset(S) not in supported
                and all(frozenset(S) - {i} in supported for i in S)}
    assert primitive_collections(fan) == expected


@pytest.mark.parametrize("name", LIBRARY)
def test_cones_are_down_closed(name):
    fan = library_fan(name)
    cones = {frozenset(c) for c in all_cones(fan)}
    for c in cones:
        for i in c:
            assert c - {i} in cones


@pytest.mark.parametrize("name", LIBRARY)
def test_degree_map_kills_exactly_the_ray_relations(name):
    fan = library_fan(name)
    pic = picard_lattice(fan)
    assert pic.rank == fan.n_rays - fan.ambient_rank
    # every column of the ray matrix pairs to zero under each degree row
    for row in pic.degree_matrix:
        for j in range(fan.ambient_rank):
            assert sum(row[i] * fan.rays[i][j] for i in range(fan.n_rays)) == 0


@given(st.sampled_from(LIBRARY), st.lists(st.integers(0, 6), min_size=6, max_size=6))
def test_admissible_iff_rays_cancel(name, raw):
    fan = library_fan(name)
    d = tuple(raw[: fan.n_rays])
    total = [sum(di * r[j] for di, r in zip(d, fan.rays)) for j in range(fan.ambient_rank)]
    assert degree_admissible(fan, d) == (total == [0] * fan.ambient_rank)


def test_unknown_library_name():
    with pytest.raises(FanError):
        load_fan("no-such-fan")


def test_fan_document_is_json():
    doc = json.loads(dump_fan(library_fan("f1")))
    assert set(doc) >= {"dim", "rays", "max_cones"}
    assert isinstance(Fan(doc["dim"], tuple(map(tuple, doc["rays"])),
                          tuple(map(tuple, doc["max_cones"]))), Fan)
