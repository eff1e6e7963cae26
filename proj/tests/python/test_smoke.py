import math

import pytest

import ppbary


def test_distance_to_empty_pattern():
    r = ppbary.tt_distance([], [[0.1, 0.2], [0.7, 0.3]], penalty=1.0, order=2.0)
    assert r["value"] == pytest.approx(math.sqrt(2.0))
    assert sorted(j for _, j in r["matching"]) == [0, 1]
    assert ppbary.rtt_distance([], [[0.1, 0.2], [0.7, 0.3]], penalty=1.0, order=2.0)["value"] == pytest.approx(1.0)


def test_distance_is_symmetric():
    a = [[0.1, 0.1], [0.5, 0.9], [0.3, 0.3]]
    b = [[0.2, 0.1], [0.9, 0.9]]
    ab = ppbary.tt_distance(a, b, penalty=0.4, order=2.0)["value"]
    assert ab == ppbary.tt_distance(b, a, penalty=0.4, order=2.0)["value"]
    assert ppbary.ospa_distance(a, a, penalty=1.0) == 0.0


def test_two_singletons_meet_at_midpoint():
    res = ppbary.barycenter([[[0.0]], [[1.2]]], penalty=1.0, order=2.0, start=[[0.3]])
    assert res["converged"]
    assert res["barycenter"][0][0] == pytest.approx(0.6)
    assert res["objective"] == pytest.approx(0.72)
    trace = res["trace"]
    assert all(b <= a for a, b in zip(trace, trace[1:]))


def test_barycenter_is_reproducible():
    pats = [[[0.1 * i, 0.05 * j] for i in range(4)] for j in range(5)]
    one = ppbary.barycenter(pats, penalty=0.3, starts=3, seed=4, algorithm="improved")
    two = ppbary.barycenter(pats, penalty=0.3, starts=3, seed=4, algorithm="improved", threads=2)
    assert one["objectives"] == two["objectives"]


def test_simulate_returns_summary():
    csv = ppbary.simulate("k = 4\nm = 4\ninstances = 2\nstarts = 2\n")
    assert csv.splitlines()[0].startswith("name,k,m")
    assert len(csv.splitlines()) == 2


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        ppbary.tt_distance([[0.0, 0.0]], [[1.0, 1.0]], penalty=-1.0)
    with pytest.raises(NotImplementedError):
        ppbary.barycenter([[[0.0, 0.0]]], order=3.0)
    code, out, _ = ppbary.cli(["dist", "--help"])
    assert code == 0 and "metric" in out
