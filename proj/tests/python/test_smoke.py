"""Smoke tests for the python bindings."""

import os

import pytest

import nmrsim


def test_graph_queries():
    g = nmrsim.Graph.path(4)
    assert g.diameter() == 3
    assert g.max_degree() == 2
    assert g.closed_neighborhood(1) == [0, 1, 2]
    assert nmrsim.Graph.complete(5).diameter() == 1
    star = nmrsim.Graph.star(5)
    assert star.max_degree() == 5
    with pytest.raises(nmrsim.InputError):
        nmrsim.Graph.from_edges(3, [(0, 1)])  # disconnected


def test_geometric_graph_ties():
    g = nmrsim.Graph.geometric([(0, 0), (1, 0), (3, 0)], 1.5)
    assert g.edge_list() == [(0, 1)]
    assert nmrsim.Graph.geometric([(0, 0), (2, 0)], 2.0).has_edge(0, 1)


def test_run_nmr_k2():
    g = nmrsim.Graph.complete(2)
    trace = nmrsim.run_nmr(g, horizon=6)
    entries = {0: [], 1: []}
    for event in trace.events():
        if event["kind"] == "ENTER_CS":
            entries[event["subject"]].append(event["t"])
    assert entries[0] == [1.0, 4.0]
    assert entries[1] == [1.0, 4.0]
    verdict = nmrsim.check_l_exclusion(trace, l=2)
    assert verdict["pass"]
    assert verdict["checks"] > 0


def test_trace_round_trip():
    g = nmrsim.Graph.star(3)
    trace = nmrsim.run_nmr(g, horizon=10, seed=5)
    text = trace.to_jsonl()
    again = nmrsim.Trace.from_jsonl(text)
    assert again.to_jsonl() == text
    assert nmrsim.check_local_rendezvous(again, prefix=2.0)["pass"]


def test_scenario_run_and_determinism():
    scenario_dir = os.environ["NMRSIM_SCENARIOS"]
    scenario = nmrsim.load_scenario(os.path.join(scenario_dir, "alg1-path3.json"))
    a = nmrsim.run_scenario(scenario, seed=1)
    b = nmrsim.run_scenario(scenario, seed=1)
    assert a["pass"]
    assert a["maxn_stabilization_pulse"] == 2
    assert set(a["checkers"]) == {"l-exclusion", "fairness", "rendezvous"}
    assert a["trace_jsonl"] == b["trace_jsonl"]


def test_sweep_scenario():
    scenario = nmrsim.parse_scenario(
        """{
        "name": "k2", "protocol": "nmr",
        "graph": {"generator": "complete", "k": 2},
        "init": "adversarial", "horizon": 20}"""
    )
    report = nmrsim.sweep_scenario(scenario, seeds=list(range(1, 9)), jobs=2)
    assert report["runs"] == 8
    assert report["passed"] == 8


def test_bad_scenario_raises():
    with pytest.raises(nmrsim.InputError):
        nmrsim.parse_scenario('{"name": "x"}')
