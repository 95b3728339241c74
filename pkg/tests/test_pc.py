import numpy as np
import pytest

from rankpc.citest import OracleDecider, RankCiDecider, TestConfig
from rankpc.graph import Dag, EdgeState, Pdag, cpdag, skeleton
from rankpc.pc import PcResult, orient_colliders, pc_result_to_text, pc_skeleton, run_pc

from oracles import random_dag_edges


CHAIN = Dag(3, [(0, 1), (1, 2)])
COLLIDER = Dag(3, [(0, 1), (2, 1)])


def test_skeleton_chain_records_sepset():
    res = pc_skeleton(OracleDecider(CHAIN), 3)
    assert res.edges == {(0, 1), (1, 2)}
    assert res.sepsets == {(0, 2): (1,)}
    # both sides of each surviving pair contribute queries at every level
    assert res.tests_run == 10
    assert res.max_cond_used == 1


def test_skeleton_empty_graph_separates_everything_marginally():
    res = pc_skeleton(OracleDecider(Dag(4)), 4)
    assert res.edges == set()
    assert set(res.sepsets) == {(u, v) for u in range(4) for v in range(u + 1, 4)}
    assert all(s == () for s in res.sepsets.values())
    assert res.max_cond_used == 0


def test_skeleton_complete_dag_keeps_all_edges():
    full = Dag(3, [(0, 1), (0, 2), (1, 2)])
    res = pc_skeleton(OracleDecider(full), 3)
    assert res.edges == {(0, 1), (0, 2), (1, 2)}
    assert res.sepsets == {}


def test_skeleton_sepsets_exactly_for_removed_pairs():
    rng = np.random.default_rng(83)
    for _ in range(20):
        dag = random_dag_edges(rng, 6, 0.4)
        res = pc_skeleton(OracleDecider(dag), 6)
        all_pairs = {(u, v) for u in range(6) for v in range(u + 1, 6)}
        assert set(res.sepsets) == all_pairs - res.edges
        assert res.edges == skeleton(dag)


def test_skeleton_respects_max_cond():
    res = pc_skeleton(OracleDecider(CHAIN), 3, max_cond=0)
    assert res.edges == {(0, 1), (0, 2), (1, 2)}
    assert res.max_cond_used == 0


def test_skeleton_respects_decider_cap():
    class CappedOracle(OracleDecider):
        max_cond_size = 0

    res = pc_skeleton(CappedOracle(CHAIN), 3)
    assert res.edges == {(0, 1), (0, 2), (1, 2)}
    assert res.max_cond_used == 0


def test_skeleton_validates_arguments():
    with pytest.raises(ValueError):
        pc_skeleton(OracleDecider(CHAIN), 0)
    with pytest.raises(ValueError):
        pc_skeleton(OracleDecider(CHAIN), 3, max_cond=-1)


def test_orient_colliders_chain_all_undirected():
    states, warnings = orient_colliders({(0, 1), (1, 2)}, {(0, 2): (1,)}, 3)
    assert states == {(0, 1): EdgeState.UNDIRECTED, (1, 2): EdgeState.UNDIRECTED}
    assert warnings == []


def test_orient_colliders_empty_sepset_makes_collider():
    states, warnings = orient_colliders({(0, 1), (1, 2)}, {(0, 2): ()}, 3)
    assert states[(0, 1)] == EdgeState.FORWARD
    assert states[(1, 2)] == EdgeState.BACKWARD
    assert warnings == []


def test_orient_colliders_triangle_untouched():
    edges = {(0, 1), (0, 2), (1, 2)}
    states, warnings = orient_colliders(edges, {}, 3)
    assert all(st == EdgeState.UNDIRECTED for st in states.values())
    assert warnings == []


def test_orient_colliders_conflict_logged_last_write_wins():
    edges = {(0, 1), (1, 2), (0, 3)}
    sepsets = {(0, 2): (), (1, 3): ()}
    states, warnings = orient_colliders(edges, sepsets, 4)
    assert len(warnings) == 1
    assert "conflict" in warnings[0]
    assert states[(0, 1)] == EdgeState.BACKWARD  # the later triple re-aimed it
    assert states[(1, 2)] == EdgeState.BACKWARD
    assert states[(0, 3)] == EdgeState.BACKWARD


def test_run_pc_chain_gives_undirected_chain():
    res = run_pc(OracleDecider(CHAIN), 3)
    assert res.pdag == cpdag(CHAIN)
    assert res.pdag.undirected_edges() == [(0, 1), (1, 2)]


def test_run_pc_collider_preserved():
    res = run_pc(OracleDecider(COLLIDER), 3)
    assert res.pdag == cpdag(COLLIDER)
    assert res.pdag.has_arrow(0, 1) and res.pdag.has_arrow(2, 1)


def test_run_pc_empty_graph():
    res = run_pc(OracleDecider(Dag(3)), 3)
    assert res.pdag == Pdag(3, {})
    assert res.warnings == []


def test_run_pc_single_node():
    res = run_pc(OracleDecider(Dag(1)), 1)
    assert res.pdag == Pdag(1, {})
    assert res.tests_run == 0
    assert res.max_cond_used == -1


def test_run_pc_deterministic():
    rng = np.random.default_rng(89)
    for _ in range(10):
        dag = random_dag_edges(rng, 6, 0.4)
        a = run_pc(OracleDecider(dag), 6)
        b = run_pc(OracleDecider(dag), 6)
        assert a.pdag == b.pdag
        assert a.sepsets == b.sepsets
        assert a.tests_run == b.tests_run
        assert a.max_cond_used == b.max_cond_used
        assert a.warnings == b.warnings


def test_run_pc_stable_variant_matches_oracle_truth():
    rng = np.random.default_rng(97)
    for _ in range(20):
        dag = random_dag_edges(rng, 6, 0.4)
        res = run_pc(OracleDecider(dag), 6, stable=True)
        assert res.pdag == cpdag(dag)


def test_run_pc_propagates_decider_warnings():
    sigma = np.array(
        [
            [1.0, 0.9, -0.9],
            [0.9, 1.0, 0.9],
            [-0.9, 0.9, 1.0],
        ]
    )
    dec = RankCiDecider(sigma, 100, TestConfig("fisher_z", alpha=0.05))
    res = run_pc(dec, 3)
    assert res.warnings
    assert all("dependent by default" in w for w in res.warnings)
    assert res.pdag.edge_count() == 3  # nothing could be removed


def test_pc_result_to_text_layout():
    res = run_pc(OracleDecider(COLLIDER), 3)
    text = pc_result_to_text(res)
    lines = text.splitlines()
    assert lines[0] == "p=3"
    assert "0 -> 1" in lines and "2 -> 1" in lines
    assert f"tests_run={res.tests_run}" in lines
    assert f"max_cond_used={res.max_cond_used}" in lines
    assert "warnings=0" in lines
    assert text.endswith("\n")


def test_run_pc_with_threshold_decider_on_exact_sigma():
    # feeding the true correlation matrix with a small cutoff recovers truth
    from rankpc.simulate import implied_covariance, random_dag, random_weights, SemModel

    rng = np.random.default_rng(101)
    for _ in range(5):
        dag = random_dag(5, 0.4, rng)
        model = SemModel(dag, random_weights(dag, rng), "standard_normal", "identity")
        sigma = implied_covariance(model)
        dec = RankCiDecider(sigma, 1000, TestConfig("threshold", gamma=1e-7))
        res = run_pc(dec, 5)
        assert res.pdag == cpdag(dag), dag
