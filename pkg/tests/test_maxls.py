import numpy as np
import pytest

from sepscope import (
    BinaryTask,
    DegenerateError,
    approx_weight,
    greedy_maxls,
    ls0_at,
    verify_result,
    verify_separable,
    violation_edges,
)
from oracles import best_kept_at_omega, minor_edges_brute


def task_of(a, b):
    return BinaryTask(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def random_task(rng, max_side=8, n_features=3):
    return task_of(
        rng.standard_normal((int(rng.integers(1, max_side + 1)), n_features)),
        rng.standard_normal((int(rng.integers(1, max_side + 1)), n_features)),
    )


FIG_TASK = task_of([[0, 0], [3, 0], [4, 0]], [[1, 0]])
E1 = np.array([1.0, 0.0])


def test_violation_edges_single_crossing():
    graph = violation_edges(FIG_TASK, E1, zero_tol=1e-9)
    assert graph.major_side == 1
    assert graph.edge_count == 1
    assert tuple(graph.edges[0]) == (0, 0)
    assert graph.degrees_a[0] == 1 and graph.degrees_b[0] == 1


def test_violation_edges_empty_when_separable():
    task = task_of([[0, 0], [1, 0]], [[5, 0]])
    graph = violation_edges(task, E1, zero_tol=1e-9)
    assert graph.edge_count == 0


def test_violation_edges_all_zero_degenerate():
    task = task_of([[0, 0]], [[0, 5]])
    with pytest.raises(DegenerateError):
        violation_edges(task, E1, zero_tol=1e-9)


def test_violation_edges_match_brute_force():
    rng = np.random.default_rng(51)
    for _ in range(50):
        task = random_task(rng)
        omega = rng.standard_normal(3)
        tol = float(rng.choice([1e-12, 1e-3]))
        try:
            graph = violation_edges(task, omega, tol)
        except DegenerateError:
            continue
        got = {(int(i), int(j)) for i, j in graph.edges}
        assert got == minor_edges_brute(task, omega, tol)


def test_greedy_removes_from_larger_class_on_tie():
    result = greedy_maxls(FIG_TASK, E1, zero_tol=1e-9)
    assert result.removed == (("a", 0, 1),)
    assert result.kept_a.tolist() == [1, 2]
    assert result.kept_b.tolist() == [0]


def test_greedy_no_removals_when_separable():
    task = task_of([[0, 0], [1, 0]], [[5, 0]])
    result = greedy_maxls(task, E1, zero_tol=1e-9)
    assert result.removed == ()
    assert result.kept_a.size == 2 and result.kept_b.size == 1


def test_greedy_output_always_verifies():
    rng = np.random.default_rng(52)
    checked = 0
    for _ in range(200):
        task = random_task(rng)
        omega = rng.standard_normal(3)
        try:
            result = greedy_maxls(task, omega, 1e-12)
        except DegenerateError:
            continue
        checked += 1
        assert verify_result(task, result, omega, 1e-12)
        if result.kept_a.size and result.kept_b.size:
            kept = task.subset(result.kept_a, result.kept_b)
            assert ls0_at(kept, omega, 1e-12) == 1.0
    assert checked >= 150


def test_greedy_kept_size_bounds():
    rng = np.random.default_rng(53)
    for _ in range(50):
        task = random_task(rng)
        omega = rng.standard_normal(3)
        try:
            result = greedy_maxls(task, omega, 1e-12)
        except DegenerateError:
            continue
        kept = result.kept_a.size + result.kept_b.size
        total = task.i_count + task.j_count
        assert kept <= total
        assert kept >= total - len(result.removed)


def test_greedy_deterministic():
    rng = np.random.default_rng(54)
    task = random_task(rng, max_side=10)
    omega = rng.standard_normal(3)
    first = greedy_maxls(task, omega, 1e-12)
    second = greedy_maxls(task, omega, 1e-12)
    assert first.removed == second.removed
    assert np.array_equal(first.kept_a, second.kept_a)
    assert np.array_equal(first.kept_b, second.kept_b)


def test_greedy_near_fixed_weight_optimum():
    rng = np.random.default_rng(55)
    for _ in range(40):
        task = task_of(
            rng.standard_normal((int(rng.integers(1, 6)), 2)),
            rng.standard_normal((int(rng.integers(1, 6)), 2)),
        )
        omega = rng.standard_normal(2)
        try:
            result = greedy_maxls(task, omega, 1e-12)
        except DegenerateError:
            continue
        alpha = task.set_a @ omega
        beta = task.set_b @ omega
        optimum = best_kept_at_omega(alpha, beta, 1e-12)
        kept = result.kept_a.size + result.kept_b.size
        assert kept >= 0.8 * optimum


def test_verify_rejects_boundary_pair():
    task = task_of([[1.0, 0.0], [2.0, 0.0]], [[1.0, 5.0]])
    # pair (a0, b0) projects to exactly zero along e1
    assert not verify_separable(task, E1, zero_tol=1e-12)


def test_verify_rejects_crossing():
    assert not verify_separable(FIG_TASK, E1, zero_tol=1e-12)


def test_result_json_shape():
    result = greedy_maxls(FIG_TASK, E1, zero_tol=1e-9)
    doc = result.to_json()
    assert set(doc) == {"major_side", "kept_a", "kept_b", "removed"}
    assert doc["removed"] == [{"set": "a", "index": 0, "degree": 1}]


def test_greedy_with_protocol_weight():
    rng = np.random.default_rng(56)
    a = rng.normal((0.0, 0.0), 1.2, (15, 2))
    b = rng.normal((1.5, 0.0), 1.2, (12, 2))
    task = task_of(a, b)
    weight = approx_weight(task)
    result = greedy_maxls(task, weight)
    assert verify_result(task, result, weight)
    assert len(result.removed) > 0
