"""Order-by-order coefficient construction against closed forms and the oracle."""

from __future__ import annotations

import numpy as np
import pytest

from ktspin import DualScalar, solve
from ktspin.clusters import AdjacencyGraph, connected_size
from ktspin.oracle import extract_creation_coefficients, ground
from ktspin.setalg import one_norm, table_lookup
from ktspin.solver import _prepare_terms, advance_order, first_order, solve_prepared
from conftest import (
    make_model,
    random_hermitian_op,
    random_model,
    tf_edge_model,
    topology_pairs,
)


def test_single_flip_singleton_series():
    # exact per-site expansion: -x + x^3 - 2 x^5 + 5 x^7 (signed Catalan numbers)
    state = solve(tf_edge_model(), 7)
    want = {1: -1.0, 3: 1.0, 5: -2.0, 7: 5.0}
    for q in range(1, 8):
        for w in (0, 1):
            assert table_lookup(state.table, q, (w,)) == want.get(q, 0)
        # the exact ground state is a product state: no pair set ever appears
        assert table_lookup(state.table, q, (0, 1)) == 0


def test_first_order_reads_edge_columns():
    mat = np.zeros((4, 4), dtype=complex)
    mat[1, 0] = 0.5       # excite v alone
    mat[2, 0] = -2.0j     # excite u alone
    mat[3, 0] = 3.0       # excite the pair
    m = make_model([2.0, 4.0], [(0, 1, mat)])
    state = first_order(m)
    assert table_lookup(state.table, 1, (1,)) == 0.5 / 4.0
    assert table_lookup(state.table, 1, (0,)) == -2.0j / 2.0
    assert table_lookup(state.table, 1, (0, 1)) == 3.0 / 6.0


def test_parallel_edges_accumulate():
    mat = np.zeros((4, 4), dtype=complex)
    mat[2, 0] = 1.0
    m = make_model([1.0, 1.0], [(0, 1, mat), (0, 1, mat)])
    state = first_order(m)
    assert table_lookup(state.table, 1, (0,)) == 2.0


def test_diagonal_model_stays_empty(rng):
    from conftest import random_diagonal_model

    m = random_diagonal_model(rng, 5, topology_pairs("path", 5))
    state = solve(m, 5)
    assert state.table.entry_count() == 0
    assert state.norms == [0.0] * 5


def test_solve_rejects_bad_order():
    with pytest.raises(ValueError):
        solve(tf_edge_model(), 0)


def test_threshold_drops_small_entries():
    state = solve(tf_edge_model(), 3, threshold=1.1)
    # |C_1| = 1 < 1.1 is dropped, so nothing can seed the higher orders
    assert state.table.entry_count() == 0


def test_norms_track_one_norm(rng):
    m = random_model(rng, topology_pairs("ring", 5), 5)
    state = solve(m, 4)
    assert len(state.norms) == 4
    for q in range(1, 5):
        assert state.norms[q - 1] == one_norm(state.table, q)


def test_sets_fit_in_small_connected_clusters(rng):
    # a set stored at order q may itself be disconnected, but it always sits
    # inside a connected cluster spanned by q interaction edges
    m = random_model(rng, topology_pairs("path", 6), 6)
    graph = AdjacencyGraph.from_model(m)
    state = solve(m, 5)
    seen_orders = set()
    for q, omap in state.table.orders.items():
        seen_orders.add(q)
        for members in omap:
            assert len(members) <= q + 1
            assert connected_size(graph, members) <= q + 1
    assert seen_orders == set(range(1, 6))


def test_reruns_are_identical(rng):
    m = random_model(rng, topology_pairs("ring", 6), 6)
    a = solve(m, 5)
    b = solve(m, 5)
    assert a.table.orders == b.table.orders
    assert a.norms == b.norms


def test_dual_run_value_channel_matches_plain(rng):
    m = random_model(rng, topology_pairs("path", 5), 5)
    plain = solve(m, 4)
    terms = _prepare_terms(m)
    ru, rv, entries = terms[1]
    dual = [
        [DualScalar(entries[i][j], 1.0j * (i - j)) for j in range(4)]
        for i in range(4)
    ]
    terms[1] = (ru, rv, tuple(tuple(row) for row in dual))
    mixed = solve_prepared(m, terms, 4)
    assert set(mixed.table.orders) == set(plain.table.orders)
    for q, omap in plain.table.orders.items():
        got = mixed.table.orders[q]
        for members, value in omap.items():
            other = got[members]
            other_val = other.val if isinstance(other, DualScalar) else other
            assert other_val == value


def test_advance_order_resumes_incrementally(rng):
    m = random_model(rng, topology_pairs("path", 4), 4)
    state = first_order(m)
    advance_order(state)
    advance_order(state)
    assert state.current_order == 3
    full = solve(m, 3)
    assert state.table.orders == full.table.orders


def test_coefficients_match_exact_ground_state(rng):
    # independent route: diagonalize, then peel exp(-C) off the exact state
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]
    m = random_model(rng, pairs, 4)
    order = 6
    state = solve(m, order)
    eps = 1e-3
    extracted = extract_creation_coefficients(ground(m, eps).state, drop_below=1e-12)
    predicted = {}
    for q in range(1, order + 1):
        for members, value in state.table.orders.get(q, {}).items():
            predicted[members] = predicted.get(members, 0j) + value * eps**q
    # agreement to the first omitted order
    scale = max(abs(v) for v in predicted.values())
    tol = 50 * scale * eps
    for members in set(predicted) | set(extracted):
        assert abs(predicted.get(members, 0j) - extracted.get(members, 0j)) <= tol
