"""Correlators: closed form, locality restriction, and the exact oracle."""

from __future__ import annotations

import numpy as np
import pytest

from ktspin import (
    CorrelatorQuery,
    DanglingVertexId,
    InvalidObservable,
    NonPositivePrecision,
    SelfLoop,
    choose_correlator_order,
    correlator,
    restrict_neighborhood,
)
from ktspin.model import parse_pauli_expression
from ktspin.oracle import expectation, ground
from ktspin.response import REGIME_CERTIFIED, REGIME_NONE
from conftest import (
    make_model,
    random_hermitian_op,
    random_model,
    tf_edge_model,
    topology_pairs,
)


def zi():
    return parse_pauli_expression("ZI")


def query(s, t, obs, eps, order):
    from ktspin.model import TwoQubitOperator

    return CorrelatorQuery(
        s=s, t=t, observable=TwoQubitOperator(obs), epsilon=eps, order=order
    )


def test_single_flip_zi_coefficients():
    # per-site closed form: <Z_0> = (1 - r^2)/(1 + r^2) with r = -e/eps,
    # giving 1 - 2 eps^2 + O(eps^4)
    m = tf_edge_model()
    r = correlator(m, query(0, 1, zi(), 0.0, 2))
    assert [c.real for c in r.coefficients] == pytest.approx([1.0, 0.0, -2.0], abs=1e-12)
    assert r.value == pytest.approx(1.0)
    assert r.regime == REGIME_CERTIFIED


def test_order_zero_reads_vacuum_entry():
    m = tf_edge_model()
    r = correlator(m, query(0, 1, zi(), 0.0, 0))
    assert r.coefficients == [1.0 + 0j]
    assert r.value == 1.0
    assert r.bound == pytest.approx(2.0**-16 * m.J * m.d * (m.d + 1))


def test_correlator_matches_diagonalization(rng):
    m = random_model(rng, topology_pairs("path", 5), 5)
    obs = random_hermitian_op(rng)
    eps = m.eps0_star / (2 * m.d)
    r = correlator(m, query(1, 3, obs, eps, 4))
    assert r.regime == REGIME_CERTIFIED
    g = ground(m, eps)
    exact = expectation(g.state, obs, 1, 3)
    assert abs(r.value - exact) <= r.bound + 1e-10


def test_validation_errors():
    m = tf_edge_model()
    with pytest.raises(SelfLoop):
        correlator(m, query(0, 0, zi(), 0.0, 1))
    with pytest.raises(DanglingVertexId):
        correlator(m, query(0, 5, zi(), 0.0, 1))
    with pytest.raises(NonPositivePrecision):
        correlator(m, query(0, 1, zi(), 0.0, -1))
    skew = np.zeros((4, 4), dtype=complex)
    skew[0, 1] = 1.0
    with pytest.raises(InvalidObservable):
        correlator(m, CorrelatorQuery(0, 1, skew, 0.0, 1))


def test_regime_none_beyond_threshold():
    m = tf_edge_model()
    eps = m.eps0_star  # twice the certified correlator strength
    r = correlator(m, query(0, 1, zi(), eps, 2))
    assert r.regime == REGIME_NONE
    assert r.bound is None


def test_large_observable_is_rescaled_consistently(rng):
    m = random_model(rng, topology_pairs("path", 4), 4)
    obs = random_hermitian_op(rng)
    eps = m.eps0_star / (2 * m.d)
    small = correlator(m, query(0, 2, obs, eps, 3))
    big = correlator(m, query(0, 2, 25.0 * obs, eps, 3))
    assert big.value == pytest.approx(25.0 * small.value, rel=1e-12)
    assert big.bound == pytest.approx(25.0 * small.bound, rel=1e-12)
    for cb, cs in zip(big.coefficients, small.coefficients):
        assert cb == pytest.approx(25.0 * cs, rel=1e-12)


def test_restriction_is_bit_identical(rng):
    # the whole point of the neighborhood cut: not just close, identical
    m = random_model(rng, topology_pairs("ring", 12), 12)
    obs = random_hermitian_op(rng)
    for order in (2, 3):
        q = query(3, 5, obs, m.eps0_star / (2 * m.d), order)
        full = correlator(m, q, restrict=False)
        cut = correlator(m, q, restrict=True)
        assert cut.value == full.value
        assert cut.coefficients == full.coefficients
        assert cut.bound == full.bound


def test_restrict_neighborhood_geometry():
    m = random_model(np.random.default_rng(5), topology_pairs("path", 11), 11)
    sub, mapping = restrict_neighborhood(m, 4, 6, 2)
    # vertices within hop distance 3 of {4, 6}: 1..9
    assert sorted(mapping) == list(range(1, 10))
    assert [mapping[w] for w in sorted(mapping)] == list(range(9))
    assert sub.n == 9
    # edges with nearer endpoint within distance 2: (1,2) .. (8,9)
    kept = [(e.u, e.v) for e in sub.edges]
    assert kept == [(mapping[i], mapping[i + 1]) for i in range(1, 9)]
    deltas = [v.delta for v in sub.vertices]
    assert deltas == [m.deltas[w] for w in sorted(mapping)]


def test_restrict_neighborhood_whole_graph_when_wide():
    m = random_model(np.random.default_rng(6), topology_pairs("path", 5), 5)
    sub, mapping = restrict_neighborhood(m, 0, 4, 10)
    assert sub.n == 5
    assert mapping == {w: w for w in range(5)}
    assert len(sub.edges) == 4


def test_choose_correlator_order_is_minimal():
    p = choose_correlator_order(2.0**-20, 1.0, 4)
    assert p == 9
    assert 2.0 ** (-16 - p) * 1.0 * 4 * 5 <= 2.0**-20
    assert 2.0 ** (-16 - (p - 1)) * 1.0 * 4 * 5 > 2.0**-20
    assert choose_correlator_order(1.0, 0.0, 0) == 0
    with pytest.raises(NonPositivePrecision):
        choose_correlator_order(0.0, 1.0, 4)


def test_identity_observable_has_flat_response(rng):
    m = random_model(rng, topology_pairs("path", 4), 4)
    r = correlator(m, query(0, 3, np.eye(4), 1e-7, 3))
    assert r.coefficients[0] == pytest.approx(1.0, rel=1e-12)
    for c in r.coefficients[1:]:
        assert abs(c) <= 1e-14
    assert r.value == pytest.approx(1.0)
