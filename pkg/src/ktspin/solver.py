"""Order-by-order construction of the ground-state creation coefficients.

The ground state is represented as ``exp(-C)`` applied to the all-zero
configuration, where ``C`` is a sum of creation operators over vertex
sets with scalar coefficients.  Expanding in the perturbation strength
gives one coefficient table per order.  Order 1 reads matrix elements of
the edge terms directly; each later order combines up to four
lower-order sets against every edge through the commutator kernel.

Tuples of lower-order sets are enumerated as multisets in a fixed pool
order with a 1/(multiplicity factorial) weight per repeated item, which
sums the same terms as ordered tuples weighted 1/k! while visiting each
combination once.  Exact zeros are never stored, and every loop runs in
a reproducible order, so reruns produce identical bytes.
"""

from __future__ import annotations

from .kernel import target_matrix_elements
from .scalars import scalar_abs
from .setalg import (
    CoefficientTable,
    bin_candidates,
    merge_disjoint,
    one_norm,
    table_insert,
)


class SolverState:
    """Coefficient table plus bookkeeping for resuming at the next order."""

    __slots__ = (
        "model",
        "table",
        "current_order",
        "norms",
        "threshold",
        "deltas",
        "terms",
        "_pools",
        "_mecaches",
        "_e0",
    )

    def __init__(self, model, terms, threshold):
        self.model = model
        self.table = CoefficientTable()
        self.current_order = 0
        self.norms = []
        self.threshold = threshold
        self.deltas = model.deltas
        self.terms = terms
        self._pools = [[] for _ in terms]
        self._mecaches = [{} for _ in terms]
        self._e0 = {}

    def excitation_energy(self, members):
        e = self._e0.get(members)
        if e is None:
            deltas = self.deltas
            e = 0.0
            for w in members:
                e += deltas[w]
            self._e0[members] = e
        return e


def _prepare_terms(model):
    """Edge terms as (u, v, nested tuple of entries) for fast scalar access."""
    return [
        (e.u, e.v, tuple(tuple(row) for row in e.op.entries.tolist()))
        for e in model.edges
    ]


def _freeze_order(state, acc, order):
    """Divide accumulated numerators by excitation energies and store them."""
    table = state.table
    threshold = state.threshold
    for members, numerator in acc.items():
        value = numerator / state.excitation_energy(members)
        if value == 0:
            continue
        if threshold > 0.0 and scalar_abs(value) < threshold:
            continue
        table_insert(table, order, members, value)
    state.current_order = order
    state.norms.append(one_norm(table, order))
    _extend_pools(state, order)


def _extend_pools(state, order):
    """Append the new order's candidate records to every edge pool.

    A record is (order, outside bitmask, outside tuple, edge bits, value);
    pools stay sorted by order because orders are appended in sequence.
    """
    table = state.table
    for idx, (u, v, _entries) in enumerate(state.terms):
        pool = state._pools[idx]
        for members, value in bin_candidates(table, u, v, order):
            sb = (2 if u in members else 0) | (1 if v in members else 0)
            out = tuple(w for w in members if w != u and w != v)
            mask = 0
            for w in out:
                mask |= 1 << w
            pool.append((order, mask, out, sb, value))


def first_order(model, threshold=0.0):
    """Solver state holding the first-order coefficient table."""
    model.validate()
    state = SolverState(model, _prepare_terms(model), threshold)
    _first_order_into(state)
    return state


def _first_order_into(state):
    acc = {}
    for u, v, entries in state.terms:
        pair_sets = (
            ((v,), entries[1][0]),
            ((u,), entries[2][0]),
            ((u, v) if u < v else (v, u), entries[3][0]),
        )
        for members, value in pair_sets:
            if value != 0:
                prev = acc.get(members)
                acc[members] = value if prev is None else prev + value
    _freeze_order(state, acc, 1)
    return state


def advance_order(state):
    """Extend the table by one order from the already stored ones."""
    budget = state.current_order
    acc = {}
    for idx, (u, v, entries) in enumerate(state.terms):
        pool = state._pools[idx]
        if not pool:
            continue
        mecache = state._mecaches[idx]
        npool = len(pool)
        bit_sets = (None, (v,), (u,), (u, v) if u < v else (v, u))

        def emit(sbits, coeff, denom, outside):
            key = sbits if len(sbits) == 1 else tuple(sorted(sbits))
            mes = mecache.get(key)
            if mes is None:
                mes = target_matrix_elements(key, entries)
                mecache[key] = mes
            if not mes:
                return
            weight = coeff / denom if denom > 1 else coeff
            for s, me in mes.items():
                if s == 0:
                    if not outside:
                        continue
                    target = outside
                else:
                    target = merge_disjoint(outside, bit_sets[s])
                contrib = weight * me
                if contrib != 0:
                    prev = acc.get(target)
                    acc[target] = contrib if prev is None else prev + contrib

        def grow(start, remaining, used, outside, sbits, coeff, denom, last, run):
            for i in range(start, npool):
                item = pool[i]
                order = item[0]
                if order > remaining:
                    break
                mask = item[1]
                if mask & used:
                    continue
                coeff2 = coeff * item[4]
                if i == last:
                    run2 = run + 1
                    denom2 = denom * run2
                else:
                    run2 = 1
                    denom2 = denom
                left = remaining - order
                outside2 = merge_disjoint(outside, item[2]) if item[2] else outside
                sbits2 = sbits + (item[3],)
                if left == 0:
                    emit(sbits2, coeff2, denom2, outside2)
                elif len(sbits2) < 4:
                    grow(i, left, used | mask, outside2, sbits2, coeff2, denom2, i, run2)

        grow(0, budget, 0, (), (), 1.0, 1, -1, 0)
    _freeze_order(state, acc, budget + 1)
    return state


def solve(model, order, threshold=0.0):
    """Coefficient tables for all orders 1..order."""
    if order < 1:
        raise ValueError("solve needs order >= 1")
    state = first_order(model, threshold)
    while state.current_order < order:
        advance_order(state)
    return state


def solve_prepared(model, terms, order, threshold=0.0):
    """Like solve() but over externally prepared edge terms.

    The entries may use any scalar type supporting ring arithmetic; this
    is how derivative-carrying runs reuse the solver unchanged.
    """
    if order < 1:
        raise ValueError("solve needs order >= 1")
    model.validate()
    state = SolverState(model, terms, threshold)
    _first_order_into(state)
    while state.current_order < order:
        advance_order(state)
    return state
