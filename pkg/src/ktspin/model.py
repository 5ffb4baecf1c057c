"""Spin model: vertices with local fields plus two-qubit edge perturbations.

A model lives on a finite graph.  Vertex ``u`` carries a field strength
``delta_u > 0`` that penalizes its excited state; each edge ``(u, v)``
carries an arbitrary two-qubit operator acting on the pair.  The basis
convention for a 4x4 edge operator is ``index = 2*b_u + b_v`` where a bit
is 1 when that vertex is excited, so ``entries[row][col]`` is the
amplitude connecting configuration ``col`` to ``row``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DanglingVertexId,
    NonPositiveGap,
    ParseError,
    SelfLoop,
)

_PAULI_1Q = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_WS = re.compile(r"\s*")
_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?")
_PAREN = re.compile(r"\(([^()]*)\)")
_PAULI_PAIR = re.compile(r"[IXYZ]{2}")


def parse_pauli_expression(text):
    """Parse a sum of two-qubit Pauli terms into a 4x4 complex matrix.

    Accepts forms like ``"XX"``, ``"-0.5 ZI + 0.25 XY"``, ``"1j*YZ"`` and
    parenthesized complex coefficients like ``"(1+2j) XZ"``.  The first
    letter acts on the edge's first endpoint, the second on the other.
    Raises ParseError with the offending position on malformed input.
    """
    out = np.zeros((4, 4), dtype=complex)
    pos = _WS.match(text, 0).end()
    if pos == len(text):
        raise ParseError("empty operator expression", pos)
    first = True
    while pos < len(text):
        sign = 1.0
        if text[pos] in "+-":
            sign = -1.0 if text[pos] == "-" else 1.0
            pos = _WS.match(text, pos + 1).end()
        elif not first:
            raise ParseError("expected '+' or '-' between terms", pos)
        first = False
        coeff = complex(sign)
        m = _PAREN.match(text, pos)
        if m is not None:
            inner = m.group(1).replace(" ", "")
            try:
                coeff = sign * complex(inner)
            except ValueError:
                raise ParseError(f"bad complex coefficient '{m.group(1)}'", pos) from None
            pos = _WS.match(text, m.end()).end()
            if pos < len(text) and text[pos] == "*":
                pos = _WS.match(text, pos + 1).end()
        else:
            m = _NUMBER.match(text, pos)
            if m is not None:
                coeff = sign * complex(m.group(0))
                pos = _WS.match(text, m.end()).end()
                if pos < len(text) and text[pos] == "*":
                    pos = _WS.match(text, pos + 1).end()
        m = _PAULI_PAIR.match(text, pos)
        if m is None:
            raise ParseError("expected two Pauli letters from {I,X,Y,Z}", pos)
        a, b = m.group(0)
        out += coeff * np.kron(_PAULI_1Q[a], _PAULI_1Q[b])
        pos = _WS.match(text, m.end()).end()
    return out


class TwoQubitOperator:
    """Immutable 4x4 complex operator on an ordered pair of vertices."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=complex)
        if arr.shape != (4, 4):
            raise ParseError(f"edge operator must be 4x4, got shape {arr.shape}")
        if not np.all(np.isfinite(arr.view(float))):
            raise ParseError("edge operator has non-finite entries")
        arr.setflags(write=False)
        self.entries = arr

    @classmethod
    def from_pauli(cls, text):
        return cls(parse_pauli_expression(text))

    def norm(self):
        """Spectral norm (largest singular value)."""
        return float(np.linalg.svd(self.entries, compute_uv=False)[0])

    def is_hermitian(self, tol=1e-12):
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def __repr__(self):
        return f"TwoQubitOperator({self.entries.tolist()!r})"


@dataclass
class Vertex:
    """Graph vertex with the field strength penalizing its excited state."""

    id: int
    delta: float


@dataclass
class EdgeTerm:
    """Perturbation term acting on the ordered vertex pair (u, v)."""

    u: int
    v: int
    op: TwoQubitOperator


@dataclass(eq=False)
class SpinModel:
    """Validated spin model; derived quantities are cached by validate()."""

    vertices: list
    edges: list
    _derived: dict = field(default=None, repr=False, compare=False)

    def validate(self):
        """Check structural invariants and cache derived quantities.

        Raises NonPositiveGap, DanglingVertexId or SelfLoop on bad input.
        Returns self so calls can be chained.
        """
        if self._derived is not None:
            return self
        n = len(self.vertices)
        ids = [v.id for v in self.vertices]
        if sorted(ids) != list(range(n)):
            raise DanglingVertexId(f"vertex ids must be exactly 0..{n - 1} with no gaps")
        deltas = [0.0] * n
        for v in self.vertices:
            if not (v.delta > 0):
                raise NonPositiveGap(f"vertex {v.id} has non-positive field {v.delta}")
            deltas[v.id] = float(v.delta)
        degree = [0] * n
        for e in self.edges:
            if e.u == e.v:
                raise SelfLoop(f"edge ({e.u}, {e.v}) is a self-loop")
            for w in (e.u, e.v):
                if not (0 <= w < n):
                    raise DanglingVertexId(f"edge endpoint {w} outside 0..{n - 1}")
            degree[e.u] += 1
            degree[e.v] += 1
        j_max = max((e.op.norm() for e in self.edges), default=0.0)
        self._derived = {
            "deltas": deltas,
            "Delta": min(deltas) if deltas else 0.0,
            "J": j_max,
            "d": max(degree) if degree else 0,
            "hermitian": all(e.op.is_hermitian() for e in self.edges),
        }
        return self

    @property
    def n(self):
        return len(self.vertices)

    @property
    def deltas(self):
        return self.validate()._derived["deltas"]

    @property
    def Delta(self):
        """Smallest field strength over all vertices."""
        return self.validate()._derived["Delta"]

    @property
    def J(self):
        """Largest spectral norm over all edge operators."""
        return self.validate()._derived["J"]

    @property
    def d(self):
        """Largest number of incident edges, counted with multiplicity."""
        return self.validate()._derived["d"]

    @property
    def hermitian(self):
        return self.validate()._derived["hermitian"]

    @property
    def eps0(self):
        """Convergence threshold 2^-18 * Delta / (d * J); inf without edges."""
        dj = self.d * self.J
        if dj == 0:
            return float("inf")
        return 2.0 ** -18 * self.Delta / dj

    @property
    def eps0_star(self):
        """Tightened threshold 2^-18 * Delta / ((d + 1) * J) used for correlators."""
        dj = (self.d + 1) * self.J
        if self.J == 0:
            return float("inf")
        return 2.0 ** -18 * self.Delta / dj


def model_from_dict(data):
    """Build a validated SpinModel from the JSON document structure."""
    try:
        raw_vertices = data["vertices"]
        raw_edges = data["edges"]
    except (KeyError, TypeError):
        raise ParseError("model document needs 'vertices' and 'edges' lists") from None
    vertices = []
    for rv in raw_vertices:
        try:
            vertices.append(Vertex(id=int(rv["id"]), delta=float(rv["delta"])))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"bad vertex entry {rv!r}") from None
    edges = []
    for re_ in raw_edges:
        try:
            u = int(re_["u"])
            v = int(re_["v"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"bad edge entry {re_!r}") from None
        has_matrix = "matrix" in re_
        has_pauli = "pauli" in re_
        if has_matrix == has_pauli:
            raise ParseError(f"edge ({u}, {v}) needs exactly one of 'matrix' or 'pauli'")
        if has_pauli:
            op = TwoQubitOperator.from_pauli(re_["pauli"])
        else:
            mat = re_["matrix"]
            try:
                arr = [[complex(cell[0], cell[1]) for cell in row] for row in mat]
            except (TypeError, IndexError, ValueError):
                raise ParseError(f"edge ({u}, {v}) matrix must be 4x4 of [re, im] pairs") from None
            op = TwoQubitOperator(arr)
        edges.append(EdgeTerm(u=u, v=v, op=op))
    return SpinModel(vertices=vertices, edges=edges).validate()


def model_to_dict(model):
    """Serialize a model to the JSON document structure (matrix form)."""
    return {
        "vertices": [{"id": v.id, "delta": v.delta} for v in model.vertices],
        "edges": [
            {
                "u": e.u,
                "v": e.v,
                "matrix": [
                    [[cell.real, cell.imag] for cell in row]
                    for row in e.op.entries.tolist()
                ],
            }
            for e in model.edges
        ],
    }


def load_model(path):
    """Load and validate a model from a JSON file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None
    return model_from_dict(data)


def save_model(model, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
