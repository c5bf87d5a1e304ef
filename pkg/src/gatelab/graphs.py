"""Labeled graph-state engine.

Graphs are simple, undirected, and labeled: vertex identities matter and the
orbit search never permutes them (physical qubits are distinguishable).
Vertex v of an n-vertex graph maps to statevector bit n-1-v, i.e. vertex 0
is the most significant bit, matching the qubit ordering used by
:mod:`gatelab.gates`.

The local-complementation rule is realized by the standard local Clifford
(half X-rotation on the pivot, quarter Z-phases on its neighbours), which is
verified at statevector level whenever the space is small enough.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Union

import numpy as np

from .gates import entangling_unitary

STATEVECTOR_GUARD = 16
LC_VERIFY_GUARD = 12
DEFAULT_ORBIT_CAP = 1_000_000

SQRT_MINUS_IX = np.array([[1, -1j], [-1j, 1]], dtype=complex) / math.sqrt(2)
SQRT_PLUS_IZ = np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)])


class InternalVerificationError(RuntimeError):
    """A construction that should be exact failed its self-check."""


@dataclass(frozen=True)
class Graph:
    """Adjacency bitset rows; row v has bit u set iff {u, v} is an edge."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= 32:
            raise ValueError("vertex count must be in 1..32")
        if len(self.adj) != self.n:
            raise ValueError("adjacency must have one row per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.adj):
            if row & ~full:
                raise ValueError(f"row {v} references vertices >= {self.n}")
            if row >> v & 1:
                raise ValueError(f"self-loop at vertex {v}")
            for u in _bits(row):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at {{{u}, {v}}}")

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = [0] * n
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {{{a}, {b}}} outside 0..{n - 1}")
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        return cls(n, tuple(adj))

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in _bits(self.adj[a]) if a < b]

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj[a] >> b & 1)

    def degree(self, v: int) -> int:
        return bin(self.adj[v]).count("1")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _lc_rows(adj: tuple[int, ...], v: int) -> tuple[int, ...]:
    m = adj[v]
    rows = list(adj)
    for u in _bits(m):
        rows[u] ^= m & ~(1 << u)
    return tuple(rows)


def local_complement(g: Graph, v: int) -> Graph:
    """Toggle every edge among the neighbours of v; involutive."""
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} outside 0..{g.n - 1}")
    return Graph(g.n, _lc_rows(g.adj, v))


def toggle_clique(g: Graph, subset) -> Graph:
    """Flip edge membership for every pair inside `subset`."""
    vs = list(subset)
    if len(set(vs)) != len(vs):
        raise ValueError(f"duplicate vertices in {vs}")
    if len(vs) < 2:
        raise ValueError("need at least two vertices to toggle a clique")
    if any(not 0 <= v < g.n for v in vs):
        raise IndexError(f"subset {vs} outside 0..{g.n - 1}")
    mask = 0
    for v in vs:
        mask |= 1 << v
    rows = list(g.adj)
    for v in vs:
        rows[v] ^= mask & ~(1 << v)
    return Graph(g.n, tuple(rows))


# ---------------------------------------------------------------------------
# stabilizers and statevectors


@dataclass(frozen=True)
class StabilizerGenerator:
    """X on the vertex, Z on each of its neighbours."""

    vertex: int
    x_support: frozenset[int]
    z_support: frozenset[int]


def stabilizers(g: Graph) -> list[StabilizerGenerator]:
    return [
        StabilizerGenerator(v, frozenset({v}), frozenset(g.neighbors(v)))
        for v in range(g.n)
    ]


def _vertex_bit(n: int, v: int) -> int:
    return 1 << (n - 1 - v)


def graph_state_vector(g: Graph) -> np.ndarray:
    """Statevector with amplitude 2^{-n/2} (-1)^{sum over edges x_a x_b}."""
    if g.n > STATEVECTOR_GUARD:
        raise ValueError(f"statevector limited to {STATEVECTOR_GUARD} vertices")
    idx = np.arange(1 << g.n, dtype=np.uint32)
    parity = np.zeros(idx.size, dtype=np.uint32)
    for a, b in g.edges():
        parity ^= ((idx >> (g.n - 1 - a)) & (idx >> (g.n - 1 - b))) & 1
    amps = np.where(parity, -1.0, 1.0) * 2 ** (-g.n / 2)
    return amps.astype(np.complex128)


def stabilizer_expectations(psi: np.ndarray, g: Graph) -> np.ndarray:
    """<psi| X_v prod_{u in N(v)} Z_u |psi> for every vertex v."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (1 << g.n,):
        raise ValueError(f"state has {psi.shape}, graph needs {1 << g.n} amplitudes")
    idx = np.arange(1 << g.n, dtype=np.uint32)
    out = np.empty(g.n)
    for v in range(g.n):
        zmask = 0
        for u in g.neighbors(v):
            zmask |= _vertex_bit(g.n, u)
        sign = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint32(zmask)) & 1)
        flipped = idx ^ np.uint32(_vertex_bit(g.n, v))
        out[v] = np.real(np.sum(np.conj(psi) * sign * psi[flipped]))
    return out


def apply_local_ops(psi: np.ndarray, n: int, ops) -> np.ndarray:
    """Apply (vertex, 2x2 matrix) single-qubit operations to a statevector."""
    psi = np.asarray(psi, dtype=np.complex128).copy()
    for v, mat in ops:
        axis = v  # vertex v is bit n-1-v, i.e. axis v of the (2,)*n tensor
        t = psi.reshape((2,) * n)
        t = np.tensordot(np.asarray(mat), t, axes=([1], [axis]))
        psi = np.moveaxis(t, 0, axis).reshape(-1)
    return psi


def states_equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    overlap = np.vdot(a, b)
    return bool(abs(abs(overlap) - np.linalg.norm(a) * np.linalg.norm(b)) < tol)


def lc_implementing_unitary(g: Graph, v: int) -> list[tuple[int, np.ndarray]]:
    """Local Clifford realizing local complementation at v.

    Returns (vertex, 2x2) pairs: sqrt(-iX) on v and sqrt(iZ) on each
    neighbour.  Verified against the statevectors of both graphs; a
    verification failure would indicate an internal defect, not bad input.
    """
    if g.n > LC_VERIFY_GUARD:
        raise ValueError(f"statevector verification limited to {LC_VERIFY_GUARD} vertices")
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} outside 0..{g.n - 1}")
    ops = [(v, SQRT_MINUS_IX)] + [(u, SQRT_PLUS_IZ) for u in g.neighbors(v)]
    before = graph_state_vector(g)
    after = graph_state_vector(local_complement(g, v))
    if not states_equal_up_to_phase(apply_local_ops(before, g.n, ops), after):
        raise InternalVerificationError(
            f"local complementation unitary failed at vertex {v}"
        )
    return ops


# ---------------------------------------------------------------------------
# orbit search


@dataclass(frozen=True)
class LcWitness:
    """Vertex sequence whose local complementations map source to target."""

    vertices: tuple[int, ...]


def apply_witness(g: Graph, witness: LcWitness) -> Graph:
    for v in witness.vertices:
        g = local_complement(g, v)
    return g


@dataclass(frozen=True)
class LcSearchResult:
    status: str  # "equivalent" | "not_equivalent" | "cap_reached"
    witness: LcWitness | None
    explored: int


def lc_equivalent(g1: Graph, g2: Graph,
                  orbit_cap: int = DEFAULT_ORBIT_CAP) -> LcSearchResult:
    """Breadth-first search over local complementations from g1.

    Finds a shortest witness taking g1 to g2, proves the two graphs sit in
    different orbits (search exhausted), or gives up once `orbit_cap`
    distinct graphs have been seen; the three outcomes are distinguished in
    the result status.  Labeled comparison: vertices are never permuted.
    """
    if g1.n != g2.n:
        raise ValueError("graphs must share the vertex count")
    start, target = g1.adj, g2.adj
    if start == target:
        return LcSearchResult("equivalent", LcWitness(()), 1)
    parent: dict[tuple[int, ...], tuple[tuple[int, ...], int] | None] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for v in range(g1.n):
            if bin(node[v]).count("1") < 2:
                continue  # identity move
            child = _lc_rows(node, v)
            if child in parent:
                continue
            parent[child] = (node, v)
            if child == target:
                seq = []
                cur = child
                while parent[cur] is not None:
                    prev, pv = parent[cur]
                    seq.append(pv)
                    cur = prev
                return LcSearchResult(
                    "equivalent", LcWitness(tuple(reversed(seq))), len(parent)
                )
            if len(parent) >= orbit_cap:
                return LcSearchResult("cap_reached", None, len(parent))
            queue.append(child)
    return LcSearchResult("not_equivalent", None, len(parent))


# ---------------------------------------------------------------------------
# fusion plans


@dataclass(frozen=True)
class Entangle:
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class Cz:
    a: int
    b: int


@dataclass(frozen=True)
class LocalComplement:
    vertex: int


Step = Union[Entangle, Cz, LocalComplement]


@dataclass(frozen=True)
class FusionPlan:
    """Ordered entangling/complementation steps aimed at a target graph.

    Fresh qubits start in (|0>+|1>)/sqrt(2): the plan always begins from the
    empty graph on `n_qubits` vertices.  Plans whose step pattern is an
    analogy rather than a pinned-down construction carry `reconstructed`.
    """

    n_qubits: int
    steps: tuple[Step, ...]
    target: Graph
    description: str = ""
    reconstructed: bool = False

    def __post_init__(self):
        if self.target.n != self.n_qubits:
            raise ValueError("target must live on n_qubits vertices")
        for s in self.steps:
            if isinstance(s, Entangle):
                if len(s.vertices) < 2:
                    raise ValueError("entangling steps need >= 2 vertices")
                bad = [v for v in s.vertices if not 0 <= v < self.n_qubits]
            elif isinstance(s, Cz):
                bad = [v for v in (s.a, s.b) if not 0 <= v < self.n_qubits]
            elif isinstance(s, LocalComplement):
                bad = [] if 0 <= s.vertex < self.n_qubits else [s.vertex]
            else:
                raise TypeError(f"unknown step {s!r}")
            if bad:
                raise ValueError(f"step {s!r} references vertices {bad}")


@dataclass
class PlanOutcome:
    final: Graph
    status: str
    witness: LcWitness | None
    statevector_verified: bool | None
    explored: int


def _embedded_entangling_factors(n: int, subset, diag: np.ndarray) -> np.ndarray:
    """Diagonal gate on `subset`, embedded over all n-bit strings."""
    idx = np.arange(1 << n, dtype=np.uint32)
    sub = np.zeros(idx.size, dtype=np.int64)
    for k, v in enumerate(subset):
        sub = (sub << 1) | ((idx >> (n - 1 - v)) & 1)
    return diag[sub]


def run_plan(plan: FusionPlan, orbit_cap: int = DEFAULT_ORBIT_CAP,
             statevector: bool | None = None) -> PlanOutcome:
    """Execute a fusion plan and test equivalence with its target.

    Entangling steps toggle cliques (edge-toggling is exact for them because
    the diagonal frame corrections commute with every controlled-Z); when
    the space is small enough the run also carries the statevector through
    each step, checks it against the graph state after that step, and
    replays any found witness with local Cliffords against the target state.
    """
    if statevector is None:
        statevector = plan.n_qubits <= 14
    g = Graph.empty(plan.n_qubits)
    psi = None
    verified: bool | None = None
    if statevector:
        psi = graph_state_vector(g).copy()
        verified = True

    for step in plan.steps:
        if isinstance(step, Entangle):
            g = toggle_clique(g, step.vertices)
            if statevector:
                diag = np.diag(entangling_unitary(len(step.vertices), math.pi, 1.0))
                psi = psi * _embedded_entangling_factors(
                    plan.n_qubits, step.vertices, diag
                )
        elif isinstance(step, Cz):
            g = toggle_clique(g, (step.a, step.b))
            if statevector:
                diag = np.diag(entangling_unitary(2, math.pi, 1.0))
                psi = psi * _embedded_entangling_factors(
                    plan.n_qubits, (step.a, step.b), diag
                )
        else:
            prev = g
            g = local_complement(g, step.vertex)
            if statevector:
                ops = [(step.vertex, SQRT_MINUS_IX)] + [
                    (u, SQRT_PLUS_IZ) for u in prev.neighbors(step.vertex)
                ]
                psi = apply_local_ops(psi, plan.n_qubits, ops)
        if statevector:
            verified = verified and states_equal_up_to_phase(
                psi, graph_state_vector(g)
            )

    result = lc_equivalent(g, plan.target, orbit_cap=orbit_cap)
    if statevector and result.status == "equivalent":
        chain = psi
        walk = g
        for v in result.witness.vertices:
            ops = [(v, SQRT_MINUS_IX)] + [(u, SQRT_PLUS_IZ) for u in walk.neighbors(v)]
            chain = apply_local_ops(chain, plan.n_qubits, ops)
            walk = local_complement(walk, v)
        verified = verified and states_equal_up_to_phase(
            chain, graph_state_vector(plan.target)
        )
    return PlanOutcome(g, result.status, result.witness, verified, result.explored)


# ---------------------------------------------------------------------------
# import/export


def to_adjacency_text(g: Graph) -> str:
    lines = [str(g.n)]
    for v in range(g.n):
        lines.append(f"{v}: " + " ".join(str(u) for u in g.neighbors(v)))
    return "\n".join(lines) + "\n"


def from_adjacency_text(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty adjacency text")
    n = int(lines[0])
    edges = set()
    for ln in lines[1:]:
        head, _, rest = ln.partition(":")
        v = int(head)
        for tok in rest.split():
            u = int(tok)
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(edges))


def to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        lines.append(f"  {v};")
    for a, b in g.edges():
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
