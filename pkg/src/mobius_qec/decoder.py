"""Exact minimum-weight perfect-matching decoding on check-matrix graphs.

Each check is a node and each qubit an edge: a weight-2 column joins two
checks, a weight-1 column joins its check to a shared boundary node.  Flagged
checks are paired by an exact blossom matching (networkx) on the complete
graph of defects plus one boundary copy per defect.

Ties are broken deterministically.  Under ``tie_break="lex"`` a witness
path is the lexicographically least shortest path when adjacency is scanned
by ascending qubit index, and among optimal matchings the one whose edge set,
ordered by (weight, lower endpoint, higher endpoint), is lexicographically
least is returned.  ``"reverse"`` flips both orders and exists to audit how
sensitive a result is to the tie rule.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .gf2 import BinaryMatrix, bits_to_int, support
from .stabilizer import CssCode, PauliOperator, ResidualClass, classify_residual

TIE_BREAKS = ("lex", "reverse")


class NotMatchableError(ValueError):
    """A check matrix column does not have weight 1 or 2."""


@dataclass
class MatchingGraph:
    check_nodes: int
    has_boundary: bool
    edges: list[tuple[int, int, int]]
    adjacency: list[list[tuple[int, int]]] = field(repr=False)
    _dist: dict[int, list[int]] = field(default_factory=dict, repr=False)

    @property
    def boundary(self) -> int:
        """Node index of the boundary (only meaningful when ``has_boundary``)."""
        return self.check_nodes

    def distances_from(self, node: int) -> list[int]:
        """BFS edge counts from ``node``; -1 marks unreachable nodes."""
        cached = self._dist.get(node)
        if cached is not None:
            return cached
        dist = [-1] * len(self.adjacency)
        dist[node] = 0
        queue = deque([node])
        while queue:
            u = queue.popleft()
            for _, v in self.adjacency[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        self._dist[node] = dist
        return dist

    def path(self, source: int, target: int, reverse: bool = False) -> list[int]:
        """Qubits along the tie-broken shortest path from ``source`` to ``target``."""
        to_target = self.distances_from(target)
        if to_target[source] < 0:
            raise ValueError(f"nodes {source} and {target} are disconnected")
        qubits = []
        u = source
        while u != target:
            step = to_target[u] - 1
            options = reversed(self.adjacency[u]) if reverse else self.adjacency[u]
            for q, v in options:
                if to_target[v] == step:
                    qubits.append(q)
                    u = v
                    break
        return qubits

    def edge_list_text(self) -> str:
        """One ``a b qubit`` line per edge, boundary written as ``B``, 1-based."""
        lines = []
        for a, b, q in self.edges:
            bb = "B" if self.has_boundary and b == self.boundary else str(b + 1)
            lines.append(f"{a + 1} {bb} {q + 1}")
        return "\n".join(lines) + "\n"


def build_matching_graph(h: BinaryMatrix) -> MatchingGraph:
    weights = h.column_weights()
    bad = [q for q, w in enumerate(weights) if w not in (1, 2)]
    if bad:
        raise NotMatchableError(f"columns {[q + 1 for q in bad]} have weight outside {{1, 2}}")
    r = h.n_rows
    has_boundary = any(w == 1 for w in weights)
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(r + (1 if has_boundary else 0))]
    edges = []
    for q, col in enumerate(h.columns()):
        ends = support(col)
        a, b = (ends[0], r) if len(ends) == 1 else ends
        edges.append((a, b, q))
        adjacency[a].append((q, b))
        adjacency[b].append((q, a))
    for adj in adjacency:
        adj.sort()
    return MatchingGraph(r, has_boundary, edges, adjacency)


def defect_distances(graph: MatchingGraph, defects: Sequence[int],
                     reverse: bool = False) -> tuple[np.ndarray, dict[tuple[int, int], list[int]]]:
    """Pairwise defect distances plus boundary distances.

    Returns a (m, m+1) matrix whose last column is the distance to the
    boundary (-1 without one) and witness paths keyed by defect positions;
    the key ``(i, -1)`` holds the path from defect ``i`` to the boundary.
    """
    m = len(defects)
    for d in defects:
        if not 0 <= d < graph.check_nodes:
            raise ValueError(f"defect {d} is not a check node")
    dist = np.full((m, m + 1), -1, dtype=np.int64)
    witnesses: dict[tuple[int, int], list[int]] = {}
    for i, a in enumerate(defects):
        row = graph.distances_from(a)
        for j, b in enumerate(defects):
            if row[b] < 0:
                if not graph.has_boundary:
                    raise ValueError(f"defects {a} and {b} are disconnected")
                continue
            dist[i, j] = row[b]
            if i < j:
                witnesses[(i, j)] = graph.path(a, b, reverse)
        if graph.has_boundary and row[graph.boundary] >= 0:
            dist[i, m] = row[graph.boundary]
            witnesses[(i, -1)] = graph.path(a, graph.boundary, reverse)
    return dist, witnesses


def mwpm(weights: Sequence[Sequence[int | None]], tie_break: str = "lex") -> list[tuple[int, int]]:
    """Exact minimum-weight perfect matching on a (possibly incomplete) graph.

    ``weights[a][b]`` is an integer edge weight or None for a missing edge.
    Returns sorted ``(a, b)`` pairs with ``a < b``.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    size = len(weights)
    if size == 0:
        return []
    if size % 2:
        raise ValueError(f"no perfect matching on {size} nodes")
    ranked = sorted(
        (weights[a][b], a, b)
        for a in range(size)
        for b in range(a + 1, size)
        if weights[a][b] is not None
    )
    if not ranked:
        raise ValueError("graph has no edges")
    n_edges = len(ranked)
    w_max = max(w for w, _, _ in ranked)
    # weight dominates; the bonus bits rank tied matchings lexicographically
    g = nx.Graph()
    g.add_nodes_from(range(size))
    for r, (w, a, b) in enumerate(ranked):
        bonus = 1 << (n_edges - 1 - r) if tie_break == "lex" else 1 << r
        g.add_edge(a, b, weight=((w_max + 1 - w) << n_edges) + bonus)
    matching = nx.max_weight_matching(g, maxcardinality=True)
    pairs = sorted((min(a, b), max(a, b)) for a, b in matching)
    if 2 * len(pairs) != size:
        raise ValueError("graph admits no perfect matching")
    return pairs


@dataclass(frozen=True)
class DecodeOutcome:
    error: PauliOperator
    correction: PauliOperator
    residual_class: ResidualClass

    @property
    def success(self) -> bool:
        return self.residual_class == "stabilizer"


class MwpmDecoder:
    """Per-code decoder; holds memo tables, so use one instance per worker."""

    def __init__(self, code: CssCode, tie_break: str = "lex", cache_size: int = 1 << 18) -> None:
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie_break {tie_break!r}")
        self.code = code
        self.tie_break = tie_break
        self.graph_x = build_matching_graph(code.h_x)  # X checks -> Z correction
        self.graph_z = build_matching_graph(code.h_z)  # Z checks -> X correction
        self._cache_size = cache_size
        self._cache_x: dict[int, int] = {}
        self._cache_z: dict[int, int] = {}

    def _side(self, graph: MatchingGraph, cache: dict[int, int], flagged: int) -> int:
        if not flagged:
            return 0
        hit = cache.get(flagged)
        if hit is not None:
            return hit
        correction = self._match(graph, support(flagged))
        if len(cache) >= self._cache_size:
            cache.clear()
        cache[flagged] = correction
        return correction

    def _match(self, graph: MatchingGraph, defects: list[int]) -> int:
        reverse = self.tie_break == "reverse"
        dist, witnesses = defect_distances(graph, defects, reverse)
        m = len(defects)
        if graph.has_boundary:
            size = 2 * m
            w: list[list[int | None]] = [[None] * size for _ in range(size)]
            for i in range(m):
                for j in range(i + 1, m):
                    if dist[i, j] >= 0:
                        w[i][j] = w[j][i] = int(dist[i, j])
                w[i][m + i] = w[m + i][i] = int(dist[i, m])
                for j in range(i + 1, m):
                    w[m + i][m + j] = w[m + j][m + i] = 0
        else:
            if m % 2:
                raise ValueError("odd number of defects on a graph without boundary")
            w = [[int(dist[i, j]) if i != j else None for j in range(m)] for i in range(m)]
        correction = 0
        for a, b in mwpm(w, self.tie_break):
            if b < m:
                path = witnesses[(a, b)]
            elif a < m:
                path = witnesses[(a, -1)]
            else:
                continue
            for q in path:
                correction ^= 1 << q
        return correction

    def correct(self, x_flags: int, z_flags: int) -> PauliOperator:
        """Correction for flagged X checks and flagged Z checks, both packed as ints."""
        return PauliOperator(
            self.code.n,
            x=self._side(self.graph_z, self._cache_z, z_flags),
            z=self._side(self.graph_x, self._cache_x, x_flags),
        )

    def decode(self, syndrome_bits: Sequence[int] | np.ndarray) -> PauliOperator:
        bits = [int(b) for b in syndrome_bits]
        code = self.code
        if len(bits) != code.r_x + code.r_z:
            raise ValueError(f"syndrome of length {len(bits)}, expected {code.r_x + code.r_z}")
        return self.correct(bits_to_int(bits[:code.r_x]), bits_to_int(bits[code.r_x:]))

    def decode_and_classify(self, error: PauliOperator) -> DecodeOutcome:
        code = self.code
        correction = self.correct(code.x_check_syndrome(error.z), code.z_check_syndrome(error.x))
        residual = error * correction
        return DecodeOutcome(error, correction, classify_residual(code, residual))

    def fails(self, x: int, z: int) -> bool:
        """Fast path: does decoding the error (x, z) leave a nontrivial logical?"""
        code = self.code
        rx = x ^ self._side(self.graph_z, self._cache_z, code.z_check_syndrome(x))
        if rx not in code.x_stabilizers:
            return True
        rz = z ^ self._side(self.graph_x, self._cache_x, code.x_check_syndrome(z))
        return rz not in code.z_stabilizers


def decode(code: CssCode, syndrome_bits: Sequence[int] | np.ndarray, tie_break: str = "lex") -> PauliOperator:
    return MwpmDecoder(code, tie_break).decode(syndrome_bits)


def decode_and_classify(code: CssCode, error: PauliOperator, tie_break: str = "lex") -> DecodeOutcome:
    return MwpmDecoder(code, tie_break).decode_and_classify(error)


__all__ = [
    "DecodeOutcome",
    "MatchingGraph",
    "MwpmDecoder",
    "NotMatchableError",
    "build_matching_graph",
    "decode",
    "decode_and_classify",
    "defect_distances",
    "mwpm",
]
