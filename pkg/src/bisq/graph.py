"""Hidden graph, generators, edge-list I/O, and exact brute-force oracles.

The graph is immutable after construction.  Adjacency lives in a packed
bit matrix so the query oracle can answer set-vs-set edge tests with a
few word operations; test code uses the exact oracles here as ground
truth for everything the estimators report.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from . import bitset
from .errors import GraphParseError
from .seeding import rng_for


class VertexSet:
    """Dense bit-indexed subset of 0..n-1."""

    __slots__ = ("n", "words")

    def __init__(self, n: int, words: Optional[np.ndarray] = None):
        self.n = n
        if words is None:
            words = bitset.empty_words(n)
        self.words = words
        self.words.setflags(write=False)

    @classmethod
    def from_indices(cls, n: int, indices) -> "VertexSet":
        return cls(n, bitset.pack_indices(n, indices))

    @classmethod
    def full(cls, n: int) -> "VertexSet":
        return cls(n, bitset.full_words(n))

    @classmethod
    def empty(cls, n: int) -> "VertexSet":
        return cls(n)

    def members(self) -> np.ndarray:
        return bitset.members(self.words, self.n)

    def __len__(self) -> int:
        return bitset.popcount(self.words)

    def __contains__(self, v: int) -> bool:
        return 0 <= v < self.n and bitset.contains(self.words, v)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.words & other.words)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.words | other.words)

    def difference(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.n, self.words & ~other.words)

    def complement(self) -> "VertexSet":
        return VertexSet(self.n, bitset.trim_tail(~self.words, self.n))

    def isdisjoint(self, other: "VertexSet") -> bool:
        return not bool((self.words & other.words).any())

    def __eq__(self, other) -> bool:
        return (isinstance(other, VertexSet) and self.n == other.n
                and bool(np.array_equal(self.words, other.words)))

    def __hash__(self) -> int:
        return hash((self.n, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"VertexSet(n={self.n}, size={len(self)})"


class Graph:
    """Simple undirected graph with packed adjacency.

    Vertex ids are dense 0..n-1.  Construction validates simplicity
    (no self-loops, symmetric adjacency) and caches m.
    """

    __slots__ = ("n", "adj_words", "m", "_degrees")

    def __init__(self, n: int, adj_words: np.ndarray):
        if adj_words.shape != (n, bitset.word_count(n)):
            raise ValueError("adjacency matrix shape mismatch")
        self.n = n
        self.adj_words = adj_words
        self.adj_words.setflags(write=False)
        degs = np.bitwise_count(adj_words).sum(axis=1).astype(np.int64)
        self._degrees = degs
        self._degrees.setflags(write=False)
        total = int(degs.sum())
        if total % 2:
            raise ValueError("degree sum is odd; adjacency not symmetric")
        self.m = total // 2
        self._check_invariants()

    def _check_invariants(self) -> None:
        for v in range(self.n):
            if bitset.contains(self.adj_words[v], v):
                raise ValueError(f"self-loop at vertex {v}")
        # symmetry: adjacency bit matrix must equal its transpose
        bits = np.unpackbits(self.adj_words.view(np.uint8), axis=1,
                             bitorder="little")[:, : self.n]
        if not np.array_equal(bits, bits.T):
            raise ValueError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = np.zeros((n, bitset.word_count(n)), dtype=np.uint64)
        one = np.uint64(1)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u},{v})")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            adj[u, v >> 6] |= one << np.uint64(v & 63)
            adj[v, u >> 6] |= one << np.uint64(u & 63)
        return cls(n, adj)

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def neighbors(self, v: int) -> np.ndarray:
        return bitset.members(self.adj_words[v], self.n)

    def neighborhood_words(self, member_ids: np.ndarray) -> np.ndarray:
        """Packed union of adjacency rows: Gamma(S) for S given by ids."""
        if len(member_ids) == 0:
            return bitset.empty_words(self.n)
        return np.bitwise_or.reduce(self.adj_words[member_ids], axis=0)

    def has_edge(self, u: int, v: int) -> bool:
        return bitset.contains(self.adj_words[u], v)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    out.append((u, int(v)))
        return out


# ---------------------------------------------------------------------------
# exact oracles (test ground truth)
# ---------------------------------------------------------------------------

def exact_neighborhood_size(g: Graph, left: VertexSet, right: VertexSet) -> int:
    """|Gamma(L) ∩ R| by direct enumeration.  L and R must be disjoint."""
    if not left.isdisjoint(right):
        raise ValueError("left and right sets overlap")
    gamma = g.neighborhood_words(left.members())
    return bitset.popcount(gamma & right.words)


def exact_components(g: Graph) -> list[list[int]]:
    """Connected components as sorted vertex lists (union-find)."""
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges():
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def exact_connected(g: Graph) -> tuple[bool, list[list[int]]]:
    """(is_connected, components).  n <= 1 counts as connected."""
    comps = exact_components(g)
    return len(comps) <= 1, comps


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_gnp(n: int, p: float, seed=0) -> Graph:
    """G(n, p): every unordered pair is an edge independently w.p. p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = rng_for(seed, "gnp", n)
    adj = np.zeros((n, bitset.word_count(n)), dtype=np.uint64)
    if p > 0.0:
        tri = rng.random((n, n)) < p
        tri = np.triu(tri, k=1)
        sym = tri | tri.T
        packed = np.packbits(sym, axis=1, bitorder="little")
        pad = bitset.word_count(n) * 8 - packed.shape[1]
        if pad:
            packed = np.pad(packed, ((0, 0), (0, pad)))
        adj = packed.view(np.uint64)
    return Graph(n, adj.copy())


def _block_edges(kind: str, size: int, offset: int, p: float,
                 seed) -> list[tuple[int, int]]:
    ids = list(range(offset, offset + size))
    if kind == "clique":
        return [(ids[i], ids[j]) for i in range(size) for j in range(i + 1, size)]
    if kind == "path":
        return [(ids[i], ids[i + 1]) for i in range(size - 1)]
    if kind == "star":
        return [(ids[0], ids[i]) for i in range(1, size)]
    if kind == "cycle":
        edges = [(ids[i], ids[i + 1]) for i in range(size - 1)]
        if size > 2:
            edges.append((ids[0], ids[-1]))
        return edges
    if kind == "gnp":
        sub = gen_gnp(size, p, seed)
        return [(u + offset, v + offset) for u, v in sub.edges()]
    raise ValueError(f"unknown component kind {kind!r}")


def gen_family(kind: str, *, n: int = 0, a: int = 0, b: int = 0, k: int = 0,
               size: int = 0, sizes: Optional[Sequence[int]] = None,
               inner: str = "clique", p: float = 0.5, seed=0) -> Graph:
    """Named deterministic topologies.

    kinds: star, path, clique, cycle, complete_bipartite(a, b), and
    components(k, sizes|size, inner) which lays out k disjoint blocks.
    """
    if kind in ("star", "path", "clique", "cycle"):
        if n < 1:
            raise ValueError("n must be >= 1")
        return Graph.from_edges(n, _block_edges(kind, n, 0, p, seed))
    if kind == "complete_bipartite":
        if a < 1 or b < 1:
            raise ValueError("both sides must be nonempty")
        edges = [(i, a + j) for i in range(a) for j in range(b)]
        return Graph.from_edges(a + b, edges)
    if kind == "components":
        if sizes is None:
            if k < 1 or size < 1:
                raise ValueError("components needs k and size (or sizes)")
            sizes = [size] * k
        if k and len(sizes) != k:
            raise ValueError("len(sizes) must equal k")
        edges: list[tuple[int, int]] = []
        offset = 0
        for idx, sz in enumerate(sizes):
            edges.extend(_block_edges(inner, sz, offset, p, (seed, idx)))
            offset += sz
        return Graph.from_edges(offset, edges)
    raise ValueError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# edge-list text I/O
# ---------------------------------------------------------------------------

def load_edge_list(text: str) -> Graph:
    """Parse "u v" lines into a Graph.

    An optional leading header "# n=<N>" fixes the vertex count; without
    it, n is 1 + the largest id seen.  Lines that are blank are skipped.
    Self-loops and malformed lines raise GraphParseError naming the line.
    """
    n_header: Optional[int] = None
    edges: list[tuple[int, int]] = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    n_header = int(body[2:])
                except ValueError:
                    raise GraphParseError(f"line {lineno}: bad header {line!r}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: expected two integers, got {line!r}")
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop {u}")
        if u < 0 or v < 0:
            raise GraphParseError(f"line {lineno}: negative vertex id")
        if n_header is not None and (u >= n_header or v >= n_header):
            raise GraphParseError(
                f"line {lineno}: vertex id exceeds declared n={n_header}")
        max_id = max(max_id, u, v)
        edges.append((min(u, v), max(u, v)))
    n = n_header if n_header is not None else max_id + 1
    if n < 0:
        n = 0
    return Graph.from_edges(n, sorted(set(edges)))


def dump_edge_list(g: Graph) -> str:
    """Writer form: header plus one "u v" line per edge, u < v, sorted."""
    lines = [f"# n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
