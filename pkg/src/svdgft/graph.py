"""Directed weighted graphs, Laplacians and graph generators.

Conventions
-----------
An edge ``(src, dst, w)`` contributes ``A[dst, src] = w`` to the adjacency
matrix, so row ``i`` of ``A`` collects the edges entering ``i`` and the
in-degree is the row sum.  The Laplacian is ``L = D - A`` with ``D`` the
diagonal in-degree matrix, hence ``L @ 1 = 0`` for every graph.

Edge lists are kept in canonical order, sorted by ``(src, dst)``; equality of
graphs is equality of canonical forms.
"""

from collections import deque
from dataclasses import dataclass
import math

import numpy as np

from ._errors import GraphFormatError, GraphValidationError
from .rng import generator

__all__ = [
    "DirectedGraph",
    "adjacency_matrix",
    "build_laplacian",
    "is_eulerian",
    "is_strongly_connected",
    "transpose",
    "circulant_graph",
    "knn_graph",
    "cluster_cycle_graph",
    "random_digraph",
    "random_undirected_graph",
    "random_eulerian_graph",
    "load_graph",
    "save_graph",
    "format_graph",
    "parse_graph",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Weighted directed graph without loops or multiple edges.

    Parameters
    ----------
    n : int
        Number of vertices, labelled ``0 .. n-1``.
    edges : iterable of (int, int, float)
        Directed edges ``(src, dst, weight)``.  Stored sorted by ``(src, dst)``.
    """

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise GraphValidationError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        canon = []
        seen = set()
        for e in self.edges:
            try:
                s, d, w = e
            except (TypeError, ValueError):
                raise GraphValidationError(f"edge {e!r} is not a (src, dst, weight) triple") from None
            if int(s) != s or int(d) != d:
                raise GraphValidationError(f"edge {e!r} has non-integer endpoints")
            s, d, w = int(s), int(d), float(w)
            if not (0 <= s < self.n and 0 <= d < self.n):
                raise GraphValidationError(f"edge ({s}, {d}) has a vertex outside [0, {self.n})")
            if s == d:
                raise GraphValidationError(f"edge ({s}, {d}) is a self-loop")
            if (s, d) in seen:
                raise GraphValidationError(f"edge ({s}, {d}) appears more than once")
            if not math.isfinite(w) or w == 0.0:
                raise GraphValidationError(f"edge ({s}, {d}) has invalid weight {w!r}")
            seen.add((s, d))
            canon.append((s, d, w))
        canon.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def num_edges(self):
        return len(self.edges)

    def adjacency(self):
        return adjacency_matrix(self)

    def laplacian(self):
        return build_laplacian(self)


def adjacency_matrix(g):
    """Dense adjacency with ``A[dst, src] = weight``."""
    A = np.zeros((g.n, g.n))
    for s, d, w in g.edges:
        A[d, s] = w
    return A


def build_laplacian(g):
    """Return the directed Laplacian ``L = D - A`` (in-degree convention)."""
    A = adjacency_matrix(g)
    return np.diag(A.sum(axis=1)) - A


def _degrees(g):
    A = adjacency_matrix(g)
    return A.sum(axis=1), A.sum(axis=0)


def is_eulerian(g):
    """True when weighted in-degree equals weighted out-degree at every vertex."""
    d_in, d_out = _degrees(g)
    scale = max(np.abs(d_in).max(), np.abs(d_out).max())
    return bool(np.all(np.abs(d_in - d_out) <= 1e-12 * scale))


def transpose(g):
    """Reverse every edge."""
    return DirectedGraph(g.n, [(d, s, w) for s, d, w in g.edges])


def _reachable(n, succ, start):
    seen = [False] * n
    seen[start] = True
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in succ[v]:
            if not seen[u]:
                seen[u] = True
                queue.append(u)
    return seen


def is_strongly_connected(g):
    """Breadth-first check that every vertex reaches and is reached by vertex 0."""
    fwd = [[] for _ in range(g.n)]
    bwd = [[] for _ in range(g.n)]
    for s, d, _ in g.edges:
        fwd[s].append(d)
        bwd[d].append(s)
    return all(_reachable(g.n, fwd, 0)) and all(_reachable(g.n, bwd, 0))


def _check_q_set(n, q_set):
    q = [int(v) for v in q_set]
    if not q:
        raise GraphValidationError("generator set Q must be non-empty")
    if any(v != w for v, w in zip(q, q_set)):
        raise GraphValidationError(f"Q must contain integers, got {list(q_set)!r}")
    if any(b <= a for a, b in zip(q, q[1:])):
        raise GraphValidationError(f"Q must be strictly increasing, got {q}")
    if q[0] < 1 or q[-1] > n - 1:
        raise GraphValidationError(f"Q entries must lie in [1, {n - 1}], got {q}")
    return tuple(q)


def circulant_graph(n, q_set):
    """Directed circulant graph with unit-weight edges ``i -> i + q mod n``."""
    if int(n) != n or n < 1:
        raise GraphValidationError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    q = _check_q_set(n, q_set)
    return DirectedGraph(n, [(i, (i + s) % n, 1.0) for i in range(n) for s in q])


def knn_graph(coords, k, weight_low=0.8, weight_high=1.2, seed=0):
    """Directed k-nearest-neighbour graph.

    Each point ``i`` gets an edge ``i -> j`` to each of its ``k`` nearest
    points ``j`` (Euclidean distance, ties broken by the lower vertex id).
    Weights are uniform in ``[weight_low, weight_high]``, drawn in canonical
    edge order from the seeded stream.
    """
    X = np.asarray(coords, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m = X.shape[0]
    if int(k) != k or k < 1:
        raise GraphValidationError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    if m < k + 1:
        raise GraphValidationError(f"need at least k+1 = {k + 1} points, got {m}")
    if weight_low > weight_high:
        raise GraphValidationError("weight_low must not exceed weight_high")
    if not np.all(np.isfinite(X)):
        raise GraphValidationError("coordinates must be finite")
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=-1)
    ids = np.arange(m)
    pairs = []
    for i in range(m):
        order = np.lexsort((ids, d2[i]))
        nbrs = [j for j in order if j != i][:k]
        pairs.extend((i, int(j)) for j in nbrs)
    pairs.sort()
    w = generator(seed, 0x6B6E6E).uniform(weight_low, weight_high, size=len(pairs))
    return DirectedGraph(m, [(s, d, float(x)) for (s, d), x in zip(pairs, w)])


def cluster_cycle_graph(clusters, cluster_size, seed=0):
    """Dense clusters joined by a directed cycle through their port vertices.

    Vertices ``c*cluster_size .. (c+1)*cluster_size - 1`` form cluster ``c``;
    every ordered pair inside a cluster is a unit edge, and the lowest-id
    vertex of cluster ``c`` has a unit edge to the lowest-id vertex of cluster
    ``(c+1) mod clusters``.  The construction involves no randomness; ``seed``
    is accepted so every generator shares one signature.
    """
    if clusters < 2 or cluster_size < 1:
        raise GraphValidationError("need clusters >= 2 and cluster_size >= 1")
    del seed
    edges = {}
    for c in range(clusters):
        base = c * cluster_size
        for a in range(cluster_size):
            for b in range(cluster_size):
                if a != b:
                    edges[(base + a, base + b)] = 1.0
        nxt = ((c + 1) % clusters) * cluster_size
        edges[(base, nxt)] = 1.0
    return DirectedGraph(clusters * cluster_size, [(s, d, w) for (s, d), w in edges.items()])


def random_digraph(n, density, seed, weight_low=0.1, weight_high=2.0):
    """Erdos-Renyi style directed graph with uniform random weights."""
    rng = generator(seed, 0x726467)
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    w = rng.uniform(weight_low, weight_high, size=src.size)
    return DirectedGraph(n, list(zip(src.tolist(), dst.tolist(), w.tolist())))


def random_undirected_graph(n, density, seed, weight_low=0.1, weight_high=2.0):
    """Connected random undirected graph: a random spanning tree plus extra edges."""
    rng = generator(seed, 0x756E64)
    perm = rng.permutation(n)
    pairs = set()
    for a in range(1, n):
        b = int(rng.integers(0, a))
        i, j = sorted((int(perm[a]), int(perm[b])))
        pairs.add((i, j))
    extra = rng.random((n, n)) < density
    for i, j in zip(*np.nonzero(np.triu(extra, 1))):
        pairs.add((int(i), int(j)))
    pairs = sorted(pairs)
    w = rng.uniform(weight_low, weight_high, size=len(pairs))
    edges = []
    for (i, j), x in zip(pairs, w.tolist()):
        edges += [(i, j, x), (j, i, x)]
    return DirectedGraph(n, edges)


def random_eulerian_graph(n, cycles, seed, weight_low=0.5, weight_high=2.0):
    """Strongly connected Eulerian graph built as a union of weighted directed cycles.

    The first cycle is Hamiltonian, which makes the result strongly connected;
    the remaining ``cycles - 1`` cycles run through random vertex subsets.
    Every cycle carries one weight, so in- and out-degree stay balanced, and
    weights of coinciding edges add up.
    """
    if n < 2:
        raise GraphValidationError("need n >= 2")
    rng = generator(seed, 0x65756C)
    acc = {}
    for c in range(max(int(cycles), 1)):
        if c == 0:
            verts = rng.permutation(n)
        else:
            length = int(rng.integers(2, n + 1))
            verts = rng.choice(n, size=length, replace=False)
        w = float(rng.uniform(weight_low, weight_high))
        for a, b in zip(verts, np.roll(verts, -1)):
            key = (int(a), int(b))
            acc[key] = acc.get(key, 0.0) + w
    return DirectedGraph(n, [(s, d, w) for (s, d), w in acc.items()])


def format_graph(g, comment=None):
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(f"n {g.n}")
    lines += [f"{s} {d} {w:.17g}" for s, d, w in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text):
    """Parse the text graph format: ``n <N>`` header then ``src dst weight`` lines."""
    n = None
    edges = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphFormatError(f"expected header 'n <N>', got {line!r}", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise GraphFormatError(f"vertex count must be positive, got {n}", lineno)
            continue
        if len(parts) != 3:
            raise GraphFormatError(f"expected 'src dst weight', got {line!r}", lineno)
        try:
            s, d, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse edge {line!r}", lineno) from None
        if (s, d) in seen:
            raise GraphFormatError(f"edge ({s}, {d}) repeats line {seen[(s, d)]}", lineno)
        seen[(s, d)] = lineno
        try:
            DirectedGraph(n, [(s, d, w)])
        except GraphValidationError as exc:
            raise GraphFormatError(str(exc), lineno) from None
        edges.append((s, d, w))
    if n is None:
        raise GraphFormatError("missing header 'n <N>'")
    return DirectedGraph(n, edges)


def load_graph(path):
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g, path, comment=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(g, comment))
