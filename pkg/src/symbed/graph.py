"""Compressed sparse graph representation, dataset ingestion and statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _weak_components


class GraphFormatError(ValueError):
    """Malformed edge-list or label file."""


@dataclass(frozen=True)
class Graph:
    """Immutable directed multigraph in CSR form.

    Undirected networks are stored as symmetric arc pairs, so `num_edges`
    always counts directed arcs.  Parallel arcs and self-loops are kept.
    """

    num_nodes: int
    offsets: np.ndarray          # int64, length num_nodes + 1
    targets: np.ndarray          # int64, length num_edges
    weights: np.ndarray | None   # float64 per arc, or None
    directed: bool

    def __post_init__(self):
        if self.offsets.shape != (self.num_nodes + 1,):
            raise ValueError("offsets length must be num_nodes + 1")
        if self.offsets[0] != 0 or np.any(np.diff(self.offsets) < 0):
            raise ValueError("offsets must be nondecreasing and start at 0")
        if self.offsets[-1] != len(self.targets):
            raise ValueError("offsets[-1] must equal the arc count")
        if len(self.targets) and (self.targets.min() < 0 or self.targets.max() >= self.num_nodes):
            raise ValueError("target node id out of range")
        if self.weights is not None:
            if len(self.weights) != len(self.targets):
                raise ValueError("one weight per arc required")
            if np.any(self.weights < 0):
                raise ValueError("negative arc weight")
        for arr in (self.offsets, self.targets, self.weights):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def num_edges(self) -> int:
        """Directed arc count (each undirected edge is two arcs)."""
        return int(self.offsets[-1])

    def out_degree(self, n: int) -> int:
        if not 0 <= n < self.num_nodes:
            raise IndexError(f"node id {n} out of range [0, {self.num_nodes})")
        return int(self.offsets[n + 1] - self.offsets[n])

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors(self, n: int) -> np.ndarray:
        if not 0 <= n < self.num_nodes:
            raise IndexError(f"node id {n} out of range [0, {self.num_nodes})")
        return self.targets[self.offsets[n]:self.offsets[n + 1]]

    def adjacency(self) -> sp.csr_matrix:
        """Arc-multiplicity adjacency matrix (parallel arcs sum)."""
        data = np.ones(self.num_edges, dtype=np.float64)
        indptr = self.offsets.astype(np.int64)
        mat = sp.csr_matrix((data, self.targets.astype(np.int64), indptr),
                            shape=(self.num_nodes, self.num_nodes))
        mat.sum_duplicates()
        return mat


def from_arcs(num_nodes, src, dst, weights=None, directed=True) -> Graph:
    """Build a Graph from parallel arc arrays, sorting them into CSR order."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if len(src) and (src.min() < 0 or src.max() >= num_nodes):
        raise ValueError("source node id out of range")
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    w = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)[order]
    offsets = np.zeros(num_nodes + 1, dtype=np.int64)
    np.add.at(offsets, src + 1, 1)
    np.cumsum(offsets, out=offsets)
    return Graph(num_nodes=num_nodes, offsets=offsets, targets=dst, weights=w,
                 directed=directed)


def load_edge_list(path, directed: bool = False) -> Graph:
    """Load a tab-separated edge list: ``src<TAB>dst[<TAB>weight]`` per line.

    Lines starting with ``#`` and blank lines are skipped.  Node ids must be
    nonnegative integers; the graph spans ids 0..max_id.  For undirected
    input every line produces both arcs.  Duplicate lines become parallel
    arcs and self-loops are preserved.
    """
    srcs, dsts, ws = [], [], []
    any_weight = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"{path}:{lineno}: expected 'src<TAB>dst[<TAB>weight]', got {raw!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(
                    f"{path}:{lineno}: node ids must be integers, got {raw!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative node id")
            w = 1.0
            if len(parts) == 3:
                try:
                    w = float(parts[2])
                except ValueError:
                    raise GraphFormatError(
                        f"{path}:{lineno}: weight must be a number, got {parts[2]!r}") from None
                if w < 0:
                    raise GraphFormatError(f"{path}:{lineno}: negative weight {w}")
                any_weight = True
            srcs.append(u)
            dsts.append(v)
            ws.append(w)
            if not directed:
                srcs.append(v)
                dsts.append(u)
                ws.append(w)
    if not srcs:
        raise GraphFormatError(f"{path}: no edges found")
    num_nodes = max(max(srcs), max(dsts)) + 1
    return from_arcs(num_nodes, srcs, dsts, ws if any_weight else None,
                     directed=directed)


def write_edge_list(g: Graph, path) -> None:
    """Write a Graph back to edge-list form loadable with the same flag.

    Directed graphs emit one line per arc.  Undirected graphs emit one line
    per symmetric arc pair, and one line per two stored self-loop arcs.
    """
    src = np.repeat(np.arange(g.num_nodes, dtype=np.int64), g.out_degrees)
    keep = np.ones(g.num_edges, dtype=bool)
    if not g.directed:
        keep = src < g.targets
        loops = np.flatnonzero(src == g.targets)
        if len(loops):
            s = src[loops]
            rank = np.arange(len(s)) - np.searchsorted(s, s, side="left")
            keep[loops[rank % 2 == 0]] = True
    with open(path, "w", encoding="utf-8") as fh:
        for k in np.flatnonzero(keep):
            u, v = int(src[k]), int(g.targets[k])
            if g.weights is not None:
                fh.write(f"{u}\t{v}\t{g.weights[k]:.17g}\n")
            else:
                fh.write(f"{u}\t{v}\n")


class LabelError(ValueError):
    """Malformed label file or out-of-range ids."""


@dataclass
class LabelTable:
    """Per-node class-id sets; nodes may be unlabeled (empty set)."""

    labels: list[frozenset[int]]
    num_classes: int

    def __post_init__(self):
        for i, s in enumerate(self.labels):
            for c in s:
                if not 0 <= c < self.num_classes:
                    raise LabelError(f"node {i}: class id {c} out of range")

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def label_counts(self) -> np.ndarray:
        """k_i: number of true classes of each node (0 for unlabeled)."""
        return np.array([len(s) for s in self.labels], dtype=np.int64)

    def labeled_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.label_counts > 0)

    def indicator(self) -> sp.csr_matrix:
        """Node x class binary membership matrix."""
        rows, cols = [], []
        for i, s in enumerate(self.labels):
            for c in sorted(s):
                rows.append(i)
                cols.append(c)
        data = np.ones(len(rows), dtype=np.float64)
        return sp.csr_matrix((data, (rows, cols)),
                             shape=(self.num_nodes, self.num_classes))


def load_labels(path, num_nodes: int) -> LabelTable:
    """Load ``node_id<TAB>class[,class...]`` lines into a LabelTable.

    Unlisted nodes get an empty label set; repeated node lines merge.
    """
    sets: list[set[int]] = [set() for _ in range(num_nodes)]
    max_class = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LabelError(
                    f"{path}:{lineno}: expected 'node<TAB>class[,class...]', got {raw!r}")
            try:
                node = int(parts[0])
            except ValueError:
                raise LabelError(f"{path}:{lineno}: node id must be an integer") from None
            if not 0 <= node < num_nodes:
                raise LabelError(
                    f"{path}:{lineno}: node id {node} out of range [0, {num_nodes})")
            for tok in parts[1].split(","):
                try:
                    c = int(tok)
                except ValueError:
                    raise LabelError(
                        f"{path}:{lineno}: class id must be an integer, got {tok!r}") from None
                if c < 0:
                    raise LabelError(f"{path}:{lineno}: negative class id {c}")
                sets[node].add(c)
                max_class = max(max_class, c)
    return LabelTable(labels=[frozenset(s) for s in sets], num_classes=max_class + 1)


def connected_components(g: Graph) -> int:
    """Number of weakly connected components (arc direction ignored)."""
    n, _ = _weak_components(g.adjacency(), directed=True, connection="weak")
    return int(n)


@dataclass
class DatasetStats:
    nodes: int
    edges: int       # undirected edge count when the graph is undirected
    components: int
    classes: int

    def to_json(self) -> str:
        return json.dumps({"nodes": self.nodes, "edges": self.edges,
                           "components": self.components, "classes": self.classes})


def dataset_stats(g: Graph, labels: LabelTable | None = None) -> DatasetStats:
    edges = g.num_edges if g.directed else g.num_edges // 2
    return DatasetStats(nodes=g.num_nodes, edges=edges,
                        components=connected_components(g),
                        classes=labels.num_classes if labels is not None else 0)
