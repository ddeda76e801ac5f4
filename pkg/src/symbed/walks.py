"""Random-walk generation and incremental neighborhood hashing.

Each node is described by a sparse "hash vector": the frequency of every
node visited by short random walks started there, pruned by a relative
threshold epsilon and re-normalized to sum 1.  Walk generation and hashing
are fused so walks are never stored.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import Graph
from .rng import CounterStream, stream_key, uniform_at


def _uniform_lengths(max_len: int = 5) -> np.ndarray:
    return np.full(max_len, 1.0 / max_len)


@dataclass(frozen=True, eq=False)
class WalkConfig:
    """Parameters of the walk sampler and hasher.

    length_probs[i] is the probability that a walk has length i+1, so the
    maximum walk length is ``len(length_probs)``.  num_walks walks start at
    every node; nodes visited less than (total visits * epsilon) times are
    pruned from the hash.
    """

    length_probs: np.ndarray = field(default_factory=_uniform_lengths)
    num_walks: int = 1024
    epsilon: float = 0.005
    seed: int = 0
    weighted: bool = False

    def __post_init__(self):
        w = np.asarray(self.length_probs, dtype=np.float64)
        object.__setattr__(self, "length_probs", w)
        if w.ndim != 1 or len(w) == 0:
            raise ValueError("length_probs must be a nonempty 1-d vector")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("length_probs must be nonnegative and sum to 1")
        if self.num_walks < 1:
            raise ValueError("num_walks must be >= 1")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        w.setflags(write=False)

    @property
    def max_len(self) -> int:
        return len(self.length_probs)

    @property
    def mean_len(self) -> float:
        return float(np.dot(self.length_probs, np.arange(1, self.max_len + 1)))


@dataclass
class HashVector:
    """Sparse visit-frequency vector: strictly increasing indices, values > 0
    summing to 1."""

    indices: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[self.indices] = self.values
        return out

    def to_dict(self) -> dict[int, float]:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}


def sample_walk_length(cfg: WalkConfig, rng: np.random.Generator) -> int:
    """Draw one walk length in 1..max_len from the length distribution."""
    return _lengths_from_uniforms(cfg.length_probs, rng.random(1))[0]


def _lengths_from_uniforms(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(probs)
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, len(probs) - 1).astype(np.int64) + 1


def walk_lengths(cfg: WalkConfig) -> np.ndarray:
    """The shared per-walk length array: sampled once, reused by every node."""
    rng = np.random.default_rng(cfg.seed)
    return _lengths_from_uniforms(cfg.length_probs, rng.random(cfg.num_walks))


def _weight_cumsum(g: Graph) -> np.ndarray | None:
    if g.weights is None:
        return None
    return np.cumsum(g.weights, dtype=np.float64)


def random_walk(g: Graph, start: int, wl: int, rng: CounterStream,
                weighted: bool = False, _wcum: np.ndarray | None = None):
    """One walk of length wl from start; returns {node: visit count}.

    The start node is always counted; a node with no out-arcs ends the walk
    early.  Neighbor choice is uniform over out-arcs, or proportional to arc
    weight in weighted mode.
    """
    if not 0 <= start < g.num_nodes:
        raise IndexError(f"start node {start} out of range")
    if weighted and _wcum is None:
        _wcum = _weight_cumsum(g)
    counts: dict[int, int] = {}
    c = start
    for t in range(wl + 1):
        counts[c] = counts.get(c, 0) + 1
        if t == wl:
            break
        lo, hi = int(g.offsets[c]), int(g.offsets[c + 1])
        deg = hi - lo
        if deg == 0:
            break
        u = rng.uniform()
        if weighted:
            base = _wcum[lo - 1] if lo > 0 else 0.0
            total = _wcum[hi - 1] - base
            if total <= 0.0:
                break
            k = int(np.searchsorted(_wcum, base + u * total, side="right"))
            c = int(g.targets[min(k, hi - 1)])
        else:
            c = int(g.targets[lo + min(int(u * deg), deg - 1)])
    return counts


def hash_node(g: Graph, n: int, cfg: WalkConfig) -> HashVector:
    """Hash one node by running its walks sequentially (reference path)."""
    lengths = walk_lengths(cfg)
    stream = CounterStream(cfg.seed, n)
    wcum = _weight_cumsum(g) if cfg.weighted else None
    counts: dict[int, int] = {}
    s = cfg.max_len
    for j, wl in enumerate(lengths):
        stream.jump(j * s)
        for node, c in random_walk(g, n, int(wl), stream, cfg.weighted, wcum).items():
            counts[node] = counts.get(node, 0) + c
    total = sum(counts.values())
    thresh = total * cfg.epsilon
    kept = {i: c for i, c in counts.items() if not c < thresh}
    if not kept:
        # epsilon above the max frequency: keep the most-visited node
        best_count = max(counts.values())
        best = min(i for i, c in counts.items() if c == best_count)
        kept = {best: best_count}
    idx = np.array(sorted(kept), dtype=np.int64)
    cnt = np.array([kept[i] for i in idx], dtype=np.int64)
    return HashVector(indices=idx, values=cnt / cnt.sum())


def _hash_block(g: Graph, nodes: np.ndarray, lengths: np.ndarray,
                cfg: WalkConfig, wcum: np.ndarray | None) -> sp.csr_matrix:
    """Vectorized walks + hashing for a block of start nodes."""
    nb, nw, s = len(nodes), len(lengths), cfg.max_len
    start_local = np.repeat(np.arange(nb, dtype=np.int32), nw)
    walk_j = np.tile(np.arange(nw, dtype=np.uint64), nb)
    wl = np.tile(lengths.astype(np.int32), nb)
    keys = stream_key(cfg.seed, nodes.astype(np.uint64))[start_local]
    degrees = g.out_degrees

    cur = nodes.astype(np.int32)[start_local]
    alive = np.ones(nb * nw, dtype=bool)
    rows = [start_local.copy()]
    cols = [cur.copy()]
    smax = np.uint64(s)
    for t in range(s):
        stepping = alive & (wl > t)
        if not stepping.any():
            break
        deg = degrees[cur]
        can = stepping & (deg > 0)
        if cfg.weighted:
            lo = g.offsets[cur]
            hi = g.offsets[cur + 1]
            base = np.where(lo > 0, wcum[lo - 1], 0.0)
            total = wcum[hi - 1] - base
            can &= total > 0.0
        act = np.flatnonzero(can)
        if len(act):
            u = uniform_at(keys[act], walk_j[act] * smax + np.uint64(t))
            if cfg.weighted:
                k = np.searchsorted(wcum, base[act] + u * total[act], side="right")
                k = np.minimum(k, hi[act] - 1)
                cur[act] = g.targets[k]
            else:
                d = deg[act]
                step = np.minimum((u * d).astype(np.int64), d - 1)
                cur[act] = g.targets[g.offsets[cur[act]] + step]
            rows.append(start_local[act])
            cols.append(cur[act])
        alive = can

    visits_r = np.concatenate(rows)
    visits_c = np.concatenate(cols)
    counts = sp.coo_matrix(
        (np.ones(len(visits_r), dtype=np.int32), (visits_r, visits_c)),
        shape=(nb, g.num_nodes)).tocsr()

    totals = np.asarray(counts.sum(axis=1)).ravel()
    row_of = np.repeat(np.arange(nb), np.diff(counts.indptr))
    keep = counts.data >= totals[row_of] * cfg.epsilon
    kept_rows = np.bincount(row_of[keep], minlength=nb)
    for r in np.flatnonzero(kept_rows == 0):
        lo, hi = counts.indptr[r], counts.indptr[r + 1]
        keep[lo + int(np.argmax(counts.data[lo:hi]))] = True
        kept_rows[r] = 1

    data = counts.data[keep]
    kept_sums = np.bincount(row_of[keep], weights=data, minlength=nb)
    values = data / kept_sums[row_of[keep]]
    indptr = np.zeros(nb + 1, dtype=np.int64)
    np.cumsum(kept_rows, out=indptr[1:])
    return sp.csr_matrix((values, counts.indices[keep], indptr),
                         shape=(nb, g.num_nodes))


def hash_all(g: Graph, cfg: WalkConfig, workers: int = 1) -> sp.csr_matrix:
    """Hash every node; row i equals hash_node(g, i, cfg) exactly.

    Work is split into node blocks whose walk buffers stay small; blocks may
    run on several threads, and the result is identical for any worker count.
    """
    lengths = walk_lengths(cfg)
    wcum = _weight_cumsum(g) if cfg.weighted else None
    visits_per_node = cfg.num_walks * (cfg.max_len + 1)
    block = int(np.clip(600_000 // max(visits_per_node, 1), 1, 4096))
    starts = np.arange(0, g.num_nodes, block)
    blocks = [np.arange(s, min(s + block, g.num_nodes)) for s in starts]

    def job(ids):
        return _hash_block(g, ids, lengths, cfg, wcum)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(ids) for ids in blocks]
    out = sp.vstack(parts, format="csr") if len(parts) > 1 else parts[0]
    return out


def hash_row(hashes: sp.csr_matrix, i: int) -> HashVector:
    """Extract row i of a hash matrix as a HashVector."""
    lo, hi = hashes.indptr[i], hashes.indptr[i + 1]
    return HashVector(indices=hashes.indices[lo:hi].astype(np.int64),
                      values=hashes.data[lo:hi])


def dump_hashes(hashes: sp.csr_matrix, path) -> None:
    """Debug dump: one line per node, ``node<TAB>idx:val,idx:val,...``."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(hashes.shape[0]):
            h = hash_row(hashes, i)
            pairs = ",".join(f"{int(j)}:{v:.6f}" for j, v in zip(h.indices, h.values))
            fh.write(f"{i}\t{pairs}\n")
