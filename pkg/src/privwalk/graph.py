"""Immutable labeled-graph storage and public-cluster decomposition.

Adjacency is held in compressed sparse row form (``indptr``/``indices``
with sorted neighbor lists) plus one privacy flag per node. All arrays
are frozen after construction, so graphs and cluster views can be shared
freely across threads and worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class GraphError(ValueError):
    """Input violates a structural requirement (connectivity, id range, ...)."""


@dataclass(frozen=True)
class LabelOrigin:
    """Where the privacy labels came from."""

    kind: str  # "all_public", "bernoulli" or "file"
    p: float | None = None  # retained only for kind == "bernoulli"


ALL_PUBLIC = LabelOrigin("all_public")


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class LabeledGraph:
    """Undirected, connected, simple graph with per-node privacy labels.

    ``is_private[v]`` is True when node ``v`` hides its neighbor list.
    Instances are immutable; relabeling returns a new graph that shares
    the adjacency arrays.
    """

    __slots__ = ("indptr", "indices", "is_private", "label_origin", "orig_ids", "_shared")

    def __init__(
        self,
        indptr: np.ndarray,
        indices: np.ndarray,
        is_private: np.ndarray,
        label_origin: LabelOrigin,
        orig_ids: np.ndarray | None = None,
        _shared: dict | None = None,
    ):
        self.indptr = _freeze(np.asarray(indptr, dtype=np.int64))
        self.indices = _freeze(np.asarray(indices))
        self.is_private = _freeze(np.asarray(is_private, dtype=bool))
        self.label_origin = label_origin
        self.orig_ids = _freeze(np.asarray(orig_ids)) if orig_ids is not None else None
        # caches derived from the adjacency only, shared across relabelings
        self._shared = _shared if _shared is not None else {}

    # -- basic shape ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return self.indptr.size - 1

    @property
    def degrees(self) -> np.ndarray:
        if "degrees" not in self._shared:
            self._shared["degrees"] = _freeze(np.diff(self.indptr))
        return self._shared["degrees"]

    @property
    def degree_sum(self) -> int:
        """Sum of all degrees (twice the edge count)."""
        return int(self.indices.size)

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    @property
    def avg_degree(self) -> float:
        return self.degree_sum / self.node_count

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of ``v`` (read-only view)."""
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edge_sources(self) -> np.ndarray:
        """Source id for every directed adjacency entry, aligned with ``indices``."""
        if "edge_src" not in self._shared:
            src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
            self._shared["edge_src"] = _freeze(src)
        return self._shared["edge_src"]

    # -- labels ---------------------------------------------------------

    @property
    def private_count(self) -> int:
        return int(self.is_private.sum())

    @property
    def private_fraction(self) -> float:
        return self.private_count / self.node_count

    def with_labels(self, is_private: np.ndarray, origin: LabelOrigin) -> "LabeledGraph":
        """New graph with the same adjacency but different privacy labels."""
        is_private = np.asarray(is_private, dtype=bool)
        if is_private.shape != (self.node_count,):
            raise GraphError("label vector length does not match node count")
        return LabeledGraph(
            self.indptr, self.indices, is_private, origin, self.orig_ids, self._shared
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"LabeledGraph(n={self.node_count}, edges={self.edge_count}, "
            f"private={self.private_count}, origin={self.label_origin.kind})"
        )


@dataclass(frozen=True)
class PublicClusterView:
    """Largest connected cluster of the public-induced subgraph.

    ``public_degree[v]`` counts the neighbors of ``v`` that are members of
    this cluster; it is zero outside the member set. ``cluster_census``
    lists ``(size, count)`` over all public clusters, largest size first.
    """

    member_flag: np.ndarray
    member_count: int
    public_degree: np.ndarray
    public_degree_sum: int
    cluster_census: tuple[tuple[int, int], ...]

    @cached_property
    def members(self) -> np.ndarray:
        """Member node ids in increasing order."""
        return np.nonzero(self.member_flag)[0]


def _normalize_labels(labels: Sequence) -> np.ndarray:
    """Accept booleans or 'public'/'private' strings; True means private."""
    out = np.empty(len(labels), dtype=bool)
    for i, lab in enumerate(labels):
        if isinstance(lab, str):
            if lab not in ("public", "private"):
                raise GraphError(f"unknown label {lab!r} at node {i}")
            out[i] = lab == "private"
        else:
            out[i] = bool(lab)
    return out


def build_graph(
    edges: Iterable[tuple[int, int]],
    labels: Sequence,
    *,
    drop_duplicates: bool = False,
    label_origin: LabelOrigin | None = None,
) -> LabeledGraph:
    """Build a :class:`LabeledGraph` from an unordered edge list.

    Parameters
    ----------
    edges : iterable of (u, v)
        Undirected edges over node ids ``0..n-1`` where ``n = len(labels)``.
    labels : sequence
        Per-node privacy flags; booleans (True = private) or the strings
        ``"public"`` / ``"private"``.
    drop_duplicates : bool
        When False (default) duplicate edges and self-loops raise
        :class:`GraphError`; when True they are silently dropped.

    The resulting graph must be connected; anything else raises.
    """
    is_private = _normalize_labels(labels)
    n = is_private.size
    if n == 0:
        raise GraphError("graph needs at least one node")

    seen: set[tuple[int, int]] = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
        if u == v:
            if drop_duplicates:
                continue
            raise GraphError(f"self-loop at node {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            if drop_duplicates:
                continue
            raise GraphError(f"duplicate edge ({u}, {v})")
        seen.add(key)
    if not seen:
        raise GraphError("edge list must be non-empty")

    pairs = np.array(sorted(seen), dtype=np.int64)
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    g = LabeledGraph(indptr, dst, is_private, label_origin or _default_origin(is_private))

    adj = csr_matrix((np.ones(dst.size, dtype=np.int8), dst, indptr), shape=(n, n))
    n_comp, _ = connected_components(adj, directed=False)
    if n_comp != 1:
        raise GraphError(f"graph is not connected ({n_comp} components)")
    return g


def _default_origin(is_private: np.ndarray) -> LabelOrigin:
    return ALL_PUBLIC if not is_private.any() else LabelOrigin("file")


def assign_labels_bernoulli(g: LabeledGraph, p: float, rng_seed) -> LabeledGraph:
    """Redraw privacy labels: each node independently private with probability p.

    ``rng_seed`` is anything accepted by :func:`numpy.random.default_rng`.
    ``p = 0`` and ``p = 1`` are exact (no node, every node private).
    """
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"privacy rate must lie in [0, 1], got {p}")
    rng = np.random.default_rng(rng_seed)
    is_private = rng.random(g.node_count) < p
    return g.with_labels(is_private, LabelOrigin("bernoulli", p))


def largest_public_cluster(g: LabeledGraph) -> PublicClusterView:
    """Decompose the public-induced subgraph and return its largest cluster.

    Ties on size are broken toward the cluster containing the smallest
    node id. Raises :class:`GraphError` when the graph has no public node.
    """
    pub = ~g.is_private
    if not pub.any():
        raise GraphError("graph has no public node")
    n = g.node_count

    src = g.edge_sources()
    dst = g.indices
    keep = pub[src] & pub[dst]
    kept_dst = dst[keep]
    # public-neighbor count per node; for cluster members this equals the
    # number of neighbors inside their own cluster
    pub_deg = np.bincount(src[keep], minlength=n).astype(np.int64)

    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(pub_deg, out=indptr[1:])
    sub = csr_matrix((np.ones(kept_dst.size, dtype=np.int8), kept_dst, indptr), shape=(n, n))
    n_comp, comp = connected_components(sub, directed=False)

    comp_pub = comp[pub]
    counts = np.bincount(comp_pub, minlength=n_comp)
    pub_sizes = counts[comp_pub]  # per public node, the size of its cluster

    max_size = int(pub_sizes.max())
    # first public node (smallest id) sitting in a maximum-size cluster
    chosen = comp_pub[int(np.argmax(pub_sizes == max_size))]

    member_flag = pub & (comp == chosen)
    public_degree = np.where(member_flag, pub_deg, 0)

    sizes = counts[counts > 0]
    uniq, cnt = np.unique(sizes, return_counts=True)
    census = tuple(
        (int(s), int(c)) for s, c in sorted(zip(uniq, cnt), key=lambda t: -t[0])
    )

    return PublicClusterView(
        member_flag=_freeze(member_flag),
        member_count=int(member_flag.sum()),
        public_degree=_freeze(public_degree),
        public_degree_sum=int(public_degree.sum()),
        cluster_census=census,
    )
