"""Re-weighted random walk that samples only public nodes.

At each step the walker draws a uniform neighbor of the current node,
with replacement, and redraws whenever the selection lands on a private
node. Only public nodes enter the sample, the Markov property is
preserved, and the walk's stationary probability of a cluster member is
its public degree over the cluster's public-degree sum.

Per visited node the walker keeps selection counters: ``b`` total
neighbor selections and ``a`` selections that hit a public node. In the
approximate mode the public degree of a sampled node is estimated as
``degree * a / b`` without ever querying the neighborhood's labels
exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .access import (
    AccessModel,
    QueryLedger,
    is_public_via_model,
    probe_all_neighbors,
    query_node,
)
from .graph import GraphError, LabeledGraph, PublicClusterView, largest_public_cluster


class StuckWalkError(RuntimeError):
    """The walk cannot leave its seed (the public cluster is a single node)."""


class PubdegMode(Enum):
    """How the public degree of each sample is obtained.

    exact_ideal   read neighbor labels from the sample's own report.
    exact_hidden  probe every neighbor once per visit (expensive, exact).
    approx_hidden estimate from the selection counters (cheap).
    """

    EXACT_IDEAL = "exact_ideal"
    EXACT_HIDDEN = "exact_hidden"
    APPROX_HIDDEN = "approx_hidden"

    @property
    def access_model(self) -> AccessModel:
        return AccessModel.IDEAL if self is PubdegMode.EXACT_IDEAL else AccessModel.HIDDEN


@dataclass
class SelectionCounters:
    """Per-node neighbor-selection tallies accumulated over the whole walk."""

    successes: dict[int, int]  # selections that hit a public node
    attempts: dict[int, int]  # all selections

    def ratio(self, v: int) -> float:
        return self.successes[v] / self.attempts[v]


class WalkRecord:
    """Ordered walk output: one (node, degree, public-degree value) per sample."""

    __slots__ = ("nodes", "degrees", "public_degrees", "pubdeg_mode", "ledger", "counters")

    def __init__(
        self,
        nodes: np.ndarray,
        degrees: np.ndarray,
        public_degrees: np.ndarray,
        pubdeg_mode: PubdegMode,
        ledger: QueryLedger | None = None,
        counters: SelectionCounters | None = None,
    ):
        self.nodes = nodes
        self.degrees = degrees
        self.public_degrees = public_degrees
        self.pubdeg_mode = pubdeg_mode
        self.ledger = ledger
        self.counters = counters

    @property
    def r(self) -> int:
        return self.nodes.size

    def __len__(self) -> int:
        return self.nodes.size

    def samples(self) -> Iterator[tuple[int, int, float]]:
        for v, d, ds in zip(self.nodes, self.degrees, self.public_degrees):
            yield int(v), int(d), float(ds)

    def dump(self, path) -> None:
        """Write one line per sample: ``index node_id degree public_degree``.

        Floats are written with full round-trip precision so a reloaded
        record yields identical estimates.
        """
        with open(path, "w") as f:
            for k, (v, d, ds) in enumerate(self.samples(), start=1):
                f.write(f"{k} {v} {d} {ds!r}\n")


def stationary_distribution(view: PublicClusterView) -> np.ndarray:
    """Stationary probability of each node: public degree over its sum.

    Zero outside the cluster. Requires a cluster with at least one edge.
    """
    if view.public_degree_sum <= 0:
        raise ValueError("cluster has no internal edge; stationary law undefined")
    return view.public_degree / float(view.public_degree_sum)


_RAND_BLOCK = 1 << 14


def run_walk(
    g: LabeledGraph,
    model: AccessModel | str,
    seed_node: int,
    r: int,
    pubdeg_mode: PubdegMode | str,
    rng_seed,
    ledger: QueryLedger | None = None,
    *,
    view: PublicClusterView | None = None,
    count_visit_queries: bool = False,
) -> WalkRecord:
    """Run an ``r``-sample walk from a public seed on the largest cluster.

    Parameters
    ----------
    model, pubdeg_mode
        Access model and public-degree mode; the mode dictates the model
        (`exact_ideal` needs ideal access, the other two hidden access).
    rng_seed
        Anything accepted by :func:`numpy.random.default_rng`. Walks are
        reproducible given the seed, and the exact modes consume the
        random stream identically, so they visit the same node sequence.
    ledger
        Query accounting; a fresh ledger is created when omitted.
    view
        Precomputed largest-cluster view, to avoid recomputing it per walk.
    count_visit_queries
        Hidden model only: when True, arriving at a sample charges one
        extra query even though the node was already queried as a label
        probe. Default counts each query once.

    Query conventions: under the ideal model every sample visit costs one
    query (labels ride along for free). Under the hidden model the seed's
    own report is free, having been fetched while selecting a seed that
    is public at all; afterwards the only charged queries are the label
    probes, whose reports double as the next sample's neighbor data.
    """
    model = AccessModel(model)
    pubdeg_mode = PubdegMode(pubdeg_mode)
    if model is not pubdeg_mode.access_model:
        raise ValueError(
            f"pubdeg mode {pubdeg_mode.value} requires the "
            f"{pubdeg_mode.access_model.value} access model"
        )
    if r < 1:
        raise ValueError("walk length must be at least 1")
    if view is None:
        view = largest_public_cluster(g)
    if g.is_private[seed_node]:
        raise GraphError(f"seed node {seed_node} is private")
    if not view.member_flag[seed_node]:
        raise GraphError(f"seed node {seed_node} is outside the largest public cluster")
    if view.member_count == 1:
        # every sample performs a trailing neighbor selection, which can
        # never succeed when the cluster has no second member
        raise StuckWalkError("largest public cluster is a single node")
    if ledger is None:
        ledger = QueryLedger()

    ideal = model is AccessModel.IDEAL
    exact_hidden = pubdeg_mode is PubdegMode.EXACT_HIDDEN
    approx = pubdeg_mode is PubdegMode.APPROX_HIDDEN

    rng = np.random.default_rng(rng_seed)
    buf = rng.random(_RAND_BLOCK)
    bi = 0

    nodes_out = np.empty(r, dtype=np.int64)
    degs_out = np.empty(r, dtype=np.int64)
    pub_out = np.zeros(r, dtype=np.float64)

    succ: dict[int, int] = {}
    att: dict[int, int] = {}

    cur = int(seed_node)

    ledger.begin_sample()
    if ideal:
        rep = query_node(g, cur, model, ledger)
    else:
        rep = query_node(g, cur, model, None)  # seed report came with seed selection
        if count_visit_queries:
            ledger.charge(cur)

    for k in range(r):
        nbrs = rep.neighbor_ids
        deg = len(nbrs)
        nodes_out[k] = cur
        degs_out[k] = deg

        if ideal:
            priv_flags = rep.neighbor_private
            pub_out[k] = deg - np.count_nonzero(priv_flags)
        elif exact_hidden:
            priv_flags = ~probe_all_neighbors(g, cur, ledger)
            pub_out[k] = deg - np.count_nonzero(priv_flags)
        else:
            priv_flags = None

        if cur not in att:
            succ[cur] = 0
            att[cur] = 0

        # uniform neighbor selection with replacement until a public hit;
        # the trailing selection of the final sample runs and counts too
        tries = 0
        while True:
            if bi == _RAND_BLOCK:
                buf = rng.random(_RAND_BLOCK)
                bi = 0
            idx = int(buf[bi] * deg)
            bi += 1
            tries += 1
            u = int(nbrs[idx])
            if priv_flags is not None:
                ok = not priv_flags[idx]
            else:
                ok = is_public_via_model(g, u, model, ledger)  # one query per probe
            if ok:
                break
        att[cur] += tries
        succ[cur] += 1

        if k + 1 < r:
            ledger.begin_sample()
            if ideal:
                rep = query_node(g, u, model, ledger)
            else:
                rep = query_node(g, u, model, None)  # reuse the probe's report
                if count_visit_queries:
                    ledger.charge(u)
            cur = u

    if approx:
        uniq, inv = np.unique(nodes_out, return_inverse=True)
        ratios = np.array([succ[int(v)] / att[int(v)] for v in uniq])
        pub_out = degs_out * ratios[inv]

    return WalkRecord(
        nodes_out,
        degs_out,
        pub_out,
        pubdeg_mode,
        ledger,
        SelectionCounters(succ, att),
    )
