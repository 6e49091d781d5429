"""Modularity-optimizing detectors: greedy agglomeration, two-phase local
moving with graph aggregation, and simulated annealing over spin states.
"""

from __future__ import annotations

import heapq
import math
import random

import numpy as np

from ..graph import Graph, Partition, WeightedGraph, quotient_graph
from ..metrics import modularity


def _require_edges(graph):
    if graph.edge_count == 0:
        raise ValueError("needs at least one edge")


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, keep, absorb):
        self.parent[self.find(absorb)] = self.find(keep)


def fastgreedy(graph: Graph) -> Partition:
    """Agglomerative merging from singletons, always taking the connected
    community pair with the largest modularity increase (or smallest
    decrease); returns the dendrogram level of maximal modularity.

    Ties pick the lexicographically smallest pair, so the result is
    deterministic without a seed.
    """
    _require_edges(graph)
    n = graph.node_count
    m = graph.edge_count
    two_m2 = 2.0 * m * m

    deg = graph.degrees()
    d = {v: float(deg[v]) for v in range(n)}
    w = {v: {} for v in range(n)}
    for u, v in graph.edges:
        w[u][v] = w[u].get(v, 0.0) + 1.0
        w[v][u] = w[v].get(u, 0.0) + 1.0

    stamp = [0] * n
    heap = []
    for u, v in graph.edges:
        dq = w[u][v] / m - d[u] * d[v] / two_m2
        heapq.heappush(heap, (-dq, u, v, 0, 0))

    q = -sum(x * x for x in d.values()) / (4.0 * m * m)  # singleton level
    best_q = q
    best_count = n
    best_merges = 0
    merges = []

    while heap:
        neg_dq, a, b, sa, sb = heapq.heappop(heap)
        if a not in w or b not in w or stamp[a] != sa or stamp[b] != sb:
            continue
        # Merge b into a (a keeps its id).
        if len(w[b]) > len(w[a]):
            a, b = b, a
        q += -neg_dq
        merges.append((a, b))
        wb = w.pop(b)
        wa = w[a]
        for nbr, weight in wb.items():
            if nbr == a:
                continue
            wa[nbr] = wa.get(nbr, 0.0) + weight
            wn = w[nbr]
            del wn[b]
            wn[a] = wa[nbr]
        wa.pop(b, None)
        d[a] += d.pop(b)
        stamp[a] += 1
        stamp[b] += 1
        da = d[a]
        sa = stamp[a]
        for nbr, weight in wa.items():
            dq = weight / m - da * d[nbr] / two_m2
            lo, hi = (a, nbr) if a < nbr else (nbr, a)
            heapq.heappush(heap, (-dq, lo, hi, stamp[lo], stamp[hi]))
        # Later levels win ties: equal Q with fewer communities.
        if q >= best_q:
            best_q = q
            best_count = n - len(merges)
            best_merges = len(merges)

    uf = _UnionFind(n)
    for a, b in merges[:best_merges]:
        uf.union(a, b)
    return Partition.from_labels([uf.find(v) for v in range(n)])


def _weighted_view(graph):
    """Adjacency with weights plus self-loop array for either graph kind."""
    n = graph.node_count
    if isinstance(graph, WeightedGraph):
        adj = [list(graph.neighbors(v)) for v in range(n)]
        self_w = list(graph.self_loops)
    else:
        adj = [[(u, 1.0) for u in graph.neighbors(v)] for v in range(n)]
        self_w = [0.0] * n
    strength = [self_w[v] + sum(wt for _, wt in adj[v]) for v in range(n)]
    return adj, self_w, strength, sum(strength)


def _local_moving_pass(graph, rng):
    """One seeded sweep-until-stable phase of greedy modularity moves.
    Returns (membership labels, moved_any)."""
    adj, _self_w, strength, two_w = _weighted_view(graph)
    n = graph.node_count
    comm = list(range(n))
    sigma_tot = list(strength)
    moved_any = False
    for _ in range(1000):  # safety cap; the sweep loop settles long before
        improved = False
        for v in rng.permutation(n):
            v = int(v)
            k_v = strength[v]
            cur = comm[v]
            links = {}
            for u, wt in adj[v]:
                links[comm[u]] = links.get(comm[u], 0.0) + wt
            sigma_tot[cur] -= k_v
            best_comm = cur
            best_gain = links.get(cur, 0.0) - sigma_tot[cur] * k_v / two_w
            ties = 1
            for cand in sorted(links):
                if cand == cur:
                    continue
                gain = links[cand] - sigma_tot[cand] * k_v / two_w
                if gain > best_gain:
                    best_comm, best_gain, ties = cand, gain, 1
                elif gain == best_gain and best_comm != cur:
                    # Ties with the current community never move; ties among
                    # strictly better candidates break uniformly.
                    ties += 1
                    if rng.random() < 1.0 / ties:
                        best_comm = cand
            sigma_tot[best_comm] += k_v
            if best_comm != cur:
                comm[v] = best_comm
                improved = True
                moved_any = True
        if not improved:
            break
    return comm, moved_any


def louvain(graph: Graph, params) -> Partition:
    """Two-phase agglomeration: seeded greedy local moves, then recursion on
    the community quotient graph, until a pass yields no improvement."""
    _require_edges(graph)
    rng = np.random.default_rng(params.seed)
    member = list(range(graph.node_count))
    level = graph
    while True:
        labels, moved = _local_moving_pass(level, rng)
        if not moved:
            break
        part = Partition.from_labels(labels)
        member = [part.membership[member[v]] for v in range(graph.node_count)]
        if part.num_communities == level.node_count:
            break
        level = quotient_graph(level, part)
    return Partition.from_labels(member)


def spinglass(graph: Graph, params) -> Partition:
    """Simulated annealing over spin assignments with energy -Q.

    Geometric cooling with single-spin-flip Metropolis proposals; move
    energies are scaled by 2m (the natural coupling of the spin model) so
    the default temperature range brackets them. Returns the best-energy
    assignment seen, compacted over occupied spins.
    """
    _require_edges(graph)
    params.validate()
    rng = random.Random(params.seed)
    n = graph.node_count
    m = graph.edge_count
    q_spins = min(params.spinglass_max_spins, n)
    adj = [graph.neighbors(v) for v in range(n)]
    deg = graph.degrees()

    spins = [rng.randrange(q_spins) for _ in range(n)]
    d_sum = [0.0] * q_spins
    for v in range(n):
        d_sum[spins[v]] += deg[v]
    q_val = modularity(graph, Partition.from_labels(spins))
    best_q = q_val
    best_spins = list(spins)

    temp = params.sa_initial_temperature
    proposals_per_temp = params.sa_sweeps_per_temperature * n
    inv_m = 1.0 / m
    while temp > params.sa_min_temperature:
        for _ in range(proposals_per_temp):
            v = rng.randrange(n)
            nbrs = adj[v]
            if nbrs and rng.random() < 0.9:
                target = spins[nbrs[rng.randrange(len(nbrs))]]
            else:
                target = rng.randrange(q_spins)
            cur = spins[v]
            if target == cur:
                continue
            e_cur = 0
            e_tgt = 0
            for u in nbrs:
                su = spins[u]
                if su == cur:
                    e_cur += 1
                elif su == target:
                    e_tgt += 1
            k_v = deg[v]
            gain2m = 2.0 * (e_tgt - e_cur) - k_v * (d_sum[target] - (d_sum[cur] - k_v)) * inv_m
            if gain2m >= 0.0 or rng.random() < math.exp(gain2m / temp):
                spins[v] = target
                d_sum[cur] -= k_v
                d_sum[target] += k_v
                q_val += gain2m / (2.0 * m)
                if q_val > best_q + 1e-12:
                    best_q = q_val
                    best_spins = list(spins)
        temp *= params.sa_cooling_factor
    return Partition.from_labels(best_spins)
