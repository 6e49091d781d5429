"""Planted-partition benchmark networks with power-law degree and
community-size distributions and a controlled mixing coefficient.

Generation proceeds in three steps: realize a power-law degree sequence
with the configuration model, place nodes into power-law-sized communities,
then rewire links (degree-preservingly) until the per-node average fraction
of inter-community links matches the requested mixing coefficient.
"""

from __future__ import annotations

import bisect
import math
import warnings
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph, Partition
from .metrics import measured_mixing


class MixingToleranceWarning(UserWarning):
    """Raised (as a warning) when rewiring exhausts its budget before
    reaching the target mixing; carries the achieved value in its message."""


@dataclass(frozen=True)
class LfrConfig:
    """Generation parameters.

    Community-size bounds left as None are resolved from the degree
    bounds: min_community = ceil((1-mu)*k_min) + 1 and
    max_community = min(n, ceil((1-mu)*k_max) + round(avg_degree)), which
    guarantees every node's internal stubs can fit inside some community.
    """

    n: int
    avg_degree: float
    max_degree: int
    gamma: float
    beta: float
    mu: float
    min_community: int | None = None
    max_community: int | None = None
    mixing_tolerance: float = 0.02
    max_rewire_iterations: int | None = None  # defaults to 50*m at rewire time
    seed: int = 0
    allow_mu_beyond_limit: bool = False

    def validate(self):
        if not 0.0 < self.mu < 1.0:
            raise ValueError(f"mu must be in (0,1), got {self.mu}")
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if self.beta < 1.0:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if not 1 <= self.avg_degree <= self.max_degree <= self.n - 1:
            raise ValueError(
                f"need 1 <= avg_degree <= max_degree <= n-1, got "
                f"avg={self.avg_degree}, max={self.max_degree}, n={self.n}"
            )
        if (self.min_community is None) != (self.max_community is None):
            raise ValueError("set both community bounds or neither")
        if self.min_community is not None:
            if not 1 <= self.min_community <= self.max_community <= self.n:
                raise ValueError(
                    f"need 1 <= min_community <= max_community <= n, got "
                    f"[{self.min_community}, {self.max_community}], n={self.n}"
                )
        if self.mixing_tolerance <= 0:
            raise ValueError("mixing_tolerance must be positive")

    def with_resolved_bounds(self, k_min: int) -> "LfrConfig":
        """Fill in default community-size bounds given the realized minimum
        degree."""
        if self.min_community is not None:
            return self
        lo = math.ceil((1.0 - self.mu) * k_min) + 1
        hi = min(self.n, math.ceil((1.0 - self.mu) * self.max_degree) + round(self.avg_degree))
        if lo > hi:
            lo = hi
        return replace(self, min_community=lo, max_community=hi)


@dataclass(frozen=True)
class PlantedNetwork:
    """A generated graph with its planted partition and realized mixing."""

    graph: Graph
    planted: Partition
    realized_mu: float
    realized_mu_global: float
    mu_limit: float
    config: LfrConfig
    seed_used: int


def mu_limit(n: int, max_community: int) -> float:
    """Mixing value above which inter-community links dominate:
    (n - largest community size) / n."""
    if not 1 <= max_community <= n:
        raise ValueError(f"need 1 <= max_community <= n, got {max_community} vs n={n}")
    return (n - max_community) / n


def _truncated_powerlaw_mean(lo, hi, gamma):
    """Mean of the continuous power law x^-gamma on [lo, hi]."""
    if hi == lo:
        return float(lo)
    if abs(gamma - 2.0) < 1e-12:
        return lo * hi * math.log(hi / lo) / (hi - lo)
    a, b = 1.0 - gamma, 2.0 - gamma
    return (a / b) * (hi**b - lo**b) / (hi**a - lo**a)


def solve_min_degree(avg_degree, max_degree, gamma):
    """Smallest degree of the power-law support, solved by bisection so the
    continuous distribution mean equals avg_degree."""
    lo, hi = 1.0, float(max_degree)
    if avg_degree > max_degree:
        raise ValueError("avg_degree exceeds max_degree")
    if _truncated_powerlaw_mean(lo, hi, gamma) > avg_degree:
        raise ValueError(
            f"avg_degree {avg_degree} unreachable with k_max={max_degree}, "
            f"gamma={gamma} (minimum attainable mean is "
            f"{_truncated_powerlaw_mean(lo, hi, gamma):.3f})"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _truncated_powerlaw_mean(mid, float(max_degree), gamma) < avg_degree:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _discrete_powerlaw_cdf(lo, hi, exponent):
    ks = np.arange(lo, hi + 1, dtype=float)
    weights = ks**-exponent
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return cdf


def sample_powerlaw_degrees(config: LfrConfig, rng) -> list[int]:
    """Degree sequence of length n: discrete power law on [k_min, k_max]
    with an even sum, where k_min is chosen so the mean hits avg_degree."""
    config.validate()
    k_cont = solve_min_degree(config.avg_degree, config.max_degree, config.gamma)
    # Snap to the integer support whose discrete mean is closest.
    candidates = sorted({max(1, math.floor(k_cont)), min(config.max_degree, math.ceil(k_cont))})
    best = None
    for k in candidates:
        ks = np.arange(k, config.max_degree + 1, dtype=float)
        w = ks**-config.gamma
        mean = float(np.sum(ks * w) / np.sum(w))
        gap = abs(mean - config.avg_degree)
        if best is None or gap < best[0]:
            best = (gap, k)
    k_min = best[1]
    cdf = _discrete_powerlaw_cdf(k_min, config.max_degree, config.gamma)
    draws = k_min + np.searchsorted(cdf, rng.random(config.n))
    degrees = draws.astype(int).tolist()
    if sum(degrees) % 2 == 1:
        bumpable = [v for v in range(config.n) if degrees[v] < config.max_degree]
        if not bumpable:
            raise ValueError("cannot make degree sum even: all degrees at max_degree")
        degrees[bumpable[rng.integers(len(bumpable))]] += 1
    return degrees


def _sum_representable(total, lo, hi):
    if total == 0:
        return True
    if total < lo:
        return False
    return -(-total // hi) <= total // lo  # ceil(total/hi) <= floor(total/lo)


def sample_community_sizes(config: LfrConfig, rng) -> list[int]:
    """Community sizes in [min_community, max_community] from a discrete
    power law with exponent beta, summing exactly to n (draws are nudged
    minimally when needed to keep the remainder closeable)."""
    config.validate()
    lo, hi = config.min_community, config.max_community
    if lo is None:
        raise ValueError("community bounds unresolved; call with_resolved_bounds first")
    n = config.n
    if not _sum_representable(n, lo, hi):
        raise ValueError(f"no community count fits: n={n}, bounds [{lo}, {hi}]")
    cdf = _discrete_powerlaw_cdf(lo, hi, config.beta)
    sizes = []
    remaining = n
    while remaining > 0:
        s = lo + int(np.searchsorted(cdf, rng.random()))
        s = min(s, remaining)
        if not _sum_representable(remaining - s, lo, hi):
            # Adjust this draw to the nearest feasible size.
            ceiling = min(hi, remaining)
            for delta in range(1, ceiling - lo + 2):
                for cand in (s - delta, s + delta):
                    if lo <= cand <= ceiling and _sum_representable(remaining - cand, lo, hi):
                        s = cand
                        break
                else:
                    continue
                break
            else:
                raise ValueError(f"cannot close sizes to n={n} within [{lo}, {hi}]")
        sizes.append(s)
        remaining -= s
    return sizes


def configuration_model(degrees, rng) -> Graph:
    """Random simple graph realizing the degree sequence exactly.

    Stubs are matched uniformly; self-loops and duplicate edges are then
    eliminated with degree-preserving double-edge swaps (never deletion).
    """
    degrees = [int(d) for d in degrees]
    n = len(degrees)
    if sum(degrees) % 2 != 0:
        raise ValueError("degree sum must be even")
    if any(d < 0 for d in degrees) or any(d > n - 1 for d in degrees):
        raise ValueError("degrees must lie in [0, n-1]")
    stubs = np.repeat(np.arange(n), degrees)
    rng.shuffle(stubs)
    m = len(stubs) // 2
    edges = [
        (int(stubs[2 * i]), int(stubs[2 * i + 1]))
        for i in range(m)
    ]
    edges = [(u, v) if u <= v else (v, u) for u, v in edges]

    count = {}
    for e in edges:
        count[e] = count.get(e, 0) + 1

    def is_bad(e):
        return e[0] == e[1] or count[e] > 1

    bad = [i for i, e in enumerate(edges) if is_bad(e)]
    budget = 200 * max(m, 1)
    attempts = 0
    while bad:
        if attempts >= budget:
            raise ValueError(
                "degree sequence not realizable as a simple graph within the swap budget"
            )
        attempts += 1
        i = bad[int(rng.integers(len(bad)))]
        if not is_bad(edges[i]):
            bad = [k for k in bad if is_bad(edges[k])]
            continue
        j = int(rng.integers(m))
        if j == i:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if int(rng.integers(2)):
            c, d = d, c
        new1 = (a, c) if a <= c else (c, a)
        new2 = (b, d) if b <= d else (d, b)
        if new1[0] == new1[1] or new2[0] == new2[1] or new1 == new2:
            continue
        if count.get(new1, 0) > 0 or count.get(new2, 0) > 0:
            continue
        for e in (edges[i], edges[j]):
            count[e] -= 1
            if count[e] == 0:
                del count[e]
        edges[i] = new1
        edges[j] = new2
        count[new1] = 1
        count[new2] = 1
        bad = [k for k in bad if k != i and is_bad(edges[k])]
    graph = Graph(n, edges)
    assert graph.degrees() == degrees
    return graph


def internal_stub_count(degree, mu):
    """Half-up rounding of (1-mu)*degree: the node's internal link budget."""
    return int((1.0 - mu) * degree + 0.5)


def assign_communities(degrees, sizes, mu, rng) -> Partition:
    """Place nodes into communities of the given sizes so that every node's
    internal stubs fit strictly inside its community.

    Uses random placement with kick-out: a node landing in a full community
    evicts a random member, which re-queues.
    """
    n = len(degrees)
    if sum(sizes) != n:
        raise ValueError(f"sizes sum to {sum(sizes)}, expected n={n}")
    c = len(sizes)
    int_deg = [internal_stub_count(d, mu) for d in degrees]
    largest = max(sizes)
    for v, idg in enumerate(int_deg):
        if idg >= largest:
            raise ValueError(
                f"node {v} needs a community larger than {idg}, but the "
                f"largest community has size {largest}"
            )
    # Communities ordered by size so each node draws uniformly among the
    # ones it fits in (same conditional distribution as retry-until-fit,
    # without burning the budget on rejected draws).
    by_size = sorted(range(c), key=lambda cid: sizes[cid])
    sorted_sizes = [sizes[cid] for cid in by_size]
    fit_count = [c - bisect.bisect_right(sorted_sizes, idg) for idg in int_deg]

    members = [[] for _ in range(c)]
    member_of = [-1] * n
    order = rng.permutation(n)
    queue = deque(int(v) for v in order)
    budget = 500 * n
    attempts = 0
    while queue:
        attempts += 1
        if attempts > budget:
            raise ValueError("community assignment did not settle within its retry budget")
        v = queue.popleft()
        cid = by_size[c - 1 - int(rng.integers(fit_count[v]))]
        if len(members[cid]) < sizes[cid]:
            members[cid].append(v)
            member_of[v] = cid
        else:
            crowd = members[cid]
            slot = int(rng.integers(len(crowd)))
            if fit_count[crowd[slot]] <= 1:
                # Don't displace a node that fits nowhere else while a
                # relocatable one is at hand; keeps tight instances from
                # cycling.
                for _ in range(10):
                    alt = int(rng.integers(len(crowd)))
                    if fit_count[crowd[alt]] > 1:
                        slot = alt
                        break
            evicted = crowd[slot]
            crowd[slot] = v
            member_of[evicted] = -1
            member_of[v] = cid
            queue.append(evicted)
    return Partition(member_of)


def rewire_to_mixing(graph: Graph, planted: Partition, config: LfrConfig, rng) -> Graph:
    """Degree-preserving double-edge swaps until the per-node average
    inter-community link fraction is within mixing_tolerance of config.mu.

    Emits MixingToleranceWarning (and returns the best-effort graph) if the
    swap budget runs out first.
    """
    if planted.node_count != graph.node_count:
        raise ValueError("partition does not cover the graph's node set")
    n = graph.node_count
    m = graph.edge_count
    limit = mu_limit(n, max(planted.community_sizes))
    if config.mu > limit and not config.allow_mu_beyond_limit:
        raise ValueError(
            f"target mu={config.mu} exceeds mu_limit={limit:.4f}; no significant "
            f"community structure is possible in this regime"
        )
    target = config.mu
    tol = config.mixing_tolerance
    member = planted.membership
    deg = graph.degrees()
    inv_deg = [1.0 / d if d else 0.0 for d in deg]
    active = sum(1 for d in deg if d > 0)
    if active == 0:
        raise ValueError("cannot rewire an edgeless graph")

    edges = list(graph.edges)
    edge_set = set(edges)
    # ratio_sum tracks sum over nodes of ext(v)/deg(v); mu_hat = ratio_sum/active.
    ratio_sum = 0.0
    inter_idx, intra_idx = [], []
    inter_pos = {}
    intra_pos = {}
    # Inter-community edges indexed by incident community: lets the
    # reduction direction pick partners that are guaranteed to close an
    # intra-community edge.
    by_comm = [[] for _ in range(planted.num_communities)]
    by_comm_pos = {}

    def add(i):
        u, v = edges[i]
        cu, cv = member[u], member[v]
        if cu != cv:
            inter_pos[i] = len(inter_idx)
            inter_idx.append(i)
            for c in (cu, cv):
                by_comm_pos[(i, c)] = len(by_comm[c])
                by_comm[c].append(i)
        else:
            intra_pos[i] = len(intra_idx)
            intra_idx.append(i)

    def drop(i):
        u, v = edges[i]
        cu, cv = member[u], member[v]
        if cu != cv:
            pos = inter_pos.pop(i)
            last = inter_idx.pop()
            if last != i:
                inter_idx[pos] = last
                inter_pos[last] = pos
            for c in (cu, cv):
                pos = by_comm_pos.pop((i, c))
                lst = by_comm[c]
                last = lst.pop()
                if last != i:
                    lst[pos] = last
                    by_comm_pos[(last, c)] = pos
        else:
            pos = intra_pos.pop(i)
            last = intra_idx.pop()
            if last != i:
                intra_idx[pos] = last
                intra_pos[last] = pos

    for i, (u, v) in enumerate(edges):
        add(i)
        if member[u] != member[v]:
            ratio_sum += inv_deg[u] + inv_deg[v]

    current_gap = abs(ratio_sum / active - target)
    if current_gap <= tol:
        return graph

    def swap_delta(old1, old2, new1, new2):
        delta = 0.0
        for u, v in (old1, old2):
            if member[u] != member[v]:
                delta -= inv_deg[u] + inv_deg[v]
        for u, v in (new1, new2):
            if member[u] != member[v]:
                delta += inv_deg[u] + inv_deg[v]
        return delta

    budget = config.max_rewire_iterations if config.max_rewire_iterations else 50 * m
    # Drive the gap well inside the tolerance band rather than stopping at
    # its edge; the budget is checked against the full tolerance below.
    inner_tol = 0.25 * tol
    for _ in range(budget):
        if ratio_sum / active < target:
            # Break two intra edges of different communities into two
            # inter edges.
            if len(intra_idx) < 2:
                break
            i = intra_idx[int(rng.integers(len(intra_idx)))]
            j = intra_idx[int(rng.integers(len(intra_idx)))]
            a, b = edges[i]
            c, d = edges[j]
            if member[a] == member[c] or len({a, b, c, d}) < 4:
                continue
            if int(rng.integers(2)):
                c, d = d, c
        else:
            # Pair an inter edge with another inter edge touching the same
            # community, closing one intra edge there.
            if len(inter_idx) < 2:
                break
            i = inter_idx[int(rng.integers(len(inter_idx)))]
            a, b = edges[i]
            if int(rng.integers(2)):
                a, b = b, a
            focus = member[a]
            pool = by_comm[focus]
            if len(pool) < 2:
                continue
            j = pool[int(rng.integers(len(pool)))]
            if j == i:
                continue
            c, d = edges[j]
            if member[c] != focus:
                c, d = d, c
            if len({a, b, c, d}) < 4:
                continue
        new1 = (a, c) if a < c else (c, a)
        new2 = (b, d) if b < d else (d, b)
        if new1 in edge_set or new2 in edge_set:
            continue
        old1, old2 = edges[i], edges[j]
        delta = swap_delta(old1, old2, new1, new2)
        new_gap = abs((ratio_sum + delta) / active - target)
        if new_gap >= current_gap:
            continue
        drop(i)
        drop(j)
        edge_set.discard(old1)
        edge_set.discard(old2)
        edges[i] = new1
        edges[j] = new2
        edge_set.add(new1)
        edge_set.add(new2)
        add(i)
        add(j)
        ratio_sum += delta
        current_gap = new_gap
        if current_gap <= inner_tol:
            break
    if current_gap > tol:
        warnings.warn(
            MixingToleranceWarning(
                f"rewiring budget exhausted; achieved mu={ratio_sum / active:.4f} "
                f"(target {target})"
            )
        )
    result = Graph(n, edges)
    assert result.degrees() == deg
    return result


def _grow_largest(sizes, need, lo):
    """Raise the largest community to `need`, shaving the excess off the
    tail without dropping any community below `lo`."""
    sizes = sorted(sizes, reverse=True)
    delta = need - sizes[0]
    sizes[0] = need
    for i in range(len(sizes) - 1, 0, -1):
        if delta == 0:
            break
        take = min(delta, sizes[i] - lo)
        sizes[i] -= take
        delta -= take
    if delta:
        raise ValueError(
            f"cannot host the highest-degree node: it needs a community of "
            f"{need} but the size budget cannot provide one"
        )
    return sizes


def generate(config: LfrConfig) -> PlantedNetwork:
    """Run the full three-step generation. Deterministic given config.seed."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    degrees = sample_powerlaw_degrees(config, rng)
    resolved = config.with_resolved_bounds(min(degrees))
    resolved.validate()
    sizes = sample_community_sizes(resolved, rng)
    # The bounds guarantee a large-enough community is *allowed*; make sure
    # one was actually drawn, resampling (then adjusting) if not.
    need = max(internal_stub_count(d, resolved.mu) for d in degrees) + 1
    if max(sizes) < need:
        if need > resolved.max_community:
            raise ValueError(
                f"highest-degree node needs a community of {need}, above "
                f"max_community={resolved.max_community}"
            )
        for _ in range(50):
            sizes = sample_community_sizes(resolved, rng)
            if max(sizes) >= need:
                break
        else:
            sizes = _grow_largest(sizes, need, resolved.min_community)
    skeleton = configuration_model(degrees, rng)
    planted = assign_communities(degrees, sizes, resolved.mu, rng)
    graph = rewire_to_mixing(skeleton, planted, resolved, rng)
    report = measured_mixing(graph, planted)
    return PlantedNetwork(
        graph=graph,
        planted=planted,
        realized_mu=report.per_node,
        realized_mu_global=report.global_fraction,
        mu_limit=mu_limit(config.n, max(planted.community_sizes)),
        config=resolved,
        seed_used=config.seed,
    )
