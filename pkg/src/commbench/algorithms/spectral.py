"""Spectral bisection on the modularity matrix.

The dominant eigenvector of the (generalized, for subdivisions) modularity
matrix B with entries A_uv - d_u*d_v/2m is found by power iteration after a
diagonal shift that makes the algebraically largest eigenvalue dominant;
splits are accepted only when they strictly increase modularity.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.sparse as sp

from ..graph import Graph, Partition
from . import ConvergenceWarning


def _shift_bound(sub, d_g, row_within, two_m):
    """Max absolute row sum of the generalized modularity matrix for the
    subgroup, computed in O(edges) from the sparse structure."""
    d_total = d_g.sum()
    # Off-diagonal |B_ij| summed as if no edges, then corrected per edge.
    off = d_g * (d_total - d_g) / two_m
    coo = sub.tocoo()
    p = d_g[coo.row] * d_g[coo.col] / two_m
    corr = np.abs(1.0 - p) - p
    np.add.at(off, coo.row, corr)
    row_adjust = row_within - d_g * d_total / two_m
    diag = np.abs(-d_g * d_g / two_m - row_adjust)
    return float(np.max(off + diag))


def leading_eigenvector(graph: Graph, params) -> Partition:
    """Recursive sign-split on the dominant modularity-matrix eigenvector;
    indivisible groups (non-positive leading eigenvalue, non-positive
    modularity gain, or non-converged iteration) become communities."""
    if graph.edge_count == 0:
        raise ValueError("needs at least one edge")
    params.validate()
    rng = np.random.default_rng(params.seed)
    n = graph.node_count
    two_m = 2.0 * graph.edge_count
    deg = np.asarray(graph.degrees(), dtype=float)
    rows, cols = [], []
    for u, v in graph.edges:
        rows += [u, v]
        cols += [v, u]
    adjacency = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(n, n)
    )

    labels = np.full(n, -1, dtype=int)
    next_label = 0
    stack = [np.arange(n)]
    while stack:
        group = stack.pop()
        split = _try_split(adjacency, deg, two_m, group, params, rng)
        if split is None:
            labels[group] = next_label
            next_label += 1
        else:
            left, right = split
            stack.append(right)
            stack.append(left)
    return Partition.from_labels(labels.tolist())


def _try_split(adjacency, deg, two_m, group, params, rng):
    """Return (left, right) node-index arrays or None if indivisible."""
    size = len(group)
    if size < 2:
        return None
    sub = adjacency[group][:, group].tocsr()
    d_g = deg[group]
    d_total = d_g.sum()
    row_within = np.asarray(sub.sum(axis=1)).ravel()
    # Row sums of B restricted to the group; subtracting them on the
    # diagonal makes the generalized matrix annihilate constant vectors.
    row_adjust = row_within - d_g * d_total / two_m

    def matvec(x):
        return sub @ x - d_g * (d_g @ x) / two_m - row_adjust * x

    shift = _shift_bound(sub, d_g, row_within, two_m)
    if shift <= 0.0:
        return None
    x = rng.normal(size=size)
    x /= np.linalg.norm(x)
    converged = False
    for _ in range(params.eigen_max_iterations):
        y = matvec(x) + shift * x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return None
        y /= norm
        if y @ x < 0:
            y = -y
        if np.max(np.abs(y - x)) < params.eigen_tolerance:
            x = y
            converged = True
            break
        x = y
    if not converged:
        warnings.warn(
            ConvergenceWarning(
                f"power iteration did not converge on a subgroup of size {size}; "
                f"treating it as indivisible"
            )
        )
        return None
    leading = float(x @ (matvec(x) + shift * x)) - shift
    if leading <= 1e-10:
        return None
    s = np.where(x >= 0.0, 1.0, -1.0)
    if np.all(s > 0) or np.all(s < 0):
        return None
    gain = (s @ matvec(s)) / (2.0 * two_m)
    if gain <= 1e-12:
        return None
    return group[s > 0], group[s < 0]
