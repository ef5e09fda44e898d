"""Tree-comparison metrics: CTED, depth-cut FMI, and node overlap.

CTED is the constrained (Zhang 1996) edit distance between unordered trees
under the leaf-set cost scheme — delete cost 1, relabel cost
|L1 xor L2| / |L1 union L2| — normalized by the total node count of both
trees. The dynamic program matches child forests with an assignment solver;
its brute-force constrained-mapping oracle lives in the test suite.
"""

from __future__ import annotations

from collections import Counter
from math import sqrt
from typing import Iterable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyGroup, LeafSetMismatch, UnknownNode
from .tree import GroupTree


def _check_same_leaves(t1: GroupTree, t2: GroupTree) -> None:
    if t1.path_indices != t2.path_indices:
        raise LeafSetMismatch(
            f"trees cover different paths: {sorted(t1.path_indices)[:8]}... vs "
            f"{sorted(t2.path_indices)[:8]}..."
        )


def _dfs_arrays(tree: GroupTree) -> tuple[list[frozenset[int]], list[list[int]]]:
    """Preorder leaf-set and adjacency arrays (children after parents)."""
    leaf_sets: list[frozenset[int]] = []
    adj: list[list[int]] = []
    stack: list[tuple[int, int]] = [(tree.root, -1)]
    while stack:
        nid, parent_pos = stack.pop()
        pos = len(adj)
        adj.append([])
        leaf_sets.append(tree.leaves_of(nid))
        if parent_pos >= 0:
            adj[parent_pos].append(pos)
        for c in reversed(tree.children(nid)):
            stack.append((c, pos))
    return leaf_sets, adj


def relabel_cost(l1: frozenset[int], l2: frozenset[int]) -> float:
    """|L1 xor L2| / |L1 union L2|; 0 iff the leaf sets are equal."""
    union = len(l1 | l2)
    return len(l1 ^ l2) / union if union else 0.0


def cted(t1: GroupTree, t2: GroupTree) -> float:
    """Normalized constrained tree edit distance in [0, 1]."""
    _check_same_leaves(t1, t2)
    ls1, adj1 = _dfs_arrays(t1)
    ls2, adj2 = _dfs_arrays(t2)
    m, n = len(ls1), len(ls2)

    reps = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            reps[i, j] = relabel_cost(ls1[i], ls2[j])

    # D_tree[i, j] / D_forest[i, j]: edit cost between the subtrees / child
    # forests rooted at preorder positions i and j; row m / column n mean
    # "empty" (pure deletion or insertion).
    D_tree = np.zeros((m + 1, n + 1))
    D_forest = np.zeros((m + 1, n + 1))

    for i in range(m - 1, -1, -1):
        for c in adj1[i]:
            D_forest[i, n] += D_tree[c, n]
        D_tree[i, n] = 1.0 + D_forest[i, n]
    for j in range(n - 1, -1, -1):
        for c in adj2[j]:
            D_forest[m, j] += D_tree[m, c]
        D_tree[m, j] = 1.0 + D_forest[m, j]

    for i in range(m - 1, -1, -1):
        for j in range(n - 1, -1, -1):
            kids_i, kids_j = adj1[i], adj2[j]
            mi, nj = len(kids_i), len(kids_j)

            # forest distance: children of i vs children of j
            if mi == 0:
                D_forest[i, j] = D_forest[m, j]
            elif nj == 0:
                D_forest[i, j] = D_forest[i, n]
            else:
                # keep one child forest of i, delete the other child trees
                del_cost = min(
                    D_forest[c, j] + D_forest[i, n] - D_forest[c, n] for c in kids_i
                )
                # keep one child forest of j, insert the other child trees
                ins_cost = min(
                    D_forest[i, c] + D_forest[m, j] - D_forest[m, c] for c in kids_j
                )
                # or match child trees one-to-one (padded assignment:
                # off-diagonal deletions are impossible, unmatched pad is free)
                C = np.full((mi + nj, mi + nj), np.inf)
                for ci in range(mi):
                    for cj in range(nj):
                        C[ci, cj] = D_tree[kids_i[ci], kids_j[cj]]
                for ci in range(mi):
                    C[ci, nj + ci] = D_tree[kids_i[ci], n]
                for cj in range(nj):
                    C[mi + cj, cj] = D_tree[m, kids_j[cj]]
                C[mi:, nj:] = 0.0
                rows, cols = linear_sum_assignment(C)
                match_cost = float(C[rows, cols].sum())
                D_forest[i, j] = min(del_cost, ins_cost, match_cost)

            # tree distance: subtree at i vs subtree at j
            if mi == 0:
                del_cost = D_tree[m, j]
            else:
                del_cost = min(
                    D_tree[c, j] + D_tree[i, n] - D_tree[c, n] for c in kids_i
                )
            if nj == 0:
                ins_cost = D_tree[i, n]
            else:
                ins_cost = min(
                    D_tree[i, c] + D_tree[m, j] - D_tree[m, c] for c in kids_j
                )
            rep_cost = reps[i, j] + D_forest[i, j]
            D_tree[i, j] = min(del_cost, ins_cost, rep_cost)

    return float(D_tree[0, 0]) / (m + n)


# ---------------------------------------------------------------------------
# depth-cut clusterings and FMI


def depth_cut(tree: GroupTree, d: int) -> list[frozenset[int]]:
    """Partition of the paths: leaf sets of all vertices at depth exactly d,
    plus singletons for leaves shallower than d."""
    if d < 1:
        raise ValueError("cut depth must be >= 1")
    blocks: list[frozenset[int]] = []
    for nid in tree.node_ids:
        depth = tree.depth(nid)
        if depth == d:
            blocks.append(tree.leaves_of(nid))
        elif depth < d and tree.is_leaf(nid):
            blocks.append(tree.leaves_of(nid))
    return sorted(blocks, key=lambda b: sorted(b))


def fmi(t1: GroupTree, t2: GroupTree, d: int) -> float:
    """Fowlkes-Mallows index of the two depth-d clusterings.

    Pairwise form: TP / sqrt((TP+FP)(TP+FN)) over co-clustered leaf pairs.
    Convention: both clusterings all-singleton -> 1.0; only one -> 0.0.
    """
    _check_same_leaves(t1, t2)
    c1 = depth_cut(t1, d)
    c2 = depth_cut(t2, d)
    label1 = {p: i for i, block in enumerate(c1) for p in block}
    label2 = {p: i for i, block in enumerate(c2) for p in block}

    def comb2(k: int) -> int:
        return k * (k - 1) // 2

    paths = sorted(t1.path_indices)
    contingency = Counter((label1[p], label2[p]) for p in paths)
    tp = sum(comb2(c) for c in contingency.values())
    pairs1 = sum(comb2(len(b)) for b in c1)
    pairs2 = sum(comb2(len(b)) for b in c2)
    if pairs1 == 0 and pairs2 == 0:
        return 1.0
    if pairs1 == 0 or pairs2 == 0:
        return 0.0
    return tp / sqrt(pairs1 * pairs2)


# ---------------------------------------------------------------------------
# node overlap


def iou(a: frozenset[int], b: frozenset[int]) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def node_overlap(group: Iterable[int], tree: GroupTree) -> float:
    """max over tree vertices v of IoU(leaves_of(v), group)."""
    g = frozenset(group)
    if not g:
        raise EmptyGroup("node_overlap needs a non-empty group")
    if not g <= tree.path_indices:
        raise UnknownNode(f"group contains paths outside the tree: {sorted(g - tree.path_indices)}")
    return max(iou(tree.leaves_of(nid), g) for nid in tree.node_ids)


def mean_node_overlap(gt: GroupTree, inferred: GroupTree) -> float:
    """Mean node_overlap of every ground-truth internal node's leaf set
    against the inferred tree (1.0 iff all GT groups are recovered exactly)."""
    _check_same_leaves(gt, inferred)
    internal = gt.internal_ids
    if not internal:
        return 1.0
    return float(
        np.mean([node_overlap(gt.leaves_of(g), inferred) for g in internal])
    )
