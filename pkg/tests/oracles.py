"""Independent brute-force oracles used by the test suite.

These deliberately avoid the library's dynamic programs and caches: they
minimize over the mapping space / recompute from scratch, so agreement with
the fast implementations is meaningful evidence.
"""

from __future__ import annotations

import itertools
from math import sqrt

from vghier.tree import GroupTree


# ---------------------------------------------------------------------------
# Constrained Tai mappings


def _tree_arrays(tree: GroupTree):
    ids = tree.node_ids
    pos = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    anc = [[False] * n for _ in range(n)]  # anc[i][j]: ids[i] proper ancestor of ids[j]
    for j, v in enumerate(ids):
        p = tree.parent(v)
        while p is not None:
            anc[pos[p]][j] = True
            p = tree.parent(p)
    lca = [[0] * n for _ in range(n)]
    for i, a in enumerate(ids):
        for j, b in enumerate(ids):
            lca[i][j] = pos[tree.lca(a, b)]
    leaves = [frozenset(tree.leaves_of(v)) for v in ids]
    return ids, anc, lca, leaves


def _relabel(l1: frozenset, l2: frozenset) -> float:
    return len(l1 ^ l2) / len(l1 | l2)


def brute_force_cted(t1: GroupTree, t2: GroupTree) -> float:
    """Minimum cost over all constrained Tai mappings, normalized by node count.

    A mapping M (partial bijection V1 -> V2) must preserve the strict ancestor
    order in both directions, and for any three pairs (v1,w1),(v2,w2),(v3,w3)
    satisfy: v3 below lca(v1,v2) iff w3 below lca(w1,w2). Cost is unit
    deletion for unmatched vertices on both sides plus leaf-set Jaccard
    distance for matched pairs. Branch-and-bound over an explicit search; no
    dynamic programming.
    """
    ids1, anc1, lca1, leaves1 = _tree_arrays(t1)
    ids2, anc2, lca2, leaves2 = _tree_arrays(t2)
    n1, n2 = len(ids1), len(ids2)
    rel = [[_relabel(leaves1[i], leaves2[j]) for j in range(n2)] for i in range(n1)]

    # Candidate order: vertices of T1 in decreasing subtree size; for each, try
    # partners in increasing relabel cost before deletion.
    order = sorted(range(n1), key=lambda i: -len(leaves1[i]))

    def compatible(i: int, j: int, pairs: list[tuple[int, int]]) -> bool:
        for a, b in pairs:
            if anc1[i][a] != anc2[j][b] or anc1[a][i] != anc2[b][j]:
                return False
        for (a, b), (c, d) in itertools.combinations(pairs + [(i, j)], 2):
            la, lb = lca1[a][c], lca2[b][d]
            for e, f in pairs + [(i, j)]:
                if (e, f) in ((a, b), (c, d)):
                    continue
                if anc1[la][e] != anc2[lb][f]:
                    return False
        return True

    # Seed the upper bound with a greedy mapping built through the same
    # compatibility predicate, so the bound is always achievable. (An
    # equal-leaf-set pairing is NOT always a valid constrained mapping.)
    def greedy_upper_bound() -> float:
        pairs: list[tuple[int, int]] = []
        used: set[int] = set()
        cost = 0.0
        for i in order:
            choice = None
            for j in sorted(
                (j for j in range(n2) if j not in used), key=lambda j: rel[i][j]
            ):
                if compatible(i, j, pairs):
                    choice = j
                    break
            if choice is None:
                cost += 1.0
            else:
                pairs.append((i, choice))
                used.add(choice)
                cost += rel[i][choice]
        return cost + (n2 - len(pairs))

    best = greedy_upper_bound()

    def search(k: int, pairs: list[tuple[int, int]], used2: set[int], cost: float):
        nonlocal best
        matched = len(pairs)
        remaining = n1 - k
        lb = cost + max(0, (n2 - matched) - remaining)
        if lb >= best:
            return
        if k == n1:
            total = cost + (n2 - matched)
            if total < best:
                best = total
            return
        i = order[k]
        cands = sorted(
            (j for j in range(n2) if j not in used2), key=lambda j: rel[i][j]
        )
        for j in cands:
            if cost + rel[i][j] >= best:
                break  # candidates sorted; later ones cost no less
            if compatible(i, j, pairs):
                pairs.append((i, j))
                used2.add(j)
                search(k + 1, pairs, used2, cost + rel[i][j])
                used2.discard(j)
                pairs.pop()
        search(k + 1, pairs, used2, cost + 1.0)  # delete ids1[i]

    search(0, [], set(), 0.0)
    return best / (n1 + n2)


# ---------------------------------------------------------------------------
# Pairwise FMI


def brute_force_fmi(blocks1: list[set[int]], blocks2: list[set[int]]) -> float:
    """Pairwise Fowlkes--Mallows by explicit pair enumeration."""
    leaves = sorted(set().union(*blocks1))

    def pairs(blocks):
        out = set()
        for b in blocks:
            for x, y in itertools.combinations(sorted(b), 2):
                out.add((x, y))
        return out

    p1, p2 = pairs(blocks1), pairs(blocks2)
    if not p1 and not p2:
        return 1.0
    if not p1 or not p2:
        return 0.0
    tp = len(p1 & p2)
    return tp / sqrt(len(p1) * len(p2))


# ---------------------------------------------------------------------------
# Naive greedy replay


def naive_greedy_merge_sequence(model, doc):
    """Replay greedy merging, recomputing every pairwise affinity from scratch
    each round; returns the merge sequence [(lo_idx, hi_idx), ...] using the
    same creation-index tie-break (min lower index, then min upper)."""
    clusters: dict[int, frozenset[int]] = {
        i: frozenset([i]) for i in range(doc.n_paths)
    }
    next_id = doc.n_paths
    seq = []
    while len(clusters) > 1:
        alive = sorted(clusters)
        best_pair = None
        best_aff = None
        for a, b in itertools.combinations(alive, 2):
            aff = model.pairwise_affinity(doc, clusters[a], clusters[b])
            key = (-aff, a, b)
            if best_aff is None or key < best_aff:
                best_aff = key
                best_pair = (a, b)
        a, b = best_pair
        seq.append((a, b))
        clusters[next_id] = clusters.pop(a) | clusters.pop(b)
        next_id += 1
    return seq
