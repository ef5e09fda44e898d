"""Tree inference: greedy pairwise merging, containment, scribble ranking.

Greedy inference keeps one cluster per live subtree, scores every live pair
with the affinity model (embedding the union of leaf paths for embedding
models — parent embeddings are recomputed from raw path subsets, never from
child embeddings), and repeatedly merges the maximum-affinity pair.
Candidate pairs sit in a lazily invalidated max-heap; affinities for
embedding models are cosine of per-cluster cached embeddings, so each
cluster is embedded once.

Containment-guided inference runs the same merge core per containment
family, which makes it byte-identical to plain greedy inference whenever
the containment graph is empty.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .affinity import AffinityModel, EmbeddingAffinityModel
from .doc import VectorDocument
from .errors import EmptyDocument, EmptyScribble, UnknownNode
from .metrics import iou
from .tree import GroupTree


# ---------------------------------------------------------------------------
# greedy merging


class _Merger:
    """Shared greedy-merge core with a global creation-index counter.

    Cluster ids double as creation indices and as node ids of the final
    tree: leaves are 0..N-1, every new parent takes the next integer.
    """

    def __init__(self, model: AffinityModel, doc: VectorDocument):
        self.model = model
        self.doc = doc
        self.leaves: dict[int, frozenset[int]] = {
            i: frozenset((i,)) for i in range(doc.n_paths)
        }
        self.children: dict[int, tuple[int, int]] = {}
        self.next_id = doc.n_paths
        self._embeds: dict[int, np.ndarray] = {}
        self._use_embeddings = isinstance(model, EmbeddingAffinityModel)

    def _embedding(self, cid: int) -> np.ndarray:
        e = self._embeds.get(cid)
        if e is None:
            e = self.model.embed(self.doc, self.leaves[cid])  # type: ignore[attr-defined]
            self._embeds[cid] = e
        return e

    def _affinity(self, ci: int, cj: int) -> float:
        if self._use_embeddings:
            return float(np.dot(self._embedding(ci), self._embedding(cj)))
        return float(
            self.model.pairwise_affinity(self.doc, self.leaves[ci], self.leaves[cj])
        )

    def join(self, ci: int, cj: int) -> int:
        """Forced merge: fresh parent over two clusters (no affinity)."""
        cid = self.next_id
        self.next_id += 1
        lo, hi = min(ci, cj), max(ci, cj)
        self.children[cid] = (lo, hi)
        self.leaves[cid] = self.leaves[ci] | self.leaves[cj]
        return cid

    def merge_group(self, members: list[int]) -> int:
        """Greedy-merge the given clusters down to one; returns its id.

        Ties on affinity prefer the pair minimizing (min creation index,
        then max), realized by the heap tuple ordering.
        """
        if not members:
            raise ValueError("merge_group needs at least one cluster")
        alive = set(members)
        heap: list[tuple[float, int, int]] = []
        ordered = sorted(alive)
        for a in range(len(ordered)):
            for b in range(a + 1, len(ordered)):
                ci, cj = ordered[a], ordered[b]
                heapq.heappush(heap, (-self._affinity(ci, cj), ci, cj))
        while len(alive) > 1:
            neg_aff, ci, cj = heapq.heappop(heap)
            if ci not in alive or cj not in alive:
                continue
            alive.discard(ci)
            alive.discard(cj)
            cid = self.join(ci, cj)
            for other in sorted(alive):
                lo, hi = min(cid, other), max(cid, other)
                heapq.heappush(heap, (-self._affinity(lo, hi), lo, hi))
            alive.add(cid)
        return next(iter(alive))

    def build_tree(self, root: int) -> GroupTree:
        nodes = [{"id": i, "path": i} for i in range(self.doc.n_paths)]
        nodes += [
            {"id": cid, "children": list(kids)}
            for cid, kids in sorted(self.children.items())
        ]
        tree = GroupTree.from_nodes(root, nodes)
        tree.validate(self.doc.n_paths)
        return tree


def greedy_tree(model: AffinityModel, doc: VectorDocument) -> GroupTree:
    """Algorithm-1-style inference: merge the maximum-affinity pair N-1 times."""
    if doc.n_paths == 0:
        raise EmptyDocument("cannot infer a tree over zero paths")
    merger = _Merger(model, doc)
    root = merger.merge_group(list(range(doc.n_paths)))
    return merger.build_tree(root)


# ---------------------------------------------------------------------------
# containment


@dataclass
class ContainmentGraph:
    """parent_of maps a contained path to its chosen (minimum-area) container;
    paths without a container are absent."""

    parent_of: dict[int, int] = field(default_factory=dict)

    @property
    def n_edges(self) -> int:
        return len(self.parent_of)

    def parent(self, path: int) -> Optional[int]:
        return self.parent_of.get(path)

    def children_of(self, path: int) -> list[int]:
        return sorted(p for p, q in self.parent_of.items() if q == path)

    def roots(self, n_paths: int) -> list[int]:
        return [p for p in range(n_paths) if p not in self.parent_of]

    def to_json(self) -> str:
        payload = {str(p): q for p, q in self.parent_of.items()}
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ContainmentGraph":
        payload = json.loads(text)
        return cls(parent_of={int(p): int(q) for p, q in payload.items()})


def points_in_polygon(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Even-odd (crossing number) point-in-polygon test, vectorized.

    The polygon ring is closed implicitly (last vertex connects to the
    first), which also realizes endpoint-closing for open polylines.
    """
    px = points[:, 0:1]
    py = points[:, 1:2]
    x1 = polygon[:, 0]
    y1 = polygon[:, 1]
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)
    crosses = (y1 > py) != (y2 > py)
    dy = np.where(y2 == y1, 1.0, y2 - y1)  # masked by `crosses` anyway
    x_at = x1 + (py - y1) * (x2 - x1) / dy
    hits = crosses & (px < x_at)
    return hits.sum(axis=1) % 2 == 1


def polygon_area(polygon: np.ndarray) -> float:
    """Shoelace area of the (implicitly closed) ring."""
    x = polygon[:, 0]
    y = polygon[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


_VERTEX_FRACTION = 0.95


def path_contains(container: np.ndarray, contained: np.ndarray) -> bool:
    """>= 95% of `contained` vertices inside `container`'s closed region."""
    inside = points_in_polygon(contained, container)
    return bool(inside.mean() >= _VERTEX_FRACTION)


def containment_graph(doc: VectorDocument) -> ContainmentGraph:
    """Detect path-inside-path nesting; each contained path gets the
    minimum-area container as parent (ties: lowest path index)."""
    n = doc.n_paths
    areas = [polygon_area(p.polyline) for p in doc.paths]
    bboxes = doc.path_bboxes
    parent_of: dict[int, int] = {}
    for p in range(n):
        best: Optional[tuple[float, int]] = None
        for q in range(n):
            if q == p or areas[q] <= areas[p]:
                continue
            # a container's bbox must overlap the contained path's bbox
            if (
                bboxes[q, 0] > bboxes[p, 2]
                or bboxes[q, 2] < bboxes[p, 0]
                or bboxes[q, 1] > bboxes[p, 3]
                or bboxes[q, 3] < bboxes[p, 1]
            ):
                continue
            if path_contains(doc.paths[q].polyline, doc.paths[p].polyline):
                key = (areas[q], q)
                if best is None or key < best:
                    best = key
        if best is not None:
            parent_of[p] = best[1]
    return ContainmentGraph(parent_of=parent_of)


def containment_guided_tree(
    model: AffinityModel, doc: VectorDocument, graph: Optional[ContainmentGraph] = None
) -> GroupTree:
    """Greedy inference constrained by the containment graph (Fig.-7 style).

    Sibling sets under each containing path are greedy-merged into one
    subtree, which then joins a fresh node together with the container's own
    leaf; top-level paths are greedy-merged last. Every containment edge
    q -> p ends up as an ancestor/descendant relation.
    """
    if doc.n_paths == 0:
        raise EmptyDocument("cannot infer a tree over zero paths")
    if graph is None:
        graph = containment_graph(doc)
    merger = _Merger(model, doc)

    depth: dict[int, int] = {}

    def chain_depth(p: int) -> int:
        if p not in depth:
            q = graph.parent(p)
            depth[p] = 0 if q is None else 1 + chain_depth(q)
        return depth[p]

    parents = sorted({q for q in graph.parent_of.values()})
    parents.sort(key=lambda q: (-chain_depth(q), q))

    cluster_for: dict[int, int] = {}  # containing path -> its combined cluster

    def item(p: int) -> int:
        return cluster_for.get(p, p)

    for q in parents:
        kids = [item(p) for p in graph.children_of(q)]
        grouped = merger.merge_group(kids) if len(kids) > 1 else kids[0]
        cluster_for[q] = merger.join(q, grouped)

    top = [item(p) for p in graph.roots(doc.n_paths)]
    root = merger.merge_group(top)
    return merger.build_tree(root)


# ---------------------------------------------------------------------------
# scribble suggestions


def scribble_suggest(tree: GroupTree, touched: Iterable[int], k: int) -> list[int]:
    """Node ids ranked by IoU(leaves_of(v), touched), descending; ties prefer
    fewer leaves then lower id. Returns min(k, |V|) ids."""
    touched_set = frozenset(touched)
    if not touched_set:
        raise EmptyScribble("scribble touched no paths")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not touched_set <= tree.path_indices:
        raise UnknownNode(
            f"scribble contains unknown paths: {sorted(touched_set - tree.path_indices)}"
        )
    ranked = sorted(
        tree.node_ids,
        key=lambda nid: (
            -iou(tree.leaves_of(nid), touched_set),
            len(tree.leaves_of(nid)),
            nid,
        ),
    )
    return ranked[: min(k, tree.n_nodes)]
