"""Grouping trees over vector documents.

A GroupTree is a rooted tree whose leaves biject to the path indices of a
document and whose internal vertices each have at least two children. Trees
are immutable once constructed; inference and generators build them from
node dicts or nested lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import TreeParseError, TreeValidationError, UnknownNode


@dataclass(frozen=True)
class _Node:
    id: int
    children: tuple[int, ...] = ()
    path: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return self.path is not None


class GroupTree:
    """Immutable rooted grouping tree with integer node ids."""

    def __init__(self, root: int, nodes: Iterable[_Node]):
        self._nodes: dict[int, _Node] = {}
        for n in nodes:
            if n.id in self._nodes:
                raise TreeValidationError(f"duplicate node id {n.id}")
            self._nodes[n.id] = n
        if root not in self._nodes:
            raise TreeValidationError(f"root id {root} not among nodes")
        self.root = root
        self._parent: dict[int, int] = {}
        self._depth: dict[int, int] = {}
        self._leaves: dict[int, frozenset[int]] = {}
        self._leaf_by_path: dict[int, int] = {}
        self._index()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_nodes(cls, root: int, nodes: Sequence[dict]) -> "GroupTree":
        """Build from JSON-shaped node dicts ({"id", "children"} or {"id", "path"})."""
        parsed = []
        for spec in nodes:
            try:
                nid = int(spec["id"])
            except (KeyError, TypeError, ValueError) as exc:
                raise TreeParseError(f"node without usable id: {spec!r}") from exc
            if "path" in spec and "children" in spec:
                raise TreeParseError(f"node {nid} has both path and children")
            if "path" in spec:
                parsed.append(_Node(nid, path=int(spec["path"])))
            elif "children" in spec:
                parsed.append(_Node(nid, children=tuple(int(c) for c in spec["children"])))
            else:
                raise TreeParseError(f"node {nid} has neither path nor children")
        return cls(root, parsed)

    @classmethod
    def from_nested(cls, spec: Sequence | int) -> "GroupTree":
        """Build from nested lists of path indices, e.g. [[0, 1], [2, [3, 4]]].

        Leaves take their path index as node id; internal vertices are
        numbered N, N+1, ... in construction (post-order) order.
        """
        paths: list[int] = []

        def collect(s) -> None:
            if isinstance(s, (int, np.integer)):
                paths.append(int(s))
            elif isinstance(s, Sequence) and not isinstance(s, (str, bytes)):
                for c in s:
                    collect(c)
            else:
                raise TreeParseError(f"nested spec contains {type(s).__name__}")

        collect(spec)
        if not paths:
            raise TreeParseError("empty nested spec")
        next_id = max(paths) + 1
        nodes: list[_Node] = []

        def build(s) -> int:
            nonlocal next_id
            if isinstance(s, (int, np.integer)):
                nodes.append(_Node(int(s), path=int(s)))
                return int(s)
            kids = tuple(build(c) for c in s)
            if len(kids) == 1:
                return kids[0]  # collapse singleton wrappers
            nid = next_id
            next_id += 1
            nodes.append(_Node(nid, children=kids))
            return nid

        root = build(spec)
        return cls(root, nodes)

    # -- indexing ----------------------------------------------------------

    def _index(self) -> None:
        seen_child = set()
        for n in self._nodes.values():
            for c in n.children:
                if c not in self._nodes:
                    raise TreeValidationError(f"node {n.id} references missing child {c}")
                if c in seen_child:
                    raise TreeValidationError(f"node {c} has multiple parents")
                if c == n.id:
                    raise TreeValidationError(f"node {n.id} is its own child")
                seen_child.add(c)
                self._parent[c] = n.id
        if self.root in self._parent:
            raise TreeValidationError("root has a parent")
        # iterative post-order: depths, leaf sets, reachability, arity
        order: list[int] = []
        stack = [(self.root, 0)]
        while stack:
            nid, d = stack.pop()
            if d > len(self._nodes):
                raise TreeValidationError("cycle detected")
            self._depth[nid] = d
            order.append(nid)
            for c in self._nodes[nid].children:
                stack.append((c, d + 1))
        if len(order) != len(self._nodes):
            raise TreeValidationError("unreachable nodes present")
        for nid in reversed(order):
            n = self._nodes[nid]
            if n.is_leaf:
                if n.path in self._leaf_by_path:
                    raise TreeValidationError(f"path {n.path} appears on multiple leaves")
                self._leaf_by_path[n.path] = nid
                self._leaves[nid] = frozenset((n.path,))
            else:
                if len(n.children) < 2:
                    raise TreeValidationError(
                        f"internal node {nid} has {len(n.children)} child(ren)"
                    )
                self._leaves[nid] = frozenset().union(
                    *(self._leaves[c] for c in n.children)
                )

    # -- queries -----------------------------------------------------------

    def _node(self, nid: int) -> _Node:
        try:
            return self._nodes[nid]
        except KeyError:
            raise UnknownNode(f"no node with id {nid}") from None

    @property
    def node_ids(self) -> list[int]:
        return sorted(self._nodes)

    @property
    def leaf_ids(self) -> list[int]:
        return sorted(n.id for n in self._nodes.values() if n.is_leaf)

    @property
    def internal_ids(self) -> list[int]:
        return sorted(n.id for n in self._nodes.values() if not n.is_leaf)

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_leaves(self) -> int:
        return len(self._leaf_by_path)

    @property
    def path_indices(self) -> frozenset[int]:
        return self._leaves[self.root]

    def is_leaf(self, nid: int) -> bool:
        return self._node(nid).is_leaf

    def children(self, nid: int) -> tuple[int, ...]:
        return self._node(nid).children

    def parent(self, nid: int) -> Optional[int]:
        self._node(nid)
        return self._parent.get(nid)

    def path_of(self, nid: int) -> int:
        n = self._node(nid)
        if not n.is_leaf:
            raise UnknownNode(f"node {nid} is internal, has no path")
        return n.path  # type: ignore[return-value]

    def leaf_for_path(self, path: int) -> int:
        try:
            return self._leaf_by_path[path]
        except KeyError:
            raise UnknownNode(f"no leaf for path index {path}") from None

    def depth(self, nid: int) -> int:
        self._node(nid)
        return self._depth[nid]

    def leaves_of(self, nid: int) -> frozenset[int]:
        """Path indices under `nid` (the node's leaf label set)."""
        self._node(nid)
        return self._leaves[nid]

    def lca(self, a: int, b: int) -> int:
        self._node(a), self._node(b)
        while self._depth[a] > self._depth[b]:
            a = self._parent[a]
        while self._depth[b] > self._depth[a]:
            b = self._parent[b]
        while a != b:
            a, b = self._parent[a], self._parent[b]
        return a

    def tdist(self, a: int, b: int) -> int:
        """Tree distance: depth(a) + depth(b) - 2 * depth(lca(a, b))."""
        anc = self.lca(a, b)
        return self._depth[a] + self._depth[b] - 2 * self._depth[anc]

    def tdist_paths(self, pa: int, pb: int) -> int:
        """Tree distance between the leaves carrying path indices pa and pb."""
        return self.tdist(self.leaf_for_path(pa), self.leaf_for_path(pb))

    def postorder(self) -> list[int]:
        out: list[int] = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            nid, expanded = stack.pop()
            if expanded:
                out.append(nid)
                continue
            stack.append((nid, True))
            for c in reversed(self._nodes[nid].children):
                stack.append((c, False))
        return out

    def max_depth(self) -> int:
        return max(self._depth.values())

    def validate(self, n_paths: Optional[int] = None) -> None:
        """Check leaf/path bijection against a document of n_paths paths.

        Structural invariants are enforced at construction; this verifies
        the bijection when the document size is known.
        """
        if n_paths is not None:
            expected = frozenset(range(n_paths))
            actual = self._leaves[self.root]
            if actual != expected:
                missing = sorted(expected - actual)
                extra = sorted(actual - expected)
                raise TreeValidationError(
                    f"leaf paths do not biject to 0..{n_paths - 1}: "
                    f"missing {missing}, extra {extra}"
                )

    def to_nested(self, shift: int = 0):
        """Nested-list form (path indices, optionally shifted); inverse of
        from_nested up to internal node renumbering."""

        def conv(nid: int):
            n = self._nodes[nid]
            if n.is_leaf:
                return n.path + shift
            return [conv(c) for c in n.children]

        return conv(self.root)

    # -- serialization -----------------------------------------------------

    def to_obj(self) -> dict:
        nodes = []
        for nid in sorted(self._nodes):
            n = self._nodes[nid]
            if n.is_leaf:
                nodes.append({"id": nid, "path": n.path})
            else:
                nodes.append({"id": nid, "children": list(n.children)})
        return {"nodes": nodes, "root": self.root}

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_obj(cls, obj: dict) -> "GroupTree":
        if not isinstance(obj, dict) or "root" not in obj or "nodes" not in obj:
            raise TreeParseError("tree object needs 'root' and 'nodes'")
        return cls.from_nodes(int(obj["root"]), obj["nodes"])

    @classmethod
    def from_json(cls, text: str) -> "GroupTree":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TreeParseError(f"broken tree JSON: {exc}") from exc
        return cls.from_obj(obj)

    # -- misc --------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupTree):
            return NotImplemented
        return self.root == other.root and self._nodes == other._nodes

    def __hash__(self) -> int:
        return hash((self.root, frozenset(self._nodes.values())))

    def __repr__(self) -> str:
        return (
            f"GroupTree(root={self.root}, n_leaves={self.n_leaves}, "
            f"n_nodes={self.n_nodes})"
        )


def validate(tree, n_paths: Optional[int] = None) -> Optional[str]:
    """Check all GroupTree invariants; None if valid, else a report string
    naming the first violated invariant and offending node.

    Accepts a GroupTree or a JSON-shaped {"root", "nodes"} dict, so raw
    (possibly invalid) tree data can be checked without constructing.
    """
    try:
        t = GroupTree.from_obj(tree) if isinstance(tree, dict) else tree
        if not isinstance(t, GroupTree):
            return f"not a tree: {type(tree).__name__}"
        t.validate(n_paths)
    except (TreeParseError, TreeValidationError) as exc:
        return str(exc)
    return None


def random_tree(
    n_leaves: int,
    rng: np.random.Generator,
    binary: bool = False,
    max_children: int = 4,
) -> GroupTree:
    """Random grouping tree over paths 0..n_leaves-1 (for tests and demos).

    Grows by repeatedly merging a random subset of the current roots.
    Leaves take ids 0..n_leaves-1; internal ids continue from n_leaves.
    """
    if n_leaves < 1:
        raise ValueError("n_leaves must be >= 1")
    nodes = [_Node(i, path=i) for i in range(n_leaves)]
    if n_leaves == 1:
        return GroupTree(0, nodes)
    roots = list(range(n_leaves))
    next_id = n_leaves
    while len(roots) > 1:
        k = 2 if binary else int(rng.integers(2, min(max_children, len(roots)) + 1))
        picks = sorted(rng.choice(len(roots), size=k, replace=False).tolist())
        kids = tuple(roots[i] for i in picks)
        for i in reversed(picks):
            roots.pop(i)
        nodes.append(_Node(next_id, children=kids))
        roots.append(next_id)
        next_id += 1
    return GroupTree(roots[0], nodes)
