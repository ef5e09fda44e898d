"""Affinity models: learned location encoder, oracle, heuristic, imports.

Two-level interface: every model answers `pairwise_affinity(doc, s1, s2)`
(all inference needs); embedding-backed models additionally expose
`embed(doc, subset)` and answer pairwise affinity via cosine. The oracle and
heuristic baselines implement pairwise affinity directly, so one inference
code path serves them all.

InfoNCE here is the two-candidate logged softmax
L = -log(e^{s+/tau} / (e^{s+/tau} + e^{s-/tau})) = log1p(e^{(s- - s+)/tau}).
"""

from __future__ import annotations

import base64
import colorsys
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Optional

import numpy as np
from scipy.special import expit

from .doc import VectorDocument, normalize_bbox
from .errors import (
    EmptySubset,
    FormatError,
    SamplingExhausted,
    SubsetNotNested,
    UnknownSubset,
)
from .tree import GroupTree

EMBED_DIM = 64
MLP_DIMS = (4, 128, 128, EMBED_DIM)

_PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")


# ---------------------------------------------------------------------------
# interface


class AffinityModel(ABC):
    """Scores how strongly two disjoint path subsets belong together."""

    @abstractmethod
    def pairwise_affinity(
        self, doc: VectorDocument, s1: Iterable[int], s2: Iterable[int]
    ) -> float:
        raise NotImplementedError


class EmbeddingAffinityModel(AffinityModel):
    """Models that map subsets to unit embeddings; affinity = cosine."""

    @abstractmethod
    def embed(self, doc: VectorDocument, subset: Iterable[int]) -> np.ndarray:
        raise NotImplementedError

    def pairwise_affinity(self, doc, s1, s2) -> float:
        return cosine_affinity(self.embed(doc, s1), self.embed(doc, s2))


def embed(model: AffinityModel, doc: VectorDocument, subset: Iterable[int]) -> np.ndarray:
    """Unit embedding of a path subset (module-level convenience form)."""
    if not isinstance(model, EmbeddingAffinityModel):
        raise TypeError(f"{type(model).__name__} does not produce embeddings")
    subset = frozenset(subset)
    if not subset:
        raise EmptySubset("cannot embed an empty subset")
    return model.embed(doc, subset)


def cosine_affinity(e1: np.ndarray, e2: np.ndarray) -> float:
    """Dot product of unit embeddings."""
    return float(np.dot(np.asarray(e1, dtype=np.float64), np.asarray(e2, dtype=np.float64)))


# ---------------------------------------------------------------------------
# InfoNCE


def infonce_loss(s_pos, s_neg, tau: float):
    """Two-candidate InfoNCE loss and its gradients.

    Returns (loss, dL/ds_pos, dL/ds_neg); accepts scalars or same-shape
    arrays (elementwise). Computed via log-sum-exp stabilization.
    """
    if tau <= 0:
        raise ValueError("temperature must be positive")
    s_pos = np.asarray(s_pos, dtype=np.float64)
    s_neg = np.asarray(s_neg, dtype=np.float64)
    z = (s_neg - s_pos) / tau
    loss = np.logaddexp(0.0, z)
    sig = expit(z)
    d_neg = sig / tau
    if loss.ndim == 0:
        return float(loss), float(-d_neg), float(d_neg)
    return loss, -d_neg, d_neg


# ---------------------------------------------------------------------------
# triplet sampling


@dataclass(frozen=True)
class Triplet:
    """(reference, positive, negative) node ids from one grouping tree."""

    ref: int
    pos: int
    neg: int
    doc_ref: int = 0


def sample_triplet(
    tree: GroupTree,
    rng: np.random.Generator,
    strict: bool = True,
    doc_ref: int = 0,
    max_rejections: int = 1000,
) -> Triplet:
    """Draw a contrastive triplet of tree vertices.

    Draws 3 distinct vertices uniformly from all tree nodes and returns the
    first permutation (ref, pos, neg), in lexicographic order of the sorted
    draw, satisfying TDist(ref, pos) < TDist(ref, neg) and — when strict —
    also TDist(pos, ref) < TDist(pos, neg). Rejects and redraws when no
    permutation qualifies.
    """
    ids = tree.node_ids
    if len(ids) < 3:
        raise SamplingExhausted(f"tree has only {len(ids)} vertices, need 3")
    id_arr = np.asarray(ids, dtype=np.int64)
    for _ in range(max_rejections):
        draw = sorted(int(i) for i in rng.choice(id_arr, size=3, replace=False))
        for ref, pos, neg in permutations(draw):
            if tree.tdist(ref, pos) >= tree.tdist(ref, neg):
                continue
            if strict and tree.tdist(pos, ref) >= tree.tdist(pos, neg):
                continue
            return Triplet(ref=ref, pos=pos, neg=neg, doc_ref=doc_ref)
    raise SamplingExhausted(
        f"no valid triplet in {max_rejections} draws (degenerate tree?)"
    )


# ---------------------------------------------------------------------------
# the learned location encoder


class LocationModel(EmbeddingAffinityModel):
    """MLP over NormBox: 4 -> 128 -> 128 -> 64, ReLU, final L2 normalize.

    Parameters are float64 throughout so finite-difference gradient checks
    are meaningful.
    """

    def __init__(self, params: dict[str, np.ndarray], meta: Optional[dict] = None):
        expected = {
            "W1": (MLP_DIMS[0], MLP_DIMS[1]),
            "b1": (MLP_DIMS[1],),
            "W2": (MLP_DIMS[1], MLP_DIMS[2]),
            "b2": (MLP_DIMS[2],),
            "W3": (MLP_DIMS[2], MLP_DIMS[3]),
            "b3": (MLP_DIMS[3],),
        }
        self.params: dict[str, np.ndarray] = {}
        for name in _PARAM_NAMES:
            arr = np.asarray(params[name], dtype=np.float64)
            if arr.shape != expected[name]:
                raise FormatError(
                    f"parameter {name} has shape {arr.shape}, expected {expected[name]}"
                )
            if not np.all(np.isfinite(arr)):
                raise FormatError(f"parameter {name} contains non-finite values")
            self.params[name] = arr
        self.meta = dict(meta or {})

    @classmethod
    def init(cls, seed: int = 0) -> "LocationModel":
        """Kaiming-normal weights (std sqrt(2/fan_in)), zero biases, seeded."""
        rng = np.random.default_rng(seed)
        p = {}
        dims = MLP_DIMS
        for i in range(3):
            fan_in = dims[i]
            p[f"W{i + 1}"] = rng.normal(
                0.0, np.sqrt(2.0 / fan_in), size=(dims[i], dims[i + 1])
            )
            p[f"b{i + 1}"] = np.zeros(dims[i + 1])
        return cls(p)

    def copy(self) -> "LocationModel":
        return LocationModel(
            {k: v.copy() for k, v in self.params.items()}, dict(self.meta)
        )

    # -- forward / backward ------------------------------------------------

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, dict]:
        """Batched forward pass: (B, 4) boxes -> (B, 64) unit embeddings."""
        x = np.asarray(x, dtype=np.float64)
        p = self.params
        a1 = x @ p["W1"] + p["b1"]
        h1 = np.maximum(a1, 0.0)
        a2 = h1 @ p["W2"] + p["b2"]
        h2 = np.maximum(a2, 0.0)
        u = h2 @ p["W3"] + p["b3"]
        norm = np.linalg.norm(u, axis=-1, keepdims=True)
        norm = np.where(norm == 0.0, 1.0, norm)
        e = u / norm
        cache = {"x": x, "a1": a1, "h1": h1, "a2": a2, "h2": h2, "e": e, "norm": norm}
        return e, cache

    def backward(self, cache: dict, de: np.ndarray) -> dict[str, np.ndarray]:
        """Gradients of a scalar loss w.r.t. parameters, given dL/d(embedding)."""
        p = self.params
        e, norm = cache["e"], cache["norm"]
        # through L2 normalization: du = (de - e (e . de)) / ||u||
        du = (de - e * np.sum(e * de, axis=-1, keepdims=True)) / norm
        g = {}
        g["W3"] = cache["h2"].T @ du
        g["b3"] = du.sum(axis=0)
        dh2 = du @ p["W3"].T
        da2 = dh2 * (cache["a2"] > 0.0)
        g["W2"] = cache["h1"].T @ da2
        g["b2"] = da2.sum(axis=0)
        dh1 = da2 @ p["W2"].T
        da1 = dh1 * (cache["a1"] > 0.0)
        g["W1"] = cache["x"].T @ da1
        g["b1"] = da1.sum(axis=0)
        return g

    # -- embedding interface ----------------------------------------------

    def embed(self, doc: VectorDocument, subset: Iterable[int]) -> np.ndarray:
        box = normalize_bbox(doc, subset)
        e, _ = self.forward(box.as_array()[None, :])
        return e[0]

    def embed_boxes(self, boxes: np.ndarray) -> np.ndarray:
        e, _ = self.forward(boxes)
        return e

    # -- flat parameter vector (optimizers, gradient checks) ---------------

    def flat_params(self) -> np.ndarray:
        return np.concatenate([self.params[n].ravel() for n in _PARAM_NAMES])

    def set_flat_params(self, vec: np.ndarray) -> None:
        off = 0
        for n in _PARAM_NAMES:
            size = self.params[n].size
            self.params[n] = (
                np.asarray(vec[off : off + size], dtype=np.float64)
                .reshape(self.params[n].shape)
                .copy()
            )
            off += size
        if off != len(vec):
            raise ValueError(f"parameter vector length {len(vec)}, expected {off}")

    @staticmethod
    def flatten_grads(grads: dict[str, np.ndarray]) -> np.ndarray:
        return np.concatenate([grads[n].ravel() for n in _PARAM_NAMES])


# ---------------------------------------------------------------------------
# batch objective (shared by trainer and gradient checks)


def triplet_batch_loss(
    model: LocationModel,
    boxes_ref: np.ndarray,
    boxes_pos: np.ndarray,
    boxes_neg: np.ndarray,
    tau: float,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean InfoNCE loss over a batch of NormBox triplets, with gradients.

    One stacked forward/backward pass in the fixed order [refs; poss; negs]
    keeps gradient accumulation deterministic.
    """
    b = len(boxes_ref)
    stacked = np.concatenate([boxes_ref, boxes_pos, boxes_neg], axis=0)
    e, cache = model.forward(stacked)
    e_r, e_p, e_n = e[:b], e[b : 2 * b], e[2 * b :]
    s_pos = np.sum(e_r * e_p, axis=-1)
    s_neg = np.sum(e_r * e_n, axis=-1)
    losses, d_pos, d_neg = infonce_loss(s_pos, s_neg, tau)
    d_pos = d_pos / b
    d_neg = d_neg / b
    de = np.empty_like(e)
    de[:b] = d_pos[:, None] * e_p + d_neg[:, None] * e_n
    de[b : 2 * b] = d_pos[:, None] * e_r
    de[2 * b :] = d_neg[:, None] * e_r
    grads = model.backward(cache, de)
    return float(np.mean(losses)), grads


# ---------------------------------------------------------------------------
# oracle


class OracleAffinity(AffinityModel):
    """Ground-truth-derived affinity: -|leaves(g)| for the minimal GT cover g.

    For each queried subset, validates that it is a union of complete child
    subtrees of its minimal covering node (the only shapes greedy inference
    seeded from singletons can produce when following this oracle).
    """

    def __init__(self, gt: GroupTree):
        self.gt = gt

    def _minimal_cover(self, subset: frozenset[int]) -> int:
        gt = self.gt
        node = gt.leaf_for_path(next(iter(subset)))
        while not (gt.leaves_of(node) >= subset):
            node = gt.parent(node)  # type: ignore[assignment]  # root covers all
        return node

    def _validate(self, subset: frozenset[int]) -> None:
        g = self._minimal_cover(subset)
        for c in self.gt.children(g):
            got = len(self.gt.leaves_of(c) & subset)
            if got not in (0, len(self.gt.leaves_of(c))):
                raise SubsetNotNested(
                    f"subset {sorted(subset)} splits ground-truth node {c}"
                )

    def pairwise_affinity(self, doc, s1, s2) -> float:
        s1, s2 = frozenset(s1), frozenset(s2)
        if not s1 or not s2:
            raise EmptySubset("oracle affinity of an empty subset")
        self._validate(s1)
        self._validate(s2)
        g = self._minimal_cover(s1 | s2)
        return -float(len(self.gt.leaves_of(g)))


def oracle_affinity(gt: GroupTree) -> OracleAffinity:
    return OracleAffinity(gt)


# ---------------------------------------------------------------------------
# heuristic baseline


class HeuristicAffinity(AffinityModel):
    """-(centroid distance in the unit square) - 0.5 * (HSV fill distance).

    Subset centroid: mean of the member paths' polyline centroids. Subset
    color: mean fill RGB of filled member paths, compared in HSV with
    circular hue; the color term is 0 when either subset has no fill.
    """

    LAMBDA = 0.5

    def _centroid(self, doc: VectorDocument, subset: frozenset[int]) -> np.ndarray:
        idx = np.fromiter(sorted(subset), dtype=np.int64)
        return doc.path_centroids[idx].mean(axis=0)

    def _mean_fill(self, doc: VectorDocument, subset: frozenset[int]):
        rgbs = [
            doc.paths[i].fill[:3] for i in sorted(subset) if doc.paths[i].fill is not None
        ]
        if not rgbs:
            return None
        return np.mean(np.asarray(rgbs, dtype=np.float64), axis=0)

    @staticmethod
    def _hsv_distance(rgb1: np.ndarray, rgb2: np.ndarray) -> float:
        h1, s1, v1 = colorsys.rgb_to_hsv(*rgb1)
        h2, s2, v2 = colorsys.rgb_to_hsv(*rgb2)
        dh = abs(h1 - h2)
        dh = min(dh, 1.0 - dh) * 2.0  # circular, scaled to [0, 1]
        return (dh + abs(s1 - s2) + abs(v1 - v2)) / 3.0

    def pairwise_affinity(self, doc, s1, s2) -> float:
        s1, s2 = frozenset(s1), frozenset(s2)
        if not s1 or not s2:
            raise EmptySubset("heuristic affinity of an empty subset")
        dist = float(np.linalg.norm(self._centroid(doc, s1) - self._centroid(doc, s2)))
        c1, c2 = self._mean_fill(doc, s1), self._mean_fill(doc, s2)
        color = self._hsv_distance(c1, c2) if c1 is not None and c2 is not None else 0.0
        return -dist - self.LAMBDA * color


def heuristic_affinity(doc: VectorDocument) -> HeuristicAffinity:
    """Handcrafted baseline model (stateless; `doc` fixes the signature)."""
    del doc
    return HeuristicAffinity()


# ---------------------------------------------------------------------------
# serialization

FORMAT_VERSION = 1


def _encode_array(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f8").tobytes()).decode(
        "ascii"
    )


def _decode_array(text: str, shape: tuple[int, ...]) -> np.ndarray:
    raw = base64.b64decode(text.encode("ascii"))
    arr = np.frombuffer(raw, dtype="<f8")
    if arr.size != int(np.prod(shape)):
        raise FormatError(f"parameter payload has {arr.size} values, expected {shape}")
    return arr.reshape(shape).astype(np.float64)


def export_model(model: LocationModel) -> bytes:
    """Serialize a LocationModel to versioned JSON bytes (bit-exact)."""
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "location_mlp",
        "dims": list(MLP_DIMS),
        "config": model.meta,
        "params": {n: _encode_array(model.params[n]) for n in _PARAM_NAMES},
    }
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )


def import_model(data: bytes) -> LocationModel:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("kind") != "location_mlp":
        raise FormatError("not a location model file")
    if obj.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {obj.get('format_version')!r}")
    if tuple(obj.get("dims", ())) != MLP_DIMS:
        raise FormatError(f"unsupported dims {obj.get('dims')!r}")
    shapes = {
        "W1": (MLP_DIMS[0], MLP_DIMS[1]),
        "b1": (MLP_DIMS[1],),
        "W2": (MLP_DIMS[1], MLP_DIMS[2]),
        "b2": (MLP_DIMS[2],),
        "W3": (MLP_DIMS[2], MLP_DIMS[3]),
        "b3": (MLP_DIMS[3],),
    }
    try:
        params = {n: _decode_array(obj["params"][n], shapes[n]) for n in _PARAM_NAMES}
    except KeyError as exc:
        raise FormatError(f"model file missing parameter {exc}") from exc
    return LocationModel(params, meta=obj.get("config") or {})


def subset_key(subset: Iterable[int]) -> str:
    """Canonical table key: sorted path indices joined by '-'."""
    return "-".join(str(i) for i in sorted(subset))


class EmbeddingTable(EmbeddingAffinityModel):
    """Affinity model backed by a precomputed subset -> embedding table."""

    def __init__(self, table: dict[str, np.ndarray]):
        self.table = table

    def embed(self, doc, subset) -> np.ndarray:
        key = subset_key(subset)
        try:
            return self.table[key]
        except KeyError:
            raise UnknownSubset(f"no stored embedding for subset {key!r}") from None


def import_embeddings(table) -> EmbeddingTable:
    """Load a subset-key -> 64-vector table (dict, JSON text, or JSON bytes);
    vectors are normalized on load."""
    if isinstance(table, (str, bytes)):
        try:
            table = json.loads(table)
        except json.JSONDecodeError as exc:
            raise FormatError(f"embedding table is not valid JSON: {exc}") from exc
    if not isinstance(table, dict):
        raise FormatError("embedding table must be a JSON object")
    out: dict[str, np.ndarray] = {}
    for key, vec in table.items():
        arr = np.asarray(vec, dtype=np.float64)
        if arr.shape != (EMBED_DIM,):
            raise FormatError(f"table entry {key!r} has shape {arr.shape}")
        norm = np.linalg.norm(arr)
        if not np.isfinite(norm) or norm == 0.0:
            raise FormatError(f"table entry {key!r} is not normalizable")
        out[str(key)] = arr / norm
    return EmbeddingTable(out)
