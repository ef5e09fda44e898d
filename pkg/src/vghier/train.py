"""Contrastive training of the location encoder.

Per epoch: batches of triplets are drawn from (optionally augmented)
corpus samples and the mean InfoNCE loss is minimized with Adam under a
step-decay learning-rate schedule. A validation triplet set is fixed up
front from the un-augmented corpus and evaluated each epoch; the returned
parameters are the best-validation snapshot. Fully deterministic given the
config seed.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import ceil
from typing import Callable, Optional, Sequence

import numpy as np

from .affinity import (
    LocationModel,
    Triplet,
    infonce_loss,
    sample_triplet,
    triplet_batch_loss,
)
from .doc import VectorDocument, normalize_bbox
from .errors import NonFiniteLoss, SamplingExhausted
from .tree import GroupTree

Augmenter = Callable[
    [VectorDocument, GroupTree, np.random.Generator],
    tuple[VectorDocument, GroupTree],
]


@dataclass
class TrainConfig:
    epochs: int = 28
    triplets_per_epoch: int = 25600
    batch_size: int = 32
    learning_rate: float = 2e-4
    lr_decay_factor: float = 0.1
    lr_decay_every: int = 7
    temperature: float = 0.1
    seed: int = 0
    validation_triplets: int = 2560
    strict_sampling: bool = True

    def validate(self) -> None:
        positive = (
            "epochs",
            "triplets_per_epoch",
            "batch_size",
            "lr_decay_every",
            "temperature",
            "validation_triplets",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValueError(f"TrainConfig.{name} must be positive")
        if self.learning_rate < 0:
            raise ValueError("TrainConfig.learning_rate must be >= 0")
        if self.lr_decay_factor <= 0:
            raise ValueError("TrainConfig.lr_decay_factor must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown TrainConfig keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class TrainResult:
    model: LocationModel
    history: list[dict] = field(default_factory=list)
    best_epoch: int = -1


class Adam:
    """Flat-vector Adam with bias correction (beta 0.9/0.999, eps 1e-8)."""

    def __init__(self, n: int, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.m = np.zeros(n)
        self.v = np.zeros(n)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0

    def step(self, vec: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return vec - lr * m_hat / (np.sqrt(v_hat) + self.eps)


def _triplet_boxes(
    doc: VectorDocument, tree: GroupTree, triplets: Sequence[Triplet]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """NormBox rows for the ref/pos/neg subsets of each triplet."""

    def box(nid: int) -> np.ndarray:
        return normalize_bbox(doc, tree.leaves_of(nid)).as_array()

    refs = np.stack([box(t.ref) for t in triplets])
    poss = np.stack([box(t.pos) for t in triplets])
    negs = np.stack([box(t.neg) for t in triplets])
    return refs, poss, negs


def _eligible_indices(
    dataset: Sequence[tuple[VectorDocument, GroupTree]],
    strict: bool,
    seed_seq: np.random.SeedSequence,
) -> list[int]:
    """Indices of trees that can actually yield a triplet."""
    out = []
    for i, ((_, tree), ss) in enumerate(zip(dataset, seed_seq.spawn(len(dataset)))):
        if tree.n_nodes < 3:
            continue
        try:
            sample_triplet(tree, np.random.default_rng(ss), strict=strict)
        except SamplingExhausted:
            continue
        out.append(i)
    return out


def _validation_loss(
    model: LocationModel, boxes: tuple[np.ndarray, np.ndarray, np.ndarray], tau: float
) -> float:
    br, bp, bn = boxes
    stacked = np.concatenate([br, bp, bn], axis=0)
    e, _ = model.forward(stacked)
    b = len(br)
    s_pos = np.sum(e[:b] * e[b : 2 * b], axis=-1)
    s_neg = np.sum(e[:b] * e[2 * b :], axis=-1)
    losses, _, _ = infonce_loss(s_pos, s_neg, tau)
    return float(np.mean(losses))


def train(
    dataset: Sequence[tuple[VectorDocument, GroupTree]],
    cfg: Optional[TrainConfig] = None,
    augmenter: Optional[Augmenter] = None,
) -> TrainResult:
    """Train a LocationModel on (document, ground-truth tree) pairs.

    Raises SamplingExhausted if every tree in the dataset is degenerate and
    NonFiniteLoss (with step diagnostics) if the objective leaves float range.
    """
    cfg = cfg or TrainConfig()
    cfg.validate()
    if not dataset:
        raise ValueError("training dataset is empty")
    for doc, tree in dataset:
        tree.validate(doc.n_paths)

    root_ss = np.random.SeedSequence(cfg.seed)
    init_ss, probe_ss, val_ss, epochs_ss = root_ss.spawn(4)

    eligible = _eligible_indices(dataset, cfg.strict_sampling, probe_ss)
    if not eligible:
        raise SamplingExhausted(
            "every tree in the dataset is degenerate for triplet sampling"
        )

    # fixed validation set from the un-augmented corpus
    val_rng = np.random.default_rng(val_ss)
    val_triplets: list[Triplet] = []
    for _ in range(cfg.validation_triplets):
        di = eligible[int(val_rng.integers(len(eligible)))]
        val_triplets.append(
            sample_triplet(dataset[di][1], val_rng, cfg.strict_sampling, doc_ref=di)
        )
    by_doc: dict[int, list[Triplet]] = {}
    for t in val_triplets:
        by_doc.setdefault(t.doc_ref, []).append(t)
    val_parts = [
        _triplet_boxes(dataset[di][0], dataset[di][1], ts)
        for di, ts in sorted(by_doc.items())
    ]
    val_boxes = tuple(
        np.concatenate([part[k] for part in val_parts], axis=0) for k in range(3)
    )

    model = LocationModel.init(init_ss)
    vec = model.flat_params()
    adam = Adam(len(vec))
    n_batches = ceil(cfg.triplets_per_epoch / cfg.batch_size)

    history: list[dict] = []
    best_val = np.inf
    best_vec = vec.copy()
    best_epoch = -1

    for epoch, epoch_ss in enumerate(epochs_ss.spawn(cfg.epochs)):
        rng = np.random.default_rng(epoch_ss)
        lr = cfg.learning_rate * cfg.lr_decay_factor ** (epoch // cfg.lr_decay_every)
        loss_sum = 0.0
        n_seen = 0
        for batch_i in range(n_batches):
            b = min(cfg.batch_size, cfg.triplets_per_epoch - n_seen)
            di = eligible[int(rng.integers(len(eligible)))]
            doc, tree = dataset[di]
            if augmenter is not None:
                doc, tree = augmenter(doc, tree, rng)
            triplets = [
                sample_triplet(tree, rng, cfg.strict_sampling, doc_ref=di)
                for _ in range(b)
            ]
            br, bp, bn = _triplet_boxes(doc, tree, triplets)
            loss, grads = triplet_batch_loss(model, br, bp, bn, cfg.temperature)
            if not np.isfinite(loss):
                raise NonFiniteLoss(
                    f"loss={loss} at epoch {epoch}, batch {batch_i}, doc {di}"
                )
            vec = adam.step(vec, LocationModel.flatten_grads(grads), lr)
            model.set_flat_params(vec)
            loss_sum += loss * b
            n_seen += b
        train_loss = loss_sum / n_seen
        val_loss = _validation_loss(model, val_boxes, cfg.temperature)
        if not np.isfinite(val_loss):
            raise NonFiniteLoss(f"validation loss={val_loss} after epoch {epoch}")
        history.append(
            {"epoch": epoch, "train_loss": train_loss, "val_loss": val_loss, "lr": lr}
        )
        if val_loss < best_val:
            best_val = val_loss
            best_vec = vec.copy()
            best_epoch = epoch

    best = LocationModel.init(init_ss)
    best.set_flat_params(best_vec)
    best.meta = {"config": cfg.to_dict(), "best_epoch": best_epoch}
    return TrainResult(model=best, history=history, best_epoch=best_epoch)
