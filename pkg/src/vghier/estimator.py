"""scikit-learn-style facade over training and inference.

HierarchicalGrouper wraps the location-encoder trainer and greedy inference
behind the familiar fit/predict/score surface so it can slot into sklearn
pipelines and parameter searches. X is a sequence of VectorDocuments and y
the matching ground-truth GroupTrees.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .affinity import LocationModel
from .augment import AugmentConfig, make_augmenter
from .doc import VectorDocument
from .infer import containment_guided_tree, greedy_tree
from .metrics import fmi
from .train import TrainConfig, train
from .tree import GroupTree


class HierarchicalGrouper(BaseEstimator):
    """Learnable hierarchical grouper for vector documents.

    Parameters mirror TrainConfig; `containment` switches predict() to
    containment-guided inference, `augment` enables the five augmentations
    during training.
    """

    def __init__(
        self,
        epochs: int = 28,
        triplets_per_epoch: int = 25600,
        batch_size: int = 32,
        learning_rate: float = 2e-4,
        lr_decay_factor: float = 0.1,
        lr_decay_every: int = 7,
        temperature: float = 0.1,
        seed: int = 0,
        validation_triplets: int = 2560,
        strict_sampling: bool = True,
        containment: bool = False,
        augment: bool = False,
    ):
        self.epochs = epochs
        self.triplets_per_epoch = triplets_per_epoch
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.lr_decay_factor = lr_decay_factor
        self.lr_decay_every = lr_decay_every
        self.temperature = temperature
        self.seed = seed
        self.validation_triplets = validation_triplets
        self.strict_sampling = strict_sampling
        self.containment = containment
        self.augment = augment

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            triplets_per_epoch=self.triplets_per_epoch,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            lr_decay_factor=self.lr_decay_factor,
            lr_decay_every=self.lr_decay_every,
            temperature=self.temperature,
            seed=self.seed,
            validation_triplets=self.validation_triplets,
            strict_sampling=self.strict_sampling,
        )

    def fit(
        self, X: Sequence[VectorDocument], y: Sequence[GroupTree]
    ) -> "HierarchicalGrouper":
        if len(X) != len(y):
            raise ValueError(f"got {len(X)} documents but {len(y)} trees")
        dataset = list(zip(X, y))
        augmenter = make_augmenter(dataset, AugmentConfig()) if self.augment else None
        result = train(dataset, self._train_config(), augmenter=augmenter)
        self.model_: LocationModel = result.model
        self.history_ = result.history
        self.best_epoch_ = result.best_epoch
        return self

    def predict(self, X: Sequence[VectorDocument]) -> list[GroupTree]:
        model = self._fitted_model()
        if self.containment:
            return [containment_guided_tree(model, doc) for doc in X]
        return [greedy_tree(model, doc) for doc in X]

    def score(
        self,
        X: Sequence[VectorDocument],
        y: Sequence[GroupTree],
        depth: int = 1,
    ) -> float:
        """Mean depth-d Fowlkes-Mallows index against ground-truth trees."""
        trees = self.predict(X)
        return float(np.mean([fmi(t, gt, depth) for t, gt in zip(trees, y)]))

    def _fitted_model(self) -> LocationModel:
        model: Optional[LocationModel] = getattr(self, "model_", None)
        if model is None:
            raise RuntimeError("HierarchicalGrouper is not fitted; call fit() first")
        return model
