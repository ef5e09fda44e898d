"""DOM-level data augmentations and their probabilistic composition.

All five augmentations map (valid doc, valid tree) to (valid doc, valid
tree); every one except combine returns the tree object unchanged, because
grouping structure is invariant under the geometric/photometric edits.
Everything randomized is a pure function of (inputs, rng state).

Jitter granularity: stroke-width factors and opacity deltas are drawn per
path; the HSV shift is drawn once per call and applied to every fill, so
color relationships between paths (a grouping cue) survive the jitter.
"""

from __future__ import annotations

import colorsys
from dataclasses import asdict, dataclass
from math import cos, radians, sin
from typing import Optional, Sequence

import numpy as np

from .doc import Color, PathElement, VectorDocument, replace_path
from .tree import GroupTree


@dataclass
class AugmentConfig:
    p_rotate: float = 0.3
    p_no_fill: float = 0.3
    p_jitter_stroke: float = 0.3
    p_jitter_hsv: float = 0.3
    p_combine: float = 0.2
    rotation_range: tuple[float, float] = (-180.0, 180.0)  # degrees
    stroke_factor_range: tuple[float, float] = (0.5, 2.0)
    opacity_delta_range: tuple[float, float] = (-0.3, 0.3)
    hue_delta_range: tuple[float, float] = (-36.0, 36.0)  # degrees
    sat_delta_range: tuple[float, float] = (-0.2, 0.2)
    val_delta_range: tuple[float, float] = (-0.2, 0.2)
    seed: int = 0

    def validate(self) -> None:
        for name in ("p_rotate", "p_no_fill", "p_jitter_stroke", "p_jitter_hsv",
                     "p_combine"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"AugmentConfig.{name} must be in [0, 1]")
        for name in ("rotation_range", "stroke_factor_range", "opacity_delta_range",
                     "hue_delta_range", "sat_delta_range", "val_delta_range"):
            lo, hi = getattr(self, name)
            if hi < lo:
                raise ValueError(f"AugmentConfig.{name} is empty")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "AugmentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown AugmentConfig keys: {sorted(unknown)}")
        fixed = {
            k: tuple(v) if k.endswith("_range") else v for k, v in obj.items()
        }
        return cls(**fixed)


# ---------------------------------------------------------------------------
# the five augmentations


def rotate(
    doc: VectorDocument, tree: GroupTree, theta_degrees: float
) -> tuple[VectorDocument, GroupTree]:
    """Rotate all geometry by theta (counterclockwise in coordinate space)
    about the canvas center; the tree is unchanged."""
    a = radians(theta_degrees)
    rot = np.array([[cos(a), -sin(a)], [sin(a), cos(a)]])
    center = np.array([doc.canvas_width / 2.0, doc.canvas_height / 2.0])
    paths = [
        replace_path(p, polyline=(p.polyline - center) @ rot.T + center)
        for p in doc.paths
    ]
    return doc.with_paths(paths), tree


_DEFAULT_STROKE_FRACTION = 0.01  # of the larger canvas dimension


def no_fill(doc: VectorDocument, tree: GroupTree) -> tuple[VectorDocument, GroupTree]:
    """Drop every fill; a filled, stroke-less path keeps its former fill
    color as a stroke (width 1% of the canvas) so it stays visible."""
    width = _DEFAULT_STROKE_FRACTION * max(doc.canvas_width, doc.canvas_height)
    paths = []
    for p in doc.paths:
        if p.fill is None:
            paths.append(replace_path(p))
        elif p.stroke is None:
            paths.append(
                replace_path(p, fill=None, stroke=p.fill, stroke_width=width)
            )
        else:
            paths.append(replace_path(p, fill=None))
    return doc.with_paths(paths), tree


def jitter_stroke_opacity(
    doc: VectorDocument,
    tree: GroupTree,
    rng: np.random.Generator,
    cfg: Optional[AugmentConfig] = None,
) -> tuple[VectorDocument, GroupTree]:
    """Per path: multiply stroke_width by a drawn factor and shift
    fill_opacity by a drawn delta (clamped to [0, 1])."""
    cfg = cfg or AugmentConfig()
    paths = []
    for p in doc.paths:
        factor = float(rng.uniform(*cfg.stroke_factor_range))
        delta = float(rng.uniform(*cfg.opacity_delta_range))
        paths.append(
            replace_path(
                p,
                stroke_width=max(0.0, p.stroke_width * factor),
                fill_opacity=float(np.clip(p.fill_opacity + delta, 0.0, 1.0)),
            )
        )
    return doc.with_paths(paths), tree


def shift_hsv(color: Color, dh_degrees: float, ds: float, dv: float) -> Color:
    """Shift one RGBA color in HSV space (hue wraps, s/v clamp); alpha kept."""
    r, g, b, a = color
    h, s, v = colorsys.rgb_to_hsv(r, g, b)
    h = (h + dh_degrees / 360.0) % 1.0
    s = float(np.clip(s + ds, 0.0, 1.0))
    v = float(np.clip(v + dv, 0.0, 1.0))
    r2, g2, b2 = colorsys.hsv_to_rgb(h, s, v)
    return (r2, g2, b2, a)


def jitter_hsv(
    doc: VectorDocument,
    tree: GroupTree,
    rng: np.random.Generator,
    cfg: Optional[AugmentConfig] = None,
) -> tuple[VectorDocument, GroupTree]:
    """Shift every fill by one drawn (dh, ds, dv) triple."""
    cfg = cfg or AugmentConfig()
    dh = float(rng.uniform(*cfg.hue_delta_range))
    ds = float(rng.uniform(*cfg.sat_delta_range))
    dv = float(rng.uniform(*cfg.val_delta_range))
    paths = [
        replace_path(p, fill=shift_hsv(p.fill, dh, ds, dv))
        if p.fill is not None
        else replace_path(p)
        for p in doc.paths
    ]
    return doc.with_paths(paths), tree


_GUTTER = 0.05  # fraction of the combined canvas


def _fit_into(
    doc: VectorDocument, region: tuple[float, float, float, float]
) -> list[PathElement]:
    """Scale/translate a document's canvas into a region of the unit canvas
    (aspect preserved, centered); stroke widths scale along."""
    rx, ry, rw, rh = region
    scale = min(rw / doc.canvas_width, rh / doc.canvas_height)
    ox = rx + (rw - doc.canvas_width * scale) / 2.0
    oy = ry + (rh - doc.canvas_height * scale) / 2.0
    offset = np.array([ox, oy])
    return [
        replace_path(
            p,
            polyline=p.polyline * scale + offset,
            stroke_width=p.stroke_width * scale,
        )
        for p in doc.paths
    ]


def combine(
    doc1: VectorDocument,
    tree1: GroupTree,
    doc2: VectorDocument,
    tree2: GroupTree,
    rng: np.random.Generator,
) -> tuple[VectorDocument, GroupTree]:
    """Place both graphics in disjoint halves (5% gutter) of a fresh unit
    canvas; doc2's path indices shift by |paths(doc1)|; the output tree is a
    new root over both trees. The rng only picks which side each doc lands on."""
    half = (1.0 - _GUTTER) / 2.0
    left = (0.0, 0.0, half, 1.0)
    right = (1.0 - half, 0.0, half, 1.0)
    doc1_left = bool(rng.random() < 0.5)
    r1, r2 = (left, right) if doc1_left else (right, left)
    placed1 = _fit_into(doc1, r1)
    placed2 = _fit_into(doc2, r2)
    n1 = doc1.n_paths
    paths = [replace_path(p, index=i) for i, p in enumerate(placed1)] + [
        replace_path(p, index=n1 + i) for i, p in enumerate(placed2)
    ]
    out_doc = VectorDocument(
        canvas_width=1.0,
        canvas_height=1.0,
        paths=paths,
        source_id=f"{doc1.source_id}+{doc2.source_id}",
    )
    nested = [tree1.to_nested(), tree2.to_nested(shift=n1)]
    return out_doc, GroupTree.from_nested(nested)


# ---------------------------------------------------------------------------
# composition


def _augment_pair(
    doc: VectorDocument,
    tree: GroupTree,
    rng: np.random.Generator,
    cfg: AugmentConfig,
    dataset: Sequence[tuple[VectorDocument, GroupTree]],
) -> tuple[VectorDocument, GroupTree]:
    if rng.random() < cfg.p_rotate:
        doc, tree = rotate(doc, tree, float(rng.uniform(*cfg.rotation_range)))
    if rng.random() < cfg.p_no_fill:
        doc, tree = no_fill(doc, tree)
    if rng.random() < cfg.p_jitter_stroke:
        doc, tree = jitter_stroke_opacity(doc, tree, rng, cfg)
    if rng.random() < cfg.p_jitter_hsv:
        doc, tree = jitter_hsv(doc, tree, rng, cfg)
    if rng.random() < cfg.p_combine:
        doc2, tree2 = dataset[int(rng.integers(len(dataset)))]
        doc, tree = combine(doc, tree, doc2, tree2, rng)
    tree.validate(doc.n_paths)
    return doc, tree


def augment_sample(
    dataset: Sequence[tuple[VectorDocument, GroupTree]],
    rng: np.random.Generator,
    cfg: Optional[AugmentConfig] = None,
) -> tuple[VectorDocument, GroupTree]:
    """Draw a base pair and apply each augmentation independently with its
    configured probability; combination draws a second, un-augmented pair."""
    cfg = cfg or AugmentConfig()
    cfg.validate()
    if not dataset:
        raise ValueError("augment_sample needs a non-empty dataset")
    doc, tree = dataset[int(rng.integers(len(dataset)))]
    return _augment_pair(doc, tree, rng, cfg, dataset)


def make_augmenter(
    dataset: Sequence[tuple[VectorDocument, GroupTree]],
    cfg: Optional[AugmentConfig] = None,
):
    """Trainer-shaped augmenter for an already-chosen base pair.

    The trainer picks the base (doc, tree); combine still draws its second
    pair from the full dataset closed over here.
    """
    cfg = cfg or AugmentConfig()
    cfg.validate()
    if not dataset:
        raise ValueError("make_augmenter needs a non-empty dataset")

    def augmenter(doc: VectorDocument, tree: GroupTree, rng: np.random.Generator):
        return _augment_pair(doc, tree, rng, cfg, dataset)

    return augmenter
