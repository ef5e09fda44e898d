"""Vector document model: atomic paths, styles, and bounding-box geometry.

A document is a canvas plus an ordered list of atomic paths. Path indices
(0..N-1, document order) are the stable identifiers everything else in the
toolkit refers to: tree leaves, containment edges, affinity subsets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptySubset

# RGBA, channels in [0, 1]
Color = tuple[float, float, float, float]


@dataclass
class PathElement:
    """One atomic path: a flattened outline plus style attributes."""

    index: int
    polyline: np.ndarray  # (n, 2) float64, n >= 2, user units
    closed: bool
    fill: Optional[Color] = None
    stroke: Optional[Color] = None
    stroke_width: float = 0.0
    fill_opacity: float = 1.0

    def __post_init__(self) -> None:
        self.polyline = np.asarray(self.polyline, dtype=np.float64)
        if self.polyline.ndim != 2 or self.polyline.shape[1] != 2:
            raise ValueError("polyline must be an (n, 2) array")
        if len(self.polyline) < 2:
            raise ValueError("polyline needs at least 2 points")

    def bbox(self) -> tuple[float, float, float, float]:
        """(minx, miny, maxx, maxy) in user units."""
        lo = self.polyline.min(axis=0)
        hi = self.polyline.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


@dataclass
class VectorDocument:
    """Canvas plus ordered atomic paths; indices are stable identifiers."""

    canvas_width: float
    canvas_height: float
    paths: list[PathElement] = field(default_factory=list)
    source_id: str = ""

    def __post_init__(self) -> None:
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise ValueError("canvas dimensions must be positive")

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    @cached_property
    def path_bboxes(self) -> np.ndarray:
        """(N, 4) array of per-path (minx, miny, maxx, maxy), user units."""
        if not self.paths:
            return np.zeros((0, 4))
        return np.array([p.bbox() for p in self.paths], dtype=np.float64)

    @cached_property
    def path_centroids(self) -> np.ndarray:
        """(N, 2) mean polyline vertex per path, in unit-square coordinates."""
        pts = np.array(
            [p.polyline.mean(axis=0) for p in self.paths], dtype=np.float64
        )
        return self.to_unit(pts)

    def to_unit(self, points: np.ndarray) -> np.ndarray:
        """Map user-unit points into the unit square (square-canvas embedding).

        Both axes are divided by the larger canvas dimension; the shorter axis
        is centered, so a non-square canvas embeds without distortion.
        """
        side = max(self.canvas_width, self.canvas_height)
        pad = np.array(
            [(side - self.canvas_width) / 2.0, (side - self.canvas_height) / 2.0]
        )
        return (np.asarray(points, dtype=np.float64) + pad) / side

    def with_paths(self, paths: list[PathElement]) -> "VectorDocument":
        """Copy with replaced path list (caches are not carried over)."""
        return VectorDocument(
            canvas_width=self.canvas_width,
            canvas_height=self.canvas_height,
            paths=paths,
            source_id=self.source_id,
        )


@dataclass(frozen=True)
class NormBox:
    """Axis-aligned box in the unit square derived from the canvas."""

    x: float
    y: float
    w: float
    h: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.w, self.h], dtype=np.float64)

    def __iter__(self):
        return iter((self.x, self.y, self.w, self.h))


def normalize_bbox(doc: VectorDocument, subset: Iterable[int]) -> NormBox:
    """Tightest bounding box of a path subset, in unit-square coordinates."""
    idx = np.fromiter(subset, dtype=np.int64)
    if idx.size == 0:
        raise EmptySubset("normalize_bbox needs a non-empty subset")
    if idx.min() < 0 or idx.max() >= doc.n_paths:
        raise IndexError(f"path index out of range 0..{doc.n_paths - 1}")
    boxes = doc.path_bboxes[idx]
    lo = boxes[:, :2].min(axis=0)
    hi = boxes[:, 2:].max(axis=0)
    (x0, y0), (x1, y1) = doc.to_unit(np.stack([lo, hi]))
    return NormBox(x0, y0, x1 - x0, y1 - y0)


def _color_to_json(c: Optional[Color]):
    return None if c is None else [float(v) for v in c]


def _color_from_json(v) -> Optional[Color]:
    if v is None:
        return None
    r, g, b, a = (float(x) for x in v)
    return (r, g, b, a)


def doc_to_json(doc: VectorDocument) -> str:
    """Canonical `doc.json` dump (stable bytes for identical documents)."""
    payload = {
        "canvas": {"w": doc.canvas_width, "h": doc.canvas_height},
        "paths": [
            {
                "index": p.index,
                "closed": p.closed,
                "fill": _color_to_json(p.fill),
                "stroke": _color_to_json(p.stroke),
                "stroke_width": p.stroke_width,
                "fill_opacity": p.fill_opacity,
                "polyline": [[float(x), float(y)] for x, y in p.polyline],
            }
            for p in doc.paths
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def doc_from_json(text: str) -> VectorDocument:
    payload = json.loads(text)
    paths = [
        PathElement(
            index=int(p["index"]),
            polyline=np.array(p["polyline"], dtype=np.float64),
            closed=bool(p["closed"]),
            fill=_color_from_json(p.get("fill")),
            stroke=_color_from_json(p.get("stroke")),
            stroke_width=float(p.get("stroke_width", 0.0)),
            fill_opacity=float(p.get("fill_opacity", 1.0)),
        )
        for p in payload["paths"]
    ]
    return VectorDocument(
        canvas_width=float(payload["canvas"]["w"]),
        canvas_height=float(payload["canvas"]["h"]),
        paths=paths,
    )


def replace_path(p: PathElement, **changes) -> PathElement:
    """dataclasses.replace wrapper so callers don't import dataclasses."""
    return replace(p, **changes)


def copy_paths(paths: Sequence[PathElement]) -> list[PathElement]:
    return [replace(p, polyline=p.polyline.copy()) for p in paths]
