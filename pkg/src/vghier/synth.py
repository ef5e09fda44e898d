"""Synthetic (graphic, ground-truth tree) generator.

Scenes are spatially clustered motifs placed in disjoint grid cells of a
256x256 canvas. Each motif's paths form a ground-truth subtree; the scene
level is a recursive spatial bisection over motif centers, so every
ground-truth tree is binary. Fill colors are drawn independently per path,
which keeps location (not color) as the grouping signal.

Motifs and their path-index layout (ascending within each group):
  flower: center disc, then petals.
  face:   head, eyes, mouth, then freckles.
  frames: nested rectangular frames outermost to innermost, content disc last
          (each path is geometrically contained by its predecessor).
  dots:   a ring of discs.
  rays:   open line paths radiating from a common hub.

With ``enclosure > 0`` a scene may additionally be wrapped in a border group
of concentric canvas-spanning rings; its ground-truth position is a sibling
of the whole motif arrangement (root = [contents, border]). Border rings all
share the scene's center of mass, so proximity-only grouping tends to absorb
them into nearby content, while their near-canvas bounding boxes keep them
trivially separable by location.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field
from math import ceil, cos, pi, sin, sqrt
from typing import Optional

import numpy as np

from .doc import Color, PathElement, VectorDocument
from .errors import InvalidSpec
from .tree import GroupTree

MOTIF_NAMES = ("flower", "face", "frames", "dots", "rays")
DEFAULT_MOTIFS = ("flower", "face", "frames", "dots")

_CANVAS = 256.0


@dataclass
class SynthSpec:
    n_groups: tuple[int, int] = (2, 5)
    paths_per_group: tuple[int, int] = (2, 6)
    motifs: tuple[str, ...] = DEFAULT_MOTIFS
    center_jitter: float = 0.05  # motif-center offset as a fraction of its cell
    enclosure: float = 0.0  # probability of wrapping the scene in a border group

    def validate(self) -> None:
        for name in ("n_groups", "paths_per_group"):
            rng_ = getattr(self, name)
            if len(rng_) != 2 or rng_[0] > rng_[1] or rng_[0] < 1:
                raise InvalidSpec(f"bad {name} range {rng_!r}")
        if not self.motifs:
            raise InvalidSpec("motif set is empty")
        unknown = set(self.motifs) - set(MOTIF_NAMES)
        if unknown:
            raise InvalidSpec(f"unknown motifs {sorted(unknown)}")
        if self.center_jitter < 0:
            raise InvalidSpec("center_jitter must be >= 0")
        if not 0.0 <= self.enclosure <= 1.0:
            raise InvalidSpec("enclosure must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "n_groups": list(self.n_groups),
            "paths_per_group": list(self.paths_per_group),
            "motifs": list(self.motifs),
            "center_jitter": self.center_jitter,
            "enclosure": self.enclosure,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SynthSpec":
        known = {"n_groups", "paths_per_group", "motifs", "center_jitter", "enclosure"}
        unknown = set(obj) - known
        if unknown:
            raise InvalidSpec(f"unknown spec keys: {sorted(unknown)}")

        def rng_of(v):
            if isinstance(v, (int, float)):
                return (int(v), int(v))
            return (int(v[0]), int(v[1]))

        spec = cls(
            n_groups=rng_of(obj.get("n_groups", (2, 5))),
            paths_per_group=rng_of(obj.get("paths_per_group", (2, 6))),
            motifs=tuple(obj.get("motifs", DEFAULT_MOTIFS)),
            center_jitter=float(obj.get("center_jitter", 0.05)),
            enclosure=float(obj.get("enclosure", 0.0)),
        )
        spec.validate()
        return spec


@dataclass
class SynthResult:
    doc: VectorDocument
    tree: GroupTree
    groups: list[list[int]] = field(default_factory=list)  # path indices per motif
    motif_names: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# geometry + colors


def _circle(cx: float, cy: float, r: float, k: int = 24) -> np.ndarray:
    a = np.linspace(0.0, 2.0 * pi, k, endpoint=False)
    return np.stack([cx + r * np.cos(a), cy + r * np.sin(a)], axis=1)


def _ellipse(cx, cy, rx, ry, rot: float = 0.0, k: int = 20) -> np.ndarray:
    a = np.linspace(0.0, 2.0 * pi, k, endpoint=False)
    x = rx * np.cos(a)
    y = ry * np.sin(a)
    c, s = cos(rot), sin(rot)
    return np.stack([cx + x * c - y * s, cy + x * s + y * c], axis=1)


def _rect(cx, cy, w, h) -> np.ndarray:
    return np.array(
        [
            [cx - w / 2, cy - h / 2],
            [cx + w / 2, cy - h / 2],
            [cx + w / 2, cy + h / 2],
            [cx - w / 2, cy + h / 2],
        ]
    )


def _arc(cx, cy, r, a0, a1, k: int = 12) -> np.ndarray:
    a = np.linspace(a0, a1, k)
    return np.stack([cx + r * np.cos(a), cy + r * np.sin(a)], axis=1)


def _rand_color(rng: np.random.Generator) -> Color:
    h = float(rng.random())
    s = 0.5 + 0.5 * float(rng.random())
    v = 0.6 + 0.4 * float(rng.random())
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return (r, g, b, 1.0)


@dataclass
class _Shape:
    polyline: np.ndarray
    closed: bool = True
    filled: bool = True
    stroke_width: float = 0.0


# ---------------------------------------------------------------------------
# motifs: (shapes, nested structure over local indices)


def _chain(items: list):
    """Left-leaning binary nesting: [a,b,c,d] -> [[[a,b],c],d]."""
    out = items[0]
    for item in items[1:]:
        out = [out, item]
    return out


def _motif_flower(rng, cx, cy, s, m):
    shapes = [_Shape(_circle(cx, cy, 0.18 * s))]
    n_petals = m - 1
    for i in range(n_petals):
        a = 2.0 * pi * i / max(1, n_petals)
        px, py = cx + 0.32 * s * cos(a), cy + 0.32 * s * sin(a)
        shapes.append(_Shape(_ellipse(px, py, 0.16 * s, 0.09 * s, rot=a)))
    return shapes, _chain(list(range(m)))


def _motif_face(rng, cx, cy, s, m):
    shapes = [_Shape(_circle(cx, cy, 0.42 * s))]
    if m == 1:
        return shapes, 0
    if m == 2:
        shapes.append(
            _Shape(_arc(cx, cy, 0.22 * s, 1.2 * pi, 1.8 * pi), closed=False,
                   filled=False, stroke_width=0.03 * s)
        )
        return shapes, [0, 1]
    shapes.append(_Shape(_circle(cx - 0.15 * s, cy - 0.12 * s, 0.07 * s, k=16)))
    shapes.append(_Shape(_circle(cx + 0.15 * s, cy - 0.12 * s, 0.07 * s, k=16)))
    if m == 3:
        return shapes, [0, [1, 2]]
    shapes.append(
        _Shape(_arc(cx, cy + 0.28 * s, 0.18 * s, 0.15 * pi, 0.85 * pi), closed=False,
               filled=False, stroke_width=0.03 * s)
    )
    structure = [[0, [1, 2]], 3]
    for i in range(4, m):  # freckles
        a = float(rng.uniform(0, 2 * pi))
        rr = 0.3 * s * float(rng.uniform(0.5, 1.0))
        shapes.append(_Shape(_circle(cx + rr * cos(a), cy + rr * sin(a), 0.03 * s, k=12)))
        structure = [structure, i]
    return shapes, structure


def _motif_frames(rng, cx, cy, s, m):
    shapes = []
    n_frames = m - 1
    size0 = 0.92 * s
    shrink = 0.62 * s / max(1, n_frames)
    for i in range(n_frames):
        side = size0 - shrink * i
        shapes.append(
            _Shape(_rect(cx, cy, side, side), filled=False,
                   stroke_width=max(1.0, 0.015 * s))
        )
    inner = size0 - shrink * max(0, n_frames - 1)
    shapes.append(_Shape(_circle(cx, cy, 0.22 * inner, k=16)))

    def nest(i):
        if i == m - 1:
            return i
        return [i, nest(i + 1)]

    return shapes, nest(0) if m > 1 else 0


def _motif_dots(rng, cx, cy, s, m):
    shapes = []
    for i in range(m):
        a = 2.0 * pi * i / m
        rr = 0.32 * s if m > 1 else 0.0
        shapes.append(
            _Shape(_circle(cx + rr * cos(a), cy + rr * sin(a), 0.11 * s, k=16))
        )
    return shapes, _chain(list(range(m)))


def _motif_rays(rng, cx, cy, s, m):
    """Open line paths radiating from a common hub. Ray centroids sit far
    from the hub and interleave with neighboring motifs, so proximity-only
    grouping is actively misleading while bounding boxes stay informative
    (they all share the hub corner)."""
    shapes = []
    for _ in range(m):
        a = float(rng.uniform(0, 2 * pi))
        r0 = 0.04 * s
        r1 = float(rng.uniform(0.55, 0.95)) * s
        seg = np.array(
            [
                [cx + r0 * cos(a), cy + r0 * sin(a)],
                [cx + r1 * cos(a), cy + r1 * sin(a)],
            ]
        )
        shapes.append(
            _Shape(seg, closed=False, filled=False, stroke_width=max(1.0, 0.02 * s))
        )
    return shapes, _chain(list(range(m)))


_MOTIF_FUNCS = {
    "flower": _motif_flower,
    "face": _motif_face,
    "frames": _motif_frames,
    "dots": _motif_dots,
    "rays": _motif_rays,
}


# ---------------------------------------------------------------------------
# scene assembly


def _bisect(groups: list[tuple[np.ndarray, object]]):
    """Recursive spatial bisection of (center, nested-structure) groups."""
    if len(groups) == 1:
        return groups[0][1]
    centers = np.stack([g[0] for g in groups])
    spread = centers.max(axis=0) - centers.min(axis=0)
    axis = 0 if spread[0] >= spread[1] else 1
    order = sorted(range(len(groups)), key=lambda i: (centers[i][axis], i))
    half = len(groups) // 2
    lo = [groups[i] for i in order[:half]]
    hi = [groups[i] for i in order[half:]]
    return [_bisect(lo), _bisect(hi)]


def synth_generate_full(seed: int, spec: Optional[SynthSpec] = None) -> SynthResult:
    """Generate one scene with group metadata (deterministic per seed)."""
    spec = spec or SynthSpec()
    spec.validate()
    rng = np.random.default_rng(seed)

    # The enclosure draw is guarded so specs with enclosure == 0 consume the
    # exact same random stream as before the feature existed.
    has_enclosure = spec.enclosure > 0 and float(rng.random()) < spec.enclosure

    n_groups = int(rng.integers(spec.n_groups[0], spec.n_groups[1] + 1))
    grid = ceil(sqrt(n_groups))
    inset = 0.14 * _CANVAS if has_enclosure else 0.0
    cell = (_CANVAS - 2.0 * inset) / grid
    slots = rng.choice(grid * grid, size=n_groups, replace=False)

    paths: list[PathElement] = []
    groups: list[list[int]] = []
    motif_names: list[str] = []
    placed: list[tuple[np.ndarray, object]] = []
    for slot in slots:
        gx, gy = int(slot) % grid, int(slot) // grid
        j = spec.center_jitter
        cx = inset + (gx + 0.5) * cell + float(rng.uniform(-j, j)) * cell
        cy = inset + (gy + 0.5) * cell + float(rng.uniform(-j, j)) * cell
        usable = 0.8 * cell
        m = int(rng.integers(spec.paths_per_group[0], spec.paths_per_group[1] + 1))
        name = spec.motifs[int(rng.integers(len(spec.motifs)))]
        shapes, structure = _MOTIF_FUNCS[name](rng, cx, cy, usable, m)

        base = len(paths)
        members = []
        for shape in shapes:
            color = _rand_color(rng)
            paths.append(
                PathElement(
                    index=len(paths),
                    polyline=shape.polyline,
                    closed=shape.closed,
                    fill=color if shape.filled else None,
                    stroke=None if shape.filled else color,
                    stroke_width=shape.stroke_width,
                )
            )
            members.append(base + len(members))
        groups.append(members)
        motif_names.append(name)
        placed.append((np.array([cx, cy]), _shift_structure(structure, base)))

    nested = _bisect(placed)
    if has_enclosure:
        m = int(rng.integers(spec.paths_per_group[0], spec.paths_per_group[1] + 1))
        base = len(paths)
        for i in range(m):  # rings ordered outermost to innermost
            margin = 0.02 + (0.08 * i / (m - 1) if m > 1 else 0.04)
            side = _CANVAS * (1.0 - 2.0 * margin)
            paths.append(
                PathElement(
                    index=len(paths),
                    polyline=_rect(_CANVAS / 2.0, _CANVAS / 2.0, side, side),
                    closed=True,
                    fill=None,
                    stroke=_rand_color(rng),
                    stroke_width=0.012 * _CANVAS,
                )
            )
        groups.append(list(range(base, base + m)))
        motif_names.append("border")
        nested = [nested, _shift_structure(_chain(list(range(m))), base)]

    doc = VectorDocument(
        canvas_width=_CANVAS,
        canvas_height=_CANVAS,
        paths=paths,
        source_id=f"synth-{seed}",
    )
    tree = GroupTree.from_nested(nested)
    tree.validate(doc.n_paths)
    return SynthResult(doc=doc, tree=tree, groups=groups, motif_names=motif_names)


def _shift_structure(structure, base: int):
    if isinstance(structure, int):
        return structure + base
    return [_shift_structure(s, base) for s in structure]


def synth_generate(
    seed: int, spec: Optional[SynthSpec] = None
) -> tuple[VectorDocument, GroupTree]:
    """Generate one synthetic (document, ground-truth tree) pair."""
    res = synth_generate_full(seed, spec)
    return res.doc, res.tree
