"""SVG-subset parser: drawable elements to flattened atomic paths.

Supports path, rect, circle, ellipse, line, polyline, polygon plus `g`
wrappers. Group transforms and style attributes are composed onto the
descendants and the groups themselves are discarded: existing `<g>` structure
is exactly what tree inference is supposed to recover, so it is never used
as ground truth. Everything else is skipped with a warning.

All curves (cubic/quadratic Beziers, arcs, circles, ellipses) are reduced to
cubic segments, transformed, and adaptively flattened to polylines with a
chordal-deviation guarantee.
"""

from __future__ import annotations

import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from math import ceil, cos, fabs, pi, radians, sin, sqrt, tan
from typing import Optional

import numpy as np

from .doc import Color, PathElement, VectorDocument
from .errors import EmptyDocument, MalformedInput


class ParseWarning(UserWarning):
    """Raised (as a warning) for skipped elements and unsupported styling."""


# ---------------------------------------------------------------------------
# segments


@dataclass(frozen=True)
class LineSeg:
    p0: tuple[float, float]
    p1: tuple[float, float]


@dataclass(frozen=True)
class CubicSeg:
    p0: tuple[float, float]
    c1: tuple[float, float]
    c2: tuple[float, float]
    p1: tuple[float, float]


Segment = LineSeg | CubicSeg


def quad_to_cubic(p0, c, p1) -> CubicSeg:
    c1 = (p0[0] + 2.0 / 3.0 * (c[0] - p0[0]), p0[1] + 2.0 / 3.0 * (c[1] - p0[1]))
    c2 = (p1[0] + 2.0 / 3.0 * (c[0] - p1[0]), p1[1] + 2.0 / 3.0 * (c[1] - p1[1]))
    return CubicSeg(p0, c1, c2, p1)


def _dist_to_chord(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return sqrt((px - ax) ** 2 + (py - ay) ** 2)
    t = ((px - ax) * dx + (py - ay) * dy) / dd
    t = min(1.0, max(0.0, t))
    qx, qy = ax + t * dx, ay + t * dy
    return sqrt((px - qx) ** 2 + (py - qy) ** 2)


def _split_cubic(seg: CubicSeg) -> tuple[CubicSeg, CubicSeg]:
    def mid(a, b):
        return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)

    ab = mid(seg.p0, seg.c1)
    bc = mid(seg.c1, seg.c2)
    cd = mid(seg.c2, seg.p1)
    abc = mid(ab, bc)
    bcd = mid(bc, cd)
    m = mid(abc, bcd)
    return CubicSeg(seg.p0, ab, abc, m), CubicSeg(m, bcd, cd, seg.p1)


def _flatten_cubic(seg: CubicSeg, tol: float, out: list, depth: int = 0) -> None:
    # convex hull property: curve-to-chord deviation is bounded by the
    # control points' distance to the chord
    flat = max(
        _dist_to_chord(seg.c1, seg.p0, seg.p1),
        _dist_to_chord(seg.c2, seg.p0, seg.p1),
    )
    if flat <= tol or depth >= 24:
        out.append(seg.p1)
        return
    left, right = _split_cubic(seg)
    _flatten_cubic(left, tol, out, depth + 1)
    _flatten_cubic(right, tol, out, depth + 1)


def flatten_curve(segments: list[Segment], tolerance: float) -> np.ndarray:
    """Flatten a connected run of segments into an (n, 2) polyline.

    The polyline starts and ends at the run's endpoints; for every emitted
    chord the true curve deviates by at most `tolerance`. Zero-length
    segments are dropped silently.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    pts: list[tuple[float, float]] = []
    for seg in segments:
        if not pts:
            pts.append(seg.p0)
        elif pts[-1] != seg.p0:
            pts.append(seg.p0)
        if isinstance(seg, LineSeg):
            if seg.p1 != seg.p0:
                pts.append(seg.p1)
        else:
            if seg.p1 == seg.p0 and seg.c1 == seg.p0 and seg.c2 == seg.p0:
                continue  # degenerate segment
            _flatten_cubic(seg, tolerance, pts)
    # collapse exact duplicates left by degenerate geometry
    dedup = [pts[0]] if pts else []
    for p in pts[1:]:
        if p != dedup[-1]:
            dedup.append(p)
    return np.array(dedup if len(dedup) >= 2 else pts, dtype=np.float64)


# ---------------------------------------------------------------------------
# transforms

_IDENT = np.eye(3)

_TRANSFORM_RE = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")
_NUM_RE = re.compile(r"[-+]?(?:\d*\.\d+|\d+\.?)(?:[eE][-+]?\d+)?")


def _nums(text: str) -> list[float]:
    return [float(m) for m in _NUM_RE.findall(text)]


def parse_transform(text: str) -> np.ndarray:
    """Compose a `transform` attribute into a 3x3 matrix."""
    m = _IDENT.copy()
    for name, args in _TRANSFORM_RE.findall(text or ""):
        v = _nums(args)
        t = _IDENT.copy()
        if name == "matrix" and len(v) == 6:
            t[0, 0], t[1, 0], t[0, 1], t[1, 1], t[0, 2], t[1, 2] = v
        elif name == "translate" and v:
            t[0, 2] = v[0]
            t[1, 2] = v[1] if len(v) > 1 else 0.0
        elif name == "scale" and v:
            t[0, 0] = v[0]
            t[1, 1] = v[1] if len(v) > 1 else v[0]
        elif name == "rotate" and v:
            a = radians(v[0])
            t[0, 0], t[0, 1] = cos(a), -sin(a)
            t[1, 0], t[1, 1] = sin(a), cos(a)
            if len(v) >= 3:
                cx, cy = v[1], v[2]
                pre = _IDENT.copy()
                pre[0, 2], pre[1, 2] = cx, cy
                post = _IDENT.copy()
                post[0, 2], post[1, 2] = -cx, -cy
                t = pre @ t @ post
        else:
            warnings.warn(f"unsupported transform '{name}'", ParseWarning)
            continue
        m = m @ t
    return m


def _apply(mat: np.ndarray, p: tuple[float, float]) -> tuple[float, float]:
    x, y = p
    return (
        mat[0, 0] * x + mat[0, 1] * y + mat[0, 2],
        mat[1, 0] * x + mat[1, 1] * y + mat[1, 2],
    )


def _transform_segments(segments: list[Segment], mat: np.ndarray) -> list[Segment]:
    out: list[Segment] = []
    for s in segments:
        if isinstance(s, LineSeg):
            out.append(LineSeg(_apply(mat, s.p0), _apply(mat, s.p1)))
        else:
            out.append(
                CubicSeg(
                    _apply(mat, s.p0),
                    _apply(mat, s.c1),
                    _apply(mat, s.c2),
                    _apply(mat, s.p1),
                )
            )
    return out


# ---------------------------------------------------------------------------
# colors

_NAMED_COLORS = {
    "black": "#000000", "white": "#ffffff", "red": "#ff0000",
    "green": "#008000", "blue": "#0000ff", "yellow": "#ffff00",
    "orange": "#ffa500", "purple": "#800080", "pink": "#ffc0cb",
    "brown": "#a52a2a", "gray": "#808080", "grey": "#808080",
    "cyan": "#00ffff", "magenta": "#ff00ff", "lime": "#00ff00",
    "navy": "#000080", "teal": "#008080", "olive": "#808000",
    "maroon": "#800000", "aqua": "#00ffff", "fuchsia": "#ff00ff",
    "silver": "#c0c0c0", "gold": "#ffd700", "indigo": "#4b0082",
    "violet": "#ee82ee", "coral": "#ff7f50", "salmon": "#fa8072",
    "khaki": "#f0e68c", "turquoise": "#40e0d0", "tan": "#d2b48c",
    "beige": "#f5f5dc", "lightgray": "#d3d3d3", "lightgrey": "#d3d3d3",
    "darkgray": "#a9a9a9", "darkgrey": "#a9a9a9", "lightblue": "#add8e6",
    "darkblue": "#00008b", "lightgreen": "#90ee90", "darkgreen": "#006400",
    "darkred": "#8b0000", "skyblue": "#87ceeb", "crimson": "#dc143c",
    "cornflowerblue": "#6495ed", "steelblue": "#4682b4", "tomato": "#ff6347",
    "orchid": "#da70d6", "plum": "#dda0dd", "sienna": "#a0522d",
    "slategray": "#708090", "slategrey": "#708090", "ivory": "#fffff0",
    "lavender": "#e6e6fa", "mintcream": "#f5fffa", "wheat": "#f5deb3",
}


def parse_color(text: Optional[str]) -> Optional[Color]:
    """Parse a paint value; returns None for no paint (or unsupported)."""
    if text is None:
        return None
    t = text.strip().lower()
    if t in ("", "none", "transparent"):
        return None
    if t in _NAMED_COLORS:
        t = _NAMED_COLORS[t]
    if t.startswith("#"):
        h = t[1:]
        if len(h) == 3:
            h = "".join(c * 2 for c in h)
        if len(h) in (6, 8):
            try:
                r = int(h[0:2], 16) / 255.0
                g = int(h[2:4], 16) / 255.0
                b = int(h[4:6], 16) / 255.0
                a = int(h[6:8], 16) / 255.0 if len(h) == 8 else 1.0
                return (r, g, b, a)
            except ValueError:
                pass
        warnings.warn(f"unparseable color '{text}'", ParseWarning)
        return None
    m = re.match(r"rgba?\(([^)]*)\)", t)
    if m:
        parts = [p.strip() for p in m.group(1).replace(",", " ").split()]
        vals = []
        for i, p in enumerate(parts[:4]):
            if p.endswith("%"):
                vals.append(float(p[:-1]) / 100.0)
            else:
                vals.append(float(p) / (255.0 if i < 3 else 1.0))
        while len(vals) < 4:
            vals.append(1.0)
        return tuple(min(1.0, max(0.0, v)) for v in vals)  # type: ignore[return-value]
    warnings.warn(f"unsupported paint '{text}'", ParseWarning)
    return None


# ---------------------------------------------------------------------------
# path data

_PATH_TOKEN = re.compile(
    r"[MmLlHhVvCcSsQqTtAaZz]|[-+]?(?:\d*\.\d+|\d+\.?)(?:[eE][-+]?\d+)?"
)

# circle-from-cubics constant
_KAPPA = 4.0 / 3.0 * tan(pi / 8.0)


def _arc_to_cubics(p0, rx, ry, xrot, large, sweep, p1) -> list[CubicSeg]:
    """Endpoint-parameterized elliptical arc to cubic segments (SVG F.6)."""
    x1, y1 = p0
    x2, y2 = p1
    if (x1, y1) == (x2, y2):
        return []
    rx, ry = fabs(rx), fabs(ry)
    if rx == 0 or ry == 0:
        return [LineSeg(p0, p1)]  # type: ignore[list-item]
    phi = radians(xrot)
    cphi, sphi = cos(phi), sin(phi)
    dx, dy = (x1 - x2) / 2.0, (y1 - y2) / 2.0
    x1p = cphi * dx + sphi * dy
    y1p = -sphi * dx + cphi * dy
    lam = (x1p / rx) ** 2 + (y1p / ry) ** 2
    if lam > 1:
        s = sqrt(lam)
        rx, ry = rx * s, ry * s
    num = rx**2 * ry**2 - rx**2 * y1p**2 - ry**2 * x1p**2
    den = rx**2 * y1p**2 + ry**2 * x1p**2
    coef = sqrt(max(0.0, num / den)) if den else 0.0
    if large == sweep:
        coef = -coef
    cxp = coef * rx * y1p / ry
    cyp = -coef * ry * x1p / rx
    cx = cphi * cxp - sphi * cyp + (x1 + x2) / 2.0
    cy = sphi * cxp + cphi * cyp + (y1 + y2) / 2.0

    def angle(ux, uy, vx, vy):
        dot = ux * vx + uy * vy
        n = sqrt((ux**2 + uy**2) * (vx**2 + vy**2))
        a = np.arccos(np.clip(dot / n, -1.0, 1.0))
        if ux * vy - uy * vx < 0:
            a = -a
        return a

    th1 = angle(1.0, 0.0, (x1p - cxp) / rx, (y1p - cyp) / ry)
    dth = angle(
        (x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry
    )
    if not sweep and dth > 0:
        dth -= 2 * pi
    elif sweep and dth < 0:
        dth += 2 * pi

    n_seg = max(1, int(ceil(fabs(dth) / (pi / 2.0))))
    out = []
    for i in range(n_seg):
        a0 = th1 + dth * i / n_seg
        a1 = th1 + dth * (i + 1) / n_seg
        alpha = 4.0 / 3.0 * tan((a1 - a0) / 4.0)

        def ell(a):
            return (
                cx + rx * cos(a) * cphi - ry * sin(a) * sphi,
                cy + rx * cos(a) * sphi + ry * sin(a) * cphi,
            )

        def dell(a):
            return (
                -rx * sin(a) * cphi - ry * cos(a) * sphi,
                -rx * sin(a) * sphi + ry * cos(a) * cphi,
            )

        e0, e1 = ell(a0), ell(a1)
        d0, d1 = dell(a0), dell(a1)
        out.append(
            CubicSeg(
                e0,
                (e0[0] + alpha * d0[0], e0[1] + alpha * d0[1]),
                (e1[0] - alpha * d1[0], e1[1] - alpha * d1[1]),
                e1,
            )
        )
    return out


def parse_path_data(d: str) -> tuple[list[list[Segment]], bool]:
    """Parse a `d` string into subpaths (segment lists) plus a closed flag.

    The closed flag is true when any subpath is closed with Z.
    """
    tokens = _PATH_TOKEN.findall(d or "")
    pos = 0

    def num() -> float:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] in "MmLlHhVvCcSsQqTtAaZz":
            raise MalformedInput(f"truncated path data: {d[:60]!r}")
        v = float(tokens[pos])
        pos += 1
        return v

    subpaths: list[list[Segment]] = []
    current: list[Segment] = []
    cur = (0.0, 0.0)
    start = (0.0, 0.0)
    prev_cubic_ctrl = None
    prev_quad_ctrl = None
    closed_any = False
    cmd = None

    def finish_subpath():
        nonlocal current
        if current:
            subpaths.append(current)
        current = []

    while pos < len(tokens):
        tok = tokens[pos]
        if tok in "MmLlHhVvCcSsQqTtAaZz":
            cmd = tok
            pos += 1
            if cmd in "Zz":
                if cur != start:
                    current.append(LineSeg(cur, start))
                cur = start
                closed_any = True
                finish_subpath()
                prev_cubic_ctrl = prev_quad_ctrl = None
                cmd = None
            continue
        if cmd is None:
            raise MalformedInput(f"number without command in path data: {d[:60]!r}")

        rel = cmd.islower()
        c = cmd.upper()
        new_cubic_ctrl = None
        new_quad_ctrl = None

        if c == "M":
            x, y = num(), num()
            if rel:
                x, y = cur[0] + x, cur[1] + y
            finish_subpath()
            cur = (x, y)
            start = cur
            cmd = "l" if rel else "L"  # implicit lineto after moveto
        elif c == "L":
            x, y = num(), num()
            if rel:
                x, y = cur[0] + x, cur[1] + y
            current.append(LineSeg(cur, (x, y)))
            cur = (x, y)
        elif c == "H":
            x = num()
            x = cur[0] + x if rel else x
            current.append(LineSeg(cur, (x, cur[1])))
            cur = (x, cur[1])
        elif c == "V":
            y = num()
            y = cur[1] + y if rel else y
            current.append(LineSeg(cur, (cur[0], y)))
            cur = (cur[0], y)
        elif c == "C":
            vals = [num() for _ in range(6)]
            if rel:
                vals = [
                    v + (cur[0] if i % 2 == 0 else cur[1]) for i, v in enumerate(vals)
                ]
            c1, c2, p1 = (vals[0], vals[1]), (vals[2], vals[3]), (vals[4], vals[5])
            current.append(CubicSeg(cur, c1, c2, p1))
            new_cubic_ctrl = c2
            cur = p1
        elif c == "S":
            vals = [num() for _ in range(4)]
            if rel:
                vals = [
                    v + (cur[0] if i % 2 == 0 else cur[1]) for i, v in enumerate(vals)
                ]
            c1 = (
                (2 * cur[0] - prev_cubic_ctrl[0], 2 * cur[1] - prev_cubic_ctrl[1])
                if prev_cubic_ctrl
                else cur
            )
            c2, p1 = (vals[0], vals[1]), (vals[2], vals[3])
            current.append(CubicSeg(cur, c1, c2, p1))
            new_cubic_ctrl = c2
            cur = p1
        elif c == "Q":
            vals = [num() for _ in range(4)]
            if rel:
                vals = [
                    v + (cur[0] if i % 2 == 0 else cur[1]) for i, v in enumerate(vals)
                ]
            q, p1 = (vals[0], vals[1]), (vals[2], vals[3])
            current.append(quad_to_cubic(cur, q, p1))
            new_quad_ctrl = q
            cur = p1
        elif c == "T":
            vals = [num() for _ in range(2)]
            if rel:
                vals = [vals[0] + cur[0], vals[1] + cur[1]]
            q = (
                (2 * cur[0] - prev_quad_ctrl[0], 2 * cur[1] - prev_quad_ctrl[1])
                if prev_quad_ctrl
                else cur
            )
            p1 = (vals[0], vals[1])
            current.append(quad_to_cubic(cur, q, p1))
            new_quad_ctrl = q
            cur = p1
        elif c == "A":
            rx, ry, xrot, large, sweep, x, y = (num() for _ in range(7))
            if rel:
                x, y = cur[0] + x, cur[1] + y
            current.extend(
                _arc_to_cubics(cur, rx, ry, xrot, bool(large), bool(sweep), (x, y))
            )
            cur = (x, y)

        prev_cubic_ctrl = new_cubic_ctrl
        prev_quad_ctrl = new_quad_ctrl

    finish_subpath()
    return subpaths, closed_any


# ---------------------------------------------------------------------------
# shape elements -> segments

def _rect_segments(a: dict) -> list[Segment]:
    x, y = float(a.get("x", 0)), float(a.get("y", 0))
    w, h = float(a.get("width", 0)), float(a.get("height", 0))
    rx = a.get("rx")
    ry = a.get("ry")
    rx = float(rx) if rx is not None else (float(ry) if ry is not None else 0.0)
    ry = float(ry) if ry is not None else rx
    rx = min(rx, w / 2.0)
    ry = min(ry, h / 2.0)
    if rx <= 0 or ry <= 0:
        pts = [(x, y), (x + w, y), (x + w, y + h), (x, y + h)]
        return [LineSeg(pts[i], pts[(i + 1) % 4]) for i in range(4)]
    k = _KAPPA
    segs: list[Segment] = [
        LineSeg((x + rx, y), (x + w - rx, y)),
        CubicSeg(
            (x + w - rx, y),
            (x + w - rx + k * rx, y),
            (x + w, y + ry - k * ry),
            (x + w, y + ry),
        ),
        LineSeg((x + w, y + ry), (x + w, y + h - ry)),
        CubicSeg(
            (x + w, y + h - ry),
            (x + w, y + h - ry + k * ry),
            (x + w - rx + k * rx, y + h),
            (x + w - rx, y + h),
        ),
        LineSeg((x + w - rx, y + h), (x + rx, y + h)),
        CubicSeg(
            (x + rx, y + h),
            (x + rx - k * rx, y + h),
            (x, y + h - ry + k * ry),
            (x, y + h - ry),
        ),
        LineSeg((x, y + h - ry), (x, y + ry)),
        CubicSeg(
            (x, y + ry), (x, y + ry - k * ry), (x + rx - k * rx, y), (x + rx, y)
        ),
    ]
    return segs


def _ellipse_segments(cx, cy, rx, ry) -> list[Segment]:
    k = _KAPPA
    return [
        CubicSeg(
            (cx + rx, cy), (cx + rx, cy + k * ry), (cx + k * rx, cy + ry), (cx, cy + ry)
        ),
        CubicSeg(
            (cx, cy + ry), (cx - k * rx, cy + ry), (cx - rx, cy + k * ry), (cx - rx, cy)
        ),
        CubicSeg(
            (cx - rx, cy), (cx - rx, cy - k * ry), (cx - k * rx, cy - ry), (cx, cy - ry)
        ),
        CubicSeg(
            (cx, cy - ry), (cx + k * rx, cy - ry), (cx + rx, cy - k * ry), (cx + rx, cy)
        ),
    ]


def _points_attr(a: dict) -> list[tuple[float, float]]:
    v = _nums(a.get("points", ""))
    return [(v[i], v[i + 1]) for i in range(0, len(v) - 1, 2)]


# ---------------------------------------------------------------------------
# document walk

_DRAWABLE = {"path", "rect", "circle", "ellipse", "line", "polyline", "polygon"}

_STYLE_PROPS = ("fill", "stroke", "stroke-width", "fill-opacity", "opacity")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _flt(value, default: float) -> float:
    """Lenient numeric attribute parse ('2', '2px', '50%' -> 0.5)."""
    if value is None:
        return default
    text = str(value).strip()
    m = _NUM_RE.search(text)
    if not m:
        return default
    v = float(m.group(0))
    return v / 100.0 if text.endswith("%") else v


def _style_of(elem: ET.Element) -> dict:
    out = {}
    for k in _STYLE_PROPS:
        if k in elem.attrib:
            out[k] = elem.attrib[k]
    for part in elem.attrib.get("style", "").split(";"):
        if ":" in part:
            k, v = part.split(":", 1)
            k = k.strip()
            if k in _STYLE_PROPS:
                out[k] = v.strip()
    return out


@dataclass
class _Inherited:
    matrix: np.ndarray
    fill: Optional[str] = "black"
    stroke: Optional[str] = "none"
    stroke_width: float = 1.0
    fill_opacity: float = 1.0
    opacity: float = 1.0  # product of group opacities

    def child(self, elem: ET.Element) -> "_Inherited":
        style = _style_of(elem)
        mat = self.matrix
        if "transform" in elem.attrib:
            mat = mat @ parse_transform(elem.attrib["transform"])
        return _Inherited(
            matrix=mat,
            fill=style.get("fill", self.fill),
            stroke=style.get("stroke", self.stroke),
            stroke_width=_flt(style.get("stroke-width"), self.stroke_width),
            fill_opacity=_flt(style.get("fill-opacity"), self.fill_opacity),
            opacity=self.opacity * _flt(style.get("opacity"), 1.0),
        )


def _viewport(root: ET.Element) -> tuple[float, float, np.ndarray]:
    vb = root.attrib.get("viewBox")
    if vb:
        v = _nums(vb)
        if len(v) != 4 or v[2] <= 0 or v[3] <= 0:
            raise MalformedInput(f"bad viewBox {vb!r}")
        shift = _IDENT.copy()
        shift[0, 2], shift[1, 2] = -v[0], -v[1]
        return v[2], v[3], shift
    w, h = root.attrib.get("width"), root.attrib.get("height")
    if w is None or h is None:
        raise MalformedInput("svg has neither viewBox nor width/height")
    try:
        wv = _nums(w)[0]
        hv = _nums(h)[0]
    except IndexError:
        raise MalformedInput(f"unresolvable width/height {w!r}x{h!r}") from None
    if wv <= 0 or hv <= 0:
        raise MalformedInput("non-positive viewport")
    return wv, hv, _IDENT.copy()


def _element_segments(tag: str, a: dict) -> tuple[list[list[Segment]], bool]:
    if tag == "path":
        return parse_path_data(a.get("d", ""))
    if tag == "rect":
        return [_rect_segments(a)], True
    if tag == "circle":
        r = float(a.get("r", 0))
        return [_ellipse_segments(float(a.get("cx", 0)), float(a.get("cy", 0)), r, r)], True
    if tag == "ellipse":
        return [
            _ellipse_segments(
                float(a.get("cx", 0)),
                float(a.get("cy", 0)),
                float(a.get("rx", 0)),
                float(a.get("ry", 0)),
            )
        ], True
    if tag == "line":
        p0 = (float(a.get("x1", 0)), float(a.get("y1", 0)))
        p1 = (float(a.get("x2", 0)), float(a.get("y2", 0)))
        return [[LineSeg(p0, p1)]], False
    if tag in ("polyline", "polygon"):
        pts = _points_attr(a)
        segs: list[Segment] = [LineSeg(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
        if tag == "polygon" and len(pts) >= 3 and pts[-1] != pts[0]:
            segs.append(LineSeg(pts[-1], pts[0]))
        return [segs], tag == "polygon"
    raise AssertionError(tag)


def _css_color(c) -> str:
    r, g, b = (int(round(255 * v)) for v in c[:3])
    return f"#{r:02x}{g:02x}{b:02x}"


def document_to_svg(doc: VectorDocument) -> str:
    """Serialize a document as SVG polyline/polygon elements.

    Geometry round-trips exactly (shortest-repr floats); colors quantize to
    8-bit hex. Fill alpha is folded into fill-opacity; stroke alpha is
    dropped.
    """
    num = lambda v: repr(float(v))
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {num(doc.canvas_width)} {num(doc.canvas_height)}">'
    ]
    for p in doc.paths:
        tag = "polygon" if p.closed else "polyline"
        pts = " ".join(f"{num(x)},{num(y)}" for x, y in p.polyline)
        attrs = [f'points="{pts}"']
        if p.fill is None:
            attrs.append('fill="none"')
        else:
            attrs.append(f'fill="{_css_color(p.fill)}"')
            eff = p.fill_opacity * p.fill[3]
            if eff != 1.0:
                attrs.append(f'fill-opacity="{num(eff)}"')
        if p.stroke is not None:
            attrs.append(f'stroke="{_css_color(p.stroke)}"')
            attrs.append(f'stroke-width="{num(p.stroke_width)}"')
        out.append(f"  <{tag} {' '.join(attrs)}/>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def parse_document(
    svg_text: str, source_id: str = "", tolerance: Optional[float] = None
) -> VectorDocument:
    """Parse an SVG string into a VectorDocument.

    Raises MalformedInput for broken XML or a missing viewport and
    EmptyDocument when no drawable elements survive. Unsupported elements
    and paints are skipped with a ParseWarning.
    """
    try:
        root = ET.fromstring(svg_text)
    except ET.ParseError as exc:
        raise MalformedInput(f"broken XML: {exc}") from exc
    if _local(root.tag) != "svg":
        raise MalformedInput(f"root element is <{_local(root.tag)}>, expected <svg>")
    width, height, shift = _viewport(root)
    tol = tolerance if tolerance is not None else 1e-3 * max(width, height)

    paths: list[PathElement] = []

    def walk(elem: ET.Element, inh: _Inherited) -> None:
        for child in elem:
            tag = _local(child.tag)
            if tag == "g":
                walk(child, inh.child(child))
                continue
            if tag not in _DRAWABLE:
                warnings.warn(f"skipping unsupported element <{tag}>", ParseWarning)
                continue
            st = inh.child(child)
            subpaths, closed = _element_segments(tag, child.attrib)
            pts_runs = [
                flatten_curve(_transform_segments(run, st.matrix), tol)
                for run in subpaths
                if run
            ]
            if closed:
                # Closed rings connect last->first implicitly; drop the
                # explicit closing duplicate so a rect yields its 4 corners.
                pts_runs = [
                    r[:-1] if len(r) >= 3 and np.array_equal(r[0], r[-1]) else r
                    for r in pts_runs
                ]
            pts_runs = [r for r in pts_runs if len(r) >= 2]
            if not pts_runs:
                continue
            polyline = np.concatenate(pts_runs, axis=0)
            if len(polyline) < 2:
                continue
            # <line> never renders a fill regardless of inherited paint.
            fill = None if tag == "line" else parse_color(st.fill)
            stroke = parse_color(st.stroke)
            paths.append(
                PathElement(
                    index=len(paths),
                    polyline=polyline,
                    closed=closed,
                    fill=fill,
                    stroke=stroke,
                    stroke_width=max(0.0, st.stroke_width),
                    fill_opacity=min(1.0, max(0.0, st.fill_opacity * st.opacity)),
                )
            )

    walk(root, _Inherited(matrix=shift))
    if not paths:
        raise EmptyDocument(f"no drawable elements in {source_id or 'document'}")
    return VectorDocument(
        canvas_width=width, canvas_height=height, paths=paths, source_id=source_id
    )
