"""Generate frontend test fixtures from a live service instance.

Writes, per fixture, the doc/tree JSON exactly as the service serves them,
plus 50 random scribble traces with their touched sets (computed with a
literal mirror of the client hit test) and the server's /suggest response.
Run from frontend/:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from vghier.corpus import CorpusIndex, write_entry
from vghier.service import create_app
from vghier.synth import SynthSpec, synth_generate_full

OUT = Path(__file__).resolve().parents[1] / "fixtures"

FIXTURES = [
    # (name, spec, seed) — fix0 is the two-face scene used by the toggle tests
    ("fix0", SynthSpec(motifs=("face",), n_groups=(2, 2), paths_per_group=(4, 4)), 5),
    ("fix1", SynthSpec(), 11),
    ("fix2", SynthSpec(), 12),
    ("fix3", SynthSpec(), 13),
    ("fix4", SynthSpec(enclosure=1.0), 14),
]


# -- literal mirror of src/scribble.ts hit testing --------------------------


def seg_dist_sq(p, a, b) -> float:
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    l2 = dx * dx + dy * dy
    t = 0.0 if l2 == 0 else ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2
    t = 0.0 if t < 0 else (1.0 if t > 1 else t)
    qx = a[0] + t * dx
    qy = a[1] + t * dy
    return (p[0] - qx) * (p[0] - qx) + (p[1] - qy) * (p[1] - qy)


def point_in_polygon(p, poly) -> bool:
    inside = False
    n = len(poly)
    j = n - 1
    for i in range(n):
        xi, yi = poly[i]
        xj, yj = poly[j]
        if (yi > p[1]) != (yj > p[1]) and p[0] < ((xj - xi) * (p[1] - yi)) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def point_touches(p, path: dict, eps: float) -> bool:
    poly = path["polyline"]
    xs = [q[0] for q in poly]
    ys = [q[1] for q in poly]
    if p[0] < min(xs) - eps or p[0] > max(xs) + eps:
        return False
    if p[1] < min(ys) - eps or p[1] > max(ys) + eps:
        return False
    eps_sq = eps * eps
    for i in range(len(poly) - 1):
        if seg_dist_sq(p, poly[i], poly[i + 1]) <= eps_sq:
            return True
    if path["closed"] and len(poly) > 2 and seg_dist_sq(p, poly[-1], poly[0]) <= eps_sq:
        return True
    return bool(path["closed"] and path["fill"] is not None and point_in_polygon(p, poly))


def hit_test(doc: dict, trace) -> list[int]:
    eps = 0.01 * max(doc["canvas"]["w"], doc["canvas"]["h"])
    touched = []
    for path in doc["paths"]:
        if any(point_touches(p, path, eps) for p in trace):
            touched.append(path["index"])
    return touched


# -- generation --------------------------------------------------------------


def random_trace(rng: np.random.Generator, w: float, h: float) -> list[list[float]]:
    n = int(rng.integers(4, 21))
    x = float(rng.uniform(0, w))
    y = float(rng.uniform(0, h))
    pts = [[x, y]]
    for _ in range(n - 1):
        x = min(max(x + float(rng.normal(0, 14.0)), 0.0), w)
        y = min(max(y + float(rng.normal(0, 14.0)), 0.0), h)
        pts.append([x, y])
    return pts


def main() -> int:
    corpus_dir = OUT / "_corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    meta: dict[str, dict] = {}
    for name, spec, seed in FIXTURES:
        res = synth_generate_full(seed, spec)
        write_entry(corpus_dir, name, res.doc, res.tree)
        if name == "fix0":
            face = res.groups[0]
            meta[name] = {
                # face motif layout: head, eye, eye, mouth
                "face_group": sorted(face),
                "eye_path": face[1],
                "other_group": sorted(res.groups[1]),
            }

    index = CorpusIndex.load(corpus_dir)
    app = create_app(index, model_spec="oracle")
    rng = np.random.default_rng(2024)
    traces_out = []
    with TestClient(app) as client:
        for name, _, _ in FIXTURES:
            doc = client.get(f"/api/graphics/{name}/doc").json()
            tree_text = client.get(f"/api/graphics/{name}/tree").text
            fdir = OUT / name
            fdir.mkdir(parents=True, exist_ok=True)
            (fdir / "doc.json").write_text(
                json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
            )
            (fdir / "tree.json").write_text(tree_text)

            made = 0
            while made < 10:
                trace = random_trace(rng, doc["canvas"]["w"], doc["canvas"]["h"])
                touched = hit_test(doc, trace)
                if not touched:
                    continue
                resp = client.get(
                    f"/api/graphics/{name}/suggest",
                    params={"paths": ",".join(map(str, touched)), "k": 3},
                )
                resp.raise_for_status()
                traces_out.append(
                    {
                        "fixture": name,
                        "trace": trace,
                        "touched": touched,
                        "expected": resp.json(),
                    }
                )
                made += 1

    (OUT / "traces.json").write_text(
        json.dumps(traces_out, sort_keys=True, separators=(",", ":")) + "\n"
    )
    (OUT / "meta.json").write_text(
        json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n"
    )
    print(f"wrote {len(FIXTURES)} fixtures, {len(traces_out)} traces -> {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
