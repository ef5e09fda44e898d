from __future__ import annotations

import numpy as np
import pytest

from vghier.doc import PathElement, VectorDocument
from vghier.synth import SynthSpec, synth_generate
from vghier.tree import GroupTree


def make_doc(
    polylines,
    canvas=(100.0, 100.0),
    fills=None,
    closed=True,
    strokes=None,
    stroke_width=1.0,
) -> VectorDocument:
    """Build a VectorDocument from raw point lists for geometry-level tests."""
    paths = []
    for i, pts in enumerate(polylines):
        fill = None
        if fills is not None and fills[i] is not None:
            fill = tuple(float(c) for c in fills[i])
        stroke = None
        if strokes is not None and strokes[i] is not None:
            stroke = tuple(float(c) for c in strokes[i])
        paths.append(
            PathElement(
                index=i,
                polyline=np.asarray(pts, dtype=np.float64),
                closed=closed if isinstance(closed, bool) else closed[i],
                fill=fill,
                stroke=stroke,
                stroke_width=stroke_width,
                fill_opacity=1.0,
            )
        )
    return VectorDocument(
        canvas_width=float(canvas[0]),
        canvas_height=float(canvas[1]),
        paths=paths,
        source_id="test",
    )


def square(x, y, side) -> list[list[float]]:
    return [[x, y], [x + side, y], [x + side, y + side], [x, y + side]]


@pytest.fixture(scope="session")
def synth_corpus_dir(tmp_path_factory):
    """A small on-disk corpus shared by CLI/service tests."""
    from vghier.corpus import write_entry

    root = tmp_path_factory.mktemp("corpus")
    for seed in range(6):
        doc, tree = synth_generate(seed, SynthSpec(n_groups=(2, 3), paths_per_group=(2, 4)))
        write_entry(root, f"{seed:04d}", doc, tree)
    return root


@pytest.fixture(scope="session")
def tiny_dataset():
    """In-memory (doc, tree) pairs for training-adjacent tests."""
    spec = SynthSpec(n_groups=(2, 3), paths_per_group=(2, 4))
    return [synth_generate(seed, spec) for seed in range(8)]
