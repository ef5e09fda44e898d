from __future__ import annotations

import numpy as np
import pytest

from vghier.errors import InvalidSpec
from vghier.infer import containment_graph
from vghier.synth import (
    MOTIF_NAMES,
    SynthSpec,
    synth_generate,
    synth_generate_full,
)
from vghier.tree import validate


class TestSynthSpec:
    def test_defaults_valid(self):
        SynthSpec().validate()

    @pytest.mark.parametrize(
        "kw",
        [
            {"n_groups": (0, 3)},
            {"n_groups": (4, 2)},
            {"paths_per_group": (3, 1)},
            {"motifs": ()},
            {"motifs": ("flower", "squiggle")},
        ],
    )
    def test_validate_rejects(self, kw):
        with pytest.raises(InvalidSpec):
            SynthSpec(**kw).validate()

    def test_from_dict_round_trip(self):
        spec = SynthSpec(n_groups=(1, 2), paths_per_group=(3, 3), motifs=("face",))
        assert SynthSpec.from_dict(spec.to_dict()) == spec

    def test_from_dict_scalar_ranges(self):
        spec = SynthSpec.from_dict({"n_groups": 2, "paths_per_group": 4})
        assert spec.n_groups == (2, 2)
        assert spec.paths_per_group == (4, 4)

    def test_from_dict_unknown_key(self):
        with pytest.raises(InvalidSpec):
            SynthSpec.from_dict({"groups": 3})

    def test_bad_spec_raises_at_generate(self):
        with pytest.raises(InvalidSpec):
            synth_generate(0, SynthSpec(motifs=()))


class TestGenerate:
    def test_minimal_one_group_two_paths(self):
        spec = SynthSpec(n_groups=(1, 1), paths_per_group=(2, 2))
        doc, tree = synth_generate(0, spec)
        assert doc.n_paths == 2
        assert tree.n_nodes == 3
        assert tree.to_nested() == [0, 1]

    def test_leaf_count_equals_path_count_100_seeds(self):
        for seed in range(100):
            doc, tree = synth_generate(seed)
            assert tree.n_leaves == doc.n_paths
            assert validate(tree, doc.n_paths) is None

    def test_group_counts_respect_spec(self):
        spec = SynthSpec(n_groups=(3, 3), paths_per_group=(2, 4))
        for seed in range(10):
            res = synth_generate_full(seed, spec)
            assert len(res.groups) == 3
            assert len(res.motif_names) == 3
            for members in res.groups:
                assert 2 <= len(members) <= 4

    def test_groups_partition_paths(self):
        for seed in range(10):
            res = synth_generate_full(seed)
            flat = [i for g in res.groups for i in g]
            assert sorted(flat) == list(range(res.doc.n_paths))

    def test_groups_are_tree_nodes(self):
        # every generated motif appears as a node's exact leaf set
        for seed in range(10):
            res = synth_generate_full(seed)
            leaf_sets = {frozenset(res.tree.leaves_of(v)) for v in res.tree.node_ids}
            for members in res.groups:
                if len(members) > 0:
                    assert frozenset(members) in leaf_sets

    def test_ground_truth_binary(self):
        for seed in range(20):
            doc, tree = synth_generate(seed)
            assert tree.n_nodes == 2 * doc.n_paths - 1

    def test_deterministic(self):
        for seed in (0, 7):
            d1, t1 = synth_generate(seed)
            d2, t2 = synth_generate(seed)
            assert t1.to_json() == t2.to_json()
            assert d1.n_paths == d2.n_paths
            for p, q in zip(d1.paths, d2.paths):
                assert np.array_equal(p.polyline, q.polyline)
                assert p.fill == q.fill

    def test_seeds_differ(self):
        d1, _ = synth_generate(0)
        d2, _ = synth_generate(1)
        same = d1.n_paths == d2.n_paths and all(
            np.array_equal(p.polyline, q.polyline)
            for p, q in zip(d1.paths, d2.paths)
        )
        assert not same

    def test_motif_names_known(self):
        for seed in range(5):
            res = synth_generate_full(seed)
            assert set(res.motif_names) <= set(MOTIF_NAMES)

    def test_frames_produce_containment_20_of_20(self):
        spec = SynthSpec(motifs=("frames",))
        for seed in range(20):
            doc, _ = synth_generate(seed, spec)
            g = containment_graph(doc)
            assert g.n_edges > 0

    def test_source_id(self):
        doc, _ = synth_generate(17)
        assert doc.source_id == "synth-17"
