from __future__ import annotations

import numpy as np
import pytest

from oracles import brute_force_cted, brute_force_fmi
from vghier.errors import EmptyGroup, LeafSetMismatch, UnknownNode
from vghier.metrics import cted, depth_cut, fmi, iou, mean_node_overlap, node_overlap
from vghier.tree import GroupTree, random_tree


def fig8_trees():
    """Five-leaf trees whose depth-1 cuts give the clusterings
    {1,2,3},{4,5} and {1,2},{3},{4,5} (0-indexed here)."""
    t1 = GroupTree.from_nested([[0, 1, 2], [3, 4]])
    t2 = GroupTree.from_nested([[0, 1], 2, [3, 4]])
    return t1, t2


class TestCted:
    def test_identity_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            t = random_tree(int(rng.integers(1, 10)), rng)
            assert cted(t, t) == 0.0

    def test_worked_example_matches_brute_force(self):
        t1 = GroupTree.from_nested([[0, 1], 2])
        t2 = GroupTree.from_nested([0, [1, 2]])
        got = cted(t1, t2)
        assert got == pytest.approx(brute_force_cted(t1, t2), abs=1e-12)
        assert 0.0 < got < 1.0

    def test_symmetry_100_pairs(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(2, 8))
            t1 = random_tree(n, rng)
            t2 = random_tree(n, rng)
            assert cted(t1, t2) == pytest.approx(cted(t2, t1), abs=1e-12)

    def test_range(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            t1, t2 = random_tree(n, rng), random_tree(n, rng)
            v = cted(t1, t2)
            assert 0.0 <= v <= 1.0

    def test_leaf_set_mismatch(self):
        t1 = GroupTree.from_nested([0, 1])
        t2 = GroupTree.from_nested([0, 2])
        with pytest.raises(LeafSetMismatch):
            cted(t1, t2)

    def test_child_order_invariance(self):
        a = GroupTree.from_nested([[0, 1], [2, 3]])
        b = GroupTree.from_nested([[3, 2], [1, 0]])
        c = GroupTree.from_nested([[2, 3], [0, 1]])
        rng = np.random.default_rng(3)
        other = random_tree(4, rng, binary=True)
        assert cted(a, other) == pytest.approx(cted(b, other), abs=1e-12)
        assert cted(a, other) == pytest.approx(cted(c, other), abs=1e-12)

    def test_brute_force_agreement_small_sample(self):
        # scaled-down version of the acceptance sweep
        rng = np.random.default_rng(4)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            t1 = random_tree(n, rng)
            t2 = random_tree(n, rng)
            assert cted(t1, t2) == pytest.approx(brute_force_cted(t1, t2), abs=1e-12)

    def test_single_leaf_pair(self):
        t1 = GroupTree.from_nested(0)
        t2 = GroupTree.from_nested(0)
        assert cted(t1, t2) == 0.0


class TestDepthCut:
    def test_deep_cut_all_singletons(self):
        t = GroupTree.from_nested([[0, 1], 2])
        blocks = depth_cut(t, 10)
        assert blocks == [{0}, {1}, {2}]

    def test_depth_one_two_children(self):
        t = GroupTree.from_nested([[0, 1], [2, 3]])
        assert depth_cut(t, 1) == [{0, 1}, {2, 3}]

    def test_fig8_clusterings(self):
        t1, t2 = fig8_trees()
        assert depth_cut(t1, 1) == [{0, 1, 2}, {3, 4}]
        assert depth_cut(t2, 1) == [{0, 1}, {2}, {3, 4}]

    def test_shallow_leaves_become_singletons(self):
        t = GroupTree.from_nested([[0, 1], 2])
        assert depth_cut(t, 2) == [{0}, {1}, {2}]

    def test_partition_property(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            t = random_tree(int(rng.integers(1, 10)), rng)
            for d in (1, 2, 3, 4):
                blocks = depth_cut(t, d)
                flat = [i for b in blocks for i in b]
                assert sorted(flat) == sorted(t.path_indices)
                assert len(flat) == len(set(flat))

    def test_bad_depth(self):
        with pytest.raises(ValueError):
            depth_cut(GroupTree.from_nested([0, 1]), 0)


class TestFmi:
    def test_identity_one(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            t = random_tree(int(rng.integers(2, 10)), rng)
            for d in (1, 2, 3):
                assert fmi(t, t, d) == 1.0

    def test_fig8_value(self):
        t1, t2 = fig8_trees()
        assert fmi(t1, t2, 1) == pytest.approx(2 / np.sqrt(8), abs=1e-9)

    def test_disjoint_pairings_zero(self):
        t1 = GroupTree.from_nested([[0, 1], [2, 3]])
        t2 = GroupTree.from_nested([[0, 2], [1, 3]])
        assert fmi(t1, t2, 1) == 0.0

    def test_matches_brute_force_pairs(self):
        rng = np.random.default_rng(7)
        from vghier.metrics import depth_cut as dc

        for _ in range(50):
            n = int(rng.integers(2, 10))
            t1, t2 = random_tree(n, rng), random_tree(n, rng)
            for d in (1, 2, 3):
                want = brute_force_fmi(dc(t1, d), dc(t2, d))
                assert fmi(t1, t2, d) == pytest.approx(want, abs=1e-12)

    def test_both_singleton_convention(self):
        # depth beyond both heights: both cuts all singletons -> 1.0
        t1 = GroupTree.from_nested([0, 1])
        t2 = GroupTree.from_nested([0, 1])
        assert fmi(t1, t2, 5) == 1.0

    def test_one_singleton_convention(self):
        # t1 depth-1 blocks are all singletons ({0},{1},{2}); t2 keeps {0,1}.
        # Exactly one side has zero same-group pairs -> 0.0 by convention.
        t1 = GroupTree.from_nested([0, 1, 2])
        t2 = GroupTree.from_nested([[0, 1], 2])
        assert fmi(t1, t2, 1) == 0.0
        assert fmi(t2, t1, 1) == 0.0

    def test_leaf_set_mismatch(self):
        t1 = GroupTree.from_nested([0, 1])
        t2 = GroupTree.from_nested([1, 2])
        with pytest.raises(LeafSetMismatch):
            fmi(t1, t2, 1)

    def test_symmetry(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            t1, t2 = random_tree(n, rng), random_tree(n, rng)
            for d in (1, 2):
                assert fmi(t1, t2, d) == pytest.approx(fmi(t2, t1, d), abs=1e-12)


class TestNodeOverlap:
    def test_exact_node_one(self):
        t = GroupTree.from_nested([[0, 1], [2, 3]])
        for v in t.node_ids:
            assert node_overlap(set(t.leaves_of(v)), t) == 1.0

    def test_single_path(self):
        t = GroupTree.from_nested([[0, 1], 2])
        assert node_overlap({1}, t) == 1.0

    def test_worked_example(self):
        t = GroupTree.from_nested([[0, 1], [2, 3]])
        assert node_overlap({0, 1, 2}, t) == pytest.approx(3 / 4)

    def test_enumeration_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            t = random_tree(int(rng.integers(2, 10)), rng)
            leaves = sorted(t.path_indices)
            k = int(rng.integers(1, len(leaves) + 1))
            group = set(rng.choice(leaves, size=k, replace=False).tolist())
            want = max(
                len(t.leaves_of(v) & group) / len(t.leaves_of(v) | group)
                for v in t.node_ids
            )
            assert node_overlap(group, t) == pytest.approx(want, abs=1e-12)

    def test_empty_group(self):
        with pytest.raises(EmptyGroup):
            node_overlap(set(), GroupTree.from_nested([0, 1]))

    def test_out_of_range_group(self):
        with pytest.raises(UnknownNode):
            node_overlap({7}, GroupTree.from_nested([0, 1]))

    def test_mean_node_overlap_perfect(self):
        t = GroupTree.from_nested([[0, 1], [2, 3]])
        assert mean_node_overlap(t, t) == 1.0

    def test_mean_node_overlap_partial(self):
        gt = GroupTree.from_nested([[0, 1], [2, 3]])
        other = GroupTree.from_nested([[0, 2], [1, 3]])
        v = mean_node_overlap(gt, other)
        assert 0.0 < v < 1.0

    def test_iou_basics(self):
        assert iou({1, 2}, {1, 2}) == 1.0
        assert iou({1}, {2}) == 0.0
        assert iou({1, 2}, {2, 3}) == pytest.approx(1 / 3)
