from __future__ import annotations

import itertools
import json

import numpy as np
import pytest

from conftest import make_doc, square
from vghier.affinity import (
    EMBED_DIM,
    EmbeddingTable,
    HeuristicAffinity,
    LocationModel,
    OracleAffinity,
    cosine_affinity,
    embed,
    export_model,
    heuristic_affinity,
    import_embeddings,
    import_model,
    infonce_loss,
    oracle_affinity,
    sample_triplet,
    subset_key,
    triplet_batch_loss,
)
from vghier.doc import normalize_bbox
from vghier.errors import (
    EmptySubset,
    FormatError,
    SamplingExhausted,
    SubsetNotNested,
    UnknownSubset,
)
from vghier.tree import GroupTree, random_tree


def four_square_doc():
    return make_doc(
        [square(10, 10, 10), square(30, 10, 10), square(10, 30, 10), square(60, 60, 20)],
        fills=[(1, 0, 0, 1)] * 4,
    )


class TestEmbed:
    def test_unit_norm(self):
        doc = four_square_doc()
        model = LocationModel.init(seed=0)
        for subset in [{0}, {1, 2}, {0, 1, 2, 3}]:
            e = embed(model, doc, subset)
            assert abs(np.linalg.norm(e) - 1.0) < 1e-6

    def test_zero_weights_bias_direction(self):
        model = LocationModel.init(seed=0)
        for name in ("W1", "W2", "W3"):
            model.params[name][:] = 0.0
        model.params["b1"][:] = 0.0
        model.params["b2"][:] = 0.0
        b = np.linspace(0.5, 2.0, EMBED_DIM)
        model.params["b3"][:] = b
        doc = four_square_doc()
        want = b / np.linalg.norm(b)
        for subset in [{0}, {2, 3}]:
            assert np.allclose(embed(model, doc, subset), want, atol=1e-12)

    def test_identical_normbox_identical_embedding(self):
        doc = make_doc([square(10, 10, 10), square(10, 10, 10), square(50, 50, 5)])
        model = LocationModel.init(seed=1)
        e0 = embed(model, doc, {0})
        e1 = embed(model, doc, {1})
        assert np.array_equal(e0, e1)

    def test_empty_subset(self):
        model = LocationModel.init(seed=0)
        with pytest.raises(EmptySubset):
            embed(model, four_square_doc(), set())

    def test_scale_invariance(self):
        # Uniformly scaling canvas and all geometry leaves NormBox, hence the
        # embedding, unchanged.
        base = four_square_doc()
        scaled = make_doc(
            [np.asarray(square(10, 10, 10)) * 3, np.asarray(square(30, 10, 10)) * 3],
            canvas=(300, 300),
        )
        small = make_doc([square(10, 10, 10), square(30, 10, 10)])
        model = LocationModel.init(seed=2)
        for s in [{0}, {1}, {0, 1}]:
            assert np.allclose(
                embed(model, small, s), embed(model, scaled, s), atol=1e-12
            )

    def test_cosine_affinity_basics(self):
        e = np.zeros(EMBED_DIM)
        e[0] = 1.0
        f = np.zeros(EMBED_DIM)
        f[1] = 1.0
        assert cosine_affinity(e, e) == 1.0
        assert cosine_affinity(e, -e) == -1.0
        assert cosine_affinity(e, f) == 0.0

    def test_cosine_matches_componentwise(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=EMBED_DIM)
        a /= np.linalg.norm(a)
        b = rng.normal(size=EMBED_DIM)
        b /= np.linalg.norm(b)
        assert cosine_affinity(a, b) == pytest.approx(sum(x * y for x, y in zip(a, b)))


class TestInfoNCE:
    def test_equal_scores_ln2(self):
        for s in (-3.0, 0.0, 0.7, 100.0):
            for tau in (0.05, 0.1, 1.0):
                loss, _, _ = infonce_loss(s, s, tau)
                assert loss == pytest.approx(np.log(2), abs=1e-12)

    def test_worked_example(self):
        loss, _, _ = infonce_loss(1.0, -1.0, 0.1)
        assert loss == pytest.approx(np.log1p(np.exp(-20)), abs=1e-12)
        assert loss == pytest.approx(2.061e-9, rel=1e-3)

    def test_monotonicity(self):
        l0, _, _ = infonce_loss(0.5, 0.0, 0.1)
        l1, _, _ = infonce_loss(0.6, 0.0, 0.1)
        l2, _, _ = infonce_loss(0.5, 0.1, 0.1)
        assert l1 < l0 < l2

    def test_gradients_finite_difference(self):
        rng = np.random.default_rng(3)
        h = 1e-5
        for _ in range(50):
            sp, sn = rng.uniform(-1, 1, 2)
            tau = float(rng.uniform(0.05, 1.0))
            _, dp, dn = infonce_loss(sp, sn, tau)
            fp = (infonce_loss(sp + h, sn, tau)[0] - infonce_loss(sp - h, sn, tau)[0]) / (2 * h)
            fn = (infonce_loss(sp, sn + h, tau)[0] - infonce_loss(sp, sn - h, tau)[0]) / (2 * h)
            assert dp == pytest.approx(fp, rel=1e-6, abs=1e-9)
            assert dn == pytest.approx(fn, rel=1e-6, abs=1e-9)

    def test_stability_extreme_scores(self):
        loss, dp, dn = infonce_loss(-1.0, 1.0, 0.01)
        assert np.isfinite(loss) and np.isfinite(dp) and np.isfinite(dn)
        assert loss == pytest.approx(200.0, rel=1e-9)


class TestSampleTriplet:
    def test_worked_example_ab_c(self):
        # tree ((a,b),c): when the draw is the three leaves, ref/pos must be
        # the {a,b} pair and neg must be c.
        t = GroupTree.from_nested([[0, 1], 2])
        a, b = t.leaf_for_path(0), t.leaf_for_path(1)
        c = t.leaf_for_path(2)
        rng = np.random.default_rng(0)
        seen_leaf_draw = False
        for _ in range(200):
            tr = sample_triplet(t, rng, strict=True)
            assert t.tdist(tr.ref, tr.pos) < t.tdist(tr.ref, tr.neg)
            assert t.tdist(tr.pos, tr.ref) < t.tdist(tr.pos, tr.neg)
            if {tr.ref, tr.pos, tr.neg} == {a, b, c}:
                seen_leaf_draw = True
                assert {tr.ref, tr.pos} == {a, b}
                assert tr.neg == c
        assert seen_leaf_draw

    def test_three_leaf_star_exhausts(self):
        t = GroupTree.from_nodes(
            3,
            [
                {"id": 0, "path": 0},
                {"id": 1, "path": 1},
                {"id": 2, "path": 2},
                {"id": 3, "children": [0, 1, 2]},
            ],
        )
        with pytest.raises(SamplingExhausted):
            sample_triplet(t, np.random.default_rng(0), strict=True)

    def test_star_nonstrict_succeeds_via_root(self):
        # Without the strict second conjunct, a draw containing the root is
        # usable: ref=leaf, pos=root (TDist 1) < neg=other leaf (TDist 2). The
        # star is only degenerate under strict sampling.
        t = GroupTree.from_nodes(
            3,
            [
                {"id": 0, "path": 0},
                {"id": 1, "path": 1},
                {"id": 2, "path": 2},
                {"id": 3, "children": [0, 1, 2]},
            ],
        )
        rng = np.random.default_rng(0)
        tr = sample_triplet(t, rng, strict=False)
        assert t.tdist(tr.ref, tr.pos) < t.tdist(tr.ref, tr.neg)
        assert tr.pos == 3  # only permutations through the root qualify

    def test_postcondition_replay_10k(self):
        rng = np.random.default_rng(5)
        count = 0
        while count < 10_000:
            t = random_tree(int(rng.integers(4, 12)), rng)
            for _ in range(100):
                try:
                    tr = sample_triplet(t, rng, strict=True)
                except SamplingExhausted:
                    break
                assert len({tr.ref, tr.pos, tr.neg}) == 3
                assert t.tdist(tr.ref, tr.pos) < t.tdist(tr.ref, tr.neg)
                assert t.tdist(tr.pos, tr.ref) < t.tdist(tr.pos, tr.neg)
                count += 1

    def test_nonstrict_relaxes_second_conjunct(self):
        # Find a tree/seed where non-strict emits a triplet violating the
        # strict-only condition, demonstrating the flag changes semantics.
        rng = np.random.default_rng(11)
        seen_violation = False
        for _ in range(3000):
            t = random_tree(int(rng.integers(4, 9)), rng)
            try:
                tr = sample_triplet(t, rng, strict=False)
            except SamplingExhausted:
                continue
            assert t.tdist(tr.ref, tr.pos) < t.tdist(tr.ref, tr.neg)
            if not (t.tdist(tr.pos, tr.ref) < t.tdist(tr.pos, tr.neg)):
                seen_violation = True
        assert seen_violation

    def test_internal_vertices_sampled(self):
        t = GroupTree.from_nested([[0, 1], [2, 3]])
        rng = np.random.default_rng(0)
        internal = set(t.internal_ids)
        hit = False
        for _ in range(300):
            tr = sample_triplet(t, rng, strict=True)
            if {tr.ref, tr.pos, tr.neg} & internal:
                hit = True
                break
        assert hit


class TestLocationModel:
    def test_init_deterministic_kaiming(self):
        a = LocationModel.init(seed=7)
        b = LocationModel.init(seed=7)
        assert np.array_equal(a.flat_params(), b.flat_params())
        c = LocationModel.init(seed=8)
        assert not np.array_equal(a.flat_params(), c.flat_params())
        # zero biases, nonzero weights
        assert np.all(a.params["b1"] == 0)
        assert np.all(a.params["b2"] == 0)
        assert np.all(a.params["b3"] == 0)
        assert np.any(a.params["W1"] != 0)

    def test_forward_shapes_and_norm(self):
        model = LocationModel.init(seed=0)
        x = np.random.default_rng(0).random((17, 4))
        e, cache = model.forward(x)
        assert e.shape == (17, EMBED_DIM)
        assert np.allclose(np.linalg.norm(e, axis=1), 1.0, atol=1e-9)

    def test_triplet_batch_loss_matches_scalar_loop(self):
        model = LocationModel.init(seed=3)
        rng = np.random.default_rng(1)
        b = 6
        br, bp, bn = (rng.random((b, 4)) for _ in range(3))
        loss, _ = triplet_batch_loss(model, br, bp, bn, tau=0.1)
        # independent recomputation: embed each row, cosine, scalar loss, mean
        total = 0.0
        for i in range(b):
            er, _ = model.forward(br[i : i + 1])
            ep, _ = model.forward(bp[i : i + 1])
            en, _ = model.forward(bn[i : i + 1])
            sp = float(er[0] @ ep[0])
            sn = float(er[0] @ en[0])
            total += infonce_loss(sp, sn, 0.1)[0]
        assert loss == pytest.approx(total / b, abs=1e-12)

    def test_format_error_on_bad_shapes(self):
        model = LocationModel.init(seed=0)
        params = {k: v.copy() for k, v in model.params.items()}
        params["W2"] = params["W2"][:, :100]
        with pytest.raises(FormatError):
            LocationModel(params)

    def test_format_error_on_nonfinite(self):
        model = LocationModel.init(seed=0)
        params = {k: v.copy() for k, v in model.params.items()}
        params["W1"][0, 0] = np.nan
        with pytest.raises(FormatError):
            LocationModel(params)


class TestOracleAffinity:
    def test_worked_example(self):
        # GT ((a,b),c): affinity(a,b) = -2 > affinity(a,c) = -3
        gt = GroupTree.from_nested([[0, 1], 2])
        model = oracle_affinity(gt)
        doc = make_doc([square(0, 0, 1), square(5, 0, 1), square(0, 5, 1)])
        ab = model.pairwise_affinity(doc, {0}, {1})
        ac = model.pairwise_affinity(doc, {0}, {2})
        assert ab == -2.0
        assert ac == -3.0
        assert ab > ac

    def test_sibling_vs_ancestor_ordering(self):
        gt = GroupTree.from_nested([[0, 1], [2, [3, 4]]])
        doc = make_doc([square(i * 3, 0, 1) for i in range(5)])
        model = oracle_affinity(gt)
        sib = model.pairwise_affinity(doc, {3}, {4})
        assert sib == -2.0
        cross = model.pairwise_affinity(doc, {2}, {3, 4})
        assert cross == -3.0
        far = model.pairwise_affinity(doc, {0, 1}, {2, 3, 4})
        assert far == -5.0
        assert sib > cross > far

    def test_subset_not_nested(self):
        gt = GroupTree.from_nested([[0, 1], [2, 3]])
        doc = make_doc([square(i * 3, 0, 1) for i in range(4)])
        model = oracle_affinity(gt)
        with pytest.raises(SubsetNotNested):
            model.pairwise_affinity(doc, {0, 2}, {1})

    def test_empty_subset(self):
        gt = GroupTree.from_nested([0, 1])
        doc = make_doc([square(0, 0, 1), square(3, 0, 1)])
        with pytest.raises(EmptySubset):
            oracle_affinity(gt).pairwise_affinity(doc, set(), {1})


class TestHeuristicAffinity:
    def test_identical_subsets_zero(self):
        doc = four_square_doc()
        model = heuristic_affinity(doc)
        assert model.pairwise_affinity(doc, {0, 1}, {0, 1}) == pytest.approx(0.0)

    def test_near_red_beats_far_blue(self):
        doc = make_doc(
            [square(10, 10, 5), square(18, 10, 5), square(80, 80, 5)],
            fills=[(1, 0, 0, 1), (1, 0, 0, 1), (0, 0, 1, 1)],
        )
        model = heuristic_affinity(doc)
        assert model.pairwise_affinity(doc, {0}, {1}) > model.pairwise_affinity(doc, {0}, {2})

    def test_ranking_matches_brute_force_formula(self):
        import colorsys

        rng = np.random.default_rng(2)
        polys = [square(float(x), float(y), 4) for x, y in rng.integers(0, 90, (10, 2))]
        fills = [tuple(rng.random(3)) + (1.0,) for _ in range(10)]
        doc = make_doc(polys, fills=fills)
        model = heuristic_affinity(doc)

        def expected(s1, s2):
            c1 = np.mean([doc.path_centroids[i] for i in sorted(s1)], axis=0)
            c2 = np.mean([doc.path_centroids[i] for i in sorted(s2)], axis=0)
            d = float(np.linalg.norm(c1 - c2))
            rgb1 = np.mean([fills[i][:3] for i in sorted(s1)], axis=0)
            rgb2 = np.mean([fills[i][:3] for i in sorted(s2)], axis=0)
            h1, s1_, v1 = colorsys.rgb_to_hsv(*rgb1)
            h2, s2_, v2 = colorsys.rgb_to_hsv(*rgb2)
            dh = abs(h1 - h2)
            dh = min(dh, 1 - dh)
            cdist = (2 * dh + abs(s1_ - s2_) + abs(v1 - v2)) / 3
            return -d - 0.5 * cdist

        subsets = [{0}, {1}, {2, 3}, {4, 5, 6}, {7}, {8, 9}]
        for s1, s2 in itertools.combinations(subsets, 2):
            got = model.pairwise_affinity(doc, s1, s2)
            assert got == pytest.approx(expected(s1, s2), abs=1e-12)

    def test_unfilled_subset_drops_color_term(self):
        doc = make_doc(
            [square(10, 10, 5), square(30, 10, 5)],
            fills=[(1, 0, 0, 1), None],
        )
        model = heuristic_affinity(doc)
        got = model.pairwise_affinity(doc, {0}, {1})
        d = float(np.linalg.norm(doc.path_centroids[0] - doc.path_centroids[1]))
        assert got == pytest.approx(-d, abs=1e-12)

    def test_symmetry(self):
        doc = four_square_doc()
        model = heuristic_affinity(doc)
        for s1, s2 in itertools.combinations([{0}, {1}, {2}, {3}, {0, 1}], 2):
            assert model.pairwise_affinity(doc, s1, s2) == model.pairwise_affinity(doc, s2, s1)


class TestSerialization:
    def test_export_import_bit_exact(self):
        model = LocationModel.init(seed=13)
        data = export_model(model)
        model2 = import_model(data)
        for k in model.params:
            assert np.array_equal(model.params[k], model2.params[k])
        assert export_model(model2) == data

    def test_export_is_canonical_json(self):
        data = export_model(LocationModel.init(seed=0))
        obj = json.loads(data)
        assert obj["format_version"] == 1
        assert obj["kind"] == "location_mlp"
        assert obj["dims"] == [4, 128, 128, 64]
        assert data == (
            json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
        ).encode()

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda o: o.pop("params"),
            lambda o: o.__setitem__("format_version", 99),
            lambda o: o.__setitem__("kind", "other"),
            lambda o: o.__setitem__("dims", [4, 64, 64, 64]),
            lambda o: o["params"].pop("W1"),
        ],
    )
    def test_format_errors(self, mutate):
        obj = json.loads(export_model(LocationModel.init(seed=0)))
        mutate(obj)
        with pytest.raises(FormatError):
            import_model(json.dumps(obj).encode())

    def test_bad_json_format_error(self):
        with pytest.raises(FormatError):
            import_model(b"not json at all")


class TestEmbeddingTable:
    def test_subset_key_sorted(self):
        assert subset_key({3, 1, 2}) == "1-2-3"
        assert subset_key([5]) == "5"

    def test_lookup_normalized(self):
        v = np.zeros(EMBED_DIM)
        v[0] = 2.0  # norm 2: must come back normalized
        table = {"0-1": list(v)}
        model = import_embeddings(json.dumps(table))
        doc = make_doc([square(0, 0, 1), square(3, 0, 1)])
        e = embed(model, doc, {0, 1})
        assert abs(np.linalg.norm(e) - 1.0) < 1e-6
        assert e[0] == pytest.approx(1.0)

    def test_unknown_subset(self):
        table = {"0": [1.0] + [0.0] * (EMBED_DIM - 1)}
        model = import_embeddings(json.dumps(table))
        doc = make_doc([square(0, 0, 1), square(3, 0, 1)])
        with pytest.raises(UnknownSubset):
            embed(model, doc, {0, 1})

    def test_bad_vector_length(self):
        with pytest.raises(FormatError):
            import_embeddings(json.dumps({"0": [1.0, 2.0]}))

    def test_zero_vector_rejected(self):
        with pytest.raises(FormatError):
            import_embeddings(json.dumps({"0": [0.0] * EMBED_DIM}))
