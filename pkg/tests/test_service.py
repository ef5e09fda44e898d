from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from vghier.corpus import CorpusIndex
from vghier.infer import scribble_suggest
from vghier.parse import document_to_svg
from vghier.synth import synth_generate
from vghier.tree import GroupTree


@pytest.fixture(scope="module")
def corpus(synth_corpus_dir):
    return CorpusIndex.load(synth_corpus_dir)


@pytest.fixture(scope="module")
def client(corpus):
    from vghier.service import create_app

    with TestClient(create_app(corpus)) as c:
        yield c


class TestGraphicsListing:
    def test_list_ids(self, client, corpus):
        r = client.get("/api/graphics")
        assert r.status_code == 200
        assert r.json() == corpus.ids

    def test_unknown_graphic_404_json(self, client):
        for path in ("svg", "doc", "tree"):
            r = client.get(f"/api/graphics/nope/{path}")
            assert r.status_code == 404
            assert "unknown graphic" in r.json()["detail"]


class TestSvgAndDoc:
    def test_svg_content_type(self, client, corpus):
        gid = corpus.ids[0]
        r = client.get(f"/api/graphics/{gid}/svg")
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("image/svg+xml")
        assert r.text == (corpus.get(gid).svg_path).read_text(encoding="utf-8")

    def test_doc_shape(self, client, corpus):
        gid = corpus.ids[0]
        r = client.get(f"/api/graphics/{gid}/doc")
        assert r.status_code == 200
        obj = r.json()
        assert set(obj) == {"canvas", "paths"}
        assert set(obj["canvas"]) == {"w", "h"}
        doc = corpus.load_doc(gid)
        assert len(obj["paths"]) == doc.n_paths


class TestTree:
    def test_tree_valid_and_deterministic(self, client, corpus):
        gid = corpus.ids[0]
        r1 = client.get(f"/api/graphics/{gid}/tree")
        r2 = client.get(f"/api/graphics/{gid}/tree")
        assert r1.status_code == 200
        assert r1.content == r2.content
        tree = GroupTree.from_json(r1.text)
        assert tree.n_leaves == corpus.load_doc(gid).n_paths

    def test_containment_variant_cached_separately(self, client, corpus):
        gid = corpus.ids[0]
        plain = client.get(f"/api/graphics/{gid}/tree")
        con = client.get(f"/api/graphics/{gid}/tree", params={"containment": "true"})
        assert con.status_code == 200
        t = GroupTree.from_json(con.text)
        assert t.n_leaves == GroupTree.from_json(plain.text).n_leaves

    def test_single_flight_under_threads(self, client, corpus):
        gid = corpus.ids[1]
        with ThreadPoolExecutor(max_workers=8) as pool:
            futures = [
                pool.submit(client.get, f"/api/graphics/{gid}/tree")
                for _ in range(16)
            ]
            bodies = {f.result().content for f in futures}
        assert len(bodies) == 1


class TestSuggest:
    def test_matches_library(self, client, corpus):
        gid = corpus.ids[2]
        tree = GroupTree.from_json(client.get(f"/api/graphics/{gid}/tree").text)
        r = client.get(f"/api/graphics/{gid}/suggest", params={"paths": "0,1", "k": 3})
        assert r.status_code == 200
        assert r.json() == scribble_suggest(tree, {0, 1}, 3)

    def test_default_k_is_3(self, client, corpus):
        gid = corpus.ids[2]
        r = client.get(f"/api/graphics/{gid}/suggest", params={"paths": "0"})
        assert r.status_code == 200
        assert len(r.json()) <= 3

    def test_bad_paths_400(self, client, corpus):
        gid = corpus.ids[0]
        r = client.get(f"/api/graphics/{gid}/suggest", params={"paths": "a,b"})
        assert r.status_code == 400

    def test_empty_paths_400(self, client, corpus):
        gid = corpus.ids[0]
        r = client.get(f"/api/graphics/{gid}/suggest", params={"paths": ""})
        assert r.status_code == 400

    def test_out_of_range_paths_400(self, client, corpus):
        gid = corpus.ids[0]
        r = client.get(f"/api/graphics/{gid}/suggest", params={"paths": "9999"})
        assert r.status_code == 400


class TestUpload:
    def test_upload_and_serve(self, client):
        doc, _ = synth_generate(123)
        svg = document_to_svg(doc)
        r = client.post(
            "/api/graphics", files={"file": ("up.svg", svg.encode(), "image/svg+xml")}
        )
        assert r.status_code == 200
        gid = r.json()["id"]
        assert gid.startswith("up-")
        assert gid in client.get("/api/graphics").json()
        tree = GroupTree.from_json(client.get(f"/api/graphics/{gid}/tree").text)
        assert tree.n_leaves == doc.n_paths

    def test_upload_bad_svg_400(self, client):
        r = client.post("/api/graphics", files={"file": ("x.svg", b"<svg", "image/svg+xml")})
        assert r.status_code == 400

    def test_upload_deduplicates_by_content(self, client):
        doc, _ = synth_generate(124)
        svg = document_to_svg(doc).encode()
        g1 = client.post("/api/graphics", files={"file": ("a.svg", svg, "")}).json()["id"]
        g2 = client.post("/api/graphics", files={"file": ("b.svg", svg, "")}).json()["id"]
        assert g1 == g2


class TestOracleModel:
    def test_oracle_serves_corpus_but_409_for_uploads(self, corpus):
        from vghier.service import create_app

        with TestClient(create_app(corpus, model_spec="oracle")) as c:
            gid = corpus.ids[0]
            r = c.get(f"/api/graphics/{gid}/tree")
            assert r.status_code == 200
            inferred = GroupTree.from_json(r.text)
            gt = corpus.load_tree(gid)
            from vghier.metrics import mean_node_overlap

            assert mean_node_overlap(gt, inferred) == 1.0

            doc, _ = synth_generate(200)
            up = c.post(
                "/api/graphics",
                files={"file": ("u.svg", document_to_svg(doc).encode(), "")},
            ).json()["id"]
            assert c.get(f"/api/graphics/{up}/tree").status_code == 409


class TestLearnedModel:
    def test_learned_model_spec(self, corpus, tmp_path):
        from vghier.affinity import LocationModel, export_model
        from vghier.service import create_app

        path = tmp_path / "m.bin"
        path.write_bytes(export_model(LocationModel.init(seed=0)))
        with TestClient(create_app(corpus, model_spec=str(path))) as c:
            gid = corpus.ids[0]
            r = c.get(f"/api/graphics/{gid}/tree")
            assert r.status_code == 200
            t = GroupTree.from_json(r.text)
            assert t.n_nodes == 2 * corpus.load_doc(gid).n_paths - 1


class TestStaticUi:
    def test_placeholder_when_no_bundle(self, corpus, tmp_path):
        from vghier.service import create_app

        app = create_app(corpus, frontend_dir=tmp_path / "missing")
        with TestClient(app) as c:
            r = c.get("/")
            assert r.status_code == 200
            assert "text/html" in r.headers["content-type"]

    def test_bundle_mounted_when_present(self, corpus, tmp_path):
        from vghier.service import create_app

        dist = tmp_path / "dist"
        dist.mkdir()
        (dist / "index.html").write_text("<!doctype html><title>ui</title>")
        with TestClient(create_app(corpus, frontend_dir=dist)) as c:
            r = c.get("/")
            assert r.status_code == 200
            assert "ui" in r.text
            # API still reachable under the mount
            assert c.get("/api/graphics").status_code == 200
