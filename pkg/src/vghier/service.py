"""Local HTTP service: graphics, inferred trees, and scribble suggestions.

The tree cache is keyed by (graphic id, model fingerprint, containment flag)
and computed at most once per key (single-flight per key).
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, File, HTTPException, UploadFile
from fastapi.responses import HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from .affinity import (
    AffinityModel,
    LocationModel,
    heuristic_affinity,
    import_model,
    oracle_affinity,
)
from .corpus import CorpusIndex
from .doc import VectorDocument, doc_to_json
from .errors import VghierError
from .infer import containment_guided_tree, greedy_tree, scribble_suggest
from .parse import parse_document
from .tree import GroupTree

_PLACEHOLDER = """<!doctype html>
<html><head><title>vghier</title></head>
<body><h1>vghier service</h1>
<p>No UI bundle found. API lives under <code>/api/graphics</code>.</p>
</body></html>
"""


def _default_frontend_dir() -> Optional[Path]:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def create_app(
    corpus: CorpusIndex,
    model_spec: str = "heuristic",
    frontend_dir: Optional[Path] = None,
) -> FastAPI:
    app = FastAPI(title="vghier", docs_url=None, redoc_url=None)

    if model_spec in ("heuristic", "oracle"):
        fingerprint = model_spec
        learned: Optional[LocationModel] = None
    else:
        data = Path(model_spec).read_bytes()
        fingerprint = hashlib.sha256(data).hexdigest()
        learned = import_model(data)

    lock = threading.Lock()
    doc_cache: dict[str, tuple[str, VectorDocument]] = {}
    tree_cache: dict[tuple[str, str, bool], GroupTree] = {}
    key_locks: dict[tuple[str, str, bool], threading.Lock] = {}
    uploads: dict[str, tuple[str, VectorDocument]] = {}

    def _all_ids() -> list[str]:
        with lock:
            extra = list(uploads)
        return sorted(set(corpus.ids) | set(extra))

    def _load(gid: str) -> tuple[str, VectorDocument]:
        with lock:
            if gid in uploads:
                return uploads[gid]
            cached = doc_cache.get(gid)
        if cached is not None:
            return cached
        if gid not in corpus.ids:
            raise HTTPException(status_code=404, detail=f"unknown graphic {gid!r}")
        entry = corpus.get(gid)
        text = Path(entry.svg_path).read_text(encoding="utf-8")
        doc = parse_document(text, source_id=gid)
        with lock:
            doc_cache[gid] = (text, doc)
        return text, doc

    def _ground_truth(gid: str) -> Optional[GroupTree]:
        with lock:
            if gid in uploads:
                return None
        if gid in corpus.ids:
            return corpus.load_tree(gid)
        return None

    def _model_for(gid: str, doc: VectorDocument) -> AffinityModel:
        if learned is not None:
            return learned
        if fingerprint == "heuristic":
            return heuristic_affinity(doc)
        gt = _ground_truth(gid)
        if gt is None:
            raise HTTPException(
                status_code=409,
                detail=f"graphic {gid!r} has no ground truth for the oracle model",
            )
        return oracle_affinity(gt)

    def _tree_for(gid: str, containment: bool) -> GroupTree:
        key = (gid, fingerprint, containment)
        with lock:
            tree = tree_cache.get(key)
            if tree is not None:
                return tree
            key_lock = key_locks.setdefault(key, threading.Lock())
        with key_lock:
            with lock:
                tree = tree_cache.get(key)
            if tree is not None:
                return tree
            _, doc = _load(gid)
            model = _model_for(gid, doc)
            if containment:
                tree = containment_guided_tree(model, doc)
            else:
                tree = greedy_tree(model, doc)
            with lock:
                tree_cache[key] = tree
            return tree

    # -- API routes ---------------------------------------------------------

    @app.get("/api/graphics")
    def list_graphics() -> list[str]:
        return _all_ids()

    @app.post("/api/graphics")
    async def upload_graphic(file: UploadFile = File(...)) -> dict:
        data = await file.read()
        try:
            text = data.decode("utf-8")
            doc = parse_document(text, source_id="upload")
        except (UnicodeDecodeError, VghierError) as exc:
            raise HTTPException(status_code=400, detail=f"bad svg upload: {exc}")
        gid = "up-" + hashlib.sha256(data).hexdigest()[:12]
        with lock:
            uploads[gid] = (text, doc)
        return {"id": gid}

    @app.get("/api/graphics/{gid}/svg")
    def get_svg(gid: str) -> Response:
        text, _ = _load(gid)
        return Response(content=text, media_type="image/svg+xml")

    @app.get("/api/graphics/{gid}/doc")
    def get_doc(gid: str) -> Response:
        _, doc = _load(gid)
        return Response(content=doc_to_json(doc), media_type="application/json")

    @app.get("/api/graphics/{gid}/tree")
    def get_tree(gid: str, containment: bool = False) -> Response:
        tree = _tree_for(gid, containment)
        return Response(content=tree.to_json(), media_type="application/json")

    @app.get("/api/graphics/{gid}/suggest")
    def get_suggest(gid: str, paths: str, k: int = 3) -> list[int]:
        tree = _tree_for(gid, containment=False)
        try:
            touched = [int(tok) for tok in paths.split(",") if tok.strip() != ""]
        except ValueError:
            raise HTTPException(status_code=400, detail=f"bad paths list {paths!r}")
        try:
            return scribble_suggest(tree, touched, k=k)
        except (VghierError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    # -- static UI ----------------------------------------------------------

    dist = frontend_dir if frontend_dir is not None else _default_frontend_dir()
    if dist is not None and (dist / "index.html").is_file():
        app.mount("/", StaticFiles(directory=str(dist), html=True), name="ui")
    else:

        @app.get("/", include_in_schema=False)
        def index() -> HTMLResponse:
            return HTMLResponse(_PLACEHOLDER)

    return app
