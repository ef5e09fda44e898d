"""Command-line entry points: infer, train, eval, synth, augment, serve, verify."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from .affinity import (
    AffinityModel,
    heuristic_affinity,
    import_model,
    oracle_affinity,
)
from .augment import AugmentConfig, _augment_pair
from .corpus import CorpusIndex, load_dataset, write_entry
from .doc import VectorDocument
from .errors import FormatError, InvalidSpec, VghierError
from .infer import containment_graph, containment_guided_tree, greedy_tree
from .metrics import cted, fmi, mean_node_overlap
from .parse import parse_document
from .synth import SynthSpec, synth_generate
from .train import TrainConfig, train
from .tree import GroupTree, validate

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_MODEL = 3
EXIT_WRITE = 4


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _read_svg(path: str) -> VectorDocument:
    text = Path(path).read_text(encoding="utf-8")
    return parse_document(text, source_id=Path(path).stem)


def _resolve_model(
    spec: str, doc: VectorDocument, gt: Optional[GroupTree]
) -> AffinityModel:
    """Model argument: 'heuristic', 'oracle', or a model file path."""
    if spec == "heuristic":
        return heuristic_affinity(doc)
    if spec == "oracle":
        if gt is None:
            raise FormatError("oracle model needs a ground-truth tree.json")
        return oracle_affinity(gt)
    return import_model(Path(spec).read_bytes())


# ---------------------------------------------------------------------------
# infer


def cmd_infer(args: argparse.Namespace) -> int:
    try:
        doc = _read_svg(args.svg)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_PARSE, f"cannot parse {args.svg}: {exc}")
    gt = None
    sibling = Path(args.svg).parent / "tree.json"
    if args.model == "oracle" and sibling.is_file():
        gt = GroupTree.from_json(sibling.read_text(encoding="utf-8"))
    try:
        model = _resolve_model(args.model, doc, gt)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_MODEL, f"cannot load model {args.model!r}: {exc}")
    start = time.perf_counter()
    if args.containment:
        tree = containment_guided_tree(model, doc)
    else:
        tree = greedy_tree(model, doc)
    elapsed = time.perf_counter() - start
    try:
        Path(args.out).write_text(tree.to_json(), encoding="utf-8")
    except OSError as exc:
        return _fail(EXIT_WRITE, f"cannot write {args.out}: {exc}")
    print(f"nodes={tree.n_nodes} paths={doc.n_paths} time={elapsed:.3f}s")
    return EXIT_OK


# ---------------------------------------------------------------------------
# train


def _load_json_file(path: str) -> dict:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(obj, dict):
        raise ValueError(f"{path} must hold a JSON object")
    return obj


def cmd_train(args: argparse.Namespace) -> int:
    try:
        index = CorpusIndex.load(args.corpus)
        triples = load_dataset(index, require_tree=True)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_ERROR, f"cannot load corpus {args.corpus}: {exc}")
    if not triples:
        return _fail(EXIT_ERROR, f"corpus {args.corpus} has no (svg, tree) pairs")
    try:
        cfg_obj = _load_json_file(args.config) if args.config else {}
        augment = cfg_obj.pop("augment", False)
        cfg = TrainConfig.from_dict(cfg_obj)
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.validate()
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail(EXIT_ERROR, f"invalid config: {exc}")
    dataset = [(doc, tree) for _, doc, tree in triples]
    augmenter = None
    if augment:
        from .augment import make_augmenter

        aug_cfg = AugmentConfig.from_dict(augment) if isinstance(augment, dict) else AugmentConfig()
        augmenter = make_augmenter(dataset, aug_cfg)
    try:
        result = train(dataset, cfg, augmenter=augmenter)
    except VghierError as exc:
        return _fail(EXIT_ERROR, f"training failed: {exc}")
    from .affinity import export_model

    try:
        Path(args.out).write_bytes(export_model(result.model))
        history_path = Path(str(args.out) + ".history.csv")
        with history_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_loss", "val_loss", "lr"])
            for row in result.history:
                writer.writerow(
                    [row["epoch"], repr(row["train_loss"]), repr(row["val_loss"]),
                     repr(row["lr"])]
                )
    except OSError as exc:
        return _fail(EXIT_WRITE, f"cannot write outputs: {exc}")
    print(
        f"trained {cfg.epochs} epochs on {len(dataset)} graphics; "
        f"best epoch {result.best_epoch}; model -> {args.out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        index = CorpusIndex.load(args.corpus)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_ERROR, f"cannot load corpus {args.corpus}: {exc}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        return _fail(EXIT_ERROR, "no methods given")
    loaded_models = {}
    for m in methods:
        if m not in ("heuristic", "oracle"):
            try:
                loaded_models[m] = import_model(Path(m).read_bytes())
            except (OSError, VghierError) as exc:
                return _fail(EXIT_MODEL, f"cannot load model {m!r}: {exc}")

    rows = []
    sums: dict[str, np.ndarray] = {m: np.zeros(5) for m in methods}
    counts: dict[str, int] = {m: 0 for m in methods}
    for entry in index.entries:
        if entry.tree_path is None:
            print(f"warning: {entry.id} has no ground truth, skipped", file=sys.stderr)
            continue
        doc = index.load_doc(entry.id)
        gt = index.load_tree(entry.id)
        assert gt is not None
        for m in methods:
            if m == "heuristic":
                model: AffinityModel = heuristic_affinity(doc)
            elif m == "oracle":
                model = oracle_affinity(gt)
            else:
                model = loaded_models[m]
            tree = greedy_tree(model, doc)
            vals = np.array(
                [
                    cted(tree, gt),
                    fmi(tree, gt, 1),
                    fmi(tree, gt, 2),
                    fmi(tree, gt, 3),
                    mean_node_overlap(gt, tree),
                ]
            )
            rows.append([entry.id, m] + [f"{v:.4f}" for v in vals])
            sums[m] += vals
            counts[m] += 1

    for m in methods:
        if counts[m]:
            means = sums[m] / counts[m]
            rows.append(["mean", m] + [f"{v:.4f}" for v in means])
    try:
        with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["graphic_id", "method", "cted", "fmi_d1", "fmi_d2", "fmi_d3",
                 "mean_node_overlap"]
            )
            writer.writerows(rows)
    except OSError as exc:
        return _fail(EXIT_WRITE, f"cannot write {args.out}: {exc}")
    print(f"evaluated {max(counts.values(), default=0)} graphics x {len(methods)} methods -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth / augment


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        obj = _load_json_file(args.spec) if args.spec else {}
        count = int(obj.pop("count", 10))
        spec = SynthSpec.from_dict(obj)
        if count < 1:
            raise InvalidSpec("count must be >= 1")
    except (OSError, ValueError, json.JSONDecodeError, VghierError) as exc:
        return _fail(EXIT_ERROR, f"invalid spec: {exc}")
    out = Path(args.out)
    try:
        for i in range(count):
            doc, tree = synth_generate(args.seed + i, spec)
            write_entry(out, f"{i:04d}", doc, tree)
    except OSError as exc:
        return _fail(EXIT_WRITE, f"cannot write corpus: {exc}")
    print(f"wrote {count} synthetic graphics -> {out}")
    return EXIT_OK


def cmd_augment(args: argparse.Namespace) -> int:
    try:
        index = CorpusIndex.load(args.corpus)
        triples = load_dataset(index, require_tree=True)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_ERROR, f"cannot load corpus {args.corpus}: {exc}")
    if not triples:
        return _fail(EXIT_ERROR, f"corpus {args.corpus} has no (svg, tree) pairs")
    try:
        cfg_obj = _load_json_file(args.config) if args.config else {}
        cfg = AugmentConfig.from_dict(cfg_obj)
        cfg.validate()
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail(EXIT_ERROR, f"invalid config: {exc}")
    dataset = [(doc, tree) for _, doc, tree in triples]
    out = Path(args.out)
    try:
        for i, (gid, doc, tree) in enumerate(triples):
            rng = np.random.default_rng(np.random.SeedSequence((args.seed, i)))
            adoc, atree = _augment_pair(doc, tree, rng, cfg, dataset)
            write_entry(out, gid, adoc, atree)
    except OSError as exc:
        return _fail(EXIT_WRITE, f"cannot write corpus: {exc}")
    print(f"augmented {len(triples)} graphics -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve / verify


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        index = CorpusIndex.load(args.corpus)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_ERROR, f"cannot load corpus {args.corpus}: {exc}")
    app = create_app(index, model_spec=args.model)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="info")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        doc = _read_svg(args.svg)
    except (OSError, VghierError) as exc:
        return _fail(EXIT_PARSE, f"cannot parse {args.svg}: {exc}")
    try:
        tree = GroupTree.from_json(Path(args.tree).read_text(encoding="utf-8"))
    except (OSError, VghierError) as exc:
        return _fail(EXIT_ERROR, f"cannot load tree: {exc}")
    report = validate(tree, doc.n_paths)
    if report is not None:
        return _fail(EXIT_ERROR, f"tree invalid: {report}")
    graph = None
    if args.containment:
        from .infer import ContainmentGraph

        graph = ContainmentGraph.from_json(
            Path(args.containment).read_text(encoding="utf-8")
        )
    else:
        graph = containment_graph(doc)
    bad = []
    for p, q in sorted(graph.parent_of.items()):
        anchor = tree.parent(tree.leaf_for_path(q))
        if anchor is None or p not in tree.leaves_of(anchor):
            bad.append((q, p))
    if bad:
        return _fail(
            EXIT_ERROR,
            f"{len(bad)} containment edge(s) not realized as ancestry: {bad[:5]}",
        )
    print(f"ok: tree valid, {graph.n_edges} containment edge(s) realized")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vghier",
        description="Hierarchical grouping toolkit for vector graphics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer a grouping tree for one SVG")
    p.add_argument("svg")
    p.add_argument("--model", default="heuristic",
                   help="model file path, 'heuristic', or 'oracle'")
    p.add_argument("--containment", action="store_true",
                   help="containment-guided inference")
    p.add_argument("--out", required=True, help="output tree.json path")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("train", help="train the location model on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", default=None, help="TrainConfig JSON file")
    p.add_argument("--out", required=True, help="output model file")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate methods against ground truth")
    p.add_argument("--corpus", required=True)
    p.add_argument("--methods", default="heuristic",
                   help="comma list: heuristic, oracle, or model paths")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--spec", default=None, help="SynthSpec JSON file (+count)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output corpus dir")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("augment", help="write one augmented copy per graphic")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", default=None, help="AugmentConfig JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output corpus dir")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("serve", help="serve graphics + trees over HTTP")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", default="heuristic")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("verify", help="check a tree against an SVG + containment")
    p.add_argument("svg")
    p.add_argument("tree")
    p.add_argument("--containment", default=None,
                   help="containment.json (recomputed from the SVG if omitted)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
