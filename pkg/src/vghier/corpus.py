"""Corpus directory handling: `<root>/<id>/graphic.svg` (+ `tree.json`)."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .doc import VectorDocument
from .errors import MalformedInput
from .parse import document_to_svg, parse_document
from .tree import GroupTree


@dataclass
class CorpusEntry:
    id: str
    svg_path: Path
    tree_path: Optional[Path] = None


@dataclass
class CorpusIndex:
    root: Path
    entries: list[CorpusEntry] = field(default_factory=list)

    @classmethod
    def load(cls, root: str | Path) -> "CorpusIndex":
        root = Path(root)
        if not root.is_dir():
            raise MalformedInput(f"corpus directory {root} does not exist")
        entries = []
        for sub in sorted(p for p in root.iterdir() if p.is_dir()):
            svg = sub / "graphic.svg"
            if not svg.is_file():
                continue
            tree = sub / "tree.json"
            entries.append(
                CorpusEntry(
                    id=sub.name,
                    svg_path=svg,
                    tree_path=tree if tree.is_file() else None,
                )
            )
        return cls(root=root, entries=entries)

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def get(self, graphic_id: str) -> Optional[CorpusEntry]:
        for e in self.entries:
            if e.id == graphic_id:
                return e
        return None

    def load_doc(self, graphic_id: str) -> VectorDocument:
        entry = self.get(graphic_id)
        if entry is None:
            raise KeyError(graphic_id)
        return parse_document(
            entry.svg_path.read_text(encoding="utf-8"), source_id=graphic_id
        )

    def load_tree(self, graphic_id: str) -> Optional[GroupTree]:
        entry = self.get(graphic_id)
        if entry is None:
            raise KeyError(graphic_id)
        if entry.tree_path is None:
            return None
        return GroupTree.from_json(entry.tree_path.read_text(encoding="utf-8"))

    def add_entry(
        self, graphic_id: str, doc: VectorDocument, tree: Optional[GroupTree] = None
    ) -> CorpusEntry:
        """Write a graphic (and optional tree) into the corpus layout."""
        entry = write_entry(self.root, graphic_id, doc, tree)
        existing = self.get(graphic_id)
        if existing is None:
            self.entries.append(entry)
            self.entries.sort(key=lambda e: e.id)
        else:
            existing.svg_path = entry.svg_path
            existing.tree_path = entry.tree_path
            entry = existing
        return entry


def write_entry(
    root: str | Path,
    graphic_id: str,
    doc: VectorDocument,
    tree: Optional[GroupTree] = None,
) -> CorpusEntry:
    sub = Path(root) / graphic_id
    sub.mkdir(parents=True, exist_ok=True)
    svg = sub / "graphic.svg"
    svg.write_text(document_to_svg(doc), encoding="utf-8")
    tree_path = None
    if tree is not None:
        tree_path = sub / "tree.json"
        tree_path.write_text(tree.to_json(), encoding="utf-8")
    return CorpusEntry(id=graphic_id, svg_path=svg, tree_path=tree_path)


def load_dataset(
    index: CorpusIndex, require_tree: bool = True
) -> list[tuple[str, VectorDocument, Optional[GroupTree]]]:
    """Load (id, doc, tree) triples; optionally keep only entries with trees."""
    out = []
    for entry in index.entries:
        if require_tree and entry.tree_path is None:
            continue
        doc = index.load_doc(entry.id)
        tree = index.load_tree(entry.id)
        out.append((entry.id, doc, tree))
    return out
