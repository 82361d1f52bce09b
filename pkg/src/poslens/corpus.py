"""Two-group corpus ingestion: JSONL, eRisk subject XML and CoNLL-U."""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .tags import UPOS_TAGS, TaggedToken, analyze_morphology

__all__ = [
    "Label",
    "Document",
    "Corpus",
    "TaggedDocument",
    "load_jsonl",
    "save_jsonl",
    "load_erisk_xml",
    "load_conllu",
    "save_conllu",
]

logger = logging.getLogger(__name__)


class Label(Enum):
    TARGET = "target"
    CONTROL = "control"

    @classmethod
    def from_string(cls, value: str) -> "Label":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown label: {value!r}") from None


@dataclass(frozen=True)
class Document:
    """One post: a user, a group label and the text itself."""

    user_id: str
    label: Label
    body: str
    title: Optional[str] = None
    timestamp: Optional[str] = None

    def __post_init__(self):
        if not self.user_id:
            raise ValueError("document user_id must be non-empty")

    @property
    def text(self) -> str:
        """Title and body joined into the single unit fed to tagging."""
        if self.title:
            return self.title + "\n" + self.body
        return self.body


class Corpus:
    """Immutable ordered collection of documents with per-label tallies."""

    def __init__(self, documents: Iterable[Document]):
        self.documents: tuple[Document, ...] = tuple(documents)
        seen: dict[str, Label] = {}
        for doc in self.documents:
            prev = seen.setdefault(doc.user_id, doc.label)
            if prev is not doc.label:
                raise ValueError(
                    f"user {doc.user_id!r} appears in both label groups"
                )
        self._user_labels = seen

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self.documents == other.documents

    def doc_counts(self) -> dict[Label, int]:
        counts = {label: 0 for label in Label}
        for doc in self.documents:
            counts[doc.label] += 1
        return counts

    def user_counts(self) -> dict[Label, int]:
        counts = {label: 0 for label in Label}
        for label in self._user_labels.values():
            counts[label] += 1
        return counts

    def merge(self, other: "Corpus") -> "Corpus":
        return Corpus(self.documents + other.documents)


@dataclass
class TaggedDocument:
    """A document after tagging, with sentence structure preserved."""

    user_id: str
    label: Label
    sentences: list[list[TaggedToken]] = field(default_factory=list)

    def tokens(self) -> list[TaggedToken]:
        return [tok for sent in self.sentences for tok in sent]


def load_jsonl(path) -> Corpus:
    """Load the line-delimited generic format (one JSON document per line)."""
    path = Path(path)
    documents = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: malformed record: {exc}") from None
            if not isinstance(record, dict):
                raise ValueError(f"{path}:{lineno}: record is not an object")
            try:
                user_id = record["user_id"]
                label = Label.from_string(record["label"])
                body = record["text"]
            except KeyError as exc:
                raise ValueError(f"{path}:{lineno}: missing field {exc}") from None
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            documents.append(
                Document(
                    user_id=user_id,
                    label=label,
                    body=body,
                    title=record.get("title"),
                    timestamp=record.get("date"),
                )
            )
    return Corpus(documents)


def save_jsonl(corpus: Corpus, path) -> None:
    """Write the generic format; loading it back reproduces the corpus."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus:
            record = {"user_id": doc.user_id, "label": doc.label.value, "text": doc.body}
            if doc.title is not None:
                record["title"] = doc.title
            if doc.timestamp is not None:
                record["date"] = doc.timestamp
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_erisk_xml(directory, label: Label) -> Corpus:
    """Load a directory of eRisk subject XML files as one label group.

    Each file holds an INDIVIDUAL element with an ID child and one
    WRITING element per post (TITLE/DATE/TEXT children).  Writings with
    no TEXT child are skipped with a warning.
    """
    directory = Path(directory)
    documents = []
    for xml_path in sorted(directory.glob("*.xml")):
        try:
            root = ET.parse(xml_path).getroot()
        except ET.ParseError as exc:
            raise ValueError(f"unparseable XML file {xml_path}: {exc}") from None
        id_node = root.find("ID")
        if id_node is None or not (id_node.text or "").strip():
            raise ValueError(f"missing ID element in {xml_path}")
        user_id = id_node.text.strip()
        for writing in root.findall("WRITING"):
            text_node = writing.find("TEXT")
            if text_node is None:
                logger.warning("skipping WRITING without TEXT in %s", xml_path)
                continue
            title_node = writing.find("TITLE")
            date_node = writing.find("DATE")
            title = (title_node.text or "").strip() if title_node is not None else None
            date = (date_node.text or "").strip() if date_node is not None else None
            documents.append(
                Document(
                    user_id=user_id,
                    label=label,
                    body=(text_node.text or "").strip(),
                    title=title or None,
                    timestamp=date or None,
                )
            )
    return Corpus(documents)


def load_conllu(
    path,
    label: Optional[Label] = None,
    user_id: Optional[str] = None,
    strict_md_adjacency: bool = False,
) -> list[TaggedDocument]:
    """Load pre-tagged documents from a CoNLL-U file.

    Form, UPOS and the language-specific (PTB) tag are taken from columns
    2, 4 and 5; tense and pronoun morphology are recomputed from the PTB
    tags so externally tagged input matches the internal tagger's output.
    `# newdoc` comments separate documents and may carry `id = ...`;
    a `# label = ...` comment sets the group of the current document.
    """
    path = Path(path)
    documents: list[TaggedDocument] = []
    current: Optional[TaggedDocument] = None
    forms: list[str] = []
    upos_tags: list[str] = []
    ptb_tags: list[str] = []
    lemmas: list[Optional[str]] = []

    def ensure_doc() -> TaggedDocument:
        nonlocal current
        if current is None:
            current = _new_doc(user_id, label, path)
            documents.append(current)
        return current

    def flush_sentence():
        nonlocal forms, upos_tags, ptb_tags, lemmas
        if forms:
            ensure_doc().sentences.append(
                analyze_morphology(
                    forms,
                    ptb_tags,
                    strict_md_adjacency=strict_md_adjacency,
                    lemmas=lemmas,
                    upos_tags=upos_tags,
                )
            )
        forms, upos_tags, ptb_tags, lemmas = [], [], [], []

    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.startswith("#"):
                comment = line[1:].strip()
                if comment == "newdoc" or comment.startswith("newdoc "):
                    flush_sentence()
                    doc_id = user_id
                    if "=" in comment:
                        doc_id = comment.split("=", 1)[1].strip() or user_id
                    current = _new_doc(doc_id, label, path)
                    documents.append(current)
                elif comment.startswith("label"):
                    value = comment.split("=", 1)[1].strip() if "=" in comment else ""
                    ensure_doc().label = Label.from_string(value)
                continue
            if not line.strip():
                flush_sentence()
                continue
            columns = line.split("\t")
            if len(columns) != 10:
                raise ValueError(
                    f"{path}:{lineno}: expected 10 tab-separated columns, got {len(columns)}"
                )
            token_id = columns[0]
            if "-" in token_id or "." in token_id:
                continue  # multiword ranges and empty nodes carry no tag of their own
            upos = columns[3]
            if upos not in UPOS_TAGS:
                raise ValueError(f"{path}:{lineno}: unknown UPOS value: {upos!r}")
            forms.append(columns[1])
            upos_tags.append(upos)
            ptb_tags.append(columns[4])
            lemmas.append(None if columns[2] == "_" else columns[2])
    flush_sentence()
    return documents


def _new_doc(user_id: Optional[str], label: Optional[Label], path: Path) -> TaggedDocument:
    if label is None:
        # Placeholder until a `# label` comment arrives; validated by users
        # of the tagged corpus that require labels.
        label = Label.CONTROL
    return TaggedDocument(user_id=user_id or path.stem, label=label)


_FEATS_ORDER = ("Number", "Person", "Tense")


def _feats_string(token: TaggedToken) -> str:
    feats = {}
    if token.tense is not None:
        feats["Tense"] = {"past": "Past", "present": "Pres", "future": "Fut"}[
            token.tense.value
        ]
    if token.person is not None:
        feats["Person"] = {"first": "1", "second": "2", "third": "3"}[token.person.value]
    if token.number is not None:
        feats["Number"] = {"singular": "Sing", "plural": "Plur"}[token.number.value]
    if not feats:
        return "_"
    return "|".join(f"{k}={feats[k]}" for k in _FEATS_ORDER if k in feats)


def save_conllu(documents: Iterable[TaggedDocument], path) -> None:
    """Write tagged documents in the CoNLL-U-compatible tagged format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(f"# newdoc id = {doc.user_id}\n")
            fh.write(f"# label = {doc.label.value}\n")
            for sentence in doc.sentences:
                for i, token in enumerate(sentence, start=1):
                    lemma = token.lemma if token.lemma else "_"
                    fh.write(
                        "\t".join(
                            (
                                str(i),
                                token.form,
                                lemma,
                                token.upos,
                                token.ptb,
                                _feats_string(token),
                                "_",
                                "_",
                                "_",
                                "_",
                            )
                        )
                        + "\n"
                    )
                fh.write("\n")
