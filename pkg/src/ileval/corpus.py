"""Benchmark data model: samples, corpus I/O, and prompt construction.

A corpus is a JSON Lines file, one record per line:

    {"id": str, "query": str,
     "documents": [{"doc_index": int, "text": str,
                    "images": [{"index": int, "locator": str, "width_px": int?}]}],
     "ground_truth": str, "category": str?}

Image indices are global within a sample: numbered across documents in
document order, then within-document order, contiguously from 1 to N. The
ground-truth markdown references them as IMG#k placeholders.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import InvariantError, IOFailure, SchemaError, TemplateError
from .parsing import QUERY_CATEGORIES

MAX_DOCUMENTS = 3

_IMG_INDEX_RE = re.compile(r"IMG#(\d+)")
_QUERY_SLOT = "{{query}}"
_DOC_TEXT_SLOT = "{{doc_text}}"
_DOC_IMAGES_SLOT = "{{doc_images}}"
_DOC_BLOCK_RE = re.compile(r"\{\{#docs\}\}(.*?)\{\{/docs\}\}", re.DOTALL)
_SLOT_RE = re.compile(r"\{\{[#/]?[a-z_]+\}\}")


@dataclass
class ImageAsset:
    """One retrieved image, addressed by its sample-global 1-based index."""

    index: int
    locator: str
    width_px: int | None = None


@dataclass
class RetrievedDocument:
    doc_index: int
    text: str
    images: list[ImageAsset] = field(default_factory=list)


@dataclass
class EvalSample:
    """One benchmark record: query, retrieved documents, reference answer."""

    id: str
    query: str
    documents: list[RetrievedDocument]
    ground_truth: str
    category: str | None = None

    @property
    def image_count(self) -> int:
        return sum(len(doc.images) for doc in self.documents)

    def assets(self) -> dict[int, ImageAsset]:
        return {img.index: img for doc in self.documents for img in doc.images}


@dataclass
class PromptTemplate:
    """Generation prompt with a query slot and a per-document repeat block."""

    body: str

    @classmethod
    def from_file(cls, path: str | Path) -> PromptTemplate:
        try:
            return cls(body=Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IOFailure(f"cannot read template {path}: {exc}") from exc

    @classmethod
    def default(cls) -> PromptTemplate:
        body = (
            resources.files("ileval").joinpath("data/prompt_template.txt")
        ).read_text(encoding="utf-8")
        return cls(body=body)


def validate_sample(sample: EvalSample) -> list[str]:
    """Check every domain invariant; returns violations (empty iff valid)."""
    violations: list[str] = []
    if len(sample.documents) > MAX_DOCUMENTS:
        violations.append(
            f"document limit exceeded: {len(sample.documents)} documents"
            f" (maximum {MAX_DOCUMENTS})"
        )
    for doc in sample.documents:
        if doc.doc_index < 1:
            violations.append(f"document index must be >= 1, got {doc.doc_index}")
        if not doc.text:
            violations.append(f"document {doc.doc_index} has empty text")

    indices: list[int] = []
    for doc in sample.documents:
        for img in doc.images:
            indices.append(img.index)
            if not img.locator:
                violations.append(f"image {img.index} has an empty locator")
            if img.width_px is not None and img.width_px < 1:
                violations.append(
                    f"image {img.index} has non-positive width {img.width_px}"
                )
    seen: set[int] = set()
    for idx in indices:
        if idx in seen:
            violations.append(f"duplicate image index {idx}")
        seen.add(idx)
    if not indices:
        violations.append("sample has no images")
    elif indices != list(range(1, len(indices) + 1)):
        if len(seen) == len(indices):
            violations.append(
                f"image indices not contiguous from 1 in document order: {indices}"
            )

    total = len(indices)
    for match in _IMG_INDEX_RE.finditer(sample.ground_truth):
        k = int(match.group(1))
        if not 1 <= k <= total:
            violations.append(
                f"ground truth references IMG#{k} but the sample has {total} images"
            )
    if sample.category is not None and sample.category not in QUERY_CATEGORIES:
        violations.append(f"unknown category {sample.category!r}")
    return violations


def _parse_record(record: dict, line_no: int) -> EvalSample:
    def expect(value, kind, name):
        if not isinstance(value, kind):
            raise SchemaError(f"field {name!r} must be {kind.__name__}", line_no)
        return value

    documents = []
    for doc in expect(record.get("documents"), list, "documents"):
        expect(doc, dict, "documents[]")
        images = []
        for img in expect(doc.get("images"), list, "images"):
            expect(img, dict, "images[]")
            width = img.get("width_px")
            if width is not None and not isinstance(width, int):
                raise SchemaError("field 'width_px' must be int", line_no)
            images.append(
                ImageAsset(
                    index=expect(img.get("index"), int, "index"),
                    locator=expect(img.get("locator"), str, "locator"),
                    width_px=width,
                )
            )
        documents.append(
            RetrievedDocument(
                doc_index=expect(doc.get("doc_index"), int, "doc_index"),
                text=expect(doc.get("text"), str, "text"),
                images=images,
            )
        )
    category = record.get("category")
    if category is not None and not isinstance(category, str):
        raise SchemaError("field 'category' must be str", line_no)
    return EvalSample(
        id=expect(record.get("id"), str, "id"),
        query=expect(record.get("query"), str, "query"),
        documents=documents,
        ground_truth=expect(record.get("ground_truth"), str, "ground_truth"),
        category=category,
    )


def load_corpus(path: str | Path, format: str = "jsonl") -> list[EvalSample]:
    """Load and validate a corpus file; samples come back in file order."""
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read corpus {path}: {exc}") from exc

    samples: list[EvalSample] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
        if not isinstance(record, dict):
            raise SchemaError("record must be a JSON object", line_no)
        sample = _parse_record(record, line_no)
        violations = validate_sample(sample)
        if violations:
            raise InvariantError("; ".join(violations), sample_id=sample.id)
        if sample.id in seen_ids:
            raise InvariantError("duplicate sample id", sample_id=sample.id)
        seen_ids.add(sample.id)
        samples.append(sample)
    return samples


def write_corpus(samples: list[EvalSample], path: str | Path) -> None:
    """Write samples as canonical JSONL (inverse of ``load_corpus``)."""
    lines = []
    for sample in samples:
        record = {
            "id": sample.id,
            "query": sample.query,
            "documents": [
                {
                    "doc_index": doc.doc_index,
                    "text": doc.text,
                    "images": [
                        {"index": img.index, "locator": img.locator}
                        | ({"width_px": img.width_px} if img.width_px is not None else {})
                        for img in doc.images
                    ],
                }
                for doc in sample.documents
            ],
            "ground_truth": sample.ground_truth,
        }
        if sample.category is not None:
            record["category"] = sample.category
        lines.append(json.dumps(record, ensure_ascii=False))
    try:
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot write corpus {path}: {exc}") from exc


def build_prompt(sample: EvalSample, template: PromptTemplate | None = None) -> str:
    """Render the generation prompt for a sample.

    The per-document block is repeated once per retrieved document with
    ``{{doc_text}}`` replaced by the DOC#n-labelled text and
    ``{{doc_images}}`` by the document's IMG#k tokens in ascending order.
    """
    template = template or PromptTemplate.default()
    body = template.body
    block = _DOC_BLOCK_RE.search(body)
    if _QUERY_SLOT not in body:
        raise TemplateError("template is missing the {{query}} slot")
    if block is None:
        raise TemplateError("template is missing the {{#docs}}...{{/docs}} block")
    if _DOC_TEXT_SLOT not in block.group(1) or _DOC_IMAGES_SLOT not in block.group(1):
        raise TemplateError(
            "per-document block must contain {{doc_text}} and {{doc_images}}"
        )
    # Validate markers on the template itself, not the rendered output, so
    # literal braces in queries or documents cannot be mistaken for slots.
    outside = body[: block.start()] + body[block.end() :]
    for marker in _SLOT_RE.findall(outside):
        if marker != _QUERY_SLOT:
            raise TemplateError(f"unknown slot marker {marker} outside the docs block")
    for marker in _SLOT_RE.findall(block.group(1)):
        if marker not in (_DOC_TEXT_SLOT, _DOC_IMAGES_SLOT):
            raise TemplateError(f"unknown slot marker {marker} in the docs block")

    rendered_docs = []
    for doc in sample.documents:
        image_list = ", ".join(
            f"IMG#{img.index}" for img in sorted(doc.images, key=lambda i: i.index)
        )
        rendered_docs.append(
            block.group(1)
            .replace(_DOC_TEXT_SLOT, f"DOC#{doc.doc_index}\n{doc.text}")
            .replace(_DOC_IMAGES_SLOT, f"[{image_list}]")
        )
    prompt = body[: block.start()] + "".join(rendered_docs) + body[block.end() :]
    return prompt.replace(_QUERY_SLOT, sample.query)
