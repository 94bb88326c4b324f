"""Gold-annotation and prediction I/O.

Three file formats live here:

* BRAT standoff (.txt + .ann): T-lines carry toponym or expression spans,
  A-lines carry the modifier_type / non_locational attributes, N-lines
  carry gazetteer links ("Geonames:<id>") or explicit coordinates
  ("Coordinates:<lat>,<lon>"). Offsets are Unicode code-point offsets.
* The prediction interchange format: one record per line, seven
  tab-separated fields (doc_id, start, end, surface, label, lat, lon),
  designed so external taggers/geocoders can append-stream it.
* The exclusion policy that reduces gold annotations to the geocodable
  subset: non-locational types without coordinates go, and so does
  anything without a usable gazetteer link (facilities, street names).
"""

from __future__ import annotations

import dataclasses
import logging
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, TextIO

from .gazetteer import GazetteerIndex
from .geodesy import Coordinate
from .taxonomy import NON_LOCATIONAL_TYPES, TaxonomyType

log = logging.getLogger(__name__)

MODIFIER_VALUES = ("Adjective", "Noun")

EXCLUDED_NON_LOCATIONAL = "non-locational type"
EXCLUDED_NOT_IN_GAZETTEER = "not in gazetteer"

# Annotated coordinates may disagree with the linked gazetteer entry by at
# most this much (degrees) before we warn.
COORD_AGREEMENT_DEG = 0.01


class BratParseError(ValueError):
    """A .ann file violates the expected standoff grammar."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


class ExpressionKind(Enum):
    LITERAL = "LiteralExpression"
    ASSOCIATIVE = "AssociativeExpression"


class ExpressionRole(Enum):
    CONTEXT = "Context"
    HEAD = "Head"


@dataclass(frozen=True)
class ToponymAnnotation:
    """One gold toponym span with its taxonomy type and link data."""

    start: int
    end: int
    surface: str
    toponym_type: TaxonomyType
    modifier_type: Optional[str] = None
    non_locational: Optional[bool] = None
    gazetteer_id: Optional[int] = None
    coord: Optional[Coordinate] = None

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")
        if self.modifier_type is not None and self.modifier_type not in MODIFIER_VALUES:
            raise ValueError(f"modifier_type must be one of {MODIFIER_VALUES}")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class ExpressionAnnotation:
    """A noun-phrase expression span used for training-data augmentation.

    Each annotated expression contributes a Context record (the sentence
    around the span, kinded by the expression label) and a Head record
    (the span itself, kinded by its non_locational attribute).
    """

    doc_id: str
    start: int
    end: int
    surface: str
    kind: ExpressionKind
    role: ExpressionRole

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class PredictionRecord:
    """A system's extracted span and/or predicted coordinates."""

    doc_id: str
    start: int
    end: int
    surface: str
    predicted_label: Optional[str] = None
    predicted_coord: Optional[Coordinate] = None

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class Document:
    doc_id: str
    text: str
    annotations: list[ToponymAnnotation] = field(default_factory=list)
    expressions: list[ExpressionAnnotation] = field(default_factory=list)


@dataclass
class BratConfig:
    """Names used in the .ann files; override when a corpus differs."""

    modifier_attribute: str = "modifier_type"
    non_locational_attribute: str = "non_locational"
    gazetteer_resource: str = "Geonames"
    coordinate_resource: str = "Coordinates"
    type_labels: dict[str, TaxonomyType] = field(
        default_factory=lambda: {t.value: t for t in TaxonomyType}
    )
    expression_labels: dict[str, ExpressionKind] = field(
        default_factory=lambda: {k.value: k for k in ExpressionKind}
    )


_T_LINE = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_A_LINE = re.compile(r"^(A\d+)\t(\S+) (T\d+)(?: (\S+))?\s*$")
_N_LINE = re.compile(r"^(N\d+)\tReference (T\d+) ([^:\t]+):(\S+)(?:\t(.*))?$")


def load_brat(
    text: str,
    ann: str,
    doc_id: str = "",
    config: Optional[BratConfig] = None,
) -> Document:
    """Parse BRAT standoff content into a Document.

    Raises BratParseError (with the offending line number) on grammar
    violations, bad offsets, surface mismatches and dangling references.
    Relation/event/comment lines are ignored.
    """
    cfg = config or BratConfig()
    spans: dict[str, dict] = {}
    attr_lines: list[tuple[int, str, str, Optional[str]]] = []
    norm_lines: list[tuple[int, str, str, str]] = []

    for line_no, raw in enumerate(ann.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            continue
        kind = line[0]
        if kind == "T":
            m = _T_LINE.match(line)
            if not m:
                raise BratParseError(f"unparseable T-line: {line!r}", line_no)
            tid, label, start_s, end_s, surface = m.groups()
            if tid in spans:
                raise BratParseError(f"duplicate annotation id {tid}", line_no)
            start, end = int(start_s), int(end_s)
            if not (0 <= start < end <= len(text)):
                raise BratParseError(
                    f"{tid}: span ({start}, {end}) outside text of length {len(text)}",
                    line_no,
                )
            if text[start:end] != surface:
                raise BratParseError(
                    f"{tid}: surface {surface!r} does not match text "
                    f"{text[start:end]!r} at ({start}, {end})",
                    line_no,
                )
            if label not in cfg.type_labels and label not in cfg.expression_labels:
                raise BratParseError(f"{tid}: unknown annotation type {label!r}", line_no)
            spans[tid] = {
                "label": label,
                "start": start,
                "end": end,
                "surface": surface,
                "modifier_type": None,
                "non_locational": None,
                "gazetteer_id": None,
                "coord": None,
            }
        elif kind == "A":
            m = _A_LINE.match(line)
            if not m:
                raise BratParseError(f"unparseable A-line: {line!r}", line_no)
            _, attr_name, tid, value = m.groups()
            attr_lines.append((line_no, attr_name, tid, value))
        elif kind == "N":
            m = _N_LINE.match(line)
            if not m:
                raise BratParseError(f"unparseable N-line: {line!r}", line_no)
            _, tid, resource, entry = m.groups()[:4]
            norm_lines.append((line_no, tid, resource, entry))
        elif kind in "REM#*":
            log.debug("%s: ignoring unmodelled line %d: %s", doc_id, line_no, line)
        else:
            raise BratParseError(f"unrecognised line: {line!r}", line_no)

    for line_no, attr_name, tid, value in attr_lines:
        if tid not in spans:
            raise BratParseError(f"attribute references missing span {tid}", line_no)
        record = spans[tid]
        if attr_name == cfg.modifier_attribute:
            if value not in MODIFIER_VALUES:
                raise BratParseError(
                    f"{cfg.modifier_attribute} must be one of {MODIFIER_VALUES}, got {value!r}",
                    line_no,
                )
            record["modifier_type"] = value
        elif attr_name == cfg.non_locational_attribute:
            if value is None or value == "True":
                record["non_locational"] = True
            elif value == "False":
                record["non_locational"] = False
            else:
                raise BratParseError(
                    f"{cfg.non_locational_attribute} must be True or False, got {value!r}",
                    line_no,
                )
        else:
            log.debug("%s: ignoring unknown attribute %r (line %d)", doc_id, attr_name, line_no)

    for line_no, tid, resource, entry in norm_lines:
        if tid not in spans:
            raise BratParseError(f"normalization references missing span {tid}", line_no)
        record = spans[tid]
        if resource == cfg.gazetteer_resource:
            try:
                record["gazetteer_id"] = int(entry)
            except ValueError:
                raise BratParseError(f"bad gazetteer id {entry!r}", line_no) from None
        elif resource == cfg.coordinate_resource:
            try:
                lat_s, lon_s = entry.split(",")
                record["coord"] = Coordinate(float(lat_s), float(lon_s))
            except ValueError as exc:
                raise BratParseError(f"bad coordinate value {entry!r}: {exc}", line_no) from None
        else:
            log.debug("%s: ignoring normalization resource %r (line %d)", doc_id, resource, line_no)

    annotations: list[ToponymAnnotation] = []
    expressions: list[ExpressionAnnotation] = []
    for record in spans.values():
        label = record["label"]
        if label in cfg.type_labels:
            annotations.append(
                ToponymAnnotation(
                    start=record["start"],
                    end=record["end"],
                    surface=record["surface"],
                    toponym_type=cfg.type_labels[label],
                    modifier_type=record["modifier_type"],
                    non_locational=record["non_locational"],
                    gazetteer_id=record["gazetteer_id"],
                    coord=record["coord"],
                )
            )
        else:
            context_kind = cfg.expression_labels[label]
            if record["non_locational"] is None:
                head_kind = context_kind
            else:
                head_kind = (
                    ExpressionKind.ASSOCIATIVE
                    if record["non_locational"]
                    else ExpressionKind.LITERAL
                )
            for role, kind in (
                (ExpressionRole.CONTEXT, context_kind),
                (ExpressionRole.HEAD, head_kind),
            ):
                expressions.append(
                    ExpressionAnnotation(
                        doc_id=doc_id,
                        start=record["start"],
                        end=record["end"],
                        surface=record["surface"],
                        kind=kind,
                        role=role,
                    )
                )

    annotations.sort(key=lambda a: (a.start, a.end))
    expressions.sort(key=lambda e: (e.start, e.end, e.role.value))
    return Document(doc_id=doc_id, text=text, annotations=annotations, expressions=expressions)


def serialize_brat(doc: Document, config: Optional[BratConfig] = None) -> tuple[str, str]:
    """Render a Document back to (text, ann) BRAT standoff content."""
    cfg = config or BratConfig()
    type_names = {t: label for label, t in cfg.type_labels.items()}
    expr_names = {k: label for label, k in cfg.expression_labels.items()}
    lines: list[str] = []
    t_counter = a_counter = n_counter = 0

    def emit_t(label: str, start: int, end: int, surface: str) -> str:
        nonlocal t_counter
        if "\n" in surface or "\t" in surface:
            raise ValueError(f"cannot serialize surface containing tab/newline: {surface!r}")
        t_counter += 1
        tid = f"T{t_counter}"
        lines.append(f"{tid}\t{label} {start} {end}\t{surface}")
        return tid

    def emit_a(name: str, tid: str, value: str) -> None:
        nonlocal a_counter
        a_counter += 1
        lines.append(f"A{a_counter}\t{name} {tid} {value}")

    def emit_n(tid: str, resource: str, entry: str, display: str) -> None:
        nonlocal n_counter
        n_counter += 1
        lines.append(f"N{n_counter}\tReference {tid} {resource}:{entry}\t{display}")

    for ann in doc.annotations:
        tid = emit_t(type_names[ann.toponym_type], ann.start, ann.end, ann.surface)
        if ann.modifier_type is not None:
            emit_a(cfg.modifier_attribute, tid, ann.modifier_type)
        if ann.non_locational is not None:
            emit_a(cfg.non_locational_attribute, tid, str(ann.non_locational))
        if ann.gazetteer_id is not None:
            emit_n(tid, cfg.gazetteer_resource, str(ann.gazetteer_id), ann.surface)
        if ann.coord is not None:
            emit_n(
                tid,
                cfg.coordinate_resource,
                f"{ann.coord.lat!r},{ann.coord.lon!r}",
                ann.surface,
            )

    by_span: dict[tuple[int, int], dict[ExpressionRole, ExpressionAnnotation]] = {}
    for expr in doc.expressions:
        by_span.setdefault(expr.span, {})[expr.role] = expr
    for span in sorted(by_span):
        roles = by_span[span]
        context = roles.get(ExpressionRole.CONTEXT)
        head = roles.get(ExpressionRole.HEAD)
        base = context or head
        assert base is not None
        tid = emit_t(expr_names[base.kind], base.start, base.end, base.surface)
        if head is not None:
            emit_a(
                cfg.non_locational_attribute,
                tid,
                str(head.kind is ExpressionKind.ASSOCIATIVE),
            )

    ann_text = "".join(line + "\n" for line in lines)
    return doc.text, ann_text


def load_document_pair(
    txt_path: str, ann_path: str, config: Optional[BratConfig] = None
) -> Document:
    doc_id = os.path.splitext(os.path.basename(txt_path))[0]
    with open(txt_path, encoding="utf-8") as fh:
        text = fh.read()
    with open(ann_path, encoding="utf-8") as fh:
        ann = fh.read()
    return load_brat(text, ann, doc_id=doc_id, config=config)


def load_directory(path: str, config: Optional[BratConfig] = None) -> list[Document]:
    """Load every .txt/.ann pair under `path`, sorted by document id."""
    docs = []
    for name in sorted(os.listdir(path)):
        if not name.endswith(".txt"):
            continue
        txt_path = os.path.join(path, name)
        ann_path = txt_path[:-4] + ".ann"
        if not os.path.exists(ann_path):
            log.warning("no .ann file for %s; skipping", txt_path)
            continue
        docs.append(load_document_pair(txt_path, ann_path, config=config))
    return docs


def gold_spans(docs: Iterable[Document]) -> list[tuple[str, ToponymAnnotation]]:
    """Flatten documents into (doc_id, annotation) gold span pairs."""
    return [(doc.doc_id, ann) for doc in docs for ann in doc.annotations]


@dataclass(frozen=True)
class ExcludedAnnotation:
    doc_id: str
    annotation: ToponymAnnotation
    reason: str


@dataclass
class ExclusionResult:
    kept: list[tuple[str, ToponymAnnotation]]
    excluded: list[ExcludedAnnotation]
    documents: list[Document]  # same docs, annotations filtered + coords filled


def apply_exclusion_policy(docs: Iterable[Document], index: GazetteerIndex) -> ExclusionResult:
    """Partition gold annotations into the geocodable subset and the rest.

    Excluded are (a) demonym/homonym/language annotations without any
    coordinate source, and (b) annotations lacking a resolvable gazetteer
    link: facilities, street names and venues with no entry, or dangling
    ids. Kept annotations have their coordinates filled from the
    gazetteer when not explicitly annotated.
    """
    kept: list[tuple[str, ToponymAnnotation]] = []
    excluded: list[ExcludedAnnotation] = []
    out_docs: list[Document] = []

    for doc in docs:
        kept_here: list[ToponymAnnotation] = []
        for ann in doc.annotations:
            entry = index.entry(ann.gazetteer_id) if ann.gazetteer_id is not None else None
            has_coord = ann.coord is not None or entry is not None
            if ann.toponym_type in NON_LOCATIONAL_TYPES and not has_coord:
                excluded.append(ExcludedAnnotation(doc.doc_id, ann, EXCLUDED_NON_LOCATIONAL))
                continue
            if entry is None:
                excluded.append(ExcludedAnnotation(doc.doc_id, ann, EXCLUDED_NOT_IN_GAZETTEER))
                continue
            if ann.coord is None:
                ann = dataclasses.replace(ann, coord=entry.coord)
            elif (
                abs(ann.coord.lat - entry.coord.lat) > COORD_AGREEMENT_DEG
                or abs(ann.coord.lon - entry.coord.lon) > COORD_AGREEMENT_DEG
            ):
                log.warning(
                    "%s: annotated coordinates %s disagree with gazetteer entry %d %s; "
                    "keeping the annotated value",
                    doc.doc_id,
                    ann.coord,
                    entry.id,
                    entry.coord,
                )
            kept.append((doc.doc_id, ann))
            kept_here.append(ann)
        out_docs.append(
            Document(
                doc_id=doc.doc_id,
                text=doc.text,
                annotations=kept_here,
                expressions=list(doc.expressions),
            )
        )
    return ExclusionResult(kept=kept, excluded=excluded, documents=out_docs)


@dataclass(frozen=True)
class PredictionError:
    line_no: int
    message: str


PREDICTION_FIELDS = 7


def load_predictions(lines: Iterable[str]) -> tuple[list[PredictionRecord], list[PredictionError]]:
    """Parse prediction interchange lines.

    Malformed lines never abort the parse: they are collected as
    PredictionErrors and the caller decides whether to be strict.
    """
    records: list[PredictionRecord] = []
    errors: list[PredictionError] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != PREDICTION_FIELDS:
            errors.append(
                PredictionError(line_no, f"expected {PREDICTION_FIELDS} fields, got {len(fields)}")
            )
            continue
        doc_id, start_s, end_s, surface, label, lat_s, lon_s = fields
        try:
            start, end = int(start_s), int(end_s)
        except ValueError:
            errors.append(PredictionError(line_no, f"non-integer span: {start_s!r}, {end_s!r}"))
            continue
        if (lat_s == "") != (lon_s == ""):
            errors.append(PredictionError(line_no, "lat and lon must both be present or both empty"))
            continue
        try:
            coord = Coordinate(float(lat_s), float(lon_s)) if lat_s else None
            records.append(
                PredictionRecord(
                    doc_id=doc_id,
                    start=start,
                    end=end,
                    surface=surface,
                    predicted_label=label or None,
                    predicted_coord=coord,
                )
            )
        except ValueError as exc:
            errors.append(PredictionError(line_no, str(exc)))
    return records, errors


def write_predictions(records: Iterable[PredictionRecord], fh: TextIO) -> None:
    """Write records in the interchange format (coordinates to 6 decimals)."""
    for rec in records:
        if rec.predicted_coord is not None:
            lat_s = f"{rec.predicted_coord.lat:.6f}"
            lon_s = f"{rec.predicted_coord.lon:.6f}"
        else:
            lat_s = lon_s = ""
        label = rec.predicted_label or ""
        fh.write(f"{rec.doc_id}\t{rec.start}\t{rec.end}\t{rec.surface}\t{label}\t{lat_s}\t{lon_s}\n")
