"""Training-data augmentation by recombining annotated NP contexts and heads.

Annotated expressions split each source sentence into an interchangeable
context and head. Substituting compatible heads, or gold toponyms of the
matching literal/associative group, into a context slot yields synthetic
training sentences in token/tag column format. Literal contexts only ever
receive literal fillers and associative contexts associative ones.
"""

from __future__ import annotations

import logging
import random
import re
from typing import Iterable, Sequence, TextIO

from .corpus import Document, ExpressionAnnotation, ExpressionKind, ExpressionRole
from .tagger import token_spans
from .taxonomy import TopLevel, top_level

log = logging.getLogger(__name__)

TaggedSentence = list[tuple[str, str]]

OUTSIDE_TAG = "O"

_KIND_TO_TOP_LEVEL = {
    ExpressionKind.LITERAL: TopLevel.LITERAL,
    ExpressionKind.ASSOCIATIVE: TopLevel.ASSOCIATIVE,
}

_KIND_TAG = {
    ExpressionKind.LITERAL: "Literal",
    ExpressionKind.ASSOCIATIVE: "Associative",
}

_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])\s+")


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Approximate sentence (start, end) spans covering the whole text."""
    spans = []
    start = 0
    for m in _SENTENCE_BOUNDARY.finditer(text):
        spans.append((start, m.start()))
        start = m.end()
    if start < len(text):
        spans.append((start, len(text)))
    return spans


def _containing_sentence(text: str, start: int, end: int) -> tuple[int, int]:
    """Smallest run of sentences covering [start, end)."""
    lo, hi = start, end
    for s_start, s_end in sentence_spans(text):
        if s_end <= start or s_start >= end:
            continue
        lo = min(lo, s_start)
        hi = max(hi, s_end)
    return lo, hi


def expression_counts(
    expressions: Iterable[ExpressionAnnotation],
) -> dict[tuple[ExpressionRole, ExpressionKind], int]:
    """Counts per (role, kind), e.g. how many literal contexts exist."""
    counts: dict[tuple[ExpressionRole, ExpressionKind], int] = {}
    for expr in expressions:
        key = (expr.role, expr.kind)
        counts[key] = counts.get(key, 0) + 1
    return counts


def generate_augmented(
    docs: Sequence[Document],
    expressions: Sequence[ExpressionAnnotation],
    max_per_source: int,
    seed: int,
) -> list[TaggedSentence]:
    """Synthesise tagged sentences by filling context slots.

    For every Context expression, up to max_per_source fillers are drawn
    (seeded, per-context) from the same-kind Head surfaces plus the gold
    toponyms of the matching top-level group. Toponym fills are tagged
    B-/I-Literal or B-/I-Associative according to the context kind; head
    fills produce all-O negative sentences. Sentence-initial fills are
    capitalised; no other morphological adjustment is attempted.
    """
    if max_per_source < 1:
        raise ValueError("max_per_source must be >= 1")
    doc_map = {doc.doc_id: doc for doc in docs}

    heads: dict[ExpressionKind, list[str]] = {k: [] for k in ExpressionKind}
    for expr in expressions:
        if expr.role is ExpressionRole.HEAD:
            heads[expr.kind].append(expr.surface)
    toponyms: dict[ExpressionKind, list[str]] = {k: [] for k in ExpressionKind}
    for doc in docs:
        for ann in doc.annotations:
            group = top_level(ann.toponym_type)
            for kind, top in _KIND_TO_TOP_LEVEL.items():
                if group is top:
                    toponyms[kind].append(ann.surface)

    pools: dict[ExpressionKind, list[tuple[str, bool]]] = {}
    for kind in ExpressionKind:
        pool = [(s, True) for s in dict.fromkeys(toponyms[kind])]
        pool += [(s, False) for s in dict.fromkeys(heads[kind])]
        pools[kind] = pool

    out: list[TaggedSentence] = []
    contexts = [e for e in expressions if e.role is ExpressionRole.CONTEXT]
    for ctx_index, ctx in enumerate(contexts):
        doc = doc_map.get(ctx.doc_id)
        if doc is None:
            log.warning("augment: context %d references unknown document %r", ctx_index, ctx.doc_id)
            continue
        if doc.text[ctx.start : ctx.end] != ctx.surface:
            log.warning(
                "augment: context %d span does not match document text; skipping", ctx_index
            )
            continue
        pool = pools[ctx.kind]
        if not pool:
            continue
        sent_start, sent_end = _containing_sentence(doc.text, ctx.start, ctx.end)
        prefix = doc.text[sent_start : ctx.start]
        suffix = doc.text[ctx.end : sent_end]
        rng = random.Random(f"{seed}:{ctx_index}")
        picks = rng.sample(pool, min(max_per_source, len(pool)))
        for fill, is_toponym in picks:
            if not prefix.strip():
                fill = fill[:1].upper() + fill[1:]
            sentence = prefix + fill + suffix
            fill_start = len(prefix)
            fill_end = fill_start + len(fill)
            tagged: TaggedSentence = []
            inside = False
            for tok_start, tok_end in token_spans(sentence):
                token = sentence[tok_start:tok_end]
                if is_toponym and tok_start < fill_end and tok_end > fill_start:
                    tag = ("I-" if inside else "B-") + _KIND_TAG[ctx.kind]
                    inside = True
                else:
                    tag = OUTSIDE_TAG
                    if tok_start >= fill_end:
                        inside = False
                tagged.append((token, tag))
            out.append(tagged)
    return out


def write_tagged(sentences: Iterable[TaggedSentence], fh: TextIO) -> None:
    """Token/tag column output: one token per line, blank line per sentence."""
    for sentence in sentences:
        for token, tag in sentence:
            fh.write(f"{token}\t{tag}\n")
        fh.write("\n")
