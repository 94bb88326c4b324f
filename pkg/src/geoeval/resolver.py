"""Toponym resolution baselines and cross-knowledge-base alignment.

The population heuristic resolves each extracted surface to its most
populous gazetteer candidate: crude, but a strong baseline that every
geocoder evaluation should include. Alignment post-edits coordinates
produced against a foreign knowledge base by snapping them to the nearest
same-name gazetteer entry, making error distances comparable across
systems built on different databases.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import PredictionRecord
from .gazetteer import GazetteerIndex, nearest_entry

log = logging.getLogger(__name__)

# Evaluating on fewer resolved toponyms than this fraction of the
# geotagged ones risks an unrepresentative geocoding sample.
MIN_RESOLVED_FRACTION = 0.5


@dataclass
class ResolutionResult:
    records: list[PredictionRecord]
    n_resolved: int
    n_unresolved: int


@dataclass
class AlignmentResult:
    records: list[PredictionRecord]
    n_aligned: int
    flagged: list[int]  # indices of records with no same-name candidate


def load_lexicon(lines: Iterable[str]) -> dict[str, str]:
    """Parse a normalization lexicon: tab-separated surface -> canonical name.

    Maps non-standard surface forms (adjectives like "Russian") to
    gazetteer names; keys are casefolded. Blank lines and #-comments are
    skipped; other malformed lines are logged and skipped.
    """
    lexicon: dict[str, str] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            log.warning("lexicon: skipping malformed line %d: %r", line_no, line)
            continue
        lexicon[parts[0].strip().casefold()] = parts[1].strip()
    return lexicon


def load_lexicon_path(path: str) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh)


def resolve_population(
    records: Sequence[PredictionRecord],
    index: GazetteerIndex,
    lexicon: Optional[dict[str, str]] = None,
    populated_only: bool = False,
) -> ResolutionResult:
    """Assign each record the coordinates of its most populous candidate.

    Ties break to the lowest gazetteer id. Surfaces are normalized via
    the lexicon first when one is supplied; populated_only restricts the
    candidate pool to entries with population > 0. Records with no
    candidate pass through unresolved.
    """
    out: list[PredictionRecord] = []
    n_resolved = 0
    for rec in records:
        name = rec.surface
        if lexicon is not None:
            name = lexicon.get(name.casefold(), name)
        candidates = index.lookup(name)
        if populated_only:
            candidates = [c for c in candidates if c.population > 0]
        if not candidates:
            out.append(rec)
            continue
        # lookup() is sorted by descending population then ascending id,
        # so the head of the list is the heuristic's pick.
        best = candidates[0]
        out.append(dataclasses.replace(rec, predicted_coord=best.coord))
        n_resolved += 1
    return ResolutionResult(records=out, n_resolved=n_resolved, n_unresolved=len(out) - n_resolved)


def align_to_gazetteer(
    records: Sequence[PredictionRecord],
    index: GazetteerIndex,
) -> AlignmentResult:
    """Snap foreign-knowledge-base coordinates onto gazetteer entries.

    Each record's coordinates are replaced by those of the nearest
    same-name entry. Records without a same-name candidate (or without
    coordinates to measure from) pass through unchanged and are flagged.
    """
    out: list[PredictionRecord] = []
    flagged: list[int] = []
    for i, rec in enumerate(records):
        if rec.predicted_coord is None:
            out.append(rec)
            flagged.append(i)
            continue
        entry = nearest_entry(index, rec.surface, rec.predicted_coord)
        if entry is None:
            out.append(rec)
            flagged.append(i)
            continue
        out.append(dataclasses.replace(rec, predicted_coord=entry.coord))
    return AlignmentResult(records=out, n_aligned=len(out) - len(flagged), flagged=flagged)
