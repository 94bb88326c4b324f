"""Geonames-style gazetteer ingest and case-folded name lookup.

The index maps every canonical and alternate name (Unicode-casefolded,
no diacritic stripping) to its candidate entries. It is immutable after
ingest and can be persisted to a binary cache keyed by the dump checksum
so repeated evaluations skip re-parsing the dump.
"""

from __future__ import annotations

import hashlib
import logging
import pickle
from dataclasses import dataclass
from typing import Iterable, Optional

from .geodesy import Coordinate, great_circle_distance

log = logging.getLogger(__name__)

# Geonames main-table layout ("allCountries" dump): 19 tab-separated columns.
GEONAMES_FIELD_COUNT = 19

CACHE_FORMAT_VERSION = 1


class GazetteerError(Exception):
    """Unreadable dump or unusable cache file."""


@dataclass(frozen=True)
class GazetteerEntry:
    id: int
    canonical_name: str
    alternate_names: frozenset[str]
    coord: Coordinate
    population: int
    feature_class: str
    feature_code: str
    country_code: str


@dataclass
class IngestSummary:
    ingested: int = 0
    skipped: int = 0   # malformed lines
    filtered: int = 0  # valid lines dropped by the feature-class filter


class GazetteerIndex:
    """Immutable name -> candidates index over gazetteer entries.

    Candidate lists are pre-sorted by descending population, then
    ascending id, so lookup order is deterministic.
    """

    def __init__(
        self,
        entries: dict[int, GazetteerEntry],
        name_map: dict[str, list[int]],
        version: str,
        summary: IngestSummary,
    ):
        self._entries = entries
        self._name_map = name_map
        self.version = version
        self.summary = summary

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, entry_id: int) -> bool:
        return entry_id in self._entries

    def entry(self, entry_id: int) -> Optional[GazetteerEntry]:
        return self._entries.get(entry_id)

    def entries(self) -> Iterable[GazetteerEntry]:
        return self._entries.values()

    def lookup(self, name: str) -> list[GazetteerEntry]:
        """All entries whose canonical or alternate name casefolds to `name`.

        Returned in descending-population order (ties by ascending id);
        empty list when the name is unknown.
        """
        ids = self._name_map.get(name.casefold(), [])
        return [self._entries[i] for i in ids]


def parse_geonames_line(line: str) -> Optional[GazetteerEntry]:
    """Parse one Geonames main-table record; None when malformed."""
    fields = line.rstrip("\n").split("\t")
    if len(fields) < GEONAMES_FIELD_COUNT:
        return None
    try:
        entry_id = int(fields[0])
        name = fields[1].strip()
        if not name:
            return None
        alternates = frozenset(a.strip() for a in fields[3].split(",") if a.strip())
        coord = Coordinate(float(fields[4]), float(fields[5]))
        population = int(fields[14]) if fields[14].strip() else 0
        if population < 0:
            return None
        return GazetteerEntry(
            id=entry_id,
            canonical_name=name,
            alternate_names=alternates,
            coord=coord,
            population=population,
            feature_class=fields[6],
            feature_code=fields[7],
            country_code=fields[8],
        )
    except ValueError:
        return None


def ingest(
    lines: Iterable[str],
    feature_classes: Optional[set[str]] = None,
    version: str = "unversioned",
) -> GazetteerIndex:
    """Build an index from Geonames-format lines.

    Malformed lines (and duplicate ids) are logged and counted in the
    summary, never fatal. `feature_classes`, when given, keeps only
    records whose single-letter feature class is in the set.
    """
    entries: dict[int, GazetteerEntry] = {}
    name_map: dict[str, list[int]] = {}
    summary = IngestSummary()

    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        entry = parse_geonames_line(line)
        if entry is None:
            summary.skipped += 1
            log.warning("gazetteer: skipping malformed line %d", line_no)
            continue
        if feature_classes is not None and entry.feature_class not in feature_classes:
            summary.filtered += 1
            continue
        if entry.id in entries:
            summary.skipped += 1
            log.warning("gazetteer: skipping duplicate id %d (line %d)", entry.id, line_no)
            continue
        entries[entry.id] = entry
        for name in {entry.canonical_name, *entry.alternate_names}:
            name_map.setdefault(name.casefold(), []).append(entry.id)
        summary.ingested += 1

    for ids in name_map.values():
        ids.sort(key=lambda i: (-entries[i].population, i))
    return GazetteerIndex(entries, name_map, version, summary)


def dump_checksum(path: str) -> str:
    """sha256 of the raw dump bytes, used as the gazetteer version."""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return f"sha256:{digest.hexdigest()[:16]}"


def ingest_path(path: str, feature_classes: Optional[set[str]] = None) -> GazetteerIndex:
    """Ingest a dump file; the index version records the dump checksum."""
    try:
        version = dump_checksum(path)
        with open(path, encoding="utf-8") as fh:
            return ingest(fh, feature_classes=feature_classes, version=version)
    except (OSError, UnicodeDecodeError) as exc:
        raise GazetteerError(f"cannot read gazetteer dump {path}: {exc}") from exc


def save_cache(index: GazetteerIndex, path: str, feature_classes: Optional[set[str]] = None) -> None:
    payload = {
        "format_version": CACHE_FORMAT_VERSION,
        "checksum": index.version,
        "feature_classes": sorted(feature_classes) if feature_classes is not None else None,
        "index": index,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_cache(path: str) -> GazetteerIndex:
    try:
        with open(path, "rb") as fh:
            payload = pickle.load(fh)
    except (OSError, pickle.UnpicklingError, EOFError) as exc:
        raise GazetteerError(f"cannot read gazetteer cache {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format_version") != CACHE_FORMAT_VERSION:
        raise GazetteerError(f"gazetteer cache {path} has an unsupported format version")
    return payload["index"]


def load_or_ingest(
    dump_path: str,
    cache_path: str,
    feature_classes: Optional[set[str]] = None,
) -> tuple[GazetteerIndex, bool]:
    """Return (index, cache_hit): reuse the cache when it matches the dump.

    A cache matches when its embedded checksum equals the dump checksum
    and it was built with the same feature-class filter.
    """
    checksum = dump_checksum(dump_path)
    wanted_filter = sorted(feature_classes) if feature_classes is not None else None
    try:
        with open(cache_path, "rb") as fh:
            payload = pickle.load(fh)
        if (
            isinstance(payload, dict)
            and payload.get("format_version") == CACHE_FORMAT_VERSION
            and payload.get("checksum") == checksum
            and payload.get("feature_classes") == wanted_filter
        ):
            return payload["index"], True
    except (OSError, pickle.UnpicklingError, EOFError):
        pass
    index = ingest_path(dump_path, feature_classes=feature_classes)
    save_cache(index, cache_path, feature_classes=feature_classes)
    return index, False


def nearest_entry(index: GazetteerIndex, name: str, coord: Coordinate) -> Optional[GazetteerEntry]:
    """The same-name candidate closest to `coord`; ties break to lower id."""
    candidates = index.lookup(name)
    if not candidates:
        return None
    return min(candidates, key=lambda e: (great_circle_distance(e.coord, coord), e.id))
