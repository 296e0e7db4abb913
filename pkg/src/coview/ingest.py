"""Loaders for the three input files: item catalog, interactions, stop words.

All inputs are delimiter-separated text with a header row (UTF-8, comma by
default).  Loaded values are plain frozen dataclasses; loaders are pure and
the results are safe to share across threads.

Missing values: an absent or empty ``score``/``description`` cell loads as
``None`` (never an empty-string sentinel).  Genre cells hold a comma-joined
multi-genre string and are split and trimmed on load.
"""

from __future__ import annotations

import csv
import importlib.resources
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateId, EmptyList, MissingColumn, ParseError

CATALOG_COLUMNS = ("item_id", "title", "score", "genres", "description")
INTERACTION_COLUMNS = ("user_id", "item_id")


@dataclass(frozen=True)
class CatalogEntry:
    item_id: str
    title: str
    score: float | None
    genres: frozenset[str]
    description: str | None


@dataclass(frozen=True)
class InteractionSet:
    """Deduplicated (user_id, item_id) pairs."""

    pairs: frozenset[tuple[str, str]]

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def users(self) -> frozenset[str]:
        return frozenset(u for u, _ in self.pairs)

    @property
    def items(self) -> frozenset[str]:
        return frozenset(i for _, i in self.pairs)


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]
    source: str

    def __contains__(self, word: str) -> bool:
        return word in self.words


def _resolve_columns(header, column_map, required, where):
    """Map logical column names to header positions."""
    column_map = dict(column_map or {})
    positions = {}
    for logical in required:
        name = column_map.get(logical, logical)
        if name not in header:
            raise MissingColumn(f"{where}: column {name!r} (for {logical!r}) not in header {header}")
        positions[logical] = header.index(name)
    return positions


def _optional_column(header, column_map, logical):
    name = (column_map or {}).get(logical, logical)
    return header.index(name) if name in header else None


def load_catalog(path, column_map=None, delimiter=",") -> list[CatalogEntry]:
    """Load the item catalog; one entry per row, item_id unique.

    ``column_map`` maps the logical names item_id/title/score/genres/
    description to the file's header names (defaults to the logical names).
    """
    path = Path(path)
    entries: list[CatalogEntry] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, f"{path}: empty file, header expected") from None
        pos = _resolve_columns(header, column_map, ("item_id",), str(path))
        opt = {
            name: _optional_column(header, column_map, name)
            for name in ("title", "score", "genres", "description")
        }
        for lineno, row in enumerate(reader, start=2):
            if not row or all(cell == "" for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(lineno, f"{path}: expected {len(header)} fields, got {len(row)}")
            item_id = row[pos["item_id"]].strip()
            if not item_id:
                raise ParseError(lineno, f"{path}: empty item_id")
            if item_id in seen:
                raise DuplicateId(f"item_id {item_id!r} repeated (row {lineno})")
            seen.add(item_id)

            def cell(name):
                idx = opt[name]
                return row[idx] if idx is not None else ""

            score_text = cell("score").strip()
            score = None
            if score_text:
                try:
                    score = float(score_text)
                except ValueError:
                    raise ParseError(lineno, f"{path}: bad score {score_text!r}") from None
                if not 0.0 <= score <= 10.0:
                    raise ParseError(lineno, f"{path}: score {score} outside [0, 10]")
            genres = frozenset(g.strip() for g in cell("genres").split(",") if g.strip())
            description = cell("description").strip() or None
            entries.append(CatalogEntry(item_id, cell("title").strip(), score, genres, description))
    return entries


def write_catalog(entries, path, delimiter=",") -> None:
    """Write entries back in the interchange format (round-trips with load)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(CATALOG_COLUMNS)
        for e in entries:
            score = "" if e.score is None else format(e.score, "g")
            writer.writerow([
                e.item_id,
                e.title,
                score,
                ", ".join(sorted(e.genres)),
                e.description or "",
            ])


def load_interactions(path, column_map=None, delimiter=",") -> InteractionSet:
    """Load user-item interactions; duplicate pairs collapse to one.

    A rating column, if present, is ignored: any row counts as an
    interaction regardless of the rating value.
    """
    path = Path(path)
    pairs: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(1, f"{path}: empty file, header expected") from None
        pos = _resolve_columns(header, column_map, INTERACTION_COLUMNS, str(path))
        for lineno, row in enumerate(reader, start=2):
            if not row or all(cell == "" for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(lineno, f"{path}: expected {len(header)} fields, got {len(row)}")
            user = row[pos["user_id"]].strip()
            item = row[pos["item_id"]].strip()
            if not user or not item:
                raise ParseError(lineno, f"{path}: empty user_id or item_id")
            pairs.add((user, item))
    return InteractionSet(frozenset(pairs))


def write_interactions(interactions, path, delimiter=",") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(INTERACTION_COLUMNS)
        for user, item in sorted(interactions.pairs):
            writer.writerow([user, item])


def load_stopwords(source="builtin") -> StopwordList:
    """Load a stop-word list: the bundled English list or a file.

    File format: one token per line, blanks skipped; tokens are lowercased
    and deduplicated.
    """
    if source == "builtin":
        text = (importlib.resources.files("coview") / "data" / "stopwords_en.txt").read_text("utf-8")
        label = "builtin"
    else:
        text = Path(source).read_text("utf-8")
        label = str(source)
    words = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip().lower()
        if not token:
            continue
        if any(ch.isspace() for ch in token):
            raise ParseError(lineno, f"{label}: stop word {token!r} contains whitespace")
        words.add(token)
    if not words:
        raise EmptyList(f"{label}: no usable stop words")
    return StopwordList(frozenset(words), label)
