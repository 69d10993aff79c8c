"""
Built-in Bol-Moufang identities with their published groupoid counts.

The classical table holds the sixty identities F1-F60 with counts at order
2 (raw, up to isomorphism, up to isomorphism or anti-isomorphism). The
generalized table holds thirty-seven named identities with raw counts at orders 2, 3 and 4.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cache
from pathlib import Path

import pandas as pd
from loguru import logger

from bm_census.term import (
    BolMoufangClass,
    Grammar,
    Identity,
    classify,
    format_identity,
    identities_equal,
    parastrophe_identity,
    parse_identity,
)
from bm_census.utils import near_matches, relpath


class CatalogScope(str, Enum):
    CLASSICAL = "classical"
    GENERALIZED = "generalized"
    ALL = "all"

    @classmethod
    def get(cls, name: str) -> CatalogScope:
        return cls(name.lower())


class UnknownKeyError(KeyError):
    def __init__(self, key: str, suggestions: list[str]):
        self.key = key
        self.suggestions = suggestions
        hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"❌ Unknown catalog key {key!r}{hint}")

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True, slots=True)
class ExpectedCounts:
    raw: int
    iso: int | None = None
    iso_anti: int | None = None


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    identity: Identity
    display_name: str
    scope: CatalogScope
    text: str  # as printed, compact grammar
    expected_counts: dict[int, ExpectedCounts]
    errata: dict[int, ExpectedCounts] = field(default_factory=dict)

    @property
    def bm_class(self) -> BolMoufangClass:
        return classify(self.identity)

    def corrected_counts(self, order: int) -> ExpectedCounts | None:
        """Published counts with any known erratum applied."""
        return self.errata.get(order, self.expected_counts.get(order))


# key, abbreviation, identity, order-2 counts (raw, non-iso, non-iso non-anti-iso)
_TABLE1 = [
    ("F1", "", "xy·zx = (xy·z)x", 10, 6, 5),
    ("F2", "", "xy·zx = (x·yz)x", 9, 6, 5),
    ("F3", "", "xy·zx = x(y·zx)", 10, 6, 5),
    ("F4", "middle Mouf.", "xy·zx = x(yz·x)", 9, 6, 5),
    ("F5", "", "(xy·z)x = (x·yz)x", 11, 7, 6),
    ("F6", "extra ident.", "(xy·z)x = x(y·zx)", 10, 7, 5),
    ("F7", "", "(xy·z)x = x(yz·x)", 9, 6, 5),
    ("F8", "", "(x·yz)x = x(y·zx)", 9, 6, 5),
    ("F9", "", "(x·yz)x = x(yz·x)", 10, 6, 5),
    ("F10", "", "x(y·zx) = x(yz·x)", 11, 7, 6),
    ("F11", "", "xy·xz = (xy·x)z", 8, 5, 4),
    ("F12", "", "xy·xz = (x·yx)z", 9, 7, 6),
    ("F13", "extra ident.", "xy·xz = x(yx·z)", 9, 6, 5),
    ("F14", "", "xy·xz = x(y·xz)", 10, 6, 5),
    ("F15", "", "(xy·x)z = (x·yx)z", 11, 7, 6),
    ("F16", "", "(xy·x)z = x(yx·z)", 11, 7, 6),
    ("F17", "left Mouf.", "(xy·x)z = x(y·xz)", 10, 7, 5),
    ("F18", "", "(x·yx)z = x(yx·z)", 8, 5, 4),
    ("F19", "left Bol", "(x·yx)z = x(y·xz)", 9, 6, 5),
    ("F20", "", "x(yx·z) = x(y·xz)", 9, 6, 5),
    ("F21", "", "yx·zx = (yx·z)x", 10, 6, 5),
    ("F22", "extra ident.", "yx·zx = (y·xz)x", 9, 6, 5),
    ("F23", "", "yx·zx = y(xz·x)", 9, 6, 5),
    ("F24", "", "yx·zx = y(x·zx)", 8, 5, 4),
    ("F25", "", "(yx·z)x = (y·xz)x", 9, 6, 5),
    ("F26", "right Bol", "(yx·z)x = y(xz·x)", 9, 6, 5),
    ("F27", "right Mouf.", "(yx·z)x = y(x·zx)", 10, 7, 5),
    ("F28", "", "(y·xz)x = y(xz·x)", 8, 5, 4),
    ("F29", "", "(y·xz)x = y(x·zx)", 11, 7, 6),
    ("F30", "", "y(xz·x) = y(x·zx)", 11, 7, 6),
    ("F31", "", "yx·xz = (yx·x)z", 8, 5, 4),
    ("F32", "", "yx·xz = (y·xx)z", 9, 6, 5),
    ("F33", "", "yx·xz = y(xx·z)", 9, 6, 5),
    ("F34", "", "yx·xz = y(x·xz)", 8, 5, 4),
    ("F35", "", "(yx·x)z = (y·xx)z", 9, 6, 5),
    ("F36", "RC ident.", "(yx·x)z = y(xx·z)", 9, 6, 5),
    ("F37", "C ident.", "(yx·x)z = y(x·xz)", 10, 7, 5),
    ("F38", "", "(y·xx)z = y(xx·z)", 8, 5, 4),
    ("F39", "LC ident.", "(y·xx)z = y(x·xz)", 9, 6, 5),
    ("F40", "", "y(xx·z) = y(x·xz)", 9, 6, 5),
    ("F41", "LC ident.", "xx·yz = (x·xy)z", 9, 6, 5),
    ("F42", "", "xx·yz = (xx·y)z", 12, 7, 5),  # printed "(xx·y) z"
    ("F43", "", "xx·yz = x(x·yz)", 8, 5, 4),
    ("F44", "", "xx·yz = x(xy·z)", 9, 6, 5),
    ("F45", "", "(x·xy)z = (xx·y)z", 9, 6, 5),
    ("F46", "LC ident.", "(x·xy)z = x(x·yz)", 11, 7, 6),
    ("F47", "", "(x·xy)z = x(xy·z)", 8, 5, 4),
    ("F48", "LC ident.", "(xx·y)z = x(x·yz)", 10, 7, 5),
    ("F49", "", "(xx·y)z = x(xy·z)", 9, 6, 5),
    ("F50", "", "x(x·yz) = x(xy·z)", 11, 7, 6),
    ("F51", "", "yz·xx = (yz·x)x", 8, 5, 4),
    ("F52", "", "yz·xx = (y·zx)x", 9, 6, 5),
    ("F53", "RC ident.", "yz·xx = y(zx·x)", 9, 6, 5),
    ("F54", "", "yz·xx = y(z·xx)", 12, 7, 6),
    ("F55", "", "(yz·x)x = (y·zx)x", 11, 7, 6),
    ("F56", "RC ident.", "(yz·x)x = y(zx·x)", 11, 7, 6),
    ("F57", "RC ident.", "(yz·x)x = y(z·xx)", 10, 7, 6),
    ("F58", "", "(y·zx)x = y(zx·x)", 8, 5, 4),
    ("F59", "", "(y·zx)x = y(z·xx)", 9, 6, 5),
    ("F60", "", "y(zx·x) = y(z·xx)", 9, 6, 5),
]

# Published class counts that contradict the parastrophe symmetry: F and F*
# always share both class counts, since transposing is an anti-isomorphism.
# F12 (vs F23), F54 (vs F42) and F57 (vs F48) are the rows that disagree.
_TABLE1_ERRATA = {
    "F12": ExpectedCounts(9, 6, 5),
    "F54": ExpectedCounts(12, 7, 5),
    "F57": ExpectedCounts(10, 7, 5),
}

# Raw cells of the generalized table that exhaustive enumeration contradicts
_TABLE2_ERRATA = {
    "T7": {2: ExpectedCounts(8)},
    "CR": {3: ExpectedCounts(139)},
}

# key, name, identity, raw counts at orders 2, 3, 4
_TABLE2 = [
    ("EL", "Extra", "x(y(zx)) = ((xy)z)x", 10, 239, 18744),
    ("ML", "Moufang", "(xy)(zx) = (x(yz))x", 9, 196, 25113),
    ("LB", "Left Bol", "x(y(xz)) = (x(yx))z", 9, 215, 22875),
    ("RB", "Right Bol", "y((xz)x) = ((yx)z)x", 9, 215, 22875),
    ("CL", "C-loops", "y(x(xz)) = ((yx)x)z", 10, 209, 26583),
    ("LC", "LC-loops", "(xx)(yz) = (x(xy))z", 9, 220, 26583),
    ("RC", "RC-loops", "y((zx)x) = (yz)(xx)", 9, 220, 26583),
    ("MN", "Middle Nuclear Square", "y((xx)z) = (y(xx))z", 8, 350, 122328),
    ("RN", "Right Nuclear Square", "y(z(xx)) = (yz)(xx)", 12, 932, 2753064),
    ("LN", "Left Nuclear Square", "((xx)y)z = (xx)(yz)", 12, 932, 2753064),
    ("CM", "Comm. Moufang", "(xy)(xz) = (xx)(zy)", 8, 297, 111640),
    ("CC", "Comm. C-loop", "(y(xy))z = x(y(yz))", 8, 169, 12598),
    ("CA", "Comm. Alternative", "((xx)y)z = z(x(yx))", 6, 110, 10416),
    ("CN", "Comm. Nuclear square", "((xx)y)z = (xx)(zy)", 9, 472, 1321661),
    ("CP", "Comm. loops", "((yx)x)z = z(x(yx))", 8, 744, 1078744),
    ("C1", "Cheban, 1", "x((xy)z) = (yx)(xz)", 8, 219, 19846),
    ("C2", "Cheban, 2", "x((xy)z) = (y(zx))x", 6, 153, 12382),
    ("L1", "Lonely, I", "(x(xy))z = y((zx)x)", 6, 117, 6076),
    ("CD", "Cheban, I, Dual", "(yx)(xz) = (y(zx))x", 8, 219, 19846),
    ("L2", "Lonely, II", "(x(xy))z = y((xx)z)", 7, 157, 11489),
    ("L3", "Lonely, III", "(y(xx))z = y((zx)x)", 7, 157, 11489),
    ("M1", "Mate, I", "(x(xy))z = ((yz)x)x", 6, 111, 11188),
    ("M2", "Mate, II", "(y(xx))z = ((yz)x)x", 7, 196, 26785),
    ("M3", "Mate, III", "x(x(yz)) = y((zx)x)", 6, 111, 11188),
    ("M4", "Mate, IV", "x(x(yz)) = y((xx)z)", 7, 196, 26785),
    ("T1", "Triad, I", "(xx)(yz) = y(z(xx))", 6, 162, 67152),
    ("T2", "Triad, II", "((xx)y)z = y(z(xx))", 6, 180, 53832),
    ("T3", "Triad, III", "((xx)y)z = (yz)(xx)", 6, 162, 67152),
    ("T4", "Triad, IV", "((xx)y)z = ((yz)x)x", 6, 132, 42456),
    ("T5", "Triad, V", "x(x(yz)) = y(z(xx))", 6, 132, 42456),
    ("T6", "Triad, VI", "(xx)(yz) = (yz)(xx)", 8, 1419, 9356968),
    ("T7", "Triad, VII", "((xx)y)z = ((yx)x)z", 12, 428, 2914658),
    ("T8", "Triad, VIII", "(xx)(yz) = y((zx)x)", 6, 120, 11580),
    ("T9", "Triad, IX", "(x(xy))z = y(z(xx))", 6, 102, 6192),
    ("FR", "Frute", "(x(xy))z = (y(zx))x", 6, 129, 16600),
    ("CR", "Crazy Loop", "(x(xy))z = (yx)(xz)", 7, 136, 12545),
    ("KR", "Krypton", "((xx)y)z = (x(yz))x", 9, 268, 93227),
]

# (F_i)* = F_j as published for the classical list
THEOREM_EQUALITIES = (
    (1, 3), (2, 4), (5, 10), (6, 6), (7, 8), (9, 9), (11, 24), (12, 23),
    (13, 22), (14, 21), (15, 30), (16, 29), (17, 27), (18, 28), (19, 26),
    (20, 25), (31, 34), (32, 33), (35, 40), (36, 39), (37, 37), (38, 38),
    (41, 53), (42, 54), (43, 51), (44, 52), (45, 60), (46, 56), (47, 58),
    (48, 57), (49, 59), (50, 55),
)  # fmt: skip

# Named (12)-parastrophic pairs among the generalized identities
TABLE2_PAIRS = (
    ("LB", "RB"), ("LC", "RC"), ("LN", "RN"), ("L2", "L3"),
    ("M1", "M3"), ("M2", "M4"), ("T1", "T3"), ("T4", "T5"),
)  # fmt: skip


def _build() -> dict[str, CatalogEntry]:
    entries = {}
    for key, abbrev, text, raw, iso, iso_anti in _TABLE1:
        erratum = _TABLE1_ERRATA.get(key)
        entries[key] = CatalogEntry(
            key=key,
            identity=parse_identity(text, name=key, abbrev=abbrev or None),
            display_name=abbrev or key,
            scope=CatalogScope.CLASSICAL,
            text=text,
            expected_counts={2: ExpectedCounts(raw, iso, iso_anti)},
            errata={2: erratum} if erratum else {},
        )
    for key, name, text, *counts in _TABLE2:
        entries[key] = CatalogEntry(
            key=key,
            identity=parse_identity(text, name=key, abbrev=key),
            display_name=name,
            scope=CatalogScope.GENERALIZED,
            text=text,
            expected_counts={
                order: ExpectedCounts(raw) for order, raw in zip((2, 3, 4), counts)
            },
            errata=_TABLE2_ERRATA.get(key, {}),
        )
    return entries


_ENTRIES = _build()


def keys() -> list[str]:
    return list(_ENTRIES)


def get(key: str) -> CatalogEntry:
    """Look up an entry by key, case-insensitively (``f17`` finds ``F17``)."""
    entry = _ENTRIES.get(key) or _ENTRIES.get(key.upper())
    if entry is None:
        raise UnknownKeyError(key, near_matches(key, keys()))
    return entry


def list_entries(scope: CatalogScope = CatalogScope.ALL) -> list[CatalogEntry]:
    """Entries in catalog order: F1..F60, then the generalized table in order."""
    if scope is CatalogScope.ALL:
        return list(_ENTRIES.values())
    return [e for e in _ENTRIES.values() if e.scope is scope]


def find(identity: Identity) -> list[str]:
    """Keys of every entry equal to the identity up to renaming and orientation."""
    return [e.key for e in _ENTRIES.values() if identities_equal(e.identity, identity)]


@cache
def parastrophe_partner(key: str) -> str | None:
    """
    Key whose identity is the (12)-parastrophe of this one. The entry's own
    table is searched first (so C1 pairs with CD and F2 with F4), then the
    other one (ML pairs with F4). None when the catalog does not list it.
    """
    entry = get(key)
    target = parastrophe_identity(entry.identity)
    own = list_entries(entry.scope)
    rest = [e for e in list_entries() if e.scope is not entry.scope]
    for other in own + rest:
        if identities_equal(other.identity, target):
            return other.key
    return None


# ----------------------
# Export
# ----------------------
def catalog_frame(scope: CatalogScope = CatalogScope.ALL) -> pd.DataFrame:
    """One row per entry with both grammars and the published counts."""
    rows = []
    for entry in list_entries(scope):
        row = {
            "key": entry.key,
            "name": entry.display_name,
            "table": entry.scope.value,
            "class": entry.bm_class.value,
            "identity": format_identity(entry.identity, Grammar.COMPACT),
            "explicit": format_identity(entry.identity, Grammar.EXPLICIT),
            "printed": entry.text,
            "partner": parastrophe_partner(entry.key),
        }
        for order, counts in sorted(entry.expected_counts.items()):
            row[f"raw_{order}"] = counts.raw
            if counts.iso is not None:
                row[f"iso_{order}"] = counts.iso
                row[f"iso_anti_{order}"] = counts.iso_anti
        rows.append(row)
    frame = pd.DataFrame(rows)
    count_cols = [c for c in frame.columns if c.startswith(("raw_", "iso_"))]
    frame[count_cols] = frame[count_cols].astype("Int64")
    return frame


def export_catalog(path: Path, fmt: str = "json", scope: CatalogScope = CatalogScope.ALL):
    """Write the catalog as JSON records or CSV."""
    frame = catalog_frame(scope)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        frame.to_csv(path, index=False)
    elif fmt == "json":
        records = json.loads(frame.to_json(orient="records"))
        path.write_text(json.dumps(records, indent=2, ensure_ascii=False), encoding="utf-8")
    else:
        raise ValueError(f"❌ Unsupported catalog format {fmt!r} (expected json or csv)")
    logger.success(f"📝 Catalog ({len(frame)} entries) written to {relpath(path)}")
