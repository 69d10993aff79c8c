"""
Cayley tables of finite groupoids and their semantics.

Elements are 1..n, matching the digit-string notation where ``22 12`` is the
order-2 table with rows ``2 2`` and ``1 2``. Bulk operations work on integer
keys instead: the row-major digits read as a base-n number with 0-based
digits, so numeric order of keys equals the order of the digit strings.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import cache

import numpy as np

from bm_census.constants import CANONICAL_CHUNK, MAX_ORDER, MIN_ORDER
from bm_census.term import Identity, Term, Var, variables

UNFILLED = 0


class Morphism(str, Enum):
    ISO = "iso"
    ANTI_ISO = "anti-iso"


class ClassMode(str, Enum):
    ISO = "iso"
    ISO_ANTI = "iso-anti"


class TableFormatError(ValueError):
    pass


class OrderMismatchError(ValueError):
    pass


def check_order(order: int) -> int:
    if not MIN_ORDER <= order <= MAX_ORDER:
        raise ValueError(f"❌ Order must be in {MIN_ORDER}..{MAX_ORDER}, got {order}")
    return order


# ----------------------
# Permutations
# ----------------------
@dataclass(frozen=True, slots=True)
class Permutation:
    """Bijection on 1..n given by its images: image[i - 1] is where i goes."""

    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(1, len(self.image) + 1)):
            raise ValueError(f"❌ Not a permutation of 1..{len(self.image)}: {self.image}")

    @property
    def order(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, order: int) -> Permutation:
        return cls(tuple(range(1, order + 1)))

    @classmethod
    def transposition(cls, order: int, a: int, b: int) -> Permutation:
        image = list(range(1, order + 1))
        image[a - 1], image[b - 1] = b, a
        return cls(tuple(image))

    def __call__(self, element: int) -> int:
        return self.image[element - 1]

    def inverse(self) -> Permutation:
        image = [0] * self.order
        for source, target in enumerate(self.image, start=1):
            image[target - 1] = source
        return Permutation(tuple(image))

    def compose(self, other: Permutation) -> Permutation:
        """``(self ∘ other)(a) = self(other(a))``."""
        return Permutation(tuple(self(other(a)) for a in range(1, self.order + 1)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.image, dtype=np.int64) - 1


def all_permutations(order: int) -> Iterator[Permutation]:
    for image in itertools.permutations(range(1, order + 1)):
        yield Permutation(image)


@cache
def _permutation_arrays(order: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """(perm, inverse) 0-based index arrays for every permutation of the order."""
    arrays = []
    for image in itertools.permutations(range(order)):
        perm = np.asarray(image, dtype=np.int64)
        arrays.append((perm, np.argsort(perm)))
    return tuple(arrays)


# ----------------------
# Tables
# ----------------------
@dataclass(frozen=True, slots=True)
class CayleyTable:
    """Row-major cells; cells[(a - 1) * n + (b - 1)] is a·b, or UNFILLED."""

    order: int
    cells: tuple[int, ...]

    def __post_init__(self):
        n = self.order
        if n < 1:
            raise TableFormatError(f"❌ Order must be positive, got {n}")
        if len(self.cells) != n * n:
            raise TableFormatError(
                f"❌ Order-{n} table needs {n * n} cells, got {len(self.cells)}"
            )
        bad = [c for c in self.cells if not 0 <= c <= n]
        if bad:
            raise TableFormatError(f"❌ Cell values outside 1..{n}: {bad}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> CayleyTable:
        return cls(len(rows), tuple(int(c) for row in rows for c in row))

    @classmethod
    def from_array(cls, array: np.ndarray) -> CayleyTable:
        """Build from a 0-based (n, n) array."""
        return cls(array.shape[0], tuple(int(c) + 1 for c in array.ravel()))

    @property
    def complete(self) -> bool:
        return UNFILLED not in self.cells

    def require_complete(self):
        if not self.complete:
            raise ValueError(f"❌ Table {encode(self)} has unfilled cells")

    def product(self, a: int, b: int) -> int:
        value = self.cells[(a - 1) * self.order + (b - 1)]
        if value == UNFILLED:
            raise ValueError(f"❌ Cell {a}·{b} is unfilled")
        return value

    def with_cell(self, a: int, b: int, value: int) -> CayleyTable:
        cells = list(self.cells)
        cells[(a - 1) * self.order + (b - 1)] = value
        return CayleyTable(self.order, tuple(cells))

    def as_array(self) -> np.ndarray:
        """0-based (n, n) array; requires a complete table."""
        self.require_complete()
        return np.asarray(self.cells, dtype=np.int64).reshape(self.order, self.order) - 1

    @property
    def key(self) -> int:
        self.require_complete()
        n = self.order
        key = 0
        for cell in self.cells:
            key = key * n + (cell - 1)
        return key

    @classmethod
    def from_key(cls, key: int, order: int) -> CayleyTable:
        digits = []
        for _ in range(order * order):
            key, digit = divmod(key, order)
            digits.append(digit + 1)
        return cls(order, tuple(reversed(digits)))

    def is_commutative(self) -> bool:
        self.require_complete()
        array = self.as_array()
        return bool(np.array_equal(array, array.T))

    def __str__(self) -> str:
        return encode(self)


def empty_table(order: int) -> CayleyTable:
    return CayleyTable(order, (UNFILLED,) * (order * order))


def decode(text: str, order: int) -> CayleyTable:
    """Read n² digits row-major, ignoring whitespace: ``22 12`` → 1·1=2, 1·2=2, 2·1=1, 2·2=2."""
    digits = [c for c in text if not c.isspace()]
    if len(digits) != order * order:
        raise TableFormatError(
            f"❌ Order-{order} table needs {order * order} digits, got {len(digits)} in {text!r}"
        )
    cells = []
    for position, char in enumerate(digits):
        if not char.isdigit() or not 1 <= int(char) <= order:
            raise TableFormatError(
                f"❌ Digit {char!r} at position {position} is outside 1..{order}"
            )
        cells.append(int(char))
    return CayleyTable(order, tuple(cells))


def encode(table: CayleyTable) -> str:
    """Rows of digits separated by spaces; unfilled cells print as '.'."""
    n = table.order
    text = "".join(str(c) if c != UNFILLED else "." for c in table.cells)
    return " ".join(text[i : i + n] for i in range(0, n * n, n))


def to_dict(table: CayleyTable) -> dict:
    n = table.order
    rows = [list(table.cells[i : i + n]) for i in range(0, n * n, n)]
    return {"order": n, "cells": rows, "encode": encode(table)}


# ----------------------
# Integer keys, vectorized
# ----------------------
def _powers(order: int) -> np.ndarray:
    return order ** np.arange(order * order - 1, -1, -1, dtype=np.int64)


def table_count(order: int) -> int:
    return order ** (order * order)


def keys_to_cells(keys: np.ndarray, order: int) -> np.ndarray:
    """(B,) keys → (B, n²) 0-based cells."""
    keys = np.asarray(keys, dtype=np.int64)
    return (keys[:, None] // _powers(order)) % order


def cells_to_keys(cells: np.ndarray, order: int) -> np.ndarray:
    """(B, n²) 0-based cells → (B,) keys."""
    return (np.asarray(cells, dtype=np.int64) * _powers(order)).sum(axis=1)


def all_tables(order: int) -> Iterator[CayleyTable]:
    """Every table of the order in ascending encode order."""
    for cells in itertools.product(range(1, order + 1), repeat=order * order):
        yield CayleyTable(order, cells)


# ----------------------
# Evaluation
# ----------------------
def evaluate(table: CayleyTable, term: Term, assignment: dict[str, int]) -> int:
    """Value of the term with variables bound to elements 1..n."""
    if isinstance(term, Var):
        try:
            return assignment[term.name]
        except KeyError:
            raise ValueError(f"❌ Assignment does not bind {term.name!r}") from None
    left = evaluate(table, term.left, assignment)
    right = evaluate(table, term.right, assignment)
    return table.product(left, right)


def assignments(names: Sequence[str], order: int) -> Iterator[dict[str, int]]:
    for values in itertools.product(range(1, order + 1), repeat=len(names)):
        yield dict(zip(names, values))


def satisfies(table: CayleyTable, identity: Identity) -> bool:
    """True iff both sides agree under all n^v assignments."""
    table.require_complete()
    names = variables(identity)
    return all(
        evaluate(table, identity.lhs, a) == evaluate(table, identity.rhs, a)
        for a in assignments(names, table.order)
    )


def _evaluate_batch(term: Term, cells: np.ndarray, env: dict[str, np.ndarray], n: int):
    if isinstance(term, Var):
        return np.broadcast_to(env[term.name], (cells.shape[0], env[term.name].shape[0]))
    left = _evaluate_batch(term.left, cells, env, n)
    right = _evaluate_batch(term.right, cells, env, n)
    return np.take_along_axis(cells, left * n + right, axis=1)


def satisfying_mask(
    cells: np.ndarray, identities: Iterable[Identity], order: int
) -> np.ndarray:
    """
    Vectorized satisfaction for a batch of tables.

    cells is (B, n²) with 0-based values; the result is a (B,) bool mask that
    is true where every identity holds under every assignment.
    """
    cells = np.asarray(cells, dtype=np.int64)
    mask = np.ones(cells.shape[0], dtype=bool)
    for identity in identities:
        names = variables(identity)
        grid = np.asarray(
            list(itertools.product(range(order), repeat=len(names))), dtype=np.int64
        ).reshape(-1, len(names))
        env = {name: grid[:, i] for i, name in enumerate(names)}
        lhs = _evaluate_batch(identity.lhs, cells, env, order)
        rhs = _evaluate_batch(identity.rhs, cells, env, order)
        mask &= (lhs == rhs).all(axis=1)
    return mask


# ----------------------
# Translations and the (12)-parastrophe
# ----------------------
def left_translation(table: CayleyTable, a: int) -> dict[int, int]:
    """L_a: x ↦ a·x."""
    table.require_complete()
    return {x: table.product(a, x) for x in range(1, table.order + 1)}


def right_translation(table: CayleyTable, a: int) -> dict[int, int]:
    """R_a: x ↦ x·a."""
    table.require_complete()
    return {x: table.product(x, a) for x in range(1, table.order + 1)}


def parastrophe_table(table: CayleyTable) -> CayleyTable:
    """Cayley table of x∗y = y·x: the transpose."""
    table.require_complete()
    return CayleyTable.from_array(table.as_array().T)


# ----------------------
# Isomorphisms
# ----------------------
def _check_orders(*orders: int):
    if len(set(orders)) != 1:
        raise OrderMismatchError(f"❌ Orders do not match: {orders}")


def apply_permutation(
    table: CayleyTable, alpha: Permutation, mode: Morphism = Morphism.ISO
) -> CayleyTable:
    """
    Iso:      x∘y = α⁻¹(αx · αy)
    AntiIso:  x∘y = α⁻¹(αy · αx)
    """
    _check_orders(table.order, alpha.order)
    array = table.as_array()
    if mode is Morphism.ANTI_ISO:
        array = array.T
    perm = alpha.as_array()
    return CayleyTable.from_array(np.argsort(perm)[array[np.ix_(perm, perm)]])


def _find_morphism(
    source: CayleyTable, target: CayleyTable, mode: Morphism
) -> Permutation | None:
    _check_orders(source.order, target.order)
    for alpha in all_permutations(source.order):
        if apply_permutation(source, alpha, mode) == target:
            return alpha
    return None


def is_isomorphic(t1: CayleyTable, t2: CayleyTable) -> Permutation | None:
    """A witness α with t2 = t1 relabeled by α, if one exists."""
    return _find_morphism(t1, t2, Morphism.ISO)


def is_anti_isomorphic(t1: CayleyTable, t2: CayleyTable) -> Permutation | None:
    return _find_morphism(t1, t2, Morphism.ANTI_ISO)


def _morphisms(mode: ClassMode) -> tuple[Morphism, ...]:
    if mode is ClassMode.ISO:
        return (Morphism.ISO,)
    return (Morphism.ISO, Morphism.ANTI_ISO)


def orbit(table: CayleyTable, mode: ClassMode = ClassMode.ISO) -> set[CayleyTable]:
    return {
        apply_permutation(table, alpha, morphism)
        for alpha in all_permutations(table.order)
        for morphism in _morphisms(mode)
    }


def orbit_size(table: CayleyTable, mode: ClassMode = ClassMode.ISO) -> int:
    return len(orbit(table, mode))


def automorphisms(table: CayleyTable) -> list[Permutation]:
    return [
        alpha
        for alpha in all_permutations(table.order)
        if apply_permutation(table, alpha) == table
    ]


def canonical_keys(keys: np.ndarray, order: int, mode: ClassMode) -> np.ndarray:
    """Orbit-minimum key for each key in the batch."""
    keys = np.asarray(keys, dtype=np.int64)
    result = np.empty_like(keys)
    for start in range(0, len(keys), CANONICAL_CHUNK):
        chunk = keys[start : start + CANONICAL_CHUNK]
        cells = keys_to_cells(chunk, order).reshape(-1, order, order)
        views = [cells]
        if mode is ClassMode.ISO_ANTI:
            views.append(cells.transpose(0, 2, 1))
        best = chunk.copy()
        for perm, inverse in _permutation_arrays(order):
            for view in views:
                moved = inverse[view[:, perm][:, :, perm]]
                best = np.minimum(best, cells_to_keys(moved.reshape(len(chunk), -1), order))
        result[start : start + len(chunk)] = best
    return result


def canonical_form(table: CayleyTable, mode: ClassMode = ClassMode.ISO) -> CayleyTable:
    """Lexicographically least encoding over the table's orbit."""
    key = canonical_keys(np.asarray([table.key]), table.order, mode)[0]
    return CayleyTable.from_key(int(key), table.order)
