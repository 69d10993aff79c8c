"""
Counting and enumerating Cayley tables that satisfy identities.

Two engines produce identical results:

* naive: scans every table in vectorized batches of integer keys.
* pruned: backtracks over cells. Each assignment of elements to the
  identity's variables is an "instance"; an instance waits on the first
  unfilled cell its evaluation reaches and is re-examined only when that cell
  is filled. A branch is cut as soon as some instance evaluates both sides to
  different values. Once every instance is decided the remaining cells are
  free and contribute n^free tables without further search.

Work is split into shards by fixing the first cells of the fill order (pruned)
or by key ranges (naive); shards run in a process pool and are merged in
shard order, so results do not depend on the worker count. Streaming
consumers receive each shard's tables as soon as it and every earlier shard
have finished.
"""

from __future__ import annotations

import itertools
from array import array
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from loguru import logger
from tqdm import tqdm

from bm_census.constants import (
    MAX_CLASS_ORDER,
    NAIVE_CHUNK,
    NAIVE_STREAM_SPAN,
    PARALLEL_MIN_ORDER,
    SHARDS_PER_JOB,
    STREAM_PREFIX_CELLS,
    UNGATED_CLASS_ORDER,
)
from bm_census.magma import (
    CayleyTable,
    ClassMode,
    canonical_keys,
    check_order,
    keys_to_cells,
    orbit_size,
    satisfying_mask,
    table_count,
)
from bm_census.term import (
    Identity,
    Term,
    Var,
    classify,
    format_identity,
    has_square,
    variables,
)
from bm_census.utils import stopwatch


class Engine(str, Enum):
    NAIVE = "naive"
    PRUNED = "pruned"


class FillOrder(str, Enum):
    AUTO = "auto"
    ROW_MAJOR = "row-major"
    DIAGONAL_FIRST = "diagonal-first"


@dataclass(frozen=True)
class SearchConfig:
    engine: Engine = Engine.PRUNED
    jobs: int = 1
    fill_order: FillOrder = FillOrder.AUTO
    sink: Callable[[CayleyTable], None] | None = None
    class_modes: tuple[ClassMode, ...] = ()
    allow_large_classes: bool = False
    keep_representatives: bool = False
    shard_cells: int | None = None
    progress: bool = False

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError(f"❌ Worker count must be at least 1, got {self.jobs}")
        if self.shard_cells is not None and self.shard_cells < 0:
            raise ValueError(f"❌ shard_cells must be non-negative, got {self.shard_cells}")


@dataclass(frozen=True)
class CountReport:
    identity: str
    order: int
    raw_count: int
    engine: Engine
    elapsed: float
    key: str | None = None
    iso_classes: int | None = None
    iso_anti_classes: int | None = None
    nodes_visited: int | None = None
    bm_class: str | None = None  # single identities only
    representatives: dict[ClassMode, tuple[CayleyTable, ...]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self):
        if self.iso_classes is not None and self.iso_classes > self.raw_count:
            raise ValueError(f"❌ {self.iso_classes} iso classes exceed {self.raw_count} tables")
        if (
            self.iso_classes is not None
            and self.iso_anti_classes is not None
            and self.iso_anti_classes > self.iso_classes
        ):
            raise ValueError(
                f"❌ {self.iso_anti_classes} iso/anti classes exceed {self.iso_classes} iso classes"
            )


IdentityArg = Identity | Sequence[Identity]


def _as_list(identities: IdentityArg) -> list[Identity]:
    if isinstance(identities, Identity):
        return [identities]
    return list(identities)


def _describe(identities: list[Identity]) -> tuple[str, str | None]:
    text = " ∧ ".join(format_identity(i) for i in identities)
    names = [i.name for i in identities if i.name]
    key = "+".join(names) if len(names) == len(identities) else None
    return text, key


# ----------------------
# Search plan
# ----------------------
Node = int | tuple  # element, or (left node, right node)


@dataclass(frozen=True)
class _Plan:
    """Picklable compiled problem shared by every shard."""

    order: int
    instances: tuple[tuple[Node, Node], ...]
    fill: tuple[int, ...]


def _ground(term: Term, env: dict[str, int]) -> Node:
    if isinstance(term, Var):
        return env[term.name]
    return (_ground(term.left, env), _ground(term.right, env))


def fill_sequence(identities: list[Identity], order: int, strategy: FillOrder) -> tuple[int, ...]:
    """
    Cell indices in the order the pruned engine fills them. AUTO puts the
    diagonal first when some identity squares a variable, so instances
    reading ``xx`` are decided early.
    """
    row_major = tuple(range(order * order))
    if strategy is FillOrder.AUTO:
        squares = any(has_square(i.lhs) or has_square(i.rhs) for i in identities)
        strategy = FillOrder.DIAGONAL_FIRST if squares else FillOrder.ROW_MAJOR
    if strategy is FillOrder.ROW_MAJOR:
        return row_major
    diagonal = tuple(i * order + i for i in range(order))
    return diagonal + tuple(c for c in row_major if c not in diagonal)


def compile_plan(identities: list[Identity], order: int, strategy: FillOrder) -> _Plan:
    instances = []
    for identity in identities:
        names = variables(identity)
        for values in itertools.product(range(order), repeat=len(names)):
            env = dict(zip(names, values))
            instances.append((_ground(identity.lhs, env), _ground(identity.rhs, env)))
    return _Plan(order, tuple(instances), fill_sequence(identities, order, strategy))


# ----------------------
# Pruned engine
# ----------------------
_SATISFIED = -1
_VIOLATED = -2


def _resolve(node: Node, cells: list[int], n: int) -> int:
    """Element value, or -1 - cell for the first unfilled cell reached."""
    if node.__class__ is int:
        return node
    left = _resolve(node[0], cells, n)
    if left < 0:
        return left
    right = _resolve(node[1], cells, n)
    if right < 0:
        return right
    index = left * n + right
    value = cells[index]
    return value if value >= 0 else -1 - index


def _probe(instance: tuple[Node, Node], cells: list[int], n: int) -> int:
    """_SATISFIED, _VIOLATED, or the index of the cell the instance waits on."""
    lhs = _resolve(instance[0], cells, n)
    if lhs < 0:
        return -1 - lhs
    rhs = _resolve(instance[1], cells, n)
    if rhs < 0:
        return -1 - rhs
    return _SATISFIED if lhs == rhs else _VIOLATED


@dataclass
class _ShardResult:
    count: int = 0
    nodes: int = 0
    keys: np.ndarray | None = None
    classes: dict[ClassMode, np.ndarray] = field(default_factory=dict)


class _Backtracker:
    def __init__(self, plan: _Plan, prefix: tuple[int, ...], collect: bool):
        n = plan.order
        self.plan = plan
        self.n = n
        self.prefix = prefix
        self.collect = collect
        self.cells = [-1] * (n * n)
        self.watch: list[list[int]] = [[] for _ in range(n * n)]
        self.weights = [n ** (n * n - 1 - c) for c in range(n * n)]
        self.offsets: dict[int, np.ndarray] = {}
        self.keys = array("q")
        self.count = 0
        self.nodes = 0
        self.pending = 0
        self.dead = False
        for index, instance in enumerate(plan.instances):
            state = _probe(instance, self.cells, n)
            if state == _VIOLATED:
                self.dead = True
            elif state >= 0:
                self.watch[state].append(index)
                self.pending += 1

    def run(self) -> _ShardResult:
        if not self.dead:
            self._descend(0, 0)
        keys = np.array(self.keys, dtype=np.int64) if self.collect else None
        return _ShardResult(self.count, self.nodes, keys)

    def _free_offsets(self, depth: int) -> np.ndarray:
        """Key offsets of every completion of the cells fill[depth:]."""
        if depth not in self.offsets:
            free = self.plan.fill[depth:]
            grid = np.asarray(
                list(itertools.product(range(self.n), repeat=len(free))), dtype=np.int64
            ).reshape(-1, len(free))
            weights = np.asarray([self.weights[c] for c in free], dtype=np.int64)
            self.offsets[depth] = grid @ weights if len(free) else np.zeros(1, np.int64)
        return self.offsets[depth]

    def _descend(self, depth: int, base: int):
        self.nodes += 1
        fill = self.plan.fill
        if self.pending == 0 and depth >= len(self.prefix):
            free = len(fill) - depth
            self.count += self.n**free
            if self.collect:
                if free:
                    completions = self._free_offsets(depth) + base
                    self.keys.frombytes(completions.astype(np.int64).tobytes())
                else:
                    self.keys.append(base)
            return

        cell = fill[depth]
        cells, watch, n = self.cells, self.watch, self.n
        watchers = watch[cell]
        values = (self.prefix[depth],) if depth < len(self.prefix) else range(n)
        for value in values:
            cells[cell] = value
            moved = []
            consistent = True
            for index in watchers:
                state = _probe(self.plan.instances[index], cells, n)
                if state == _VIOLATED:
                    consistent = False
                    break
                if state >= 0:
                    watch[state].append(index)
                    moved.append(state)
            if consistent:
                saved = self.pending
                self.pending += len(moved) - len(watchers)
                self._descend(depth + 1, base + value * self.weights[cell])
                self.pending = saved
            for target in reversed(moved):
                watch[target].pop()
        cells[cell] = -1


def _class_sets(keys: np.ndarray, order: int, modes: tuple[ClassMode, ...]):
    return {mode: np.unique(canonical_keys(keys, order, mode)) for mode in modes}


def _run_pruned_shard(
    plan: _Plan, prefix: tuple[int, ...], modes: tuple[ClassMode, ...], collect: bool
) -> _ShardResult:
    result = _Backtracker(plan, prefix, collect or bool(modes)).run()
    if modes:
        result.classes = _class_sets(result.keys, plan.order, modes)
        if not collect:
            result.keys = None
    return result


def _run_naive_shard(
    identities: list[Identity],
    order: int,
    span: tuple[int, int],
    modes: tuple[ClassMode, ...],
    collect: bool,
) -> _ShardResult:
    start, stop = span
    result = _ShardResult()
    found = []
    for low in range(start, stop, NAIVE_CHUNK):
        keys = np.arange(low, min(low + NAIVE_CHUNK, stop), dtype=np.int64)
        mask = satisfying_mask(keys_to_cells(keys, order), identities, order)
        result.count += int(mask.sum())
        if collect or modes:
            found.append(keys[mask])
    if collect or modes:
        keys = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
        result.classes = _class_sets(keys, order, modes)
        result.keys = keys if collect else None
    return result


# ----------------------
# Sharding and dispatch
# ----------------------
def _prefix_cells(plan: _Plan, cfg: SearchConfig) -> int:
    if cfg.shard_cells is not None:
        return min(cfg.shard_cells, len(plan.fill))
    if cfg.jobs == 1:
        return 0
    k = 0
    while plan.order**k < SHARDS_PER_JOB * cfg.jobs and k < len(plan.fill):
        k += 1
    return k


def _naive_spans(order: int, cfg: SearchConfig, collect: bool) -> list[tuple[int, int]]:
    total = table_count(order)
    pieces = 1 if cfg.jobs == 1 else min(total, SHARDS_PER_JOB * cfg.jobs)
    if collect:
        pieces = max(pieces, -(-total // NAIVE_STREAM_SPAN))
    bounds = np.linspace(0, total, pieces + 1, dtype=np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _dispatch(
    worker, tasks: list[tuple], cfg: SearchConfig, label: str
) -> Iterator[_ShardResult]:
    """
    Run shard tasks inline or in a process pool and yield results in task
    order. Pool results that finish early wait only for their predecessors.
    """
    if cfg.jobs == 1 or len(tasks) == 1:
        for task in tqdm(tasks, desc=label, disable=not cfg.progress):
            yield worker(*task)
        return

    logger.debug(f"⚡ {label}: {len(tasks)} shards on {cfg.jobs} workers")
    executor = ProcessPoolExecutor(max_workers=cfg.jobs)
    try:
        futures = {executor.submit(worker, *task): i for i, task in enumerate(tasks)}
        ready: dict[int, _ShardResult] = {}
        upcoming = 0
        for future in tqdm(
            as_completed(futures), total=len(tasks), desc=label, disable=not cfg.progress
        ):
            ready[futures[future]] = future.result()
            while upcoming in ready:
                yield ready.pop(upcoming)
                upcoming += 1
    finally:
        executor.shutdown(wait=True, cancel_futures=True)


def _search(
    identities: list[Identity],
    order: int,
    cfg: SearchConfig,
    modes: tuple[ClassMode, ...],
    collect: bool,
    fill_order: FillOrder | None = None,
) -> Iterator[_ShardResult]:
    check_order(order)
    if order < PARALLEL_MIN_ORDER and cfg.shard_cells is None:
        cfg = replace(cfg, jobs=1)
    if cfg.engine is Engine.NAIVE:
        if order >= 4:
            logger.warning(
                f"⚠️ Naive engine scans all {table_count(order):,} tables of order {order}"
            )
        spans = _naive_spans(order, cfg, collect)
        tasks = [(identities, order, span, modes, collect) for span in spans]
        return _dispatch(_run_naive_shard, tasks, cfg, "naive shards")

    plan = compile_plan(identities, order, fill_order or cfg.fill_order)
    k = _prefix_cells(plan, cfg)
    if collect and cfg.shard_cells is None:
        k = max(k, min(STREAM_PREFIX_CELLS, len(plan.fill)))
    prefixes = itertools.product(range(order), repeat=k)
    tasks = [(plan, prefix, modes, collect) for prefix in prefixes]
    return _dispatch(_run_pruned_shard, tasks, cfg, "pruned shards")


def _report(
    identities: list[Identity],
    order: int,
    cfg: SearchConfig,
    modes: tuple[ClassMode, ...],
    collect: bool,
    fill_order: FillOrder | None = None,
    on_shard: Callable[[_ShardResult], None] | None = None,
) -> CountReport:
    """Consume shard results as they arrive; on_shard sees each one in order."""
    text, key = _describe(identities)
    raw = nodes = 0
    parts: dict[ClassMode, list[np.ndarray]] = {mode: [] for mode in modes}
    with stopwatch() as elapsed:
        for result in _search(identities, order, cfg, modes, collect, fill_order):
            raw += result.count
            nodes += result.nodes
            for mode in modes:
                parts[mode].append(result.classes[mode])
            if on_shard is not None:
                on_shard(result)
        classes = {mode: np.unique(np.concatenate(parts[mode])) for mode in modes}
        seconds = elapsed()

    representatives = {}
    if cfg.keep_representatives:
        representatives = {
            mode: tuple(CayleyTable.from_key(int(k), order) for k in classes[mode])
            for mode in modes
        }
        if ClassMode.ISO in representatives:
            _check_orbit_sum(representatives[ClassMode.ISO], raw, text)

    report = CountReport(
        identity=text,
        key=key,
        order=order,
        raw_count=raw,
        engine=cfg.engine,
        elapsed=seconds,
        iso_classes=len(classes[ClassMode.ISO]) if ClassMode.ISO in classes else None,
        iso_anti_classes=(
            len(classes[ClassMode.ISO_ANTI]) if ClassMode.ISO_ANTI in classes else None
        ),
        nodes_visited=nodes if cfg.engine is Engine.PRUNED else None,
        bm_class=classify(identities[0]).value if len(identities) == 1 else None,
        representatives=representatives,
    )
    logger.debug(
        f"✅ {key or text} @ order {order}: {raw} tables "
        f"({cfg.engine.value}, {seconds:.2f}s)"
    )
    return report


def _check_orbit_sum(reps: tuple[CayleyTable, ...], raw: int, text: str):
    total = sum(orbit_size(rep, ClassMode.ISO) for rep in reps)
    if total != raw:
        raise RuntimeError(f"❌ Iso orbits of {text} cover {total} tables, counted {raw}")


def _tables(result: _ShardResult, order: int) -> Iterator[CayleyTable]:
    for key in result.keys:
        yield CayleyTable.from_key(int(key), order)


# ----------------------
# Public operations
# ----------------------
def prune_search(
    identities: IdentityArg, order: int, cfg: SearchConfig = SearchConfig()
) -> CountReport:
    """Raw count with the pruned backtracking engine."""
    if cfg.engine is not Engine.PRUNED:
        cfg = replace(cfg, engine=Engine.PRUNED)
    return _report(_as_list(identities), order, cfg, (), False)


def naive_search(
    identities: IdentityArg, order: int, cfg: SearchConfig = SearchConfig()
) -> CountReport:
    """Raw count by scanning every table."""
    if cfg.engine is not Engine.NAIVE:
        cfg = replace(cfg, engine=Engine.NAIVE)
    return _report(_as_list(identities), order, cfg, (), False)


def count_satisfying(
    identities: IdentityArg, order: int, cfg: SearchConfig = SearchConfig()
) -> CountReport:
    """
    Number of order-n tables satisfying every identity. Class counts are
    included for cfg.class_modes, and satisfying tables are streamed to
    cfg.sink when one is set.
    """
    identities = _as_list(identities)
    modes = cfg.class_modes
    if modes:
        _check_class_order(order, cfg)
    collect = cfg.sink is not None
    if not collect:
        return _report(identities, order, cfg, modes, False)

    def feed(result: _ShardResult):
        for table in _tables(result, order):
            cfg.sink(table)

    return _report(identities, order, cfg, modes, True, FillOrder.ROW_MAJOR, feed)


def enumerate_satisfying(
    identities: IdentityArg, order: int, cfg: SearchConfig = SearchConfig()
) -> Iterator[CayleyTable]:
    """
    Each satisfying table once, in ascending encode order. Tables are yielded
    shard by shard while the search is still running.
    """
    emitted = 0
    for result in _search(_as_list(identities), order, cfg, (), True, FillOrder.ROW_MAJOR):
        emitted += result.count
        yield from _tables(result, order)
    logger.debug(f"✅ Streamed {emitted} tables of order {order}")


def count_classes(
    identities: IdentityArg,
    order: int,
    modes: ClassMode | Sequence[ClassMode] = ClassMode.ISO,
    cfg: SearchConfig = SearchConfig(),
) -> CountReport:
    """Raw count plus the number of distinct canonical forms per mode."""
    modes = (modes,) if isinstance(modes, ClassMode) else tuple(modes)
    return count_satisfying(identities, order, replace(cfg, class_modes=modes))


def _check_class_order(order: int, cfg: SearchConfig):
    if order > MAX_CLASS_ORDER:
        raise ValueError(f"❌ Class counting supports orders up to {MAX_CLASS_ORDER}")
    if order > UNGATED_CLASS_ORDER and not cfg.allow_large_classes:
        raise ValueError(
            f"❌ Class counting at order {order} holds every solution's canonical form "
            "in memory; set allow_large_classes to proceed"
        )

