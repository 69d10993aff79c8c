#!/usr/bin/env python
"""
Command-line surface: count, enumerate, verify, parastrophe, classify,
classes and catalog.

Report data is written to stdout (or --output); logs and progress go to
stderr. Exit codes: 0 success / all checks match, 1 verification mismatch,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Iterable
from typing import TextIO

from loguru import logger

from bm_census import catalog
from bm_census.catalog import CatalogScope, UnknownKeyError
from bm_census.constants import MAX_ORDER, MIN_ORDER
from bm_census.enumeration import (
    Engine,
    FillOrder,
    SearchConfig,
    count_classes,
    count_satisfying,
    enumerate_satisfying,
)
from bm_census.magma import CayleyTable, ClassMode, TableFormatError, encode, to_dict
from bm_census.reporting import (
    OutputFormat,
    diffs_frame,
    render,
    reports_frame,
    write_report,
)
from bm_census.term import (
    Grammar,
    Identity,
    ParseError,
    Var,
    classify,
    format_identity,
    parastrophe_identity,
    parse_identity,
)
from bm_census.utils import relpath, resolve_jobs, resolve_output_path
from bm_census.verification import VerifyScope, run_verification

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

CLASS_CHOICES = {
    "none": (),
    "iso": (ClassMode.ISO,),
    "iso-anti": (ClassMode.ISO_ANTI,),
    "both": (ClassMode.ISO, ClassMode.ISO_ANTI),
}
SUFFIXES = {OutputFormat.TEXT: "txt", OutputFormat.CSV: "csv", OutputFormat.JSON: "json"}


# ----------------------
# Shared helpers
# ----------------------
def configure_logging(level: str):
    logger.remove()
    logger.add(sys.stderr, level=level.upper())


def _selected(args: argparse.Namespace) -> list[Identity]:
    """Identities named by every --id and --expr, in that order."""
    grammar = Grammar(args.grammar)
    identities = [catalog.get(key).identity for key in args.id or []]
    identities += [parse_identity(text, grammar) for text in args.expr or []]
    if not identities:
        raise ValueError("❌ Provide --id KEY or --expr IDENTITY")
    return identities


def _single(args: argparse.Namespace) -> Identity:
    identities = _selected(args)
    if len(identities) > 1:
        raise ValueError("❌ This command takes exactly one identity")
    return identities[0]


def _search_config(args: argparse.Namespace, **overrides) -> SearchConfig:
    return SearchConfig(
        engine=Engine(args.engine),
        jobs=resolve_jobs(args.jobs),
        fill_order=FillOrder(args.fill_order),
        allow_large_classes=getattr(args, "allow_large_classes", False),
        progress=args.progress,
        **overrides,
    )


def _emit(text: str, args: argparse.Namespace, stem: str, fmt: OutputFormat = OutputFormat.TEXT):
    if args.output is None:
        sys.stdout.write(text)
        return
    write_report(text, resolve_output_path(args.output or None, stem, SUFFIXES[fmt]))


def _stem(args: argparse.Namespace) -> str:
    return "_".join((args.id or []) + ["expr"] * len(args.expr or []))


# ----------------------
# Subcommands
# ----------------------
def cmd_count(args: argparse.Namespace) -> int:
    identities = _selected(args)
    cfg = _search_config(args, class_modes=CLASS_CHOICES[args.classes])
    report = count_satisfying(identities, args.order, cfg)
    logger.success(
        f"✅ {report.key or report.identity} @ order {args.order}: "
        f"{report.raw_count:,} tables in {report.elapsed:.2f}s"
    )
    fmt = OutputFormat(args.format)
    frame = reports_frame([report], include_timing=args.timing)
    _emit(render(frame, fmt), args, f"count {_stem(args)} order {args.order}", fmt)
    return EXIT_OK


def _write_tables(tables: Iterable[CayleyTable], handle: TextIO, stream_format: str) -> int:
    written = 0
    for table in tables:
        line = json.dumps(to_dict(table)) if stream_format == "jsonl" else encode(table)
        handle.write(f"{line}\n")
        written += 1
    return written


def cmd_enumerate(args: argparse.Namespace) -> int:
    identities = _selected(args)
    tables = enumerate_satisfying(identities, args.order, _search_config(args))
    if args.output is None:
        written = _write_tables(tables, sys.stdout, args.stream_format)
    else:
        stem = f"enumerate {_stem(args)} order {args.order}"
        path = resolve_output_path(args.output or None, stem, SUFFIXES[OutputFormat.TEXT])
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as handle:
            written = _write_tables(tables, handle, args.stream_format)
        logger.success(f"📝 Tables written to {relpath(path)}")
    logger.success(f"✅ {written:,} satisfying tables of order {args.order}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    run = run_verification(
        VerifyScope(args.scope), args.max_order, _search_config(args), args.cross_check
    )
    fmt = OutputFormat(args.format)
    _emit(
        render(diffs_frame(run.diffs), fmt),
        args,
        f"verify {args.scope} max order {args.max_order}",
        fmt,
    )
    for d in run.mismatches:
        label = "erratum" if d.erratum else "mismatch"
        logger.warning(
            f"⚠️ {label}: {d.key} order {d.order} {d.metric.value}: "
            f"expected {d.expected}, computed {d.computed}"
        )
    return EXIT_OK if run.passed(strict=args.strict) else EXIT_MISMATCH


def cmd_parastrophe(args: argparse.Namespace) -> int:
    identity = _single(args)
    partner = parastrophe_identity(identity)
    matches = catalog.find(partner)
    # a catalog key's own table takes precedence over coincidental matches
    if identity.name:
        listed = catalog.parastrophe_partner(identity.name)
        matches = [listed] if listed else matches
    if args.format == OutputFormat.JSON.value:
        payload = {
            "identity": format_identity(identity, Grammar(args.grammar)),
            "parastrophe": format_identity(partner, Grammar(args.grammar)),
            "catalog": matches,
        }
        text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    else:
        label = f"{identity.name}*" if identity.name else "F*"
        keys = ", ".join(matches) if matches else "-"
        text = f"{label}: {format_identity(partner, Grammar(args.grammar))}\ncatalog: {keys}\n"
    _emit(text, args, f"parastrophe {_stem(args)}", OutputFormat(args.format))
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    _emit(f"{classify(_single(args)).value}\n", args, f"classify {_stem(args)}")
    return EXIT_OK


def cmd_classes(args: argparse.Namespace) -> int:
    identities = _selected(args) if (args.id or args.expr) else [Identity(Var("x"), Var("x"))]
    mode = ClassMode(args.mode)
    cfg = _search_config(args, keep_representatives=True)
    report = count_classes(identities, args.order, mode, cfg)
    reps = report.representatives[mode]
    logger.success(f"✅ {len(reps)} {mode.value} classes among {report.raw_count:,} tables")
    if args.format == OutputFormat.JSON.value:
        text = json.dumps([to_dict(t) for t in reps], indent=2) + "\n"
    else:
        text = "".join(f"{encode(t)}\n" for t in reps)
    _emit(text, args, f"classes {mode.value} order {args.order}", OutputFormat(args.format))
    return EXIT_OK


def cmd_catalog(args: argparse.Namespace) -> int:
    scope = CatalogScope.get(args.scope)
    fmt = OutputFormat(args.format)
    if args.output is not None and fmt is not OutputFormat.TEXT:
        path = resolve_output_path(args.output or None, f"catalog {scope.value}", SUFFIXES[fmt])
        catalog.export_catalog(path, fmt.value, scope)
        return EXIT_OK
    _emit(render(catalog.catalog_frame(scope), fmt), args, f"catalog {scope.value}", fmt)
    return EXIT_OK


# ----------------------
# Parser
# ----------------------
def _add_common(p: argparse.ArgumentParser, formats=tuple(f.value for f in OutputFormat)):
    p.add_argument("--grammar", choices=[g.value for g in Grammar], default="compact")
    p.add_argument("--format", choices=formats, default="text", help="Report format")
    p.add_argument(
        "--output",
        nargs="?",
        const="",
        help="Write the report to PATH (a file or directory); without PATH, to the output dir",
    )
    p.add_argument("--log-level", default="INFO", help="loguru level for stderr logs")


def _add_selector(p: argparse.ArgumentParser):
    p.add_argument("--id", action="append", help="Catalog key (F17, EL, ...); repeatable")
    p.add_argument(
        "--expr", action="append", help="Inline identity, e.g. 'xy·zx = (xy·z)x'; repeatable"
    )


def _order(value: str) -> int:
    order = int(value)
    if not MIN_ORDER <= order <= MAX_ORDER:
        raise argparse.ArgumentTypeError(f"order must be in {MIN_ORDER}..{MAX_ORDER}")
    return order


def _add_search(p: argparse.ArgumentParser):
    p.add_argument("--engine", choices=[e.value for e in Engine], default="pruned")
    p.add_argument(
        "--jobs", type=int, help="Worker processes (default: BM_CENSUS_JOBS or CPU count)"
    )
    p.add_argument("--fill-order", choices=[f.value for f in FillOrder], default="auto")
    p.add_argument("--progress", action="store_true", help="Show shard progress on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bm-census", description="Count groupoids satisfying Bol-Moufang type identities"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="Count satisfying Cayley tables")
    _add_selector(p)
    _add_common(p)
    _add_search(p)
    p.add_argument("--order", type=_order, required=True)
    p.add_argument("--classes", choices=list(CLASS_CHOICES), default="none")
    p.add_argument("--allow-large-classes", action="store_true")
    p.add_argument("--timing", action="store_true", help="Include elapsed time and nodes")
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("enumerate", help="Stream satisfying tables in ascending order")
    _add_selector(p)
    _add_common(p, formats=("text",))
    _add_search(p)
    p.add_argument("--order", type=_order, required=True)
    p.add_argument("--stream-format", choices=["lines", "jsonl"], default="lines")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("verify", help="Diff computed counts against the published tables")
    _add_common(p)
    _add_search(p)
    p.add_argument("--scope", choices=[s.value for s in VerifyScope], default="all")
    p.add_argument("--max-order", type=_order, default=3)
    p.add_argument("--cross-check", action="store_true", help="Also run the naive engine")
    p.add_argument("--strict", action="store_true", help="Known errata count as mismatches")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("parastrophe", help="Mirror an identity and look up its partner")
    _add_selector(p)
    _add_common(p, formats=("text", "json"))
    p.set_defaults(handler=cmd_parastrophe)

    p = sub.add_parser("classify", help="Classical, generalized or neither")
    _add_selector(p)
    _add_common(p, formats=("text",))
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("classes", help="Canonical class representatives")
    _add_selector(p)
    _add_common(p, formats=("text", "json"))
    _add_search(p)
    p.add_argument("--order", type=_order, required=True)
    p.add_argument("--mode", choices=[m.value for m in ClassMode], default="iso")
    p.add_argument("--allow-large-classes", action="store_true")
    p.set_defaults(handler=cmd_classes)

    p = sub.add_parser("catalog", help="List or export the identity catalog")
    _add_common(p)
    p.add_argument("--scope", choices=[s.value for s in CatalogScope], default="all")
    p.set_defaults(handler=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except (ParseError, UnknownKeyError, TableFormatError, ValueError) as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
