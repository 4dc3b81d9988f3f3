"""Command-line front end for the enrichment pipeline.

Subcommands mirror the pipeline stages: ``describe`` (image or text to a
description file), ``base`` (PENMAN to the translated base graph),
``enrich`` (heuristic additions and merged graph), ``validate`` (lints,
consistency, precedence, profile), ``agree`` (rater statistics), and ``run``
(the whole chain). Every stage that would call a live model accepts
``--mock``, making the full pipeline reproducible offline.

Exit codes: 0 on success, 1 when ERROR diagnostics were produced (and
quarantine is engaged), 2 on configuration or input failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from . import agreement as agreement_mod
from . import validation
from .amr import AmrError, parse_penman_file
from .backends import (
    SUPPORTED_IMAGE_SUFFIXES,
    BackendError,
    HttpBackend,
    MockBackend,
    UnsupportedImageFormatError,
)
from .config import ConfigError, PipelineConfig, default_config, load_config
from .enrichment import HEURISTICS, HEURISTIC_BY_NAME, run_all
from .rdf import RdfError, RdfGraph, parse_turtle, serialize_turtle
from .translate import AlignmentMap, LinkTable, RolesetMap, align, link_entities, translate
from .validation import MiniOntology

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_CONFIG = 2


class CliError(Exception):
    """Fatal configuration or input problem (exit code 2)."""


def _load_pipeline_config(path: Optional[str]) -> PipelineConfig:
    try:
        return load_config(path) if path else default_config()
    except ConfigError as exc:
        raise CliError(str(exc))


def _make_backend(config: PipelineConfig, mock: bool):
    if mock:
        return MockBackend(config.require_resources().mock_dir)
    if not config.backend.endpoint:
        raise CliError("no backend endpoint configured; pass --mock or set backend.endpoint")
    return HttpBackend(config.backend)


def _write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")


def _write_json(path: Path, payload) -> None:
    _write(path, json.dumps(payload, indent=2) + "\n")


def _read_graph(path: Path) -> RdfGraph:
    try:
        return parse_turtle(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"graph file not found: {path}")
    except RdfError as exc:
        raise CliError(f"cannot parse {path}: {exc}")


def _build_base_graph(amr_path: Path, config: PipelineConfig) -> RdfGraph:
    resources = config.require_resources()
    try:
        graphs = parse_penman_file(amr_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"AMR file not found: {amr_path}")
    except AmrError as exc:
        raise CliError(f"cannot parse {amr_path}: {exc}")
    if not graphs:
        raise CliError(f"no graphs found in {amr_path}")
    if len(graphs) > 1:
        logger.info("found %d graphs in %s, translating the first", len(graphs), amr_path)
    rolesets = RolesetMap.from_json(resources.rolesets)
    alignments = AlignmentMap.from_json(resources.alignments)
    links = LinkTable.from_json(resources.links)
    graph = translate(graphs[0], rolesets)
    graph = align(graph, alignments)
    return link_entities(graph, links)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_describe(args: argparse.Namespace) -> int:
    config = _load_pipeline_config(args.config)
    out_dir = Path(args.out)
    if args.text:
        content = Path(args.text).read_text(encoding="utf-8")
    else:
        image = Path(args.image)
        if image.suffix.lower() not in SUPPORTED_IMAGE_SUFFIXES:
            raise CliError(f"unsupported image format: {image.suffix!r}")
        backend = _make_backend(config, args.mock)
        try:
            content = backend.describe(image)
        except UnsupportedImageFormatError as exc:
            raise CliError(str(exc))
        except BackendError as exc:
            raise CliError(f"description backend failed: {exc}")
    _write(out_dir / "description.txt", content)
    print(out_dir / "description.txt")
    return EXIT_OK


def cmd_base(args: argparse.Namespace) -> int:
    config = _load_pipeline_config(args.config)
    out_dir = Path(args.out)
    graph = _build_base_graph(Path(args.amr), config)
    _write(out_dir / "base-graph.ttl", serialize_turtle(graph))
    _write_json(out_dir / "base-profile.json", validation.profile(graph).to_dict())
    print(out_dir / "base-graph.ttl")
    return EXIT_OK


def _select_heuristics(selector: str):
    if selector == "all":
        return None
    chosen = []
    for name in selector.split(","):
        name = name.strip()
        if name not in HEURISTIC_BY_NAME:
            raise CliError(f"unknown heuristic {name!r}; known: "
                           + ", ".join(spec.name for spec in HEURISTICS))
        chosen.append(HEURISTIC_BY_NAME[name])
    return chosen


def cmd_enrich(args: argparse.Namespace) -> int:
    config = _load_pipeline_config(args.config)
    resources = config.require_resources()
    base = _read_graph(Path(args.base))
    backend = _make_backend(config, args.mock)
    force_merge = args.force_merge or config.force_merge
    results, merged = run_all(
        base, backend, resources.prompts_dir,
        heuristics=_select_heuristics(args.heuristic),
        max_tokens=config.backend.max_tokens,
        temperature=config.backend.temperature,
        max_concurrent=1 if args.mock else config.backend.max_concurrent,
        force_merge=force_merge,
    )
    out_dir = Path(args.out)
    for result in results:
        _write(out_dir / f"xkg-{result.heuristic}.ttl", serialize_turtle(result.xkg))
    _write(out_dir / "xkg-merged.ttl", serialize_turtle(merged))
    _write_json(out_dir / "diagnostics.json", {
        result.heuristic: {
            "added": len(result.added),
            "quarantined": result.failed and not force_merge,
            "diagnostics": [d.to_dict() for d in result.diagnostics],
        }
        for result in results
    })
    print(out_dir / "xkg-merged.ttl")
    failed = any(result.failed for result in results)
    return EXIT_DIAGNOSTICS if failed and not force_merge else EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = _load_pipeline_config(args.config)
    resources = config.require_resources()
    graph = _read_graph(Path(args.graph))
    base = _read_graph(Path(args.base)) if args.base else None
    onto = MiniOntology.from_turtle_file(resources.mini_ontology)

    diagnostics = validation.lint(graph)
    diagnostics.extend(validation.check_consistency(graph, onto))
    precedence = validation.infer_precedence(graph)
    diagnostics.extend(precedence.diagnostics)
    graph_profile = validation.profile(graph, base)

    report = {
        "diagnostics": [d.to_dict() for d in diagnostics],
        "profile": graph_profile.to_dict(),
        "precedence": {
            "asserted": [[a.value, b.value] for a, b in precedence.asserted],
            "inferred": [[a.value, b.value] for a, b in precedence.inferred],
        },
    }
    out_dir = Path(args.out)
    _write_json(out_dir / "validation-report.json", report)

    table = _profile_table(graph_profile)
    _write(out_dir / "validation-report.txt", table)
    print(table, end="")
    errors = [d for d in diagnostics if d.severity == validation.ERROR]
    for d in errors:
        print(f"{d.severity} {d.code}: {d.message}")
    return EXIT_DIAGNOSTICS if errors else EXIT_OK


def _profile_table(p: validation.GraphProfile) -> str:
    headers = ["Axioms", "WordNet", "PB Roles", "PB Frames", "VN Roles", "D0", "DUL", "OP", "DP"]
    values = [p.axioms, p.wordnet, p.pb_roles, p.pb_frames, p.vn_roles, p.d0, p.dul,
              "-" if p.new_op is None else p.new_op,
              "-" if p.new_dp is None else p.new_dp]
    cells = [str(v) for v in values]
    widths = [max(len(h), len(c)) for h, c in zip(headers, cells)]
    return (
        "  ".join(h.rjust(w) for h, w in zip(headers, widths)) + "\n"
        + "  ".join(c.rjust(w) for c, w in zip(cells, widths)) + "\n"
    )


def cmd_agree(args: argparse.Namespace) -> int:
    try:
        matrix = agreement_mod.load_ratings(args.ratings)
    except FileNotFoundError:
        raise CliError(f"ratings file not found: {args.ratings}")
    except agreement_mod.AgreementError as exc:
        raise CliError(str(exc))
    report = agreement_mod.build_report(
        matrix, heuristic_order=[spec.name for spec in HEURISTICS])
    out_dir = Path(args.out)
    _write(out_dir / "agreement-report.json", report.to_json())
    _write(out_dir / "agreement-report.txt", report.format_table())
    print(report.format_table(), end="")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_pipeline_config(args.config)
    out_dir = Path(args.out)

    code = cmd_describe(argparse.Namespace(
        config=args.config, out=args.out, text=args.text, image=args.image,
        mock=args.mock))
    if code != EXIT_OK:
        return code

    base = _build_base_graph(Path(args.amr), config)
    _write(out_dir / "base-graph.ttl", serialize_turtle(base))
    _write_json(out_dir / "base-profile.json", validation.profile(base).to_dict())

    enrich_code = cmd_enrich(argparse.Namespace(
        config=args.config, out=args.out, base=str(out_dir / "base-graph.ttl"),
        heuristic="all", mock=args.mock, force_merge=args.force_merge))

    validate_code = cmd_validate(argparse.Namespace(
        config=args.config, out=args.out, graph=str(out_dir / "xkg-merged.ttl"),
        base=str(out_dir / "base-graph.ttl")))

    return max(enrich_code, validate_code)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xkg",
        description="Build, enrich, and validate extended knowledge graphs from AMR.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="produce the scene description text")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--text", help="text file passed through unchanged")
    source.add_argument("--image", help="image file sent to the multimodal endpoint")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mock", action="store_true", help="use the canned description")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("base", help="translate a PENMAN file into the base graph")
    p.add_argument("--amr", required=True, help="PENMAN file")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_base)

    p = sub.add_parser("enrich", help="run enrichment heuristics over a base graph")
    p.add_argument("--base", required=True, help="base graph Turtle file")
    p.add_argument("--heuristic", default="all",
                   help="comma-separated heuristic names, or 'all'")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--mock", action="store_true", help="replay canned responses")
    p.add_argument("--force-merge", action="store_true",
                   help="merge additions even from heuristics with ERROR diagnostics")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("validate", help="lints, consistency, precedence, profile")
    p.add_argument("--graph", required=True, help="graph Turtle file")
    p.add_argument("--base", help="base graph for addition statistics")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("agree", help="rater-agreement statistics from a ratings CSV")
    p.add_argument("--ratings", required=True, help="CSV: item_id,heuristic,annotator,score")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_agree)

    p = sub.add_parser("run", help="full pipeline: describe, base, enrich, validate")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--text", help="scene description text file")
    source.add_argument("--image", help="scene image file")
    p.add_argument("--amr", required=True, help="pre-parsed PENMAN file for the text")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--mock", action="store_true")
    p.add_argument("--force-merge", action="store_true")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RdfError, AmrError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
