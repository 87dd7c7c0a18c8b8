"""Command-line front end.

Subcommands::

    groupanon signal       --config cfg.json --group NAME   goal signal CSV + SVG chart
    groupanon decompose    --config cfg.json --group NAME   wavelet coefficients CSV
    groupanon redistribute --config cfg.json --group NAME   redistribution report for one group
    groupanon remap        --config cfg.json --group NAME   modified table realizing one group
    groupanon run          --config cfg.json                full pipeline over all groups
    groupanon verify                                        reference-value check table

Exit codes: 0 success, 1 stage error, 2 configuration error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import GroupConfig, PipelineConfig, load_pipeline_config
from .errors import ConfigError, GroupAnonError, StageError
from .charts import svg_line_chart
from .microfile import load_microfile, write_microfile
from .pipeline import build_goal_signal, run_group, run_pipeline, write_outputs, write_signal_csv
from .verify import format_table, has_failures, verify_reference_values
from .wavelet import decompose, get_filter

EXIT_OK = 0
EXIT_STAGE = 1
EXIT_CONFIG = 2
EXIT_VERIFY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupanon",
        description="Conceal group-level distribution features in statistical microfiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_group):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="pipeline configuration file (JSON)")
        p.add_argument("--input", help="override the configured input CSV")
        p.add_argument("--output", help="override the configured output CSV")
        p.add_argument("--report", help="override the configured report directory")
        p.add_argument("--seed", type=int, help="override the configured sampling seed")
        if needs_group:
            p.add_argument("--group", required=True, help="group name from the config")
        return p

    add("signal", "write a group's goal signal as CSV plus an SVG chart", True)
    add("decompose", "write a group's wavelet coefficients as CSV", True)
    add("redistribute", "run a group through constraint solving and repair", True)
    add("remap", "realize one group's modified signal in the table", True)
    add("run", "run the full pipeline over every configured group", False)
    p = sub.add_parser("verify", help="recompute the bundled reference values")
    p.add_argument("--fixture", help="override the packaged fixture CSV path")
    return parser


def _load_config(args) -> PipelineConfig:
    config = load_pipeline_config(args.config)
    replacements = {}
    if args.input:
        replacements["input"] = Path(args.input)
    if args.output:
        replacements["output"] = Path(args.output)
    if args.report:
        replacements["report_dir"] = Path(args.report)
    if args.seed is not None:
        replacements["seed"] = args.seed
    if replacements:
        from dataclasses import replace

        config = replace(config, **replacements)
    return config


def _select_group(config: PipelineConfig, name: str) -> tuple[int, GroupConfig]:
    for index, gcfg in enumerate(config.groups):
        if gcfg.name == name:
            return index, gcfg
    known = ", ".join(g.name for g in config.groups)
    raise ConfigError(f"no group named {name!r} in the config (have: {known})")


def _load_input(config: PipelineConfig):
    path = config.input if config.input.is_absolute() else config.base_dir / config.input
    try:
        return load_microfile(path, config.schema, config.identifiers)
    except GroupAnonError as exc:
        raise StageError("load", "-", str(exc)) from exc


def _report_dir(config: PipelineConfig) -> Path:
    path = config.report_dir if config.report_dir.is_absolute() else config.base_dir / config.report_dir
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_signal(config: PipelineConfig, name: str) -> int:
    _, gcfg = _select_group(config, name)
    m = _load_input(config)
    try:
        signal = build_goal_signal(m, gcfg)
    except GroupAnonError as exc:
        raise StageError("signal", name, str(exc)) from exc
    out = _report_dir(config)
    write_signal_csv(out / f"{name}_signal.csv", signal.parameter_order, signal.values)
    svg_line_chart(signal.parameter_order, signal.values, out / f"{name}_signal.svg",
                   title=f"{name}: {gcfg.signal} signal")
    print(f"wrote {out / f'{name}_signal.csv'} and {out / f'{name}_signal.svg'}")
    return EXIT_OK


def _cmd_decompose(config: PipelineConfig, name: str) -> int:
    _, gcfg = _select_group(config, name)
    m = _load_input(config)
    try:
        signal = build_goal_signal(m, gcfg)
        dec = decompose(signal.values, get_filter(gcfg.wavelet_family), gcfg.level)
    except GroupAnonError as exc:
        raise StageError("decompose", name, str(exc)) from exc
    out = _report_dir(config)
    path = out / f"{name}_coefficients.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "index", "value"])
        for i, v in enumerate(dec.approx, start=1):
            writer.writerow([f"approx{dec.level}", i, f"{v:.12g}"])
        for j in dec.detail_levels():
            for i, v in enumerate(dec.details[j], start=1):
                writer.writerow([f"detail{j}", i, f"{v:.12g}"])
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_redistribute(config: PipelineConfig, name: str) -> int:
    index, gcfg = _select_group(config, name)
    m = _load_input(config)
    rng = np.random.default_rng([config.seed, index])
    _, result = run_group(m, gcfg, rng)
    out = _report_dir(config)
    write_signal_csv(out / f"{name}_signal_before.csv",
                     result.before.parameter_order, result.before.values)
    write_signal_csv(out / f"{name}_signal_redistributed.csv",
                     result.before.parameter_order, result.final_signal)
    payload = {
        "group": name,
        "coefficients": [float(v) for v in result.coefficients],
        "shift": result.shift,
        "warnings": result.warnings,
        "constraints": [
            {"row": c.position_text, "lhs": c.lhs, "satisfied": c.satisfied}
            for c in result.solution_checks
        ],
    }
    (out / f"{name}_redistribution.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote redistribution artifacts for {name!r} under {out}")
    return EXIT_OK


def _cmd_remap(config: PipelineConfig, name: str) -> int:
    index, gcfg = _select_group(config, name)
    m = _load_input(config)
    rng = np.random.default_rng([config.seed, index])
    modified, result = run_group(m, gcfg, rng)
    out = _report_dir(config)
    output = config.output if config.output.is_absolute() else config.base_dir / config.output
    output.parent.mkdir(parents=True, exist_ok=True)
    write_microfile(modified, output)
    with (out / f"{name}_swaps.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["member_index", "partner_index", "cost"])
        for (a, b), cost in zip(result.plan.swaps, result.plan.costs):
            writer.writerow([a, b, f"{cost:.12g}"])
    print(f"wrote {output} ({len(result.plan)} swaps, total cost {result.plan.total_cost:.3f})")
    return EXIT_OK


def _cmd_run(config: PipelineConfig) -> int:
    result = run_pipeline(config)
    write_outputs(config, result)
    output = config.output if config.output.is_absolute() else config.base_dir / config.output
    for g in result.groups:
        print(f"group {g.name}: {len(g.plan)} swaps, total cost {g.plan.total_cost:.3f}, "
              f"shift {g.shift:g}")
    print(f"wrote {output}")
    return EXIT_OK


def _cmd_verify(fixture: str | None) -> int:
    started = time.perf_counter()
    rows = verify_reference_values(fixture_csv=fixture)
    print(format_table(rows))
    print(f"elapsed {time.perf_counter() - started:.2f}s")
    return EXIT_VERIFY if has_failures(rows) else EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args.fixture)
        config = _load_config(args)
        if args.command == "signal":
            return _cmd_signal(config, args.group)
        if args.command == "decompose":
            return _cmd_decompose(config, args.group)
        if args.command == "redistribute":
            return _cmd_redistribute(config, args.group)
        if args.command == "remap":
            return _cmd_remap(config, args.group)
        return _cmd_run(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"stage error {exc}", file=sys.stderr)
        return EXIT_STAGE
    except GroupAnonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    raise SystemExit(main())
