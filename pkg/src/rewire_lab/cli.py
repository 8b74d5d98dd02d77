"""Command-line front end: generate graphs, measure them, run sweeps, plot CSVs.

Commands: generate, metrics, sweep, plot. Sweeps read a flat key=value config
file (one INI-style section per sweep mode) and write a sorted CSV plus a run
manifest into the output directory, so a run is reproducible from the manifest
alone. REWIRE_LAB_OUT sets the default output directory.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from . import __version__
from .harness import (
    ConfigError,
    MetricSweepConfig,
    ScenarioMatrixConfig,
    TrainSweepConfig,
    records_to_csv,
    read_records_csv,
    run_metric_sweep,
    run_scenario_matrix,
    run_train_sweep,
    small_world_verdict,
)
from .metrics import SubgraphDefinition, efficiency_report
from .topology import (
    LayeredShape,
    build_layered_fnn,
    format_edge_list,
    read_edge_list,
    rewire,
)

SWEEP_MODES = ("metrics", "train", "scenarios")

_COMMON_KEYS = {"label", "neurons", "layers", "rewire_counts"}
_ALLOWED_KEYS = {
    "metrics": _COMMON_KEYS | {"samples_per_count", "definitions", "master_seed"},
    "train": _COMMON_KEYS
    | {
        "pattern_count",
        "learning_rate",
        "iterations",
        "checkpoints",
        "n_tests",
        "resample_connectivity_per_test",
        "init_range",
        "master_seed",
    },
    "scenarios": _COMMON_KEYS
    | {
        "pattern_count",
        "learning_rate",
        "iterations",
        "checkpoints",
        "n_tests",
        "cases",
        "init_range",
    },
}


def default_out_dir() -> Path:
    return Path(os.environ.get("REWIRE_LAB_OUT", "."))


def list_presets() -> list[str]:
    configs = resources.files("rewire_lab").joinpath("configs")
    return sorted(p.name[: -len(".cfg")] for p in configs.iterdir() if p.name.endswith(".cfg"))


def resolve_config(name: str) -> tuple[str, str]:
    """Return (config text, stem) for a path or a bundled preset name."""
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8"), path.stem
    preset = name[: -len(".cfg")] if name.endswith(".cfg") else name
    candidate = resources.files("rewire_lab").joinpath("configs", f"{preset}.cfg")
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8"), preset
    raise ConfigError(
        f"config {name!r} is neither a file nor a bundled preset "
        f"(presets: {', '.join(list_presets())})"
    )


def _parse_int(section, key: str, source: str, default=None) -> int:
    raw = section.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(f"{source}: missing required key {key!r}")
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{source}: {key}: expected an integer, got {raw!r}") from None


def _parse_float(section, key: str, source: str, default=None) -> float:
    raw = section.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(f"{source}: missing required key {key!r}")
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{source}: {key}: expected a number, got {raw!r}") from None


def _parse_int_list(section, key: str, source: str, default=None) -> tuple[int, ...]:
    raw = section.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(f"{source}: missing required key {key!r}")
    try:
        return tuple(int(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{source}: {key}: expected integers, got {raw!r}") from None


def _parse_bool(section, key: str, source: str, default: bool) -> bool:
    raw = section.get(key)
    if raw is None:
        return default
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{source}: {key}: expected a boolean, got {raw!r}")


def _parse_shape(section, source: str) -> LayeredShape:
    try:
        return LayeredShape(
            neurons_per_layer=_parse_int(section, "neurons", source),
            layers=_parse_int(section, "layers", source),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_sweep_config(text: str, mode: str, source: str):
    """Parse the [mode] section of a config file into the matching sweep config."""
    if mode not in SWEEP_MODES:
        raise ConfigError(f"unknown sweep mode {mode!r} (expected one of {SWEEP_MODES})")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if mode not in parser:
        raise ConfigError(
            f"{source}: missing [{mode}] section (sections found: {parser.sections()})"
        )
    section = parser[mode]
    unknown = set(section) - _ALLOWED_KEYS[mode]
    if unknown:
        raise ConfigError(f"{source}: unknown keys in [{mode}]: {sorted(unknown)}")

    shape = _parse_shape(section, source)
    rewire_counts = _parse_int_list(section, "rewire_counts", source)
    label = section.get("label", "").strip()

    if mode == "metrics":
        raw_defs = section.get("definitions", "corrected same_layer_augmented")
        definitions = []
        for token in raw_defs.replace(",", " ").split():
            try:
                definitions.append(SubgraphDefinition(token))
            except ValueError:
                raise ConfigError(
                    f"{source}: definitions: {token!r} is not one of "
                    f"{[d.value for d in SubgraphDefinition]}"
                ) from None
        return MetricSweepConfig(
            shape=shape,
            rewire_counts=rewire_counts,
            samples_per_count=_parse_int(section, "samples_per_count", source, default=100),
            definitions=tuple(definitions),
            master_seed=_parse_int(section, "master_seed", source),
            label=label,
        )

    iterations = _parse_int(section, "iterations", source)
    common = dict(
        shape=shape,
        rewire_counts=rewire_counts,
        pattern_count=_parse_int(section, "pattern_count", source),
        learning_rate=_parse_float(section, "learning_rate", source),
        iterations=iterations,
        checkpoints=_parse_int_list(section, "checkpoints", source, default=(iterations,)),
        n_tests=_parse_int(section, "n_tests", source),
        init_range=_parse_float(section, "init_range", source, default=0.5),
        label=label,
    )
    if mode == "train":
        return TrainSweepConfig(
            resample_connectivity_per_test=_parse_bool(
                section, "resample_connectivity_per_test", source, default=True
            ),
            master_seed=_parse_int(section, "master_seed", source),
            **common,
        )

    raw_cases = section.get("cases")
    if raw_cases is None:
        raise ConfigError(f"{source}: missing required key 'cases'")
    cases = []
    for token in raw_cases.replace(",", " ").split():
        left, sep, right = token.partition(":")
        if not sep:
            raise ConfigError(
                f"{source}: cases: expected 'set_seed:connectivity_seed', got {token!r}"
            )
        try:
            cases.append((int(left), int(right)))
        except ValueError:
            raise ConfigError(f"{source}: cases: seeds must be integers in {token!r}") from None
    return ScenarioMatrixConfig(cases=tuple(cases), **common)


def _write_manifest(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _cmd_generate(args) -> int:
    shape = LayeredShape(args.neurons, args.layers)
    graph = rewire(build_layered_fnn(shape), args.rewire, args.seed)
    text = format_edge_list(graph)
    if args.out == "-":
        sys.stdout.write(text)
        return 0
    if args.out is not None:
        out_path = Path(args.out)
    else:
        out_dir = default_out_dir()
        out_dir.mkdir(parents=True, exist_ok=True)
        out_path = out_dir / (
            f"edges-n{shape.neurons_per_layer}-L{shape.layers}"
            f"-k{graph.n_rewire}-seed{graph.seed}.txt"
        )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text, encoding="utf-8")
    print(out_path)
    return 0


def _cmd_metrics(args) -> int:
    graph = read_edge_list(args.graph)
    report = efficiency_report(graph, SubgraphDefinition(args.definition))
    for key in ("e_global", "e_local", "d_global", "d_local"):
        print(f"{key}={getattr(report, key)!r}")
    return 0


def _cmd_sweep(args) -> int:
    text, stem = resolve_config(args.config)
    cfg = load_sweep_config(text, args.mode, args.config)
    if args.seed is not None:
        if args.mode == "scenarios":
            raise ConfigError("--seed does not apply to scenarios; case seeds are pinned")
        cfg = dataclasses.replace(cfg, master_seed=args.seed)

    out_dir = Path(args.out) if args.out else default_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    manifest_path = out_dir / f"{stem}-manifest.json"
    started = _utc_now()

    written: list[Path] = []
    try:
        if args.mode == "metrics":
            records = run_metric_sweep(cfg, workers=args.workers)
            for definition, verdict in sorted(small_world_verdict(records).items()):
                print(f"small_world[{definition}]={verdict}")
        elif args.mode == "train":
            records = run_train_sweep(cfg, workers=args.workers)
        else:
            result = run_scenario_matrix(cfg, workers=args.workers)
            records = list(result.records)
            for label, argmin in result.argmin_by_case.items():
                print(f"argmin_mean_mae[{label}]={argmin}")
            print(f"argmin_coincide={'yes' if result.coincide else 'no'}")

        csv_path.write_text(records_to_csv(records), encoding="utf-8")
        written.append(csv_path)
        _write_manifest(
            manifest_path,
            {
                "command": "sweep",
                "mode": args.mode,
                "config": str(args.config),
                "master_seed": getattr(cfg, "master_seed", None),
                "out_dir": str(out_dir),
                "tool_version": __version__,
                "workers": args.workers,
                "started_at": started,
                "finished_at": _utc_now(),
            },
        )
        written.append(manifest_path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    print(csv_path)
    return 0


def _cmd_plot(args) -> int:
    from . import plots

    out_dir = Path(args.out) if args.out else default_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for csv_name in args.csv:
            csv_path = Path(csv_name)
            records = read_records_csv(csv_path.read_text(encoding="utf-8"))
            if not records:
                raise plots.PlotError(f"{csv_path}: CSV contains no records")
            statistics = set(plots.available_statistics(records))
            kinds = []
            if args.kind in ("auto", "efficiency") and statistics & {
                "mean_e_global",
                "mean_d_global",
            }:
                kinds.append("efficiency")
            if args.kind in ("auto", "mae") and statistics & {"min_mae", "mean_mae"}:
                kinds.append("mae")
            if not kinds:
                raise plots.PlotError(
                    f"{csv_path}: no {args.kind} series found; available statistics: "
                    + ", ".join(sorted(statistics))
                )
            for kind in kinds:
                out_path = out_dir / f"{csv_path.stem}-{kind}.svg"
                if kind == "efficiency":
                    plots.render_efficiency_figure(records, out_path)
                else:
                    plots.render_mae_figure(records, out_path)
                written.append(out_path)
                print(out_path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rewire-lab",
        description="Rewired feed-forward networks: efficiency metrics and learning sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"rewire-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a rewired graph as an edge-list file")
    p_gen.add_argument("--neurons", type=int, required=True)
    p_gen.add_argument("--layers", type=int, required=True)
    p_gen.add_argument("--rewire", type=int, default=0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", help="output file path ('-' for stdout)")
    p_gen.set_defaults(func=_cmd_generate)

    p_met = sub.add_parser("metrics", help="print an efficiency report for a graph file")
    p_met.add_argument("graph", help="edge-list file produced by 'generate'")
    p_met.add_argument(
        "--definition",
        choices=[d.value for d in SubgraphDefinition],
        default=SubgraphDefinition.CORRECTED.value,
    )
    p_met.set_defaults(func=_cmd_metrics)

    p_sweep = sub.add_parser("sweep", help="run a configured sweep and write CSV + manifest")
    p_sweep.add_argument("--config", required=True, help="config file path or preset name")
    p_sweep.add_argument("--mode", choices=SWEEP_MODES, required=True)
    p_sweep.add_argument("--out", help="output directory (default $REWIRE_LAB_OUT or .)")
    p_sweep.add_argument("--seed", type=int, help="override the config's master seed")
    p_sweep.add_argument("--workers", type=int, default=1, help="max concurrent sweep cells")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_plot = sub.add_parser("plot", help="render SVG figures from sweep CSVs")
    p_plot.add_argument("csv", nargs="+", help="CSV files written by 'sweep'")
    p_plot.add_argument("--out", help="output directory (default $REWIRE_LAB_OUT or .)")
    p_plot.add_argument("--kind", choices=("auto", "efficiency", "mae"), default="auto")
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
