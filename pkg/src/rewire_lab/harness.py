"""Seeded ensemble sweeps over rewire counts, with CSV-ready aggregate records.

Every sweep cell (one rewired sample, or one training test) derives its own
seed from the master seed and its integer coordinates, so results do not
depend on scheduling order and sweeps parallelize without losing
reproducibility. Efficiency statistics aggregate as finite means; the
connectivity-length statistics use the convention that a single infinite
sample makes the reported mean infinite, which is why the efficiency
statistics are the primary aggregates.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import inf, isinf
from typing import Callable, Iterable, Sequence

import numpy as np

from .learning import TrainingConfig, generate_patterns, init_weights, train
from .metrics import SubgraphDefinition, efficiency_report
from .topology import LayeredShape, build_layered_fnn, rewire

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# stream tags keep rewiring, weight init, and pattern generation independent
_STREAM_REWIRE = 1
_STREAM_WEIGHTS = 2
_STREAM_PATTERNS = 3

CSV_COLUMNS = (
    "network",
    "definition",
    "n_rewire",
    "statistic",
    "checkpoint",
    "value",
    "sample_count",
    "master_seed",
)


class ConfigError(ValueError):
    """A sweep configuration failed validation; the message names the field."""


def _mix64(x: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mixing on 64-bit ints."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_task_seed(master_seed: int, coordinates: Sequence[int]) -> int:
    """Deterministic 64-bit seed for the task at `coordinates` under `master_seed`.

    Absorbs the coordinates in order through SplitMix64-style mixing, so both
    the values and their order matter, and distinct tasks get independent
    streams regardless of scheduling.
    """
    if master_seed < 0:
        raise ValueError("master_seed must be nonnegative")
    state = _mix64(master_seed + _GOLDEN)
    for coord in coordinates:
        if coord < 0:
            raise ValueError("coordinates must be nonnegative")
        state = _mix64(state + _GOLDEN + coord)
    return state


@dataclass(frozen=True)
class SweepRecord:
    """One aggregate statistic at one rewire count (and checkpoint, if any)."""

    network: str
    definition: str
    n_rewire: int
    statistic: str
    checkpoint: int | None
    value: float
    sample_count: int
    master_seed: int


def _default_label(shape: LayeredShape) -> str:
    return f"n{shape.neurons_per_layer}xL{shape.layers}"


def _validate_grid(shape: LayeredShape, rewire_counts: Sequence[int]) -> None:
    if not rewire_counts:
        raise ConfigError("rewire_counts: must be nonempty")
    if list(rewire_counts) != sorted(set(rewire_counts)):
        raise ConfigError("rewire_counts: must be strictly ascending")
    if rewire_counts[0] < 0:
        raise ConfigError("rewire_counts: must be nonnegative")
    if rewire_counts[-1] > shape.baseline_edge_count:
        raise ConfigError(
            f"rewire_counts: max {rewire_counts[-1]} exceeds baseline edge "
            f"count {shape.baseline_edge_count}"
        )


@dataclass(frozen=True)
class MetricSweepConfig:
    """Ensemble of rewired samples per count, measured under one or more definitions."""

    shape: LayeredShape
    rewire_counts: tuple[int, ...]
    samples_per_count: int = 100
    definitions: tuple[SubgraphDefinition, ...] = (
        SubgraphDefinition.CORRECTED,
        SubgraphDefinition.SAME_LAYER_AUGMENTED,
    )
    master_seed: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        _validate_grid(self.shape, self.rewire_counts)
        if self.samples_per_count < 1:
            raise ConfigError("samples_per_count: must be >= 1")
        if not self.definitions:
            raise ConfigError("definitions: must be nonempty")
        if len(set(self.definitions)) != len(self.definitions):
            raise ConfigError("definitions: must be unique")
        if not self.label:
            object.__setattr__(self, "label", _default_label(self.shape))


@dataclass(frozen=True)
class TrainSweepConfig:
    """Repeated trainings per rewire count; each test draws fresh initial weights.

    With resample_connectivity_per_test on (the default) each test also draws
    a fresh connectivity; switched off, all tests at a count share one.
    """

    shape: LayeredShape
    rewire_counts: tuple[int, ...]
    pattern_count: int
    learning_rate: float
    iterations: int
    checkpoints: tuple[int, ...]
    n_tests: int
    resample_connectivity_per_test: bool = True
    init_range: float = 0.5
    master_seed: int = 0
    label: str = ""

    def __post_init__(self) -> None:
        _validate_grid(self.shape, self.rewire_counts)
        if self.pattern_count < 1:
            raise ConfigError("pattern_count: must be >= 1")
        if self.n_tests < 1:
            raise ConfigError("n_tests: must be >= 1")
        try:
            TrainingConfig(
                learning_rate=self.learning_rate,
                iterations=self.iterations,
                checkpoints=self.checkpoints,
                init_range=self.init_range,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.label:
            object.__setattr__(self, "label", _default_label(self.shape))


@dataclass(frozen=True)
class ScenarioMatrixConfig:
    """Fixed (training set seed, connectivity seed) cases for one shape.

    Each case trains with its pinned training set and, per rewire count, one
    pinned connectivity shared by all its tests; only initial weights vary
    across tests.
    """

    shape: LayeredShape
    rewire_counts: tuple[int, ...]
    cases: tuple[tuple[int, int], ...]
    pattern_count: int
    learning_rate: float
    iterations: int
    checkpoints: tuple[int, ...]
    n_tests: int
    init_range: float = 0.5
    label: str = ""

    def __post_init__(self) -> None:
        _validate_grid(self.shape, self.rewire_counts)
        if not self.cases:
            raise ConfigError("cases: must be nonempty")
        if self.pattern_count < 1:
            raise ConfigError("pattern_count: must be >= 1")
        if self.n_tests < 1:
            raise ConfigError("n_tests: must be >= 1")
        try:
            TrainingConfig(
                learning_rate=self.learning_rate,
                iterations=self.iterations,
                checkpoints=self.checkpoints,
                init_range=self.init_range,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.label:
            object.__setattr__(self, "label", _default_label(self.shape))


@dataclass(frozen=True)
class ScenarioMatrixResult:
    """Per-case sweep records plus the cases' final-checkpoint argmin summary."""

    records: tuple[SweepRecord, ...]
    argmin_by_case: dict[str, int] = field(compare=False)
    coincide: bool = False


def _run_cells(fn: Callable, args: Sequence[tuple], workers: int) -> list:
    """Evaluate cells in submission order, optionally across processes.

    Results come back in input order whatever the completion order, so the
    worker count never changes the output.
    """
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(args) // (workers * 4))
        return list(pool.map(_apply_cell, ((fn, a) for a in args), chunksize=chunk))


def _apply_cell(packed):
    fn, args = packed
    return fn(*args)


def _metric_cell(cfg: MetricSweepConfig, k: int, sample: int):
    seed = derive_task_seed(cfg.master_seed, (_STREAM_REWIRE, k, sample))
    graph = rewire(build_layered_fnn(cfg.shape), k, seed)
    return [efficiency_report(graph, definition) for definition in cfg.definitions]


def _mean_with_inf(values: np.ndarray) -> float:
    return inf if np.isinf(values).any() else float(values.mean())


def run_metric_sweep(cfg: MetricSweepConfig, workers: int = 1) -> list[SweepRecord]:
    """Efficiency/connectivity-length statistics per rewire count.

    For each count, samples_per_count independent rewirings are measured under
    every requested definition; means and standard deviations aggregate over
    the samples.
    """
    cells = [(cfg, k, j) for k in cfg.rewire_counts for j in range(cfg.samples_per_count)]
    results = _run_cells(_metric_cell, cells, workers)

    by_coord = {
        (k, j): reports
        for (_, k, j), reports in zip(cells, results)
    }
    records: list[SweepRecord] = []
    for k in cfg.rewire_counts:
        for d_idx, definition in enumerate(cfg.definitions):
            reports = [by_coord[(k, j)][d_idx] for j in range(cfg.samples_per_count)]
            e_global = np.array([r.e_global for r in reports])
            e_local = np.array([r.e_local for r in reports])
            d_global = np.array([r.d_global for r in reports])
            d_local = np.array([r.d_local for r in reports])
            stats = {
                "mean_e_global": float(e_global.mean()),
                "std_e_global": float(e_global.std()),
                "mean_e_local": float(e_local.mean()),
                "std_e_local": float(e_local.std()),
                "mean_d_global": _mean_with_inf(d_global),
                "mean_d_local": _mean_with_inf(d_local),
            }
            records.extend(
                SweepRecord(
                    network=cfg.label,
                    definition=definition.value,
                    n_rewire=k,
                    statistic=name,
                    checkpoint=None,
                    value=value,
                    sample_count=cfg.samples_per_count,
                    master_seed=cfg.master_seed,
                )
                for name, value in stats.items()
            )
    return records


def _train_cell(cfg: TrainSweepConfig, k: int, test: int) -> dict[int, float]:
    if cfg.resample_connectivity_per_test:
        conn_seed = derive_task_seed(cfg.master_seed, (_STREAM_REWIRE, k, test))
    else:
        conn_seed = derive_task_seed(cfg.master_seed, (_STREAM_REWIRE, k))
    graph = rewire(build_layered_fnn(cfg.shape), k, conn_seed)
    net = init_weights(
        graph, cfg.init_range, derive_task_seed(cfg.master_seed, (_STREAM_WEIGHTS, k, test))
    )
    patterns = generate_patterns(
        cfg.shape.neurons_per_layer,
        cfg.pattern_count,
        derive_task_seed(cfg.master_seed, (_STREAM_PATTERNS,)),
    )
    result = train(
        net,
        patterns,
        TrainingConfig(
            learning_rate=cfg.learning_rate,
            iterations=cfg.iterations,
            checkpoints=cfg.checkpoints,
            init_range=cfg.init_range,
        ),
    )
    return result.mae_at_checkpoint


def _mae_records(
    per_test: dict[tuple[int, int], dict[int, float]],
    rewire_counts: Sequence[int],
    checkpoints: Sequence[int],
    n_tests: int,
    network: str,
    master_seed: int,
) -> list[SweepRecord]:
    """Aggregate per-test MAE maps into min/mean/std records plus argmin rows."""
    records: list[SweepRecord] = []
    mean_by_checkpoint: dict[int, list[tuple[int, float]]] = {c: [] for c in checkpoints}
    for k in rewire_counts:
        for checkpoint in checkpoints:
            values = np.array([per_test[(k, t)][checkpoint] for t in range(n_tests)])
            mean = float(values.mean())
            mean_by_checkpoint[checkpoint].append((k, mean))
            for name, value in (
                ("min_mae", float(values.min())),
                ("mean_mae", mean),
                ("std_mae", float(values.std())),
            ):
                records.append(
                    SweepRecord(
                        network=network,
                        definition="",
                        n_rewire=k,
                        statistic=name,
                        checkpoint=checkpoint,
                        value=value,
                        sample_count=n_tests,
                        master_seed=master_seed,
                    )
                )
    for checkpoint in checkpoints:
        pairs = mean_by_checkpoint[checkpoint]
        argmin_k = min(pairs, key=lambda pair: (pair[1], pair[0]))[0]
        records.append(
            SweepRecord(
                network=network,
                definition="",
                n_rewire=argmin_k,
                statistic="argmin_mean_mae",
                checkpoint=checkpoint,
                value=float(argmin_k),
                sample_count=n_tests,
                master_seed=master_seed,
            )
        )
    return records


def run_train_sweep(cfg: TrainSweepConfig, workers: int = 1) -> list[SweepRecord]:
    """Min/mean/std of MAE per rewire count and checkpoint, plus per-checkpoint argmin.

    The training set is generated once per sweep from a dedicated seed stream;
    each statistical test draws fresh initial weights (and, by default, a
    fresh connectivity).
    """
    cells = [(cfg, k, t) for k in cfg.rewire_counts for t in range(cfg.n_tests)]
    results = _run_cells(_train_cell, cells, workers)
    per_test = {(k, t): res for (_, k, t), res in zip(cells, results)}
    return _mae_records(
        per_test,
        cfg.rewire_counts,
        cfg.checkpoints,
        cfg.n_tests,
        cfg.label,
        cfg.master_seed,
    )


def _scenario_cell(
    cfg: ScenarioMatrixConfig, case_index: int, k: int, test: int
) -> dict[int, float]:
    set_seed, conn_seed = cfg.cases[case_index]
    graph = rewire(
        build_layered_fnn(cfg.shape),
        k,
        derive_task_seed(conn_seed, (_STREAM_REWIRE, k)),
    )
    net = init_weights(
        graph, cfg.init_range, derive_task_seed(conn_seed, (_STREAM_WEIGHTS, k, test))
    )
    patterns = generate_patterns(cfg.shape.neurons_per_layer, cfg.pattern_count, set_seed)
    result = train(
        net,
        patterns,
        TrainingConfig(
            learning_rate=cfg.learning_rate,
            iterations=cfg.iterations,
            checkpoints=cfg.checkpoints,
            init_range=cfg.init_range,
        ),
    )
    return result.mae_at_checkpoint


def case_label(cfg: ScenarioMatrixConfig, case_index: int) -> str:
    set_seed, conn_seed = cfg.cases[case_index]
    return f"{cfg.label}:case{case_index + 1}:set{set_seed}:conn{conn_seed}"


def run_scenario_matrix(
    cfg: ScenarioMatrixConfig, workers: int = 1
) -> ScenarioMatrixResult:
    """Run one train sweep per case and summarize how their argmins disagree.

    The summary takes each case's argmin of mean MAE at the last checkpoint;
    `coincide` is true only when every case lands on the same rewire count.
    """
    cells = [
        (cfg, c, k, t)
        for c in range(len(cfg.cases))
        for k in cfg.rewire_counts
        for t in range(cfg.n_tests)
    ]
    results = _run_cells(_scenario_cell, cells, workers)
    per_cell = {(c, k, t): res for (_, c, k, t), res in zip(cells, results)}

    records: list[SweepRecord] = []
    argmin_by_case: dict[str, int] = {}
    final_checkpoint = cfg.checkpoints[-1]
    for c in range(len(cfg.cases)):
        label = case_label(cfg, c)
        per_test = {
            (k, t): per_cell[(c, k, t)]
            for k in cfg.rewire_counts
            for t in range(cfg.n_tests)
        }
        case_records = _mae_records(
            per_test,
            cfg.rewire_counts,
            cfg.checkpoints,
            cfg.n_tests,
            label,
            cfg.cases[c][1],
        )
        records.extend(case_records)
        argmin_by_case[label] = next(
            int(r.value)
            for r in case_records
            if r.statistic == "argmin_mean_mae" and r.checkpoint == final_checkpoint
        )
    coincide = len(set(argmin_by_case.values())) == 1
    return ScenarioMatrixResult(
        records=tuple(records), argmin_by_case=argmin_by_case, coincide=coincide
    )


def small_world_verdict(records: Iterable[SweepRecord]) -> dict[str, str]:
    """Classify each definition's sweep as small-world "present" or "absent".

    Declared convention: a small-world regime is present when the unrewired
    network is already locally efficient (mean_e_local at k=0 positive and
    within 20% of the maximum over the grid) and some k > 0 keeps both
    mean_e_local and mean_e_global within 20% of their grid maxima. The raw
    curves should always be published next to this verdict.
    """
    curves: dict[str, dict[str, dict[int, float]]] = {}
    for record in records:
        if record.statistic in ("mean_e_local", "mean_e_global"):
            curves.setdefault(record.definition, {}).setdefault(
                record.statistic, {}
            )[record.n_rewire] = record.value
    if not curves:
        raise ConfigError("records: no mean_e_local/mean_e_global statistics found")

    verdicts: dict[str, str] = {}
    for definition, stats in curves.items():
        e_local = stats.get("mean_e_local", {})
        e_global = stats.get("mean_e_global", {})
        ks = sorted(e_local)
        if sorted(e_global) != ks:
            raise ConfigError(f"records: incomplete curves for {definition!r}")
        if 0 not in ks or len([k for k in ks if k > 0]) < 3:
            raise ConfigError(
                "records: verdict needs k=0 plus at least 3 larger rewire counts"
            )
        max_local = max(e_local.values())
        max_global = max(e_global.values())
        premise = e_local[0] > 0 and e_local[0] >= 0.8 * max_local
        candidate = any(
            e_local[k] >= 0.8 * max_local and e_global[k] >= 0.8 * max_global
            for k in ks
            if k > 0
        )
        verdicts[definition] = "present" if premise and candidate else "absent"
    return verdicts


def _format_value(value: float) -> str:
    if isinf(value):
        return "inf"
    return repr(float(value))


def _sort_key(record: SweepRecord):
    return (
        record.network,
        record.definition,
        record.n_rewire,
        record.statistic,
        -1 if record.checkpoint is None else record.checkpoint,
    )


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    """Render records as CSV text, sorted so equal inputs give equal bytes."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in sorted(records, key=_sort_key):
        writer.writerow(
            (
                record.network,
                record.definition,
                record.n_rewire,
                record.statistic,
                "" if record.checkpoint is None else record.checkpoint,
                _format_value(record.value),
                record.sample_count,
                record.master_seed,
            )
        )
    return buffer.getvalue()


def read_records_csv(text: str) -> list[SweepRecord]:
    """Parse CSV text produced by records_to_csv back into records."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ValueError(f"unexpected CSV header {header!r}")
    records = []
    for row in reader:
        if not row:
            continue
        network, definition, n_rewire, statistic, checkpoint, value, count, seed = row
        records.append(
            SweepRecord(
                network=network,
                definition=definition,
                n_rewire=int(n_rewire),
                statistic=statistic,
                checkpoint=None if checkpoint == "" else int(checkpoint),
                value=float(value),
                sample_count=int(count),
                master_seed=int(seed),
            )
        )
    return records
