"""Rewired feed-forward networks: topology, efficiency metrics, learning, sweeps."""

from .topology import (
    LayeredShape,
    NodeRef,
    RewiredGraph,
    RewireSaturationError,
    build_layered_fnn,
    format_edge_list,
    parse_edge_list,
    read_edge_list,
    rewire,
    validate,
)
from .metrics import (
    EfficiencyReport,
    NeighborhoodSubgraph,
    SubgraphDefinition,
    distance_matrix,
    efficiency_report,
    global_efficiency,
    graph_efficiency,
    local_efficiency,
    neighborhood_subgraph,
    subgraph_efficiency,
)
from .learning import (
    Pattern,
    TrainingConfig,
    TrainingResult,
    TrainingSet,
    WeightedNetwork,
    backprop_step,
    forward,
    generate_patterns,
    init_weights,
    loss_and_gradients,
    mean_absolute_error,
    train,
)
from .harness import (
    ConfigError,
    MetricSweepConfig,
    ScenarioMatrixConfig,
    ScenarioMatrixResult,
    SweepRecord,
    TrainSweepConfig,
    derive_task_seed,
    read_records_csv,
    records_to_csv,
    run_metric_sweep,
    run_scenario_matrix,
    run_train_sweep,
    small_world_verdict,
)

__version__ = "0.1.0"
