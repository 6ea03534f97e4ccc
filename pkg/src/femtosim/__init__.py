"""Two-tier femtocell/macrocell uplink simulator.

Split-spectrum and shared-spectrum architectures with uplink power control,
macro-to-femtocell handover, successive interference cancellation, and
interference-ordered channel assignment, evaluated over seeded Monte Carlo
topologies.
"""

__version__ = "0.1.0"

from .config import ConfigError, NetworkConfig, load_config, parse_config_text
from .metrics import MetricsRecord
from .radio import (LinkBudgetTerm, db_to_linear, dbm_to_mw, linear_to_db,
                    mw_to_dbm, path_gain, sinr, threshold_rate)
from .shared import (ChannelAllocation, HandoverPlan, PowerAllocation, SicPair,
                     assign_channels_shared, evaluate_shared, evaluate_sic_pair,
                     femto_power_cap, femto_power_control, handover_decision,
                     interference_budget, macro_min_power, required_fap_power,
                     run_handover_phase)
from .split import SplitAllocation, allocate_split, evaluate_split, split_gain
from .topology import (DistanceTable, Topology, build_distance_table,
                       sample_topology, split_allocation_rng, topology_rng)

__all__ = [
    "ConfigError", "NetworkConfig", "load_config", "parse_config_text",
    "MetricsRecord",
    "LinkBudgetTerm", "db_to_linear", "dbm_to_mw", "linear_to_db", "mw_to_dbm",
    "path_gain", "sinr", "threshold_rate",
    "ChannelAllocation", "HandoverPlan", "PowerAllocation", "SicPair",
    "assign_channels_shared", "evaluate_shared", "evaluate_sic_pair",
    "femto_power_cap", "femto_power_control", "handover_decision",
    "interference_budget", "macro_min_power", "required_fap_power",
    "run_handover_phase",
    "SplitAllocation", "allocate_split", "evaluate_split", "split_gain",
    "DistanceTable", "Topology", "build_distance_table", "sample_topology",
    "split_allocation_rng", "topology_rng",
    "__version__",
]
