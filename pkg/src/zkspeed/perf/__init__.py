"""Hardware performance model: unit latencies, MSM cycle simulation,
area/power roll-up, modmul census and design-space exploration."""

from .census import (ROWS, TABLE1_MU20, Census, CensusParams, CensusRow, analytical_census,
                     compare_census, instrumented_census)
from .costs import (DEFAULT_COSTS, KNOB_DOMAINS, KNOBS, REFERENCE_DESIGN, CostTables, DesignError,
                    DesignPoint, Rollup, area_power_rollup, design_space, design_space_size,
                    load_config)
from .dse import (CSV_SCHEMA, DseResult, dse, pareto_mask, read_csv, sweep_bandwidth, sweep_batch,
                  write_dse_csv, write_rows_csv)
from .fracmle import BatchRow, batch_row, fracmle_batch_optimizer, fracmle_batch_sweep
from .model import PerfReport, SumcheckTiming, evaluate, sumcheck_latency
from .msm_sim import MsmTiming, aggregation_reduction, msm_cycle_sim

__all__ = [
    "ROWS", "TABLE1_MU20", "Census", "CensusParams", "CensusRow", "analytical_census",
    "compare_census", "instrumented_census",
    "DEFAULT_COSTS", "KNOB_DOMAINS", "KNOBS", "REFERENCE_DESIGN", "CostTables", "DesignError",
    "DesignPoint", "Rollup", "area_power_rollup", "design_space", "design_space_size", "load_config",
    "CSV_SCHEMA", "DseResult", "dse", "pareto_mask", "read_csv", "sweep_bandwidth", "sweep_batch",
    "write_dse_csv", "write_rows_csv",
    "BatchRow", "batch_row", "fracmle_batch_optimizer", "fracmle_batch_sweep",
    "PerfReport", "SumcheckTiming", "evaluate", "sumcheck_latency",
    "MsmTiming", "aggregation_reduction", "msm_cycle_sim",
]
