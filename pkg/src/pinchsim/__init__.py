"""Energy-efficiency optimizer and Monte Carlo harness for a TDMA
pinching-antenna downlink.

A single waveguide serves K users in time division.  Per user, small
antennas are repositioned along the waveguide for coherent combining,
transmit powers are set by Dinkelbach's fractional-programming
iteration, time shares follow in closed form, and the two blocks
alternate until the energy efficiency stabilizes.  The simulation layer
sweeps power budget, rate floor, or antenna count over seeded random
user drops and compares against equal-time, full-power, and
fixed-array baselines.
"""

from .allocator import (
    AllocationResult,
    DinkelbachResult,
    Feasibility,
    InfeasibleError,
    bcd_solve,
    check_feasibility,
    dinkelbach_power,
    min_time,
    power_clamped,
    time_allocate,
)
from .baselines import Scheme, allocate_scheme, scheme_gains, solve_scheme
from .cli import (
    CSV_HEADER,
    ConfigError,
    RunConfig,
    load_config,
    main,
    parse_values,
    run_cli,
    write_csv,
)
from .model import (
    DEFAULT_TOL,
    SPEED_OF_LIGHT,
    SystemParams,
    Tolerances,
    UserLocation,
    check_antenna_positions,
    dbm_to_watts,
    derive_constants,
    ee_objective,
    effective_gain_aligned,
    effective_gain_approx,
    effective_gain_exact,
    user_rate,
    watts_to_dbm,
)
from .placement import (
    PlacementSolution,
    fixed_ula_positions,
    nominal_positions,
    phase_align,
    phase_total,
    place_all,
    place_for_user,
)
from .simulation import (
    AXES,
    POLICIES,
    AggregateStats,
    Scenario,
    SchemeOutcome,
    SweepResult,
    TrialRecord,
    aggregate,
    apply_axis,
    run_sweep,
    run_trial,
    sample_users,
    trial_seed,
)

__version__ = "0.1.0"
