"""Simulator and verification lab for index-based communication-induced
checkpointing protocols.

The package replays scripted or randomized distributed computations
through the classic index-based protocol family (partly informed, fully
informed in two encodings, lazy, and the weakened fine variants) and
checks every run against a brute-force zigzag-path oracle: Z-cycles,
useless checkpoints, and zigzag-consistent timestamping.
"""

from ._kernel import KERNEL
from .computation import (
    CheckpointRecord,
    Event,
    Interval,
    Trace,
    causally_precedes,
    interval_of,
    is_consistent_global_checkpoint,
    validate_trace,
)
from .oracle import (
    BudgetExceededError,
    OracleReport,
    ZigzagWitness,
    check_z_consistency,
    consistent_membership_bruteforce,
    find_z_cycles,
    oracle_report,
    useless_checkpoints,
    zigzag_exists,
)
from .protocols import (
    PROTOCOL_NAMES,
    ForcedDecision,
    Piggyback,
    ProtocolError,
    eval_c_fi1_clockv,
    eval_c_fi1_greater,
    eval_c_fi2,
    eval_c_fine1,
    eval_c_lazyfi1,
    eval_c_lazyfine1,
    eval_c_pi,
    make_protocol,
    protocol_init,
)
from .scenarios import (
    FIXTURE_NAMES,
    FixtureClaim,
    FuzzParams,
    ScenarioParseError,
    UnknownScenarioError,
    builtin,
    parse_scenario,
    random_scenario,
    serialize_scenario,
    verify_fixture,
)
from .simulator import (
    AnnotatedTrace,
    Scenario,
    ScenarioError,
    Step,
    amplify_violation,
    compare_runs,
    run_scenario,
)

__version__ = "0.1.0"
