"""Asynchronous message passing with cocycle-checked node updates.

Nodes update a persistent state by a monoid action and emit arguments
through an argument function; when that function is a 1-cocycle and the
edge message functions are monoid maps, every schedule of the resulting
events ends in the same state. This package checks those conditions and
executes instances under pluggable schedules to demonstrate it.
"""
from .algebra import (
    BOT,
    ActionSpec,
    ArgumentFn,
    Carrier,
    MonoidSpec,
    ReadoutTable,
    SemidirectElement,
    SpecificationError,
    ViolationReport,
    Witness,
    check_action,
    check_cocycle,
    check_monoid_laws,
    check_splitting,
    cocycle_from_pointwise,
    curry,
    is_idempotent,
    naive_delta,
    readout_add,
    readout_ract,
    replay,
    semidirect_monoid,
    semidirect_mul,
    splitting_is_hom,
    star_act,
    star_action,
)
from .fabric import (
    ConfigurationError,
    Edge,
    Graph,
    Instance,
    MessageFn,
    NodeRuntime,
    TropicalMatrix,
    apply_message,
    attention_coefficients,
    attention_message,
    check_homomorphism,
    compute_message,
    gather_scatter_round,
    tropical_apply,
)
from .instances import (
    ConfluenceReport,
    InstanceError,
    build_instance,
    confluence_check,
    make_bellman_ford,
    make_carry_adder,
    make_maxmax_layer,
    make_sabotaged,
    weighted_graph,
)
from .scheduler import (
    Event,
    SchedulePolicy,
    SchedulingError,
    Trace,
    WorldState,
    detect_quiescence,
    enumerate_interleavings,
    init_world,
    run,
    step,
    synchronous_run,
)

__version__ = "0.1.0"
