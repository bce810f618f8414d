"""Ackermann codes for hereditarily finite sets, certified real-valued
codes for hereditarily finite hypersets, and injectivity experiments."""

from .dyadic import DOWN, UP, Dyadic, Enclosure, pow2_neg, pow2_neg_enclosure, sum_enclosures
from .errors import (
    BitBudgetError,
    BudgetError,
    HFRealError,
    IterationLimitError,
    ParseError,
    PrecisionExhausted,
    UnreachableNodesError,
)
from .hf import (
    EMPTY,
    HFSet,
    ack_compare,
    ack_decode,
    ack_encode,
    hfset,
    iterated_singleton,
    low,
    parse_braces,
    rank,
    successor_set,
)
from .systems import (
    Partition,
    PointedGraph,
    SetSystem,
    coarsest_bisimulation,
    format_system,
    graph_to_system,
    hfset_to_system,
    is_normal,
    is_well_founded,
    normalize,
    parse_graph,
    parse_system,
    well_founded_value,
)
from .approx import (
    ApproxTuple,
    HFMultiset,
    MULTI_EMPTY,
    distinguished_step,
    embed_set,
    hfmultiset,
    multiset_approx,
    set_approx,
    set_stabilization,
)
from .solver import (
    CodeSolution,
    SolveStatus,
    code_approx,
    code_map,
    delta_seq,
    omega,
    ra_code,
    solve,
)
from .injectivity import (
    AdjacencyReport,
    DeltaGapResult,
    ScanEntry,
    ScanReport,
    check_adjacent,
    codes_up_to,
    delta_gap,
    scan,
    unbounded_witness,
)

__version__ = "0.1.0"
