"""Similarity-guided MUX logic locking toolchain for bench netlists."""

from .bench import (
    BenchError,
    CycleError,
    Diagnostic,
    Gate,
    GateType,
    MuxStyle,
    Netlist,
    floating_wires,
    load_bench,
    parse_bench,
    validate,
    write_bench,
)
from .graph import (
    CircuitGraph,
    EnclosingSubgraph,
    drnl_label,
    export_subgraph,
    extract_enclosing_subgraph,
    to_graph,
)
from .locking import (
    CapacityError,
    KeyVector,
    LockedDesign,
    LockingError,
    LockRecord,
    apply_s1,
    apply_s2,
    apply_s3,
    apply_s4,
    dmux_lock,
    naive_mux_lock,
    parse_key_file,
    parse_lock_report,
    simll_lock,
    write_key_file,
    write_lock_report,
)
from .sim import (
    EquivalenceVerdict,
    KeyGuess,
    MetricsReport,
    PatternSet,
    ac_pc,
    corruption,
    equivalence_check,
    evaluate_guess,
    exhaustive_patterns,
    fc,
    hd,
    random_patterns,
    resolve_x,
    simulate,
    simulate_packed,
)
from .similarity import (
    Cluster,
    ClusterSet,
    LinkFingerprint,
    NodeState,
    StateInterner,
    cluster_stats,
    link_clusters,
    link_fingerprint,
    node_clusters,
    node_states,
    update_state,
)
from .attacks import (
    AttackError,
    AttackResult,
    FeatureVector,
    WlReport,
    collapse_keys,
    cp_attack,
    feature_vector,
    parse_guess_file,
    random_guess,
    saam_attack,
    simplify_const,
    wl_attack,
    wl_distinguishability,
    write_guess_file,
)

__version__ = "0.1.0"
