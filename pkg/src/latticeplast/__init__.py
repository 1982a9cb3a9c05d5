"""Terminal plastic-deformation sets of elastoplastic lattice spring networks."""

from .algebra import (
    check_admissible,
    check_admissible_nodewise,
    check_irreducible,
    completeness_report,
    exhaustive_irreducible_sets,
    positive_certificate,
)
from .model import (
    ModelError,
    benchmark_graph,
    benchmark_spec,
    build_graph,
    graph_from_edges,
    incidence_matrix,
    incidence_vector_R,
    kernel_basis,
    load_model,
    parse_model,
    serialize_model,
    validate_assumptions,
)
from .rational import RationalMatrix
from .simulate import SimParams, certify_terminal, detect_convergence, init_state, run
from .topology import (
    Bipartition,
    CollapseMove,
    SignedIndexSet,
    apply_collapse,
    enumerate_bipartitions,
    enumerate_index_sets,
    index_set_from_final,
    witness_sequence,
)

__version__ = "0.1.0"
