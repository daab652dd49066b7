"""Immersion, tree-width, linkage and MSO tooling for small multigraphs."""

from .exceptions import BudgetExceeded, FormatError, ImmersionKitError
from .immersion import (
    ImmersionModel,
    MinorModel,
    find_immersion,
    find_minor,
    immerses,
    minimal_double_subgraph,
    minimal_immersion_subgraph,
    reduction_oracle,
    single_step_reductions,
)
from .linkage import (
    EdgeLinkage,
    Linkage,
    build_Gb,
    build_Ghat,
    edge_linkage_to_line_linkage,
    is_unique_linkage,
    is_vital_linkage,
    lemma5_harness,
    validate_edge_linkage,
    validate_linkage,
)
from .multigraph import MultiGraph, canonical_form, enumerate_graphs, line_graph
from .obstructions import (
    ObstructionSet,
    compute_intertwines,
    compute_obstructions,
    compute_union_obstructions,
    estimate_class_width,
    family_compare,
    is_obstruction,
    lemma4_search,
)
from .treewidth import (
    TreeDecExpansion,
    TreeDecomposition,
    decomposition_from_line_graph,
    treewidth,
    treewidth_exact,
    validate_decomposition,
)

__version__ = "0.1.0"
