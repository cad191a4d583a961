"""chemgraph: an artificial chemistry over port graphs in mol notation.

Molecules are lists of typed nodes whose ports carry edge tags; rewrites
are double-pushout splices of two-node contact patterns.  The package
bundles the chemlambda v2 and interaction-combinator chemistries, a
random/deterministic reduction engine, quine-graph detection, a lambda
calculus compiler, and a CLI with a lab server.
"""

from .chemistry import Chemistry, Rewrite, builtin, load_chemistry, validate_rewrite
from .engine import (
    Match,
    ReductionConfig,
    ReductionTrace,
    TagSource,
    TokenLedger,
    apply_match,
    comb_pass,
    conflicts,
    find_matches,
    hapax_apply,
    match_at,
    reduce,
    select_matches,
    step,
)
from .errors import ChemGraphError
from .molcore import (
    EMPTY_MOLECULE,
    Molecule,
    MolNode,
    MolPattern,
    NodeType,
    PortGraph,
    bound_tags,
    canonical_code,
    cap,
    free_tags,
    is_isomorphic,
    parse_mol,
    parse_molecule,
    serialize_mol,
    to_port_graph,
)

__version__ = "0.1.0"
