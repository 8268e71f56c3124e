"""netlab: a community-structure laboratory.

Graph primitives (volume, cut, conductance), seeded random-graph generators
(ER, preferential attachment, homophyly), three community-structure quality
ratios (modularity, entropy ratio, conductance ratio), local clustering via
personalized PageRank, structural verification of colored networks, and
keyword prediction over attributed graphs.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    InputError,
    InsufficientDataError,
    NetlabError,
    ParseError,
    SizeLimitError,
    UndefinedMetricError,
)
from .graph import (  # noqa: F401
    Graph,
    avg_distance_estimate,
    conductance,
    cut_size,
    is_connected_induced,
    read_edge_list,
    read_edge_list_multigraph,
    subgraph_diameter,
    volume,
    write_edge_list,
)
from .generators import (  # noqa: F401
    ColoredGraph,
    HomophylyParams,
    gen_er,
    gen_homophyly,
    gen_pa,
    homochromatic_sets,
    read_colored,
    write_colored,
)
from .metrics import (  # noqa: F401
    CommunitySet,
    Partition,
    RatioReport,
    brute_force_best_partition,
    conductance_ratio,
    empirical_criterion,
    entropy_partition,
    entropy_ratio,
    entropy_uniform,
    is_possible_community,
    modularity,
)
from .detection import (  # noqa: F401
    PprParams,
    SparseVector,
    StopParams,
    approximate_ppr,
    exact_ppr,
    find_community,
    greedy_entropy_partition,
    greedy_modularity_partition,
    ppr_detect_all,
    stop_beta_for_exponent,
    sweep,
)
from .structure import (  # noqa: F401
    DegreeProfile,
    StructureReport,
    community_width,
    degree_profile,
    fit_powerlaw_exponent,
    king_amplifier,
    node_width,
    powerlaw_consistency,
    verify_structure,
)
from .prediction import (  # noqa: F401
    AttributedGraph,
    NodeDoc,
    PredictionResult,
    confirm_keyword,
    label_dimension,
    predict,
    prediction_curve,
    top_k_keywords,
)
