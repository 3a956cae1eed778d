"""rigsim: sparse random intersection graphs, their clique-tree limits, and
exact network statistics."""

from .graphs import (
    BipartiteMultigraph,
    Graph,
    RootedGraph,
    ball,
    degree_sequence,
    intersection_graph,
    loc_distance,
)
from .canon import canonical_code, unrooted_code
from .laws import DegreeLaw, WeightLaw, offspring_law, size_biased
from .generators import (
    ModelConfig,
    gen_active,
    gen_configuration,
    gen_degree_sequences,
    gen_inhomogeneous,
    gen_passive,
    generate_bipartite,
    plant_clique,
)
from .cliquetree import (
    CapExceeded,
    CliqueTreeBall,
    CodeHistogram,
    GWTree,
    ball_distribution_mc,
    sample_clique_tree_ball,
    sample_gw_tree,
    tv_distance,
)
from .counting import (
    Pattern,
    connected_patterns,
    distinct_rootings,
    emb_count,
    hom_count,
    pattern_from_name,
    rooted_emb_count,
    sidorenko_bound,
)
from .stats import (
    StatReport,
    assortativity,
    clustering,
    conditional_assortativity,
    conditional_clustering,
    degree_fraction,
    degree_moment,
    empirical_ball_dist,
)
from .limits import (
    Estimate,
    LimitSpec,
    dstar_moment,
    limit_assortativity,
    limit_clustering,
    limit_conditional_assortativity,
    limit_conditional_clustering,
    limit_degree_pmf,
    limit_degree_pmf_vector,
    limit_spec_for,
    remark1_limits,
    rooted_emb_expectation_mc,
    sample_dstar,
    z_moment,
)
from .experiment import (
    ConvergenceRow,
    ExperimentPlan,
    StatisticSpec,
    ball_convergence,
    perturbation_report,
    run_experiment,
    theorem21_suite,
)
from .rng import substream

__version__ = "0.1.0"
