"""mcmckit: finite Markov chain diagnostics, MH sampling, and counting."""

from .chain import (
    FiniteChain,
    ProbVector,
    detailed_balance_residual,
    is_aperiodic,
    is_irreducible,
    is_reversible,
    load_chain,
    make_prob_vector,
    period,
    save_chain,
    stationary_distribution,
    step_distribution,
    validate_chain,
)
from .mixing import (
    GeometricEnvelope,
    MixingReport,
    d_curve,
    distance_to_stationarity,
    fit_geometric_envelope,
    mixing_report,
    mixing_time,
    tv_distance,
)
from .metropolis import (
    Box,
    FiniteSpace,
    JumpKernel,
    TargetDensity,
    Trace,
    acceptance_rate,
    finite_jump_kernel,
    finite_mh_kernel,
    finite_target,
    log_mh_ratio,
    mh_step,
    random_walk_kernel,
    run_chain,
    trace_to_csv,
)
from .bayes import (
    BayesModel,
    PosteriorGrid,
    beta_binomial_model,
    centered_grid,
    log_posterior_unnorm,
    map_estimate,
    mle_estimate,
    normal_model,
    posterior_grid,
    posterior_mean,
    risk,
    target_from_model,
    unit_interval_grid,
)
from .counting import (
    CountEstimate,
    DerivationTree,
    Graph,
    IndependentSetInstance,
    SelfReducibleInstance,
    almost_uniform_sample,
    almost_uniform_samples,
    approximate_count,
    brute_force_count,
    build_tree,
    count_perfect_matchings,
    cycle_graph,
    empty_graph,
    make_graph,
    path_graph,
    read_edge_list,
    tree_walk_chain,
)

__version__ = "0.1.0"
