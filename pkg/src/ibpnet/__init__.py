"""Fitness-weighted Indian-buffet attribute matrices: simulation, parameter
estimation, fitness-ranking recovery, graph synthesis and topology stats."""

from .estimation import (
    EstimationResult,
    GrowthEstimator,
    clt_statistic,
    estimate_alpha,
    estimate_beta,
    estimate_parameters,
    growth_curve,
)
from .fitness import TwoPointFitness, UniformFitness, ZipfFitness, parse_fitness
from .graphgen import (
    EdgeModel,
    Graph,
    calibrate_theta,
    pair_weight,
    sample_ff,
    sample_ffba,
    sample_ffjr,
    sample_graph,
    sigmoid,
)
from .graphstats import TopologyReport, degree_distribution, distance_profile
from .likelihood import LikelihoodState, log_likelihood, update_coordinate
from .matrix import AttributeMatrix, load_fitness, load_matrix, save_fitness, save_matrix
from .mcmc import (
    FitnessRecovery,
    McmcConfig,
    McmcTrace,
    recover_fitness,
    recover_fitness_normalized,
)
from .model import (
    ModelParams,
    inclusion_probability,
    new_feature_rate,
    sample_growth,
    sample_matrix,
)
from .ranking import (
    kendall_tau,
    rank_report,
    weighted_tau_by_position,
    weighted_tau_by_value,
)
from .corpus import CorpusVectorizer, build_matrix

__version__ = "0.1.0"

__all__ = [
    "AttributeMatrix",
    "CorpusVectorizer",
    "EdgeModel",
    "EstimationResult",
    "FitnessRecovery",
    "Graph",
    "GrowthEstimator",
    "LikelihoodState",
    "McmcConfig",
    "McmcTrace",
    "ModelParams",
    "TopologyReport",
    "TwoPointFitness",
    "UniformFitness",
    "ZipfFitness",
    "build_matrix",
    "calibrate_theta",
    "clt_statistic",
    "degree_distribution",
    "distance_profile",
    "estimate_alpha",
    "estimate_beta",
    "estimate_parameters",
    "growth_curve",
    "inclusion_probability",
    "kendall_tau",
    "load_fitness",
    "load_matrix",
    "log_likelihood",
    "new_feature_rate",
    "pair_weight",
    "parse_fitness",
    "rank_report",
    "recover_fitness",
    "recover_fitness_normalized",
    "sample_ff",
    "sample_ffba",
    "sample_ffjr",
    "sample_graph",
    "sample_growth",
    "sample_matrix",
    "save_fitness",
    "save_matrix",
    "sigmoid",
    "update_coordinate",
    "weighted_tau_by_position",
    "weighted_tau_by_value",
]
