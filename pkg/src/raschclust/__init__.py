"""raschclust: find clusters of items that share a latent trait.

Binary Rasch models are fitted by marginal maximum likelihood; the fitted
standard deviation of the mixing distribution serves as a homogeneity
signal that drives sequential item selection, subsampling misfit scores
and hierarchical clustering of items.
"""

from .data import ResponseMatrix, parse_csv, read_csv
from .errors import (ConfigError, DataError, DegenerateItemError,
                     RaschClustError)
from .estimation import (FitConfig, QuadratureRule, RaschFit,
                         gauss_hermite_rule, irf, fit_mml,
                         log_marginal_likelihood)
from .evaluation import (EvalCurve, hit_false_rates, item_correlations,
                         mean_conditional_covariance, roc_curve)
from .hierarchy import (Dendrogram, MergeStep, agglomerate, cut_k,
                        euclidean_item_distances, hcluster_marginal)
from .selection import (Partition, SelectionTrace, change_sequence,
                        fusion_homogeneity, select_sequence,
                        select_with_anchor)
from .simulate import Scenario, gen_rasch, permute_items, preset, preset_names
from .stability import (MisfitReport, OrderMatrix, SimilarityMatrix,
                        misfit_scores, order_density, pairwise_similarity,
                        similarity_to_distance, subsample_orders)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DataError", "DegenerateItemError", "Dendrogram",
    "EvalCurve", "FitConfig", "MergeStep", "MisfitReport", "OrderMatrix",
    "Partition", "QuadratureRule", "RaschClustError", "RaschFit",
    "ResponseMatrix", "Scenario", "SelectionTrace", "SimilarityMatrix",
    "agglomerate", "change_sequence", "cut_k", "euclidean_item_distances",
    "fit_mml", "fusion_homogeneity", "gauss_hermite_rule", "gen_rasch",
    "hcluster_marginal", "hit_false_rates", "irf", "item_correlations",
    "log_marginal_likelihood", "mean_conditional_covariance",
    "misfit_scores", "order_density", "pairwise_similarity", "parse_csv",
    "permute_items", "preset", "preset_names", "read_csv", "roc_curve",
    "select_sequence", "select_with_anchor", "similarity_to_distance",
    "subsample_orders",
]
