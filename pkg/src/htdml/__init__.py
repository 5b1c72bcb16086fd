"""Heterogeneous transfer distance metric learning.

Learn a target-domain metric from scarce pair labels, knowledge fragments
distilled from a source-domain metric, and unlabeled cross-domain
correspondences.
"""
from .boosting import BoostedMap, BoostParams, boost_train, negative_gradients
from .data import (CorrespondenceSet, LabeledPairSet, LabeledPointSet,
                   load_correspondences, load_pair_dataset, load_samples)
from .errors import HTDMLError
from .evaluation import (EvalReport, IdentityMap, accuracy, evaluate, knn_classify,
                         macro_f1, mean_average_precision, pairwise_distance)
from .fragments import (FragmentMatrix, FundamentalElements, build_fragment_matrix,
                        decompose_metric, rbf_kernel, train_source_metric)
from .graph import NeighborGraph, build_neighbor_graph, default_bandwidth
from .kernels import BACKEND
from .linear import (HyperParams, LinearMap, TrainTrace, gradient_smoothed,
                     objective_smoothed, pgm_train, project_nonneg)

__version__ = "0.1.0"
