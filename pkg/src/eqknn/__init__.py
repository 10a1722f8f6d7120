"""Quantum k-nearest neighbors driven by Euclidean distance estimation.

The package simulates the full pipeline in numpy: normalization, the
extension / translation amplitude encodings, the three-gate Bell-H
interference circuit, exact or shot-sampled readout, the ``avg`` / ``diff``
distance estimators, neighbor selection and cross-validated evaluation.
"""
from .circuit import JointDistribution, StateVector, apply_bell_h, exact_joint, sample_counts, smooth_counts
from .classifier import QuantumKNNClassifier
from .dataset import Dataset, FoldSplit, iris_pair, load_csv, stratified_folds
from .encode import CircuitGeometry, EncodedPair, EncodingKind, build_initial_state, encode_pair
from .estimate import (DistanceEstimateKind, DistanceTable, distance_from_scalar, estimate_distances,
                       scalar_diff, scalar_from_p0, scalar_from_p1)
from .harness import (ExperimentConfig, FoldResult, average_jaccard, export_results, jaccard_index,
                      run_experiment)
from .knn import NeighborResult, classical_distances, majority_vote, select_neighbors
from .preprocess import Normalizer

__version__ = "0.1.0"
