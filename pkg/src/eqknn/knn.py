"""Neighbor ranking, majority voting and the per-query distance pipeline."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import (DEFAULT_PSEUDOCOUNTS, JointDistribution, StateVector, apply_bell_h,
                      exact_joint, sample_counts, smooth_counts)
from .encode import build_initial_state
from .estimate import DistanceTable, estimate_distances

MODALITIES = ("classical", "statevector", "simulation")


@dataclass(frozen=True)
class NeighborResult:
    ranked_indices: np.ndarray
    k_set: np.ndarray
    distances: DistanceTable
    predicted_label: object = None


def classical_distances(training, v_prime) -> DistanceTable:
    training = np.atleast_2d(np.asarray(training, dtype=np.float64))
    v_prime = np.asarray(v_prime, dtype=np.float64)
    if v_prime.shape != (training.shape[1],):
        raise ValueError(f"test vector has shape {v_prime.shape}, expected ({training.shape[1]},)")
    diff = training - v_prime
    return DistanceTable(np.sqrt(np.einsum("ij,ij->i", diff, diff)), "classical")


def select_neighbors(distances: DistanceTable, k: int) -> NeighborResult:
    """Rank by (distance, training index) and keep the first ``k``."""
    dist = np.asarray(distances.distances)
    if not 1 <= k <= dist.size:
        raise ValueError(f"k must be in [1, {dist.size}], got {k}")
    ranked = np.lexsort((np.arange(dist.size), dist))
    return NeighborResult(ranked, ranked[:k].copy(), distances)


def majority_vote(neighbors: Sequence[int], labels) -> object:
    """Most common label among ``neighbors`` (given nearest first).

    Ties go to the tied label whose closest representative ranks highest.
    """
    if len(neighbors) == 0:
        raise ValueError("no neighbors to vote on")
    votes = [labels[i] for i in neighbors]
    counts = Counter(votes)
    best = max(counts.values())
    for label in votes:
        if counts[label] == best:
            return label


@dataclass
class QueryTrace:
    """Intermediate objects of one quantum distance query, kept for dumps."""

    initial: StateVector
    final: StateVector
    joint: JointDistribution


def run_circuit(training_v, v_prime, encoding, shots: int | None = None,
                pseudocounts: int = DEFAULT_PSEUDOCOUNTS, seed: int | None = None) -> QueryTrace:
    """Prepare, interfere and read out one test vector against the training set.

    With ``shots=None`` the exact joint distribution is returned; otherwise
    ``shots`` measurements are simulated with ``seed`` and smoothed.
    """
    initial = build_initial_state(encoding, training_v, v_prime)
    final = apply_bell_h(initial)
    if shots is None:
        joint = exact_joint(final)
    else:
        if seed is None:
            raise ValueError("a seed is required for shot sampling")
        counts = sample_counts(final, shots, seed)
        joint = smooth_counts(counts, shots, pseudocounts, initial.geometry.N, initial.geometry)
    return QueryTrace(initial, final, joint)


def quantum_distances(training_v, v_prime, encoding, estimates, shots: int | None = None,
                      pseudocounts: int = DEFAULT_PSEUDOCOUNTS, seed: int | None = None,
                      trace: QueryTrace | None = None) -> dict[str, DistanceTable]:
    """Distance tables for every requested estimator, from one shared readout."""
    if trace is None:
        trace = run_circuit(training_v, v_prime, encoding, shots, pseudocounts, seed)
    v_prime = np.asarray(v_prime, dtype=np.float64)
    sq = float(v_prime @ v_prime)
    N = trace.initial.geometry.N
    return {str(getattr(e, "value", e)): estimate_distances(trace.joint, e, encoding, N, sq)
            for e in estimates}
