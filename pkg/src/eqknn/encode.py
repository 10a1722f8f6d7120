"""Extension and translation amplitude encodings and the initial statevector.

Basis layout
------------
A state over ``2 + n_index_qubits + n_feature_qubits`` qubits is stored as a
flat real array whose basis index is::

    index = ((q0 * 2 + q1) * n_index_slots + j) * n_feature_slots + i

i.e. qubit 0 (the interference control) is the most significant bit,
followed by qubit 1 (the branch qubit), the training-index register ``j``
and the feature register ``i``.  ``StateVector.tensor()`` exposes the same
memory as an array of shape ``(2, 2, n_index_slots, n_feature_slots)``.
All amplitudes produced here are real, so storage is ``float64``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

NORM_TOLERANCE = 1e-9
_C = 2.0 / math.sqrt(3.0)


class EncodingError(ValueError):
    """Input vectors violate the norm bound required by the encodings."""


class EncodingKind(str, enum.Enum):
    EXTENSION = "extension"
    TRANSLATION = "translation"

    def n_amplitudes(self, d: int) -> int:
        return 2 * d + 3 if self is EncodingKind.EXTENSION else 2 * d + 4


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


@dataclass(frozen=True)
class CircuitGeometry:
    N: int
    F: int
    d: int

    @property
    def n_index_qubits(self) -> int:
        return _ceil_log2(self.N)

    @property
    def n_feature_qubits(self) -> int:
        return _ceil_log2(self.F)

    @property
    def total_qubits(self) -> int:
        return 2 + self.n_index_qubits + self.n_feature_qubits

    @property
    def n_index_slots(self) -> int:
        return 1 << self.n_index_qubits

    @property
    def n_feature_slots(self) -> int:
        return 1 << self.n_feature_qubits

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (2, 2, self.n_index_slots, self.n_feature_slots)

    @classmethod
    def for_encoding(cls, kind, N: int, d: int) -> CircuitGeometry:
        return cls(N=N, F=EncodingKind(kind).n_amplitudes(d), d=d)


@dataclass
class StateVector:
    """Real amplitudes over the layout described in the module docstring."""

    amplitudes: np.ndarray
    geometry: CircuitGeometry

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64)
        expected = 1 << self.geometry.total_qubits
        if self.amplitudes.shape != (expected,):
            raise ValueError(f"expected {expected} amplitudes, got shape {self.amplitudes.shape}")

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.geometry.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy(), self.geometry)

    def to_csv(self, path) -> None:
        nz = np.flatnonzero(self.amplitudes)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("basis_index,amplitude\n")
            for idx in nz:
                fh.write(f"{idx},{self.amplitudes[idx]!r}\n")


@dataclass(frozen=True)
class EncodedPair:
    x: np.ndarray
    x_prime: np.ndarray
    j: int = 0


def _sq_norms(V: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", V, V)
    limit = (0.5 + NORM_TOLERANCE) ** 2
    if np.any(sq > limit):
        worst = float(np.sqrt(sq.max()))
        raise EncodingError(f"vector norm {worst:.12g} exceeds 1/2; inputs must be normalized first")
    return sq


def _root(arg):
    return np.sqrt(np.maximum(arg, 0.0))


def encode_training(kind, V) -> np.ndarray:
    """Rows ``x_j`` for every training vector; shape ``(N, F)``."""
    kind = EncodingKind(kind)
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    N, d = V.shape
    sq = _sq_norms(V)
    X = np.zeros((N, kind.n_amplitudes(d)))
    norm = np.sqrt(sq)
    if kind is EncodingKind.EXTENSION:
        X[:, :d] = _C * V
        X[:, d:2 * d] = _C * V
        X[:, 2 * d] = _C * norm
        # slot 2d+1 stays zero
        X[:, 2 * d + 2] = _root(1.0 - 4.0 * sq)
    else:
        X[:, :d] = V
        X[:, d:2 * d] = V
        X[:, 2 * d] = norm
        X[:, 2 * d + 1] = 0.5
        # slot 2d+2 stays zero
        X[:, 2 * d + 3] = _root(0.75 - 3.0 * sq)
    return X


def encode_test(kind, V, v_prime) -> np.ndarray:
    """Rows ``x'_j`` pairing the test vector with every training vector."""
    kind = EncodingKind(kind)
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    v_prime = np.asarray(v_prime, dtype=np.float64)
    N, d = V.shape
    if v_prime.shape != (d,):
        raise ValueError(f"test vector has shape {v_prime.shape}, expected ({d},)")
    sq = _sq_norms(V)
    sq_t = float(_sq_norms(v_prime[None, :])[0])
    Xp = np.zeros((N, kind.n_amplitudes(d)))
    norm = np.sqrt(sq)
    if kind is EncodingKind.EXTENSION:
        Xp[:, :d] = -_C * v_prime
        Xp[:, d:2 * d] = -_C * v_prime
        Xp[:, 2 * d] = _C * norm
        Xp[:, 2 * d + 1] = _root(1.0 - (4.0 / 3.0) * (2.0 * sq_t + sq))
    else:
        Xp[:, :d] = -v_prime
        Xp[:, d:2 * d] = -v_prime
        Xp[:, 2 * d] = norm
        Xp[:, 2 * d + 1] = -0.5
        Xp[:, 2 * d + 2] = _root(0.75 - (2.0 * sq_t + sq))
    return Xp


def encode_pair(kind, v_j, v_prime, j: int = 0) -> EncodedPair:
    v_j = np.asarray(v_j, dtype=np.float64)
    x = encode_training(kind, v_j[None, :])[0]
    x_prime = encode_test(kind, v_j[None, :], v_prime)[0]
    return EncodedPair(x, x_prime, j)


def build_initial_state(kind, training, v_prime) -> StateVector:
    """Prepare ``|0> (|0>|alpha> + |1>|beta>) / sqrt(2)`` for one test vector.

    ``|alpha>`` holds the training encodings and ``|beta>`` the test
    encodings, each index branch weighted by ``1/sqrt(N)``.  Padded index and
    feature slots stay at zero amplitude.
    """
    training = np.atleast_2d(np.asarray(training, dtype=np.float64))
    N, d = training.shape
    geom = CircuitGeometry.for_encoding(kind, N, d)
    state = np.zeros(geom.shape)
    w = 1.0 / math.sqrt(2.0 * N)
    state[0, 0, :N, :geom.F] = w * encode_training(kind, training)
    state[0, 1, :N, :geom.F] = w * encode_test(kind, training, v_prime)
    return StateVector(state.reshape(-1), geom)
