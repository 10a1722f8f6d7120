"""Bell-H interference circuit, exact (b, j) marginals and shot sampling.

The circuit is H on qubit 0, CNOT with qubit 0 controlling qubit 1, then H
on qubit 0 again.  Each gate is an in-place strided pass over the amplitude
array.  Measurement statistics only involve qubit 0 and the index register,
so sampling draws directly from that marginal: this has the same
distribution as measuring every qubit and discarding the rest, and the
order in which qubit 0 and the index register are read out does not change
the joint law.

Sampling uses numpy's ``PCG64`` generator seeded with the caller's 64-bit
seed and a single multinomial draw over the flattened ``(b, j)`` cells,
which is equivalent to ``shots`` independent categorical draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encode import CircuitGeometry, StateVector
from .seeding import make_rng

__all__ = [
    "StateVector",
    "JointDistribution",
    "apply_bell_h",
    "exact_joint",
    "sample_counts",
    "smooth_counts",
    "DEFAULT_SHOTS",
    "DEFAULT_PSEUDOCOUNTS",
]

DEFAULT_SHOTS = 1024
DEFAULT_PSEUDOCOUNTS = 10
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _hadamard(amps: np.ndarray, qubit: int, n_qubits: int) -> None:
    view = amps.reshape(1 << qubit, 2, 1 << (n_qubits - qubit - 1))
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = (a0 + a1) * _INV_SQRT2
    view[:, 1, :] = (a0 - a1) * _INV_SQRT2


def _cnot(amps: np.ndarray, control: int, target: int, n_qubits: int) -> None:
    if control == target:
        raise ValueError("control and target must differ")
    t = amps.reshape((2,) * n_qubits)
    sel0 = [slice(None)] * n_qubits
    sel1 = [slice(None)] * n_qubits
    sel0[control] = sel1[control] = 1
    sel0[target], sel1[target] = 0, 1
    sel0, sel1 = tuple(sel0), tuple(sel1)
    tmp = t[sel0].copy()
    t[sel0] = t[sel1]
    t[sel1] = tmp


def apply_bell_h(state: StateVector) -> StateVector:
    """Return a new state with H(0), CNOT(0 -> 1), H(0) applied."""
    out = state.copy()
    n = state.geometry.total_qubits
    _hadamard(out.amplitudes, 0, n)
    _cnot(out.amplitudes, 0, 1, n)
    _hadamard(out.amplitudes, 0, n)
    return out


@dataclass(frozen=True)
class JointDistribution:
    """``p[b, j]`` = probability of qubit 0 reading ``b`` and the index register ``j``."""

    p: np.ndarray
    geometry: CircuitGeometry
    kind: str = "exact"
    shots: int | None = None
    pseudocounts: int | None = None

    @property
    def N(self) -> int:
        return self.geometry.N

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("b,j,probability\n")
            for b in range(2):
                for j in range(self.p.shape[1]):
                    fh.write(f"{b},{j},{self.p[b, j]!r}\n")


def exact_joint(state_after: StateVector) -> JointDistribution:
    t = state_after.tensor()
    p = np.einsum("abjf,abjf->aj", t, t)
    return JointDistribution(p, state_after.geometry, "exact")


def sample_counts(state_after: StateVector, shots: int, seed: int) -> np.ndarray:
    """Simulate ``shots`` measurements; returns integer counts of shape ``(2, n_index_slots)``."""
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    p = exact_joint(state_after).p
    flat = p.reshape(-1)
    flat = flat / flat.sum()
    counts = make_rng(seed).multinomial(int(shots), flat)
    return counts.reshape(p.shape)


def smooth_counts(counts, shots: int, pseudocounts: int, n_significant: int,
                  geometry: CircuitGeometry | None = None) -> JointDistribution:
    """Laplace-smoothed probabilities ``(c + p) / (shots + 2 N p)``.

    Pseudocounts go to the ``n_significant`` leading indices only; padded
    indices keep their raw counts over the same denominator.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if pseudocounts < 0:
        raise ValueError("pseudocounts must be non-negative")
    N = int(n_significant)
    if geometry is None:
        geometry = CircuitGeometry(N=N, F=1, d=1)
    smoothed = counts.copy()
    smoothed[:, :N] += pseudocounts
    p = smoothed / (shots + 2.0 * N * pseudocounts)
    return JointDistribution(p, geometry, "sampled", int(shots), int(pseudocounts))
