"""Recover scalar products and Euclidean distances from joint probabilities."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .circuit import JointDistribution
from .encode import EncodingKind


class DistanceEstimateKind(str, enum.Enum):
    AVG = "avg"
    DIFF = "diff"


@dataclass(frozen=True)
class DistanceTable:
    distances: np.ndarray
    kind: str
    encoding: str | None = None
    clamp_events: int = 0

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("j,distance\n")
            for j, dist in enumerate(self.distances):
                fh.write(f"{j},{dist!r}\n")


def scalar_from_p0(p0j, N: int):
    return 2.0 * N * np.asarray(p0j) - 1.0


def scalar_from_p1(p1j, N: int):
    return 1.0 - 2.0 * N * np.asarray(p1j)


def scalar_diff(p0j, p1j, N: int):
    return N * (np.asarray(p0j) - np.asarray(p1j))


def _radicand(scalar, encoding: EncodingKind, v_prime_sq_norm: float):
    if encoding is EncodingKind.EXTENSION:
        return 0.75 * scalar + v_prime_sq_norm
    return scalar + 0.25 + v_prime_sq_norm


def distances_from_scalars(scalars, encoding, v_prime_sq_norm: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`distance_from_scalar`; returns ``(distances, clamped_mask)``."""
    rad = _radicand(np.asarray(scalars, dtype=np.float64), EncodingKind(encoding), v_prime_sq_norm)
    clamped = (rad < 0.0) | (rad > 1.0)
    return np.sqrt(np.clip(rad, 0.0, 1.0)), clamped


def distance_from_scalar(scalar: float, encoding, v_prime_sq_norm: float) -> tuple[float, bool]:
    """Invert the encoding's scalar-product identity to a distance in [0, 1].

    A radicand below 0 maps to distance 0 and one above 1 to distance 1; the
    returned flag records whether either clamp fired.
    """
    dist, clamped = distances_from_scalars(np.array([scalar]), encoding, v_prime_sq_norm)
    return float(dist[0]), bool(clamped[0])


def estimate_distances(jd: JointDistribution, kind, encoding, N: int,
                       v_prime_sq_norm: float) -> DistanceTable:
    """Distance estimates for the ``N`` significant indices of ``jd``.

    ``avg`` averages the distances obtained separately from ``P(0, j)`` and
    ``P(1, j)`` (each clamped on its own); ``diff`` converts
    ``N (P(0, j) - P(1, j))`` into a single distance.
    """
    kind = DistanceEstimateKind(kind)
    encoding = EncodingKind(encoding)
    p0, p1 = jd.p[0, :N], jd.p[1, :N]
    if kind is DistanceEstimateKind.AVG:
        d0, c0 = distances_from_scalars(scalar_from_p0(p0, N), encoding, v_prime_sq_norm)
        d1, c1 = distances_from_scalars(scalar_from_p1(p1, N), encoding, v_prime_sq_norm)
        dist = (d0 + d1) / 2.0
        clamps = int(c0.sum() + c1.sum())
    else:
        dist, c = distances_from_scalars(scalar_diff(p0, p1, N), encoding, v_prime_sq_norm)
        clamps = int(c.sum())
    return DistanceTable(dist, kind.value, encoding.value, clamps)
