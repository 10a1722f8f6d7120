import numpy as np
import pytest

from conftest import random_ball
from eqknn.estimate import DistanceTable
from eqknn.knn import classical_distances, majority_vote, quantum_distances, run_circuit, select_neighbors


def table(values):
    return DistanceTable(np.asarray(values, float), "classical")


def test_classical_distances():
    assert classical_distances([[0.1, 0.2]], [0.1, 0.2]).distances[0] == 0.0
    assert classical_distances([[0.1, 0.2]], [0.3, -0.1]).distances[0] == pytest.approx(np.sqrt(0.13))
    b = 1 / (2 * np.sqrt(2))
    assert classical_distances([[b, b]], [-b, -b]).distances[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        classical_distances([[0.1, 0.2]], [0.1])


def test_select_tie_by_index():
    res = select_neighbors(table([0.3, 0.1, 0.3]), 2)
    assert res.ranked_indices.tolist() == [1, 0, 2]
    assert res.k_set.tolist() == [1, 0]


def test_select_all_equal_and_full():
    assert select_neighbors(table([0.2] * 5), 3).k_set.tolist() == [0, 1, 2]
    assert sorted(select_neighbors(table([0.5, 0.1, 0.2]), 3).k_set.tolist()) == [0, 1, 2]
    with pytest.raises(ValueError):
        select_neighbors(table([0.1, 0.2]), 3)


def test_majority_vote():
    labels = ["A", "A", "B", "B", "C"]
    assert majority_vote([0, 1, 2], labels) == "A"
    # tie: A is represented by the nearest neighbor
    assert majority_vote([0, 2], labels) == "A"
    assert majority_vote([3, 0], labels) == "B"
    assert majority_vote([4], labels) == "C"
    # 2-2 tie where the nearer tied label wins over plain first-seen order
    assert majority_vote([4, 2, 0, 3, 1], labels) == "B"
    with pytest.raises(ValueError):
        majority_vote([], labels)


@pytest.mark.parametrize("encoding", ["extension", "translation"])
@pytest.mark.parametrize("estimate", ["avg", "diff"])
def test_statevector_equivalence_random(rng, encoding, estimate):
    for _ in range(20):
        V = random_ball(rng, 13, 3)
        vp = random_ball(rng, 1, 3)[0]
        ref = select_neighbors(classical_distances(V, vp), 13)
        got = select_neighbors(quantum_distances(V, vp, encoding, [estimate])[estimate], 13)
        np.testing.assert_array_equal(ref.ranked_indices, got.ranked_indices)
        assert sorted(got.ranked_indices.tolist()) == list(range(13))


def test_avg_and_diff_share_counts(rng):
    V = random_ball(rng, 6, 2)
    vp = random_ball(rng, 1, 2)[0]
    trace = run_circuit(V, vp, "extension", shots=512, seed=11)
    both = quantum_distances(V, vp, "extension", ["avg", "diff"], trace=trace)
    again = run_circuit(V, vp, "extension", shots=512, seed=11)
    np.testing.assert_array_equal(trace.joint.p, again.joint.p)
    assert set(both) == {"avg", "diff"}
    with pytest.raises(ValueError):
        run_circuit(V, vp, "extension", shots=512)
