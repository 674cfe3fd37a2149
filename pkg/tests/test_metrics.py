import math

import numpy as np
import pytest
from oracles import brute_force_dtw

from glyphforge.errors import DimensionMismatch, EmptySequence
from glyphforge.format6 import Control, Point6, Trajectory
from glyphforge.metrics import dtw, mae
from glyphforge.rng import make_rng


class TestMae:
    def test_identical(self):
        img = np.full((3, 3), 0.25)
        assert mae(img, img.copy()) == 0.0

    def test_binary_complement(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert mae(a, 1.0 - a) == 1.0

    def test_matches_manual(self):
        rng = make_rng(88, 0)
        a, b = rng.uniform(0, 1, (2, 6, 6))
        assert mae(a, b) == pytest.approx(float(np.abs(a - b).mean()), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mae(np.zeros((2, 2)), np.zeros((3, 2)))


class TestDtw:
    def test_identical_sequences(self):
        pts = np.array([[0.0, 0.0], [0.2, 0.1], [0.5, 0.4]])
        result = dtw(pts, pts.copy())
        assert result.cost == 0.0
        assert result.path == ((0, 0), (1, 1), (2, 2))

    def test_single_point_forced_alignment(self):
        p = np.array([[0.1, 0.1]])
        b = np.array([[0.0, 0.0], [0.5, 0.5], [-0.3, 0.2]])
        expected = sum(math.hypot(0.1 - x, 0.1 - y) for x, y in b)
        result = dtw(p, b)
        assert result.cost == pytest.approx(expected, abs=1e-12)
        assert result.path == ((0, 0), (0, 1), (0, 2))

    def test_matches_brute_force(self):
        rng = make_rng(88, 1)
        for _ in range(40):
            n, m = rng.integers(1, 7, 2)
            a = rng.uniform(-1, 1, (int(n), 2))
            b = rng.uniform(-1, 1, (int(m), 2))
            assert dtw(a, b).cost == pytest.approx(
                brute_force_dtw(a.tolist(), b.tolist()), abs=1e-12
            )

    def test_symmetric_cost(self):
        rng = make_rng(88, 2)
        a = rng.uniform(-1, 1, (5, 2))
        b = rng.uniform(-1, 1, (4, 2))
        assert dtw(a, b).cost == pytest.approx(dtw(b, a).cost, abs=1e-12)

    def test_diagonal_upper_bound(self):
        rng = make_rng(88, 3)
        a = rng.uniform(-1, 1, (6, 2))
        b = rng.uniform(-1, 1, (6, 2))
        diagonal = sum(
            math.hypot(*(a[k] - b[k])) for k in range(6)
        )
        assert dtw(a, b).cost <= diagonal + 1e-12

    def test_path_validity(self):
        rng = make_rng(88, 4)
        for _ in range(25):
            n, m = (int(v) for v in rng.integers(1, 9, 2))
            a = rng.uniform(-1, 1, (n, 2))
            b = rng.uniform(-1, 1, (m, 2))
            result = dtw(a, b)
            assert result.path[0] == (0, 0)
            assert result.path[-1] == (n - 1, m - 1)
            steps = {
                (i2 - i1, j2 - j1)
                for (i1, j1), (i2, j2) in zip(result.path, result.path[1:])
            }
            assert steps <= {(1, 0), (0, 1), (1, 1)}
            path_cost = sum(
                math.hypot(*(a[i] - b[j])) for i, j in result.path
            )
            assert result.cost == pytest.approx(path_cost, abs=1e-9)

    def test_accepts_trajectories_ignores_labels(self):
        t1 = Trajectory(
            (Point6(0.0, 0.0, Control.DRAW), Point6(0.5, 0.5, Control.END_WRITING))
        )
        t2 = Trajectory(
            (Point6(0.0, 0.0, Control.END_STROKE), Point6(0.5, 0.5, Control.END_WRITING))
        )
        assert dtw(t1, t2).cost == 0.0

    def test_normalized_variant(self):
        a = np.array([[0.0, 0.0], [1.0, 0.0]])
        b = np.array([[0.0, 0.5], [1.0, 0.5]])
        result = dtw(a, b)
        assert result.normalized == pytest.approx(result.cost / len(result.path))

    def test_empty_rejected(self):
        with pytest.raises(EmptySequence):
            dtw(np.zeros((0, 2)), np.zeros((2, 2)))
