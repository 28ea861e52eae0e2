import numpy as np
import pytest

from huelines.evaluate import accuracy_report, confusion_matrix


class TestConfusionMatrix:
    def test_identity(self):
        t = np.array([0, 0, 1, 1])
        m, tv, pv = confusion_matrix(t, t)
        assert np.array_equal(m, [[2, 0], [0, 2]])

    def test_rectangular(self):
        t = np.array([0, 0, 1, 1])
        p = np.array([0, 1, 2, 2])
        m, tv, pv = confusion_matrix(t, p)
        assert m.shape == (2, 3)
        assert m.sum() == 4
        assert list(pv) == [0, 1, 2]


class TestAccuracyReport:
    def test_perfect(self):
        t = np.array([0, 0, 1, 1, 2])
        r = accuracy_report(t, t)
        assert r["accuracy"] == 1.0
        assert r["n_unassigned"] == 0

    def test_relabeled_perfect(self):
        t = np.array([0, 0, 1, 1])
        p = np.array([1, 1, 0, 0])
        r = accuracy_report(p, t)
        assert r["accuracy"] == 1.0
        assert r["mapping"] == {1: 0, 0: 1}

    def test_random_balanced_near_half(self):
        # uniform guessing over two balanced labels scores ~0.5; the best
        # bijection can only exploit sqrt(n) fluctuations
        rng = np.random.default_rng(0)
        accs = []
        for _ in range(20):
            t = np.repeat([0, 1], 500)
            p = rng.integers(0, 2, size=1000)
            accs.append(accuracy_report(p, t)["accuracy"])
        assert abs(np.mean(accs) - 0.5) < 0.05

    def test_unassigned_counts_as_error(self):
        t = np.array([0, 0, 1, 1])
        p = np.array([0, -1, 1, 1])
        r = accuracy_report(p, t)
        assert r["n_unassigned"] == 1
        assert r["accuracy"] == pytest.approx(0.75)

    def test_ignore_labels(self):
        t = np.array([0, 0, 1, 1, 2, 2])
        p = np.array([0, 0, 1, 1, 0, 1])
        full = accuracy_report(p, t)
        pattern_only = accuracy_report(p, t, ignore_labels={2})
        assert pattern_only["accuracy"] == 1.0
        assert pattern_only["n_lines"] == 4
        assert full["accuracy"] < 1.0

    def test_all_unassigned(self):
        t = np.array([0, 1])
        p = np.array([-1, -1])
        r = accuracy_report(p, t)
        assert r["accuracy"] == 0.0
        assert r["n_unassigned"] == 2

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="align"):
            accuracy_report(np.array([0, 1]), np.array([0]))

    def test_more_clusters_than_labels(self):
        t = np.array([0, 0, 0, 1, 1, 1])
        p = np.array([0, 0, 1, 2, 2, 2])
        r = accuracy_report(p, t)
        assert r["accuracy"] == pytest.approx(5 / 6)
