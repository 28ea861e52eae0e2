"""Cluster-vs-ground-truth accuracy via best-bijection label matching."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .assignment import NONE_LABEL


def confusion_matrix(truth: np.ndarray, predicted: np.ndarray):
    """Count matrix over (truth label, predicted cluster) pairs.

    Rows follow sorted distinct truth labels, columns sorted distinct
    predicted clusters; unassigned predictions are excluded here and
    accounted for separately by the caller.
    """
    t_vals = np.unique(truth)
    p_vals = np.unique(predicted)
    t_idx = np.searchsorted(t_vals, truth)
    p_idx = np.searchsorted(p_vals, predicted)
    m = np.zeros((len(t_vals), len(p_vals)), dtype=np.int64)
    np.add.at(m, (t_idx, p_idx), 1)
    return m, t_vals, p_vals


def accuracy_report(predicted, truth, ignore_labels=()) -> dict:
    """Best cluster-to-label bijection accuracy.

    Lines whose truth label is in ignore_labels are dropped before
    scoring.  Unassigned lines always count as errors and are also
    reported separately.  The mapping maximizes the matched count over
    the confusion matrix, so accuracy is invariant to cluster renaming.
    """
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must align line-for-line")

    keep = ~np.isin(truth, list(ignore_labels))
    predicted = predicted[keep]
    truth = truth[keep]
    n = len(truth)
    assigned = predicted != NONE_LABEL
    n_unassigned = int(n - assigned.sum())

    if n == 0:
        return {"n_lines": 0, "n_unassigned": 0, "accuracy": 0.0,
                "mapping": {}, "confusion": []}

    if assigned.any():
        m, t_vals, p_vals = confusion_matrix(truth[assigned],
                                             predicted[assigned])
        rows, cols = linear_sum_assignment(m, maximize=True)
        n_correct = int(m[rows, cols].sum())
        mapping = {int(p_vals[c]): int(t_vals[r])
                   for r, c in zip(rows, cols)}
        confusion = m.tolist()
    else:
        n_correct = 0
        mapping = {}
        confusion = []

    return {
        "n_lines": int(n),
        "n_unassigned": n_unassigned,
        "accuracy": n_correct / n,
        "mapping": mapping,
        "confusion": confusion,
    }
