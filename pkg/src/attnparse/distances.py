"""Distance measures between attention distributions and hidden vectors.

Two families: JSD and HEL operate on probability distributions (attention
rows); COS, L1 and L2 operate on unconstrained real vectors (hidden
states). The families are not interchangeable and `distance` enforces
the pairing.

JSD uses the natural logarithm and the square-root (metric) form, so its
maximum over disjoint supports is sqrt(ln 2).
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy.special import rel_entr

from .errors import DataError, UsageError

JSD_MAX = math.sqrt(math.log(2.0))

PROB_SUM_TOL = 1e-5


class Metric(enum.Enum):
    JSD = "jsd"
    HEL = "hel"
    COS = "cos"
    L1 = "l1"
    L2 = "l2"

    @property
    def on_distributions(self) -> bool:
        return self in (Metric.JSD, Metric.HEL)


DISTRIBUTION_METRICS = (Metric.JSD, Metric.HEL)
VECTOR_METRICS = (Metric.COS, Metric.L1, Metric.L2)


def check_prob_dist(p: np.ndarray, tol: float = PROB_SUM_TOL) -> np.ndarray:
    """Validate a probability distribution: entries >= 0, sums to 1 within tol."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise DataError(f"expected a 1-D distribution, got shape {p.shape}")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise DataError("distribution entries must be finite and non-negative")
    if abs(float(p.sum()) - 1.0) > tol:
        raise DataError(f"distribution sums to {p.sum():.6g}, not 1 within {tol}")
    return p


def jsd_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Jensen-Shannon distance along the last axis, broadcasting leading axes."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    m = 0.5 * (p + q)
    div = 0.5 * rel_entr(p, m).sum(axis=-1) + 0.5 * rel_entr(q, m).sum(axis=-1)
    # float error can push the divergence a hair below 0 or above ln 2
    return np.sqrt(np.clip(div, 0.0, None))


def hellinger_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hellinger distance along the last axis, broadcasting leading axes."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    diff = np.sqrt(p) - np.sqrt(q)
    return np.sqrt(np.clip((diff * diff).sum(axis=-1), 0.0, None)) / math.sqrt(2.0)


def _cosine(p: np.ndarray, q: np.ndarray) -> float:
    np_, nq = np.linalg.norm(p), np.linalg.norm(q)
    if np_ == 0.0 or nq == 0.0:
        raise DataError("cosine distance undefined for zero vectors")
    sim = float(np.dot(p, q) / (np_ * nq))
    return max(0.0, 1.0 - sim)


def rows_metric(metric: Metric):
    """Vectorized row-distance kernel for a distribution metric."""
    if metric is Metric.JSD:
        return jsd_rows
    if metric is Metric.HEL:
        return hellinger_rows
    raise UsageError(f"{metric.value} is not a distribution metric")


def distance(metric: Metric, p, q) -> float:
    """Distance between two distributions (JSD/HEL) or vectors (COS/L1/L2).

    Raises DataError on length mismatch or invalid distributions and
    UsageError when the metric does not match the input kind.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DataError(f"length mismatch: {p.shape} vs {q.shape}")
    if metric.on_distributions:
        p = check_prob_dist(p)
        q = check_prob_dist(q)
        return float(rows_metric(metric)(p, q))
    if not np.all(np.isfinite(p)) or not np.all(np.isfinite(q)):
        raise DataError("vector entries must be finite")
    if metric is Metric.COS:
        return _cosine(p, q)
    if metric is Metric.L1:
        return float(np.abs(p - q).sum())
    if metric is Metric.L2:
        return float(np.linalg.norm(p - q))
    raise UsageError(f"unknown metric {metric!r}")


def renormalize_rows(rows: np.ndarray, tol: float = PROB_SUM_TOL) -> tuple[np.ndarray, bool]:
    """Renormalize almost-stochastic rows; returns (rows, warned).

    Rows whose sums deviate from 1 by more than `tol` are accepted but
    flagged, matching the load-time policy for float32 dumps.
    """
    rows = np.asarray(rows, dtype=np.float64)
    sums = rows.sum(axis=-1, keepdims=True)
    if np.any(sums <= 0):
        raise DataError("attention row with non-positive mass")
    warned = bool(np.any(np.abs(sums - 1.0) > tol))
    return rows / sums, warned
