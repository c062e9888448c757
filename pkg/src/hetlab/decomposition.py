"""Pooled / within-group / between-group Renyi heterogeneity for a weighted
ensemble of subsystem distributions defined over a shared event space.

Rows must already be aligned to the pooled event space; no label matching
is attempted here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .core import PROB_TOL, as_distribution, check_order, renyi_heterogeneity
from .errors import ValidationError

# Stand-in order for the q -> inf limit of the within-group formula, whose
# closed form is not available; results at q=inf are a numeric approximation.
_WITHIN_INF_ORDER = 1e6

_WEIGHT_EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class SubsystemEnsemble:
    """N aligned subsystem distributions (rows) with normalized weights."""

    table: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise ValidationError("ensemble table must be a non-empty N x n matrix")
        for i in range(table.shape[0]):
            try:
                as_distribution(table[i])
            except ValidationError as exc:
                raise ValidationError(f"row {i} is not a valid distribution: {exc}") from exc
        if self.weights is None:
            weights = np.full(table.shape[0], 1.0 / table.shape[0])
        else:
            weights = np.asarray(self.weights, dtype=float)
            if weights.shape != (table.shape[0],):
                raise ValidationError("weights length must match the number of rows")
            if np.any(weights < 0) or not np.all(np.isfinite(weights)):
                raise ValidationError("weights must be finite and non-negative")
            if abs(float(weights.sum()) - 1.0) > PROB_TOL:
                raise ValidationError("weights must sum to 1")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "weights", weights)

    @property
    def n_subsystems(self) -> int:
        return self.table.shape[0]

    @property
    def n_states(self) -> int:
        return self.table.shape[1]

    def has_equal_weights(self) -> bool:
        w = self.weights
        return float(w.max() - w.min()) <= _WEIGHT_EQUAL_TOL


@dataclass(frozen=True)
class DecompositionResult:
    """pooled = within * between by construction; lande_warning marks
    unequal weights at q outside {0, 1}, where the between >= 1 bound is
    not guaranteed."""

    pooled: float
    within: float
    between: float
    lande_warning: bool


def pooled_heterogeneity(ensemble: SubsystemEnsemble, q) -> float:
    """Heterogeneity of the weight-averaged pooled distribution."""
    pooled = ensemble.weights @ ensemble.table
    # Row/weight validation guarantees the pool sums to 1 up to roundoff.
    pooled = pooled / pooled.sum()
    return renyi_heterogeneity(pooled, q)


def within_heterogeneity(ensemble: SubsystemEnsemble, q) -> float:
    """Effective number of unique states contributed per subsystem.

    The q=1 branch is the limit exp(sum_i w_i H(p_i)); q=inf has no known
    closed form and is approximated by evaluating the generic formula at a
    very large finite order.
    """
    qf = check_order(q)
    keep = ensemble.weights > 0.0
    table = ensemble.table[keep]
    weights = ensemble.weights[keep]

    if qf == 0.0:
        richness = np.count_nonzero(table > 0.0, axis=1).astype(float)
        return float(richness.mean())
    if qf == 1.0:
        ent = np.zeros(len(table))
        for i, row in enumerate(table):
            pos = row[row > 0.0]
            ent[i] = -float(np.dot(pos, np.log(pos)))
        return float(np.exp(np.dot(weights, ent)))
    if math.isinf(qf):
        qf = _WITHIN_INF_ORDER

    log_w = np.log(weights)
    log_row_sums = np.array([
        logsumexp(qf * np.log(row[row > 0.0])) for row in table
    ])
    log_num = logsumexp(qf * log_w + log_row_sums)
    log_den = logsumexp(qf * log_w)
    return float(np.exp((log_num - log_den) / (1.0 - qf)))


def decompose(ensemble: SubsystemEnsemble, q) -> DecompositionResult:
    """Full pooled/within/between decomposition at order q."""
    qf = check_order(q)
    pooled = pooled_heterogeneity(ensemble, qf)
    within = within_heterogeneity(ensemble, qf)
    between = pooled / within
    warn = (not ensemble.has_equal_weights()) and qf not in (0.0, 1.0)
    return DecompositionResult(pooled=pooled, within=within, between=between,
                               lande_warning=warn)


def between_heterogeneity(ensemble: SubsystemEnsemble, q) -> float:
    """Effective number of completely distinct subsystems (pooled / within)."""
    return decompose(ensemble, q).between
