"""Categorical Renyi heterogeneity of a single distribution, plus the
classical diversity/inequality indices it generalizes or transforms into.

The elasticity order q is a plain non-negative float. The values 0.0, 1.0
and math.inf are distinguished encodings selecting the richness, perplexity
and Berger-Parker branches; any other float (including values numerically
close to 1) goes through the generic formula.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .errors import UndefinedOrderError, ValidationError

PROB_TOL = 1e-9

TABLE_INDICES = (
    "richness",
    "perplexity",
    "inverse_simpson",
    "berger_parker",
    "renyi_entropy",
    "shannon_entropy",
    "tsallis_entropy",
    "simpson_concentration",
    "gini_simpson",
    "generalized_entropy_index",
)

_Q_REQUIRED = {"renyi_entropy", "tsallis_entropy", "generalized_entropy_index"}


def as_distribution(p, tol: float = PROB_TOL) -> np.ndarray:
    """Validate a probability vector. Rejects rather than renormalizes."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError("distribution must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("distribution entries must be finite")
    if np.any(arr < 0):
        raise ValidationError("distribution entries must be non-negative")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise ValidationError(f"distribution must sum to 1 within {tol}, got {total!r}")
    return arr


def normalize(p) -> np.ndarray:
    """Explicitly rescale a non-negative vector to sum to 1."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError("expected a non-empty 1-D vector")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValidationError("entries must be finite and non-negative")
    total = float(arr.sum())
    if total <= 0:
        raise ValidationError("cannot normalize a zero vector")
    return arr / total


def check_order(q) -> float:
    """Validate an elasticity order: a non-negative real, inf allowed."""
    qf = float(q)
    if math.isnan(qf) or qf < 0:
        raise UndefinedOrderError(f"elasticity order must be >= 0, got {q}")
    return qf


def renyi_heterogeneity(p, q) -> float:
    """Effective number of equally probable states of order q.

    (sum p_i^q)^(1/(1-q)) for generic q; support count at q=0, perplexity
    at q=1, inverse maximum probability at q=inf. Always in [1, n].
    """
    arr = as_distribution(p)
    qf = check_order(q)
    if qf == 0.0:
        return float(np.count_nonzero(arr > 0.0))
    if math.isinf(qf):
        return float(1.0 / arr.max())
    pos = arr[arr > 0.0]
    log_pos = np.log(pos)
    if qf == 1.0:
        return float(np.exp(-np.dot(pos, log_pos)))
    # Log-domain evaluation avoids under/overflow at extreme q or small p.
    return float(np.exp(logsumexp(qf * log_pos) / (1.0 - qf)))


class IndexValue(NamedTuple):
    """An index value plus a flag marking that a q-limit branch was used."""

    value: float
    limit_branch: bool = False


def table1_index(p, index: str, q=None) -> IndexValue:
    """One of the classical indices expressed as a transform of the
    Renyi heterogeneity. q is required only by renyi_entropy,
    tsallis_entropy and generalized_entropy_index.
    """
    if index not in TABLE_INDICES:
        raise ValidationError(f"unknown index {index!r}; choose from {TABLE_INDICES}")
    arr = as_distribution(p)
    if index in _Q_REQUIRED:
        if q is None:
            raise ValidationError(f"{index} requires an elasticity order q")
        qf = check_order(q)
    else:
        qf = None

    if index == "richness":
        return IndexValue(renyi_heterogeneity(arr, 0.0))
    if index == "perplexity":
        return IndexValue(renyi_heterogeneity(arr, 1.0))
    if index == "inverse_simpson":
        return IndexValue(renyi_heterogeneity(arr, 2.0))
    if index == "berger_parker":
        return IndexValue(renyi_heterogeneity(arr, math.inf))
    if index == "renyi_entropy":
        return IndexValue(math.log(renyi_heterogeneity(arr, qf)))
    if index == "shannon_entropy":
        return IndexValue(math.log(renyi_heterogeneity(arr, 1.0)))
    if index == "simpson_concentration":
        return IndexValue(1.0 / renyi_heterogeneity(arr, 2.0))
    if index == "gini_simpson":
        return IndexValue(1.0 - 1.0 / renyi_heterogeneity(arr, 2.0))

    if math.isinf(qf):
        raise UndefinedOrderError(f"{index} is not defined at q=inf")

    if index == "tsallis_entropy":
        if qf == 1.0:
            return IndexValue(math.log(renyi_heterogeneity(arr, 1.0)), limit_branch=True)
        pi = renyi_heterogeneity(arr, qf)
        return IndexValue((1.0 - pi ** (1.0 - qf)) / (qf - 1.0))

    # generalized_entropy_index
    n = arr.size
    if qf == 1.0:
        # Theil-style limit: log n - Shannon entropy.
        h = math.log(renyi_heterogeneity(arr, 1.0))
        return IndexValue(math.log(n) - h, limit_branch=True)
    if qf == 0.0:
        # Mean log deviation limit.
        if np.any(arr == 0.0):
            return IndexValue(math.inf, limit_branch=True)
        mld = -math.log(n) - float(np.mean(np.log(arr)))
        return IndexValue(mld, limit_branch=True)
    pi = renyi_heterogeneity(arr, qf)
    return IndexValue(((pi / n) ** (1.0 - qf) - 1.0) / (qf * (qf - 1.0)))
