"""Fully analytic two-component beta-mixture testbed.

Provides the mixture density, the optimal decision threshold for hard
assignment, the expected soft-assignment mass, its between-component
heterogeneity, the closed-form expected absolute distance between two
beta variables, and the head-to-head comparison row against the
non-categorical indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .classic import (
    functional_hill,
    leinster_cobbold,
    neqrqe,
    rescale_distance,
    similarity_from_distance,
)
from .core import check_order, renyi_heterogeneity
from .errors import DegenerateDistanceError, ValidationError
from .special import BetaShape, beta_pdf, gen_reg_inc_beta, log_beta, log_gamma, reg_hyp3f2_unit

_EQUAL_SHAPE_TOL = 1e-12


@dataclass(frozen=True)
class BetaMixtureParams:
    """Mixture (1-theta1) Beta(theta2, theta3) + theta1 Beta(theta3, theta2)."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        if not 0.0 < self.theta1 < 1.0:
            raise ValidationError(f"theta1 must be in (0, 1), got {self.theta1}")
        if not (self.theta2 > 0 and math.isfinite(self.theta2)):
            raise ValidationError(f"theta2 must be positive and finite, got {self.theta2}")
        if not (self.theta3 > 0 and math.isfinite(self.theta3)):
            raise ValidationError(f"theta3 must be positive and finite, got {self.theta3}")

    @property
    def component1(self) -> BetaShape:
        return BetaShape(self.theta2, self.theta3)

    @property
    def component2(self) -> BetaShape:
        return BetaShape(self.theta3, self.theta2)


def bmm_marginal_pdf(x: float, theta: BetaMixtureParams) -> float:
    """Marginal density of the observable at x in (0, 1)."""
    return (1.0 - theta.theta1) * beta_pdf(x, theta.component1) \
        + theta.theta1 * beta_pdf(x, theta.component2)


def optimal_threshold(theta: BetaMixtureParams) -> float:
    """Decision threshold where the two component posteriors are equal.

    For theta2 != theta3 the posteriors cross at
    tau = 1 / (1 + r) with r = ((1 - theta1) / theta1)^(1 / (theta2 - theta3)).
    With identical shapes the posteriors never cross and the whole interval
    is assigned to the more probable component (tau = 0 if theta1 > 1/2,
    else tau = 1).
    """
    diff = theta.theta2 - theta.theta3
    if abs(diff) < _EQUAL_SHAPE_TOL:
        return 0.0 if theta.theta1 > 0.5 else 1.0
    log_r = (math.log1p(-theta.theta1) - math.log(theta.theta1)) / diff
    # 1/(1+e^t) = expit(-t), stable for both signs of log_r.
    return float(expit(-log_r))


def assignment_mass(theta: BetaMixtureParams, tau: float) -> np.ndarray:
    """Expected hard-assignment distribution (fbar(z=1), fbar(z=2)) at
    threshold tau: mass above tau goes to component 2."""
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau must be in [0, 1], got {tau}")
    mass2 = (1.0 - theta.theta1) * gen_reg_inc_beta(tau, 1.0, theta.component1) \
        + theta.theta1 * gen_reg_inc_beta(tau, 1.0, theta.component2)
    mass2 = min(max(mass2, 0.0), 1.0)
    return np.array([1.0 - mass2, mass2])


def bmm_between_rrh(theta: BetaMixtureParams, tau: float, q) -> float:
    """Between-component heterogeneity of the thresholded assignments.

    Every observation is assigned with certainty, so the within term is
    identically 1 and between equals the pooled heterogeneity of the
    expected assignment mass. Always in [1, 2].
    """
    qf = check_order(q)
    return renyi_heterogeneity(assignment_mass(theta, tau), qf)


def beta_abs_distance(a: BetaShape, b: BetaShape) -> float:
    """Closed-form E|X - Y| for independent X ~ Beta(a), Y ~ Beta(b).

    d = E[X] - E[Y] + eta * (Phi_a - alpha1 * Phi_b), where eta collects
    the gamma/beta prefactors and Phi_a, Phi_b are regularized 3F~2 values
    at unit argument.
    """
    a1, b1 = a.alpha, a.beta
    a2, b2 = b.alpha, b.beta
    mean_diff = a1 / (a1 + b1) - a2 / (a2 + b2)
    log_eta = (
        math.log(2.0)
        + log_gamma(a1)
        + log_gamma(b2)
        + log_gamma(a1 + a2 + 1.0)
        - log_beta(a1, b1)
        - log_beta(a2, b2)
    )
    phi_a = reg_hyp3f2_unit(
        (a1, a1 + a2 + 1.0, 1.0 - b1),
        (a1 + 1.0, a1 + a2 + b2 + 1.0),
    )
    phi_b = reg_hyp3f2_unit(
        (a1 + 1.0, a1 + a2 + 1.0, 1.0 - b1),
        (a1 + 2.0, a1 + a2 + b2 + 1.0),
    )
    return mean_diff + math.exp(log_eta) * (phi_a - a1 * phi_b)


def expected_distance_matrix(theta: BetaMixtureParams) -> np.ndarray:
    """2x2 expected absolute distance between draws of the two components.

    The diagonal holds the (positive) expected distance between two
    independent draws of the same component.
    """
    c1, c2 = theta.component1, theta.component2
    d11 = beta_abs_distance(c1, c1)
    d12 = beta_abs_distance(c1, c2)
    d22 = beta_abs_distance(c2, c2)
    return np.array([[d11, d12], [d12, d22]])


@dataclass(frozen=True)
class ComparisonRow:
    """One row of the head-to-head index comparison at a given (theta, q, u)."""

    rrh: float
    fhn: float
    neqrqe: Optional[float]
    lci: float
    theta: BetaMixtureParams
    q: float
    u: float


def bmm_index_comparison(theta: BetaMixtureParams, q, u: float = 1.0) -> ComparisonRow:
    """Evaluate the categorical and non-categorical indices on the same
    analytic two-component problem.

    The quadratic-entropy column is filled only at q=2 and only when the
    expected-distance matrix is non-constant (it cannot be rescaled
    otherwise); in both other cases it is reported absent (None).
    """
    qf = check_order(q)
    if u < 0:
        raise ValidationError(f"u must be >= 0, got {u}")
    prior = np.array([1.0 - theta.theta1, theta.theta1])
    dist = expected_distance_matrix(theta)

    tau = optimal_threshold(theta)
    rrh = bmm_between_rrh(theta, tau, qf)
    fhn = functional_hill(dist, prior, qf, require_zero_diagonal=False)
    sim = similarity_from_distance(dist, u, require_zero_diagonal=False)
    lci = leinster_cobbold(sim, prior, qf, require_unit_diagonal=False)

    neq = None
    if qf == 2.0:
        try:
            scaled = rescale_distance(dist, require_zero_diagonal=False)
            neq = neqrqe(scaled, prior, require_zero_diagonal=False)
        except DegenerateDistanceError:
            neq = None
    return ComparisonRow(rrh=rrh, fhn=fhn, neqrqe=neq, lci=lci,
                         theta=theta, q=qf, u=float(u))
