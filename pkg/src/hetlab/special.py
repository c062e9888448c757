"""Self-contained special-function kernel for the beta-mixture machinery.

Provides log-gamma, the beta density, the (generalized) regularized
incomplete beta function, and the regularized hypergeometric 3F~2 at unit
argument. All functions are pure and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

from .errors import ConvergenceError, PrecisionError, ValidationError

_CF_MAX_ITER = 400
_CF_EPS = 1e-16
_FPMIN = 1e-300

_SERIES_REL_TOL = 1e-15
_SERIES_MAX_TERMS = 100_000
_INT_SNAP_TOL = 1e-12


@dataclass(frozen=True)
class BetaShape:
    """Shape parameters (alpha, beta) of a beta distribution, both > 0."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValidationError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValidationError(f"beta must be positive and finite, got {self.beta}")


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise ValidationError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def log_beta(a: float, b: float) -> float:
    """log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_pdf(x: float, shape: BetaShape) -> float:
    """Beta density x^(a-1) (1-x)^(b-1) / B(a, b) on the open interval (0, 1)."""
    if not 0.0 < x < 1.0:
        raise ValidationError(f"beta_pdf requires 0 < x < 1, got {x}")
    a, b = shape.alpha, shape.beta
    ln = (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_beta(a, b)
    return math.exp(ln)


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def reg_inc_beta(x: float, shape: BetaShape) -> float:
    """Regularized incomplete beta I_x(a, b), the Beta(a, b) CDF at x."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"reg_inc_beta requires 0 <= x <= 1, got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    a, b = shape.alpha, shape.beta
    ln_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    front = math.exp(ln_front)
    # Symmetry switch keeps the continued fraction in its fast-converging regime.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def gen_reg_inc_beta(x0: float, x1: float, shape: BetaShape) -> float:
    """Generalized regularized incomplete beta: I_{x1}(a, b) - I_{x0}(a, b)."""
    if x0 > x1:
        raise ValidationError(f"gen_reg_inc_beta requires x0 <= x1, got x0={x0} x1={x1}")
    return reg_inc_beta(x1, shape) - reg_inc_beta(x0, shape)


def _snap_nonpositive_int(a: float) -> float:
    r = round(a)
    if r <= 0 and abs(a - r) <= _INT_SNAP_TOL:
        return float(r)
    return a


def _exact_coeff_sum(a, b, min_terms, budget=0):
    """Sum series coefficients c_k (c_0 = 1, c_{k+1} = c_k
    (a1+k)(a2+k)(a3+k) / [(b1+k)(b2+k)(k+1)]) in exact rational arithmetic.

    Always sums the first min_terms coefficients; with a budget it keeps
    going until the next coefficient is negligible against the running sum
    at double precision (or the budget runs out). Returns (sum, next
    coefficient, number of terms consumed). Float parameters convert to
    Fractions exactly, so sign-alternating regions with huge intermediate
    terms incur no cancellation error.
    """
    af = [Fraction(v) for v in a]
    bf = [Fraction(v) for v in b]
    # Common-denominator integer arithmetic: Fraction would normalize with a
    # gcd on every operation, which dominates once terms grow to thousands
    # of bits.
    c_num = 1
    total_num = 0
    den = 1
    k = 0
    while True:
        if k >= min_terms:
            if budget <= 0 or total_num == 0:
                break
            if abs(c_num) << 60 < abs(total_num):
                break
            budget -= 1
        total_num += c_num
        step_num = 1
        step_den = k + 1
        for fr in af:
            t = fr + k
            step_num *= t.numerator
            step_den *= t.denominator
        for fr in bf:
            t = fr + k
            step_num *= t.denominator
            step_den *= t.numerator
        c_num *= step_num
        total_num *= step_den
        den *= step_den
        k += 1
    return Fraction(total_num, den), Fraction(c_num, den), k


def _fraction_log_abs(fr: Fraction) -> float:
    # math.log takes arbitrary-size ints, so this never overflows
    return math.log(abs(fr.numerator)) - math.log(fr.denominator)


def reg_hyp3f2_unit(num, den, *, rel_tol: float = _SERIES_REL_TOL,
                    max_terms: int = _SERIES_MAX_TERMS) -> float:
    """Regularized 3F~2(num; den; 1) = sum_k prod (num)_k / [Gamma(den_1+k) Gamma(den_2+k) k!].

    Terminating series (a numerator parameter is a non-positive integer) are
    summed exactly in rational arithmetic. Otherwise any sign-alternating
    prefix (negative numerator parameters) is summed exactly, and the
    same-sign remainder is summed until the running term drops below
    ``rel_tol`` relative to the partial sum, with a cap of ``max_terms``;
    a slowly decaying polynomial tail is closed with a two-parameter
    Hurwitz-zeta estimate.
    """
    a = [_snap_nonpositive_int(float(v)) for v in num]
    b = [float(v) for v in den]
    if len(a) != 3 or len(b) != 2:
        raise ValidationError("reg_hyp3f2_unit takes three numerator and two denominator parameters")
    for v in b:
        r = round(v)
        if r <= 0 and abs(v - r) <= _INT_SNAP_TOL:
            raise ConvergenceError(f"denominator parameter {v} sits on a gamma pole")
    if any(v <= 0 for v in b):
        # a negative non-integer denominator flips term signs unpredictably;
        # outside the domain this kernel needs
        raise ConvergenceError("denominator parameters must be positive")

    terminating = [int(-v) for v in a if v <= 0 and v == int(v)]
    s_exp = b[0] + b[1] - a[0] - a[1] - a[2]
    if not terminating and s_exp <= 0:
        raise ConvergenceError(
            f"series at unit argument diverges: sum(den) - sum(num) = {s_exp} <= 0"
        )
    prefactor = math.exp(-math.lgamma(b[0]) - math.lgamma(b[1]))

    if terminating:
        coeff_sum, _, _ = _exact_coeff_sum(a, b, min(terminating) + 1)
        return prefactor * float(coeff_sum)

    # Exact prefix over the region where (a_i + k) can still be negative,
    # extended until the coefficients stop mattering at double precision
    # (fast-decay series finish entirely inside the budget).
    k_min = 0
    negs = [-v for v in a if v < 0]
    if negs:
        k_min = int(math.ceil(max(negs))) + 1
    if k_min > max_terms - 3:
        raise ConvergenceError(
            f"sign-alternating prefix of {k_min} terms exceeds the {max_terms}-term budget"
        )
    prefix_sum, c_k0, k0 = _exact_coeff_sum(a, b, k_min, budget=300)

    # Same-sign remainder via a vectorized log-magnitude recurrence.
    n_rest = max_terms - k0
    k = np.arange(n_rest - 1, dtype=float) + k0
    ratio = ((a[0] + k) * (a[1] + k) * (a[2] + k)) / ((b[0] + k) * (b[1] + k) * (k + 1.0))
    sign = 1.0 if c_k0 > 0 else -1.0
    log_c0 = _fraction_log_abs(c_k0)
    log_terms = log_c0 + np.concatenate(([0.0], np.cumsum(np.log(ratio))))
    if np.max(log_terms) > 700.0:
        raise ConvergenceError("series terms overflow double precision")
    terms = sign * np.exp(log_terms)

    base = float(prefix_sum)
    partial = base + np.cumsum(terms)
    small = np.abs(terms) <= rel_tol * np.abs(partial)
    # Require two consecutive small terms to guard against odd/even dips.
    converged = np.flatnonzero(small[1:] & small[:-1])
    if converged.size:
        stop = converged[0] + 1
        return prefactor * float(partial[stop])

    # Cap reached: close the k^-(1+s) tail with a Hurwitz-zeta fit through the
    # last two terms, t_k ~ c k^-(1+s) (1 + e1/k).
    total = float(partial[-1])
    big_k = float(k0 + n_rest - 1)
    t_last = float(terms[-1])
    t_prev = float(terms[-2])
    c0_last = t_last * big_k ** (1.0 + s_exp)
    c0_prev = t_prev * (big_k - 1.0) ** (1.0 + s_exp)
    uc = (c0_prev - c0_last) * big_k * (big_k - 1.0)
    c = c0_last - uc / big_k
    z1 = float(_hurwitz_zeta(1.0 + s_exp, big_k + 1.0))
    z2 = float(_hurwitz_zeta(2.0 + s_exp, big_k + 1.0))
    z3 = float(_hurwitz_zeta(3.0 + s_exp, big_k + 1.0))
    tail = c * z1 + uc * z2
    result = total + tail
    # Residual of the two-term tail model; generous factor for the unfit
    # next-order coefficient.
    err_bound = abs(uc) * big_k * z3 * 10.0
    if err_bound > max(1e-14, 1e-6 * abs(result)):
        raise PrecisionError(
            f"series truncated at {max_terms} terms with estimated tail error {err_bound:.3g}",
            partial=prefactor * result,
        )
    return prefactor * result
