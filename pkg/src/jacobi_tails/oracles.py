"""Small-n analytic and quadrature oracles for the tail probability.

At n=1 the largest-eigenvalue law is a beta distribution, so the tail
is one regularized incomplete-beta evaluation. At n=2 the tail is a
2-D integral of the joint ordered density over a triangle, done here by
nested adaptive quadrature with the integrand evaluated in log domain
and exponentiated per call under a max-shift (the joint density is
representable only in logs once beta*p2 is moderately large).

These routines are deliberately independent of the Monte Carlo paths:
they share only the log-special-function layer, so estimator bugs and
oracle bugs cannot cancel.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import NumericalError
from .params import ModelParams
from .special import (
    _beta_cont_frac,
    log_beta,
    log_ensemble_norm,
    log_jacobi_weight,
)

_EXP_CAP = 700.0  # exp argument cap; probe-grid max can miss the true peak


def log_integral_exp(
    log_f,
    a: float,
    b: float,
    *,
    epsrel: float = 1.0e-10,
    epsabs_linear: float = 0.0,
    points=None,
    probes: int = 129,
):
    """log of integral(exp(log_f)) over (a, b), by shifted adaptive quadrature.

    The integrand is probed on a grid (plus any caller-supplied interior
    points) to find a shift M, then quad integrates exp(log_f - M).
    Returns (log_value, log_abs_err). A value of -inf means the
    integrand is identically zero at working precision.
    """
    if not b > a:
        raise ValueError(f"empty integration interval [{a}, {b}]")
    xs = a + (b - a) * (np.arange(probes) + 0.5) / probes
    if points:
        xs = np.concatenate([xs, [p for p in points if a < p < b]])
    m = max(log_f(float(x)) for x in xs)
    if m == -math.inf:
        return -math.inf, -math.inf

    def shifted(x: float) -> float:
        v = log_f(x) - m
        return math.exp(v) if v < _EXP_CAP else math.exp(_EXP_CAP)

    eps_shift = 0.0
    if epsabs_linear > 0.0:
        arg = math.log(epsabs_linear) - m
        eps_shift = math.exp(min(arg, _EXP_CAP))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            shifted,
            a,
            b,
            epsabs=eps_shift,
            epsrel=epsrel,
            limit=800,
            points=[p for p in points if a < p < b] if points else None,
        )
    if val <= 0.0:
        return -math.inf, m + math.log(max(err, 1.0e-300))
    return m + math.log(val), m + math.log(max(err, 1.0e-300))


def _safe_log_weight(y: float, params: ModelParams) -> float:
    if not 0.0 < y < 1.0:
        return -math.inf
    return log_jacobi_weight(y, params)


def oracle_tail_n1(params: ModelParams) -> float:
    """Exact tail P(eigenvalue > p1*x/p) for the n=1 ensemble.

    The single eigenvalue is Beta(beta*p1/2, beta*p2/2) distributed.
    When the tail is the smaller piece it is evaluated directly on the
    complement branch of the continued fraction, keeping full relative
    precision down to ~1e-300 instead of cancelling against 1.
    """
    if params.n != 1:
        raise ValueError(f"oracle_tail_n1 requires n=1, got n={params.n}")
    a, b, t = params.shape1, params.shape2, params.threshold
    if t <= 0.0:
        return 1.0
    if t >= 1.0:
        return 0.0
    log_front = a * math.log(t) + b * math.log1p(-t) - log_beta(a, b)
    if t < (a + 1.0) / (a + b + 2.0):
        return 1.0 - math.exp(log_front) * _beta_cont_frac(a, b, t) / a
    return math.exp(log_front) * _beta_cont_frac(b, a, 1.0 - t) / b


def tail_n1_quadrature(params: ModelParams, epsrel: float = 1.0e-11) -> float:
    """Independent quadrature route to the n=1 tail (cross-check).

    Integrates the beta density over (threshold, 1) after rescaling by
    the local exponential decay rate, so the adaptive rule sees an
    O(1)-width integrand even when the tail mass sits in a ~1e-9 sliver.
    """
    if params.n != 1:
        raise ValueError(f"tail_n1_quadrature requires n=1, got n={params.n}")
    t = params.threshold
    rate = max(params.rate, 1.0)
    vmax = min(rate * (1.0 - t), 500.0)

    def log_f(v: float) -> float:
        return _safe_log_weight(t + v / rate, params)

    from .special import log_beta  # local import keeps module deps one-way

    log_i, _ = log_integral_exp(log_f, 0.0, vmax, epsrel=epsrel)
    if log_i == -math.inf:
        return 0.0
    return math.exp(log_i - math.log(rate) - log_beta(params.shape1, params.shape2))


def oracle_tail_n2(
    params: ModelParams, abs_tol: float = 1.0e-10, *, lower: float | None = None
) -> float:
    """Tail P(largest eigenvalue > p1*x/p) for n=2 by 2-D quadrature.

    Integrates twice the joint density over {0 < x1 < x2 < 1, x2 > t}
    with the exact product-form normalizing constant. Passing lower=0.0
    integrates the whole simplex, which must give 1 (the total-mass
    check used by the validation battery). Raises NumericalError if the
    achieved error estimate exceeds abs_tol.
    """
    if params.n != 2:
        raise ValueError(f"oracle_tail_n2 requires n=2, got n={params.n}")
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    t = params.threshold if lower is None else float(lower)
    if t >= 1.0:
        return 0.0
    t = max(t, 0.0)
    beta = params.beta
    log_c2 = log_ensemble_norm(params)
    inner_rel = min(1.0e-9, abs_tol / 20.0)

    def inner_log(x2: float) -> float:
        if x2 <= 0.0:
            return -math.inf

        def log_f1(x1: float) -> float:
            if not 0.0 < x1 < x2:
                return -math.inf
            return beta * math.log(x2 - x1) + _safe_log_weight(x1, params)

        val, _ = log_integral_exp(log_f1, 0.0, x2, epsrel=inner_rel, probes=65)
        return val

    def log_g(x2: float) -> float:
        w = _safe_log_weight(x2, params)
        if w == -math.inf:
            return -math.inf
        return math.log(2.0) + log_c2 + w + inner_log(x2)

    points = None
    if lower is None and params.x is not None:
        # Hint the adaptive rule at the decay scale below the threshold spike.
        r = params.rate
        if r * (1.0 - t) > 30.0:
            points = [t + j / r for j in (1.0, 2.0, 4.0, 8.0, 16.0, 30.0)]
    log_p, log_err = log_integral_exp(
        log_g, t, 1.0, epsrel=min(1.0e-10, abs_tol / 20.0),
        epsabs_linear=abs_tol / 4.0, points=points,
    )
    if log_p == -math.inf:
        return 0.0
    p_val = math.exp(log_p)
    achieved = math.exp(log_err) + inner_rel * p_val
    if achieved > abs_tol:
        raise NumericalError(
            f"n=2 quadrature achieved error {achieved:.3e} > requested {abs_tol:.3e}"
        )
    return p_val
