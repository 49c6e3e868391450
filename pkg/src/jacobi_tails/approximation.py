"""Closed-form tail approximation and parameter-regime diagnostics.

The approximation is the Laplace-type asymptotic of the tail integral:
a constant prefactor, the interaction power at the threshold, the point
weight at the threshold, and a Gaussian-order correction for the bulk
fluctuation of the lower eigenvalues. It is exact as the dimensions
grow in the strongest regime; the regime checker reports which of the
supported parameter-growth assumptions the inputs resemble. The
asymptotic statement carries a vanishing correction inside its exponent
(alpha = 1/2 + o(1)); this implementation takes the limit value 1/2 and
folds the remainder into the documented tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ModelParams
from .special import log_jacobi_weight, log_norm_ratio

_REGIME_ORDER = ("H0", "H1", "H2")


def log_tail_approximation(params: ModelParams) -> float:
    """Log of the closed-form approximation to P(largest > p1*x/p).

    Assembled as

        log 2 + log n + log(x/(x-1)) - log(beta*p) + log(norm ratio)
        + beta*(n-1) * log(p1*(x-1)/p) + log point weight(p1*x/p)
        - beta*n^2 / (2*p1*(x-1)^2)

    where the x/(x-1) factor is the sharp Laplace constant of the
    threshold integral (the integrand decays at rate beta*p*(x-1)/(2x),
    whose reciprocal carries that factor). Output is a log-probability,
    typically very negative; exponentiation is left to the caller.
    """
    x = params.x
    if x is None:
        raise ValueError("log_tail_approximation requires the threshold factor x")
    beta, n, p1 = params.beta, params.n, params.p1
    p = params.p
    return (
        math.log(2.0)
        + math.log(n)
        + math.log(x)
        - math.log(x - 1.0)
        - math.log(beta * p)
        + log_norm_ratio(params)
        + beta * (n - 1.0) * math.log(p1 * (x - 1.0) / p)
        + log_jacobi_weight(params.threshold, params)
        - beta * n * n / (2.0 * p1 * (x - 1.0) ** 2)
    )


@dataclass(frozen=True)
class RegimeReport:
    """Diagnostic ratios and the strongest matched growth regime.

    ratios holds the raw diagnostic quantities so callers can judge
    borderline cases themselves; matched is one of "H0", "H1", "H2" or
    "none"; threshold is the smallness cutoff that was applied.
    """

    ratios: dict[str, float]
    matched: str
    threshold: float


def regime_check(params: ModelParams, threshold: float = 0.1) -> RegimeReport:
    """Classify the parameters against the supported growth regimes.

    A "much smaller" clause is satisfied when its ratio is strictly
    below the threshold; a "same order, not exceeding" clause when the
    ratio is strictly below 1. The shared requirement that beta
    dominates log(n)/n and n/p1 uses the same below-1 cutoff (those
    ratios are O(1)-scaled rather than vanishing at realistic sizes).
    The strongest satisfied regime wins, in the order H0 > H1 > H2.

    - H0 (tail approximation becomes exact, estimator variance
      vanishes): beta*n*p1^2/p2 and (beta*n)^5/(beta*p1)^3 both small.
    - H1 (estimator strongly efficient): the same two ratios bounded
      below their comparators.
    - H2 (estimator efficient on the log scale): n*p1/p2 and n/p1 small.
    """
    if threshold <= 0 or threshold >= 1:
        raise ValueError("threshold must lie in (0, 1)")
    beta, n, p1, p2 = params.beta, params.n, params.p1, params.p2
    bn = beta * n
    ratios = {
        "beta*n*p1^2/p2": beta * n * p1 * p1 / p2,
        "(beta*n)^5/(beta*p1)^3": bn**5 / (beta * p1) ** 3,
        "log(n)/(beta*n)": math.log(n) / bn if n > 1 else 0.0,
        "n/(beta*p1)": n / (beta * p1),
        "n*p1/p2": n * p1 / p2,
        "n/p1": n / p1,
    }
    beta_dominates = ratios["log(n)/(beta*n)"] < 1.0 and ratios["n/(beta*p1)"] < 1.0
    h0 = (
        beta_dominates
        and ratios["beta*n*p1^2/p2"] < threshold
        and ratios["(beta*n)^5/(beta*p1)^3"] < threshold
    )
    h1 = (
        beta_dominates
        and ratios["beta*n*p1^2/p2"] < 1.0
        and ratios["(beta*n)^5/(beta*p1)^3"] < 1.0
    )
    h2 = beta_dominates and ratios["n*p1/p2"] < threshold and ratios["n/p1"] < threshold
    for name, ok in zip(_REGIME_ORDER, (h0, h1, h2)):
        if ok:
            return RegimeReport(ratios=ratios, matched=name, threshold=threshold)
    return RegimeReport(ratios=ratios, matched="none", threshold=threshold)
