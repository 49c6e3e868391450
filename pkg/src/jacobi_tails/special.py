"""Log-domain special functions.

Everything downstream (densities, importance weights, normalizing
constants, closed-form tail values) is assembled from the functions here
and exchanged as natural logarithms; exponentiation happens only at the
final reporting step. At the parameter scales this package targets
(p2 up to 1e9, beta up to a few hundred) the raw gamma-function terms
reach ~1e12, so differences of log-gammas are computed with
cancellation-aware pairing rather than naive summation.
"""

from __future__ import annotations

import math

from .errors import NumericalError
from .params import ModelParams

# Stirling tail sum(B_{2k} / (2k(2k-1) z^{2k-1})), coefficients of z^{-(2k-1)}.
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    7.0 / 1092.0,
    -3617.0 / 122400.0,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# Arguments above this are handled by the asymptotic series directly.
_STIRLING_CUTOFF = 30.0

# Above this scale, differences of log-gammas are paired to avoid
# catastrophic cancellation (raw terms ~1e12 lose ~12 digits naively).
_PAIRING_CUTOFF = 1.0e6


def _stirling_tail(z: float) -> float:
    """Correction series of the Stirling expansion, valid for z >= 30."""
    w = 1.0 / z
    w2 = w * w
    acc = 0.0
    p = w
    for c in _STIRLING_COEF:
        acc += c * p
        p *= w2
    return acc


def log_gamma(z: float) -> float:
    """Natural log of the gamma function for real z > 0.

    Uses the Stirling series with Bernoulli corrections for z > 30 and
    an upward recurrence below, which stays accurate for arguments as
    large as ~1e12 where table-based minimax fits are untested.
    """
    if not (isinstance(z, (int, float)) and math.isfinite(z) and z > 0):
        raise ValueError(f"log_gamma requires finite z > 0, got {z!r}")
    z = float(z)
    if z >= _STIRLING_CUTOFF:
        return (z - 0.5) * math.log(z) - z + _HALF_LOG_TWO_PI + _stirling_tail(z)
    # Recur up to the asymptotic region: log G(z) = log G(z+m) - sum log(z+j).
    m = int(math.ceil(_STIRLING_CUTOFF - z))
    shift = 0.0
    for j in range(m):
        shift += math.log(z + j)
    zm = z + m
    return (zm - 0.5) * math.log(zm) - zm + _HALF_LOG_TWO_PI + _stirling_tail(zm) - shift


def log_gamma_diff(y: float, d: float) -> float:
    """log Gamma(y + d) - log Gamma(y), stable for huge y and moderate d.

    Expanded through log1p so the result keeps full absolute accuracy
    even when the two log-gamma values are ~1e12 and their difference
    is ~1e6. Requires y >= 30 and d >= 0.
    """
    if y < _STIRLING_CUTOFF or d < 0:
        raise ValueError("log_gamma_diff requires y >= 30 and d >= 0")
    if d == 0.0:
        return 0.0
    return (
        (y - 0.5) * math.log1p(d / y)
        + d * math.log(y + d)
        - d
        + _stirling_tail(y + d)
        - _stirling_tail(y)
    )


def log_beta(a: float, b: float) -> float:
    """Natural log of the beta function B(a, b) for a, b > 0.

    For max(a, b) > 1e6 the gamma terms are paired into a single
    log-gamma difference so the absolute error stays ~1e-10 even when
    the individual log-gamma values exceed 1e10.
    """
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"log_beta requires a, b > 0, got {a!r}, {b!r}")
    lo, hi = (a, b) if a <= b else (b, a)
    if hi > _PAIRING_CUTOFF:
        # log B = log G(lo) - [log G(lo + hi) - log G(hi)]
        return log_gamma(lo) - log_gamma_diff(hi, lo)
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def _beta_cont_frac(a: float, b: float, x: float, max_iter: int = 200000) -> float:
    """Continued fraction for the regularized incomplete beta (modified Lentz)."""
    eps = 1.0e-15
    tiny = 1.0e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise NumericalError(
        f"incomplete-beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def reg_inc_beta(a: float, b: float, t: float) -> float:
    """Regularized incomplete beta I_t(a, b) for a, b > 0 and t in [0, 1].

    Continued-fraction evaluation with the symmetry switch at
    t = (a+1)/(a+b+2), so convergence is uniform across the parameter
    range used by the exact n=1 tail oracle.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"reg_inc_beta requires a, b > 0, got {a!r}, {b!r}")
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"reg_inc_beta requires t in [0, 1], got {t!r}")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    log_front = a * math.log(t) + b * math.log1p(-t) - log_beta(a, b)
    if t < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cont_frac(a, b, t) / a
    return 1.0 - math.exp(log_front) * _beta_cont_frac(b, a, 1.0 - t) / b


def log_norm_ratio(params: ModelParams) -> float:
    """Log of the constant tying the n-point ordered density to its
    (n-1)-point reduction; the fixed prefactor of the importance weight.

    Assembled from seven gamma factors. When beta*p/2 exceeds 1e6 the
    numerator/denominator terms are paired (largest with nearest) and
    evaluated as stable log-gamma differences; target absolute error is
    ~1e-5 at the largest supported scale (beta=100, p2=1e9).
    """
    beta, n, p1, p2 = params.beta, params.n, params.p1, params.p2
    p = params.p
    bh = beta / 2.0
    if bh * p <= _PAIRING_CUTOFF:
        return (
            log_gamma(1.0 + bh)
            + log_gamma(bh * p)
            + log_gamma(bh * (p - 1.0))
            - log_gamma(1.0 + bh * n)
            - log_gamma(bh * p1)
            - log_gamma(bh * p2)
            - log_gamma(bh * (p - n))
        )
    # log G(bh*p) - log G(bh*p2) and log G(bh*(p-1)) - log G(bh*(p-n)).
    term1 = log_gamma_diff(bh * p2, bh * p1)
    term2 = log_gamma_diff(bh * (p - n), bh * (n - 1.0))
    return term1 + term2 + log_gamma(1.0 + bh) - log_gamma(1.0 + bh * n) - log_gamma(bh * p1)


def log_norm_ratio_asymptotic(params: ModelParams) -> float:
    """Large-dimension asymptotic of :func:`log_norm_ratio`.

    Stirling-combined form that keeps every O(1) contribution, so the
    dropped remainder vanishes as the dimensions grow (it is well below
    0.02*beta*n already at n=10, p1=1e3, p2=1e9). The leading behaviour
    is the familiar five-term sum

        (b*p1/2) log(p/p1) + (b*p2/2) log(p/p2)
        + (b*(n-1)/2) log(p/n) + log(b*p1)/2 + b*n/2,

    whose own remainder is only o(beta*n) and noticeably worse at
    finite sizes. Valid in the n << p1 << p2 shaped regime; inputs are
    not checked for shape.
    """
    beta, n, p1, p2 = params.beta, params.n, params.p1, params.p2
    p = params.p
    return (
        log_gamma(1.0 + beta / 2.0)
        - 0.5 * beta * math.log(beta / 2.0)
        + 0.5 * beta * p1 * math.log(p / p1)
        + 0.5 * beta * p2 * math.log(p / p2)
        + (0.5 * beta * (p - n) - 0.5) * math.log((p - 1.0) / (p - n))
        + 0.5 * beta * (n - 1.0) * math.log(beta * (p - 1.0) / (2.0 + beta * n))
        + 0.5 * math.log(0.5 * beta * p1)
        - 0.5 * (beta + 1.0) * math.log(0.5 * n)
        - _HALF_LOG_TWO_PI
    )


def log_jacobi_weight(y: float, params: ModelParams) -> float:
    """Log of the single-point weight y^(shape1-1) * (1-y)^(shape2-1).

    With p2 ~ 1e9 the second exponent reaches ~1e10 and the weight
    underflows any linear representation, so this is always kept in
    logs. Requires 0 < y < 1; callers handle boundary cases explicitly.
    """
    if not (0.0 < y < 1.0):
        raise ValueError(f"log_jacobi_weight requires 0 < y < 1, got {y!r}")
    e1 = params.shape1 - 1.0
    e2 = params.shape2 - 1.0
    t1 = e1 * math.log(y) if e1 != 0.0 else 0.0
    t2 = e2 * math.log1p(-y) if e2 != 0.0 else 0.0
    return t1 + t2


def log_ensemble_norm(params: ModelParams) -> float:
    """Log normalizing constant of the unordered n-point density.

    Direct product-form evaluation; used by the small-n quadrature
    oracles, whose preconditions keep the arguments moderate.
    """
    beta, n, p1, p2 = params.beta, params.n, params.p1, params.p2
    p = params.p
    bh = beta / 2.0
    acc = 0.0
    for j in range(1, n + 1):
        acc += (
            log_gamma(1.0 + bh)
            + log_gamma(bh * (p - n + j))
            - log_gamma(1.0 + bh * j)
            - log_gamma(bh * (p1 - n + j))
            - log_gamma(bh * (p2 - n + j))
        )
    return acc
