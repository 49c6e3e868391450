"""Fast self-validation battery wiring the estimators to their oracles.

Each check reports its tolerance and measured value; the battery is the
release gate behind the command-line "validate" subcommand and is sized
to finish in well under a minute. Statistical checks express their
tolerances in CLT standard-error units, so the quick mode (smaller N)
widens them automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .estimator import estimate_centered_moments, run_direct_mc, run_is
from .oracles import oracle_tail_n1, oracle_tail_n2, tail_n1_quadrature
from .params import ModelParams
from .sampling import StreamPool, TruncExpParams, derive_stream, log_trunc_exp_density, sample_beta
from .tridiag import (
    TridiagonalMatrix,
    build_jacobi_tridiagonal,
    eig_tridiagonal,
    eig_tridiagonal_bisect,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}  {self.name}: measured={self.measured:.6g} "
            f"tolerance={self.tolerance:.6g} ({self.detail})"
        )


def _check(name, measured, tolerance, detail) -> CheckResult:
    return CheckResult(name, bool(measured <= tolerance), float(measured), float(tolerance), detail)


def _trace_identity_checks(seed: int, n_draws: int, offdiag_scale: float) -> list[CheckResult]:
    # offdiag_scale != 1 emulates a mis-built off-diagonal: the
    # eigenvalues come from the scaled entries while the identity is
    # checked against the entries the variates prescribe, so only the
    # sum-of-squares identity (which sees the off-diagonal) may break.
    params = ModelParams(2.0, 12, 100, 400)
    pool = StreamPool(seed)
    worst_sum = 0.0
    worst_sumsq = 0.0
    for k in range(1, n_draws + 1):
        tri = build_jacobi_tridiagonal(params, pool.stream(k))
        eigs = eig_tridiagonal(
            TridiagonalMatrix(diag=tri.diag, offdiag=tri.offdiag * offdiag_scale)
        )
        worst_sum = max(worst_sum, abs(eigs.sum() - tri.diag.sum()))
        worst_sumsq = max(
            worst_sumsq,
            abs((eigs**2).sum() - ((tri.diag**2).sum() + 2.0 * (tri.offdiag**2).sum())),
        )
    tol = 1.0e-10 * params.n
    return [
        _check(
            "trace-identity-sum", worst_sum, tol,
            f"eigenvalue sum vs diagonal sum over {n_draws} draws",
        ),
        _check(
            "trace-identity-sum-of-squares", worst_sumsq, tol,
            f"eigenvalue square sum vs diag^2 + 2*offdiag^2 over {n_draws} draws",
        ),
    ]


def _proposal_density_normalization() -> CheckResult:
    worst = 0.0
    for rate in (1.0e-8, 1.0, 1.0e4):
        for lower in (0.0, 0.5, 0.999):
            tp = TruncExpParams(rate=rate, lower=lower)
            scale = min(1.0 / rate, 1.0 - lower)
            pts = sorted({min(lower + j * scale, 1.0 - 1e-12) for j in (0.5, 1, 2, 5, 10, 20)})
            val, _ = quad(
                lambda y: math.exp(log_trunc_exp_density(y, tp)),
                lower, 1.0, points=[p for p in pts if lower < p < 1.0], limit=300,
            )
            worst = max(worst, abs(val - 1.0))
    return _check(
        "proposal-density-normalization", worst, 1.0e-8,
        "integral of the truncated-exponential density over its support, 9-point grid",
    )


def _beta_moment_check(seed: int, n_draws: int) -> CheckResult:
    rng = derive_stream(seed, 0)
    worst = 0.0
    for _ in range(20):
        a = math.exp(rng.uniform(math.log(0.5), math.log(1.0e10)))
        b = math.exp(rng.uniform(math.log(0.5), math.log(1.0e10)))
        draws = sample_beta(rng, np.full(n_draws, a), np.full(n_draws, b))
        mean = a / (a + b)
        var = a * b / ((a + b) ** 2 * (a + b + 1.0))
        se_mean = math.sqrt(var / n_draws)
        z_mean = abs(draws.mean() - mean) / se_mean
        # CLT error of the sample variance, fourth-moment based (normal-ish
        # approximation is adequate as a 5-sigma gate).
        m = draws.mean()
        m4 = np.mean((draws - m) ** 4)
        se_var = math.sqrt(max(m4 - var**2, 1e-300) / n_draws)
        z_var = abs(draws.var(ddof=1) - var) / se_var
        worst = max(worst, z_mean, z_var)
    return _check(
        "beta-sampler-moments", worst, 5.0,
        f"worst mean/variance z-score over 20 (a,b) pairs spanning [0.5, 1e10], N={n_draws}",
    )


def _eigensolver_cross_check(seed: int) -> CheckResult:
    rng = derive_stream(seed, 1)
    pool = StreamPool(seed)
    worst = 0.0
    for k in range(1, 101):
        n = int(rng.integers(2, 51))
        params = ModelParams(2.0, n, n + int(rng.integers(0, 50)), 4 * n + int(rng.integers(0, 200)))
        tri = build_jacobi_tridiagonal(params, pool.stream(k))
        worst = max(worst, float(np.abs(eig_tridiagonal(tri) - eig_tridiagonal_bisect(tri)).max()))
    return _check(
        "eigensolver-vs-bisection", worst, 1.0e-10,
        "max eigenvalue gap between the QL-family driver and Sturm bisection, 100 matrices",
    )


def _n1_oracle_check(seed: int, n_samples: int) -> CheckResult:
    params = ModelParams(2.0, 1, 50, 200, x=1.5)
    exact = oracle_tail_n1(params)
    cross = tail_n1_quadrature(params)
    rep = run_is(params, n_samples, seed)
    z = abs(rep.estimate - exact) / rep.std_error
    detail = (
        f"IS vs incomplete-beta tail (N={n_samples}); "
        f"oracle cross-check gap {abs(exact - cross):.2e}"
    )
    if abs(exact - cross) > 1.0e-8 * max(exact, 1e-300):
        return CheckResult("is-vs-n1-oracle", False, z, 3.5, detail + " [oracle routes disagree]")
    return _check("is-vs-n1-oracle", z, 3.5, detail)


def _n2_oracle_check(seed: int, n_samples: int) -> CheckResult:
    params = ModelParams(2.0, 2, 6, 9, x=1.8122)
    exact = oracle_tail_n2(params, abs_tol=1.0e-8)
    rep = run_direct_mc(params, n_samples, seed)
    z = abs(rep.estimate - exact) / rep.std_error
    return _check(
        "direct-mc-vs-n2-quadrature", z, 3.5,
        f"direct MC (N={n_samples}) vs 2-D quadrature tail {exact:.5f}",
    )


def _centered_moment_check(seed: int, n_draws: int) -> list[CheckResult]:
    params = ModelParams(2.0, 8, 400, 2000)
    cm = estimate_centered_moments(params, n_draws, seed)
    n, p1, p = params.n, params.p1, params.p
    # Finite-size center of the second moment: leading term minus the
    # documented O(n^2/p) correction, which is material when p1/p ~ 1/6.
    center = n * n / p1 - n * n / p
    z2 = abs(cm.m2 - center) / cm.se2
    m1_allow = max(5.0 * cm.se1, 5.0 * n * n / p)
    return [
        _check(
            "centered-second-moment", z2, 5.0,
            f"M2={cm.m2:.4f} vs n^2/p1 - n^2/p = {center:.4f} (N={n_draws})",
        ),
        _check(
            "centered-first-moment", abs(cm.m1), m1_allow,
            f"M1={cm.m1:+.5f} within the O(n^2/p) allowance (N={n_draws})",
        ),
    ]


def run_battery(
    seed: int = 20_240_801, quick: bool = False, offdiag_scale: float = 1.0
) -> list[CheckResult]:
    """Run every validation check and return the results.

    quick mode reduces the Monte Carlo sample counts; the statistical
    tolerances are z-score based so they widen accordingly. offdiag_scale
    perturbs the off-diagonal entries inside the trace-identity check,
    which is the negative control: any value other than 1 must break the
    sum-of-squares identity while leaving the plain-sum identity intact.
    """
    scale = 5 if quick else 1
    checks: list[CheckResult] = []
    checks.extend(_trace_identity_checks(seed, 2000 // scale, offdiag_scale))
    checks.append(_proposal_density_normalization())
    checks.append(_beta_moment_check(seed + 1, 10_000 // scale))
    checks.append(_eigensolver_cross_check(seed + 2))
    checks.append(_n1_oracle_check(seed + 3, 100_000 // scale))
    checks.append(_n2_oracle_check(seed + 4, 100_000 // scale))
    checks.extend(_centered_moment_check(seed + 5, 10_000 // scale))
    return checks
