"""Tridiagonal random-matrix model of the beta-Jacobi ensemble.

A draw is built from independent beta variates c_1..c_n, s_1..s_(n-1):

    c_k ~ Beta(b'(p1-k+1), b'(p2-k+1)),      b' = beta/2
    s_k ~ Beta(b'(n-k),    b'(p1+p2-n-k+1))

    a_k = s_(k-1) (1 - c_(k-1)) + c_k (1 - s_(k-1))        (diagonal)
    b_k = sqrt(c_k (1 - c_k) s_k (1 - s_(k-1)))            (off-diagonal)

with c_0 = s_0 = 0. The eigenvalues of the resulting symmetric
tridiagonal matrix are distributed exactly as the unordered ensemble,
so ordered samples come out of a dense-free eigensolve. The s recursion
stops at k = n-1: at k = n the first beta parameter would be zero, a
degenerate law, consistent with the matrix needing only n-1
off-diagonal entries.

Two independent eigenvalue routines are provided: the production path
(LAPACK's implicit-QL/QR family driver for symmetric tridiagonals) and
a Sturm-sequence bisection solver used as an in-repo cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lapack as _lapack

from .errors import NumericalError
from .params import ModelParams
from .sampling import _sample_beta_redraw, sample_gamma

# Eigenvalues of ensemble draws may poke out of [0, 1] by rounding; this
# far and no farther. Anything beyond is a hard numerical error.
_SPECTRUM_SLACK = 1.0e-9

_clamp_count = 0


def clamp_count() -> int:
    """Number of ensemble eigenvalues clamped back into [0, 1] so far."""
    return _clamp_count


def reset_clamp_count() -> None:
    global _clamp_count
    _clamp_count = 0


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix, plus the generating beta variates.

    The aux arrays c and s are retained for trace-identity and moment
    tests; they are None for hand-built matrices.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    c: np.ndarray | None = None
    s: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a 1-D array of length >= 1")
        if e.shape != (d.size - 1,):
            raise ValueError("offdiag must have length len(diag) - 1")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)


@lru_cache(maxsize=128)
def _beta_shape_arrays(params: ModelParams):
    """Concatenated gamma shape array (c numerators, c denominators, s
    numerators, s denominators) for one ensemble draw; read-only. The
    second element flags whether every shape is >= 1, in which case the
    generator's gamma sampler is called without the small-shape wrapper."""
    n = params.n
    bh = params.beta / 2.0
    k = np.arange(1, n + 1, dtype=float)
    kk = np.arange(1, n, dtype=float)
    shapes = np.concatenate(
        [
            bh * (params.p1 - k + 1.0),
            bh * (params.p2 - k + 1.0),
            bh * (n - kk),
            bh * (params.p - n - kk + 1.0),
        ]
    )
    shapes.setflags(write=False)
    return shapes, bool(shapes.min() >= 1.0)


def _draw_variates(params: ModelParams, stream: np.random.Generator):
    """Draw the (c, s) beta variates of one ensemble representative.

    All 4n-2 gamma variates behind the beta draws come from one
    generator call (the joint law is unchanged; this is purely a
    call-overhead optimization for the Monte Carlo hot path). Boundary
    draws and 0/0 outcomes are redone so logs of c, 1-c, s, 1-s stay
    finite downstream.
    """
    n = params.n
    shapes, plain = _beta_shape_arrays(params)
    g = stream.standard_gamma(shapes) if plain else sample_gamma(stream, shapes)
    c = g[:n] / (g[:n] + g[n : 2 * n])
    s = g[2 * n : 3 * n - 1] / (g[2 * n : 3 * n - 1] + g[3 * n - 1 :])
    if not (0.0 < min(c.min(initial=0.5), s.min(initial=0.5))
            and max(c.max(initial=0.5), s.max(initial=0.5)) < 1.0):
        c = _sample_beta_redraw(stream, shapes[:n], shapes[n : 2 * n], c)
        s = _sample_beta_redraw(stream, shapes[2 * n : 3 * n - 1], shapes[3 * n - 1 :], s)
    return c, s


def _assemble(c: np.ndarray, s: np.ndarray):
    """Diagonal and off-diagonal entries from the (c, s) variates."""
    n = c.size
    c_prev = np.empty(n)
    c_prev[0] = 0.0
    c_prev[1:] = c[:-1]
    s_prev = np.empty(n)
    s_prev[0] = 0.0
    s_prev[1:] = s  # s_(k-1) for k = 1..n
    diag = s_prev * (1.0 - c_prev) + c * (1.0 - s_prev)
    if n > 1:
        offdiag = np.sqrt(c[:-1] * (1.0 - c[:-1]) * s * (1.0 - s_prev[:-1]))
    else:
        offdiag = np.empty(0)
    return diag, offdiag


def build_jacobi_tridiagonal(
    params: ModelParams, stream: np.random.Generator
) -> TridiagonalMatrix:
    """Draw one tridiagonal representative of the beta-Jacobi ensemble."""
    c, s = _draw_variates(params, stream)
    diag, offdiag = _assemble(c, s)
    return TridiagonalMatrix(diag=diag, offdiag=offdiag, c=c, s=s)


def eig_tridiagonal(tri: TridiagonalMatrix) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending.

    Production path, backed by the LAPACK root-free implicit-QL/QR
    driver for symmetric tridiagonals (sterf). Non-convergence is
    reported as a NumericalError, never silently ignored.
    """
    if tri.diag.size == 1:
        return tri.diag.copy()
    vals, info = _lapack.dsterf(tri.diag, tri.offdiag)
    if info != 0:
        raise NumericalError(
            f"tridiagonal eigensolver failed to converge (lapack info={info})"
        )
    return vals


def eig_tridiagonal_bisect(tri: TridiagonalMatrix, tol: float = 1.0e-13) -> np.ndarray:
    """Eigenvalues by Sturm-sequence bisection, ascending.

    Independent of the LAPACK path; used as the test oracle. All n
    eigenvalues are bisected simultaneously inside their Gershgorin
    interval, with the Sturm count evaluated as a vectorized recurrence.
    """
    d = tri.diag
    e = tri.offdiag
    n = d.size
    if n == 1:
        return d.copy()
    b2 = e * e
    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo_bound = float(np.min(d - radius))
    hi_bound = float(np.max(d + radius))
    span = max(1.0, abs(lo_bound), abs(hi_bound))
    tiny = 1.0e-300

    def count_below(x: np.ndarray) -> np.ndarray:
        # Sturm sequence: the number of negative pivots of T - x*I equals
        # the number of eigenvalues below x.
        q = d[0] - x
        cnt = (q < 0.0).astype(np.int64)
        for i in range(1, n):
            q = np.where(np.abs(q) < tiny, np.where(q < 0.0, -tiny, tiny), q)
            q = d[i] - x - b2[i - 1] / q
            cnt += q < 0.0
        return cnt

    lo = np.full(n, lo_bound - 1.0e-12 * span)
    hi = np.full(n, hi_bound + 1.0e-12 * span)
    want = np.arange(1, n + 1)  # eigenvalue k is inf{x : count(x) >= k+1}, 1-based
    for _ in range(200):
        if np.all(hi - lo <= tol * span):
            break
        mid = 0.5 * (lo + hi)
        reached = count_below(mid) >= want
        hi = np.where(reached, mid, hi)
        lo = np.where(reached, lo, mid)
    else:
        raise NumericalError("bisection eigensolver failed to localize the spectrum")
    return 0.5 * (lo + hi)


def sample_jacobi_ordered(params: ModelParams, stream: np.random.Generator) -> np.ndarray:
    """Ordered eigenvalue sample of the beta-Jacobi ensemble, ascending.

    Eigenvalues within 1e-9 of [0, 1] are clamped to the boundary (a
    module-level diagnostic counter records how often); anything
    farther out raises a NumericalError.
    """
    global _clamp_count
    diag, offdiag = _assemble(*_draw_variates(params, stream))
    if diag.size == 1:
        eigs = diag
    else:
        eigs, info = _lapack.dsterf(diag, offdiag, overwrite_d=True, overwrite_e=True)
        if info != 0:
            raise NumericalError(
                f"tridiagonal eigensolver failed to converge (lapack info={info})"
            )
    if eigs[0] < 0.0 or eigs[-1] > 1.0:
        if eigs[0] < -_SPECTRUM_SLACK or eigs[-1] > 1.0 + _SPECTRUM_SLACK:
            raise NumericalError(
                "ensemble eigenvalue escaped [0,1] beyond rounding slack: "
                f"[{eigs[0]}, {eigs[-1]}]"
            )
        _clamp_count += int(np.count_nonzero((eigs < 0.0) | (eigs > 1.0)))
        eigs = np.clip(eigs, 0.0, 1.0)
    return eigs
