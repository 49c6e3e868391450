"""Seedable, splittable random streams and the elementary samplers.

Every Monte Carlo replication in this package owns a private
:class:`numpy.random.Generator` derived deterministically from
(master_seed, replication_index), so results are byte-identical for any
worker count. Streams are derived by a splitmix64 avalanche mix rather
than jump-ahead: replication k always uses stream index k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Rejection sampling of the truncated exponential retries until the
# shifted draw lands below 1; the cap is a safety net that is
# unreachable unless the acceptance probability is ~1e-6 or smaller.
_REJECTION_CAP = 1_000_000


def _splitmix64(state: int) -> int:
    """One splitmix64 output for the given 64-bit state."""
    z = (state + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _stream_state(master_seed: int, index: int) -> dict:
    """PCG64 state keyed by a splitmix64 avalanche mix of (seed, index).

    Four mix outputs fill the 128-bit state and the 128-bit stream
    selector (forced odd), the generator's native multi-stream
    mechanism, so distinct indices give statistically independent
    streams without jump-ahead.
    """
    base = (master_seed & _MASK64) ^ _splitmix64(index & _MASK64)
    s_hi = _splitmix64((base + 1) & _MASK64)
    s_lo = _splitmix64((base + 2) & _MASK64)
    i_hi = _splitmix64((base + 3) & _MASK64)
    i_lo = _splitmix64((base + 4) & _MASK64)
    return {
        "bit_generator": "PCG64",
        "state": {"state": (s_hi << 64) | s_lo, "inc": ((i_hi << 64) | i_lo) | 1},
        "has_uint32": 0,
        "uinteger": 0,
    }


def derive_stream(master_seed: int, index: int) -> np.random.Generator:
    """Derive an independent random stream for one replication.

    A pure function of (master_seed, index): calling it twice with the
    same arguments yields generators producing identical sequences, and
    distinct indices yield independent streams.
    """
    bg = np.random.PCG64(0)
    bg.state = _stream_state(int(master_seed), int(index))
    return np.random.Generator(bg)


class StreamPool:
    """Re-keys one generator object per replication (hot-loop form).

    stream(k) returns a generator positioned exactly as
    derive_stream(master_seed, k), byte-identically, without paying
    object construction per replication. The returned object is shared:
    finish with one replication before asking for the next stream.
    """

    def __init__(self, master_seed: int):
        self._seed = int(master_seed)
        self._bg = np.random.PCG64(0)
        self._gen = np.random.Generator(self._bg)

    def stream(self, index: int) -> np.random.Generator:
        self._bg.state = _stream_state(self._seed, index)
        return self._gen


def sample_gamma(stream: np.random.Generator, shape):
    """Draw from Gamma(shape, scale=1); scalar or elementwise on arrays.

    Shapes >= 1 go through the generator's squeeze-based
    acceptance-rejection sampler, which stays stable up to shape ~5e10
    (relative fluctuation shape^-1/2). Shapes below 1 use the
    boost-by-uniform-power transform G_a = G_(a+1) * U^(1/a), with
    zero-underflow draws redone so every returned value is positive.
    """
    arr = np.asarray(shape, dtype=float)
    scalar = arr.ndim == 0
    if arr.size == 0:
        return arr.copy()
    lo = float(arr.min())
    if not (math.isfinite(lo) and lo > 0 and np.isfinite(arr.max())):
        raise ValueError("gamma shape parameters must be positive and finite")
    if lo >= 1.0:
        g = stream.standard_gamma(arr)
        return float(g) if scalar else g
    a = np.atleast_1d(arr)
    out = np.empty_like(a)
    big = a >= 1.0
    if big.any():
        out[big] = stream.standard_gamma(a[big])
    small = ~big
    asm = a[small]
    vals = np.zeros(asm.shape)
    for _ in range(100):
        todo = vals <= 0.0
        if not todo.any():
            break
        g = stream.standard_gamma(asm[todo] + 1.0)
        u = stream.random(int(todo.sum()))
        vals[todo] = g * np.exp(np.log(u) / asm[todo])
    else:
        raise NumericalError("gamma sampler kept underflowing for tiny shapes")
    out[small] = vals
    return float(out[0]) if scalar else out


def sample_beta(stream: np.random.Generator, a, b):
    """Draw from Beta(a, b) as G_a / (G_a + G_b); scalar or elementwise.

    Draws that round to exactly 0 or 1 in floating point (probability
    below 1e-300 for the parameter ranges used here) are redone so
    downstream logs of x and 1-x stay finite.
    """
    ga = sample_gamma(stream, a)
    gb = sample_gamma(stream, b)
    x = ga / (ga + gb)
    if np.ndim(x) == 0:
        if 0.0 < x < 1.0:
            return float(x)
    else:
        lo, hi = float(np.min(x)), float(np.max(x))
        if 0.0 < lo and hi < 1.0:  # NaN from 0/0 fails this and falls through
            return x
    return _sample_beta_redraw(stream, np.asarray(a, float), np.asarray(b, float), x)


def _sample_beta_redraw(stream, a_arr, b_arr, first):
    """Slow path: redo boundary or 0/0 draws elementwise."""
    scalar = a_arr.ndim == 0 and b_arr.ndim == 0
    a_arr, b_arr = np.broadcast_arrays(np.atleast_1d(a_arr), np.atleast_1d(b_arr))
    out = np.array(np.atleast_1d(first), dtype=float, copy=True)
    for _ in range(100):
        with np.errstate(invalid="ignore"):
            todo = ~((out > 0.0) & (out < 1.0))
        if not todo.any():
            break
        ga = sample_gamma(stream, a_arr[todo])
        gb = sample_gamma(stream, b_arr[todo])
        with np.errstate(invalid="ignore"):
            out[todo] = ga / (ga + gb)
    else:
        raise NumericalError("beta sampler kept producing boundary values")
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class TruncExpParams:
    """Truncated shifted exponential on (lower, 1) with the given rate."""

    rate: float
    lower: float
    upper: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive, got {self.rate}")
        if not (0.0 <= self.lower < self.upper):
            raise ValueError(f"need 0 <= lower < upper, got {self.lower}, {self.upper}")
        if self.upper != 1.0:
            raise ValueError("upper end of the support is fixed at 1")


def sample_trunc_exp(
    stream: np.random.Generator, tp: TruncExpParams, method: str = "inverse"
) -> float:
    """One draw from the truncated shifted exponential on (lower, 1).

    Two interchangeable methods produce the same law:

    - "rejection": draw Exp(rate), shift by lower, retry until < 1;
    - "inverse": invert the truncated CDF through expm1/log1p, which
      costs one uniform regardless of the acceptance probability and
      stays exact in the flat-density limit rate -> 0.
    """
    if method == "rejection":
        for _ in range(_REJECTION_CAP):
            y = tp.lower + stream.standard_exponential() / tp.rate
            if y < 1.0:
                return y
        raise NumericalError(
            f"trunc-exp rejection cap hit (rate={tp.rate}, lower={tp.lower})"
        )
    if method != "inverse":
        raise ValueError(f"unknown method {method!r}")
    return _sample_trunc_exp_inverse(stream, tp.rate, tp.lower)


def _sample_trunc_exp_inverse(stream: np.random.Generator, rate: float, lower: float) -> float:
    """Hot-path inverse-CDF draw on raw floats."""
    z = rate * (1.0 - lower)
    em = math.expm1(-z)
    while True:
        u = stream.random()
        # y = lower - log(1 - u*(1 - e^-z)) / rate, written stably.
        y = lower - math.log1p(u * em) / rate
        if lower < y < 1.0:
            return y


def log_trunc_exp_density(y: float, tp: TruncExpParams) -> float:
    """Log density of the truncated shifted exponential; -inf off support.

    The normalizer 1 - exp(-rate*(1-lower)) is evaluated through expm1
    so the result is accurate both when rate*(1-lower) is ~1e-8 and
    when it is ~1e4.
    """
    return _log_trunc_exp_density(y, tp.rate, tp.lower)


def _log_trunc_exp_density(y: float, rate: float, lower: float) -> float:
    """Hot-path form of :func:`log_trunc_exp_density` on raw floats."""
    if not (lower < y < 1.0):
        return -math.inf
    z = rate * (1.0 - lower)
    return math.log(rate) - math.log(-math.expm1(-z)) - rate * (y - lower)
