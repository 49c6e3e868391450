"""Problem instance for beta-Jacobi largest-eigenvalue tail estimation.

A :class:`ModelParams` bundles the ensemble parameters (beta, n, p1, p2)
with the optional threshold factor x. The tail event of interest is

    { largest eigenvalue > p1 * x / (p1 + p2) }   with x > 1.

All derived quantities (weight exponents, proposal rate, threshold) are
exposed as properties so a params object stays a plain immutable value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one beta-Jacobi tail problem.

    Attributes
    ----------
    beta : float
        Inverse-temperature / interaction exponent, > 0.
    n : int
        Number of eigenvalues, >= 1.
    p1, p2 : float
        Dimension parameters, both >= n.
    x : float or None
        Threshold factor. Required for tail estimation (x > 1 and
        p1*x/(p1+p2) < 1); may be None for pure ensemble sampling.
    """

    beta: float
    n: int
    p1: float
    p2: float
    x: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if not (math.isfinite(self.p1) and self.p1 >= self.n):
            raise ValueError(f"p1 must satisfy p1 >= n, got p1={self.p1}, n={self.n}")
        if not (math.isfinite(self.p2) and self.p2 >= self.n):
            raise ValueError(f"p2 must satisfy p2 >= n, got p2={self.p2}, n={self.n}")
        if self.x is not None:
            if not (math.isfinite(self.x) and self.x > 1):
                raise ValueError(f"threshold factor x must exceed 1, got {self.x}")
            if self.p1 * self.x / (self.p1 + self.p2) >= 1:
                raise ValueError(
                    f"p1*x/(p1+p2) must be < 1, got {self.p1 * self.x / (self.p1 + self.p2)}"
                )

    @property
    def p(self) -> float:
        """Total dimension p1 + p2."""
        return self.p1 + self.p2

    @property
    def shape1(self) -> float:
        """First exponent parameter beta*(p1-n+1)/2 of the point weight."""
        return self.beta * (self.p1 - self.n + 1) / 2.0

    @property
    def shape2(self) -> float:
        """Second exponent parameter beta*(p2-n+1)/2 of the point weight."""
        return self.beta * (self.p2 - self.n + 1) / 2.0

    def _require_x(self) -> float:
        if self.x is None:
            raise ValueError("this operation requires the threshold factor x")
        return self.x

    @property
    def threshold(self) -> float:
        """Tail threshold p1*x/p for the largest eigenvalue."""
        return self.p1 * self._require_x() / self.p

    @property
    def rate(self) -> float:
        """Rate beta*p*(x-1)/(2x) of the truncated-exponential proposal."""
        x = self._require_x()
        return self.beta * self.p * (x - 1.0) / (2.0 * x)

    def swapped(self) -> "ModelParams":
        """Same instance with p1 and p2 exchanged (smallest-eigenvalue duality)."""
        return replace(self, p1=self.p2, p2=self.p1)

    def reduced(self) -> "ModelParams":
        """Lower-ensemble parameters (n-1, p1-1, p2-1) used by the proposal."""
        if self.n < 2:
            raise ValueError("reduced() requires n >= 2")
        return ModelParams(self.beta, self.n - 1, self.p1 - 1, self.p2 - 1, x=None)
