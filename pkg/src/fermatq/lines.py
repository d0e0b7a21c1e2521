"""Mean distance from the first row of FQM(p) to a straight line mod 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import FermatQuotientTable


@dataclass(frozen=True)
class LineSpec:
    """The line x -> {C x + D} on the unit torus."""

    C: float
    D: float = 0.0

    def __post_init__(self):
        if self.C == 0:
            raise ValueError("slope C must be nonzero")
        if not (math.isfinite(self.C) and math.isfinite(self.D)):
            raise ValueError("C and D must be finite")

    @property
    def is_integer(self) -> bool:
        return float(self.C).is_integer() and float(self.D).is_integer()

    @property
    def positive_slope(self) -> bool:
        """The 1/3 limit integral is stated for positive slopes (D only
        matters mod 1)."""
        return self.C > 0

    def in_slow_slope_regime(self, p: int) -> bool:
        """Informational: |C| below p^(1/12) log^(-2/3) p."""
        return abs(self.C) <= p ** (1 / 12) * math.log(p) ** (-2 / 3)


def line_value(line: LineSpec, x: float) -> float:
    y = line.C * x + line.D
    f = y - math.floor(y)
    # y slightly below an integer can round to exactly 1.0.
    return 0.0 if f >= 1.0 else f


@dataclass(frozen=True)
class MeanDistanceResult:
    p: int
    line: LineSpec
    mean: float
    exact: Fraction | None = None

    @property
    def deviation(self) -> float:
        if self.exact is not None:
            return float(abs(self.exact - Fraction(1, 3)))
        return abs(self.mean - 1 / 3)

    @property
    def error_scale(self) -> float:
        """|C|^(3/5) p^(-1/20) log^(2/5) p."""
        p = self.p
        return abs(self.line.C) ** 0.6 * p ** (-0.05) * math.log(p) ** 0.4

    def as_dict(self) -> dict:
        return {
            "p": int(self.p),
            "C": self.line.C,
            "D": self.line.D,
            "mean": self.mean,
            "exact": None if self.exact is None else f"{self.exact.numerator}/{self.exact.denominator}",
            "deviation": self.deviation,
            "error_scale": self.error_scale,
            "integer_path": self.exact is not None,
        }


def mean_line_distance(t: FermatQuotientTable, line: LineSpec) -> MeanDistanceResult:
    """(1/p) * sum_{b=1}^{p-1} |q(b)/p - {C b/p + D}|.

    Integer C and D are summed exactly: {C b / p + D} = (C b mod p) / p.
    Otherwise the terms are summed with math.fsum, which is correctly rounded
    and hence independent of summation order.
    """
    p = int(t.p)
    b = np.arange(1, p, dtype=np.int64)
    q = t.q[1:]
    if line.is_integer:
        c = int(line.C) % p
        # c, b < 2^31 so c * b fits int64; the sum stays below p^2.
        num = int(np.abs(q - (c * b) % p).sum())
        exact = Fraction(num, p * p)
        return MeanDistanceResult(t.p, line, float(exact), exact)
    y = line.C * (b / p) + line.D
    frac = y - np.floor(y)
    frac[frac >= 1.0] = 0.0
    terms = np.abs(q / p - frac)
    return MeanDistanceResult(t.p, line, math.fsum(terms.tolist()) / p)


def _inner(g):
    # Closed form of int_0^1 |y - g| dy.
    return g * g - g + 0.5


def integral_I(line: LineSpec, steps: int = 10**6, compare: bool = False) -> float:
    """Midpoint rule in x for int_0^1 (g^2 - g + 1/2) dx, g(x) = {C x + D}.

    Jumps of g inside a cell split the cell, so every sub-cell sees a single
    linear piece. With ``compare=True`` the line must satisfy the hypotheses
    under which the integral equals 1/3.
    """
    if steps < 10:
        raise ValueError("steps must be at least 10")
    if compare and not line.positive_slope:
        raise ValueError("the 1/3 limit is only claimed for C > 0")
    C, D = line.C, line.D
    lo, hi = sorted((D, C + D))
    ks = np.arange(math.floor(lo) + 1, math.ceil(hi), dtype=np.float64)
    jumps = (ks - D) / C
    jumps = jumps[(jumps > 0) & (jumps < 1)]
    edges = np.union1d(np.linspace(0.0, 1.0, steps + 1), jumps)
    mids = 0.5 * (edges[1:] + edges[:-1])
    y = C * mids + D
    g = y - np.floor(y)
    return math.fsum((_inner(g) * np.diff(edges)).tolist())


def integral_I_exact(line: LineSpec) -> Fraction | float:
    """Piecewise-exact integral; exact rational when C and D are rational floats."""
    C, D = Fraction(line.C), Fraction(line.D)
    lo, hi = sorted((D, C + D))
    ks = range(math.floor(lo) + 1, math.ceil(hi))
    cuts = sorted({Fraction(0), Fraction(1), *[(k - D) / C for k in ks if 0 < (k - D) / C < 1]})
    total = Fraction(0)
    for x0, x1 in zip(cuts, cuts[1:]):
        mid = (x0 + x1) / 2
        n = math.floor(C * mid + D)
        # g = C x + (D - n) on this piece; integrate g^2 - g + 1/2 exactly.
        def prim(x, n=n):
            g = C * x + D - n
            return g**3 / (3 * C) - g**2 / (2 * C) + x / 2
        total += prim(x1) - prim(x0)
    return total


def monte_carlo_I(line: LineSpec, samples: int = 10**6, seed: int = 0) -> tuple[float, float]:
    """Plain 2-D estimate of E|Y - g(X)| with its standard error."""
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    y = rng.random(samples)
    gx = line.C * x + line.D
    vals = np.abs(y - (gx - np.floor(gx)))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))
