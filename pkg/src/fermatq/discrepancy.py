"""Discrepancy measures, exponential-sum bounds and box combinatorics.

Exponential sums over FQM(p) are accumulated as integer histograms of the
phase residue ``k`` in ``e(k/p)``; the complex value is formed once at the
end in a fixed order, so it does not depend on how the sweep was split.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import FermatQuotientTable
from .parallel import row_plan, run_plan
from .patterns import DisplacementPattern, admissible_region, _block

MAX_BOX_CELLS = 10**8


def _as_unit_sequence(values) -> np.ndarray:
    s = np.asarray(values, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("empty sequence")
    if np.any((s < 0) | (s > 1)) or not np.all(np.isfinite(s)):
        raise ValueError("values must lie in [0, 1]")
    return s


def interval_discrepancy(values, alpha: float, beta: float) -> float:
    """#(S in [alpha, beta]) - |S| (beta - alpha), unnormalised."""
    s = _as_unit_sequence(values)
    return float(np.count_nonzero((s >= alpha) & (s <= beta)) - s.size * (beta - alpha))


def uniform_discrepancy(values) -> float:
    """sup over 0 <= alpha <= beta <= 1 of |#(S in [alpha, beta]) - n (beta - alpha)| / n.

    The excess is attained by closed intervals with both ends at sample
    values; the deficit is a supremum over open gaps whose ends are sample
    values or 0 and 1. Each is a running-extremum scan over sorted values.
    """
    s = np.sort(_as_unit_sequence(values))
    n = s.size
    u = np.unique(s)
    below = np.searchsorted(s, u, side="left")
    upto = np.searchsorted(s, u, side="right")
    # Excess: max over i <= j of (upto_j - n u_j) - (below_i - n u_i).
    excess = np.max((upto - n * u) - np.minimum.accumulate(below - n * u))
    # Deficit: max over ends e_k < e_l of (n e_l - below(e_l)) - (n e_k - upto(e_k)).
    ends = np.concatenate([[0.0], u, [1.0]])
    e_below = np.searchsorted(s, ends, side="left")
    e_upto = np.searchsorted(s, ends, side="right")
    f_hi = n * ends - e_below
    f_lo = n * ends - e_upto
    deficit = np.max(f_hi[1:] - np.minimum.accumulate(f_lo[:-1]))
    return float(max(excess, deficit, 0.0)) / n


def star_discrepancy(values) -> float:
    """sup over 0 <= beta <= 1 of |#(S in [0, beta]) - n beta| / n."""
    s = np.sort(_as_unit_sequence(values))
    n = s.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - s), np.max(s - (i - 1) / n)))


def erdos_turan_bound(values, K: int) -> float:
    """|S|/K + 3 sum_{m=1}^{K} |sum_s e(m s)| / m, a bound on the unnormalised
    interval discrepancy sup |#(S in [alpha, beta]) - |S| (beta - alpha)|."""
    if K <= 1:
        raise ValueError("K must be an integer > 1")
    s = _as_unit_sequence(values)
    m = np.arange(1, K + 1)
    sums = np.exp(2j * np.pi * np.outer(m, s)).sum(axis=1)
    return float(s.size / K + 3 * math.fsum((np.abs(sums) / m).tolist()))


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    terms: int
    bound: float

    @property
    def norm(self) -> float:
        return abs(self.value)

    @property
    def ratio(self) -> float:
        return self.norm / self.bound if self.bound else math.inf

    def as_dict(self) -> dict:
        return {"re": self.value.real, "im": self.value.imag, "norm": self.norm,
                "terms": self.terms, "bound": self.bound, "ratio": self.ratio}


def _phase_sum(hist: np.ndarray, p: int) -> complex:
    k = np.arange(p)
    w = np.exp(2j * np.pi * k / p)
    return complex(np.dot(hist.astype(np.float64), w))


def heath_brown_sum(t: FermatQuotientTable, m: int, X: int, Y: int) -> ExpSumResult:
    """sum over X < n <= X + Y, p not dividing n, of e(m q(n) / p)."""
    p = int(t.p)
    if m % p == 0:
        raise ValueError("m must be coprime to p")
    if X < 0 or Y < 1 or X + Y > p * p - 1:
        raise ValueError("need X >= 0, Y >= 1 and X + Y <= p^2 - 1")
    n = np.arange(X + 1, X + Y + 1, dtype=np.int64)
    n = n[n % p != 0]
    vals = t.entries(n // p, n % p)
    hist = np.bincount(vals * (m % p) % p, minlength=p)
    return ExpSumResult(_phase_sum(hist, p), int(n.size), Y**0.5 * p**0.375)


def _check_h(pattern: DisplacementPattern, h: Sequence[int]) -> np.ndarray:
    h = np.asarray(h, dtype=np.int64)
    if h.shape != (pattern.N,):
        raise ValueError(f"h must have {pattern.N} components")
    return h


def _bound_applies(pattern: DisplacementPattern, h: np.ndarray) -> bool:
    return any(h[j] != 0 for j in pattern.unique_t_indices())


def complete_exp_sum(t: FermatQuotientTable, pattern: DisplacementPattern, h: Sequence[int],
                     workers: int | None = None) -> ExpSumResult:
    """Sum of e(<h, x_ab>) over the full grid 0 <= a < p, 1 <= b < p.

    Shifted indices wrap modulo p; columns where some b + t_j is 0 mod p have
    no defined quotient and are skipped.
    """
    p = int(t.p)
    h = _check_h(pattern, h) % p
    b = np.arange(1, p, dtype=np.int64)
    cols = [(b + tj) % p for tj in pattern.t]
    keep = np.all(np.stack(cols) != 0, axis=0)
    cols = [c[keep] for c in cols]

    def work(a0: int, a1: int) -> np.ndarray:
        a = np.arange(a0, a1, dtype=np.int64)
        k = np.zeros((a.size, cols[0].size), dtype=np.int64)
        for hj, sj, c in zip(h.tolist(), pattern.s, cols):
            if hj:
                k += hj * ((t.q[c][None, :] - (a + sj)[:, None] % p * t.inv[c][None, :]) % p)
        return np.bincount((k % p).ravel(), minlength=p)

    hist = sum(run_plan(work, row_plan(0, p - 1, cols[0].size), workers), np.zeros(p, dtype=np.int64))
    terms = p * int(keep.sum())
    bound = pattern.N * p if _bound_applies(pattern, h) else float(terms)
    if not np.any(h):
        return ExpSumResult(complex(terms), terms, bound)
    return ExpSumResult(_phase_sum(hist, p), terms, bound)


def complete_exp_sum_collapsed(t: FermatQuotientTable, pattern: DisplacementPattern,
                               h: Sequence[int]) -> ExpSumResult:
    """The same sum after carrying out the a-summation in closed form.

    Row a enters each phase linearly with coefficient R(b) = -sum_j h_j (b + t_j)^-1,
    so the a-sum is p when R(b) = 0 mod p and vanishes otherwise.
    """
    p = int(t.p)
    h = _check_h(pattern, h) % p
    b = np.arange(1, p, dtype=np.int64)
    cols = [(b + tj) % p for tj in pattern.t]
    keep = np.all(np.stack(cols) != 0, axis=0)
    cols = [c[keep] for c in cols]
    r = np.zeros(cols[0].size, dtype=np.int64)
    base = np.zeros(cols[0].size, dtype=np.int64)
    for hj, sj, c in zip(h.tolist(), pattern.s, cols):
        r = (r - hj * t.inv[c]) % p
        base = (base + hj * ((t.q[c] - sj % p * t.inv[c]) % p)) % p
    roots = r == 0
    hist = np.bincount(base[roots], minlength=p) * p
    terms = p * int(keep.sum())
    bound = pattern.N * p if _bound_applies(pattern, h) else float(terms)
    return ExpSumResult(_phase_sum(hist, p), terms, bound)


def pattern_exp_sum(t: FermatQuotientTable, pattern: DisplacementPattern, h: Sequence[int],
                    workers: int | None = None) -> ExpSumResult:
    """Sum of e(<h, x_ab>) over the admissible region only."""
    p = int(t.p)
    h = _check_h(pattern, h) % p
    region = admissible_region(p, pattern)

    def work(a0: int, a1: int) -> np.ndarray:
        vals = _block(t, pattern, region, a0, a1)
        k = np.tensordot(h, vals, axes=1) % p
        return np.bincount(k.ravel(), minlength=p)

    plan = row_plan(region.a_lo, region.a_hi, region.cols)
    hist = sum(run_plan(work, plan, workers), np.zeros(p, dtype=np.int64))
    terms = region.cardinality
    bound = (pattern.N + 4 * pattern.M) * p if _bound_applies(pattern, h) else float(terms)
    if not np.any(h):
        return ExpSumResult(complex(terms), terms, bound)
    return ExpSumResult(_phase_sum(hist, p), terms, bound)


def r_of_h(h: Sequence[int]) -> int:
    return math.prod(max(1, abs(int(x))) for x in h)


def sum_inverse_r(N: int, H: int) -> Fraction:
    """sum over 0 < ||h||_inf <= H of 1/r(h), via (1 + 2 H_H)^N - 1."""
    if N < 1 or H < 1:
        raise ValueError("need N >= 1 and H >= 1")
    harmonic = sum(Fraction(1, k) for k in range(1, H + 1))
    return (1 + 2 * harmonic) ** N - 1


def sum_inverse_r_brute(N: int, H: int) -> Fraction:
    total = Fraction(0)
    for h in itertools.product(range(-H, H + 1), repeat=N):
        if any(h):
            total += Fraction(1, r_of_h(h))
    return total


def _weights(N: int, H: int) -> tuple[np.ndarray, np.ndarray]:
    """All nonzero h with ||h||_inf <= H and their weights 1/r(h)."""
    axis = np.arange(-H, H + 1, dtype=np.int64)
    hs = np.stack(np.meshgrid(*([axis] * N), indexing="ij"), axis=-1).reshape(-1, N)
    hs = hs[np.any(hs != 0, axis=1)]
    w = 1.0 / np.prod(np.maximum(1, np.abs(hs)), axis=1)
    return hs, w


def koksma_szusz_bound(points, H: int, c_n: float = 1.0, modulus: int | None = None) -> float:
    """c_n * (2/(H+1) + sum_{0<||h||<=H} |(1/R) sum_j e(<h, x_j>)| / r(h)).

    ``points`` are N-tuples in [0, 1); with ``modulus`` given they are instead
    integer residues k meaning k / modulus, and all exponential sums are read
    off one N-dimensional FFT of the residue histogram.
    """
    if H <= 1:
        raise ValueError("H must be an integer > 1")
    pts = np.asarray(points)
    if pts.ndim == 1:
        pts = pts[:, None]
    R, N = pts.shape
    if R == 0:
        raise ValueError("no points")
    if modulus is not None:
        m = int(modulus)
        if m**N > MAX_BOX_CELLS:
            raise ValueError("modulus^N too large for the FFT path")
        hist = np.zeros((m,) * N, dtype=np.float64)
        np.add.at(hist, tuple(pts.astype(np.int64).T % m), 1.0)
        spec = np.abs(np.fft.fftn(hist)) / R
        hs, w = _weights(N, H)
        mags = spec[tuple((hs % m).T)]
    else:
        hs, w = _weights(N, H)
        x = pts.astype(np.float64)
        mags = np.empty(len(hs))
        step = max(1, (1 << 22) // R)
        for i in range(0, len(hs), step):
            ph = np.exp(2j * np.pi * (hs[i:i + step] @ x.T))
            mags[i:i + step] = np.abs(ph.sum(axis=1)) / R
    return c_n * (2 / (H + 1) + math.fsum((w * mags).tolist()))


def box_count_discrepancy(points, L: int, modulus: int | None = None) -> float:
    """max over the L^N grid boxes of |count / R - L^-N|; a lower bound for
    the extreme discrepancy. With ``modulus`` the points are integer residues."""
    if L < 2:
        raise ValueError("L must be at least 2")
    pts = np.asarray(points)
    if pts.ndim == 1:
        pts = pts[:, None]
    R, N = pts.shape
    if R == 0:
        raise ValueError("no points")
    if L**N > MAX_BOX_CELLS:
        raise ValueError(f"L^N = {L**N} boxes exceeds the cap of {MAX_BOX_CELLS}")
    if modulus is not None:
        idx = pts.astype(np.int64) * L // int(modulus)
    else:
        idx = np.floor(pts.astype(np.float64) * L).astype(np.int64)
    idx = np.clip(idx, 0, L - 1)
    flat = np.ravel_multi_index(tuple(idx.T), (L,) * N)
    counts = np.bincount(flat, minlength=L**N)
    return float(np.max(np.abs(counts / R - L ** (-N))))


def ordered_box_counts(N: int, L: int) -> tuple[int, int]:
    """(#strictly increasing index tuples, #weakly increasing ones) in [1, L]^N."""
    if not 1 <= N <= L:
        raise ValueError("need 1 <= N <= L")
    return math.comb(L, N), math.comb(L + N - 1, N)


def ordered_box_counts_brute(N: int, L: int) -> tuple[int, int]:
    strict = weak = 0
    for idx in itertools.product(range(L), repeat=N):
        if all(u < v for u, v in zip(idx, idx[1:])):
            strict += 1
        if all(u <= v for u, v in zip(idx, idx[1:])):
            weak += 1
    return strict, weak


def fermat_row_sequence(t: FermatQuotientTable) -> np.ndarray:
    """{q(b)/p : 1 <= b <= p-1}."""
    return t.q[1:] / int(t.p)


__all__ = [
    "ExpSumResult", "box_count_discrepancy", "complete_exp_sum", "complete_exp_sum_collapsed",
    "erdos_turan_bound", "fermat_row_sequence", "heath_brown_sum", "interval_discrepancy",
    "koksma_szusz_bound", "ordered_box_counts", "ordered_box_counts_brute", "pattern_exp_sum",
    "r_of_h", "star_discrepancy", "sum_inverse_r", "sum_inverse_r_brute", "uniform_discrepancy",
]
