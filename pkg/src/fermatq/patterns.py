"""Order-pattern counts for tuples of FQM(p) entries spanned by fixed displacements.

A displacement pattern ``V = [(s_1, t_1), ..., (s_N, t_N)]`` attaches to every
admissible origin ``(a, b)`` the tuple ``(A[a+s_1, b+t_1], ..., A[a+s_N, b+t_N])``.
The counts below record how often the tuple, permuted by ``sigma``, is strictly
increasing. All comparisons are done on integer residues.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .core import FermatQuotientTable, MatrixIndex
from .parallel import row_plan, run_plan

MAX_SINGLE_N = 16
MAX_SWEEP_N = 8


@dataclass(frozen=True)
class DisplacementPattern:
    vectors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.vectors:
            raise ValueError("a displacement pattern needs at least one vector")

    @property
    def N(self) -> int:
        return len(self.vectors)

    @property
    def M(self) -> int:
        return max(max(abs(s), abs(t)) for s, t in self.vectors)

    @property
    def s(self) -> tuple[int, ...]:
        return tuple(v[0] for v in self.vectors)

    @property
    def t(self) -> tuple[int, ...]:
        return tuple(v[1] for v in self.vectors)

    @property
    def distinct_t(self) -> bool:
        return len(set(self.t)) == self.N

    @property
    def degenerate(self) -> bool:
        """Repeated second components: counts need not follow p^2/N!."""
        return not self.distinct_t

    def unique_t_indices(self) -> list[int]:
        """0-based indices j whose t_j differs from every other t."""
        ts = self.t
        return [j for j, tj in enumerate(ts) if ts.count(tj) == 1]

    def __str__(self) -> str:
        return ";".join(f"{s},{t}" for s, t in self.vectors)


def make_pattern(vectors: Sequence[Sequence[int]]) -> DisplacementPattern:
    vecs = []
    for v in vectors:
        s, t = v
        vecs.append((int(s), int(t)))
    return DisplacementPattern(tuple(vecs))


def parse_pattern(text: str) -> DisplacementPattern:
    """Parse ``"10,6;1,6;2,6"``."""
    parts = [chunk.strip() for chunk in text.split(";") if chunk.strip()]
    try:
        vecs = [tuple(int(x) for x in chunk.split(",")) for chunk in parts]
    except ValueError as exc:
        raise ValueError(f"bad vector list {text!r}") from exc
    if any(len(v) != 2 for v in vecs):
        raise ValueError(f"every vector needs exactly two components: {text!r}")
    return make_pattern(vecs)


def check_sigma(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    sigma = tuple(int(x) for x in sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def parse_sigma(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())


@dataclass(frozen=True)
class AdmissibleRegion:
    """Origins whose translates by every vector stay inside the index box."""

    a_lo: int
    a_hi: int
    b_lo: int
    b_hi: int

    @property
    def rows(self) -> int:
        return max(0, self.a_hi - self.a_lo + 1)

    @property
    def cols(self) -> int:
        return max(0, self.b_hi - self.b_lo + 1)

    @property
    def cardinality(self) -> int:
        return self.rows * self.cols

    def __contains__(self, origin) -> bool:
        a, b = origin
        return self.a_lo <= a <= self.a_hi and self.b_lo <= b <= self.b_hi


def admissible_region(p: int, pattern: DisplacementPattern) -> AdmissibleRegion:
    s, t = pattern.s, pattern.t
    return AdmissibleRegion(
        a_lo=max(0, -min(s)),
        a_hi=min(p - 1, p - 1 - max(s)),
        b_lo=max(1, 1 - min(t)),
        b_hi=min(p - 1, p - 1 - max(t)),
    )


@dataclass(frozen=True)
class SpannedPoint:
    origin: MatrixIndex
    residues: tuple[int, ...]
    p: int

    @property
    def coords(self) -> tuple[float, ...]:
        return tuple(k / self.p for k in self.residues)


def span_point(t: FermatQuotientTable, origin, pattern: DisplacementPattern) -> SpannedPoint:
    a, b = origin
    if (a, b) not in admissible_region(t.p, pattern):
        raise ValueError(f"origin {(a, b)} is outside the admissible region")
    res = tuple(t.entry(a + s, b + tt) for s, tt in pattern.vectors)
    return SpannedPoint(MatrixIndex(a, b), res, t.p)


def in_polyhedron(point, sigma: Sequence[int]) -> bool:
    """True iff the coordinates taken in the order sigma(1), ..., sigma(N)
    are strictly increasing. Any tie excludes the point from every polyhedron."""
    xs = point.residues if isinstance(point, SpannedPoint) else tuple(point)
    sigma = check_sigma(sigma, len(xs))
    ordered = [xs[k - 1] for k in sigma]
    return all(u < v for u, v in zip(ordered, ordered[1:]))


def _block(t: FermatQuotientTable, pattern: DisplacementPattern, region: AdmissibleRegion,
           a0: int, a1: int) -> np.ndarray:
    """Residues for origins a0 <= a < a1 (all admissible columns); shape (N, rows, cols)."""
    p = t.p
    a = np.arange(a0, a1, dtype=np.int64)
    b = np.arange(region.b_lo, region.b_hi + 1, dtype=np.int64)
    out = np.empty((pattern.N, a.size, b.size), dtype=np.int64)
    for j, (s, tt) in enumerate(pattern.vectors):
        cols = b + tt
        out[j] = (t.q[cols][None, :] - (a + s)[:, None] * t.inv[cols][None, :]) % p
    return out


def _has_tie(vals: np.ndarray) -> np.ndarray:
    if vals.shape[0] < 2:
        return np.zeros(vals.shape[1:], dtype=bool)
    srt = np.sort(vals, axis=0)
    return np.any(srt[1:] == srt[:-1], axis=0)


def _ordered_mask(vals: np.ndarray, sigma: tuple[int, ...]) -> np.ndarray:
    v = vals[[k - 1 for k in sigma]]
    if v.shape[0] < 2:
        return np.ones(v.shape[1:], dtype=bool)
    return np.all(v[1:] > v[:-1], axis=0)


@dataclass(frozen=True)
class PatternCountReport:
    p: int
    pattern: DisplacementPattern
    sigma: tuple[int, ...]
    region_card: int
    count: int
    tie_count: int

    @property
    def main_term(self) -> float:
        return self.p**2 / math.factorial(self.pattern.N)

    @property
    def ratio(self) -> float:
        """main_term / count (the ratio column of the reference tables)."""
        return self.main_term / self.count if self.count else math.inf

    def as_dict(self) -> dict:
        return {
            "p": int(self.p),
            "vectors": [list(v) for v in self.pattern.vectors],
            "sigma": list(self.sigma),
            "region_card": self.region_card,
            "count": self.count,
            "tie_count": self.tie_count,
            "main_term": self.main_term,
            "ratio": self.ratio,
        }


def count_pattern(t: FermatQuotientTable, pattern: DisplacementPattern, sigma: Sequence[int],
                  workers: int | None = None) -> PatternCountReport:
    if pattern.N > MAX_SINGLE_N:
        raise ValueError(f"N = {pattern.N} exceeds {MAX_SINGLE_N}")
    sigma = check_sigma(sigma, pattern.N)
    region = admissible_region(t.p, pattern)

    def work(a0: int, a1: int) -> tuple[int, int]:
        vals = _block(t, pattern, region, a0, a1)
        return int(_ordered_mask(vals, sigma).sum()), int(_has_tie(vals).sum())

    parts = run_plan(work, row_plan(region.a_lo, region.a_hi, region.cols), workers)
    count = sum(c for c, _ in parts)
    ties = sum(k for _, k in parts)
    return PatternCountReport(t.p, pattern, sigma, region.cardinality, count, ties)


def count_all_permutations(t: FermatQuotientTable, pattern: DisplacementPattern,
                           workers: int | None = None) -> dict[tuple[int, ...], PatternCountReport]:
    """One report per sigma in S_N (lexicographic order), from a single sweep."""
    n = pattern.N
    if n > MAX_SWEEP_N:
        raise ValueError(f"N = {n} exceeds {MAX_SWEEP_N} for a full permutation sweep")
    region = admissible_region(t.p, pattern)
    weights = (n ** np.arange(n, dtype=np.int64))[:, None]

    def work(a0: int, a1: int) -> tuple[dict[int, int], int]:
        vals = _block(t, pattern, region, a0, a1).reshape(n, -1)
        tie = _has_tie(vals)
        # The ascending argsort of a tie-free tuple is exactly sigma - 1.
        order = np.argsort(vals[:, ~tie], axis=0, kind="stable")
        codes, counts = np.unique((order * weights).sum(axis=0), return_counts=True)
        return dict(zip(codes.tolist(), counts.tolist())), int(tie.sum())

    totals: dict[int, int] = {}
    ties = 0
    for hist, k in run_plan(work, row_plan(region.a_lo, region.a_hi, region.cols), workers):
        ties += k
        for code, c in hist.items():
            totals[code] = totals.get(code, 0) + c

    out = {}
    for sigma in itertools.permutations(range(1, n + 1)):
        code = sum((k - 1) * n**i for i, k in enumerate(sigma))
        out[sigma] = PatternCountReport(t.p, pattern, sigma, region.cardinality,
                                        totals.get(code, 0), ties)
    return out


@dataclass(frozen=True)
class PointSets:
    """Origins in D(sigma, N, p) and their spanned residues, row-major order."""

    p: int
    origins: np.ndarray  # shape (n, 2)
    residues: np.ndarray  # shape (n, N)

    def __len__(self) -> int:
        return len(self.origins)

    @property
    def coords(self) -> np.ndarray:
        return self.residues / self.p


def emit_point_sets(t: FermatQuotientTable, pattern: DisplacementPattern, sigma: Sequence[int],
                    workers: int | None = None) -> PointSets:
    sigma = check_sigma(sigma, pattern.N)
    region = admissible_region(t.p, pattern)
    bs = np.arange(region.b_lo, region.b_hi + 1, dtype=np.int64)

    def work(a0: int, a1: int):
        vals = _block(t, pattern, region, a0, a1)
        ii, jj = np.nonzero(_ordered_mask(vals, sigma))
        origins = np.stack([ii + a0, bs[jj]], axis=1)
        return origins, vals[:, ii, jj].T

    parts = run_plan(work, row_plan(region.a_lo, region.a_hi, region.cols), workers)
    if not parts:
        return PointSets(t.p, np.empty((0, 2), np.int64), np.empty((0, pattern.N), np.int64))
    return PointSets(t.p, np.concatenate([o for o, _ in parts]), np.concatenate([r for _, r in parts]))


def iter_spanned_residues(t: FermatQuotientTable, pattern: DisplacementPattern,
                          workers: int | None = None) -> Iterator[np.ndarray]:
    """All points of X(p) as residue blocks of shape (n_chunk, N), row-major."""
    region = admissible_region(t.p, pattern)
    for a0, a1 in row_plan(region.a_lo, region.a_hi, region.cols):
        yield _block(t, pattern, region, a0, a1).reshape(pattern.N, -1).T
