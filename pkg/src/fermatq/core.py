"""Prime-field arithmetic, Fermat quotients and O(p)-space access to FQM(p).

Residues are always the least nonnegative representatives in ``[0, p-1]``.
The full ``p x (p-1)`` matrix is never stored: every entry is derived from
the first row and the table of inverses as ``A[a, b] = q(b) - a * b^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

PRIME_LIMIT = 2**31

# Deterministic Miller-Rabin witnesses for every n < 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class PrimeValidationError(ValueError):
    """Base class for rejected moduli."""


class NegativeInputError(PrimeValidationError):
    pass


class NotPrimeError(PrimeValidationError):
    pass


class EvenPrimeError(PrimeValidationError):
    pass


class PrimeOutOfRangeError(PrimeValidationError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class OddPrime(int):
    """An odd prime below 2^31; construct through :func:`validate_prime`."""

    def __new__(cls, n: int) -> "OddPrime":
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError(f"expected an integer, got {type(n).__name__}")
        n = int(n)
        if n < 0:
            raise NegativeInputError(f"{n} is negative")
        if n >= PRIME_LIMIT:
            raise PrimeOutOfRangeError(f"{n} is not below 2^31")
        if n == 2:
            raise EvenPrimeError("p = 2 is excluded; an odd prime is required")
        if not is_prime(n):
            raise NotPrimeError(f"{n} is not prime")
        return super().__new__(cls, n)

    def __repr__(self) -> str:
        return f"OddPrime({int(self)})"


def validate_prime(n: int) -> OddPrime:
    if isinstance(n, OddPrime):
        return n
    return OddPrime(n)


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).tolist()


def odd_primes_in(lo: int, hi: int) -> list[int]:
    return [q for q in primes_up_to(hi) if q >= max(lo, 3)]


def smallest_prime_factors(n: int) -> np.ndarray:
    """spf[k] for 0 <= k <= n, with spf[0] = 0 and spf[1] = 1."""
    spf = np.arange(n + 1, dtype=np.int64)
    for i in range(2, int(n**0.5) + 1):
        if spf[i] == i:
            block = spf[i * i :: i]
            mask = block == np.arange(i * i, n + 1, i)
            block[mask] = i
    return spf


def inverse_mod(b: int, p: int) -> int:
    p = validate_prime(p)
    if b % p == 0:
        raise ZeroDivisionError(f"{b} is not invertible modulo {p}")
    return pow(b, -1, p)


def fermat_quotient_oracle(n: int, p: int) -> int:
    """((n^(p-1) - 1) / p) mod p by exponentiation modulo p^2.

    This is the reference every faster path is checked against.
    """
    p = validate_prime(p)
    if not 1 <= n <= p * p - 1:
        raise ValueError(f"base {n} outside [1, p^2 - 1]")
    if n % p == 0:
        raise ValueError(f"base {n} is divisible by {p}")
    r = pow(n, p - 1, p * p)
    return (r - 1) // p % p


class MatrixIndex(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True)
class FermatQuotientTable:
    """First row of FQM(p) and the inverses modulo p.

    ``q[b]`` and ``inv[b]`` are defined for ``1 <= b <= p-1``; slot 0 holds 0.
    """

    p: OddPrime
    q: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)

    @property
    def base_row(self) -> list[int]:
        return self.q[1:].tolist()

    @property
    def inverses(self) -> list[int]:
        return self.inv[1:].tolist()

    def check_index(self, a: int, b: int) -> None:
        if not (0 <= a <= self.p - 1 and 1 <= b <= self.p - 1):
            raise IndexError(f"({a}, {b}) outside [0, {self.p - 1}] x [1, {self.p - 1}]")

    def entry(self, a: int, b: int) -> int:
        self.check_index(a, b)
        return (int(self.q[b]) - a * int(self.inv[b])) % self.p

    def entries(self, a, b) -> np.ndarray:
        """Vectorised ``A[a, b]``; ``a`` may be any integers (taken mod p),
        ``b`` must already lie in ``[1, p-1]``."""
        a = np.asarray(a, dtype=np.int64) % self.p
        b = np.asarray(b, dtype=np.int64)
        return (self.q[b] - a * self.inv[b]) % self.p

    def zero_row(self, b: int) -> int:
        if not 1 <= b <= self.p - 1:
            raise IndexError(f"column {b} outside [1, {self.p - 1}]")
        return int(b * int(self.q[b]) % self.p)

    def row(self, a: int) -> list[int]:
        b = np.arange(1, self.p, dtype=np.int64)
        return self.entries(np.full_like(b, a), b).tolist()


def build_table(p: int) -> FermatQuotientTable:
    """Fill the first row with one exponentiation per prime below p.

    For composite b = u * v < p the integer product needs no reduction, so the
    logarithm law gives q(b) = q(u) + q(v) mod p; the same layering makes the
    (completely multiplicative) inverse table.
    """
    p = validate_prime(p)
    n = p - 1
    spf = smallest_prime_factors(n)
    q = np.zeros(p, dtype=np.int64)
    inv = np.zeros(p, dtype=np.int64)
    inv[1] = 1
    if n < 2:
        return FermatQuotientTable(p, q, inv)

    idx = np.arange(n + 1, dtype=np.int64)
    is_p = (spf == idx) & (idx >= 2)
    p2 = p * p
    for r in np.flatnonzero(is_p).tolist():
        q[r] = (pow(r, p - 1, p2) - 1) // p % p
        inv[r] = pow(r, -1, p)

    # Layer by number of prime factors so both cofactors are filled first.
    omega = np.zeros(n + 1, dtype=np.int64)
    for r in np.flatnonzero(is_p).tolist():
        rk = r
        while rk <= n:
            omega[rk::rk] += 1
            rk *= r
    for k in range(2, int(omega.max()) + 1):
        bs = np.flatnonzero(omega == k)
        u = spf[bs]
        v = bs // u
        q[bs] = (q[u] + q[v]) % p
        inv[bs] = inv[u] * inv[v] % p
    return FermatQuotientTable(p, q, inv)


def fqm_entry(t: FermatQuotientTable, idx: MatrixIndex | tuple[int, int]) -> int:
    a, b = idx
    return t.entry(a, b)


def zero_row_of_column(t: FermatQuotientTable, b: int) -> int:
    return t.zero_row(b)


# Identities between entries (indices and values mod p).


def symmetry_holds(t: FermatQuotientTable, a: int, b: int) -> bool:
    p = t.p
    return t.entry(a, b) == t.entry(p - 1 - a, p - b)


def row_shift_holds(t: FermatQuotientTable, a: int, b: int, s: int) -> bool:
    p = t.p
    return t.entry((a + s) % p, b) == (t.entry(a, b) - s * int(t.inv[b])) % p


def translation_holds(t: FermatQuotientTable, b: int, k: int) -> bool:
    p = t.p
    return fermat_quotient_oracle(b + k * p, p) == (int(t.q[b]) - k * int(t.inv[b])) % p


def log_law_holds(p: int, b1: int, b2: int) -> bool:
    """q(b1 b2) = q(b1) + q(b2) mod p for an integer product below p^2."""
    qo = fermat_quotient_oracle
    return qo(b1 * b2, p) == (qo(b1, p) + qo(b2, p)) % p


def product_rule_residual(p: int, a: int, b1: int, b2: int) -> int:
    """Additive product rule for row ``a``, with b1*b2 an integer product < p^2.

    Returns (q(b1 b2) - a (b1 b2)^-1) - [(q(b1) - a b1^-1) + (q(b2) - a b2^-1)
    + a (b1 + b2 - 1) b1^-1 b2^-1] mod p, which vanishes when the rule holds.
    """
    qo = fermat_quotient_oracle
    i1, i2 = pow(b1, -1, p), pow(b2, -1, p)
    lhs = qo(b1 * b2, p) - a * i1 * i2
    rhs = (qo(b1, p) - a * i1) + (qo(b2, p) - a * i2) + a * (b1 + b2 - 1) * i1 * i2
    return (lhs - rhs) % p


def product_rule_printed_residual(t: FermatQuotientTable, a: int, b1: int, b2: int) -> int:
    """The product rule read literally on matrix entries, b1*b2 reduced mod p.

    Compares A[a, b1 b2 mod p] with 2 A[a, b1] + a (b1 + b2 - 1) b1^-1 b2^-1,
    the phase-level statement with the first factor repeated. Exposed for
    inspection only; it does not hold in general.
    """
    p = t.p
    i1, i2 = int(t.inv[b1]), int(t.inv[b2])
    lhs = t.entry(a, b1 * b2 % p)
    rhs = 2 * t.entry(a, b1) + a * (b1 + b2 - 1) * i1 * i2
    return (lhs - rhs) % p


def product_rule_reduced_residual(t: FermatQuotientTable, a: int, b1: int, b2: int) -> int:
    """Additive product rule on entries with the column index reduced mod p.

    Equals ``floor(b1 b2 / p) * (b1 b2)^-1 mod p``: the carry term picked up
    when b1*b2 wraps past p.
    """
    p = t.p
    i1, i2 = int(t.inv[b1]), int(t.inv[b2])
    lhs = t.entry(a, b1 * b2 % p)
    rhs = t.entry(a, b1) + t.entry(a, b2) + a * (b1 + b2 - 1) * i1 * i2
    return (lhs - rhs) % p
