import pytest

from fermatq.core import build_table


def naive_quotient(n: int, p: int) -> int:
    """((n^(p-1) - 1) / p) mod p with full-size integers, no modular shortcut."""
    big = n ** (p - 1) - 1
    assert big % p == 0
    return (big // p) % p


SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101]


@pytest.fixture(scope="session")
def t11():
    return build_table(11)


@pytest.fixture(scope="session")
def tables():
    cache = {}

    def get(p):
        if p not in cache:
            cache[p] = build_table(p)
        return cache[p]

    return get
