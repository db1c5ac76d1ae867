"""Prime helpers backed by sympy."""
from fractions import Fraction
from typing import Iterable

from sympy import isprime, primefactors

from cellcover.errors import InputError

PRIME_LIMIT = 2**32


def ensure_prime(p: int, limit: int = PRIME_LIMIT) -> int:
    if isinstance(p, bool) or not isinstance(p, int):
        raise InputError(f"expected an integer prime, got {p!r}")
    if p > limit:
        raise InputError(f"prime {p} exceeds the supported limit {limit}")
    if not isprime(p):
        raise InputError(f"{p} is not prime")
    return p


def ensure_primes(primes: Iterable[int], limit: int = PRIME_LIMIT) -> frozenset[int]:
    return frozenset(ensure_prime(p, limit) for p in primes)


def denominator_primes(values: Iterable[Fraction]) -> set[int]:
    """Primes dividing some denominator among ``values``."""
    out: set[int] = set()
    for value in values:
        den = Fraction(value).denominator
        if den != 1:
            out.update(int(p) for p in primefactors(den))
    return out


def is_pi_number(n: int, primes: Iterable[int]) -> bool:
    """True when every prime factor of ``n`` lies in ``primes``."""
    if n == 0:
        return False
    allowed = set(primes)
    return all(int(p) in allowed for p in primefactors(abs(n)))
