"""Exact integer and modular arithmetic.

Every root and logarithm comparison here is done on integers; nothing
goes through floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod

from .errors import InvalidArgument, InvalidModulus


@dataclass(frozen=True)
class Factorization:
    modulus: int
    primes: tuple[tuple[int, int], ...]

    @property
    def distinct(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.primes)

    @property
    def r(self) -> int:
        """Number of distinct prime divisors."""
        return len(self.primes)

    @property
    def is_prime_power(self) -> bool:
        return len(self.primes) == 1


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    d = 2
    while d * d <= k:
        if k % d == 0:
            return False
        d += 1
    return True


def factorize(m: int) -> Factorization:
    if m < 2:
        raise InvalidModulus(f"modulus must be >= 2, got {m}")
    rest, out, d = m, [], 2
    while d * d <= rest:
        e = 0
        while rest % d == 0:
            rest //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if rest > 1:
        out.append((rest, 1))
    return Factorization(m, tuple(out))


def integer_root(n: int, r: int) -> int:
    """Largest k with k**r <= n."""
    if r < 1:
        raise InvalidArgument("root index must be >= 1")
    if n < 0:
        raise InvalidArgument("n must be non-negative")
    lo, hi = 0, 1
    while hi**r <= n:
        hi *= 2
    # invariant: lo**r <= n < hi**r
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**r <= n:
            lo = mid
        else:
            hi = mid
    return lo


def integer_log(x: int, p: int) -> int:
    """floor(log_p(x)) for x >= 1, p >= 2."""
    if x < 1 or p < 2:
        raise InvalidArgument(f"integer_log needs x >= 1 and p >= 2, got x={x}, p={p}")
    e, power = 0, p
    while power <= x:
        e += 1
        power *= p
    return e


def binomial_mod(n: int, k: int, m: int) -> int:
    if k < 0 or k > n:
        return 0
    return comb(n, k) % m


def binomial_period_formula(m: int, x: int) -> int:
    """Minimal period of n -> binom(n, x) mod m: m * prod p^floor(log_p x)."""
    if x < 1:
        raise InvalidArgument("period formula needs x >= 1 (binom(n, 0) is constant)")
    return m * prod(p ** integer_log(x, p) for p in factorize(m).distinct)


def binomial_period_bruteforce(m: int, x: int, horizon: int) -> int | None:
    seq = [binomial_mod(n, x, m) for n in range(horizon + 1)]
    for ell in range(1, horizon // 2 + 1):
        if all(seq[n] == seq[n + ell] for n in range(horizon - ell + 1)):
            return ell
    return None


def support_period_bound(m: int, s: int) -> int:
    """Per-gate period bound m * prod p^floor(log_p s); the product is empty when s == 0."""
    if s < 1:
        return m
    return binomial_period_formula(m, s)


def solve_mod_prime(rows: list[list[int]], rhs: list[int], q: int) -> list[int] | None:
    """Solve rows @ x = rhs over GF(q) by Gauss-Jordan elimination.

    Pivots are taken left to right and free variables are set to zero, so
    earlier columns are preferred. Returns None when inconsistent.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    mat = [[v % q for v in row] + [b % q] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = pow(mat[r][col], q - 2, q)
        mat[r] = [v * inv % q for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(a - f * b) % q for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    if any(row[-1] for row in mat[r:]):
        return None
    x = [0] * ncols
    for i, col in enumerate(pivots):
        x[col] = mat[i][-1]
    return x
