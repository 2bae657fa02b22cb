"""Small number-theory helpers shared across the package.

Everything here works on plain Python ints.  Moduli stay below ~10^9, so
trial division and table-based discrete logs are plenty; gmpy2 supplies
primality and Kronecker symbols.
"""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2


def is_prime(n: int) -> bool:
    return n >= 2 and gmpy2.is_prime(n)


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n > 0 as a sorted tuple of (prime, exponent)."""
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    out = []
    for p in (2, 3, 5):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    q = 7
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
        q += 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def euler_phi(n: int) -> int:
    r = 1
    for p, e in factorize(n):
        r *= (p - 1) * p ** (e - 1)
    return r


def valuation(n: int, p: int) -> int:
    """v_p(n) for n != 0; raises on n == 0 (valuation is infinite)."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def kronecker(a: int, b: int) -> int:
    return int(gmpy2.kronecker(a, b))


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    order = euler_phi(n)
    for p, _ in factorize(order):
        while order % p == 0 and pow(a, order // p, n) == 1:
            order //= p
    return order


@lru_cache(maxsize=1024)
def smallest_primitive_root(q: int) -> int:
    """Least positive primitive root mod q (q an odd prime power or 2, 4).

    The c-selection rules of the table recipes assume this canonical choice;
    a different root would shift every table's coefficients.
    """
    if q in (2,):
        return 1
    if q == 4:
        return 3
    fac = factorize(q)
    if len(fac) != 1 or fac[0][0] == 2 and q not in (2, 4):
        raise ValueError(f"{q} has no primitive root")
    phi = euler_phi(q)
    ps = [p for p, _ in factorize(phi)]
    g = 2
    while True:
        if math.gcd(g, q) == 1 and all(pow(g, phi // p, q) != 1 for p in ps):
            return g
        g += 1


@lru_cache(maxsize=512)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Exact integer coefficients of Phi_n, low degree first.

    Divide x^n - 1 by the Phi_d for proper divisors d | n; all divisions are
    exact over Z.
    """
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0], poly[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    out = [0] * (dn - dd + 1)
    for k in range(dn - dd, -1, -1):
        q, r = divmod(num[dd + k], den[dd])
        assert r == 0, "non-exact polynomial division"
        out[k] = q
        for i in range(dd + 1):
            num[k + i] -= q * den[i]
    assert all(c == 0 for c in num), "non-exact polynomial division"
    return out


def resultant_int(f: list[int], g: list[int]) -> int:
    """Res(f, g) over Z, by fraction-free (Bareiss) elimination on Sylvester."""
    while f and f[-1] == 0:
        f = f[:-1]
    while g and g[-1] == 0:
        g = g[:-1]
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    size = m + n
    mat = [[0] * size for _ in range(size)]
    for i in range(n):
        for j, c in enumerate(reversed(f)):
            mat[i][i + j] = c
    for i in range(m):
        for j, c in enumerate(reversed(g)):
            mat[n + i][i + j] = c
    sign, prev = 1, 1
    for k in range(size - 1):
        if mat[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if mat[r][k] != 0), None)
            if swap is None:
                return 0
            mat[k], mat[swap] = mat[swap], mat[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[size - 1][size - 1]


def crt(residues: list[int], moduli: list[int]) -> int:
    """CRT combine for pairwise coprime moduli; result in [0, prod)."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        t = ((r - x) * pow(m, -1, mi)) % mi
        x += m * t
        m *= mi
    return x % m


class _CyclicComponent:
    """One cyclic factor of (Z/fZ)^x, living modulo a prime power q | f."""

    def __init__(self, q: int, gen: int, order: int):
        self.q = q
        self.gen = gen
        self.order = order
        self._baby: dict[int, int] | None = None
        self._stride = 0

    def dlog(self, a: int) -> int:
        """Exponent k with gen^k = a (mod q), by baby-step giant-step."""
        a %= self.q
        if self.order == 1:
            return 0
        if self._baby is None:
            m = math.isqrt(self.order - 1) + 1
            tbl, x = {}, 1
            for j in range(m):
                tbl.setdefault(x, j)
                x = x * self.gen % self.q
            self._baby = tbl
            self._stride = pow(self.gen, -m, self.q)
        m = math.isqrt(self.order - 1) + 1
        g = a
        for i in range(m + 1):
            j = self._baby.get(g)
            if j is not None:
                return (i * m + j) % self.order
            g = g * self._stride % self.q
        raise ValueError(f"{a} is not a unit mod {self.q}")


class UnitGroupModF:
    """(Z/fZ)^x decomposed by CRT into cyclic components.

    components[i] lives mod prime_powers[i]; generators are CRT-lifted so
    that generators[i] is 1 modulo every other prime power.  dlog(a) returns
    the exponent vector on those generators.
    """

    def __init__(self, f: int):
        if f < 1:
            raise ValueError("modulus must be positive")
        self.f = f
        self.prime_powers: list[int] = []
        self.components: list[_CyclicComponent] = []
        for p, e in factorize(f) if f > 1 else ():
            q = p**e
            if p == 2:
                if e == 1:
                    continue
                if e == 2:
                    self.prime_powers.append(q)
                    self.components.append(_CyclicComponent(q, q - 1, 2))
                else:
                    self.prime_powers.append(q)
                    self.components.append(_CyclicComponent(q, q - 1, 2))
                    self.prime_powers.append(q)
                    self.components.append(_CyclicComponent(q, 5, 2 ** (e - 2)))
            else:
                self.prime_powers.append(q)
                self.components.append(_CyclicComponent(q, smallest_primitive_root(q), p ** (e - 1) * (p - 1)))
        self.orders = [c.order for c in self.components]
        # CRT-lift each component generator: own gen at its prime power, 1 at
        # every other prime power dividing f (the two 2-power components lift
        # independently).
        all_pp = [p**e for p, e in factorize(f)] if f > 1 else []
        self.generators = []
        for c in self.components:
            res = [c.gen if q == c.q else 1 for q in all_pp]
            self.generators.append(crt(res, all_pp))
        assert math.prod(self.orders, start=1) == euler_phi(f)

    def dlog(self, a: int) -> tuple[int, ...]:
        a %= self.f
        if self.f > 1 and math.gcd(a, self.f) != 1:
            raise ValueError(f"{a} is not coprime to {self.f}")
        out = []
        i = 0
        for p, e in factorize(self.f) if self.f > 1 else ():
            q = p**e
            if p == 2:
                if e == 1:
                    continue
                if e == 2:
                    out.append(0 if a % 4 == 1 else 1)
                    i += 1
                else:
                    s = 0 if a % 4 == 1 else 1
                    out.append(s)
                    b = a if s == 0 else (-a) % q
                    out.append(self.components[i + 1].dlog(b % q))
                    i += 2
            else:
                out.append(self.components[i].dlog(a % q))
                i += 1
        return tuple(out)

    def from_dlog(self, exps) -> int:
        a = 1
        for g, e, o in zip(self.generators, exps, self.orders):
            a = a * pow(g, e % o, self.f) % self.f
        return a
