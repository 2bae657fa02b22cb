import math
import random

from padicann.arith import (
    UnitGroupModF,
    crt,
    cyclotomic_poly,
    euler_phi,
    factorize,
    kronecker,
    multiplicative_order,
    resultant_int,
    smallest_primitive_root,
    valuation,
)


def test_factorize_and_phi():
    assert factorize(45161) == ((45161, 1),)
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    assert euler_phi(360) == 96
    assert euler_phi(1) == 1


def test_primitive_roots_match_small_table():
    # least positive primitive roots of small primes
    known = {3: 2, 5: 2, 7: 3, 11: 2, 13: 2, 17: 3, 19: 2, 23: 5, 41: 6, 73: 5, 313: 10}
    for q, g in known.items():
        assert smallest_primitive_root(q) == g, q


def test_unit_group_dlog_roundtrip():
    rng = random.Random(1)
    for f in (45, 64, 360, 1201, 4 * 27):
        u = UnitGroupModF(f)
        assert math.prod(u.orders, start=1) == euler_phi(f)
        for _ in range(25):
            a = rng.randrange(1, f)
            if math.gcd(a, f) != 1:
                continue
            assert u.from_dlog(u.dlog(a)) == a


def test_crt():
    assert crt([2, 3], [5, 7]) == 17
    assert crt([1, 1, 1], [3, 5, 7]) % 105 == 1


def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    p105 = cyclotomic_poly(105)
    assert len(p105) - 1 == euler_phi(105)
    assert min(p105) == -2  # the first conductor with a coefficient outside {0, +-1}
    # product over divisors reconstitutes x^n - 1
    n = 30
    prod = [1]
    for d in range(1, n + 1):
        if n % d == 0:
            q = cyclotomic_poly(d)
            new = [0] * (len(prod) + len(q) - 1)
            for i, a in enumerate(prod):
                for j, b in enumerate(q):
                    new[i + j] += a * b
            prod = new
    expect = [0] * (n + 1)
    expect[0], expect[n] = -1, 1
    assert prod == expect


def test_resultant_matches_norm():
    # Res(Phi_3, a + b y) = a^2 - a b + b^2
    for a, b in [(41, 41), (2, 0), (0, 5), (-3, 7)]:
        assert resultant_int(list(cyclotomic_poly(3)), [a, b]) == a * a - a * b + b * b
    # Res(Phi_4, a + b y) = a^2 + b^2
    assert resultant_int(list(cyclotomic_poly(4)), [4, 6]) == 16 + 36
    assert resultant_int(list(cyclotomic_poly(5)), [1, -1]) == 5  # Phi_5(1)


def test_valuation_and_kronecker():
    assert valuation(5**6 * 3, 5) == 6
    assert kronecker(1201, 11) == -1
    assert kronecker(1201, 7) == 1
    assert multiplicative_order(7, 313) == 104
