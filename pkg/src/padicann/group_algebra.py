"""Group rings over G_K with three coefficient rings.

Coefficient rings: exact rationals (Fractions/ints), integers mod p^M, and
cyclotomic integers Z[y]/(Phi_d, p^M).  On top of the ring arithmetic this
module houses the Spiegel involution, restriction (norm) maps, the
mod-(p^{n+1}, alpha) equivalence used for annihilator comparisons, character
evaluation, and norm valuations of character images.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import cyclotomic_poly, resultant_int, valuation
from .fields import AbelianFieldSpec, DirichletCharacter, GaloisElement, conductor_Ln


class PrecisionError(ArithmeticError):
    """Requested quantity is not resolved at the working precision."""


# ---------------------------------------------------------------------------
# coefficient rings

EXACT = "exact"


@dataclass(frozen=True)
class IntModPM:
    p: int
    M: int

    @property
    def modulus(self) -> int:
        return self.p**self.M


@dataclass(frozen=True)
class CycloIntModPM:
    p: int
    M: int
    d: int

    @property
    def modulus(self) -> int:
        return self.p**self.M


class YElem:
    """Element of Z[y]/Phi_d(y), optionally with coefficients mod m.

    Small helper ring for character values and per-character images; degrees
    stay in the single digits, so schoolbook arithmetic and exact integer
    resultants are fine.
    """

    __slots__ = ("d", "mod", "coeffs")

    def __init__(self, d: int, coeffs, mod: int | None = None):
        self.d = d
        self.mod = mod
        phi = cyclotomic_poly(d)
        deg = len(phi) - 1
        c = list(coeffs)
        if len(c) < deg:
            c = c + [0] * (deg - len(c))
        elif len(c) > deg:
            c = _yreduce(c, phi)
        if mod is not None:
            c = [x % mod for x in c]
        self.coeffs = tuple(c)

    @classmethod
    def zero(cls, d: int, mod: int | None = None) -> "YElem":
        return cls(d, [0], mod)

    @classmethod
    def one(cls, d: int, mod: int | None = None) -> "YElem":
        return cls(d, [1], mod)

    @classmethod
    def ypow(cls, d: int, k: int, mod: int | None = None) -> "YElem":
        k %= d
        c = [0] * (k + 1)
        c[k] = 1
        return cls(d, c, mod)

    def _coerce(self, other) -> "YElem":
        if isinstance(other, YElem):
            if other.d != self.d:
                raise ValueError("mixed cyclotomic orders")
            if other.mod != self.mod and None not in (other.mod, self.mod):
                raise ValueError("mixed moduli")
            return other
        return YElem(self.d, [other], self.mod)

    def __add__(self, other):
        o = self._coerce(other)
        return YElem(self.d, [a + b for a, b in zip(self.coeffs, o.coeffs)], self.mod or o.mod)

    def __sub__(self, other):
        o = self._coerce(other)
        return YElem(self.d, [a - b for a, b in zip(self.coeffs, o.coeffs)], self.mod or o.mod)

    def __neg__(self):
        return YElem(self.d, [-a for a in self.coeffs], self.mod)

    def __mul__(self, other):
        o = self._coerce(other)
        n = len(self.coeffs)
        prod = [0] * (2 * n - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] += a * b
        return YElem(self.d, _yreduce(prod, cyclotomic_poly(self.d)), self.mod or o.mod)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return (-self) + other

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        m = self.mod or o.mod
        if m is None:
            return self.coeffs == o.coeffs
        return all((a - b) % m == 0 for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash((self.d, self.mod, self.coeffs))

    def is_zero(self) -> bool:
        if self.mod is None:
            return all(c == 0 for c in self.coeffs)
        return all(c % self.mod == 0 for c in self.coeffs)

    def lift(self) -> list[int]:
        if self.mod is None:
            return list(self.coeffs)
        return [c % self.mod for c in self.coeffs]

    def conjugate(self) -> "YElem":
        """Image under y -> y^{-1}."""
        return self.subst_power(-1)

    def subst_power(self, s: int) -> "YElem":
        """Image under the automorphism y -> y^s (s coprime to d)."""
        if self.d > 1 and math.gcd(s, self.d) != 1:
            raise ValueError("substitution exponent must be coprime to the order")
        out = YElem.zero(self.d, self.mod)
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + YElem.ypow(self.d, s * k, self.mod) * c
        return out

    def embed(self, D: int) -> "YElem":
        """Image in Z[y]/Phi_D under y_d -> y_D^{D/d} (requires d | D)."""
        if D % self.d != 0:
            raise ValueError("target order must be a multiple of the source order")
        t = D // self.d
        out = YElem.zero(D, self.mod)
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + YElem.ypow(D, t * k, self.mod) * c
        return out

    def norm(self) -> int:
        """N(v) = Res(Phi_d, lift of v), an exact integer."""
        return resultant_int(list(cyclotomic_poly(self.d)), self.lift())

    def __repr__(self):
        return f"YElem(d={self.d}, {list(self.coeffs)}, mod={self.mod})"


def _yreduce(coeffs: list, phi: tuple[int, ...]) -> list:
    deg = len(phi) - 1
    c = list(coeffs)
    for k in range(len(c) - 1, deg - 1, -1):
        top = c[k]
        if top:
            for i in range(deg + 1):
                c[k - deg + i] -= top * phi[i]
        c.pop()
    while len(c) < deg:
        c.append(0)
    return c


def norm_valuation(v: YElem, p: int) -> int:
    """v_p of the resultant norm of v, from the canonical lift.

    Raises PrecisionError when the norm is indeterminate at the carried
    precision (norm = 0 mod p^{M*deg}).
    """
    r = v.norm()
    deg = len(cyclotomic_poly(v.d)) - 1
    if r == 0:
        raise PrecisionError("norm vanishes identically at this precision")
    val = valuation(r, p)
    if v.mod is not None:
        M = valuation(v.mod, p)
        if val >= M * deg:
            raise PrecisionError(f"norm valuation {val} not resolved mod p^{M * deg}")
    return val


# ---------------------------------------------------------------------------
# group-ring elements

class GroupRingElement:
    """Element of R[G_K]; coeffs maps canonical coset reps to coefficients."""

    __slots__ = ("field", "ring", "coeffs")

    def __init__(self, field: AbelianFieldSpec, ring, coeffs: dict[int, object] | None = None):
        self.field = field
        self.ring = ring
        self.coeffs = {}
        for rep, c in (coeffs or {}).items():
            c = self._normalize(c)
            if not self._is_zero(c):
                self.coeffs[rep] = c

    # coefficient plumbing ---------------------------------------------------

    def _normalize(self, c):
        if isinstance(self.ring, IntModPM):
            return int(c) % self.ring.modulus
        if isinstance(self.ring, CycloIntModPM):
            if isinstance(c, YElem):
                return YElem(self.ring.d, c.coeffs, self.ring.modulus)
            return YElem(self.ring.d, [int(c)], self.ring.modulus)
        return c

    def _is_zero(self, c) -> bool:
        if isinstance(c, YElem):
            return c.is_zero()
        return c == 0

    def _zero(self):
        if isinstance(self.ring, CycloIntModPM):
            return YElem.zero(self.ring.d, self.ring.modulus)
        return 0

    def _check_compat(self, other: "GroupRingElement"):
        if self.field != other.field:
            raise ValueError("group mismatch")
        if self.ring != other.ring:
            raise ValueError("coefficient ring mismatch")

    # constructors ------------------------------------------------------------

    @classmethod
    def zero(cls, field: AbelianFieldSpec, ring=EXACT) -> "GroupRingElement":
        return cls(field, ring, {})

    @classmethod
    def one(cls, field: AbelianFieldSpec, ring=EXACT) -> "GroupRingElement":
        return cls(field, ring, {field.reps[0]: 1})

    @classmethod
    def norm_element(cls, field: AbelianFieldSpec, ring=EXACT) -> "GroupRingElement":
        return cls(field, ring, {r: 1 for r in field.reps})

    def coeff(self, sigma) -> object:
        rep = sigma.rep if isinstance(sigma, GaloisElement) else self.field.reps[self.field.coset_of(sigma)]
        return self.coeffs.get(rep, self._zero())

    # arithmetic ----------------------------------------------------------------

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check_compat(other)
        out = dict(self.coeffs)
        for rep, c in other.coeffs.items():
            out[rep] = (out[rep] + c) if rep in out else c
        return GroupRingElement(self.field, self.ring, out)

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.field, self.ring, {r: -c for r, c in self.coeffs.items()})

    def __mul__(self, other) -> "GroupRingElement":
        if not isinstance(other, GroupRingElement):
            return self.scale(other)
        self._check_compat(other)
        f = self.field.f
        out: dict[int, object] = {}
        for ra, ca in self.coeffs.items():
            for rb, cb in other.coeffs.items():
                rc = self.field.reps[self.field.coset_of(ra * rb % f if f > 1 else 0)]
                prod = ca * cb
                out[rc] = out[rc] + prod if rc in out else prod
        return GroupRingElement(self.field, self.ring, out)

    __rmul__ = __mul__

    def scale(self, scalar) -> "GroupRingElement":
        return GroupRingElement(self.field, self.ring, {r: c * scalar for r, c in self.coeffs.items()})

    def act(self, sigma: GaloisElement) -> "GroupRingElement":
        """Multiply by the group element sigma."""
        f = self.field.f
        return GroupRingElement(self.field, self.ring, {
            self.field.reps[self.field.coset_of(r * sigma.rep % f if f > 1 else 0)]: c
            for r, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        self._check_compat(other)
        return (self - other).coeffs == {}

    def is_zero(self) -> bool:
        return not self.coeffs

    def augmentation(self):
        tot = self._zero()
        for c in self.coeffs.values():
            tot = tot + c
        return tot

    def to_ring(self, ring) -> "GroupRingElement":
        """Re-coerce coefficients into another ring (exact -> modular only)."""
        if ring == self.ring:
            return self
        if isinstance(ring, (IntModPM, CycloIntModPM)) and self.ring == EXACT:
            coeffs = {}
            for r, c in self.coeffs.items():
                if isinstance(c, Fraction):
                    if c.denominator != 1:
                        den = c.denominator
                        inv = pow(den, -1, ring.modulus)
                        coeffs[r] = c.numerator * inv
                        continue
                    c = c.numerator
                coeffs[r] = c
            return GroupRingElement(self.field, ring, coeffs)
        if isinstance(ring, IntModPM) and isinstance(self.ring, IntModPM):
            if self.ring.p != ring.p or ring.M > self.ring.M:
                raise ValueError("cannot extend modular precision")
            return GroupRingElement(self.field, ring, dict(self.coeffs))
        raise ValueError(f"unsupported coercion {self.ring} -> {ring}")

    def reduced_mod_norm(self) -> "GroupRingElement":
        """Canonical representative modulo the norm element: identity coeff 0."""
        c0 = self.coeff(self.field.identity)
        if self._is_zero(c0):
            return self
        return self - GroupRingElement.norm_element(self.field, self.ring).scale(c0)

    def coeff_vector(self, order: list[int] | None = None) -> list:
        reps = order if order is not None else self.field.reps
        return [self.coeffs.get(r, self._zero()) for r in reps]

    def __repr__(self):
        parts = []
        for r in self.field.reps:
            if r in self.coeffs:
                parts.append(f"{self.coeffs[r]}*[{r}]")
        return " + ".join(parts) or "0"

    def format_terms(self, generator: GaloisElement | None = None) -> str:
        """Render as c0 + c1*s + c2*s^2 + ... along powers of a generator."""
        if generator is None:
            generator = _some_generator(self.field)
        parts = []
        g = self.field.identity
        for k in range(self.field.d):
            c = self.coeff(g)
            if not self._is_zero(c):
                mono = "1" if k == 0 else ("s" if k == 1 else f"s^{k}")
                parts.append(f"{c}" if k == 0 else f"{c}*{mono}")
            g = g * generator
        return " + ".join(parts) or "0"

    def to_json_dict(self) -> dict:
        out = {}
        for r, c in sorted(self.coeffs.items()):
            out[str(r)] = c.lift() if isinstance(c, YElem) else (str(c) if isinstance(c, Fraction) else c)
        return out


def _some_generator(field: AbelianFieldSpec) -> GaloisElement:
    for r in field.reps:
        g = GaloisElement(field, r)
        if g.order() == field.d:
            return g
    return field.identity


# ---------------------------------------------------------------------------
# Spiegel involution

@dataclass(frozen=True)
class SpiegelContext:
    """Level data for the involution on (Z/qp^n Z)[G_n]."""

    p: int
    n: int

    @property
    def q(self) -> int:
        return 4 if self.p == 2 else self.p

    @property
    def qpn(self) -> int:
        return self.q * self.p**self.n

    def omega(self, a: int) -> int:
        return a % self.qpn

    def ring(self) -> IntModPM:
        return IntModPM(self.p, self.n + (2 if self.p == 2 else 1))


def spiegel(x: GroupRingElement, ctx: SpiegelContext) -> GroupRingElement:
    """x = sum a_s s  |->  x* = sum a_s * omega_n(s) * s^{-1}  (mod qp^n)."""
    field = x.field
    qpn = ctx.qpn
    if field.f % qpn != 0:
        raise ValueError(f"group level does not contain mu_{qpn}")
    if not ((field.h_list % qpn) == 1).all():
        raise ValueError("omega_n is not constant on cosets: H is not trivial mod qp^n")
    ring = ctx.ring()
    if isinstance(x.ring, IntModPM):
        if x.ring.p != ctx.p or qpn % x.ring.modulus != 0:
            raise ValueError("coefficient modulus incompatible with qp^n")
        ring = x.ring
    elif x.ring != EXACT:
        raise ValueError("spiegel needs integer or IntModPM coefficients")
    out: dict[int, object] = {}
    f = field.f
    for rep, c in x.coeffs.items():
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ValueError("spiegel needs integral coefficients")
            c = c.numerator
        target = field.reps[field.coset_of(pow(rep, -1, f))]
        val = c * ctx.omega(rep)
        out[target] = out.get(target, 0) + val
    return GroupRingElement(field, ring, out)


# ---------------------------------------------------------------------------
# restriction / norm map

def restrict(x: GroupRingElement, target: AbelianFieldSpec) -> GroupRingElement:
    """Restriction map R[G_source] -> R[G_target] for target ⊆ source."""
    if not target.is_subfield_of(x.field):
        raise ValueError("target is not a subfield of the source group's field")
    out: dict[int, object] = {}
    for rep, c in x.coeffs.items():
        t = target.reps[target.coset_of(rep % target.f)]
        out[t] = out[t] + c if t in out else c
    return GroupRingElement(target, x.ring, out)


# ---------------------------------------------------------------------------
# the distinguished element alpha and the approximate equality

def alpha_element(field: AbelianFieldSpec, p: int, n: int, modulus: int | None = None) -> GroupRingElement:
    """alpha = sum_{a in [1, f_n] coprime to f_n} a^{-1} (K/a), mod p^{n+1}.

    The level-n modulus f_n = lcm(f_K, q p^n) is used for the summation
    range, the coefficients live mod p^{n+1} (or a supplied modulus).
    """
    m = modulus if modulus is not None else p ** (n + 1)
    fn = conductor_Ln(field.f, p, n)
    ring = IntModPM(p, valuation(m, p))
    bucket = np.asarray(field.coset_index, dtype=np.int64)
    inv_table = _inverse_table(m)
    sums = np.zeros(field.d, dtype=object)
    chunk = 1 << 22
    f = field.f
    for lo in range(1, fn + 1, chunk):
        hi = min(lo + chunk, fn + 1)
        a = np.arange(lo, hi, dtype=np.int64)
        b = bucket[a % f]
        mask = b >= 0
        for extra in _extra_prime_divisors(fn, f):
            mask &= a % extra != 0
        u = inv_table[a % m]
        for k in range(field.d):
            sel = mask & (b == k)
            if sel.any():
                sums[k] += int(u[sel].sum())
    return GroupRingElement(field, ring, {field.reps[k]: int(sums[k]) % m for k in range(field.d)})


def _extra_prime_divisors(fn: int, f: int) -> list[int]:
    from .arith import prime_divisors
    return [q for q in prime_divisors(fn) if f % q != 0]


def _inverse_table(m: int) -> np.ndarray:
    """inv[r] = r^{-1} mod m when gcd(r, m) = 1, else 0."""
    inv = np.zeros(m, dtype=np.int64)
    for r in range(1, m):
        if math.gcd(r, m) == 1:
            inv[r] = pow(r, -1, m)
    return inv


def wt_equiv(A: GroupRingElement, B: GroupRingElement, p: int, n: int,
             alpha: GroupRingElement | None = None) -> bool:
    """A = B + mu*p^{n+1} + nu*alpha with mu in Z_p[G_K], nu in Z_p.

    Decided by reducing A - B mod p^{n+1} and testing proportionality to the
    level-n alpha element.
    """
    m = p ** (n + 1)
    field = A.field
    diff = _lift_vector(A, m)
    for i, c in enumerate(_lift_vector(B, m)):
        diff[i] = (diff[i] - c) % m
    if all(c == 0 for c in diff):
        return True
    if alpha is None:
        alpha = alpha_element(field, p, n, modulus=m)
    av = _lift_vector(alpha, m)
    vals = [valuation(c, p) if c else None for c in av]
    finite = [v for v in vals if v is not None]
    if not finite:
        return False
    v0 = min(finite)
    i0 = vals.index(v0)
    if diff[i0] % p**v0 != 0:
        return False
    nu = (diff[i0] // p**v0) * pow(av[i0] // p**v0, -1, m // p**v0) % (m // p**v0)
    return all((d - nu * a) % m == 0 for d, a in zip(diff, av))


def minus_part_equiv(A: GroupRingElement, B: GroupRingElement, p: int, n: int) -> bool:
    """A = B modulo p^{n+1} Z_p[G] + (1 - s_inf) Z_p[G].

    Membership in the (1 - s_inf)-ideal mod p^{n+1} holds iff the difference
    sums to v_p >= n+1 over every orbit {sigma, s_inf * sigma}.  Exact
    rational coefficients are allowed (p-adic valuations of fractions).
    """
    field = A.field
    sinf = field.complex_conjugation()
    diff = {}
    for r in field.reps:
        ca = A.coeffs.get(r, 0)
        cb = B.coeffs.get(r, 0)
        diff[r] = (ca if not isinstance(ca, YElem) else ca) - cb
    seen = set()
    f = field.f
    for i, r in enumerate(field.reps):
        if i in seen:
            continue
        j = field.coset_of(r * sinf.rep % f if f > 1 else 0)
        seen.add(i)
        seen.add(j)
        tot = diff[r] if i == j else diff[r] + diff[field.reps[j]]
        if not _padic_val_at_least(tot, p, n + 1):
            return False
    return True


def _padic_val_at_least(x, p: int, k: int) -> bool:
    if isinstance(x, Fraction):
        if x == 0:
            return True
        num, den = x.numerator, x.denominator
        return valuation(num, p) - valuation(den, p) >= k
    return int(x) % p**k == 0


def _lift_vector(x: GroupRingElement, m: int) -> list[int]:
    out = []
    for r in x.field.reps:
        c = x.coeffs.get(r, 0)
        if isinstance(c, Fraction):
            if math.gcd(c.denominator, m) != 1:
                raise ValueError("denominator not invertible at the requested modulus")
            c = c.numerator * pow(c.denominator, -1, m)
        elif isinstance(c, YElem):
            raise ValueError("lattice tests need scalar coefficients")
        out.append(int(c) % m)
    return out


# ---------------------------------------------------------------------------
# character evaluation

def char_eval(x: GroupRingElement, chi: DirichletCharacter, mod: int | None = None) -> YElem:
    """sum_sigma coeff(sigma) * psi(sigma) in Z[y]/(Phi_d, mod)."""
    d = max(chi.order, 1)
    if mod is None and isinstance(x.ring, IntModPM):
        mod = x.ring.modulus
    powers = [YElem.ypow(d, k) for k in range(d)]
    out = YElem.zero(d, mod)
    for rep, c in x.coeffs.items():
        if isinstance(c, Fraction):
            if c.denominator == 1:
                c = c.numerator
            elif mod is not None:
                c = c.numerator * pow(c.denominator, -1, mod)
        t = chi.coset_logs[x.field.coset_of(rep)]
        out = out + powers[t] * c
    if mod is not None:
        out = YElem(d, out.coeffs, mod)
    return out
