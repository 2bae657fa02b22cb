"""Truncated p-adic arithmetic in Z[x]/(Phi_f(x), p^M).

Elements are coefficient vectors on the power basis x^0..x^{phi(f)-1},
always reduced mod (Phi_f, p^M).  Multiplication lifts to the cyclic ring
Z[x]/(x^f - 1), where the product is one big-integer multiplication via
Kronecker substitution (16-byte slots, gmpy2), followed by a fold mod
x^f - 1 and a slot-wise reduction mod p^M.  Galois action x -> x^a is an
exponent permutation in the cyclic ring.  The Iwasawa logarithm raises to
the residue-ring exponent p^ord - 1 first, then runs the usual series.

Precision policy: pipelines construct the ring at target + GUARD digits and
report at target; series tails and the divisions by p, k, E each consume a
bounded number of digits, covered by GUARD = 5.
"""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
import numpy as np

from .arith import cyclotomic_poly, euler_phi, multiplicative_order, resultant_int, valuation
from .group_algebra import PrecisionError, YElem

GUARD = 5

_SLOT = 16  # bytes per Kronecker slot


@lru_cache(maxsize=64)
def ring_make(f: int, p: int, M: int) -> "CycloRing":
    return CycloRing(f, p, M)


class CycloRing:
    def __init__(self, f: int, p: int, M: int):
        if M < 1:
            raise ValueError("precision must be at least 1")
        if p**M > 1 << 31:
            raise ValueError("p^M too large for the packed multiplication path")
        self.f = f
        self.p = p
        self.M = M
        self.pM = p**M
        self.phi = np.array(cyclotomic_poly(f), dtype=np.int64)
        self.degree = len(self.phi) - 1
        self._mask = (1 << (8 * _SLOT * f)) - 1
        self._fold_shift = 8 * _SLOT * f

    def __repr__(self):
        return f"CycloRing(f={self.f}, p={self.p}, M={self.M})"

    def at_precision(self, M: int) -> "CycloRing":
        return ring_make(self.f, self.p, M)

    # -- element constructors -------------------------------------------------

    def zero(self) -> "CycloRingElement":
        return CycloRingElement(self, np.zeros(self.degree, dtype=np.int64))

    def one(self) -> "CycloRingElement":
        c = np.zeros(self.degree, dtype=np.int64)
        c[0] = 1
        return CycloRingElement(self, c)

    def from_coeffs(self, coeffs) -> "CycloRingElement":
        c = np.array(list(coeffs), dtype=np.int64) % self.pM
        if len(c) > self.f:
            raise ValueError("coefficient vector longer than the cyclic degree")
        if len(c) < self.f:
            c = np.concatenate([c, np.zeros(self.f - len(c), dtype=np.int64)])
        return CycloRingElement(self, self.reduce_mod_phi(c))

    def scalar(self, a: int) -> "CycloRingElement":
        c = np.zeros(self.degree, dtype=np.int64)
        c[0] = a % self.pM
        return CycloRingElement(self, c)

    def x_power(self, k: int) -> "CycloRingElement":
        cyc = np.zeros(self.f, dtype=np.int64)
        cyc[k % self.f] = 1
        return CycloRingElement(self, self.reduce_mod_phi(cyc))

    def one_minus_zeta(self, a: int = 1) -> "CycloRingElement":
        """1 - x^a, the basic cyclotomic number at exponent a."""
        cyc = np.zeros(self.f, dtype=np.int64)
        cyc[0] += 1
        cyc[a % self.f] -= 1
        return CycloRingElement(self, self.reduce_mod_phi(cyc % self.pM))

    # -- cyclic-ring internals --------------------------------------------------

    def _pack(self, vec: np.ndarray):
        buf = np.zeros((self.f, _SLOT), dtype=np.uint8)
        buf[:, :8] = vec.astype("<u8").view(np.uint8).reshape(self.f, 8)
        return gmpy2.mpz(int.from_bytes(buf.tobytes(), "little"))

    def _unpack(self, big) -> np.ndarray:
        raw = int(big).to_bytes(_SLOT * self.f, "little")
        arr = np.frombuffer(raw, dtype="<u8").reshape(self.f, 2)
        lo = arr[:, 0] % self.pM
        hi = arr[:, 1] % self.pM
        r64 = (1 << 64) % self.pM
        return ((hi * r64) % self.pM + lo) % self.pM

    def cyclic_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = self._pack(a) * self._pack(b)
        prod = (prod & self._mask) + (prod >> self._fold_shift)
        if prod > self._mask:
            prod = (prod & self._mask) + (prod >> self._fold_shift)
        return self._unpack(prod).astype(np.int64)

    def cyclic_galois(self, vec: np.ndarray, a: int) -> np.ndarray:
        out = np.zeros(self.f, dtype=np.int64)
        idx = (np.arange(self.f, dtype=np.int64) * (a % self.f)) % self.f
        np.add.at(out, idx, vec)
        return out % self.pM

    def reduce_mod_phi(self, cyc: np.ndarray) -> np.ndarray:
        c = cyc.astype(np.int64) % self.pM
        deg = self.degree
        for k in range(len(c) - 1, deg - 1, -1):
            q = int(c[k])
            if q:
                c[k - deg:k + 1] -= q * self.phi
                c[k - deg:k + 1] %= self.pM
        return c[:deg] % self.pM

    def lift_cyclic(self, el: "CycloRingElement") -> np.ndarray:
        out = np.zeros(self.f, dtype=np.int64)
        out[: self.degree] = el.coeffs
        return out


class CycloRingElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: CycloRing, coeffs: np.ndarray):
        self.ring = ring
        self.coeffs = coeffs % ring.pM

    # basic ring ops -----------------------------------------------------------

    def _check(self, other: "CycloRingElement"):
        if self.ring.f != other.ring.f or self.ring.p != other.ring.p or self.ring.M != other.ring.M:
            raise ValueError("mixed rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.scalar(other)
        self._check(other)
        return CycloRingElement(self.ring, (self.coeffs + other.coeffs) % self.ring.pM)

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.scalar(other)
        self._check(other)
        return CycloRingElement(self.ring, (self.coeffs - other.coeffs) % self.ring.pM)

    def __neg__(self):
        return CycloRingElement(self.ring, (-self.coeffs) % self.ring.pM)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloRingElement(self.ring, (self.coeffs * (other % self.ring.pM)) % self.ring.pM)
        self._check(other)
        r = self.ring
        prod = r.cyclic_mul(r.lift_cyclic(self), r.lift_cyclic(other))
        return CycloRingElement(r, r.reduce_mod_phi(prod))

    __radd__ = __add__
    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.scalar(other)
        self._check(other)
        return bool(((self.coeffs - other.coeffs) % self.ring.pM == 0).all())

    def is_zero(self) -> bool:
        return bool((self.coeffs % self.ring.pM == 0).all())

    def __pow__(self, e: int) -> "CycloRingElement":
        if e < 0:
            return self.inv() ** (-e)
        r = self.ring
        base = r.lift_cyclic(self)
        acc = np.zeros(r.f, dtype=np.int64)
        acc[0] = 1
        for bit in bin(e)[2:]:
            acc = r.cyclic_mul(acc, acc)
            if bit == "1":
                acc = r.cyclic_mul(acc, base)
        return CycloRingElement(r, r.reduce_mod_phi(acc))

    def galois(self, a: int) -> "CycloRingElement":
        """Image under x -> x^a (a coprime to f)."""
        if math.gcd(a, self.ring.f) != 1:
            raise ValueError("galois action needs an exponent coprime to f")
        r = self.ring
        cyc = r.cyclic_galois(r.lift_cyclic(self), a)
        return CycloRingElement(r, r.reduce_mod_phi(cyc))

    # unit tests and inversion ---------------------------------------------------

    def _mod_p(self) -> np.ndarray:
        return self.coeffs % self.ring.p

    def is_unit(self) -> bool:
        g = _fp_gcd(self._mod_p(), np.array(self.ring.phi) % self.ring.p, self.ring.p)
        return len(g) == 1

    def inv(self) -> "CycloRingElement":
        """Newton-lifted inverse; requires gcd(u mod p, Phi_f mod p) = 1."""
        r = self.ring
        v0 = _fp_inverse(self._mod_p(), np.array(r.phi) % r.p, r.p)
        v = r.from_coeffs(v0)
        steps = max(1, math.ceil(math.log2(r.M)))
        two = r.scalar(2)
        for _ in range(steps):
            v = v * (two - self * v)
        assert (self * v) == r.one(), "inverse lift failed"
        return v

    def content_valuation(self) -> int | None:
        """min v_p over nonzero coefficients; None for the zero element."""
        nz = self.coeffs[self.coeffs % self.ring.pM != 0]
        if len(nz) == 0:
            return None
        v = self.ring.M
        for c in nz:
            v = min(v, valuation(int(c), self.ring.p))
            if v == 0:
                return 0
        return v

    def divide_exact_p_power(self, s: int) -> "CycloRingElement":
        """Divide by p^s; every coefficient must be divisible.

        The top s digits of the result are unspecified (precision shrinks);
        callers account for this through the GUARD margin.
        """
        if s == 0:
            return self
        ps = self.ring.p**s
        if not ((self.coeffs % ps) == 0).all():
            off = int(np.argmax(self.coeffs % ps != 0))
            raise PrecisionError(
                f"non-exact division by p^{s} (coefficient at x^{off} has valuation "
                f"{valuation(int(self.coeffs[off]), self.ring.p)})")
        return CycloRingElement(self.ring, self.coeffs // ps)

    def divide_exact(self, k: int) -> "CycloRingElement":
        """Divide by an integer k = p^s * unit, exactly in the p-part."""
        s = valuation(k, self.ring.p)
        unit = k // self.ring.p**s
        out = self.divide_exact_p_power(s)
        return out * pow(unit, -1, self.ring.pM)

    def truncate(self, M2: int) -> "CycloRingElement":
        """Reduce to precision M2 <= M."""
        r2 = self.ring.at_precision(M2)
        return CycloRingElement(r2, self.coeffs % r2.pM)

    def __repr__(self):
        head = ", ".join(str(int(c)) for c in self.coeffs[:8])
        tail = ", ..." if self.ring.degree > 8 else ""
        return f"CycloRingElement(f={self.ring.f}, p^M={self.ring.p}^{self.ring.M}, [{head}{tail}])"


# ---------------------------------------------------------------------------
# F_p[x] helpers

def _fp_trim(a: np.ndarray) -> np.ndarray:
    i = len(a)
    while i > 0 and a[i - 1] == 0:
        i -= 1
    return a[:i]


def _fp_divmod(num: np.ndarray, den: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    num = _fp_trim(num % p).astype(np.int64).copy()
    den = _fp_trim(den % p)
    if len(den) == 0:
        raise ZeroDivisionError
    inv_lead = pow(int(den[-1]), -1, p)
    q = np.zeros(max(1, len(num) - len(den) + 1), dtype=np.int64)
    while len(num) >= len(den) and len(num) > 0:
        shift = len(num) - len(den)
        factor = int(num[-1]) * inv_lead % p
        q[shift] = factor
        num[shift:shift + len(den)] = (num[shift:shift + len(den)] - factor * den) % p
        num = _fp_trim(num)
    return q, num


def _fp_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    return _fp_trim(np.convolve(a, b) % p)


def _fp_gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = _fp_trim(a % p), _fp_trim(b % p)
    while len(b):
        _, r = _fp_divmod(a, b, p)
        a, b = b, r
    if len(a):
        a = a * pow(int(a[-1]), -1, p) % p
    return a


def _fp_inverse(u: np.ndarray, phi: np.ndarray, p: int) -> np.ndarray:
    """s with s*u = 1 mod (phi, p), by extended Euclid."""
    r0, r1 = _fp_trim(phi % p), _fp_trim(u % p)
    s0, s1 = np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.int64)
    while len(r1):
        q, r = _fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        qs1 = _fp_mul(q, s1, p)
        n = max(len(s0), len(qs1))
        s = np.zeros(n, dtype=np.int64)
        s[:len(s0)] += s0
        s[:len(qs1)] -= qs1
        s0, s1 = s1, _fp_trim(s % p)
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible mod (p, Phi_f)")
    lead_inv = pow(int(r0[0]), -1, p)
    out = s0 * lead_inv % p
    _, rem = _fp_divmod(out, phi % p, p)
    return rem


# ---------------------------------------------------------------------------
# Iwasawa logarithm

def residue_ring_exponent(f: int, p: int) -> tuple[int, int]:
    """(E, t): units of Z[x]/(Phi_f, p) have u^(E * p^t) = 1 mod p.

    E = p^ord - 1 with ord the order of p mod the p-free part of f; the p^t
    factor kills the unipotent part when p | f (experimental path).
    """
    fp = f
    t = 0
    while fp % p == 0:
        fp //= p
    E = p ** (multiplicative_order(p, fp) if fp > 2 else 1) - 1
    if fp != f:
        nil = euler_phi(f) // euler_phi(fp)
        while p**t < nil:
            t += 1
    return E, t


def iwasawa_log(u: CycloRingElement, _series_bound: int | None = None) -> CycloRingElement:
    """log(u) for a unit u, trusted to the ring precision minus GUARD digits.

    Raises to the residue-ring exponent so that the series argument has
    valuation >= 1 (>= 2 for p = 2), then sums log(1+z) = sum (-1)^{k+1} z^k / k
    until the tail is below the ring precision.
    """
    ring = u.ring
    p, M = ring.p, ring.M
    if not u.is_unit():
        raise PrecisionError("iwasawa_log needs a unit argument")
    E, t = residue_ring_exponent(ring.f, p)
    w = u ** (E * p**t)
    extra = 0
    if p == 2:
        w = w * w
        extra = 1
    z = w - ring.one()
    v0 = 2 if p == 2 else 1
    cv = z.content_valuation()
    assert cv is None or cv >= v0, "series argument valuation too small"
    if z.is_zero():
        series = ring.zero()
    else:
        series = ring.zero()
        zk = ring.one()
        k = 1
        kmax = _series_bound or _series_terms(M, p, v0)
        while k <= kmax:
            zk = zk * z
            term = zk.divide_exact(k)
            if k % 2 == 1:
                series = series + term
            else:
                series = series - term
            k += 1
    out = series.divide_exact(E)
    out = out.divide_exact_p_power(t + extra)
    return out


def _series_terms(M: int, p: int, v0: int) -> int:
    k = 1
    while k * v0 - math.floor(math.log(k, p)) < M:
        k += 1
    return k


# ---------------------------------------------------------------------------
# norm valuation

def ring_norm_valuation(u: CycloRingElement) -> int:
    """v_p(Res(Phi_f, u)), i.e. the valuation of the norm down to Z.

    Fast paths: p-power content times a unit.  Falls back to an exact
    integer resultant for small degrees; degenerate non-unit residues at
    large degree are reported as unresolved.
    """
    ring = u.ring
    v = u.content_valuation()
    if v is None:
        raise PrecisionError("norm of the zero residue is unresolved")
    w = u.divide_exact_p_power(v) if v else u
    if w.is_unit():
        return v * ring.degree
    if ring.degree <= 64:
        r = resultant_int(list(map(int, cyclotomic_poly(ring.f))), [int(c) for c in u.coeffs])
        if r == 0:
            raise PrecisionError("norm vanishes identically at this precision")
        return valuation(r, ring.p)
    raise PrecisionError("norm valuation unresolved: non-unit residue at large degree")


# ---------------------------------------------------------------------------
# bi-cyclotomic extension (adjoining Phi_d(y))

class BiCycloElement:
    """Polynomial in y over a CycloRing, reduced mod Phi_d(y).

    Used where character values (powers of y) and f-th roots of unity must
    live in one ring: Gauss sums and character-weighted log sums.
    """

    __slots__ = ("ring", "d", "comps")

    def __init__(self, ring: CycloRing, d: int, comps: list[CycloRingElement] | None = None):
        self.ring = ring
        self.d = d
        deg = len(cyclotomic_poly(d)) - 1
        if comps is None:
            comps = [ring.zero() for _ in range(deg)]
        assert len(comps) == deg
        self.comps = comps

    @classmethod
    def from_x(cls, el: CycloRingElement, d: int) -> "BiCycloElement":
        out = cls(el.ring, d)
        out.comps[0] = el
        return out

    def ydeg(self) -> int:
        return len(self.comps)

    def _y_times(self) -> "BiCycloElement":
        """Multiply by y, reducing y^deg via Phi_d."""
        phi = cyclotomic_poly(self.d)
        deg = len(phi) - 1
        top = self.comps[-1]
        comps = [self.ring.zero()] + self.comps[:-1]
        for i in range(deg):
            if phi[i]:
                comps[i] = comps[i] - top * phi[i]
        return BiCycloElement(self.ring, self.d, comps)

    def y_shift(self, k: int) -> "BiCycloElement":
        out = self
        for _ in range(k % self.d):
            out = out._y_times()
        return out

    def __add__(self, other: "BiCycloElement") -> "BiCycloElement":
        assert self.d == other.d
        return BiCycloElement(self.ring, self.d,
                              [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "BiCycloElement") -> "BiCycloElement":
        assert self.d == other.d
        return BiCycloElement(self.ring, self.d,
                              [a - b for a, b in zip(self.comps, other.comps)])

    def __mul__(self, other) -> "BiCycloElement":
        if isinstance(other, CycloRingElement):
            return BiCycloElement(self.ring, self.d, [c * other for c in self.comps])
        if isinstance(other, int):
            return BiCycloElement(self.ring, self.d, [c * other for c in self.comps])
        assert self.d == other.d
        out = BiCycloElement(self.ring, self.d)
        shifted = self
        # schoolbook in y: accumulate other.comps[j] * (self shifted by y^j)
        for j in range(other.ydeg()):
            cj = other.comps[j]
            if not cj.is_zero():
                out = out + (shifted * cj)
            shifted = shifted._y_times()
        return out

    def galois_x(self, a: int) -> "BiCycloElement":
        return BiCycloElement(self.ring, self.d, [c.galois(a) for c in self.comps])

    def divide_exact(self, k: int) -> "BiCycloElement":
        return BiCycloElement(self.ring, self.d, [c.divide_exact(k) for c in self.comps])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def extract_y(self, report_M: int):
        """The element as a YElem mod p^report_M; x-parts must vanish.

        Raises PrecisionError when any x^i (i > 0) coordinate survives at the
        reported precision: the element is then genuinely not in the y-line.
        """
        p = self.ring.p
        mod = p**report_M
        vals = []
        for c in self.comps:
            if not ((c.coeffs[1:] % mod) == 0).all():
                bad = int(np.argmax(c.coeffs[1:] % mod != 0)) + 1
                raise PrecisionError(f"x^{bad} coordinate nonzero at reported precision")
            vals.append(int(c.coeffs[0]) % mod)
        return YElem(self.d, vals, mod)
