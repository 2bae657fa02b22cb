"""Real abelian fields as subgroups of (Z/fZ)^x.

A field K is a pair (f, H): modulus f and subgroup H of (Z/fZ)^x, with
G_K = (Z/fZ)^x / H.  Artin symbols are cosets, canonicalized to the least
positive representative.  No defining polynomials anywhere: all splitting
and conductor questions are answered inside the residue group.
"""

from __future__ import annotations

import math

import numpy as np

from .arith import (
    UnitGroupModF,
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    prime_divisors,
    smallest_primitive_root,
)


class GaloisElement:
    """Coset of H in (Z/fZ)^x, kept as the least positive representative."""

    __slots__ = ("field", "rep")

    def __init__(self, field: "AbelianFieldSpec", rep: int):
        self.field = field
        self.rep = rep

    def __mul__(self, other: "GaloisElement") -> "GaloisElement":
        assert self.field is other.field or self.field == other.field
        return self.field.symbol(self.rep * other.rep)

    def inv(self) -> "GaloisElement":
        if self.field.f == 1:
            return self
        return self.field.symbol(pow(self.rep, -1, self.field.f))

    def __pow__(self, k: int) -> "GaloisElement":
        if self.field.f == 1:
            return self
        if k < 0:
            return self.inv() ** (-k)
        return self.field.symbol(pow(self.rep, k, self.field.f))

    def order(self) -> int:
        n, g = 1, self
        while g.rep != self.field.identity.rep:
            g = g * self
            n += 1
        return n

    def __eq__(self, other) -> bool:
        return isinstance(other, GaloisElement) and self.field == other.field and self.rep == other.rep

    def __hash__(self):
        return hash((self.field.f, self.field.d, self.rep))

    def __repr__(self):
        return f"({self.field.f}/{self.rep})"


class AbelianFieldSpec:
    """An abelian field given by a modulus f and a subgroup H of (Z/fZ)^x."""

    def __init__(self, f: int, h_mask: np.ndarray, kind: str = "explicit-subgroup",
                 params: dict | None = None, require_conductor: bool = False):
        self.f = f
        self.kind = kind
        self.params = dict(params or {})
        if f == 1:
            self.coset_index = np.zeros(1, dtype=np.int32)
            self.reps = [1]
            self.h_list = np.array([1], dtype=np.int64)
        else:
            h_mask = np.asarray(h_mask, dtype=bool)
            if h_mask.shape != (f,):
                raise ValueError("h_mask must have length f")
            if not h_mask[1 % f]:
                raise ValueError("H must contain 1")
            self.h_list = np.nonzero(h_mask)[0].astype(np.int64)
            probe = (self.h_list[min(1, len(self.h_list) - 1)] * self.h_list) % f
            if not h_mask[probe].all():
                raise ValueError("H is not closed under multiplication")
            self.coset_index = _classify_cosets(f, self.h_list)
            self.reps = _coset_reps(self.coset_index)
            if len(self.reps) * len(self.h_list) != euler_phi(f):
                raise ValueError("H is not closed under multiplication")
        self.d = len(self.reps)
        self.real = self.coset_index[(f - 1) % f] == 0
        if require_conductor:
            m = self.genuine_conductor()
            if m != f:
                raise ValueError(f"modulus {f} is not the conductor (field lives mod {m})")

    # -- constructors ------------------------------------------------------

    @classmethod
    def rationals(cls) -> "AbelianFieldSpec":
        return cls(1, np.array([True]), kind="rationals")

    @classmethod
    def cyclotomic(cls, f: int) -> "AbelianFieldSpec":
        """Q^f: the full cyclotomic field of modulus f (H = 1)."""
        if f == 1:
            return cls.rationals()
        mask = np.zeros(f, dtype=bool)
        mask[1] = True
        return cls(f, mask, kind="cyclotomic")

    @classmethod
    def from_generators(cls, f: int, gens: list[int], kind: str = "explicit-subgroup",
                        params: dict | None = None, require_conductor: bool = False) -> "AbelianFieldSpec":
        mask = np.zeros(f, dtype=bool)
        mask[1 % f] = True
        frontier = [1 % f]
        gens = [g % f for g in gens]
        for g in gens:
            if math.gcd(g, f) != 1:
                raise ValueError(f"generator {g} is not coprime to {f}")
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = x * g % f
                if not mask[y]:
                    mask[y] = True
                    frontier.append(y)
        return cls(f, mask, kind=kind, params=params, require_conductor=require_conductor)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AbelianFieldSpec) and self.f == other.f
                and self.d == other.d and np.array_equal(self.h_list, other.h_list))

    def __hash__(self):
        return hash((self.f, self.d, len(self.h_list)))

    # -- group structure ---------------------------------------------------

    @property
    def identity(self) -> GaloisElement:
        return GaloisElement(self, self.reps[0])

    def coset_of(self, a: int) -> int:
        a = a % self.f
        idx = int(self.coset_index[a])
        if idx < 0:
            raise ValueError(f"{a} is not coprime to {self.f}")
        return idx

    def symbol(self, a: int) -> GaloisElement:
        """Artin symbol (K/a) for a coprime to f."""
        return GaloisElement(self, self.reps[self.coset_of(a)])

    def elements(self) -> list[GaloisElement]:
        return [GaloisElement(self, r) for r in self.reps]

    def in_H(self, a: int) -> bool:
        return self.coset_index[a % self.f] == 0

    def complex_conjugation(self) -> GaloisElement:
        return self.symbol(self.f - 1) if self.f > 1 else self.identity

    def is_subfield_of(self, other: "AbelianFieldSpec") -> bool:
        """self ⊆ other, i.e. other's H maps into self's H after reduction."""
        if other.f % self.f != 0:
            return False
        return bool((self.coset_index[other.h_list % self.f] == 0).all())

    def genuine_conductor(self) -> int:
        """Smallest m | f such that H contains the kernel of reduction mod m."""
        if self.f == 1:
            return 1
        best = self.f
        for m in sorted(_divisors(self.f)):
            if m >= best:
                break
            if self._contains_reduction_kernel(m):
                best = m
                break
        return best

    def _contains_reduction_kernel(self, m: int) -> bool:
        f = self.f
        for a in range(1, f, m) if m > 1 else range(1, f):
            if math.gcd(a, f) == 1 and self.coset_index[a] != 0:
                return False
        return True

    # -- serialization (flat text used by the CLI) --------------------------

    def to_text(self) -> str:
        gens = _subgroup_generators(self)
        return f"kind={self.kind}; f={self.f}; d={self.d}; gens={sorted(int(g) for g in gens)}"

    @classmethod
    def from_text(cls, line: str) -> "AbelianFieldSpec":
        fields = dict(part.strip().split("=", 1) for part in line.strip().split(";"))
        f = int(fields["f"])
        gens = [int(x) for x in fields["gens"].strip("[] ").split(",") if x.strip()]
        spec = cls.from_generators(f, gens or [1], kind=fields.get("kind", "explicit-subgroup"))
        if "d" in fields and spec.d != int(fields["d"]):
            raise ValueError("degree in serialized spec does not match subgroup")
        return spec

    def __repr__(self):
        return f"AbelianFieldSpec(kind={self.kind}, f={self.f}, d={self.d})"


def _classify_cosets(f: int, h_list: np.ndarray) -> np.ndarray:
    idx = np.full(f, -1, dtype=np.int32)
    coprime = np.zeros(f, dtype=bool)
    a = np.arange(f, dtype=np.int64)
    coprime[np.gcd(a, f) == 1] = True
    nxt = 0
    for a0 in range(1, f):
        if coprime[a0] and idx[a0] < 0:
            idx[(a0 * h_list) % f] = nxt
            nxt += 1
    return idx

def _coset_reps(idx: np.ndarray) -> list[int]:
    d = int(idx.max()) + 1
    reps = [0] * d
    seen = 0
    for a in range(len(idx)):
        k = idx[a]
        if k >= 0 and reps[k] == 0:
            reps[k] = a
            seen += 1
            if seen == d:
                break
    return reps

def _closure(f: int, gens: list[int], start: set[int] | None = None) -> set[int]:
    have = set(start) if start else {1 % f}
    frontier = list(have)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % f
            if y not in have:
                have.add(y)
                frontier.append(y)
    return have


def _subgroup_generators(spec: AbelianFieldSpec) -> list[int]:
    """A small generating set of H, grown greedily by closure."""
    if spec.f == 1:
        return [1]
    gens: list[int] = []
    have = {1}
    for h in map(int, spec.h_list):
        if h not in have:
            gens.append(h)
            have = _closure(spec.f, gens)
            if len(have) == len(spec.h_list):
                break
    return gens or [1]


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# -- constructors for the supported field families ---------------------------

def build_field(kind: str, **params) -> AbelianFieldSpec:
    """Field constructors for the families used throughout.

    kinds: cyclic-prime (f prime, H = d-th powers), quadratic (fundamental
    discriminant f, Kronecker kernel), quartic-composite (f = q*qq with
    q = 5 mod 8, qq = 1 mod 8), explicit-subgroup (f, gens).
    """
    if kind == "cyclic-prime":
        f, d = params["f"], params["d"]
        if not is_prime(f):
            raise ValueError(f"{f} is not prime")
        if (f - 1) % d != 0:
            raise ValueError(f"degree {d} does not divide {f - 1}")
        if d == 1:
            mask = np.zeros(f, dtype=bool)
            a = np.arange(f)
            mask[np.gcd(a, f) == 1] = True
            return AbelianFieldSpec(f, mask, kind=kind, params={"f": f, "d": 1})
        z = smallest_primitive_root(f)
        mask = np.zeros(f, dtype=bool)
        x = 1
        for _ in range((f - 1) // d):
            mask[x] = True
            x = x * pow(z, d, f) % f
        spec = AbelianFieldSpec(f, mask, kind=kind, params={"f": f, "d": d}, require_conductor=True)
        if not spec.real:
            raise ValueError(f"subgroup of index {d} mod {f} is not totally real")
        assert spec.d == d
        return spec

    if kind == "quadratic":
        f = params["f"]
        if not quadratic_admissible(f):
            raise ValueError(f"{f} is not a fundamental discriminant of a real quadratic field")
        a = np.arange(f, dtype=np.int64)
        mask = np.zeros(f, dtype=bool)
        for x in range(1, f):
            if math.gcd(x, f) == 1 and kronecker(f, x) == 1:
                mask[x] = True
        spec = AbelianFieldSpec(f, mask, kind=kind, params={"f": f}, require_conductor=True)
        assert spec.d == 2 and spec.real
        return spec

    if kind == "quartic-composite":
        q, qq = params["q"], params["qq"]
        if not (is_prime(q) and q % 8 == 5):
            raise ValueError("q must be a prime = 5 mod 8")
        if not (is_prime(qq) and qq % 8 == 1):
            raise ValueError("qq must be a prime = 1 mod 8")
        f = q * qq
        z = smallest_primitive_root(q)
        zz = smallest_primitive_root(qq)
        ind_q = _dlog_table(q, z)
        ind_qq = _dlog_table(qq, zz)
        mask = np.zeros(f, dtype=bool)
        for x in range(1, f):
            if x % q and x % qq:
                if (ind_qq[x % qq] + 2 * ind_q[x % q]) % 4 == 0:
                    mask[x] = True
        spec = AbelianFieldSpec(f, mask, kind=kind, params={"q": q, "qq": qq}, require_conductor=True)
        assert spec.d == 4 and spec.real
        return spec

    if kind == "explicit-subgroup":
        return AbelianFieldSpec.from_generators(
            params["f"], params["gens"], kind=kind,
            params=params, require_conductor=params.get("require_conductor", False))

    raise ValueError(f"unknown field kind {kind!r}")


def quadratic_admissible(f: int) -> bool:
    """f is the conductor (= discriminant) of a real quadratic field."""
    if f < 5:
        return False
    v = 0
    m = f
    while m % 2 == 0:
        m //= 2
        v += 1
    if any(e > 1 for _, e in factorize(m)):
        return False
    if v in (1,) or v > 3:
        return False
    if v == 0 and m % 4 != 1:
        return False
    if v == 2 and m % 4 == 1:
        return False
    return True


def _dlog_table(q: int, g: int) -> np.ndarray:
    """ind[x] = k with g^k = x mod q (q prime), -1 at non-units."""
    ind = np.full(q, -1, dtype=np.int64)
    x = 1
    for k in range(q - 1):
        ind[x] = k
        x = x * g % q
    return ind


def conductor_Ln(f_K: int, p: int, n: int) -> int:
    """Conductor of L_n = K(mu_{q p^n}), q = p odd / 4 at p = 2."""
    q = 4 if p == 2 else p
    return math.lcm(f_K, q * p**n)


def field_Ln(K: AbelianFieldSpec, p: int, n: int) -> AbelianFieldSpec:
    """Spec of L_n = K(mu_{q p^n}) inside Q^{f_n}."""
    q = 4 if p == 2 else p
    qpn = q * p**n
    fn = conductor_Ln(K.f, p, n)
    a = np.arange(fn, dtype=np.int64)
    mask = (np.gcd(a, fn) == 1) & (a % qpn == 1)
    if K.f > 1:
        hmask_K = np.zeros(K.f, dtype=bool)
        hmask_K[K.h_list] = True
        mask &= hmask_K[a % K.f]
    return AbelianFieldSpec(fn, mask, kind="Ln", params={"f_K": K.f, "p": p, "n": n})


def n0_layers(K: AbelianFieldSpec, p: int) -> int:
    """Largest n with the p^n-th layer of the cyclotomic Z_p-tower inside K."""
    q = 4 if p == 2 else p
    n = 0
    while True:
        fQ = q * p ** (n + 1)
        if K.f % fQ != 0:
            return n
        u = UnitGroupModF(fQ)
        ok = True
        for h in map(int, K.h_list):
            ex = u.dlog(h % fQ)
            if p == 2:
                # components are <-1>, <5>; layer subgroup is <-1, 5^{2^{n+1}}>
                if ex[1] % 2 ** (n + 1) != 0:
                    ok = False
                    break
            else:
                if ex[0] % p ** (n + 1) != 0:
                    ok = False
                    break
        if not ok:
            return n
        n += 1


def splitting(K: AbelianFieldSpec, ell: int) -> tuple[int, int, int]:
    """(e, f, g) of the prime ell in K/Q, from subgroup data alone."""
    if K.f == 1:
        return (1, 1, 1)
    if math.gcd(ell, K.f) == 1:
        fr = K.symbol(ell).order()
        return (1, fr, K.d // fr)
    v = 0
    m = K.f
    while m % ell == 0:
        m //= ell
        v += 1
    # inertia = image of {a = 1 mod f/ell^v}
    inertia_cosets = set()
    for a in range(1, K.f, m) if m > 1 else range(1, K.f):
        if math.gcd(a, K.f) == 1:
            inertia_cosets.add(K.coset_of(a))
    e = len(inertia_cosets)
    # inertia field: union of the inertia cosets, re-based at modulus m
    big_mask = np.isin(K.coset_index, sorted(inertia_cosets))
    members = np.nonzero(big_mask)[0]
    if m == 1:
        return (e, 1, K.d // e)
    mask_m = np.zeros(m, dtype=bool)
    mask_m[members % m] = True
    inertia_field = AbelianFieldSpec(m, mask_m, kind="inertia-field")
    fr = inertia_field.symbol(ell).order()
    return (e, fr, K.d // (e * fr))


# -- characters --------------------------------------------------------------

class DirichletCharacter:
    """Primitive Dirichlet character attached to a Galois character of G_K.

    Values are kept in log form: value(a) = zeta_order ^ logvalue(a).  The
    Galois side psi acts on cosets of G_K; the Dirichlet side chi lives mod
    the primitive conductor f_chi.
    """

    def __init__(self, field: AbelianFieldSpec, coset_logs: list[int], modulus_order: int):
        self.field = field
        D = modulus_order
        g = math.gcd(D, math.gcd(*coset_logs) if len(coset_logs) > 1 else D)
        self.order = D // g if g else 1
        # renormalize logs to the character's own order
        self.coset_logs = [(t // g) % self.order if self.order > 1 else 0 for t in coset_logs]
        self.f_chi = self._primitive_conductor()
        self._logv_mod_fchi: np.ndarray | None = None

    # Galois side ---------------------------------------------------------

    def psi_log(self, sigma: GaloisElement) -> int:
        """log of psi(sigma) base zeta_{order}."""
        return self.coset_logs[self.field.coset_of(sigma.rep)]

    def log_on(self, a: int) -> int:
        """log of psi((K/a)) for a coprime to f_K."""
        return self.coset_logs[self.field.coset_of(a)]

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    # Dirichlet side --------------------------------------------------------

    def _factors_through(self, m: int) -> bool:
        """True iff the character is trivial on ker((Z/fZ)^x -> (Z/mZ)^x)."""
        f = self.field.f
        step = m if m > 1 else 1
        for a in range(1, f, step):
            if math.gcd(a, f) == 1 and self.coset_logs[self.field.coset_of(a)] != 0:
                return False
        return True

    def _primitive_conductor(self) -> int:
        if self.is_trivial:
            return 1
        f = self.field.f
        best = f
        for m in _divisors(f):
            if m < best and self._factors_through(m):
                best = m
        # certify minimality: explicit failure at every maximal proper divisor
        for ell in prime_divisors(best):
            assert not self._factors_through(best // ell), \
                f"conductor {best} not minimal (factors through {best // ell})"
        return best

    def logvalue(self, a: int) -> int:
        """log of chi(a) for gcd(a, f_chi) = 1, via a coprime lift mod f_K."""
        a = a % self.f_chi if self.f_chi > 1 else 0
        if self.f_chi == 1:
            return 0
        if self._logv_mod_fchi is None:
            tbl = np.full(self.f_chi, -1, dtype=np.int64)
            f = self.field.f
            for r in range(1, self.f_chi):
                if math.gcd(r, self.f_chi) != 1:
                    continue
                b = r
                while math.gcd(b, f) != 1:
                    b += self.f_chi
                tbl[r] = self.coset_logs[self.field.coset_of(b)]
            self._logv_mod_fchi = tbl
        t = int(self._logv_mod_fchi[a])
        if t < 0:
            raise ValueError(f"{a} is not coprime to the conductor {self.f_chi}")
        return t

    def fixed_field(self) -> AbelianFieldSpec:
        """k_chi: the field cut out by ker(psi), at its primitive conductor."""
        m = self.f_chi
        if m == 1:
            return AbelianFieldSpec.rationals()
        mask = np.zeros(m, dtype=bool)
        for a in range(1, m):
            if math.gcd(a, m) == 1 and self.logvalue(a) == 0:
                mask[a] = True
        return AbelianFieldSpec(m, mask, kind="fixed-field")

    def conjugate_index(self, chars: list["DirichletCharacter"]) -> int:
        """Index in chars of the complex-conjugate character."""
        target = [(-t) % self.order if self.order > 1 else 0 for t in self.coset_logs]
        for i, c in enumerate(chars):
            if c.order == self.order and c.coset_logs == target:
                return i
        raise LookupError("conjugate character not found")

    def __repr__(self):
        return f"chi(f={self.f_chi}, order={self.order})"


def characters_of(K: AbelianFieldSpec) -> list[DirichletCharacter]:
    """All d characters of G_K, trivial character first.

    Built by brute force on a small generating set of G_K: candidate value
    tuples are verified against the full multiplication table, so no
    structure theorem is needed.  Degrees stay tiny here.
    """
    d = K.d
    if d > 4096:
        raise ValueError("character enumeration limited to small Galois groups")
    if d == 1:
        return [DirichletCharacter(K, [0], 1)]

    def canon(x: int) -> int:
        return K.reps[K.coset_of(x)]

    gens: list[int] = []
    generated = {K.reps[0]}
    for r in K.reps:
        if r not in generated:
            gens.append(r)
            generated = {canon(x) for x in _closure(K.f, gens, generated)}
        if len(generated) == d:
            break
    orders = [K.symbol(g).order() for g in gens]
    D = math.lcm(*[K.symbol(r).order() for r in K.reps])
    chars: list[DirichletCharacter] = []
    from itertools import product as iproduct
    for logs in iproduct(*[range(0, D, D // o) for o in orders]):
        assigned: dict[int, int] = {K.reps[0]: 0}
        frontier = [K.reps[0]]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for g, t in zip(gens, logs):
                y = K.reps[K.coset_of(x * g)]
                val = (assigned[x] + t) % D
                if y in assigned:
                    if assigned[y] != val:
                        ok = False
                        break
                else:
                    assigned[y] = val
                    frontier.append(y)
        if not ok or len(assigned) != d:
            # re-verify everything for consistency (first-arrival may hide clashes)
            continue
        consistent = all(
            assigned[K.reps[K.coset_of(x * g)]] == (assigned[x] + t) % D
            for x in K.reps for g, t in zip(gens, logs))
        if consistent:
            chars.append(DirichletCharacter(K, [assigned[r] for r in K.reps], D))
    assert len(chars) == d, f"expected {d} characters, found {len(chars)}"
    chars.sort(key=lambda c: (c.order != 1, c.order, c.coset_logs))
    return chars
