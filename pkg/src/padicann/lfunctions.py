"""Cyclotomic numbers, Gauss sums, L_p(1, chi), and Solomon-type elements.

The value at s = 1 is assembled from three factors,
    L_p(1, chi) = -(1 - chi(p)/p) * (tau(chi)/f_chi) * sum_a chi^{-1}(a) log(1 - zeta^a),
with the a-sum regrouped over Galois conjugates of the cyclotomic number
eta = N(1 - zeta): phi(f_chi) logarithms collapse to d conjugates of one
log, so the dominant cost is a single exponentiation by the residue-ring
exponent.  The same logs feed the Solomon element Psi = (1/p) sum log(eta^s) s^{-1}
and the analytic valuation of the torsion order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np

from .arith import prime_divisors, valuation
from .fields import AbelianFieldSpec, DirichletCharacter, characters_of, n0_layers
from .group_algebra import (
    GroupRingElement,
    IntModPM,
    PrecisionError,
    YElem,
    norm_valuation,
    wt_equiv,
)
from .padic_cyclo import (
    GUARD,
    BiCycloElement,
    CycloRing,
    CycloRingElement,
    iwasawa_log,
    ring_make,
)
from .stickelberger import euler_factor_char


# ---------------------------------------------------------------------------
# cyclotomic numbers

def cyclotomic_number(f: int, K: AbelianFieldSpec, ring: CycloRing) -> CycloRingElement:
    """eta_K = prod over H of (1 - x^h): the norm of 1 - zeta_f down to K.

    K must live under modulus f = ring.f; the result is fixed by H (checked
    on a generator sample).
    """
    if f == 1:
        raise ValueError("no cyclotomic number at modulus 1")
    if ring.f != f or (K.f > 1 and f % K.f != 0):
        raise ValueError("ring modulus must match f and contain K")
    if K.f > 1 and K.f != f:
        # exponents: lift H to the subgroup of (Z/fZ)^x fixing K
        hs = [a for a in range(1, f) if math.gcd(a, f) == 1 and K.coset_index[a % K.f] == 0]
    elif K.f == 1:
        hs = [a for a in range(1, f) if math.gcd(a, f) == 1]
    else:
        hs = [int(h) for h in K.h_list]
    acc = np.zeros(ring.f, dtype=np.int64)
    acc[0] = 1
    for h in hs:
        term = np.zeros(ring.f, dtype=np.int64)
        term[0] = 1
        term[h % f] = (term[h % f] - 1) % ring.pM
        acc = ring.cyclic_mul(acc, term)
    eta = CycloRingElement(ring, ring.reduce_mod_phi(acc))
    if hs:
        h0 = hs[len(hs) // 2]
        assert eta.galois(h0) == eta, "cyclotomic number is not H-invariant"
    return eta


def cyclotomic_number_exact(f: int, exponents: list[int]) -> list[int]:
    """prod (1 - x^a) over the exponent list, exactly in Z[x]/Phi_f.

    Plain integer arithmetic (no p-adic truncation); for the small exact
    norm-relation checks.
    """
    acc = [0] * f
    acc[0] = 1
    for a in exponents:
        nxt = [0] * f
        for i, c in enumerate(acc):
            if c:
                nxt[i] += c
                nxt[(i + a) % f] -= c
        acc = nxt
    # exact reduction mod Phi_f
    from .arith import cyclotomic_poly
    phi = cyclotomic_poly(f)
    deg = len(phi) - 1
    for k in range(f - 1, deg - 1, -1):
        q = acc[k]
        if q:
            for i in range(deg + 1):
                acc[k - deg + i] -= q * phi[i]
    return acc[:deg]


# ---------------------------------------------------------------------------
# Gauss sums

def gauss_sum(chi: DirichletCharacter, ring: CycloRing) -> BiCycloElement:
    """tau(chi) = sum_{(a, f_chi) = 1} chi(a) zeta^a in the bi-cyclotomic ring."""
    if chi.is_trivial:
        raise ValueError("Gauss sum needs a nontrivial primitive character")
    f = chi.f_chi
    if ring.f != f:
        raise ValueError("ring modulus must equal the character conductor")
    d = chi.order
    slots = [np.zeros(ring.f, dtype=np.int64) for _ in range(d)]
    for a in range(1, f):
        if math.gcd(a, f) == 1:
            slots[chi.logvalue(a)][a % f] += 1
    out = BiCycloElement(ring, d)
    for t in range(d):
        if slots[t].any():
            el = CycloRingElement(ring, ring.reduce_mod_phi(slots[t]))
            out = out + BiCycloElement.from_x(el, d).y_shift(t)
    return out


# ---------------------------------------------------------------------------
# L_p(1, chi)

@dataclass
class LpValue:
    chi: DirichletCharacter
    p: int
    M: int
    value: YElem
    norm_val: int | None
    factors: dict = dataclass_field(default_factory=dict)

    @property
    def f_chi(self) -> int:
        return self.chi.f_chi

    def to_json_dict(self) -> dict:
        return {
            "f_chi": self.f_chi,
            "order": self.chi.order,
            "p": self.p,
            "precision": self.M,
            "value": self.value.lift(),
            "norm_valuation": self.norm_val,
        }


@lru_cache(maxsize=32)
def _log_eta_conjugates(f: int, h_key: tuple, p: int, Mwork: int) -> dict[int, CycloRingElement]:
    """log(eta^sigma_b) for coset reps b, sharing one exponentiation."""
    ring = ring_make(f, p, Mwork)
    K = AbelianFieldSpec(f, _mask_from_key(f, h_key), kind="fixed-field")
    eta = cyclotomic_number(f, K, ring)
    log_eta = iwasawa_log(eta)
    return {b: log_eta.galois(b) for b in K.reps}


def _mask_from_key(f: int, h_key: tuple) -> np.ndarray:
    mask = np.zeros(f, dtype=bool)
    mask[list(h_key)] = True
    return mask


def lp_at_1(chi: DirichletCharacter, p: int, M: int, guard: int = GUARD) -> LpValue:
    """L_p(1, chi) for a nontrivial primitive even character, mod p^M.

    Main path p not dividing f_chi; for p | f_chi the unipotent part of the
    residue ring costs extra precision (experimental path, see the ring docs).
    """
    if chi.is_trivial:
        raise ValueError("L_p(1, chi) needs a nontrivial character")
    f = chi.f_chi
    d = chi.order
    Mwork = M + guard
    ring = ring_make(f, p, Mwork)
    kchi = chi.fixed_field()
    if not kchi.real:
        raise ValueError("the character must be even (real fixed field)")
    logs = _log_eta_conjugates(f, tuple(int(h) for h in kchi.h_list), p, Mwork)
    # sum over conjugates: sum_b chi^{-1}(b) log(eta^{sigma_b})
    log_sum = BiCycloElement(ring, d)
    for b in kchi.reps:
        t = (-chi.logvalue(b)) % d
        log_sum = log_sum + BiCycloElement.from_x(logs[b], d).y_shift(t)
    tau = gauss_sum(chi, ring)
    w = tau * log_sum
    # Euler factor at p: -(1 - chi(p)/p) = -(p - chi(p))/p
    if f % p == 0:
        w_eul = w  # chi(p) = 0 convention: factor is 1
        euler_y = YElem.one(d, p**M)
    else:
        tp = chi.logvalue(p % f)
        w_eul = (w * p) - w.y_shift(tp)
        euler_y = YElem.one(d, p**M) * p - YElem.ypow(d, tp, p**M)
        w_eul = w_eul.divide_exact(p)
    val = (BiCycloElement(ring, d) - w_eul).divide_exact(f)
    value = val.extract_y(M)
    try:
        nv = norm_valuation(value, p)
    except PrecisionError:
        nv = None
    return LpValue(chi, p, M, value, nv, factors={
        "euler_at_p": euler_y,
        "gauss": tau,
        "log_sum": log_sum,
        "minus_over_p_f": True,
    })


def lp_values(K: AbelianFieldSpec, p: int, M: int) -> list[LpValue]:
    """L_p(1, chi) for every nontrivial chi of K, one exponentiation per orbit.

    Conjugate characters get their values by the substitution y -> y^s.
    """
    chars = characters_of(K)
    out: list[LpValue | None] = [None] * len(chars)
    for i, chi in enumerate(chars):
        if chi.is_trivial or out[i] is not None:
            continue
        lv = lp_at_1(chi, p, M)
        out[i] = lv
        for j in range(i + 1, len(chars)):
            chj = chars[j]
            if out[j] is None and chj.order == chi.order and chj.f_chi == chi.f_chi:
                s = _conjugation_exponent(chi, chj)
                if s is not None:
                    v = lv.value.subst_power(s)
                    try:
                        nv = norm_valuation(v, p)
                    except PrecisionError:
                        nv = None
                    out[j] = LpValue(chj, p, M, v, nv, factors={"conjugate_of": i, "exponent": s})
    return [lv for lv in out if lv is not None]


def _conjugation_exponent(chi: DirichletCharacter, chj: DirichletCharacter) -> int | None:
    """s with chj = chi^s, if chj is a power of chi with the same kernel."""
    d = chi.order
    for s in range(1, d):
        if math.gcd(s, d) != 1:
            continue
        if all((s * a) % d == b for a, b in zip(chi.coset_logs, chj.coset_logs)):
            return s
    return None


# ---------------------------------------------------------------------------
# analytic valuation of the torsion order

def analytic_valuation(K: AbelianFieldSpec, p: int, M: int) -> int:
    """v_p(#T_K) from  #T_K ~ [K cap Q_inf : Q] * prod_{chi != 1} (1/2) L_p(1, chi).

    For p odd the 1/2 factors are units; for p = 2 they are applied
    literally (known +-1 normalization slack documented at the call sites).
    """
    values = lp_values(K, p, M)
    seen_orbits = set()
    total = 0
    for lv in values:
        key = _orbit_key(lv.chi)
        if key in seen_orbits:
            continue
        seen_orbits.add(key)
        if lv.norm_val is None:
            raise PrecisionError(f"L-value unresolved at precision for {lv.chi}")
        total += lv.norm_val
    if p == 2:
        total -= len(values)
    return total + n0_layers(K, p)


def _orbit_key(chi: DirichletCharacter) -> tuple:
    d = chi.order
    cands = []
    for s in range(1, max(d, 2)):
        if math.gcd(s, d) == 1:
            cands.append(tuple(s * t % d for t in chi.coset_logs))
    return (d, min(cands))


# ---------------------------------------------------------------------------
# Solomon elements

@dataclass
class SolomonElement:
    """Psi = (1/p) sum_sigma log(eta^sigma) sigma^{-1}, coefficients in the
    cyclotomic ring of the field's conductor."""

    field: AbelianFieldSpec
    p: int
    ring: CycloRing
    coeffs: dict[int, CycloRingElement]
    normalization: str = "original"

    def coeff(self, sigma) -> CycloRingElement:
        rep = sigma.rep if hasattr(sigma, "rep") else sigma
        return self.coeffs.get(rep, self.ring.zero())

    def reduced_mod_norm(self) -> "SolomonElement":
        c0 = self.coeff(self.field.identity)
        out = {r: (c - c0) for r, c in self.coeffs.items()}
        out[self.field.identity.rep] = self.ring.zero()
        return SolomonElement(self.field, self.p, self.ring, out, self.normalization)

    def norm_to(self, k: AbelianFieldSpec) -> "SolomonElement":
        """Restriction to a subfield: coefficients of merged cosets add."""
        if not k.is_subfield_of(self.field):
            raise ValueError("not a subfield")
        out: dict[int, CycloRingElement] = {}
        for rep, c in self.coeffs.items():
            t = k.reps[k.coset_of(rep % k.f)] if k.f > 1 else 1
            out[t] = out[t] + c if t in out else c
        return SolomonElement(k, self.p, self.ring, out, self.normalization)

    def char_value(self, chi: DirichletCharacter, d_embed: int | None = None) -> BiCycloElement:
        """psi(Psi) = sum_sigma coeff(sigma) psi(sigma), in the bi-cyclotomic ring."""
        d = d_embed or max(chi.order, 1)
        out = BiCycloElement(self.ring, d)
        for rep, c in self.coeffs.items():
            t = (chi.log_on(rep) * (d // chi.order)) % d if chi.order > 1 else 0
            out = out + BiCycloElement.from_x(c, d).y_shift(t)
        return out

    def is_zero_at(self, M: int) -> bool:
        mod = self.p**M
        return all(((c.coeffs % mod) == 0).all() for c in self.coeffs.values())


def solomon_element(K: AbelianFieldSpec, p: int, M: int, normalization: str = "original",
                    guard: int = GUARD) -> SolomonElement:
    """The annihilator-style element built from logs of cyclotomic numbers.

    normalization 'original' divides the logs by p (exactness asserted);
    'modified' keeps the plain logs, with the prefactor
    C_chi = -(1 - chi(p)/p) tau(chi)/f_chi applied at character evaluation
    (the L-value pipeline): chi of the modified element is L_p(1, chi).
    """
    if normalization not in ("original", "modified"):
        raise ValueError("normalization must be 'original' or 'modified'")
    if K.f == 1:
        return SolomonElement(K, p, ring_make(1, p, M + guard), {}, normalization)
    if K.f % p == 0 and normalization == "original":
        raise ValueError("original normalization needs p unramified (p not dividing f)")
    ring = ring_make(K.f, p, M + guard)
    eta = cyclotomic_number(K.f, K, ring)
    log_eta = iwasawa_log(eta)
    coeffs: dict[int, CycloRingElement] = {}
    for sigma in K.elements():
        val = log_eta.galois(sigma.rep)
        if normalization == "original":
            cv = val.content_valuation()
            if cv is not None and cv < 1:
                raise PrecisionError(f"log has valuation {cv}: division by p is not exact")
            val = val.divide_exact(p)
        coeffs[sigma.inv().rep] = val
    return SolomonElement(K, p, ring, coeffs, normalization)


# ---------------------------------------------------------------------------
# character-side reconstruction of the annihilator

@dataclass
class ReconstructionReport:
    element: GroupRingElement
    per_character: list[dict]
    precision: int
    wt_match: bool | None = None


def zeta_residue_term(K: AbelianFieldSpec, p: int, c: int, M: int) -> int:
    """The trivial-character component of the multiplied pseudo-measure:

        lim (c^{phi_n} - 1)/(f_n phi_n) * sum_a a^{phi_n}
            = (1 - 1/p) log_p<c> * prod_{ell | f_K, ell != p} (1 - 1/ell),

    mod p^M.  This is the pole of the p-adic zeta against the vanishing
    multiplier; <c> is the principal-unit part of c.
    """
    big = p ** (M + GUARD)
    ring = ring_make(1, p, M + GUARD)
    logc = int(iwasawa_log(ring.scalar(c)).coeffs[0])
    if logc % p != 0:
        raise PrecisionError("log of the unit part has positive valuation by construction")
    r = (logc - logc // p) % big
    for ell in prime_divisors(K.f):
        if ell != p:
            r = r * (ell - 1) % big * pow(ell, -1, big) % big
    return r % p**M


def reconstruct_annihilator(K: AbelianFieldSpec, p: int, c: int, M: int,
                            compare_with: GroupRingElement | None = None,
                            level_n: int | None = None) -> ReconstructionReport:
    """A_K(c) rebuilt from primitive L-values:

        A_K(c) = (1/d) sum_sigma [ R + sum_{psi != 1} psi^{-1}(sigma) (1 - psi(c))
                  * prod_{ell | f_K, ell not | p f_chi} (1 - chi(ell)/ell) * L_p(1, chi) ] sigma,

    where R is the trivial-character residue term (zeta_residue_term).  The
    coefficients must come out rational (y-free); division by d costs
    v_p(d) digits of precision.  When compare_with is given, the result is
    checked wt-equivalent at level_n.
    """
    if math.gcd(c, K.f * p) != 1:
        raise ValueError("c must be prime to p f_K")
    d = K.d
    vd = valuation(d, p) if d % p == 0 else 0
    Mwork = M + vd + 1
    mod_work = p**Mwork
    values = lp_values(K, p, Mwork)
    residue = zeta_residue_term(K, p, c, Mwork)
    if not values:
        return ReconstructionReport(GroupRingElement(K, IntModPM(p, M), {1: residue}), [], M)
    D = math.lcm(*[max(ch.chi.order, 1) for ch in values])
    per_char = []
    terms = []
    for lv in values:
        chi = lv.chi
        eul = YElem.one(max(chi.order, 1), mod_work)
        for ell in prime_divisors(K.f):
            if ell != p and chi.f_chi % ell != 0:
                eul = eul * euler_factor_char(chi, ell, mod_work)
        tc = chi.log_on(c)
        mult = YElem.one(chi.order, mod_work) - YElem.ypow(chi.order, tc, mod_work)
        prod = (mult * eul * YElem(chi.order, lv.value.coeffs, mod_work)).embed(D)
        terms.append((chi, prod))
        per_char.append({"chi": chi, "euler": eul, "multiplier": mult, "lp": lv})
    coeffs: dict[int, int] = {}
    for rep in K.reps:
        acc = YElem(D, [residue], mod_work)
        for chi, prod in terms:
            s = (-chi.log_on(rep) * (D // max(chi.order, 1))) % max(D, 1)
            acc = acc + YElem.ypow(D, s, mod_work) * prod
        # the psi-sum must land on the rational line
        lifted = acc.lift()
        for j, cy in enumerate(lifted[1:], start=1):
            if cy % p**M != 0:
                raise PrecisionError(f"reconstructed coefficient has a y^{j} part at precision")
        lam = lifted[0]
        if vd and lam % p**vd != 0:
            raise PrecisionError("division by the degree is not exact at precision")
        lam = (lam // p**vd) * pow(d // p**vd, -1, p**M)
        coeffs[rep] = lam % p**M
    element = GroupRingElement(K, IntModPM(p, M), coeffs)
    report = ReconstructionReport(element, per_char, M)
    if compare_with is not None:
        n = level_n if level_n is not None else M - 1
        report.wt_match = wt_equiv(element, compare_with, p, n)
    return report
