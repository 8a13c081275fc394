"""Named series (R, H, K, cleared g2/g3, products, family sums) and the identity registry.

Every identity is stored as a pair of builders ``order -> QSeries``; :func:`verify`
builds both sides and compares them exactly up to the requested order.

======================  ======================================================
id                      statement
======================  ======================================================
eq1.1-doubled           2 (zq,q/z,q)_inf R = symmetrised two-variable sum
eq1.1-symmetrized       compact sum + (z -> 1/z) = symmetrised sum
eq1.2-z1                (q)_inf^2 = Hecke-Rogers sum, z = 1
eq1.4-H-g2              (1+z)H = (1-z) + 2z (1-z)g2
eq1.5-H                 (1+z)(zq,q/z,q)_inf H = sum over abs(m) <= n/2
eq1.6-H                 the same with abs(m) <= n/3
eq1.5-eq1.6             the two H sums agree
eq1.7-z1, eq1.8-z1      (q)_inf (q^2;q^2)_inf as the two H sums at z = 1
eq1.9-K                 (zq^2,q^2/z,q^2;q^2)_inf K = two K sums
eq1.9-substituted       base-q transform output under q -> q^2 = K sums
eq1.10-z1               (q)_inf (q^2;q^2)_inf = K sum at z = 1
thm1.1-compact          (zq,q/z,q)_inf R = compact rank sum
thm1.1-expanded         (zq,q/z,q)_inf R = sector sums + theta corrections
thm1.1-forms            the two rank-sum forms agree
thm1.2-g2               (zq,q/z,q)_inf (1-z)g2 = g2 sums
thm1.3-R-family         rank family, parameter k >= 2
thm1.4-g2-family        g2 family, parameter k >= 2
thm1.5-K-family         K family, parameter k >= 2
g3-R-relation           z (1-z)g3 + (1-z) = R
R-symmetry              R(z) = R(1/z)
rank-rearrangement-a    sector swap for the first rank sum
rank-rearrangement-b    sector swap for the second rank sum
eq2.5-jtp               Jacobi triple product
======================  ======================================================
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

from . import hecke_rogers as hr
from .bailey import pair_family_A, pair_family_B, pair_family_C, pair_slater_C, transform_sides, warnaar_conjugate_pair
from .errors import PreconditionError, UnknownIdentity
from .hecke_rogers import double_sum
from .qproducts import Q, PochSpec, div_poch, mul_poch, theta_side, Z
from .report import VerificationReport
from .series import ExpLike, HalfExp, Monomial, QSeries, ZPolynomial, equal_up_to, make

__all__ = [
    "series_R",
    "series_H",
    "series_K",
    "series_g2_cleared",
    "series_g3_cleared",
    "euler",
    "prefactor",
    "prefactor_q2",
    "double_sum",
    "theta_correction_sums",
    "family_lhs",
    "family_rhs",
    "IdentityCase",
    "identity",
    "identity_ids",
    "resolve",
    "verify",
    "verify_case",
    "NAMED_SERIES",
]

Q2 = Monomial(1, 0, 2)
Z_INV_Q = Monomial(1, -1, 1)
ONE_PLUS_Z = ZPolynomial({0: 1, 1: 1})
ONE_MINUS_Z = ZPolynomial({0: 1, 1: -1})


# -- products -----------------------------------------------------------------

def euler(order: ExpLike, step: int = 1) -> QSeries:
    """``(q^s; q^s)_inf``."""
    qs = Monomial(1, 0, step)
    return mul_poch(QSeries.one(order), PochSpec(qs, qs))


def prefactor(order: ExpLike) -> QSeries:
    """``(zq, z^{-1}q, q; q)_inf``."""
    out = QSeries.one(order)
    for arg in (Monomial(1, 1, 1), Z_INV_Q, Q):
        out = mul_poch(out, PochSpec(arg))
    return out


def prefactor_q2(order: ExpLike) -> QSeries:
    """``(zq^2, z^{-1}q^2, q^2; q^2)_inf``."""
    out = QSeries.one(order)
    for arg in (Monomial(1, 1, 2), Monomial(1, -1, 2), Q2):
        out = mul_poch(out, PochSpec(arg, Q2))
    return out


# -- the named q-series ---------------------------------------------------------

def _rank_like(order: ExpLike, numer_exp: Callable[[int], int],
               numer_poch: Callable[[int], PochSpec] | None, z_inv_extra: int) -> QSeries:
    o = HalfExp.of(order)
    out = QSeries.zero(o)
    n = 0
    while numer_exp(n) <= o:
        e = numer_exp(n)
        t = QSeries.one(o - e)
        if numer_poch is not None:
            t = mul_poch(t, numer_poch(n))
        t = div_poch(t, PochSpec(Monomial(1, 1, 1), Q, n))
        t = div_poch(t, PochSpec(Z_INV_Q, Q, n + z_inv_extra))
        out = out + t.mul_monomial(Monomial(1, 0, e))
        n += 1
    return out


def series_R(order: ExpLike) -> QSeries:
    """Dyson's rank generating function ``sum q^{n^2} / ((zq)_n (q/z)_n)``."""
    return _rank_like(order, lambda n: n * n, None, 0)


def series_H(order: ExpLike) -> QSeries:
    """Overpartition rank function ``sum (-1)_n q^{n(n+1)/2} / ((zq)_n (q/z)_n)``."""
    return _rank_like(order, lambda n: n * (n + 1) // 2,
                      lambda n: PochSpec(Monomial(-1, 0, 0), Q, n), 0)


def series_g2_cleared(order: ExpLike) -> QSeries:
    """``(1-z) g2(z;q)``, using ``(z;q)_{n+1} = (1-z)(zq;q)_n``."""
    return _rank_like(order, lambda n: n * (n + 1) // 2,
                      lambda n: PochSpec(Monomial(-1, 0, 1), Q, n), 1)


def series_g3_cleared(order: ExpLike) -> QSeries:
    """``(1-z) g3(z;q)``."""
    return _rank_like(order, lambda n: n * (n + 1), None, 1)


def series_K(order: ExpLike) -> QSeries:
    """``sum (-1)^n (q;q^2)_n q^{n^2} / ((zq^2;q^2)_n (q^2/z;q^2)_n)``."""
    o = HalfExp.of(order)
    out = QSeries.zero(o)
    n = 0
    while n * n <= o:
        t = mul_poch(QSeries.one(o - n * n), PochSpec(Q, Q2, n))
        t = div_poch(t, PochSpec(Monomial(1, 1, 2), Q2, n))
        t = div_poch(t, PochSpec(Monomial(1, -1, 2), Q2, n))
        out = out + t.mul_monomial(Monomial(-1 if n % 2 else 1, 0, n * n))
        n += 1
    return out


# -- sums ------------------------------------------------------------------------

def _sums(specs, o: HalfExp, self_audit: bool | None = None) -> QSeries:
    out = QSeries.zero(o)
    for spec in specs:
        out = out + double_sum(spec, o, self_audit)
    return out


def theta_correction_sums(order: ExpLike, k: int = 1) -> QSeries:
    """``sum_{j>=0} q^{c j(3j+1)} - sum_{j>=1} q^{c j(3j-1)}`` with ``c = 3k - 2``."""
    c = 3 * k - 2
    return hr.quadratic_theta(order, c, 1, 0) - hr.quadratic_theta(order, c, -1, 1)


def _check_k(k):
    if not isinstance(k, int) or k < 2:
        raise PreconditionError(f"family parameter k must be an integer >= 2, got {k!r}")


def _family_inner(pair, o: HalfExp, numer: Callable[[int], PochSpec], z_inv_extra: int) -> QSeries:
    # sum_n numer_n q^n beta_n / ((zq)_n (q/z)_{n+extra}); every beta_n starts at q^0
    out = QSeries.zero(o)
    n = 0
    while n <= o:
        t = mul_poch(pair.beta(n, o - n), numer(n))
        t = div_poch(t, PochSpec(Monomial(1, 1, 1), Q, n))
        t = div_poch(t, PochSpec(Z_INV_Q, Q, n + z_inv_extra))
        out = out + t.mul_monomial(Monomial(1, 0, n))
        n += 1
    return out


_FAMILY_PAIRS: dict = {}


def _pair(which: str, k: int):
    key = (which, k)
    if key not in _FAMILY_PAIRS:  # benign race: a duplicate build only costs time
        _FAMILY_PAIRS[key] = {"A": pair_family_A, "B": pair_family_B, "C": pair_family_C}[which](k)
    return _FAMILY_PAIRS[key]


def family_lhs(which: str, k: int, order: ExpLike) -> QSeries:
    """Product side of the rank (A), g2 (B) or K (C) family for ``k >= 2``.

    C is assembled in base ``q`` (where its pair lives on the half grid) and
    then mapped by ``q -> q^2``.
    """
    _check_k(k)
    o = HalfExp.of(order)
    if which == "A":
        inner = _family_inner(_pair("A", k), o, lambda n: PochSpec(Q, Q, 2 * n), 0)
        return prefactor(o) * inner
    if which == "B":
        inner = _family_inner(_pair("B", k), o, lambda n: PochSpec(Q2, Q, 2 * n), 1)
        return prefactor(o) * inner
    if which == "C":
        half = HalfExp((o.steps + 1) // 2)
        inner = _family_inner(_pair("C", k), half, lambda n: PochSpec(Q, Q, 2 * n), 0)
        return (prefactor(half) * inner).subst_q_square().truncate(o)
    raise ValueError(f"family must be one of A, B, C; got {which!r}")


def family_rhs(which: str, k: int, order: ExpLike, self_audit: bool | None = None) -> QSeries:
    _check_k(k)
    o = HalfExp.of(order)
    if which == "A":
        return _sums(hr.rank_expanded(k), o, self_audit) + theta_correction_sums(o, k)
    if which == "B":
        return _sums(hr.g2_compact(k), o, self_audit)
    if which == "C":
        return _sums(hr.k_sums(k), o, self_audit)
    raise ValueError(f"family must be one of A, B, C; got {which!r}")


def k_transform_output(order: ExpLike) -> QSeries:
    """``sum beta_n delta_n`` for the base-q K pair, mapped by ``q -> q^2``."""
    o = HalfExp.of(order)
    half = HalfExp((o.steps + 1) // 2)
    _, bd = transform_sides(pair_slater_C(), warnaar_conjugate_pair(Z, Z_INV_Q), half)
    return bd.subst_q_square().truncate(o)


# -- registry --------------------------------------------------------------------

Side = Callable[..., QSeries]


@dataclass(frozen=True)
class IdentityCase:
    id: str
    lhs: Side
    rhs: Side
    location: str
    family: bool = False
    aliases: tuple[str, ...] = ()
    #: extra (q_steps, z_exp, delta) per side, used to inject mutations
    perturb: Mapping[str, tuple[int, int, int]] = field(default_factory=dict)

    def build(self, side: str, order: ExpLike, **params) -> QSeries:
        o = HalfExp.of(order)
        s = (self.lhs if side == "lhs" else self.rhs)(o, **params)
        if side in self.perturb:
            steps, z_exp, delta = self.perturb[side]
            if steps <= s.trunc_order.steps:
                s = s + make([(HalfExp(steps), {z_exp: delta})], s.trunc_order)
        return s

    def perturbed(self, side: str, q_exp: ExpLike, z_exp: int, delta: int = 1) -> "IdentityCase":
        """Copy of this case with ``delta * z^z_exp q^q_exp`` added to one side."""
        if side not in ("lhs", "rhs"):
            raise ValueError("side must be 'lhs' or 'rhs'")
        if delta == 0:
            raise ValueError("a perturbation needs a nonzero delta")
        return replace(self, perturb={**self.perturb, side: (HalfExp.of(q_exp).steps, z_exp, delta)})


def _nz(f: Callable[[HalfExp], QSeries]) -> Side:
    def side(o: HalfExp, **_):
        return f(o)
    return side


def _fam(f: Callable[[HalfExp, int], QSeries]) -> Side:
    def side(o: HalfExp, k: int = 2, **_):
        return f(o, k)
    return side


def _compact_rhs(o):
    return _sums(hr.rank_compact(), o)


def _expanded_rhs(o):
    return _sums(hr.rank_expanded(1), o) + theta_correction_sums(o)


def _build_registry() -> dict[str, IdentityCase]:
    cases = [
        IdentityCase("eq1.1-doubled",
                     _nz(lambda o: (prefactor(o) * series_R(o)).scale(2)),
                     _nz(lambda o: _sums(hr.rank_symmetric(), o)),
                     "two-variable rank identity, doubled to clear the 1/2"),
        IdentityCase("eq1.1-symmetrized",
                     _nz(lambda o: _compact_rhs(o) + _compact_rhs(o).subst_z_inverse()),
                     _nz(lambda o: _sums(hr.rank_symmetric(), o)),
                     "compact rank sum plus its z -> 1/z image gives the doubled rank identity"),
        IdentityCase("eq1.2-z1",
                     _nz(lambda o: euler(o) ** 2),
                     _nz(lambda o: double_sum(hr.z1_hecke_rogers(), o)),
                     "classical Hecke-Rogers identity for (q;q)_inf^2"),
        IdentityCase("eq1.4-H-g2",
                     _nz(lambda o: series_H(o).mul_zpoly(ONE_PLUS_Z)),
                     _nz(lambda o: QSeries.one(o).mul_zpoly(ONE_MINUS_Z)
                         + series_g2_cleared(o).mul_monomial(Monomial(2, 1, 0))),
                     "relation between H and the universal function g2"),
        IdentityCase("eq1.5-H",
                     _nz(lambda o: (prefactor(o) * series_H(o)).mul_zpoly(ONE_PLUS_Z)),
                     _nz(lambda o: double_sum(hr.h_two_step(), o)),
                     "overpartition rank identity, |m| <= n/2 sector"),
        IdentityCase("eq1.6-H",
                     _nz(lambda o: (prefactor(o) * series_H(o)).mul_zpoly(ONE_PLUS_Z)),
                     _nz(lambda o: double_sum(hr.h_four_step(), o)),
                     "overpartition rank identity, |m| <= n/3 sector"),
        IdentityCase("eq1.5-eq1.6",
                     _nz(lambda o: double_sum(hr.h_two_step(), o)),
                     _nz(lambda o: double_sum(hr.h_four_step(), o)),
                     "equivalence of the two overpartition rank sums"),
        IdentityCase("eq1.7-z1",
                     _nz(lambda o: euler(o) * euler(o, 2)),
                     _nz(lambda o: double_sum(hr.z1_kac_peterson_a(), o)),
                     "Kac-Peterson identity, |m| <= n/2 form"),
        IdentityCase("eq1.8-z1",
                     _nz(lambda o: euler(o) * euler(o, 2)),
                     _nz(lambda o: double_sum(hr.z1_kac_peterson_b(), o)),
                     "Kac-Peterson identity, |m| <= n/3 form"),
        IdentityCase("eq1.9-K",
                     _nz(lambda o: prefactor_q2(o) * series_K(o)),
                     _nz(lambda o: _sums(hr.k_sums(1), o)),
                     "lost-notebook function K as a two-variable double sum"),
        IdentityCase("eq1.9-substituted",
                     _nz(k_transform_output),
                     _nz(lambda o: _sums(hr.k_sums(1), o)),
                     "base-q Bailey transform output for K, mapped by q -> q^2"),
        IdentityCase("eq1.10-z1",
                     _nz(lambda o: euler(o) * euler(o, 2)),
                     _nz(lambda o: double_sum(hr.z1_bressoud(), o)),
                     "Bressoud's identity for (q;q)_inf (q^2;q^2)_inf"),
        IdentityCase("thm1.1-compact",
                     _nz(lambda o: prefactor(o) * series_R(o)),
                     _nz(_compact_rhs),
                     "compact two-variable rank identity", aliases=("thm1.1",)),
        IdentityCase("thm1.1-expanded",
                     _nz(lambda o: prefactor(o) * series_R(o)),
                     _nz(_expanded_rhs),
                     "rank identity with sector sums and theta corrections"),
        IdentityCase("thm1.1-forms",
                     _nz(_compact_rhs),
                     _nz(_expanded_rhs),
                     "agreement of the compact and sector forms of the rank sum"),
        IdentityCase("thm1.2-g2",
                     _nz(lambda o: prefactor(o) * series_g2_cleared(o)),
                     _nz(lambda o: _sums(hr.g2_compact(1), o)),
                     "two-variable identity for (1-z) g2", aliases=("thm1.2",)),
        IdentityCase("thm1.3-R-family",
                     _fam(lambda o, k: family_lhs("A", k, o)),
                     _fam(lambda o, k: family_rhs("A", k, o)),
                     "infinite family extending the rank identity", family=True, aliases=("thm1.3",)),
        IdentityCase("thm1.4-g2-family",
                     _fam(lambda o, k: family_lhs("B", k, o)),
                     _fam(lambda o, k: family_rhs("B", k, o)),
                     "infinite family extending the g2 identity", family=True, aliases=("thm1.4",)),
        IdentityCase("thm1.5-K-family",
                     _fam(lambda o, k: family_lhs("C", k, o)),
                     _fam(lambda o, k: family_rhs("C", k, o)),
                     "infinite family extending the K identity", family=True, aliases=("thm1.5",)),
        IdentityCase("g3-R-relation",
                     _nz(lambda o: series_g3_cleared(o).mul_monomial(Z) + QSeries.one(o).mul_zpoly(ONE_MINUS_Z)),
                     _nz(series_R),
                     "relation between g3 and the rank function, cleared of 1/(1-z)"),
        IdentityCase("R-symmetry",
                     _nz(series_R),
                     _nz(lambda o: series_R(o).subst_z_inverse()),
                     "invariance of the rank function under z -> 1/z"),
        IdentityCase("rank-rearrangement-a",
                     _nz(lambda o: double_sum(hr.rank_rearrangement("a")[0], o)),
                     _nz(lambda o: double_sum(hr.rank_rearrangement("a")[1], o)),
                     "sector swap j < n/3 against n/3 < j <= n/2"),
        IdentityCase("rank-rearrangement-b",
                     _nz(lambda o: double_sum(hr.rank_rearrangement("b")[0], o)),
                     _nz(lambda o: double_sum(hr.rank_rearrangement("b")[1], o)),
                     "sector swap j < (n+1)/3 against (n+1)/3 < j <= n/2"),
        IdentityCase("eq2.5-jtp",
                     _nz(lambda o: theta_side(Z, Z_INV_Q, o)),
                     _nz(lambda o: mul_poch(mul_poch(mul_poch(QSeries.one(o), PochSpec(Z)), PochSpec(Z_INV_Q)),
                                            PochSpec(Q))),
                     "Jacobi triple product"),
    ]
    return {c.id: c for c in cases}


_REGISTRY = _build_registry()
_ALIASES = {a: c.id for c in _REGISTRY.values() for a in c.aliases}


def identity_ids() -> list[str]:
    return list(_REGISTRY)


def resolve(ident: str) -> str:
    """Canonical id for ``ident`` (which may be an alias)."""
    if ident in _REGISTRY:
        return ident
    if ident in _ALIASES:
        return _ALIASES[ident]
    raise UnknownIdentity(ident)


def identity(ident: str) -> IdentityCase:
    return _REGISTRY[resolve(ident)]


def verify_case(case: IdentityCase, order: ExpLike, **params) -> VerificationReport:
    t0 = time.perf_counter()
    o = HalfExp.of(order)
    if case.family:
        params.setdefault("k", 2)
        _check_k(params["k"])
    else:
        params = {}
    lhs = case.build("lhs", o, **params)
    rhs = case.build("rhs", o, **params)
    return VerificationReport.from_comparison(
        case.id, o, equal_up_to(lhs, rhs, o), t0, lhs, rhs, params=params, location=case.location)


def verify(ident: str, order: ExpLike, **params) -> VerificationReport:
    """Build both sides of a registered identity at ``order`` and compare them."""
    return verify_case(identity(ident), order, **params)


NAMED_SERIES: dict[str, Callable[[HalfExp], QSeries]] = {
    "R": series_R,
    "H": series_H,
    "K": series_K,
    "g2_cleared": series_g2_cleared,
    "g3_cleared": series_g3_cleared,
    "euler": euler,
    "euler_q2": lambda o: euler(o, 2),
    "prefactor": prefactor,
    "prefactor_q2": prefactor_q2,
    "jtp": lambda o: mul_poch(mul_poch(mul_poch(QSeries.one(o), PochSpec(Z)), PochSpec(Z_INV_Q)), PochSpec(Q)),
}
