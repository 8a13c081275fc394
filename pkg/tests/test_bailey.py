from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

from baileyforge.bailey import (
    BaileyPair,
    bailey_transform_check,
    chain,
    chain_step,
    pair_family_A,
    pair_family_B,
    pair_family_C,
    pair_slater_A,
    pair_slater_B,
    pair_slater_C,
    sum_cut,
    transform_sides,
    unit_conjugate_pair,
    unit_pair,
    verify_bailey_pair,
    verify_conjugate_pair,
    warnaar_conjugate_pair,
)
from baileyforge.catalog import identity, prefactor, series_R
from baileyforge.errors import PreconditionError, RelMismatch
from baileyforge.qproducts import Q, Z, PochSpec, div_poch, qpoch_inverse
from baileyforge.series import HalfExp, Monomial, QSeries, equal_up_to, make

Z_INV_Q = Monomial(1, -1, 1)
ZQ = Monomial(1, 1, 1)

BASES = {"A": pair_slater_A, "B": pair_slater_B, "C": pair_slater_C}
FAMILIES = {"A": pair_family_A, "B": pair_family_B, "C": pair_family_C}


def geometric(start, count, stride=1, sign=1, order=None):
    """``sign * q^start (1 - q^{stride*count}) / (1 - q^stride)`` as terms, optionally cut at ``order``."""
    terms = [(HalfExp.of(start) + i * stride, sign) for i in range(count)]
    if order is not None:
        terms = [t for t in terms if t[0] <= HalfExp.of(order)]
    return terms


MUTATION_MAKERS = {**BASES, **{f"{k}(k=2)": (lambda f=f: f(2)) for k, f in FAMILIES.items()}}
# alpha_n that vanish identically (n = 1 mod 3 for A, odd n for B) are unchanged by negation
MUTATION_CASES = [(name, n) for name, mk in MUTATION_MAKERS.items() for n in range(6)
                  if not mk().alpha(n, 30).is_zero()]


# -- the three base pairs ----------------------------------------------------------

class TestBasePairs:
    @pytest.mark.parametrize("name", ["A", "B", "C"])
    def test_defining_relation_to_twelve(self, name):
        rep = verify_bailey_pair(BASES[name](), 12, 40)
        assert rep.passed, rep.summary_line()

    def test_slater_A_values(self):
        p = pair_slater_A()
        assert p.alpha(0, 10) == QSeries.one(10)
        assert p.alpha(1, 10).is_zero()
        assert p.alpha(4, 30).is_zero()
        assert p.beta(0, 10) == QSeries.one(10)
        # alpha_2 = -(1 - q^5)/(1 - q)
        assert p.alpha(2, 10) == make(geometric(0, 5, sign=-1), 10)
        rep = verify_bailey_pair(p, 0, 10)
        assert rep.passed

    def test_slater_B_values(self):
        p = pair_slater_B()
        assert p.rel == Monomial(1, 0, 2)
        assert p.alpha(0, 10) == QSeries.one(10)
        assert p.beta(0, 10) == QSeries.one(10)
        assert p.alpha(2, 10) == make([(0, -1), (2, -1), (4, -1)], 10)
        assert p.alpha(3, 10).is_zero()

    def test_slater_C_values(self):
        p = pair_slater_C()
        a1 = p.alpha(1, 5)
        assert a1 == make([("-1/2", -1), ("1/2", -1), ("3/2", -1)], 5)
        assert a1.min_exp == HalfExp.of("-1/2")
        b1 = p.beta(1, 5)
        assert b1.min_exp == HalfExp.of("-1/2")
        # beta_1 = -q^{-1/2} (1 - q^{1/2}) / (q;q)_2
        expect = div_poch(make([("-1/2", -1), (0, 1)], "11/2"), PochSpec(Q, Q, 2)).truncate(5)
        assert b1 == expect
        assert not b1.on_integer_grid()

    def test_mutation_example(self):
        mutant = pair_slater_A().replace_alpha(3, lambda s: -s)
        rep = verify_bailey_pair(mutant, 3, 20)
        assert not rep.passed
        assert rep.failed_index == 3
        assert rep.first_mismatch is not None

    @pytest.mark.parametrize("name,n", MUTATION_CASES)
    def test_mutation_sensitivity(self, name, n):
        mutant = MUTATION_MAKERS[name]().replace_alpha(n, lambda s: -s)
        rep = verify_bailey_pair(mutant, 5, 30)
        assert not rep.passed
        assert rep.failed_index == n


# -- families and the chain ----------------------------------------------------------

class TestFamilies:
    @pytest.mark.parametrize("which", ["A", "B", "C"])
    @pytest.mark.parametrize("k", [2, 3])
    def test_closed_forms_are_pairs(self, which, k):
        rep = verify_bailey_pair(FAMILIES[which](k), 8, 30)
        assert rep.passed, rep.summary_line()

    def test_family_A_alpha(self):
        p = pair_family_A(2)
        for m in range(3):
            e = 12 * m * m + m
            assert p.alpha(3 * m, 60) == make(geometric(e, 6 * m + 1, order=60), 60)

    def test_family_C_alpha(self):
        p = pair_family_C(2)
        for n in range(5):
            sign = -1 if n % 2 else 1
            start = HalfExp.of(f"{5 * n * n + n}/4")
            assert p.alpha(n, 40) == make(geometric(start, 2 * n + 1, sign=sign), 40)

    @pytest.mark.parametrize("make_pair", [pair_family_A, pair_family_B, pair_family_C])
    def test_k_must_be_at_least_two(self, make_pair):
        for bad in (1, 0, 2.0, True):
            with pytest.raises(PreconditionError):
                make_pair(bad)


class TestChain:
    @pytest.mark.parametrize("which", ["A", "B", "C"])
    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_chain_coherence(self, which, k):
        iterated = chain(BASES[which](), k - 1)
        closed = FAMILIES[which](k)
        assert iterated.rel == closed.rel
        for n in range(9):
            assert equal_up_to(iterated.alpha(n, 30), closed.alpha(n, 30), 30), ("alpha", n)
            assert equal_up_to(iterated.beta(n, 30), closed.beta(n, 30), 30), ("beta", n)

    def test_chain_step_alpha_example(self):
        step = chain_step(pair_slater_A())
        for m in range(3):
            e = 12 * m * m + m
            assert step.alpha(3 * m, 60) == make(geometric(e, 6 * m + 1, order=60), 60)

    def test_chain_of_unit_pair(self):
        step = chain_step(unit_pair())
        for n in range(6):
            assert step.beta(n, 12) == qpoch_inverse(Q, n, 12)
        assert step.alpha(0, 5) == QSeries.one(5)
        assert step.alpha(3, 5).is_zero()

    @pytest.mark.parametrize("name", ["A", "B", "C"])
    def test_alpha_zero_is_kept(self, name):
        p = BASES[name]()
        assert chain_step(p).alpha(0, 20) == p.alpha(0, 20)

    def test_chain_preserves_pair_property(self):
        assert verify_bailey_pair(chain_step(pair_slater_C()), 8, 20).passed

    def test_unit_pair_is_not_a_bailey_pair(self):
        # it only feeds the transform and chain formulas
        rep = verify_bailey_pair(unit_pair(), 2, 6)
        assert not rep.passed and rep.failed_index == 1

    def test_chain_requires_own_parameter(self):
        with pytest.raises(PreconditionError):
            chain_step(pair_slater_A(), Monomial(1, 0, 2))
        assert chain_step(pair_slater_A(), Q).rel == Q


# -- floors --------------------------------------------------------------------------

ALL_PAIRS = [
    *(f() for f in BASES.values()),
    *(f(k) for f in FAMILIES.values() for k in (2, 3)),
    chain(pair_slater_B(), 2),
]


@pytest.mark.parametrize("p", ALL_PAIRS, ids=lambda p: p.name)
def test_order_floors_are_lower_bounds(p):
    o = HalfExp.of(30)
    for n in range(14):
        for seq, floor in ((p.alpha, p.alpha_floor), (p.beta, p.beta_floor)):
            s = seq(n, o)
            if not s.is_zero():
                assert s.min_exp >= floor(n), (n, s.min_exp, floor(n))


# -- conjugate pairs -----------------------------------------------------------------

class TestConjugatePairs:
    def test_rank_specialisation(self):
        c = warnaar_conjugate_pair(Z, Z_INV_Q)
        assert c.rel == Q
        rep = verify_conjugate_pair(c, 8, 30)
        assert rep.passed, rep.summary_line()

    def test_g2_specialisation(self):
        c = warnaar_conjugate_pair(Z_INV_Q, ZQ)
        assert c.rel == Monomial(1, 0, 2)
        rep = verify_conjugate_pair(c, 8, 30)
        assert rep.passed, rep.summary_line()

    def test_gamma_zero_constant_term(self):
        for a, b in ((Z, Z_INV_Q), (Z_INV_Q, ZQ)):
            g0 = warnaar_conjugate_pair(a, b).gamma(0, 6)
            assert g0.min_exp == HalfExp(0)
            assert g0[0] == make([(0, 1)], 0)[0]

    def test_delta_rank_instance(self):
        c = warnaar_conjugate_pair(Z, Z_INV_Q)
        o = HalfExp.of(12)
        for n in range(4):
            # (zq, z^{-1}q, q; q)_inf (q;q)_{2n} q^n / ((zq;q)_n (z^{-1}q;q)_n)
            s = prefactor(o - n)
            for i in range(1, 2 * n + 1):
                s = s.mul_one_minus(Monomial(1, 0, i))
            s = div_poch(div_poch(s, PochSpec(ZQ, Q, n)), PochSpec(Z_INV_Q, Q, n))
            assert c.delta(n, o) == s.mul_monomial(Monomial(1, 0, n)).truncate(o)

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            warnaar_conjugate_pair(Monomial(1, 0, -1), Q)
        with pytest.raises(PreconditionError):
            warnaar_conjugate_pair(Q, Z)

    @pytest.mark.parametrize("a,b", [(Z, Z_INV_Q), (Z_INV_Q, ZQ)])
    def test_tail_past_cut_vanishes(self, a, b):
        c = warnaar_conjugate_pair(a, b)
        o = HalfExp.of(30)
        relq = c.rel.shift_q(1)
        for n in range(4):
            stop = sum_cut(c.delta_floor, o, n)
            for r in range(stop, stop + 5):
                term = div_poch(div_poch(c.delta(r, o), PochSpec(Q, Q, r - n)), PochSpec(relq, Q, r + n))
                assert term.truncate(o).is_zero(), (n, r)


# -- the transform -------------------------------------------------------------------

COUPLINGS = {
    "rank": (pair_slater_A, (Z, Z_INV_Q)),
    "g2": (pair_slater_B, (Z_INV_Q, ZQ)),
    "K-base-q": (pair_slater_C, (Z, Z_INV_Q)),
}


class TestTransform:
    @pytest.mark.parametrize("name", list(COUPLINGS))
    def test_transform_passes(self, name):
        pair, (a, b) = COUPLINGS[name]
        rep = bailey_transform_check(pair(), warnaar_conjugate_pair(a, b), 30)
        assert rep.passed, rep.summary_line()

    def test_rank_side_is_catalog_lhs(self):
        _, bd = transform_sides(pair_slater_A(), warnaar_conjugate_pair(Z, Z_INV_Q), 30)
        assert bd == identity("thm1.1-compact").build("lhs", 30)
        assert bd == prefactor(30) * series_R(30)

    def test_g2_side_is_catalog_lhs(self):
        _, bd = transform_sides(pair_slater_B(), warnaar_conjugate_pair(Z_INV_Q, ZQ), 30)
        assert bd == identity("thm1.2-g2").build("lhs", 30)

    def test_k_side_is_catalog_lhs_after_substitution(self):
        _, bd = transform_sides(pair_slater_C(), warnaar_conjugate_pair(Z, Z_INV_Q), 15)
        assert bd.subst_q_square() == identity("eq1.9-K").build("lhs", 30)

    def test_unit_pairs(self):
        ag, bd = transform_sides(unit_pair(), unit_conjugate_pair(), 10)
        assert ag == bd == QSeries.one(10)
        assert bailey_transform_check(unit_pair(), unit_conjugate_pair(), 10).passed

    def test_rel_mismatch(self):
        with pytest.raises(RelMismatch):
            transform_sides(pair_slater_A(), warnaar_conjugate_pair(Z_INV_Q, ZQ), 10)
        with pytest.raises(RelMismatch):
            bailey_transform_check(pair_slater_B(), warnaar_conjugate_pair(Z, Z_INV_Q), 10)

    @pytest.mark.parametrize("name", list(COUPLINGS))
    def test_terms_past_cut_vanish(self, name):
        pair, (a, b) = COUPLINGS[name]
        p, c = pair(), warnaar_conjugate_pair(a, b)
        o = HalfExp.of(30)
        for left, lf, right, rf in ((p.alpha, p.alpha_floor, c.gamma, c.gamma_floor),
                                    (p.beta, p.beta_floor, c.delta, c.delta_floor)):
            stop = sum_cut(lambda n: lf(n) + rf(n), o)
            for n in range(stop, stop + 5):
                assert (left(n, o) * right(n, o)).truncate(o).is_zero(), n


# -- memoisation under threads -------------------------------------------------------------

def test_shared_pair_across_threads():
    reference = pair_family_A(3)
    expected = [reference.beta(n, 20) for n in range(8)]
    shared = pair_family_A(3)
    barrier = threading.Barrier(8)

    def work(n):
        barrier.wait()
        return [shared.beta(m, 20) for m in range(8)]

    with ThreadPoolExecutor(8) as ex:
        results = list(ex.map(work, range(8)))
    assert all(r == expected for r in results)
    assert shared.cached_terms() == 8  # one entry per beta_n


def test_memo_returns_same_object():
    p = pair_slater_A()
    assert p.beta(4, 20) is p.beta(4, 20)
    assert isinstance(p, BaileyPair)
