"""Bailey pairs, conjugate Bailey pairs, the Bailey transform and the Bailey chain.

Sequences are lazy: ``pair.alpha(n, order)`` builds the n-th term through the
requested q-order on first use and memoizes it per ``(n, order)``.  The memo is
guarded by a lock, so one pair object may be shared between threads; two
threads racing on the same key compute the same immutable value and one of the
results is kept.

Every infinite sum is cut with explicit per-term q-order floors.  A floor is a
certified lower bound on the valuation of a term and must be nondecreasing in
``n`` once added to its partner's floor; the sum stops at the first index whose
combined floor exceeds the truncation order.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Callable

from .errors import PreconditionError, RelMismatch
from .qproducts import Q, PochSpec, div_poch, mul_poch, qpoch, theta_side
from .report import FAIL, PASS, VerificationReport
from .series import ExpLike, HalfExp, Monomial, QSeries, equal_up_to, make

__all__ = [
    "BaileyPair",
    "ConjugateBaileyPair",
    "verify_bailey_pair",
    "verify_conjugate_pair",
    "bailey_transform_check",
    "transform_sides",
    "chain_step",
    "chain",
    "pair_slater_A",
    "pair_slater_B",
    "pair_slater_C",
    "pair_family_A",
    "pair_family_B",
    "pair_family_C",
    "unit_pair",
    "unit_conjugate_pair",
    "warnaar_conjugate_pair",
    "sum_cut",
]

Builder = Callable[[int, HalfExp], QSeries]
Floor = Callable[[int], HalfExp]

_SCAN_LIMIT = 10_000


class _Memo:
    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}

    def get(self, key, compute):
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)

    def __len__(self):
        with self._lock:
            return len(self._data)


def _built(builder: Builder, n: int, o: HalfExp) -> QSeries:
    s = builder(n, o)
    return s.truncate(o)


@dataclass(eq=False)
class BaileyPair:
    """Sequences ``(alpha_n, beta_n)`` relative to ``rel``.

    ``alpha_floor(n)`` and ``beta_floor(n)`` are lower bounds on the q-order of
    the n-th terms.
    """

    rel: Monomial
    alpha_builder: Builder
    beta_builder: Builder
    alpha_floor: Floor
    beta_floor: Floor
    name: str = "pair"
    _memo: _Memo = field(default_factory=_Memo, repr=False)

    def alpha(self, n: int, order: ExpLike) -> QSeries:
        o = HalfExp.of(order)
        return self._memo.get(("a", n, o.steps), lambda: _built(self.alpha_builder, n, o))

    def beta(self, n: int, order: ExpLike) -> QSeries:
        o = HalfExp.of(order)
        return self._memo.get(("b", n, o.steps), lambda: _built(self.beta_builder, n, o))

    def cached_terms(self) -> int:
        return len(self._memo)

    def replace_alpha(self, n: int, transform: Callable[[QSeries], QSeries], name=None) -> "BaileyPair":
        """A copy whose ``alpha_n`` is passed through ``transform`` (for mutation tests)."""
        base = self.alpha_builder

        def alpha(m, o):
            s = base(m, o)
            return transform(s.truncate(o)) if m == n else s
        return BaileyPair(self.rel, alpha, self.beta_builder, self.alpha_floor, self.beta_floor,
                          name or f"{self.name}[alpha_{n} mutated]")


@dataclass(eq=False)
class ConjugateBaileyPair:
    """Sequences ``(delta_n, gamma_n)`` relative to ``rel``."""

    rel: Monomial
    delta_builder: Builder
    gamma_builder: Builder
    delta_floor: Floor
    gamma_floor: Floor
    name: str = "conjugate pair"
    _memo: _Memo = field(default_factory=_Memo, repr=False)

    def delta(self, n: int, order: ExpLike) -> QSeries:
        o = HalfExp.of(order)
        return self._memo.get(("d", n, o.steps), lambda: _built(self.delta_builder, n, o))

    def gamma(self, n: int, order: ExpLike) -> QSeries:
        o = HalfExp.of(order)
        return self._memo.get(("g", n, o.steps), lambda: _built(self.gamma_builder, n, o))


def sum_cut(floor: Floor, order: ExpLike, start: int = 0) -> int:
    """First index ``>= start`` whose floor exceeds ``order``."""
    o = HalfExp.of(order)
    n = start
    while floor(n) <= o:
        n += 1
        if n - start > _SCAN_LIMIT:
            raise PreconditionError("order floor never exceeds the truncation order")
    return n


def _product_to(o: HalfExp, left: Callable[[HalfExp], QSeries], left_floor: HalfExp,
                right: Callable[[HalfExp], QSeries], right_floor: HalfExp) -> QSeries:
    """Product of two lazily built factors, each provisioned so the result reaches ``o``."""
    a = left(o - right_floor)
    b = right(o - left_floor)
    return (a * b).truncate(o)


def _bailey_sum(p: BaileyPair, n: int, o: HalfExp) -> QSeries:
    """``sum_{r=0}^{n} alpha_r / ((q;q)_{n-r} (rel*q;q)_{n+r})``."""
    relq = p.rel.shift_q(1)
    total = QSeries.zero(o)
    for r in range(n + 1):
        if p.alpha_floor(r) > o:
            continue
        term = div_poch(p.alpha(r, o), PochSpec(Q, Q, n - r))
        term = div_poch(term, PochSpec(relq, Q, n + r))
        total = total + term
    return total


def verify_bailey_pair(p: BaileyPair, n_max: int, order: ExpLike) -> VerificationReport:
    """Check the defining relation of ``p`` for every ``n <= n_max``."""
    t0 = time.perf_counter()
    o = HalfExp.of(order)
    lhs_terms = rhs_terms = 0
    for n in range(n_max + 1):
        lhs = p.beta(n, o)
        rhs = _bailey_sum(p, n, o)
        lhs_terms += lhs.term_count()
        rhs_terms += rhs.term_count()
        cmp = equal_up_to(lhs, rhs, o)
        if not cmp:
            return VerificationReport(p.name, o, FAIL, cmp.mismatch, (time.perf_counter() - t0) * 1e3,
                                      lhs_terms, rhs_terms, {"n_max": n_max}, failed_index=n,
                                      location="Bailey pair defining relation")
    return VerificationReport(p.name, o, PASS, None, (time.perf_counter() - t0) * 1e3,
                              lhs_terms, rhs_terms, {"n_max": n_max},
                              location="Bailey pair defining relation")


def _conjugate_tail(c: ConjugateBaileyPair, n: int, o: HalfExp) -> QSeries:
    """``sum_{r>=n} delta_r / ((q;q)_{r-n} (rel*q;q)_{r+n})`` cut by ``delta_floor``."""
    relq = c.rel.shift_q(1)
    stop = sum_cut(c.delta_floor, o, n)
    total = QSeries.zero(o)
    for r in range(n, stop):
        term = div_poch(c.delta(r, o), PochSpec(Q, Q, r - n))
        term = div_poch(term, PochSpec(relq, Q, r + n))
        total = total + term
    return total


def verify_conjugate_pair(c: ConjugateBaileyPair, n_max: int, order: ExpLike) -> VerificationReport:
    """Check the conjugate defining relation of ``c`` for every ``n <= n_max``."""
    t0 = time.perf_counter()
    o = HalfExp.of(order)
    lhs_terms = rhs_terms = 0
    for n in range(n_max + 1):
        lhs = c.gamma(n, o)
        rhs = _conjugate_tail(c, n, o)
        lhs_terms += lhs.term_count()
        rhs_terms += rhs.term_count()
        cmp = equal_up_to(lhs, rhs, o)
        if not cmp:
            return VerificationReport(c.name, o, FAIL, cmp.mismatch, (time.perf_counter() - t0) * 1e3,
                                      lhs_terms, rhs_terms, {"n_max": n_max}, failed_index=n,
                                      location="conjugate Bailey pair defining relation")
    return VerificationReport(c.name, o, PASS, None, (time.perf_counter() - t0) * 1e3,
                              lhs_terms, rhs_terms, {"n_max": n_max},
                              location="conjugate Bailey pair defining relation")


def transform_sides(p: BaileyPair, c: ConjugateBaileyPair, order: ExpLike) -> tuple[QSeries, QSeries]:
    """``(sum alpha_n gamma_n, sum beta_n delta_n)`` through ``order``."""
    if p.rel != c.rel:
        raise RelMismatch(f"pair is relative to {p.rel}, conjugate pair to {c.rel}")
    o = HalfExp.of(order)

    def ag_floor(n):
        return p.alpha_floor(n) + c.gamma_floor(n)

    def bd_floor(n):
        return p.beta_floor(n) + c.delta_floor(n)

    ag = QSeries.zero(o)
    for n in range(sum_cut(ag_floor, o)):
        ag = ag + _product_to(o, lambda h: p.alpha(n, h), p.alpha_floor(n),
                              lambda h: c.gamma(n, h), c.gamma_floor(n))
    bd = QSeries.zero(o)
    for n in range(sum_cut(bd_floor, o)):
        bd = bd + _product_to(o, lambda h: p.beta(n, h), p.beta_floor(n),
                              lambda h: c.delta(n, h), c.delta_floor(n))
    return ag, bd


def bailey_transform_check(p: BaileyPair, c: ConjugateBaileyPair, order: ExpLike) -> VerificationReport:
    """Compare ``sum alpha_n gamma_n`` with ``sum beta_n delta_n``."""
    t0 = time.perf_counter()
    o = HalfExp.of(order)
    ag, bd = transform_sides(p, c, o)
    return VerificationReport.from_comparison(
        f"transform[{p.name} x {c.name}]", o, equal_up_to(ag, bd, o), t0, ag, bd,
        location="Bailey transform")


# ---------------------------------------------------------------------------
# the Bailey chain


def chain_step(p: BaileyPair, a: Monomial | None = None) -> BaileyPair:
    """One step of the Bailey chain with parameter ``a = p.rel``.

    ``alpha'_n = a^n q^{n^2} alpha_n`` and
    ``beta'_n = sum_{j<=n} a^j q^{j^2} beta_j / (q;q)_{n-j}``.
    """
    if a is None:
        a = p.rel
    if a != p.rel:
        raise PreconditionError("the chain step is only supported with a equal to the relative parameter")

    def weight(j: int) -> Monomial:
        return (a ** j).shift_q(j * j)

    def alpha(n, o):
        w = weight(n)
        return p.alpha(n, o - w.q_exp).mul_monomial(w)

    def beta(n, o):
        total = QSeries.zero(o)
        for j in range(n + 1):
            w = weight(j)
            if w.q_exp + p.beta_floor(j) > o:
                continue
            term = p.beta(j, o - w.q_exp).mul_monomial(w)
            total = total + div_poch(term, PochSpec(Q, Q, n - j))
        return total

    def alpha_floor(n):
        return p.alpha_floor(n) + weight(n).q_exp

    def beta_floor(n):
        return min(p.beta_floor(j) + weight(j).q_exp for j in range(n + 1))

    return BaileyPair(p.rel, alpha, beta, alpha_floor, beta_floor, f"chain({p.name})")


def chain(p: BaileyPair, steps: int) -> BaileyPair:
    for _ in range(steps):
        p = chain_step(p)
    return p


# ---------------------------------------------------------------------------
# built-in pairs


def _qexp(x) -> HalfExp:
    return HalfExp.of(Fraction(x))


def _ceil_half(x: Fraction) -> HalfExp:
    """Smallest grid point >= x."""
    return HalfExp(ceil(2 * Fraction(x)))


def _geometric(sign: int, start: ExpLike, count: int, stride: int, o: HalfExp) -> QSeries:
    """``sign * q^start * (1 - q^{stride*count}) / (1 - q^stride)`` as a finite sum."""
    s0 = HalfExp.of(start)
    terms = []
    for i in range(count):
        e = s0 + i * stride
        if e > o:
            break
        terms.append((e, sign))
    return make(terms, o)


def pair_slater_A() -> BaileyPair:
    """Pair relative to ``q`` with ``alpha`` supported on ``n % 3 != 1`` and
    ``beta_n = q^{n(n-1)} / (q;q)_{2n}``."""

    def alpha(n, o):
        m, r = divmod(n, 3)
        if r == 0:
            return _geometric(1, (3 * m - 2) * m, 6 * m + 1, 1, o)
        if r == 1:
            return QSeries.zero(o)
        return _geometric(-1, (3 * m + 2) * m, 6 * m + 5, 1, o)

    def beta(n, o):
        e = _qexp(n * (n - 1))
        return div_poch(QSeries.one(o - e), PochSpec(Q, Q, 2 * n)).mul_monomial(Monomial(1, 0, e))

    return BaileyPair(Q, alpha, beta,
                      lambda n: _ceil_half(Fraction(n * n - 2 * n, 3)),
                      lambda n: _qexp(n * (n - 1)),
                      "slater-A")


def pair_slater_B() -> BaileyPair:
    """Pair relative to ``q^2``: ``alpha_{2n} = (-1)^n q^{n^2-n}(1-q^{4n+2})/(1-q^2)``,
    ``beta_n = (-q;q)_n q^{n(n-1)/2} / (q^2;q)_{2n}``."""
    q2 = Monomial(1, 0, 2)

    def alpha(n, o):
        m, r = divmod(n, 2)
        if r:
            return QSeries.zero(o)
        return _geometric(-1 if m % 2 else 1, m * m - m, 2 * m + 1, 2, o)

    def beta(n, o):
        e = _qexp(Fraction(n * (n - 1), 2))
        s = qpoch(Monomial(-1, 0, 1), n, o - e)
        return div_poch(s, PochSpec(q2, Q, 2 * n)).mul_monomial(Monomial(1, 0, e))

    return BaileyPair(q2, alpha, beta,
                      lambda n: _ceil_half(Fraction(n * n - 2 * n, 4)),
                      lambda n: _qexp(Fraction(n * (n - 1), 2)),
                      "slater-B")


def pair_slater_C() -> BaileyPair:
    """Pair relative to ``q`` with half-integer exponents:
    ``alpha_n = (-1)^n q^{(n^2-3n)/4}(1-q^{2n+1})/(1-q)``,
    ``beta_n = (-1)^n q^{n^2/2-n} (q^{1/2};q)_n / (q;q)_{2n}``."""

    def alpha(n, o):
        return _geometric(-1 if n % 2 else 1, Fraction(n * n - 3 * n, 4), 2 * n + 1, 1, o)

    def beta(n, o):
        e = _qexp(Fraction(n * n, 2) - n)
        s = qpoch(Monomial(1, 0, Fraction(1, 2)), n, o - e)
        s = div_poch(s, PochSpec(Q, Q, 2 * n))
        return s.mul_monomial(Monomial(-1 if n % 2 else 1, 0, e))

    return BaileyPair(Q, alpha, beta,
                      lambda n: _qexp(Fraction(n * n - 3 * n, 4)),
                      lambda n: _qexp(Fraction(n * n, 2) - n),
                      "slater-C")


def _nested_beta(n: int, o: HalfExp, k: int, linear: int,
                 inner: Callable[[int, HalfExp], QSeries], inner_floor: Callable[[int], HalfExp]) -> QSeries:
    """Closed-form chain iterate as a (k-1)-fold sum.

    Enumerates ``n >= N_1 >= ... >= N_{k-1} >= 0`` with outer weights
    ``q^{N_i^2 + linear*N_i}`` for ``i <= k-2`` and denominators
    ``(q;q)_{n-N_1} (q;q)_{N_1-N_2} ... (q;q)_{N_{k-2}-N_{k-1}}``; the
    innermost variable contributes ``inner(N_{k-1})``.  Branches whose
    accumulated q-order passes ``o`` are pruned (every weight is >= 0).
    """
    total = QSeries.zero(o)
    outer_levels = k - 2

    def walk(level: int, prev: int, acc_exp: HalfExp, dens: list[int]):
        nonlocal total
        for N in range(prev + 1):
            if level < outer_levels:
                e = acc_exp + (N * N + linear * N)
                if e > o:
                    break
                walk(level + 1, N, e, dens + [prev - N])
            else:
                if acc_exp + inner_floor(N) > o:
                    break
                term = inner(N, o - acc_exp).mul_monomial(Monomial(1, 0, acc_exp))
                for d in dens + [prev - N]:
                    term = div_poch(term, PochSpec(Q, Q, d))
                total = total + term

    walk(0, n, HalfExp(0), [])
    return total


def _check_k(k: int):
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise PreconditionError(f"family index k must be an int >= 2, got {k!r}")


def pair_family_A(k: int) -> BaileyPair:
    """Closed form of ``k-1`` chain steps applied to :func:`pair_slater_A`."""
    _check_k(k)

    def alpha(n, o):
        m, r = divmod(n, 3)
        if r == 0:
            return _geometric(1, 3 * (3 * k - 2) * m * m + (3 * k - 5) * m, 6 * m + 1, 1, o)
        if r == 1:
            return QSeries.zero(o)
        return _geometric(-1, 3 * (3 * k - 2) * m * m + (15 * k - 13) * m + 6 * (k - 1), 6 * m + 5, 1, o)

    def inner(N, o):
        e = _qexp(2 * N * N)
        return div_poch(QSeries.one(o - e), PochSpec(Q, Q, 2 * N)).mul_monomial(Monomial(1, 0, e))

    def beta(n, o):
        return _nested_beta(n, o, k, 1, inner, lambda N: _qexp(2 * N * N))

    return BaileyPair(Q, alpha, beta,
                      lambda n: _ceil_half(Fraction(n * n - 2 * n, 3)) + (k - 1) * (n * n + n),
                      lambda n: HalfExp(0),
                      f"family-A(k={k})")


def pair_family_B(k: int) -> BaileyPair:
    """Closed form of ``k-1`` chain steps applied to :func:`pair_slater_B`."""
    _check_k(k)
    q2 = Monomial(1, 0, 2)

    def alpha(n, o):
        m, r = divmod(n, 2)
        if r:
            return QSeries.zero(o)
        return _geometric(-1 if m % 2 else 1, (4 * k - 3) * m * m + (4 * k - 5) * m, 2 * m + 1, 2, o)

    def inner_exp(N):
        return _qexp(Fraction(3 * N * N + 3 * N, 2))

    def inner(N, o):
        e = inner_exp(N)
        s = qpoch(Monomial(-1, 0, 1), N, o - e)
        return div_poch(s, PochSpec(q2, Q, 2 * N)).mul_monomial(Monomial(1, 0, e))

    def beta(n, o):
        return _nested_beta(n, o, k, 2, inner, inner_exp)

    return BaileyPair(q2, alpha, beta,
                      lambda n: _ceil_half(Fraction(n * n - 2 * n, 4)) + (k - 1) * (n * n + 2 * n),
                      lambda n: HalfExp(0),
                      f"family-B(k={k})")


def pair_family_C(k: int) -> BaileyPair:
    """Closed form of ``k-1`` chain steps applied to :func:`pair_slater_C`."""
    _check_k(k)

    def alpha(n, o):
        e = Fraction((4 * k - 3) * n * n + (4 * k - 7) * n, 4)
        return _geometric(-1 if n % 2 else 1, e, 2 * n + 1, 1, o)

    def inner_exp(N):
        return _qexp(Fraction(3 * N * N, 2))

    def inner(N, o):
        e = inner_exp(N)
        s = qpoch(Monomial(1, 0, Fraction(1, 2)), N, o - e)
        s = div_poch(s, PochSpec(Q, Q, 2 * N))
        return s.mul_monomial(Monomial(-1 if N % 2 else 1, 0, e))

    def beta(n, o):
        return _nested_beta(n, o, k, 1, inner, inner_exp)

    return BaileyPair(Q, alpha, beta,
                      lambda n: _qexp(Fraction((4 * k - 3) * n * n + (4 * k - 7) * n, 4)),
                      lambda n: HalfExp(0),
                      f"family-C(k={k})")


def unit_pair(rel: Monomial = Q) -> BaileyPair:
    """``alpha_n = beta_n = [n = 0]``.

    Not a Bailey pair (``beta_1`` would have to be ``1/((q;q)_1 (rel*q;q)_1)``);
    it exists to exercise the transform against :func:`unit_conjugate_pair`
    and the chain formulas on a delta-sequence input.
    """

    def delta0(n, o):
        return QSeries.one(o) if n == 0 else QSeries.zero(o)

    return BaileyPair(rel, delta0, delta0, lambda n: HalfExp(0) if n == 0 else HalfExp(10 ** 6),
                      lambda n: HalfExp(0) if n == 0 else HalfExp(10 ** 6), "unit")


def unit_conjugate_pair(rel: Monomial = Q) -> ConjugateBaileyPair:
    """``delta_n = gamma_n = [n = 0]``; only meaningful inside a transform with :func:`unit_pair`."""

    def delta0(n, o):
        return QSeries.one(o) if n == 0 else QSeries.zero(o)

    return ConjugateBaileyPair(rel, delta0, delta0, lambda n: HalfExp(n), lambda n: HalfExp(n), "unit")


def warnaar_conjugate_pair(a: Monomial, b: Monomial) -> ConjugateBaileyPair:
    """Conjugate pair relative to ``ab`` with

    ``delta_n = (aq, b, q; q)_inf (ab;q)_{2n} q^n / ((aq;q)_n (b;q)_n)`` and
    ``gamma_n = (1-ab) q^n / (1-ab q^{2n}) * (1 + sum_{r>=1} (-1)^r q^{r(r-1)/2}((aq^{n+1})^r + (bq^n)^r))``.

    ``delta_n`` is expanded as ``(aq^{n+1}, bq^n, q; q)_inf (ab;q)_{2n} q^n``,
    which is the same product with the finite denominators cancelled.
    """
    ab = a * b
    if a.shift_q(1).q_steps < 1 or b.q_steps < 1 or ab.q_steps < 0:
        raise PreconditionError("need q-order(aq), q-order(b) >= 1/2 and q-order(ab) >= 0")

    def delta(n, o):
        s = qpoch(ab, 2 * n, o - n)
        for arg in (a.shift_q(n + 1), b.shift_q(n), Q):
            s = mul_poch(s, PochSpec(arg))
        return s.mul_monomial(Monomial(1, 0, n))

    def gamma(n, o):
        s = theta_side(a.shift_q(n + 1), b.shift_q(n), o - n)
        if n:
            s = s.mul_one_minus(ab).div_one_minus(ab.shift_q(2 * n))
        return s.mul_monomial(Monomial(1, 0, n))

    return ConjugateBaileyPair(ab, delta, gamma, lambda n: HalfExp.of(n), lambda n: HalfExp.of(n),
                               f"warnaar(a={a}, b={b})")
