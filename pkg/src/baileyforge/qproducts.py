"""q-Pochhammer symbols and the triple-product checks built on them."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Union

from .errors import NotAUnit, PreconditionError
from .report import VerificationReport
from .series import ExpLike, HalfExp, Monomial, QSeries, equal_up_to, invert_unit, make

__all__ = [
    "Q",
    "Z",
    "PochSpec",
    "poch",
    "poch_inverse",
    "qpoch",
    "qpoch_inverse",
    "mul_poch",
    "div_poch",
    "jtp_product",
    "jacobi_triple_product_check",
    "warnaar_gjtp_check",
    "theta_side",
]

Q = Monomial(1, 0, 1)
Z = Monomial(1, 1, 0)

Length = Union[int, float]


@dataclass(frozen=True)
class PochSpec:
    """``(arg; step)_length``; ``length`` may be ``math.inf``."""

    arg: Monomial
    step: Monomial = Q
    length: Length = math.inf

    def __post_init__(self):
        s = self.step
        if s.z_exp != 0 or s.coeff != 1 or s.q_steps < 1:
            raise PreconditionError(f"step must be a pure positive q-power, got {s}")
        if self.length == math.inf:
            if self.arg.q_steps < 0:
                raise PreconditionError("infinite products need an argument of q-order >= 0")
        elif isinstance(self.length, bool) or not isinstance(self.length, int):
            raise PreconditionError(f"length must be an int or math.inf, got {self.length!r}")

    @property
    def infinite(self) -> bool:
        return self.length == math.inf

    def factor_args(self, order_steps: int):
        """Arguments ``a, a*step, ...`` of the factors that matter through ``order_steps`` half-steps.

        Finite products yield every factor; infinite ones stop once the factor
        argument passes the order (all later factors are 1 there).
        """
        a = self.arg
        if self.infinite:
            i = 0
            while True:
                m = a.shift_q(HalfExp(i * self.step.q_steps))
                if m.q_steps > order_steps:
                    return
                yield m
                i += 1
        else:
            for i in range(max(self.length, 0)):
                yield a.shift_q(HalfExp(i * self.step.q_steps))


def poch(spec: PochSpec, order: ExpLike) -> QSeries:
    """Expand ``(a; step)_n`` through ``order`` by repeated binomial multiplication."""
    o = HalfExp.of(order)
    if spec.infinite:
        out = QSeries.one(o)
        for m in spec.factor_args(o.steps):
            out = out.mul_one_minus(m)
        return out
    factors = list(spec.factor_args(o.steps))
    # negative-order factors lower the known order; start high enough to land on `o`
    deficit = HalfExp(sum(-m.q_steps for m in factors if m.q_steps < 0))
    out = QSeries.one(o + deficit)
    for m in factors:
        out = out.mul_one_minus(m)
    return out.truncate(o)


def poch_inverse(spec: PochSpec, order: ExpLike) -> QSeries:
    """``1 / (a; step)_n`` through ``order``; zero when ``n < 0``."""
    o = HalfExp.of(order)
    if not spec.infinite and spec.length < 0:
        return QSeries.zero(o)
    if spec.infinite and spec.arg.q_steps < 1:
        raise PreconditionError("inverse of an infinite product needs an argument of q-order >= 1/2")
    factors = list(spec.factor_args(o.steps))
    if all(m.q_steps > 0 for m in factors):
        out = QSeries.one(o)
        for m in factors:
            out = out.div_one_minus(m)
        return out
    # some factor has q-order <= 0: expand and invert the product as a whole
    low = HalfExp(sum(m.q_steps for m in factors if m.q_steps < 0))
    prod = poch(spec, o - low)
    if prod.is_zero():
        raise NotAUnit(f"({spec.arg}; {spec.step})_{spec.length} vanishes to order {o - low}")
    return invert_unit(prod).truncate(o)


def qpoch(arg: Monomial, length: Length, order: ExpLike, step: Monomial = Q) -> QSeries:
    return poch(PochSpec(arg, step, length), order)


def qpoch_inverse(arg: Monomial, length: Length, order: ExpLike, step: Monomial = Q) -> QSeries:
    return poch_inverse(PochSpec(arg, step, length), order)


def _reach(s: QSeries) -> int:
    # a factor 1 - m with m of order beyond this cannot touch any known coefficient
    return s.trunc_order.steps - min(s.min_exp.steps, 0)


def mul_poch(s: QSeries, spec: PochSpec) -> QSeries:
    """``s * (a; step)_n``; keeps the truncation order when every factor has q-order >= 0."""
    for m in spec.factor_args(_reach(s)):
        s = s.mul_one_minus(m)
    return s


def div_poch(s: QSeries, spec: PochSpec) -> QSeries:
    """``s / (a; step)_n`` by successive binomial division; zero when ``n < 0``."""
    if not spec.infinite and spec.length < 0:
        return QSeries.zero(s.trunc_order)
    for m in spec.factor_args(_reach(s)):
        s = s.div_one_minus(m)
    return s


def jtp_product(order: ExpLike) -> QSeries:
    """``(z, z^{-1}q, q; q)_inf``."""
    out = QSeries.one(order)
    for arg in (Z, Monomial(1, -1, 1), Q):
        out = mul_poch(out, PochSpec(arg))
    return out


def theta_side(a: Monomial, b: Monomial, order: ExpLike) -> QSeries:
    """``1 + sum_{r>=1} (-1)^r q^{r(r-1)/2} (a^r + b^r)`` through ``order``.

    Arguments of q-order 0 are allowed; the ``q^{r(r-1)/2}`` growth alone
    then bounds the sum.
    """
    o = HalfExp.of(order)
    if min(a.q_steps, b.q_steps) < 0:
        raise PreconditionError("theta_side needs arguments of nonnegative q-order")
    terms = [(HalfExp(0), 1)]
    r = 1
    while r * (r - 1) <= o.steps:  # r(r-1) half-steps is q^{r(r-1)/2}
        sign = -1 if r % 2 else 1
        for m in (a, b):
            k = r * (r - 1) + r * m.q_steps
            if k <= o.steps:
                terms.append((HalfExp(k), {r * m.z_exp: sign * m.coeff ** r}))
        r += 1
    return make(terms, o)


def jacobi_triple_product_check(order: ExpLike) -> VerificationReport:
    """Check ``1 + sum (-1)^r q^{r(r-1)/2}(z^r + z^{-r} q^r) = (z, z^{-1}q, q; q)_inf``."""
    t0 = time.perf_counter()
    o = HalfExp.of(order)
    lhs = theta_side(Z, Monomial(1, -1, 1), o)
    rhs = jtp_product(o)
    return VerificationReport.from_comparison(
        "eq2.5-jtp", o, equal_up_to(lhs, rhs, o), t0, lhs, rhs,
        location="classical Jacobi triple product")


def gjtp_sides(a: Monomial, b: Monomial, order: ExpLike) -> tuple[QSeries, QSeries]:
    """Both sides of the two-parameter triple product for monomials ``a``, ``b``.

    ``1 + sum_{r>=1} (-1)^r q^{r(r-1)/2}(a^r + b^r)``
    and ``(a, b, q; q)_inf * sum_{r>=0} (ab/q; q)_{2r} q^r / (q, a, b, ab; q)_r``.
    """
    if a.q_steps < 1 or b.q_steps < 1:
        raise PreconditionError("both monomials need q-order >= 1/2")
    o = HalfExp.of(order)
    lhs = theta_side(a, b, o)
    ab = a * b
    ab_over_q = ab.shift_q(-1)
    inner = QSeries.zero(o)
    r = 0
    while 2 * r <= o.steps:
        term = qpoch(ab_over_q, 2 * r, o - r).mul_monomial(Monomial(1, 0, r))
        for arg in (Q, a, b, ab):
            term = div_poch(term, PochSpec(arg, Q, r))
        inner = inner + term
        r += 1
    prod = QSeries.one(o)
    for arg in (a, b, Q):
        prod = mul_poch(prod, PochSpec(arg))
    return lhs, prod * inner


def warnaar_gjtp_check(a: Monomial, b: Monomial, order: ExpLike) -> VerificationReport:
    t0 = time.perf_counter()
    o = HalfExp.of(order)
    lhs, rhs = gjtp_sides(a, b, o)
    return VerificationReport.from_comparison(
        "eq2.4-gjtp", o, equal_up_to(lhs, rhs, o), t0, lhs, rhs,
        params={"a": str(a), "b": str(b)},
        location="generalised triple product with two monomial parameters")
