"""Declarative Hecke-Rogers double sums and their certified enumeration bounds.

A :class:`DoubleSumSpec` describes ``sum_{n>=0} sum_{j in region(n)} sign(n,j) *
sum_{e in z_exps(n,j)} z^e q^{Q(n,j)}``.  ``q_twice(n, j)`` returns ``2*Q(n,j)``
so the form stays integer-valued on the half grid.

Each spec carries ``n_max(order)``: past it no term of the sum has q-exponent
``<= order``.  The one-line justification sits next to each bound function;
``k``-dependent extra exponents are nonnegative, so the base bounds cover the
families as well.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Sequence

from .errors import BoundViolation
from .series import ExpLike, HalfExp, QSeries, make

__all__ = [
    "DoubleSumSpec",
    "double_sum",
    "audit_bound",
    "ceil_sqrt",
    "rank_compact",
    "rank_symmetric",
    "rank_expanded",
    "rank_rearrangement",
    "g2_compact",
    "h_two_step",
    "h_four_step",
    "k_sums",
    "k_sums_base_q",
    "z1_hecke_rogers",
    "z1_kac_peterson_a",
    "z1_kac_peterson_b",
    "z1_bressoud",
    "quadratic_theta",
    "all_specs",
    "audit_mode",
]

_AUDIT = contextvars.ContextVar("baileyforge_self_audit", default=False)


@contextmanager
def audit_mode(enabled: bool = True):
    """Make every :func:`double_sum` in this context run its bound audit."""
    token = _AUDIT.set(enabled)
    try:
        yield
    finally:
        _AUDIT.reset(token)


def ceil_sqrt(x) -> int:
    """Smallest integer c >= 0 with c*c >= x, for rational x."""
    x = Fraction(x)
    if x <= 0:
        return 0
    c = isqrt(x.numerator // x.denominator)
    while c * c < x:
        c += 1
    return c


@dataclass(frozen=True)
class DoubleSumSpec:
    name: str
    sign: Callable[[int, int], int]
    z_exps: Callable[[int, int], Sequence[int]]
    q_twice: Callable[[int, int], int]
    region: Callable[[int], range]
    n_max: Callable[[HalfExp], int]

    def terms(self, n: int):
        for j in self.region(n):
            yield j, self.q_twice(n, j)


def _alt(x: int) -> int:
    return -1 if x % 2 else 1


def double_sum(spec: DoubleSumSpec, order: ExpLike, self_audit: bool | None = None) -> QSeries:
    """Enumerate every term of ``spec`` with q-exponent ``<= order``.

    ``self_audit=None`` defers to the enclosing :func:`audit_mode`.
    """
    o = HalfExp.of(order)
    if self_audit is None:
        self_audit = _AUDIT.get()
    if self_audit:
        bad = audit_bound(spec, o)
        if bad:
            n, j, e = bad[0]
            raise BoundViolation(f"{spec.name}: term (n={n}, j={j}) at q^{HalfExp(e)} lies past n_max")
    rows: dict = {}
    for n in range(spec.n_max(o) + 1):
        for j, e in spec.terms(n):
            if e > o.steps:
                continue
            s = spec.sign(n, j)
            row = rows.setdefault(e, {})
            for ze in spec.z_exps(n, j):
                v = row.get(ze, 0) + s
                if v:
                    row[ze] = v
                else:
                    del row[ze]
    return QSeries._raw(rows, o.steps)


def audit_bound(spec: DoubleSumSpec, order: ExpLike, extra: int = 5) -> list[tuple[int, int, int]]:
    """Terms ``(n, j, 2*exponent)`` with ``n`` in ``(n_max, n_max+extra]`` landing at or below ``order``."""
    o = HalfExp.of(order)
    nm = spec.n_max(o)
    return [(n, j, e) for n in range(nm + 1, nm + extra + 1) for j, e in spec.terms(n) if e <= o.steps]


# -- bounds ------------------------------------------------------------------
# o is the order; each bound is ceil(sqrt(c * o)) + 2 for the constant c below.

def _bound_sixth(o: HalfExp) -> int:
    # |j| <= n/2 and (n^2-3j^2)/2 + (n-+j)/2 >= n^2/8, so n^2 <= 8*o
    return ceil_sqrt(8 * o.value) + 2


def _bound_half(o: HalfExp) -> int:
    # |m| <= n/2 and (n^2-2m^2)/2 + n/2 >= n^2/4, so n <= 2*sqrt(o)
    return ceil_sqrt(4 * o.value) + 2


def _bound_third(o: HalfExp) -> int:
    # |m| <= n/3 and (n^2-8m^2)/2 + n/2 >= n^2/18
    return ceil_sqrt(18 * o.value) + 2


def _bound_full(o: HalfExp) -> int:
    # |m| <= n and (2n^2-m^2)/2 + (2n-+m)/2 >= n^2/2
    return ceil_sqrt(2 * o.value) + 2


def _bound_full_base_q(o: HalfExp) -> int:
    # the same form halved: (2n^2-m^2)/4 + (2n-+m)/4 >= n^2/4
    return ceil_sqrt(4 * o.value) + 2


# -- the rank function R -------------------------------------------------------

def rank_compact() -> list[DoubleSumSpec]:
    """Both sums of the compact two-variable form for the rank function."""
    return [
        DoubleSumSpec("rank-compact-a", lambda n, j: _alt(n + j), lambda n, j: (n - 3 * j,),
                      lambda n, j: n * n - 3 * j * j + n - j, lambda n: range(n // 2 + 1), _bound_sixth),
        DoubleSumSpec("rank-compact-b", lambda n, j: _alt(n + j), lambda n, j: (n - 3 * j + 1,),
                      lambda n, j: n * n - 3 * j * j + n + j, lambda n: range(1, n // 2 + 1), _bound_sixth),
    ]


def rank_symmetric() -> list[DoubleSumSpec]:
    """The z <-> 1/z symmetrised sums (twice the classical two-variable form)."""
    return [
        DoubleSumSpec("rank-symmetric-a", lambda n, j: _alt(n + j),
                      lambda n, j: (n - 3 * j, 3 * j - n),
                      lambda n, j: n * n - 3 * j * j + n - j, lambda n: range(n // 2 + 1), _bound_sixth),
        DoubleSumSpec("rank-symmetric-b", lambda n, j: _alt(n + j),
                      lambda n, j: (n - 3 * j + 1, 3 * j - n - 1),
                      lambda n, j: n * n - 3 * j * j + n + j, lambda n: range(1, n // 2 + 1), _bound_sixth),
    ]


def rank_expanded(k: int = 1) -> list[DoubleSumSpec]:
    """Sector sums ``0 <= j < n/3`` and ``1 <= j < (n+1)/3`` (k = 1 is the base identity).

    The theta corrections are separate, see :func:`quadratic_theta`.
    """
    c = 3 * (k - 1)
    return [
        DoubleSumSpec(f"rank-expanded-a(k={k})", lambda n, j: _alt(n + j),
                      lambda n, j: (n - 3 * j, 3 * j - n),
                      lambda n, j: n * n - 3 * j * j + n - j + 2 * c * j * (3 * j + 1),
                      lambda n: range((n - 1) // 3 + 1) if n > 0 else range(0), _bound_sixth),
        DoubleSumSpec(f"rank-expanded-b(k={k})", lambda n, j: _alt(n + j),
                      lambda n, j: (n - 3 * j + 1, 3 * j - n - 1),
                      lambda n, j: n * n - 3 * j * j + n + j + 2 * c * j * (3 * j - 1),
                      lambda n: range(1, n // 3 + 1), _bound_sixth),
    ]


def rank_rearrangement(which: str) -> tuple[DoubleSumSpec, DoubleSumSpec]:
    """Two sides of the sector-swap identities used to pass between the two forms.

    ``which="a"``: ``j < n/3`` with ``z^{n-3j}`` against ``n/3 < j <= n/2`` with ``z^{3j-n}``.
    ``which="b"``: ``1 <= j < (n+1)/3`` with ``z^{n-3j+1}`` against
    ``(n+1)/3 < j <= n/2`` with ``z^{3j-n-1}``.
    """
    if which == "a":
        e = lambda n, j: n * n - 3 * j * j + n - j  # noqa: E731
        return (
            DoubleSumSpec("rearrange-a-lhs", lambda n, j: _alt(n + j), lambda n, j: (n - 3 * j,), e,
                          lambda n: range((n - 1) // 3 + 1) if n > 0 else range(0), _bound_sixth),
            DoubleSumSpec("rearrange-a-rhs", lambda n, j: _alt(n + j), lambda n, j: (3 * j - n,), e,
                          lambda n: range(n // 3 + 1, n // 2 + 1), _bound_sixth),
        )
    if which == "b":
        e = lambda n, j: n * n - 3 * j * j + n + j  # noqa: E731
        return (
            DoubleSumSpec("rearrange-b-lhs", lambda n, j: _alt(n + j), lambda n, j: (n - 3 * j + 1,), e,
                          lambda n: range(1, n // 3 + 1), _bound_sixth),
            DoubleSumSpec("rearrange-b-rhs", lambda n, j: _alt(n + j), lambda n, j: (3 * j - n - 1,), e,
                          lambda n: range((n + 1) // 3 + 1, n // 2 + 1), _bound_sixth),
        )
    raise ValueError(f"unknown rearrangement {which!r}")


def quadratic_theta(order: ExpLike, scale: int, linear: int, start: int) -> QSeries:
    """``sum_{j >= start} q^{scale * j * (3j + linear)}`` for ``linear`` in ``{+1, -1}``."""
    o = HalfExp.of(order)
    terms = []
    j = start
    while True:
        e = scale * j * (3 * j + linear)
        if e > o:
            if j > 0:
                break
        else:
            terms.append((e, 1))
        j += 1
    return make(terms, o)


# -- g2 / H ----------------------------------------------------------------------

def g2_compact(k: int = 1) -> list[DoubleSumSpec]:
    """Sums of the cleared g2 form; ``k > 1`` adds ``4(k-1)(m^2 +- m)``."""
    c = 4 * (k - 1)
    return [
        DoubleSumSpec(f"g2-a(k={k})", lambda n, m: _alt(n + m), lambda n, m: (n - 2 * m,),
                      lambda n, m: n * n - 2 * m * m + n + 2 * c * (m * m + m),
                      lambda n: range(n // 2 + 1), _bound_half),
        DoubleSumSpec(f"g2-b(k={k})", lambda n, m: _alt(n + m), lambda n, m: (2 * m - n - 1,),
                      lambda n, m: n * n - 2 * m * m + n + 2 * c * (m * m - m),
                      lambda n: range(1, n // 2 + 1), _bound_half),
    ]


def h_two_step() -> DoubleSumSpec:
    """``|m| <= n/2`` sum for ``(1+z)`` times the overpartition rank product."""
    return DoubleSumSpec("h-half", lambda n, m: _alt(n + m),
                         lambda n, m: (n - 2 * abs(m) + 1, 2 * abs(m) - n),
                         lambda n, m: n * n - 2 * m * m + n,
                         lambda n: range(-(n // 2), n // 2 + 1), _bound_half)


def h_four_step() -> DoubleSumSpec:
    """``|m| <= n/3`` variant of :func:`h_two_step`."""
    return DoubleSumSpec("h-third", lambda n, m: _alt(n),
                         lambda n, m: (n - 4 * abs(m) + 1, 4 * abs(m) - n),
                         lambda n, m: n * n - 8 * m * m + n,
                         lambda n: range(-(n // 3), n // 3 + 1), _bound_third)


# -- K ---------------------------------------------------------------------------

def k_sums(k: int = 1) -> list[DoubleSumSpec]:
    """Sums for the K function in base ``q`` (exponents ``(2n^2-m^2)/2 + ...``)."""
    c = 2 * (k - 1)
    return [
        DoubleSumSpec(f"k-a(k={k})", lambda n, m: _alt(n), lambda n, m: (m - n,),
                      lambda n, m: 2 * n * n - m * m + 2 * n - m + 2 * c * (m * m + m),
                      lambda n: range(n + 1), _bound_full),
        DoubleSumSpec(f"k-b(k={k})", lambda n, m: _alt(n), lambda n, m: (n - m + 1,),
                      lambda n, m: 2 * n * n - m * m + 2 * n + m + 2 * c * (m * m - m),
                      lambda n: range(1, n + 1), _bound_full),
    ]


def k_sums_base_q(k: int = 1) -> list[DoubleSumSpec]:
    """:func:`k_sums` before the substitution ``q -> q^2`` (exponents on the half grid)."""
    c = k - 1
    return [
        DoubleSumSpec(f"k-half-a(k={k})", lambda n, m: _alt(n), lambda n, m: (m - n,),
                      lambda n, m: (2 * n * n - m * m + 2 * n - m) // 2 + 2 * c * (m * m + m),
                      lambda n: range(n + 1), _bound_full_base_q),
        DoubleSumSpec(f"k-half-b(k={k})", lambda n, m: _alt(n), lambda n, m: (n - m + 1,),
                      lambda n, m: (2 * n * n - m * m + 2 * n + m) // 2 + 2 * c * (m * m - m),
                      lambda n: range(1, n + 1), _bound_full_base_q),
    ]


# -- z = 1 specialisations ----------------------------------------------------------

def z1_hecke_rogers() -> DoubleSumSpec:
    return DoubleSumSpec("z1-hecke-rogers", lambda n, j: _alt(n + j), lambda n, j: (0,),
                         lambda n, j: n * n - 3 * j * j + n + j,
                         lambda n: range(-(n // 2), n // 2 + 1), _bound_sixth)


def z1_kac_peterson_a() -> DoubleSumSpec:
    return DoubleSumSpec("z1-kac-peterson-a", lambda n, m: _alt(n + m), lambda n, m: (0,),
                         lambda n, m: n * n - 2 * m * m + n,
                         lambda n: range(-(n // 2), n // 2 + 1), _bound_half)


def z1_kac_peterson_b() -> DoubleSumSpec:
    return DoubleSumSpec("z1-kac-peterson-b", lambda n, m: _alt(n), lambda n, m: (0,),
                         lambda n, m: n * n - 8 * m * m + n,
                         lambda n: range(-(n // 3), n // 3 + 1), _bound_third)


def z1_bressoud() -> DoubleSumSpec:
    return DoubleSumSpec("z1-bressoud", lambda n, m: _alt(n), lambda n, m: (0,),
                         lambda n, m: 2 * n * n - m * m + 2 * n + m,
                         lambda n: range(-n, n + 1), _bound_full)


def all_specs(ks: Sequence[int] = (1, 2, 3)) -> list[DoubleSumSpec]:
    """Every double sum used by the identity catalog, for the listed family indices."""
    out = rank_compact() + rank_symmetric()
    out += list(rank_rearrangement("a")) + list(rank_rearrangement("b"))
    out += [h_two_step(), h_four_step()]
    out += [z1_hecke_rogers(), z1_kac_peterson_a(), z1_kac_peterson_b(), z1_bressoud()]
    for k in ks:
        out += rank_expanded(k) + g2_compact(k) + k_sums(k) + k_sums_base_q(k)
    return out
