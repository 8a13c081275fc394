"""A slow, independent reference implementation for cross-checking the kernel.

Storage is a fixed rectangle of Python ints indexed by (q half-step, z-exponent),
covering ``[-N, N]`` in both directions for an order of ``N`` half-steps.
Nothing here calls into :mod:`baileyforge.series` arithmetic; the only bridge
is :func:`from_qseries` / :meth:`DenseSeries.to_dict`, which go through plain
``(steps, z, coeff)`` triples.

Formulas for the named series and the double sums are re-derived here with
different expansions (geometric series instead of recurrences, predicate loops
instead of ``range`` regions) so that a shared mistake would have to be made
twice.
"""

from __future__ import annotations

from math import isqrt
from typing import Callable, Iterable, Iterator


class DenseSeries:
    """Rectangular array of coefficients; exponents above ``n`` are discarded."""

    def __init__(self, n: int, z_bound: int | None = None):
        if n < 0:
            raise ValueError("order must be nonnegative")
        self.n = n
        self.zb = n if z_bound is None else z_bound
        self.rows = [[0] * (2 * self.zb + 1) for _ in range(2 * n + 1)]

    def _check(self, q: int, z: int):
        if q < -self.n:
            raise OverflowError(f"q half-step {q} below the oracle window")
        if abs(z) > self.zb:
            raise OverflowError(f"z-exponent {z} outside the oracle window")

    def add_term(self, q: int, z: int, c: int):
        if q > self.n or c == 0:
            return
        self._check(q, z)
        self.rows[q + self.n][z + self.zb] += c

    def get(self, q: int, z: int = 0) -> int:
        if q > self.n or q < -self.n or abs(z) > self.zb:
            return 0
        return self.rows[q + self.n][z + self.zb]

    def nonzero(self) -> Iterator[tuple[int, int, int]]:
        for i, row in enumerate(self.rows):
            for j, c in enumerate(row):
                if c:
                    yield i - self.n, j - self.zb, c

    def copy(self) -> "DenseSeries":
        out = DenseSeries(self.n, self.zb)
        out.rows = [r[:] for r in self.rows]
        return out

    def to_dict(self, upto: int | None = None) -> dict[tuple[int, int], int]:
        """``{(q_steps, z): coeff}`` for ``q_steps <= upto``."""
        lim = self.n if upto is None else upto
        return {(q, z): c for q, z, c in self.nonzero() if q <= lim}

    def __add__(self, other: "DenseSeries") -> "DenseSeries":
        out = self.copy()
        for q, z, c in other.nonzero():
            out.add_term(q, z, c)
        return out

    def __sub__(self, other: "DenseSeries") -> "DenseSeries":
        out = self.copy()
        for q, z, c in other.nonzero():
            out.add_term(q, z, -c)
        return out

    def scale(self, k: int) -> "DenseSeries":
        out = DenseSeries(self.n, self.zb)
        for q, z, c in self.nonzero():
            out.add_term(q, z, k * c)
        return out

    def shift(self, q_steps: int, z: int = 0, c: int = 1) -> "DenseSeries":
        out = DenseSeries(self.n, self.zb)
        for q, zz, cc in self.nonzero():
            out.add_term(q + q_steps, zz + z, c * cc)
        return out

    def invert_z(self) -> "DenseSeries":
        out = DenseSeries(self.n, self.zb)
        for q, z, c in self.nonzero():
            out.add_term(q, -z, c)
        return out

    def at_z_one(self) -> "DenseSeries":
        out = DenseSeries(self.n, self.zb)
        for q, _, c in self.nonzero():
            out.add_term(q, 0, c)
        return out


def dense_one(n: int, z_bound: int | None = None) -> DenseSeries:
    d = DenseSeries(n, z_bound)
    d.add_term(0, 0, 1)
    return d


def dense_from_terms(terms: Iterable[tuple[int, int, int]], n: int, z_bound: int | None = None) -> DenseSeries:
    d = DenseSeries(n, z_bound)
    for q, z, c in terms:
        d.add_term(q, z, c)
    return d


def from_qseries(s, n: int | None = None, z_bound: int | None = None) -> DenseSeries:
    """Copy a kernel series into the oracle representation (no arithmetic shared)."""
    hi = s.trunc_order.steps if n is None else n
    d = DenseSeries(max(hi, 0), z_bound)
    for e, poly in s.terms():
        for z, c in poly.items():
            d.add_term(e.steps, z, c)
    return d


def qseries_dict(s, upto: int | None = None) -> dict[tuple[int, int], int]:
    """``{(q_steps, z): coeff}`` of a kernel series, up to ``upto`` half-steps."""
    lim = s.trunc_order.steps if upto is None else upto
    return {(e.steps, z): c for e, poly in s.terms() if e.steps <= lim for z, c in poly.items()}


# -- arithmetic ------------------------------------------------------------------

def oracle_mul(a: DenseSeries, b: DenseSeries) -> DenseSeries:
    """Schoolbook product over every pair of nonzero cells."""
    n = min(a.n, b.n)
    out = DenseSeries(n, max(a.zb, b.zb))
    bt = list(b.nonzero())
    for q1, z1, c1 in a.nonzero():
        for q2, z2, c2 in bt:
            if q1 + q2 <= n:
                out.add_term(q1 + q2, z1 + z2, c1 * c2)
    return out


def _binomial(coeff: int, z: int, q: int, n: int, zb: int) -> DenseSeries:
    d = dense_one(n, zb)
    d.add_term(q, z, -coeff)
    return d


def _geometric(coeff: int, z: int, q: int, n: int, zb: int) -> DenseSeries:
    """``1/(1 - c z^z q^q) = sum_m (c z^z q^q)^m`` for ``q > 0``."""
    if q <= 0:
        raise ValueError("geometric expansion needs a positive q-power")
    d = DenseSeries(n, zb)
    m = 0
    while m * q <= n:
        d.add_term(m * q, m * z, coeff ** m)
        m += 1
    return d


def _factor_args(coeff: int, z: int, q: int, step: int, length, n: int):
    i = 0
    while length is None or i < length:
        e = q + i * step
        if length is None and e > n:
            return
        yield coeff, z, e
        i += 1


def oracle_poch(coeff: int, z: int, q: int, step: int, length: int | None, n: int,
                z_bound: int | None = None) -> DenseSeries:
    """``(c z^z q^{q/2}; q^{step/2})_length`` in half-step units; ``length=None`` is infinite."""
    out = dense_one(n, z_bound)
    for c, zz, e in _factor_args(coeff, z, q, step, length, n):
        out = oracle_mul(out, _binomial(c, zz, e, n, out.zb))
    return out


def oracle_poch_inverse(coeff: int, z: int, q: int, step: int, length: int | None, n: int,
                        z_bound: int | None = None) -> DenseSeries:
    out = dense_one(n, z_bound)
    for c, zz, e in _factor_args(coeff, z, q, step, length, n):
        out = oracle_mul(out, _geometric(c, zz, e, n, out.zb))
    return out


def oracle_invert(d: DenseSeries) -> DenseSeries:
    """Inverse of a unit via the geometric series in its normalised tail.

    With lowest term ``u = s z^e q^m`` (``s = +-1``) and ``d = u (1 + r)``,
    ``1/d = u^{-1} sum_k (-r)^k``; the result is exact through ``n - 2m``.
    """
    cells = list(d.nonzero())
    if not cells:
        raise ZeroDivisionError("zero series")
    m = min(q for q, _, _ in cells)
    low = [(z, c) for q, z, c in cells if q == m]
    if len(low) != 1 or abs(low[0][1]) != 1:
        raise ArithmeticError("lowest coefficient is not +-z^e")
    e, s = low[0]
    n = d.n - 2 * m
    if n < 0:
        raise ValueError("not enough known terms to invert")
    # the normalised tail is known through d.n - m
    r = DenseSeries(d.n - m, d.zb)
    for q, z, c in cells:
        if q != m:
            r.add_term(q - m, z - e, -c * s)  # r holds -(tail / u)
    total = dense_one(r.n, d.zb)
    power = dense_one(r.n, d.zb)
    while True:
        power = oracle_mul(power, r)
        if not any(True for _ in power.nonzero()):
            break
        total = total + power
    out = DenseSeries(n, d.zb)
    for q, z, c in total.nonzero():
        out.add_term(q - m, z - e, c * s)
    return out


# -- named series --------------------------------------------------------------

def oracle_euler(n: int, step: int = 2, z_bound: int | None = None) -> DenseSeries:
    """``(q^{step/2}; q^{step/2})_inf``; ``step=2`` is ``(q;q)_inf``."""
    return oracle_poch(1, 0, step, step, None, n, z_bound)


def _rank_sum(n: int, numer_exp: Callable[[int], int], numer: Callable[[int], DenseSeries] | None,
              z_inv_extra: int) -> DenseSeries:
    total = DenseSeries(n)
    k = 0
    while numer_exp(k) <= n:
        t = dense_one(n).shift(numer_exp(k))
        if numer is not None:
            t = oracle_mul(t, numer(k))
        for i in range(1, k + 1):
            t = oracle_mul(t, _geometric(1, 1, 2 * i, n, n))
        for i in range(1, k + 1 + z_inv_extra):
            t = oracle_mul(t, _geometric(1, -1, 2 * i, n, n))
        total = total + t
        k += 1
    return total


def oracle_R(n: int) -> DenseSeries:
    return _rank_sum(n, lambda k: 2 * k * k, None, 0)


def oracle_H(n: int) -> DenseSeries:
    # (-1;q)_k = 2 (-q;q)_{k-1}
    def numer(k):
        if k == 0:
            return dense_one(n)
        return oracle_poch(-1, 0, 2, 2, k - 1, n).scale(2)
    return _rank_sum(n, lambda k: k * (k + 1), numer, 0)


def oracle_g2_cleared(n: int) -> DenseSeries:
    return _rank_sum(n, lambda k: k * (k + 1), lambda k: oracle_poch(-1, 0, 2, 2, k, n), 1)


def oracle_g3_cleared(n: int) -> DenseSeries:
    return _rank_sum(n, lambda k: 2 * k * (k + 1), None, 1)


def oracle_K(n: int) -> DenseSeries:
    total = DenseSeries(n)
    k = 0
    while 2 * k * k <= n:
        t = oracle_poch(1, 0, 2, 4, k, n).shift(2 * k * k, 0, -1 if k % 2 else 1)
        for i in range(1, k + 1):
            t = oracle_mul(t, _geometric(1, 1, 4 * i, n, n))
            t = oracle_mul(t, _geometric(1, -1, 4 * i, n, n))
        total = total + t
        k += 1
    return total


def oracle_prefactor(n: int, base: int = 1) -> DenseSeries:
    """``(zq^b, z^{-1}q^b, q^b; q^b)_inf`` with ``b = base``."""
    s = 2 * base
    out = oracle_poch(1, 1, s, s, None, n)
    out = oracle_mul(out, oracle_poch(1, -1, s, s, None, n))
    return oracle_mul(out, oracle_poch(1, 0, s, s, None, n))


# -- double sums -------------------------------------------------------------------

Term = tuple[int, tuple[int, ...], int]  # sign, z-exponents, doubled q-exponent
TermRule = Callable[[int, int], "Term | None"]


def _alt(x: int) -> int:
    return 1 - 2 * (x & 1)


def _rank_a(n, j, both=False):
    if 0 <= j and 2 * j <= n:
        zs = (n - 3 * j, 3 * j - n) if both else (n - 3 * j,)
        return _alt(n + j), zs, n * n - 3 * j * j + n - j
    return None


def _rank_b(n, j, both=False):
    if 1 <= j and 2 * j <= n:
        zs = (n - 3 * j + 1, 3 * j - n - 1) if both else (n - 3 * j + 1,)
        return _alt(n + j), zs, n * n - 3 * j * j + n + j
    return None


def _sector_a(k):
    def rule(n, j):
        if 0 <= j and 3 * j < n:
            return _alt(n + j), (n - 3 * j, 3 * j - n), n * n - 3 * j * j + n - j + 6 * (k - 1) * j * (3 * j + 1) * 1
        return None
    return rule


def _sector_b(k):
    def rule(n, j):
        if 1 <= j and 3 * j < n + 1:
            return _alt(n + j), (n - 3 * j + 1, 3 * j - n - 1), n * n - 3 * j * j + n + j + 6 * (k - 1) * j * (3 * j - 1)
        return None
    return rule


def _g2_a(k):
    def rule(n, m):
        if 0 <= m and 2 * m <= n:
            return _alt(n + m), (n - 2 * m,), n * n - 2 * m * m + n + 8 * (k - 1) * (m * m + m)
        return None
    return rule


def _g2_b(k):
    def rule(n, m):
        if 1 <= m and 2 * m <= n:
            return _alt(n + m), (2 * m - n - 1,), n * n - 2 * m * m + n + 8 * (k - 1) * (m * m - m)
        return None
    return rule


def _k_a(k):
    def rule(n, m):
        if 0 <= m <= n:
            return _alt(n), (m - n,), 2 * n * n - m * m + 2 * n - m + 4 * (k - 1) * (m * m + m)
        return None
    return rule


def _k_b(k):
    def rule(n, m):
        if 1 <= m <= n:
            return _alt(n), (n - m + 1,), 2 * n * n - m * m + 2 * n + m + 4 * (k - 1) * (m * m - m)
        return None
    return rule


def _h_half(n, m):
    if 2 * abs(m) <= n:
        return _alt(n + m), (n - 2 * abs(m) + 1, 2 * abs(m) - n), n * n - 2 * m * m + n
    return None


def _h_third(n, m):
    if 3 * abs(m) <= n:
        return _alt(n), (n - 4 * abs(m) + 1, 4 * abs(m) - n), n * n - 8 * m * m + n
    return None


def _z1_hr(n, j):
    if 2 * abs(j) <= n:
        return _alt(n + j), (0,), n * n - 3 * j * j + n + j
    return None


def _z1_kp_a(n, m):
    if 2 * abs(m) <= n:
        return _alt(n + m), (0,), n * n - 2 * m * m + n
    return None


def _z1_kp_b(n, m):
    if 3 * abs(m) <= n:
        return _alt(n), (0,), n * n - 8 * m * m + n
    return None


def _z1_bressoud(n, m):
    if abs(m) <= n:
        return _alt(n), (0,), 2 * n * n - m * m + 2 * n + m
    return None


ORACLE_SUMS: dict[str, list[TermRule]] = {
    "rank-compact": [_rank_a, _rank_b],
    "rank-symmetric": [lambda n, j: _rank_a(n, j, True), lambda n, j: _rank_b(n, j, True)],
    "h-half": [_h_half],
    "h-third": [_h_third],
    "z1-hecke-rogers": [_z1_hr],
    "z1-kac-peterson-a": [_z1_kp_a],
    "z1-kac-peterson-b": [_z1_kp_b],
    "z1-bressoud": [_z1_bressoud],
}
for _k in (1, 2, 3, 4):
    ORACLE_SUMS[f"rank-expanded(k={_k})"] = [_sector_a(_k), _sector_b(_k)]
    ORACLE_SUMS[f"g2(k={_k})"] = [_g2_a(_k), _g2_b(_k)]
    ORACLE_SUMS[f"k-sums(k={_k})"] = [_k_a(_k), _k_b(_k)]


def oracle_double_sum(rules: list[TermRule], n: int, base_bound: int | None = None) -> DenseSeries:
    """Sum every rule over ``n' <= cutoff`` and ``|j| <= n'``.

    ``cutoff`` is four times ``base_bound`` (by default a deliberately loose
    ``sqrt(18 * order) + 3``).  The top half of the range must contribute
    nothing, which is asserted.
    """
    if base_bound is None:
        base_bound = isqrt(9 * n) + 3  # 18 * (n / 2)
    cutoff = 4 * base_bound
    out = DenseSeries(n, max(n, cutoff + 2))
    for rule in rules:
        for nn in range(cutoff + 1):
            for j in range(-nn, nn + 1):
                t = rule(nn, j)
                if t is None:
                    continue
                sign, zs, e = t
                if e > n:
                    continue
                assert 2 * nn <= cutoff, f"term at n={nn} within order found in the top half of the cutoff"
                for z in zs:
                    out.add_term(e, z, sign)
    return out


def oracle_theta(n: int, k: int = 1) -> DenseSeries:
    """``sum_{j>=0} q^{c j(3j+1)} - sum_{j>=1} q^{c j(3j-1)}`` with ``c = 3k - 2``."""
    c = 3 * k - 2
    out = DenseSeries(n)
    for j in range(0, n + 1):
        out.add_term(2 * c * j * (3 * j + 1), 0, 1)
        if j >= 1:
            out.add_term(2 * c * j * (3 * j - 1), 0, -1)
    return out
