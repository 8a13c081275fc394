"""Exact arithmetic on truncated bivariate q-series.

A :class:`QSeries` is a formal series in ``q`` whose exponents live on the
half-integer grid, bounded below and truncated above.  Each q-coefficient is a
:class:`ZPolynomial`, a finite Laurent polynomial in ``z`` with Python integer
coefficients, so nothing ever overflows or rounds.

Internally exponents are stored as integer *half-steps* (``q^{1/2}`` has step
1).  The public surface speaks :class:`HalfExp`, and anything that accepts an
exponent also accepts an ``int``, a :class:`fractions.Fraction`, or a string
such as ``"61/2"``.

Every value is immutable after construction; all operations return new values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import InsufficientOrder, NotAUnit, PreconditionError

__all__ = [
    "HalfExp",
    "ExpLike",
    "as_half",
    "ZPolynomial",
    "Monomial",
    "QSeries",
    "Mismatch",
    "Comparison",
    "make",
    "add",
    "mul",
    "invert_unit",
    "mul_monomial",
    "subst_z_inverse",
    "subst_q_square",
    "eval_z_one",
    "equal_up_to",
]


class HalfExp:
    """An exponent on the half-integer grid, stored as ``steps / 2``."""

    __slots__ = ("steps",)

    def __init__(self, steps: int):
        if isinstance(steps, bool) or not isinstance(steps, int):
            raise TypeError(f"HalfExp steps must be an int, got {steps!r}")
        object.__setattr__(self, "steps", steps)

    def __setattr__(self, name, value):
        raise AttributeError("HalfExp is immutable")

    @classmethod
    def of(cls, value: "ExpLike") -> "HalfExp":
        """Build from an exponent *value* (not a step count)."""
        if isinstance(value, HalfExp):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        elif isinstance(value, float):
            value = Fraction(value)
        elif isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise TypeError(f"cannot interpret {value!r} as a q-exponent")
        doubled = 2 * Fraction(value)
        if doubled.denominator != 1:
            raise ValueError(f"{value} is not on the half-integer grid")
        return cls(int(doubled))

    @property
    def value(self) -> Fraction:
        return Fraction(self.steps, 2)

    def is_integral(self) -> bool:
        return self.steps % 2 == 0

    def __add__(self, other):
        return HalfExp(self.steps + as_half(other).steps)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfExp(self.steps - as_half(other).steps)

    def __rsub__(self, other):
        return HalfExp(as_half(other).steps - self.steps)

    def __neg__(self):
        return HalfExp(-self.steps)

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return HalfExp(self.steps * k)

    __rmul__ = __mul__

    def _cmp_steps(self, other):
        try:
            return as_half(other).steps
        except (TypeError, ValueError):
            return None

    def __eq__(self, other):
        s = self._cmp_steps(other)
        return s is not None and self.steps == s

    def __lt__(self, other):
        return self.steps < as_half(other).steps

    def __le__(self, other):
        return self.steps <= as_half(other).steps

    def __gt__(self, other):
        return self.steps > as_half(other).steps

    def __ge__(self, other):
        return self.steps >= as_half(other).steps

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"HalfExp({self.value})"


ExpLike = Union[HalfExp, int, Fraction, str]


def as_half(x: ExpLike) -> HalfExp:
    return HalfExp.of(x)


def _steps(x: ExpLike) -> int:
    return x.steps if isinstance(x, HalfExp) else HalfExp.of(x).steps


def _fmt_exp(steps: int) -> str:
    return str(Fraction(steps, 2))


# ---------------------------------------------------------------------------
# raw dict helpers: a z-polynomial is {z_exp: coeff} with no zero values


def _padd_into(acc: dict, p: Mapping[int, int], scale: int = 1, shift: int = 0) -> None:
    for e, c in p.items():
        k = e + shift
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def _pmul_into(acc: dict, p: Mapping[int, int], r: Mapping[int, int]) -> None:
    if len(p) > len(r):
        p, r = r, p
    for e1, c1 in p.items():
        for e2, c2 in r.items():
            k = e1 + e2
            v = acc.get(k, 0) + c1 * c2
            if v:
                acc[k] = v
            else:
                del acc[k]


def _clean(p: Mapping[int, int]) -> dict:
    return {int(e): int(c) for e, c in p.items() if c}


class ZPolynomial:
    """Finite Laurent polynomial in ``z`` with integer coefficients."""

    __slots__ = ("_t",)

    def __init__(self, terms: Union[Mapping[int, int], int, None] = None):
        if terms is None:
            t = {}
        elif isinstance(terms, ZPolynomial):
            t = dict(terms._t)
        elif isinstance(terms, int):
            t = {0: terms} if terms else {}
        else:
            t = _clean(terms)
        object.__setattr__(self, "_t", t)

    def __setattr__(self, name, value):
        raise AttributeError("ZPolynomial is immutable")

    @classmethod
    def _wrap(cls, t: dict) -> "ZPolynomial":
        p = cls.__new__(cls)
        object.__setattr__(p, "_t", t)
        return p

    @classmethod
    def monomial(cls, coeff: int, z_exp: int = 0) -> "ZPolynomial":
        return cls({z_exp: coeff})

    @property
    def terms(self) -> Mapping[int, int]:
        return MappingProxyType(self._t)

    def items(self):
        return sorted(self._t.items())

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def __getitem__(self, z_exp: int) -> int:
        return self._t.get(z_exp, 0)

    def __add__(self, other):
        other = _as_zpoly(other)
        acc = dict(self._t)
        _padd_into(acc, other._t)
        return ZPolynomial._wrap(acc)

    __radd__ = __add__

    def __neg__(self):
        return ZPolynomial._wrap({e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        return self + (-_as_zpoly(other))

    def __rsub__(self, other):
        return _as_zpoly(other) - self

    def __mul__(self, other):
        other = _as_zpoly(other)
        acc: dict = {}
        _pmul_into(acc, self._t, other._t)
        return ZPolynomial._wrap(acc)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            return self._t == _as_zpoly(other)._t
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def at_one(self) -> int:
        return sum(self._t.values())

    def invert_z(self) -> "ZPolynomial":
        return ZPolynomial._wrap({-e: c for e, c in self._t.items()})

    def unit_exponent(self):
        """Return ``(sign, e)`` if this is ``+-z^e``, else ``None``."""
        if len(self._t) == 1:
            (e, c), = self._t.items()
            if c in (1, -1):
                return c, e
        return None

    def __repr__(self):
        if not self._t:
            return "0"
        parts = []
        for e, c in sorted(self._t.items()):
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                zpart = "z" if e == 1 else f"z^{e}"
                body = zpart if mag == 1 else f"{mag}*{zpart}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _as_zpoly(x) -> ZPolynomial:
    if isinstance(x, ZPolynomial):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return ZPolynomial(x)
    if isinstance(x, Mapping):
        return ZPolynomial(x)
    raise TypeError(f"cannot interpret {x!r} as a z-polynomial")


@dataclass(frozen=True)
class Monomial:
    """``coeff * z^z_exp * q^q_exp`` with a nonzero integer coefficient."""

    coeff: int = 1
    z_exp: int = 0
    q_exp: HalfExp = HalfExp(0)

    def __post_init__(self):
        if not isinstance(self.q_exp, HalfExp):
            object.__setattr__(self, "q_exp", HalfExp.of(self.q_exp))
        if self.coeff == 0:
            raise ValueError("Monomial coefficient must be nonzero")

    @property
    def q_steps(self) -> int:
        return self.q_exp.steps

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not isinstance(other, Monomial):
            return NotImplemented
        return Monomial(self.coeff * other.coeff, self.z_exp + other.z_exp,
                        HalfExp(self.q_steps + other.q_steps))

    def __neg__(self):
        return Monomial(-self.coeff, self.z_exp, self.q_exp)

    def __pow__(self, k: int) -> "Monomial":
        if k < 0:
            if self.coeff not in (1, -1):
                raise NotAUnit(f"{self} has no integral inverse")
            return Monomial(self.coeff ** (-k), self.z_exp * k, HalfExp(self.q_steps * k))
        return Monomial(self.coeff ** k, self.z_exp * k, HalfExp(self.q_steps * k))

    def shift_q(self, e: ExpLike) -> "Monomial":
        return Monomial(self.coeff, self.z_exp, HalfExp(self.q_steps + _steps(e)))

    def __str__(self):
        parts = [] if self.coeff == 1 else ["-" if self.coeff == -1 else str(self.coeff)]
        if self.z_exp:
            parts.append("z" if self.z_exp == 1 else f"z^{self.z_exp}")
        if self.q_steps:
            parts.append("q" if self.q_steps == 2 else f"q^{self.q_exp}")
        s = "*".join(p for p in parts if p != "-")
        if not s:
            s = "1"
        return ("-" + s) if self.coeff == -1 else s


@dataclass(frozen=True)
class Mismatch:
    """First differing coefficient between two series."""

    q_exp: HalfExp
    z_exp: int
    left: int
    right: int


@dataclass(frozen=True)
class Comparison:
    """Outcome of :func:`equal_up_to`; truthy when the series agree."""

    order: HalfExp
    mismatch: Mismatch | None = None

    @property
    def equal(self) -> bool:
        return self.mismatch is None

    def __bool__(self):
        return self.mismatch is None


class QSeries:
    """Truncated bivariate series: known exactly for q-exponents ``<= trunc_order``."""

    __slots__ = ("_rows", "_lo", "_hi")

    def __init__(self, *args, **kwargs):
        raise TypeError("use make() or the QSeries.zero/one/monomial constructors")

    @classmethod
    def _raw(cls, rows: dict, hi: int) -> "QSeries":
        """Wrap ``rows`` (steps -> z dict). Drops empty rows and rows above ``hi``."""
        clean = {k: p for k, p in rows.items() if p and k <= hi}
        s = object.__new__(cls)
        object.__setattr__(s, "_rows", clean)
        object.__setattr__(s, "_hi", hi)
        object.__setattr__(s, "_lo", min(clean) if clean else 0)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, order: ExpLike) -> "QSeries":
        return cls._raw({}, _steps(order))

    @classmethod
    def one(cls, order: ExpLike) -> "QSeries":
        return cls.monomial(Monomial(), order)

    @classmethod
    def monomial(cls, m: Monomial, order: ExpLike) -> "QSeries":
        return cls._raw({m.q_steps: {m.z_exp: m.coeff}}, _steps(order))

    # -- inspection ---------------------------------------------------------

    @property
    def min_exp(self) -> HalfExp:
        return HalfExp(self._lo)

    @property
    def trunc_order(self) -> HalfExp:
        return HalfExp(self._hi)

    def is_zero(self) -> bool:
        return not self._rows

    def _low(self) -> int:
        # a truncated zero series is known to vanish through _hi
        return self._lo if self._rows else self._hi + 1

    def __getitem__(self, q_exp: ExpLike) -> ZPolynomial:
        k = _steps(q_exp)
        if k > self._hi:
            raise InsufficientOrder(f"q^{_fmt_exp(k)} is above the truncation order {self.trunc_order}")
        return ZPolynomial(self._rows.get(k, {}))

    def coeff(self, q_exp: ExpLike, z_exp: int = 0) -> int:
        return self[q_exp][z_exp]

    def terms(self) -> list[tuple[HalfExp, ZPolynomial]]:
        return [(HalfExp(k), ZPolynomial(self._rows[k])) for k in sorted(self._rows)]

    def exponents(self) -> list[HalfExp]:
        return [HalfExp(k) for k in sorted(self._rows)]

    def term_count(self) -> int:
        """Number of nonzero ``(q, z)`` coefficients stored."""
        return sum(len(p) for p in self._rows.values())

    def on_integer_grid(self) -> bool:
        return self._hi % 2 == 0 and all(k % 2 == 0 for k in self._rows)

    def z_range(self) -> tuple[int, int] | None:
        zs = [e for p in self._rows.values() for e in p]
        return (min(zs), max(zs)) if zs else None

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._hi == other._hi and self._rows == other._rows

    def __hash__(self):
        return hash((self._hi, frozenset((k, frozenset(p.items())) for k, p in self._rows.items())))

    def __repr__(self):
        shown = []
        for k in sorted(self._rows)[:6]:
            p = ZPolynomial(self._rows[k])
            qpart = "" if k == 0 else ("q" if k == 2 else f"q^{_fmt_exp(k)}")
            shown.append(f"({p!r}){qpart}" if qpart else f"({p!r})")
        body = " + ".join(shown) if shown else "0"
        if len(self._rows) > 6:
            body += " + ..."
        return f"QSeries({body}, order={self.trunc_order})"

    # -- ring operations ----------------------------------------------------

    def truncate(self, order: ExpLike) -> "QSeries":
        hi = _steps(order)
        if hi > self._hi:
            raise InsufficientOrder(f"cannot extend order {self.trunc_order} to {_fmt_exp(hi)}")
        return QSeries._raw(self._rows, hi)

    def __add__(self, other):
        if isinstance(other, int):
            other = QSeries._raw({0: {0: other}} if other else {}, self._hi)
        if not isinstance(other, QSeries):
            return NotImplemented
        hi = min(self._hi, other._hi)
        rows = {k: dict(p) for k, p in self._rows.items() if k <= hi}
        for k, p in other._rows.items():
            if k <= hi:
                acc = rows.setdefault(k, {})
                _padd_into(acc, p)
        return QSeries._raw(rows, hi)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw({k: {e: -c for e, c in p.items()} for k, p in self._rows.items()}, self._hi)

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "QSeries":
        if c == 0:
            return QSeries._raw({}, self._hi)
        return QSeries._raw({k: {e: c * v for e, v in p.items()} for k, p in self._rows.items()}, self._hi)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if isinstance(other, ZPolynomial):
            return self.mul_zpoly(other)
        if isinstance(other, Monomial):
            return self.mul_monomial(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        hi = min(self._hi + other._low(), other._hi + self._low())
        rows: dict = {}
        b_items = sorted(other._rows.items())
        for i, p in sorted(self._rows.items()):
            lim = hi - i
            for j, r in b_items:
                if j > lim:
                    break
                acc = rows.get(i + j)
                if acc is None:
                    acc = rows[i + j] = {}
                _pmul_into(acc, p, r)
        return QSeries._raw(rows, hi)

    def __rmul__(self, other):
        if isinstance(other, (int, ZPolynomial, Monomial)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = QSeries.one(HalfExp(self._hi)) if self._lo >= 0 else None
        if out is None:
            raise PreconditionError("powers of series with negative valuation are not supported")
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def mul_zpoly(self, p: ZPolynomial) -> "QSeries":
        """Multiply by a q-free Laurent polynomial in z."""
        t = p._t
        rows = {}
        for k, r in self._rows.items():
            acc: dict = {}
            _pmul_into(acc, r, t)
            rows[k] = acc
        return QSeries._raw(rows, self._hi)

    def mul_monomial(self, m: Monomial) -> "QSeries":
        f, e, c = m.q_steps, m.z_exp, m.coeff
        rows = {k + f: {ze + e: c * v for ze, v in p.items()} for k, p in self._rows.items()}
        return QSeries._raw(rows, self._hi + f)

    def mul_one_minus(self, m: Monomial) -> "QSeries":
        """Multiply by the binomial ``1 - m``."""
        f, e, c = m.q_steps, m.z_exp, m.coeff
        hi = self._hi + min(0, f)
        rows = {k: dict(p) for k, p in self._rows.items()}
        for k, p in self._rows.items():
            if k + f <= hi:
                acc = rows.setdefault(k + f, {})
                _padd_into(acc, p, -c, e)
        return QSeries._raw(rows, hi)

    def div_one_minus(self, m: Monomial) -> "QSeries":
        """Divide by the binomial ``1 - m``.

        Uses the recurrence ``r_k = s_k + m * r_{k-f}`` when ``m`` has positive
        q-order; order-0 binomials are handled only when they are units.
        """
        f, e, c = m.q_steps, m.z_exp, m.coeff
        if f > 0:
            rows: dict = {}
            src = self._rows
            for k in range(self._lo, self._hi + 1):
                acc = dict(src.get(k, ()))
                prev = rows.get(k - f)
                if prev:
                    _padd_into(acc, prev, c, e)
                if acc:
                    rows[k] = acc
            return QSeries._raw(rows, self._hi)
        if f == 0 and e == 0 and c == 2:
            return -self
        return self * invert_unit(QSeries.one(HalfExp(self._hi - self._lo)).mul_one_minus(m))

    def invert_unit(self) -> "QSeries":
        return invert_unit(self)

    def subst_z_inverse(self) -> "QSeries":
        return QSeries._raw({k: {-e: c for e, c in p.items()} for k, p in self._rows.items()}, self._hi)

    def subst_q_square(self) -> "QSeries":
        return QSeries._raw({2 * k: dict(p) for k, p in self._rows.items()}, 2 * self._hi)

    def eval_z_one(self) -> "QSeries":
        rows = {}
        for k, p in self._rows.items():
            v = sum(p.values())
            if v:
                rows[k] = {0: v}
        return QSeries._raw(rows, self._hi)

    def z_slice(self, z_exp: int) -> "QSeries":
        """Coefficient of ``z^z_exp`` as a z-free series."""
        rows = {k: {0: p[z_exp]} for k, p in self._rows.items() if p.get(z_exp)}
        return QSeries._raw(rows, self._hi)


def _term_rows(terms) -> Iterable[tuple[int, dict]]:
    for exp, coef in terms:
        yield _steps(exp), _as_zpoly(coef)._t


def make(terms: Iterable[tuple[ExpLike, object]], trunc_order: ExpLike) -> QSeries:
    """Build a normalized series from ``(q_exponent, z_polynomial)`` pairs.

    Coefficients may be a :class:`ZPolynomial`, an ``int`` (constant in z) or a
    ``{z_exp: coeff}`` mapping.  Repeated exponents are summed.
    """
    hi = _steps(trunc_order)
    rows: dict = {}
    for k, p in _term_rows(terms):
        if k > hi:
            raise InsufficientOrder(f"term q^{_fmt_exp(k)} exceeds truncation order {_fmt_exp(hi)}")
        _padd_into(rows.setdefault(k, {}), p)
    return QSeries._raw(rows, hi)


def add(s: QSeries, t: QSeries) -> QSeries:
    return s + t


def mul(s: QSeries, t: QSeries) -> QSeries:
    return s * t


def mul_monomial(s: QSeries, m: Monomial) -> QSeries:
    return s.mul_monomial(m)


def subst_z_inverse(s: QSeries) -> QSeries:
    return s.subst_z_inverse()


def subst_q_square(s: QSeries) -> QSeries:
    return s.subst_q_square()


def eval_z_one(s: QSeries) -> QSeries:
    return s.eval_z_one()


def invert_unit(s: QSeries) -> QSeries:
    """Multiplicative inverse of a series whose lowest coefficient is ``+-z^e``.

    If ``s`` has valuation ``m`` and is known through ``T``, the inverse has
    valuation ``-m`` and is known through ``T - 2m``.
    """
    if s.is_zero():
        raise NotAUnit("the zero series is not invertible")
    lo, hi = s._lo, s._hi
    unit = ZPolynomial._wrap(s._rows[lo]).unit_exponent()
    if unit is None:
        raise NotAUnit(f"lowest coefficient {ZPolynomial(s._rows[lo])!r} at q^{_fmt_exp(lo)} is not +-z^e")
    sign, e = unit
    # normalise to constant term 1: t = sign * z^-e * q^-lo * s
    tail = []
    for k, p in s._rows.items():
        if k == lo:
            continue
        tail.append((k - lo, {ze - e: sign * c for ze, c in p.items()}))
    tail.sort()
    width = hi - lo
    inv: dict = {0: {0: 1}}
    for k in range(1, width + 1):
        acc: dict = {}
        for j, p in tail:
            if j > k:
                break
            prev = inv.get(k - j)
            if prev:
                _pmul_into(acc, p, prev)
        if acc:
            inv[k] = {ze: -c for ze, c in acc.items()}
    rows = {k - lo: {ze - e: sign * c for ze, c in p.items()} for k, p in inv.items()}
    return QSeries._raw(rows, width - lo)


def equal_up_to(s: QSeries, t: QSeries, order: ExpLike) -> Comparison:
    """Compare two series through ``order``; report the first differing coefficient.

    Mismatches are ordered by q-exponent, then z-exponent.
    """
    o = _steps(order)
    if o > s._hi or o > t._hi:
        raise InsufficientOrder(
            f"order {_fmt_exp(o)} exceeds truncation ({s.trunc_order}, {t.trunc_order})")
    keys = sorted(k for k in set(s._rows) | set(t._rows) if k <= o)
    for k in keys:
        a, b = s._rows.get(k, {}), t._rows.get(k, {})
        if a == b:
            continue
        for ze in sorted(set(a) | set(b)):
            if a.get(ze, 0) != b.get(ze, 0):
                return Comparison(HalfExp(o), Mismatch(HalfExp(k), ze, a.get(ze, 0), b.get(ze, 0)))
    return Comparison(HalfExp(o))
