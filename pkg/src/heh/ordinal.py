"""Ordinals below w^w in Cantor normal form.

An ordinal is kept as a tuple of (exponent, coefficient) pairs meaning
w^e1*c1 + w^e2*c2 + ... with strictly descending natural exponents and
positive integer coefficients; the empty tuple is 0.  The representation
is canonical, so equality is term-tuple equality and the order is plain
tuple comparison.  Coefficients and exponents are ordinary Python ints,
which already gives arbitrary precision.

Arithmetic follows the classical non-commutative rules: `+` absorbs low
terms of the left operand, `-` is left subtraction (the unique x with
b + x == a), `sub_right` is right subtraction (the least x with
x + b == a, partial), `*` is left-distributive multiplication, and
divmod produces the unique (q, r) with a == b*q + r and r < b.

Partial operations raise UndefinedOrdinalOp (or ZeroDivisionError for
division by zero) instead of returning sentinels.  Instances are
immutable and hashable.
"""

from __future__ import annotations

import re
from typing import Tuple

__all__ = ["Ordinal", "UndefinedOrdinalOp", "omega_power", "OMEGA", "ZERO"]


class UndefinedOrdinalOp(ArithmeticError):
    """Raised when a partial ordinal operation has no result."""


Terms = Tuple[Tuple[int, int], ...]

_TERM_RE = re.compile(r"^(?:(?P<nat>\d+)|w(?:\^(?P<exp>\d+))?(?:\*(?P<coeff>\d+))?)$")


class Ordinal:
    """An ordinal below w^w in Cantor normal form."""

    __slots__ = ("terms",)

    terms: Terms

    def __init__(self, value: "int | str | Ordinal" = 0):
        if isinstance(value, Ordinal):
            object.__setattr__(self, "terms", value.terms)
        elif isinstance(value, int) and not isinstance(value, bool):
            if value < 0:
                raise ValueError(f"ordinals cannot be negative: {value}")
            object.__setattr__(self, "terms", ((0, value),) if value else ())
        elif isinstance(value, str):
            object.__setattr__(self, "terms", Ordinal.parse(value).terms)
        else:
            raise TypeError(f"cannot build an ordinal from {value!r}")

    @classmethod
    def _make(cls, terms: Terms) -> "Ordinal":
        self = object.__new__(cls)
        object.__setattr__(self, "terms", terms)
        if __debug__:
            assert all(
                isinstance(e, int) and isinstance(c, int) and e >= 0 and c > 0
                for e, c in terms
            ), terms
            assert all(terms[i][0] > terms[i + 1][0] for i in range(len(terms) - 1)), terms
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Ordinal is immutable")

    # -- classification ------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_natural(self) -> bool:
        """True when the ordinal is below w."""
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    @property
    def is_limit(self) -> bool:
        """True for limit ordinals: non-zero and not a successor."""
        return bool(self.terms) and self.terms[-1][0] != 0

    def natural(self) -> int:
        if not self.is_natural:
            raise UndefinedOrdinalOp(f"{self} is not a natural number")
        return self.terms[0][1] if self.terms else 0

    def limit_part(self) -> "tuple[Ordinal, int]":
        """Split self as l + k with l limit-or-zero and k natural."""
        if self.terms and self.terms[-1][0] == 0:
            return Ordinal._make(self.terms[:-1]), self.terms[-1][1]
        return self, 0

    # -- order ----------------------------------------------------------

    def _cmp_key(self, other) -> "Terms | None":
        if isinstance(other, Ordinal):
            return other.terms
        if isinstance(other, int) and not isinstance(other, bool):
            if other < 0:
                raise ValueError(f"ordinals cannot be negative: {other}")
            return ((0, other),) if other else ()
        return None

    def __eq__(self, other) -> bool:
        key = self._cmp_key(other)
        return NotImplemented if key is None else self.terms == key

    def __lt__(self, other) -> bool:
        key = self._cmp_key(other)
        return NotImplemented if key is None else self.terms < key

    def __le__(self, other) -> bool:
        key = self._cmp_key(other)
        return NotImplemented if key is None else self.terms <= key

    def __gt__(self, other) -> bool:
        key = self._cmp_key(other)
        return NotImplemented if key is None else self.terms > key

    def __ge__(self, other) -> bool:
        key = self._cmp_key(other)
        return NotImplemented if key is None else self.terms >= key

    def __hash__(self) -> int:
        return hash(self.terms)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other) -> "Ordinal":
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        e = other.terms[0][0]
        # terms of self below other's leading exponent are absorbed
        i = len(self.terms)
        while i > 0 and self.terms[i - 1][0] < e:
            i -= 1
        if i > 0 and self.terms[i - 1][0] == e:
            merged = ((e, self.terms[i - 1][1] + other.terms[0][1]),) + other.terms[1:]
            return Ordinal._make(self.terms[: i - 1] + merged)
        return Ordinal._make(self.terms[:i] + other.terms)

    def __radd__(self, other) -> "Ordinal":
        # addition is not commutative: delegate with operands in order
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__add__(self)

    def __sub__(self, other) -> "Ordinal":
        """Left subtraction: the unique x with other + x == self."""
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        if other.terms == self.terms:
            return ZERO
        if other > self:
            raise UndefinedOrdinalOp(f"({self}) - ({other}) is undefined: subtrahend is larger")
        i = 0
        while i < len(other.terms) and other.terms[i] == self.terms[i]:
            i += 1
        if i == len(other.terms):
            return Ordinal._make(self.terms[i:])
        ea, ca = self.terms[i]
        eb, cb = other.terms[i]
        if ea == eb:
            return Ordinal._make(((ea, ca - cb),) + self.terms[i + 1 :])
        return Ordinal._make(self.terms[i:])

    def sub_right(self, other) -> "Ordinal":
        """Right subtraction: the least x with x + other == self (partial)."""
        other = _as_ordinal(other)
        if other is NotImplemented:
            raise TypeError(f"cannot subtract {other!r}")
        a, b = self, other
        if b.terms == a.terms:
            return ZERO
        if b > a:
            raise UndefinedOrdinalOp(f"({a}) -r ({b}) is undefined: subtrahend is larger")
        if not b.terms:
            return a
        # x + b passes x's terms above lead(b) through and may raise b's
        # leading coefficient, so a must end with b's tail exactly.
        k = len(b.terms)
        if k > 1 and a.terms[len(a.terms) - (k - 1) :] != b.terms[1:]:
            raise UndefinedOrdinalOp(f"no x satisfies x + ({b}) = ({a})")
        j = len(a.terms) - k
        eb, cb = b.terms[0]
        if j < 0 or a.terms[j][0] != eb or a.terms[j][1] < cb:
            raise UndefinedOrdinalOp(f"no x satisfies x + ({b}) = ({a})")
        ca = a.terms[j][1]
        if ca == cb:
            return Ordinal._make(a.terms[:j])
        return Ordinal._make(a.terms[:j] + ((eb, ca - cb),))

    def __mul__(self, other) -> "Ordinal":
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return ZERO
        e1, c1 = self.terms[0]
        result = ZERO
        for e, c in other.terms:
            if e == 0:
                part = Ordinal._make(((e1, c1 * c),) + self.terms[1:])
            else:
                part = Ordinal._make(((e1 + e, c),))
            result = result + part
        return result

    def __rmul__(self, other) -> "Ordinal":
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__mul__(self)

    def __divmod__(self, other) -> "tuple[Ordinal, Ordinal]":
        """The unique (q, r) with self == other*q + r and r < other."""
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            raise ZeroDivisionError("ordinal division by zero")
        q, r = self._divmod(other)
        if __debug__:
            assert other * q + r == self and r < other, (self, other, q, r)
        return q, r

    def _divmod(self, b: "Ordinal") -> "tuple[Ordinal, Ordinal]":
        a = self
        if a < b:
            return ZERO, a
        e1, c1 = a.terms[0]
        f1 = b.terms[0][0]
        if e1 > f1:
            # b * w^(e1-f1)*c1 == w^e1*c1, so that leading term divides off
            qt = Ordinal._make(((e1 - f1, c1),))
            q2, r = Ordinal._make(a.terms[1:])._divmod(b)
            return qt + q2, r
        q0 = c1 // b.terms[0][1]
        cand = b * q0
        if cand > a:
            q0 -= 1
            cand = b * q0
        return Ordinal(q0), a - cand

    def __rsub__(self, other) -> "Ordinal":
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__sub__(self)

    def __rdivmod__(self, other):
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__divmod__(self)

    def __floordiv__(self, other) -> "Ordinal":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Ordinal":
        return divmod(self, other)[1]

    def __rfloordiv__(self, other) -> "Ordinal":
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        return divmod(other, self)[0]

    def __rmod__(self, other) -> "Ordinal":
        other = _as_ordinal(other)
        if other is NotImplemented:
            return NotImplemented
        return divmod(other, self)[1]

    # -- text -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
                continue
            text = "w" if e == 1 else f"w^{e}"
            if c != 1:
                text += f"*{c}"
            parts.append(text)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Ordinal({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Ordinal":
        """Parse the rendering produced by str(): `w^2*3 + w*2 + 5`."""
        if text.strip() == "0":
            return ZERO
        result = ZERO
        prev_exp = None
        for chunk in text.split("+"):
            m = _TERM_RE.match(chunk.strip())
            if m is None:
                raise ValueError(f"not an ordinal literal: {text!r}")
            if m.group("nat") is not None:
                exp, coeff = 0, int(m.group("nat"))
            else:
                exp = int(m.group("exp")) if m.group("exp") else 1
                coeff = int(m.group("coeff")) if m.group("coeff") else 1
            if prev_exp is not None and exp >= prev_exp:
                raise ValueError(f"ordinal terms out of order: {text!r}")
            if coeff == 0:
                raise ValueError(f"zero coefficient in ordinal literal: {text!r}")
            prev_exp = exp
            result = result + Ordinal._make(((exp, coeff),))
        return result


def _as_ordinal(x) -> "Ordinal":
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        if x < 0:
            raise ValueError(f"ordinals cannot be negative: {x}")
        return Ordinal(x)
    return NotImplemented


def omega_power(exponent: int, coefficient: int = 1) -> Ordinal:
    """Build w^exponent * coefficient."""
    if exponent < 0 or coefficient < 0:
        raise ValueError("exponent and coefficient must be naturals")
    if coefficient == 0:
        return ZERO
    return Ordinal._make(((exponent, coefficient),))


ZERO = Ordinal(0)
OMEGA = Ordinal._make(((1, 1),))
