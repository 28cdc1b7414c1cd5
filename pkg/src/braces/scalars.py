"""Exact coefficient rings: the rationals, the integers and prime fields.

Rationals are :class:`fractions.Fraction` values, normalized to ``int`` when
integral so that the hot loops of the expansion kernel stay on machine-size
integer arithmetic as long as possible.  Residues modulo a prime are
:class:`Mod` instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union


class NonRepresentable(ArithmeticError):
    """A coefficient cannot be mapped to the requested ring."""


class RingError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Mod:
    """Residue class modulo a prime ``p``."""

    __slots__ = ("val", "p")

    def __init__(self, val, p: int):
        if isinstance(val, Mod):
            if val.p != p:
                raise RingError(f"cannot mix residues mod {val.p} and mod {p}")
            val = val.val
        elif isinstance(val, Fraction):
            val = _fraction_mod(val, p)
        object.__setattr__(self, "val", int(val) % p)
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("Mod is immutable")

    def _coerce(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise RingError(f"cannot mix residues mod {self.p} and mod {other.p}")
            return other.val
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return _fraction_mod(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.val + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.val - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.val, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.val * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.val, self.p)

    def __pos__(self):
        return self

    def inverse(self) -> "Mod":
        if self.val == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.p}")
        return Mod(pow(self.val, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * Mod(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o, self.p) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Mod(pow(self.val, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.val == other.val
        if isinstance(other, (int, Fraction)):
            try:
                return self.val == _fraction_mod(Fraction(other), self.p)
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.val, self.p, "mod"))

    def __bool__(self):
        return self.val != 0

    def __repr__(self):
        return f"Mod({self.val}, {self.p})"

    def __str__(self):
        return f"{self.val} (mod {self.p})"


def _fraction_mod(x: Fraction, p: int) -> int:
    if x.denominator % p == 0:
        raise ZeroDivisionError(f"denominator {x.denominator} is not invertible mod {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


@dataclass(frozen=True)
class Ring:
    """Ring tag.  ``kind`` is ``"QQ"``, ``"ZZ"`` or ``"GF"``; ``p`` is set for ``"GF"``."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("QQ", "ZZ", "GF"):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF" and not is_prime(self.p):
            raise RingError(f"modulus {self.p} is not prime")

    def __call__(self, x):
        return convert(x, self)

    def __str__(self):
        return {"QQ": "QQ", "ZZ": "ZZ"}.get(self.kind, f"GF({self.p})")

    @property
    def zero(self):
        return Mod(0, self.p) if self.kind == "GF" else 0

    @property
    def one(self):
        return Mod(1, self.p) if self.kind == "GF" else 1


QQ = Ring("QQ")
ZZ = Ring("ZZ")


def Zmod(p: int) -> Ring:
    return Ring("GF", p)


Scalar = Union[int, Fraction, Mod]


def norm(x):
    """Canonical representative: integral fractions become ints."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def qq(x) -> Scalar:
    """Parse ``x`` as an exact rational (int, Fraction, or string like ``"-3/2"``)."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Fraction, Mod)):
        return norm(x)
    if isinstance(x, str):
        return norm(Fraction(x.strip()))
    if isinstance(x, Rational):
        return norm(Fraction(x.numerator, x.denominator))
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def ring_of(x) -> Ring:
    if isinstance(x, Mod):
        return Zmod(x.p)
    if isinstance(x, Fraction) and x.denominator != 1:
        return QQ
    return ZZ


def convert(x, target: Ring) -> Scalar:
    """Map one coefficient into ``target``; raise :class:`NonRepresentable` when impossible."""
    if target.kind == "GF":
        if isinstance(x, Mod):
            if x.p != target.p:
                raise NonRepresentable(f"no map from GF({x.p}) to GF({target.p})")
            return x
        x = Fraction(x)
        if x.denominator % target.p == 0:
            raise NonRepresentable(
                f"denominator {x.denominator} is divisible by {target.p}")
        return Mod(_fraction_mod(x, target.p), target.p)
    if isinstance(x, Mod):
        raise NonRepresentable(f"no map from GF({x.p}) to {target}")
    x = norm(Fraction(x))
    if target.kind == "ZZ" and isinstance(x, Fraction):
        raise NonRepresentable(f"{x} is not an integer")
    return x


def is_zero(x) -> bool:
    return not x


def to_json(x):
    """JSON form: ``[n, d]`` for rationals, a bare int for integers, ``{"mod", "val"}`` for residues."""
    if isinstance(x, Mod):
        return {"mod": x.p, "val": x.val}
    if isinstance(x, Fraction) and x.denominator != 1:
        return [x.numerator, x.denominator]
    return int(x)


def rational_json(x):
    """Always-``[n, d]`` form used inside series and term lists."""
    if isinstance(x, Mod):
        return {"mod": x.p, "val": x.val}
    x = Fraction(x)
    return [x.numerator, x.denominator]


def from_json(obj) -> Scalar:
    if isinstance(obj, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return Mod(obj["val"], obj["mod"])
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return norm(Fraction(obj[0], obj[1]))
    if isinstance(obj, str):
        return qq(obj)
    raise TypeError(f"not a scalar JSON value: {obj!r}")


def fmt(x) -> str:
    if isinstance(x, Mod):
        return str(x.val)
    return str(norm(x))


def map_scalars(value, target: Ring):
    """Map every coefficient of a series, expression or natural operation into ``target``.

    Plain scalars are mapped directly.  Other values must implement
    ``map_coeffs(fn)``.  Zero images are dropped by the container.
    """
    if isinstance(value, (int, Fraction, Mod)) and not isinstance(value, bool):
        return convert(value, target)
    if hasattr(value, "map_coeffs"):
        return value.map_coeffs(lambda c: convert(c, target))
    raise TypeError(f"cannot map scalars of {type(value).__name__}")
