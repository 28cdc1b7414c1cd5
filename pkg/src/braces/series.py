"""Truncated generating series of natural automorphisms.

A series is stored as its coefficient prefix ``f_1, ..., f_N``.  In the
associative flavor these are the plain coefficients of
``phi(t) = t + f_2 t^2 + ...``; in the commutative flavor they are the
``f_k`` of ``phi(t) = t + sum f_k t^k / k!``.  Arithmetic always happens on
the analytic coefficients (``f_k`` resp. ``f_k / k!``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple

from . import scalars
from .scalars import norm

ASSOC = "assoc"
COMM = "comm"
FLAVORS = (ASSOC, COMM)
DEFAULT_ORDER = 8


class SeriesError(ValueError):
    pass


class FlavorMismatch(SeriesError):
    pass


class NotUnitNormalized(SeriesError):
    pass


class UnknownName(SeriesError):
    pass


class TruncationTooShort(SeriesError):
    pass


def check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise FlavorMismatch(f"unknown flavor {flavor!r}; expected 'assoc' or 'comm'")
    return flavor


@dataclass(frozen=True)
class PowerSeries:
    flavor: str
    coeffs: Tuple = ()

    def __post_init__(self):
        check_flavor(self.flavor)
        object.__setattr__(self, "coeffs", tuple(norm(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def f(self, k: int):
        """Stored coefficient ``f_k`` (1-based); zero beyond the prefix."""
        if k < 1:
            raise IndexError("coefficients are indexed from 1")
        return self.coeffs[k - 1] if k <= self.order else 0

    def is_unit_normalized(self) -> bool:
        return self.order >= 1 and self.coeffs[0] == 1

    def analytic(self) -> List:
        """Coefficients ``a_0, ..., a_N`` of the actual power series (``a_0 = 0``)."""
        out = [0]
        for k, c in enumerate(self.coeffs, start=1):
            out.append(c if self.flavor == ASSOC else norm(Fraction(c) / factorial(k)))
        return out

    @classmethod
    def from_analytic(cls, flavor: str, a: Sequence) -> "PowerSeries":
        coeffs = []
        for k in range(1, len(a)):
            coeffs.append(a[k] if flavor == ASSOC else a[k] * factorial(k))
        return cls(flavor, tuple(coeffs))

    def truncate(self, n: int) -> "PowerSeries":
        return PowerSeries(self.flavor, self.coeffs[:n])

    def map_coeffs(self, fn) -> "PowerSeries":
        return PowerSeries(self.flavor, tuple(fn(c) for c in self.coeffs))

    def to_json(self) -> dict:
        return {"flavor": self.flavor, "order": self.order,
                "coeffs": [scalars.rational_json(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "PowerSeries":
        coeffs = tuple(scalars.from_json(c) for c in obj["coeffs"])
        if "order" in obj and obj["order"] != len(coeffs):
            raise SeriesError("'order' disagrees with the number of coefficients")
        return cls(obj["flavor"], coeffs)

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs, start=1):
            if c == 0:
                continue
            mono = "t" if k == 1 else f"t^{k}"
            if self.flavor == COMM and k > 1:
                mono += f"/{k}!"
            terms.append(mono if c == 1 else f"({scalars.fmt(c)})*{mono}")
        return " + ".join(terms) or "0"


def _require_unit(*series: PowerSeries) -> None:
    for s in series:
        if not s.is_unit_normalized():
            raise NotUnitNormalized("series must start with t (f_1 = 1)")


def _same_flavor(a: PowerSeries, b: PowerSeries) -> str:
    if a.flavor != b.flavor:
        raise FlavorMismatch(f"flavors differ: {a.flavor} vs {b.flavor}")
    return a.flavor


# -- plain truncated polynomial arithmetic on analytic coefficient lists -----

def poly_mul(a: Sequence, b: Sequence, n: int) -> List:
    """Product truncated to degree ``n`` (lists of length ``n + 1``)."""
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            if y:
                out[i + j] += x * y
    return [norm(c) for c in out]


def poly_powers(a: Sequence, upto: int, n: int) -> List[List]:
    """``[a^0, a^1, ..., a^upto]`` truncated at degree ``n``."""
    one = [1] + [0] * n
    pw = [one]
    for _ in range(upto):
        pw.append(poly_mul(pw[-1], a, n))
    return pw


def poly_reciprocal(a: Sequence, n: int) -> List:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    inv0 = Fraction(1) / a[0]
    out = [norm(inv0)]
    for k in range(1, n + 1):
        s = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out.append(norm(-s * inv0))
    return out


def poly_sqrt(u: Sequence, n: int) -> List:
    """Square root of a series with constant term 1 via Newton's iteration ``s <- (s + u/s)/2``."""
    if u[0] != 1:
        raise SeriesError("square root needs constant term 1")
    u = list(u[: n + 1]) + [0] * max(0, n + 1 - len(u))
    s = [1] + [0] * n
    prec = 1
    while prec <= n:
        q = poly_mul(u, poly_reciprocal(s, n), n)
        s = [norm(Fraction(x + y) / 2) for x, y in zip(s, q)]
        prec *= 2
    return s


def _compose_analytic(outer: Sequence, inner: Sequence, n: int) -> List:
    pw = poly_powers(inner, n, n)
    out = [0] * (n + 1)
    for j in range(1, min(n, len(outer) - 1) + 1):
        if outer[j] == 0:
            continue
        for d in range(n + 1):
            out[d] += outer[j] * pw[j][d]
    return [norm(c) for c in out]


def compose(psi: PowerSeries, phi: PowerSeries) -> PowerSeries:
    """``psi(phi(t))`` to the smaller truncation order."""
    flavor = _same_flavor(psi, phi)
    _require_unit(psi, phi)
    n = min(psi.order, phi.order)
    return PowerSeries.from_analytic(
        flavor, _compose_analytic(psi.analytic()[: n + 1], phi.analytic()[: n + 1], n))


def compositional_inverse(phi: PowerSeries) -> PowerSeries:
    """Solve ``g(phi(t)) = t`` coefficient by coefficient."""
    _require_unit(phi)
    n = phi.order
    pw = poly_powers(phi.analytic(), n, n)
    g = [0, 1] + [0] * (n - 1)
    for m in range(2, n + 1):
        g[m] = norm(-sum(g[j] * pw[j][m] for j in range(1, m)))
    return PowerSeries.from_analytic(phi.flavor, g)


def reflect(phi: PowerSeries) -> PowerSeries:
    """``-phi(-t)``."""
    a = phi.analytic()
    return PowerSeries.from_analytic(
        phi.flavor, [c if k % 2 else -c for k, c in enumerate(a)])


@dataclass(frozen=True)
class CoeffGrid:
    """``c_{r,s}`` (assoc, keyed by pairs) or ``c_r`` (comm, keyed by ints)."""

    flavor: str
    bound: int
    values: Dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values.get(key, 0)

    def nonzero(self) -> Dict:
        return {k: v for k, v in self.values.items() if v != 0}

    def to_json(self) -> dict:
        if self.flavor == ASSOC:
            entries = [{"r": r, "s": s, "c": scalars.rational_json(v)}
                       for (r, s), v in sorted(self.values.items())]
        else:
            entries = [{"r": r, "c": scalars.rational_json(v)}
                       for r, v in sorted(self.values.items())]
        return {"flavor": self.flavor, "bound": self.bound, "entries": entries}


def nc_taylor_coeffs(phi: PowerSeries, bound: int) -> CoeffGrid:
    """``c_{r,s}`` for ``r + s <= bound``.

    ``c_{r,s} = sum_{k,l} g_{k+l+1} [t^r] phi^k [t^s] phi^l`` where ``g`` are
    the coefficients of the inverse series (with ``g_1 = 1``) and the
    coefficient of ``t^r`` in ``phi^k`` is the sum over compositions of ``r``
    into ``k`` parts.
    """
    if phi.flavor != ASSOC:
        raise FlavorMismatch("c_{r,s} are defined for the associative flavor")
    _require_unit(phi)
    if bound + 1 > phi.order:
        raise TruncationTooShort(f"bound {bound} needs a series of order >= {bound + 1}")
    g = compositional_inverse(phi).analytic()
    pw = poly_powers(phi.analytic(), bound, bound)
    values = {}
    for r in range(bound + 1):
        for s in range(bound + 1 - r):
            total = 0
            for k in range(r + 1):
                pk = pw[k][r]
                if pk == 0:
                    continue
                for l in range(s + 1):
                    ql = pw[l][s]
                    if ql:
                        total += g[k + l + 1] * pk * ql
            values[(r, s)] = norm(total)
    return CoeffGrid(ASSOC, bound, values)


def comm_coeffs(phi: PowerSeries, bound: int) -> CoeffGrid:
    """``c_r = r! [t^r] psi'(phi(t))`` for ``r <= bound``."""
    if phi.flavor != COMM:
        raise FlavorMismatch("c_r are defined for the commutative flavor")
    _require_unit(phi)
    if bound + 1 > phi.order:
        raise TruncationTooShort(f"bound {bound} needs a series of order >= {bound + 1}")
    b = compositional_inverse(phi).analytic()
    dpsi = [j * b[j] for j in range(1, bound + 2)]  # coefficients of psi'
    pw = poly_powers(phi.analytic()[: bound + 1], bound, bound)
    values = {}
    for r in range(bound + 1):
        total = sum(dpsi[j] * pw[j][r] for j in range(r + 1))
        values[r] = norm(total * factorial(r))
    return CoeffGrid(COMM, bound, values)


# -- catalog ------------------------------------------------------------------

def _assoc(a):
    return PowerSeries.from_analytic(ASSOC, a)


def _comm(a):
    return PowerSeries.from_analytic(COMM, a)


def _sqrt_linear(c: int, n: int) -> List:
    """Analytic coefficients of ``sqrt(1 + c t)``."""
    return poly_sqrt([1, c] + [0] * (n - 1), n)


def _catalan(n):
    s = _sqrt_linear(-4, n)
    return _assoc([0] + [norm(Fraction(-x) / 2) for x in s[1:]])


def _sqrt_plus(n):
    s = _sqrt_linear(4, n)
    return _assoc([0] + [norm(Fraction(x) / 2) for x in s[1:]])


def _sqrt_2t(n):
    s = _sqrt_linear(2, n)
    return _comm([0] + list(s[1:]))


def _poly(flavor, coeffs, n):
    a = [0] * (n + 1)
    for k, c in coeffs.items():
        if k <= n:
            a[k] = c
    return PowerSeries.from_analytic(flavor, a)


_CATALOG = {
    "geometric": lambda n: PowerSeries(ASSOC, (1,) * n),
    "geometric_alt": lambda n: PowerSeries(ASSOC, tuple((-1) ** (k - 1) for k in range(1, n + 1))),
    "catalan": _catalan,
    "t_minus_t2": lambda n: _poly(ASSOC, {1: 1, 2: -1}, n),
    "t_plus_t2": lambda n: _poly(ASSOC, {1: 1, 2: 1}, n),
    "sqrt_plus": _sqrt_plus,
    "exp_minus_one": lambda n: PowerSeries(COMM, (1,) * n),
    "log1p": lambda n: PowerSeries(COMM, tuple((-1) ** (k - 1) * factorial(k - 1)
                                               for k in range(1, n + 1))),
    "t_plus_half_t2": lambda n: PowerSeries(COMM, tuple(1 if k <= 2 else 0
                                                        for k in range(1, n + 1))),
    "sqrt_2t": _sqrt_2t,
}

CATALOG_NAMES = tuple(_CATALOG) + ("identity", "truncated_geometric(n)")

# Series whose twist gives each named brace family.
FAMILY_SERIES = {
    "borjeson": "geometric",
    "koszul": "exp_minus_one",
    "nonrecursive": "catalan",
    "hereditary_nonrecursive": "t_plus_t2",
    "exotic_hereditary": "t_plus_half_t2",
    "trivial": "identity",
}

_TRUNC = re.compile(r"^truncated_geometric[(:]\s*(\d+)\s*\)?$")


def named(name: str, order: int = DEFAULT_ORDER, flavor: str = ASSOC) -> PowerSeries:
    """Catalog series by name.  ``flavor`` only matters for ``identity``."""
    if order < 1:
        raise SeriesError("order must be at least 1")
    name = name.strip()
    if name == "identity":
        return PowerSeries(check_flavor(flavor), (1,) + (0,) * (order - 1))
    m = _TRUNC.match(name)
    if m:
        top = int(m.group(1))
        return PowerSeries(ASSOC, tuple(1 if k <= top else 0 for k in range(1, order + 1)))
    if name not in _CATALOG:
        raise UnknownName(f"unknown series {name!r}; known: {', '.join(CATALOG_NAMES)}")
    return _CATALOG[name](order)


def catalan_number_oracle(k: int) -> int:
    """``alpha_k = binom(2k-2, k)/(k-1)`` for ``k >= 2``, ``alpha_1 = 1``."""
    if k == 1:
        return 1
    return comb(2 * k - 2, k) // (k - 1)


def parse_series(text: str, flavor: str = ASSOC, order: int = DEFAULT_ORDER) -> PowerSeries:
    """A catalog name or a comma-separated list ``f_1,f_2,...`` of exact coefficients."""
    text = text.strip()
    if "," in text or re.fullmatch(r"-?\d+(/\d+)?", text):
        coeffs = tuple(scalars.qq(c) for c in text.split(","))
        return PowerSeries(check_flavor(flavor), coeffs + (0,) * max(0, order - len(coeffs)))
    return named(text, order, flavor)
