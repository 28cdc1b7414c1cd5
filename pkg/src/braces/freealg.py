"""The free differential graded algebra ``Fr(x_1, ..., x_n)``.

Monomials are nested tuples:

* a generator is the positive ``int`` ``i``;
* ``("D", child)`` is the square-zero operator applied to ``child`` (never
  directly to another ``("D", ...)``);
* ``("P", c_1, ..., c_m)`` with ``m >= 2`` is a product whose children are
  generators or ``D``-nodes (products are flattened).

In the commutative flavor the children of every product are kept sorted by
:func:`key`.

Signs
-----
Every sign depends only on degrees mod 2, so expressions are evaluated for a
whole batch of parity vectors at once.  A :class:`SignContext` fixes ``W``
parity vectors; the parity of generator ``j`` across the batch is the
``W``-bit mask ``gens[j-1]`` and a sign is a ``W``-bit mask as well (bit ``w``
set means ``-1`` for vector ``w``).  Terms are stored as
``(monomial, mask) -> coefficient`` and folded so that bit 0 of every mask is
clear.  With a single parity vector the mask is always 0 after folding.

A natural operation is stored by its *parity-free* coefficients: the value of
``c * m`` on graded arguments is ``c * refsign(m) * m``, where ``refsign`` is
the Koszul sign of the permutation taking the reference order (all ``D``
symbols in reading order, then the generators by index) to the reading order
of ``m``.  ``D`` counts as odd.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple, Union

from .scalars import norm

D = "D"
P = "P"
ASSOC = "assoc"
COMM = "comm"

Mono = Union[int, tuple]


class FreeAlgebraError(ValueError):
    pass


class ContextMismatch(FreeAlgebraError):
    pass


class ArityMismatch(FreeAlgebraError):
    pass


class InhomogeneousArgument(FreeAlgebraError):
    pass


class InconsistentSigns(FreeAlgebraError):
    """A parity sweep disagrees with the reference-order sign of a monomial."""


# -- monomial structure ---------------------------------------------------------

@lru_cache(maxsize=None)
def key(m: Mono) -> tuple:
    """Total order used for canonical commutative products: generator < D-node < product."""
    if type(m) is int:
        return (0, m)
    if m[0] == D:
        return (1, key(m[1]))
    return (2, tuple(key(c) for c in m[1:]))


@lru_cache(maxsize=None)
def reading(m: Mono) -> tuple:
    """Symbols in reading order: ``-1`` for each ``D``, the label for each generator."""
    if type(m) is int:
        return (m,)
    if m[0] == D:
        return (-1,) + reading(m[1])
    out = ()
    for c in m[1:]:
        out += reading(c)
    return out


@lru_cache(maxsize=None)
def leaves(m: Mono) -> tuple:
    return tuple(s for s in reading(m) if s > 0)


@lru_cache(maxsize=None)
def delta_count(m: Mono) -> int:
    return sum(1 for s in reading(m) if s < 0)


def is_delta(m: Mono) -> bool:
    return type(m) is tuple and m[0] == D


def leaf_set_ok(m: Mono, k: int) -> bool:
    """``m`` contains each of ``1..k`` exactly once."""
    return sorted(leaves(m)) == list(range(1, k + 1))


def delta(m: Mono):
    """``D(m)`` or ``None`` when ``m`` already is a ``D``-node."""
    if is_delta(m):
        return None
    return (D, m)


def prod(children: Sequence[Mono]) -> Mono:
    """Flattened product of monomials (no sorting)."""
    kids = []
    for c in children:
        if type(c) is tuple and c[0] == P:
            kids.extend(c[1:])
        else:
            kids.append(c)
    if len(kids) == 1:
        return kids[0]
    return (P,) + tuple(kids)


@lru_cache(maxsize=None)
def relabel(m: Mono, mapping: tuple) -> Mono:
    """Rename generator ``i`` to ``mapping[i]`` (``mapping[0]`` unused).  No re-sorting."""
    if type(m) is int:
        return mapping[m]
    if m[0] == D:
        return (D, relabel(m[1], mapping))
    return (P,) + tuple(relabel(c, mapping) for c in m[1:])


@lru_cache(maxsize=None)
def shift(m: Mono, by: int) -> Mono:
    """Add ``by`` to every label; order preserving, so canonical forms stay canonical."""
    if by == 0:
        return m
    if type(m) is int:
        return m + by
    if m[0] == D:
        return (D, shift(m[1], by))
    return (P,) + tuple(shift(c, by) for c in m[1:])


def max_label(m: Mono) -> int:
    ls = leaves(m)
    return max(ls) if ls else 0


# -- sign contexts --------------------------------------------------------------

class SignContext(NamedTuple):
    """``W`` parity vectors at once: ``full`` is the all-ones mask, ``gens[j-1]`` the parities of ``x_j``."""

    full: int
    gens: tuple

    @property
    def width(self) -> int:
        return self.full.bit_length()

    @property
    def degs(self) -> tuple:
        """Generator degree masks indexed by label (index 0 unused)."""
        return (0,) + self.gens

    def value_sign(self, mask: int, w: int) -> int:
        return -1 if (mask >> w) & 1 else 1

    def parity_vector(self, w: int) -> tuple:
        return tuple((g >> w) & 1 for g in self.gens)


@lru_cache(maxsize=None)
def even_context(n: int) -> SignContext:
    """All generators even: values are the parity-free coefficients."""
    return SignContext(1, (0,) * n)


@lru_cache(maxsize=None)
def single_context(parities: tuple) -> SignContext:
    return SignContext(1, tuple(1 if p % 2 else 0 for p in parities))


@lru_cache(maxsize=None)
def sweep_context(n: int) -> SignContext:
    """All ``2^n`` parity vectors; vector ``w`` gives ``x_j`` the parity ``bit (j-1)`` of ``w``."""
    width = 1 << n
    gens = []
    for j in range(n):
        mask = 0
        for w in range(width):
            if (w >> j) & 1:
                mask |= 1 << w
        gens.append(mask)
    return SignContext((1 << width) - 1, tuple(gens))


def extend_context(ctx: SignContext, n: int) -> SignContext:
    if len(ctx.gens) >= n:
        return ctx
    if ctx.full == 1 and not any(ctx.gens):
        return even_context(n)
    raise ContextMismatch(f"context covers {len(ctx.gens)} generators, need {n}")


def refsign(m: Mono, degs: Sequence[int]) -> int:
    """Sign mask of the reference-order Koszul sign of ``m``; ``degs[i]`` is the degree mask of generator ``i``."""
    mask = 0
    before = 0
    seen: List[Tuple[int, int]] = []
    for s in reading(m):
        if s < 0:
            mask ^= before
        else:
            d = degs[s]
            if d:
                for t, dt in seen:
                    if t > s:
                        mask ^= d & dt
                before ^= d
            seen.append((s, d))
    return mask


@lru_cache(maxsize=None)
def refsign_ctx(m: Mono, ctx: SignContext) -> int:
    return refsign(m, ctx.degs)


def factor_degree(m: Mono, degs: Sequence[int], full: int) -> int:
    d = full if delta_count(m) & 1 else 0
    for s in leaves(m):
        d ^= degs[s]
    return d


# -- canonical commutative form -------------------------------------------------

def _sort_factors(kids: List[Tuple[Mono, int, object]], degs, full):
    """Sort product children; returns ``(children, mask, factor)`` alternatives."""
    items = [(key(c), c, factor_degree(c, degs, full)) for c, _, _ in kids]
    mask = 0
    n = len(items)
    for i in range(n):
        ki, _, di = items[i]
        for j in range(i + 1, n):
            kj, _, dj = items[j]
            if ki > kj:
                mask ^= di & dj
    order = sorted(range(n), key=lambda i: items[i][0])
    out_children = tuple(items[i][1] for i in order)
    alts = [(out_children, mask, 1)]
    # identical factors x*x vanish when x is odd: split into the even part
    for a, b in zip(order, order[1:]):
        if items[a][0] == items[b][0]:
            d = items[a][2]
            if d == 0:
                continue
            if d == full:
                return []
            new = []
            for ch, mk, f in alts:
                new.append((ch, mk, f * Fraction(1, 2)))
                new.append((ch, mk ^ d, f * Fraction(1, 2)))
            alts = new
    return alts


@lru_cache(maxsize=None)
def canon(m: Mono, degs: tuple, full: int) -> tuple:
    """Canonical commutative form of ``m`` as alternatives ``((mono, mask, factor), ...)``."""
    if type(m) is int:
        return ((m, 0, 1),)
    if m[0] == D:
        out = []
        for c, mk, f in canon(m[1], degs, full):
            if is_delta(c):
                continue
            out.append(((D, c), mk, f))
        return tuple(out)
    child_alts = [canon(c, degs, full) for c in m[1:]]
    out = []
    for combo in iproduct(*child_alts):
        mask = 0
        fac = 1
        flat = []
        for c, mk, f in combo:
            mask ^= mk
            fac *= f
            if type(c) is tuple and c[0] == P:
                flat.extend((x, 0, 1) for x in c[1:])
            else:
                flat.append((c, 0, 1))
        if len(flat) == 1:
            out.append((flat[0][0], mask, fac))
            continue
        for ch, mk, f in _sort_factors(flat, degs, full):
            out.append(((P,) + ch, mask ^ mk, fac * f))
    return tuple(out)


def normalize(m: Mono, flavor: str, ctx: SignContext):
    """Alternatives ``(mono, mask, factor)`` for an arbitrary tree (``D(D(..))`` gives none)."""
    m = _flatten(m)
    if m is None:
        return ()
    if flavor == ASSOC:
        return ((m, 0, 1),)
    return canon(m, ctx.degs, ctx.full)


def _flatten(m):
    if type(m) is int:
        return m
    if m[0] == D:
        c = _flatten(m[1])
        if c is None or is_delta(c):
            return None
        return (D, c)
    kids = []
    for c in m[1:]:
        c = _flatten(c)
        if c is None:
            return None
        kids.append(c)
    return prod(kids)


# -- substitution kernel ---------------------------------------------------------

def _plug(node, args):
    if type(node) is int:
        return args[node]
    if node[0] == D:
        c = _plug(node[1], args)
        if c is None or is_delta(c):
            return None
        return (D, c)
    kids = []
    for ch in node[1:]:
        c = _plug(ch, args)
        if c is None:
            return None
        if type(c) is tuple and c[0] == P:
            kids.extend(c[1:])
        else:
            kids.append(c)
    return (P,) + tuple(kids)


@lru_cache(maxsize=1 << 20)
def graft(flavor: str, body: Mono, args: tuple, ctx: SignContext) -> tuple:
    """Substitute ``args[i-1] = (mono, mask, degmask)`` for generator ``i`` of a multilinear ``body``.

    Returns alternatives ``(mono, mask, factor)``; the mask already includes
    the body's reference-order sign and the argument masks.
    """
    degs = (0,) + tuple(a[2] for a in args)
    mask = refsign(body, degs)
    plugged = _plug(body, (None,) + tuple(a[0] for a in args))
    if plugged is None:
        return ()
    for a in args:
        mask ^= a[1]
    if flavor == ASSOC:
        return ((plugged, mask, 1),)
    return tuple((c, mask ^ mk, f) for c, mk, f in canon(plugged, ctx.degs, ctx.full))


# -- expressions -------------------------------------------------------------------

def _fold(mono, mask, c, full):
    if mask & 1:
        return mono, mask ^ full, -c
    return mono, mask, c


class Expr:
    """Finite combination of monomials with sign masks over a :class:`SignContext`."""

    __slots__ = ("flavor", "ctx", "terms")

    def __init__(self, flavor: str, ctx: SignContext, terms=None):
        if flavor not in (ASSOC, COMM):
            raise FreeAlgebraError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self.ctx = ctx
        self.terms: Dict[Tuple[Mono, int], object] = {}
        if terms:
            for (m, mk), c in terms.items():
                self.add_term(m, mk, c)

    # construction
    @classmethod
    def generator(cls, i: int, flavor: str, ctx: SignContext) -> "Expr":
        return cls(flavor, ctx, {(i, 0): 1})

    @classmethod
    def from_monomial(cls, m: Mono, flavor: str, ctx: SignContext, coeff=1) -> "Expr":
        e = cls(flavor, ctx)
        for mono, mk, f in normalize(m, flavor, ctx):
            e.add_term(mono, mk, coeff * f)
        return e

    def add_term(self, m: Mono, mask: int, c) -> None:
        if not c:
            return
        m, mask, c = _fold(m, mask, c, self.ctx.full)
        k = (m, mask)
        v = self.terms.get(k, 0) + c
        if v:
            self.terms[k] = norm(v)
        else:
            self.terms.pop(k, None)

    def copy(self) -> "Expr":
        e = Expr(self.flavor, self.ctx)
        e.terms = dict(self.terms)
        return e

    def _check(self, other: "Expr"):
        if self.flavor != other.flavor or self.ctx != other.ctx:
            raise ContextMismatch("expressions live in different free algebras")

    def __add__(self, other: "Expr") -> "Expr":
        self._check(other)
        e = self.copy()
        for (m, mk), c in other.terms.items():
            e.add_term(m, mk, c)
        return e

    def __neg__(self) -> "Expr":
        return self.scale(-1)

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def scale(self, c) -> "Expr":
        e = Expr(self.flavor, self.ctx)
        if c:
            e.terms = {k: norm(v * c) for k, v in self.terms.items()}
        return e

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return (self.flavor == other.flavor and self.ctx == other.ctx
                and self.collapsed() == other.collapsed())

    def __hash__(self):
        return hash((self.flavor, frozenset(self.terms.items())))

    def __bool__(self):
        return not self.is_zero()

    def __len__(self):
        return len(self.terms)

    # evaluation per parity vector
    def value_at(self, w: int) -> Dict[Mono, object]:
        """Plain coefficients at parity vector ``w``."""
        out: Dict[Mono, object] = {}
        for (m, mk), c in self.terms.items():
            v = out.get(m, 0) + (-c if (mk >> w) & 1 else c)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out

    def collapsed(self) -> Dict[Mono, Dict[int, object]]:
        """Zero-aware normal form: monomial -> {mask: coeff} with vanishing monomials removed."""
        by: Dict[Mono, Dict[int, object]] = {}
        for (m, mk), c in self.terms.items():
            by.setdefault(m, {})[mk] = c
        out = {}
        for m, d in by.items():
            if len(d) == 1 or not _vanishes(d, self.ctx.width):
                out[m] = d
        return out

    def nonzero_vectors(self) -> List[int]:
        """Parity vectors at which the expression does not vanish."""
        return [w for w in range(self.ctx.width) if self.value_at(w)]

    def is_zero(self) -> bool:
        return not self.collapsed()

    # structure
    def multiply(self, other: "Expr") -> "Expr":
        self._check(other)
        e = Expr(self.flavor, self.ctx)
        for (m1, k1), c1 in self.terms.items():
            for (m2, k2), c2 in other.terms.items():
                for m, mk, f in normalize(prod([m1, m2]), self.flavor, self.ctx):
                    e.add_term(m, k1 ^ k2 ^ mk, c1 * c2 * f)
        return e

    __mul__ = multiply

    def apply_delta(self) -> "Expr":
        e = Expr(self.flavor, self.ctx)
        for (m, mk), c in self.terms.items():
            if not is_delta(m):
                e.add_term((D, m), mk, c)
        return e

    def degree_masks(self) -> set:
        return {factor_degree(m, self.ctx.degs, self.ctx.full) for m, _ in self.terms}

    def total_degree(self) -> int:
        ds = self.degree_masks()
        if len(ds) > 1:
            raise InhomogeneousArgument("expression is not homogeneous in total degree")
        return ds.pop() if ds else 0

    def delta_degrees(self) -> set:
        return {delta_count(m) for m, _ in self.terms}

    def parity_free(self) -> Dict[Mono, object]:
        """Coefficients relative to the reference-order sign; raises if the sweep is inconsistent."""
        out: Dict[Mono, object] = {}
        full = self.ctx.full
        for m, d in self.collapsed().items():
            r = refsign_ctx(m, self.ctx) if self.ctx.gens else 0
            flip = r & 1
            r = r ^ full if flip else r
            total = 0
            for mk, c in d.items():
                if mk == r:
                    total += -c if flip else c
                elif mk ^ r == full:
                    total -= -c if flip else c
                else:
                    raise InconsistentSigns(f"sign pattern of {to_text(m)} is not of reference form")
            if total:
                out[m] = norm(total)
        return out

    def map_coeffs(self, fn) -> "Expr":
        e = Expr(self.flavor, self.ctx)
        for (m, mk), c in self.terms.items():
            e.add_term(m, mk, fn(c))
        return e

    def __repr__(self):
        return f"Expr({self.flavor}, {to_text_terms(self.value_at(0))})"


def _vanishes(d: Dict[int, object], width: int) -> bool:
    for w in range(width):
        s = 0
        for mk, c in d.items():
            s += -c if (mk >> w) & 1 else c
        if s:
            return False
    return True


def realize(terms: Dict[Mono, object], flavor: str, ctx: SignContext) -> Expr:
    """Expression of a parity-free combination evaluated on the generators of ``ctx``."""
    e = Expr(flavor, ctx)
    for m, c in terms.items():
        e.add_term(m, refsign_ctx(m, ctx), c)
    return e


def substitute(body, args: Sequence[Expr]) -> Expr:
    """Replace generator ``i`` of ``body`` by ``args[i-1]`` with reference-order Koszul signs.

    ``body`` is an :class:`Expr` (its own parities are divided out first) or
    any object with ``terms`` holding parity-free coefficients and an
    ``arity``.
    """
    if isinstance(body, Expr):
        flavor = body.flavor
        pf = body.parity_free()
        arity = max((max_label(m) for m in pf), default=0)
    else:
        flavor = body.flavor
        pf = body.terms
        arity = body.arity
    if len(args) < arity or (not isinstance(body, Expr) and len(args) != arity):
        raise ArityMismatch(f"body has arity {arity}, got {len(args)} arguments")
    if not args:
        raise ArityMismatch("no arguments")
    ctx = args[0].ctx
    for a in args:
        if a.flavor != flavor or a.ctx != ctx:
            raise ContextMismatch("arguments live in different free algebras")
    degs = (0,) + tuple(a.total_degree() for a in args)
    arg_terms = [None] + [list(a.terms.items()) for a in args]
    out = Expr(flavor, ctx)
    for m, c in pf.items():
        base = refsign(m, degs)
        labels = leaves(m)
        for choice in iproduct(*(arg_terms[l] for l in labels)):
            mask = base
            coeff = c
            # occurrences are filled in reading order
            it = iter(choice)
            mono = _plug_occurrences(m, it)
            for (am, amk), ac in choice:
                mask ^= amk
                coeff = coeff * ac
            if mono is None:
                continue
            for mm, mk, f in normalize(mono, flavor, ctx):
                out.add_term(mm, mask ^ mk, coeff * f)
    return out


def _plug_occurrences(node, it):
    if type(node) is int:
        return next(it)[0][0]
    if node[0] == D:
        c = _plug_occurrences(node[1], it)
        return None if c is None else (D, c)
    kids = []
    dead = False
    for ch in node[1:]:
        c = _plug_occurrences(ch, it)
        if c is None:
            dead = True
        kids.append(c)
    if dead:
        return None
    return (P,) + tuple(kids)


def expand_derivation(e: Expr) -> Expr:
    """Rewrite ``D`` as a derivation: ``D(c_1...c_m) -> sum (-1)^{|c_1..c_{i-1}|} c_1..D(c_i)..c_m``."""
    out = Expr(e.flavor, e.ctx)
    degs, full = e.ctx.degs, e.ctx.full
    for (m, mk), c in e.terms.items():
        for mono, mk2 in _derive(m, degs, full):
            for mm, mk3, f in normalize(mono, e.flavor, e.ctx):
                out.add_term(mm, mk ^ mk2 ^ mk3, c * f)
    return out


def _derive(m, degs, full):
    """Derivation expansion of a tree: list of ``(mono, mask)`` with ``D`` only on generators."""
    if type(m) is int:
        return [(m, 0)]
    if m[0] == D:
        res = []
        for inner, mk in _derive(m[1], degs, full):
            for mono, mk2 in _apply_derivation(inner, degs, full):
                res.append((mono, mk ^ mk2))
        return res
    parts = [_derive(c, degs, full) for c in m[1:]]
    res = []
    for combo in iproduct(*parts):
        mask = 0
        for _, mk in combo:
            mask ^= mk
        res.append((prod([x for x, _ in combo]), mask))
    return res


def _apply_derivation(m, degs, full):
    if type(m) is int:
        return [((D, m), 0)]
    if m[0] == D:
        return []
    kids = list(m[1:])
    res = []
    passed = 0
    for i, ch in enumerate(kids):
        for inner, mk in _apply_derivation(ch, degs, full):
            res.append((prod(kids[:i] + [inner] + kids[i + 1:]), mk ^ passed))
        passed ^= factor_degree(ch, degs, full)
    return res


# -- rendering and JSON ------------------------------------------------------------

def to_text(m: Mono, names=None) -> str:
    """Plain-text rendering, e.g. ``D(x1)x2``."""
    if type(m) is int:
        return names[m - 1] if names else f"x{m}"
    if m[0] == D:
        return "D(" + to_text(m[1], names) + ")"
    return "".join(to_text(c, names) for c in m[1:])


def to_text_terms(terms: Dict[Mono, object], names=None) -> str:
    if not terms:
        return "0"
    parts = []
    for m in sorted(terms, key=key):
        c = terms[m]
        s = to_text(m, names)
        if c == 1:
            parts.append(f"+ {s}")
        elif c == -1:
            parts.append(f"- {s}")
        elif c < 0:
            parts.append(f"- {-c}*{s}")
        else:
            parts.append(f"+ {c}*{s}")
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


def tree_to_json(m: Mono):
    if type(m) is int:
        return m
    if m[0] == D:
        return {"d": tree_to_json(m[1])}
    return [tree_to_json(c) for c in m[1:]]


def tree_from_json(obj) -> Mono:
    if isinstance(obj, bool):
        raise FreeAlgebraError("booleans are not trees")
    if isinstance(obj, int):
        if obj < 1:
            raise FreeAlgebraError("generator labels start at 1")
        return obj
    if isinstance(obj, dict):
        if set(obj) != {"d"}:
            raise FreeAlgebraError(f"bad tree node {obj!r}")
        c = tree_from_json(obj["d"])
        if is_delta(c):
            raise FreeAlgebraError("D applied to a D-node is zero and cannot be stored")
        return (D, c)
    if isinstance(obj, list):
        if len(obj) < 2:
            raise FreeAlgebraError("a product needs at least two factors")
        kids = [tree_from_json(c) for c in obj]
        if any(type(k) is tuple and k[0] == P for k in kids):
            raise FreeAlgebraError("nested products must be flattened")
        return (P,) + tuple(kids)
    raise FreeAlgebraError(f"bad tree node {obj!r}")
