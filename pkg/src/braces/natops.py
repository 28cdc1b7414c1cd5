"""Natural operations ``Nat(k)``: multilinear elements of the free algebra.

A :class:`NatOp` stores parity-free coefficients (see :mod:`braces.freealg`).
Composition is computed by grafting monomials with the sign kernel of
:mod:`braces.freealg`, so every sign follows from the single reference-order
rule plus the Koszul contract for operations passing arguments.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import freealg as fa
from . import scalars
from .freealg import ASSOC, COMM, D, P, Expr, SignContext
from .scalars import norm


class NatOpError(ValueError):
    pass


class ArityTooSmall(NatOpError):
    pass


class SlotOutOfRange(NatOpError):
    pass


class FlavorMismatch(NatOpError):
    pass


class NotMultilinear(NatOpError):
    pass


class DegreeMismatch(NatOpError):
    pass


class NatOp:
    """A natural operation of fixed arity and ``D``-degree."""

    __slots__ = ("flavor", "arity", "degree", "terms", "_hash")

    def __init__(self, flavor: str, arity: int, terms: Dict = None, degree: Optional[int] = None,
                 check: bool = True):
        if flavor not in (ASSOC, COMM):
            raise FlavorMismatch(f"unknown flavor {flavor!r}")
        if arity < 1:
            raise ArityTooSmall("arity must be at least 1")
        self.flavor = flavor
        self.arity = arity
        clean = {}
        for m, c in (terms or {}).items():
            if c:
                clean[m] = norm(c)
        degs = {fa.delta_count(m) for m in clean}
        if len(degs) > 1:
            raise DegreeMismatch(f"inhomogeneous D-degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise DegreeMismatch(f"declared degree {degree}, terms have degree {d}")
            degree = d
        self.degree = degree if degree is not None else 0
        if check:
            for m in clean:
                if not fa.leaf_set_ok(m, arity):
                    raise NotMultilinear(f"{fa.to_text(m)} is not multilinear in x1..x{arity}")
                if flavor == COMM and _canonical_even(m) != (m, 1):
                    raise NatOpError(f"{fa.to_text(m)} is not in canonical commutative form")
        self.terms = clean
        self._hash = None

    # -- constructors -----------------------------------------------------------
    @classmethod
    def from_trees(cls, flavor: str, arity: int, items: Iterable[Tuple], degree: Optional[int] = None) -> "NatOp":
        """Build from ``(tree, coeff)`` pairs in any child order; parity-free signs are applied."""
        ctx = fa.even_context(arity)
        e = Expr(flavor, ctx)
        for tree, c in items:
            for m, mk, f in fa.normalize(tree, flavor, ctx):
                e.add_term(m, mk, c * f)
        return cls.from_expr(e, arity, degree)

    @classmethod
    def from_expr(cls, e: Expr, arity: int, degree: Optional[int] = None) -> "NatOp":
        return cls(e.flavor, arity, e.parity_free(), degree)

    @classmethod
    def zero(cls, flavor: str, arity: int, degree: int = 0) -> "NatOp":
        return cls(flavor, arity, {}, degree)

    # -- linear structure ---------------------------------------------------------
    def _compatible(self, other: "NatOp"):
        if self.flavor != other.flavor:
            raise FlavorMismatch("flavors differ")
        if self.arity != other.arity:
            raise NatOpError(f"arities differ: {self.arity} vs {other.arity}")
        if self.terms and other.terms and self.degree != other.degree:
            raise DegreeMismatch("cannot add operations of different D-degree")

    def __add__(self, other: "NatOp") -> "NatOp":
        self._compatible(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        deg = self.degree if self.terms else other.degree
        return NatOp(self.flavor, self.arity, t, deg, check=False)

    def __neg__(self) -> "NatOp":
        return self.scale(-1)

    def __sub__(self, other: "NatOp") -> "NatOp":
        return self + (-other)

    def scale(self, c) -> "NatOp":
        return NatOp(self.flavor, self.arity, {m: v * c for m, v in self.terms.items()},
                     self.degree, check=False)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, NatOp):
            return NotImplemented
        return (self.flavor == other.flavor and self.arity == other.arity
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.flavor, self.arity, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, tree) -> object:
        """Parity-free coefficient of a monomial given in any child order."""
        alts = fa.normalize(tree, self.flavor, fa.even_context(self.arity))
        total = 0
        for m, mk, f in alts:
            total += (-1 if mk & 1 else 1) * f * self.terms.get(m, 0)
        return norm(total)

    def map_coeffs(self, fn) -> "NatOp":
        return NatOp(self.flavor, self.arity, {m: fn(c) for m, c in self.terms.items()},
                     self.degree, check=False)

    def sorted_terms(self) -> List[Tuple]:
        return sorted(self.terms.items(), key=lambda mc: fa.key(mc[0]))

    def to_expr(self, ctx: SignContext) -> Expr:
        return fa.realize(self.terms, self.flavor, fa.extend_context(ctx, self.arity))

    def relabel(self, perm: Sequence[int]) -> "NatOp":
        """Rename ``x_i`` to ``x_{perm[i-1]}`` (parity-free re-sorting in the commutative flavor)."""
        mapping = (0,) + tuple(perm)
        items = [(fa.relabel(m, mapping), c) for m, c in self.terms.items()]
        if self.flavor == ASSOC:
            return NatOp(ASSOC, self.arity, dict(items), self.degree)
        return NatOp.from_trees(COMM, self.arity, items, self.degree)

    # -- serialization ---------------------------------------------------------------
    def to_json(self) -> dict:
        return {"flavor": self.flavor, "arity": self.arity, "degree": self.degree,
                "terms": [{"coeff": scalars.rational_json(c), "tree": fa.tree_to_json(m)}
                          for m, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, obj: dict) -> "NatOp":
        items = [(fa.tree_from_json(t["tree"]), scalars.from_json(t["coeff"])) for t in obj["terms"]]
        op = cls.from_trees(obj["flavor"], obj["arity"], items, obj.get("degree"))
        return op

    def __str__(self):
        return fa.to_text_terms(self.terms)

    def __repr__(self):
        return f"NatOp({self.flavor}, k={self.arity}, d={self.degree}: {self})"


@lru_cache(maxsize=None)
def _canonical_even(m):
    alts = fa.canon(m, (0,) * (fa.max_label(m) + 1), 1)
    if len(alts) != 1:
        return None
    mono, mk, f = alts[0]
    return mono, (-1 if mk & 1 else 1) * f


# -- elementary operations ------------------------------------------------------------

def mu(k: int, flavor: str = ASSOC) -> NatOp:
    """Iterated multiplication ``x_1 x_2 ... x_k`` (the identity for ``k = 1``)."""
    return NatOp(flavor, k, {fa.prod(list(range(1, k + 1))): 1})


def identity(flavor: str = ASSOC) -> NatOp:
    return NatOp(flavor, 1, {1: 1})


def delta_op(flavor: str = ASSOC) -> NatOp:
    return NatOp(flavor, 1, {(D, 1): 1})


# -- the grafting kernel ----------------------------------------------------------------

@lru_cache(maxsize=1 << 18)
def block_mono(m, labels: tuple, ctx: SignContext):
    """``m`` with ``x_i`` renamed to ``labels[i-1]`` (increasing): ``(mono, sign mask, degree mask)``."""
    mono = fa.relabel(m, (0,) + labels)
    return mono, fa.refsign_ctx(mono, ctx), fa.factor_degree(mono, ctx.degs, ctx.full)


def block(op: NatOp, labels: Sequence[int], ctx: SignContext) -> List[Tuple]:
    """Alternatives ``(mono, mask, degmask, coeff)`` of ``op`` evaluated on the generators ``labels``."""
    labels = tuple(labels)
    return [block_mono(m, labels, ctx) + (c,) for m, c in op.terms.items()]


def leaf_block(label: int, ctx: SignContext) -> List[Tuple]:
    return [(label, 0, ctx.degs[label], 1)]


def expr_block(e: Expr) -> List[Tuple]:
    """Turn a homogeneous expression into block alternatives."""
    degs, full = e.ctx.degs, e.ctx.full
    return [(m, mk, fa.factor_degree(m, degs, full), c) for (m, mk), c in e.terms.items()]


def plug(out: Expr, outer: NatOp, slots: Sequence[List[Tuple]], mask: int = 0, scale=1) -> None:
    """Add ``scale * sign(mask) * outer(slots...)`` to ``out`` (in place)."""
    if len(slots) != outer.arity:
        raise fa.ArityMismatch(f"operation of arity {outer.arity} got {len(slots)} inputs")
    flavor, ctx = out.flavor, out.ctx
    graft = fa.graft
    add = out.add_term
    outer_items = list(outer.terms.items())
    for choice in itertools.product(*slots):
        args = tuple((a[0], a[1], a[2]) for a in choice)
        coeff = scale
        for a in choice:
            coeff = coeff * a[3]
        for m, c in outer_items:
            for mono, mk, f in graft(flavor, m, args, ctx):
                add(mono, mk ^ mask, c * coeff * f)


def passing_mask(labels: Iterable[int], ctx: SignContext) -> int:
    mask = 0
    for j in labels:
        mask ^= ctx.degs[j]
    return mask


def compose_at_expr(outer: NatOp, slot: int, inner: NatOp, ctx: SignContext, out: Expr = None,
                    scale=1) -> Expr:
    """``outer(id^{slot-1} (x) inner (x) id^{...})`` on generators ``1..n`` of ``ctx``."""
    if outer.flavor != inner.flavor:
        raise FlavorMismatch("flavors differ")
    if not 1 <= slot <= outer.arity:
        raise SlotOutOfRange(f"slot {slot} not in 1..{outer.arity}")
    l = inner.arity
    n = outer.arity + l - 1
    ctx = fa.extend_context(ctx, n)
    if out is None:
        out = Expr(outer.flavor, ctx)
    slots = []
    for j in range(1, outer.arity + 1):
        if j < slot:
            slots.append(leaf_block(j, ctx))
        elif j == slot:
            slots.append(block(inner, range(slot, slot + l), ctx))
        else:
            slots.append(leaf_block(j + l - 1, ctx))
    mask = passing_mask(range(1, slot), ctx) if inner.degree & 1 else 0
    plug(out, outer, slots, mask, scale)
    return out


def compose_at(outer: NatOp, slot: int, inner: NatOp, sweep_check: bool = False) -> NatOp:
    """``outer`` with ``inner`` grafted into input ``slot``.

    Evaluated on formal arguments, the inner operation passing ``a_1..a_{slot-1}``
    contributes ``(-1)^{|inner| (|a_1| + ... + |a_{slot-1}|)}``.  With
    ``sweep_check`` the composite is recomputed over all parity vectors and
    checked to be of reference form.
    """
    n = outer.arity + inner.arity - 1
    e = compose_at_expr(outer, slot, inner, fa.even_context(n))
    res = NatOp.from_expr(e, n, outer.degree + inner.degree)
    if sweep_check:
        sw = compose_at_expr(outer, slot, inner, fa.sweep_context(n))
        if NatOp.from_expr(sw, n, res.degree) != res:
            raise fa.InconsistentSigns("parity sweep disagrees with the parity-free composite")
    return res


def differential(beta: NatOp) -> NatOp:
    """``delta(beta) = D beta - (-1)^{|beta|} sum_i beta o_i D``."""
    k = beta.arity
    ctx = fa.even_context(k)
    e = Expr(beta.flavor, ctx)
    d = delta_op(beta.flavor)
    compose_at_expr(d, 1, beta, ctx, e)
    sign = 1 if beta.degree % 2 else -1
    for i in range(1, k + 1):
        compose_at_expr(beta, i, d, ctx, e, scale=sign)
    return NatOp.from_expr(e, k, beta.degree + 1)


def homotopy(beta: NatOp) -> NatOp:
    """Remove the root ``D`` of each monomial; monomials without one go to 0."""
    if beta.arity < 2:
        raise ArityTooSmall("the contracting homotopy needs arity >= 2")
    t = {m[1]: c for m, c in beta.terms.items() if fa.is_delta(m)}
    return NatOp(beta.flavor, beta.arity, t, max(beta.degree - 1, 0), check=False)


# -- tree bases -------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _compositions(n: int, parts_min: int = 2) -> tuple:
    out = []

    def rec(rest, acc):
        if rest == 0:
            if len(acc) >= parts_min:
                out.append(tuple(acc))
            return
        for p in range(1, rest + 1):
            rec(rest - p, acc + [p])
    rec(n, [])
    return tuple(out)


@lru_cache(maxsize=None)
def _units(n: int) -> tuple:
    """Identity-labeled monomials on ``n`` leaves whose root is not a ``D``."""
    if n == 1:
        return (1,)
    out = []
    for comp in _compositions(n):
        choices = []
        off = 0
        for p in comp:
            choices.append([fa.shift(c, off) for c in _children(p)])
            off += p
        for kids in itertools.product(*choices):
            out.append((P,) + kids)
    return tuple(out)


@lru_cache(maxsize=None)
def _children(n: int) -> tuple:
    base = ((1,) if n == 1 else ())
    return base + tuple((D, u) for u in _units(n))


@lru_cache(maxsize=None)
def shapes(n: int) -> tuple:
    """All planar decorated trees on ``n`` leaves, labeled ``1..n`` in reading order."""
    return _units(n) + tuple((D, u) for u in _units(n))


@lru_cache(maxsize=None)
def shape_counts(n: int) -> tuple:
    """Number of identity-labeled planar trees by ``D``-degree."""
    top = 2 * n - 1
    counts = [0] * (top + 1)
    for s in shapes(n):
        counts[fa.delta_count(s)] += 1
    while len(counts) > 1 and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


def _ukey(m):
    if type(m) is int:
        return (0,)
    if m[0] == D:
        return (1, _ukey(m[1]))
    return (2, tuple(sorted(_ukey(c) for c in m[1:])))


def _uorder(m) -> list:
    if type(m) is int:
        return [m]
    if m[0] == D:
        return _uorder(m[1])
    out = []
    for c in sorted(m[1:], key=_ukey):
        out.extend(_uorder(c))
    return out


@lru_cache(maxsize=None)
def orbit_rep(m) -> Tuple[object, int]:
    """Representative of the symmetric-group orbit of a commutative monomial and the sign with ``O(m) = sign * O(rep)``."""
    order = _uorder(m)
    k = len(order)
    mapping = [0] * (k + 1)
    for new, old in enumerate(order, start=1):
        mapping[old] = new
    mono = fa.relabel(m, tuple(mapping))
    rep, sign = _canonical_even(mono)
    return rep, sign


@lru_cache(maxsize=None)
def is_degenerate(rep) -> bool:
    """Whether the orbit sum of ``rep`` vanishes (an automorphism acts by ``-1``)."""
    k = fa.max_label(rep)
    total = 0
    for perm in itertools.permutations(range(1, k + 1)):
        mono = fa.relabel(rep, (0,) + perm)
        r = _canonical_even(mono)
        if r[0] == rep:
            total += r[1]
    return total == 0


@lru_cache(maxsize=None)
def _comm_trees(k: int) -> tuple:
    reps = {orbit_rep(_canonical_even(s)[0])[0] for s in shapes(k)}
    return tuple(sorted(reps, key=fa.key))


@lru_cache(maxsize=None)
def _shapes_of_degree(k: int, d: int) -> tuple:
    return tuple(s for s in shapes(k) if fa.delta_count(s) == d)


@lru_cache(maxsize=None)
def _assoc_monos(k: int, d: int, labels: str) -> tuple:
    pool = _shapes_of_degree(k, d)
    if labels == "identity":
        return tuple(sorted(pool, key=fa.key))
    out = []
    for perm in itertools.permutations(range(1, k + 1)):
        mapping = (0,) + perm
        out.extend(fa.relabel(s, mapping) for s in pool)
    return tuple(sorted(out, key=fa.key))


def basis_monomials(flavor: str, k: int, d: int, labels: str = "all") -> List:
    if k < 1 or d < 0:
        return []
    if flavor == ASSOC:
        return list(_assoc_monos(k, d, labels))
    if flavor == COMM:
        return [m for m in _comm_trees(k) if fa.delta_count(m) == d]
    raise FlavorMismatch(f"unknown flavor {flavor!r}")


def basis(flavor: str, k: int, d: int, labels: str = "all") -> List[NatOp]:
    """Tree basis of ``Nat(k)^d``.

    Associative: labeled planar trees.  Commutative: one labeled
    representative per abstract tree (leaf labels modulo automorphisms).
    ``labels="identity"`` restricts the associative basis to trees read
    ``x_1 ... x_k``.
    """
    return [NatOp(flavor, k, {m: 1}, d, check=False) for m in basis_monomials(flavor, k, d, labels)]


def dims(flavor: str, k: int, labels: str = "all") -> tuple:
    """Dimensions of ``Nat(k)^d`` for ``d = 0..2k-1``."""
    if flavor == ASSOC:
        mult = 1 if labels == "identity" else factorial(k)
        return tuple(c * mult for c in shape_counts(k))
    counts = [0] * (2 * k)
    for m in _comm_trees(k):
        counts[fa.delta_count(m)] += 1
    return tuple(counts)


def euler_characteristic(flavor: str, k: int, labels: str = "all") -> int:
    return sum((-1) ** d * n for d, n in enumerate(dims(flavor, k, labels)))


def operation_dims(k: int) -> tuple:
    """Commutative: dimensions of the nonvanishing symmetrized operations by degree."""
    counts = [0] * (2 * k)
    for m in _comm_trees(k):
        if not is_degenerate(m):
            counts[fa.delta_count(m)] += 1
    return tuple(counts)


# -- the complex in the tree basis -----------------------------------------------------------

class NatComplex:
    """``(Nat(k), delta)`` with the contracting homotopy, as sparse matrices in the tree basis.

    Commutative flavor: a nondegenerate tree stands for its orbit sum and
    ``delta`` is the true differential on orbit sums.  Degenerate trees
    (vanishing orbit sums) form the complementary summand where ``delta``
    inserts a root ``D``.
    """

    def __init__(self, flavor: str, k: int, labels: str = "all"):
        self.flavor = flavor
        self.k = k
        self.labels = labels
        self.top = 2 * k - 1
        self.basis = {d: basis_monomials(flavor, k, d, labels) for d in range(self.top + 1)}
        self.index = {d: {m: i for i, m in enumerate(ms)} for d, ms in self.basis.items()}

    def dims(self) -> tuple:
        return tuple(len(self.basis[d]) for d in range(self.top + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.dims()))

    def delta_column(self, m) -> Dict:
        """Image of basis element ``m`` as ``{basis monomial: coeff}`` in degree ``d + 1``."""
        if self.flavor == ASSOC:
            return dict(differential(NatOp(ASSOC, self.k, {m: 1}, check=False)).terms)
        if is_degenerate(m):
            return {} if fa.is_delta(m) else {(D, m): 1}
        img = differential(NatOp(COMM, self.k, {m: 1}, check=False))
        out: Dict = {}
        for mono, c in img.terms.items():
            rep, s = orbit_rep(mono)
            if is_degenerate(rep):
                continue
            out[rep] = out.get(rep, 0) + c * s
        return {r: norm(c) for r, c in out.items() if c}

    def h_column(self, m) -> Dict:
        if self.k < 2:
            raise ArityTooSmall("the contracting homotopy needs arity >= 2")
        return {m[1]: 1} if fa.is_delta(m) else {}

    @staticmethod
    def _apply(col_fn, vec: Dict) -> Dict:
        out: Dict = {}
        for m, c in vec.items():
            for r, v in col_fn(m).items():
                out[r] = out.get(r, 0) + c * v
        return {r: norm(v) for r, v in out.items() if v}

    def check_d_squared(self) -> bool:
        for d in range(self.top + 1):
            for m in self.basis[d]:
                if self._apply(self.delta_column, self.delta_column(m)):
                    return False
        return True

    def check_homotopy(self) -> bool:
        """``h delta + delta h = id`` on every basis element."""
        for d in range(self.top + 1):
            for m in self.basis[d]:
                lhs = self._apply(self.h_column, self.delta_column(m))
                for r, v in self._apply(self.delta_column, self.h_column(m)).items():
                    lhs[r] = lhs.get(r, 0) + v
                lhs = {r: v for r, v in lhs.items() if v}
                if lhs != {m: 1}:
                    return False
        return True

    def delta_rank(self, d: int) -> int:
        rows = [self.delta_column(m) for m in self.basis[d]]
        return rank(rows)

    def is_delta_injective(self, d: int) -> bool:
        return self.delta_rank(d) == len(self.basis[d])


def rank(rows: List[Dict]) -> int:
    """Rank of sparse rows over the rationals (fraction-exact Gaussian elimination)."""
    pivots: Dict = {}
    r = 0
    for row in rows:
        v = {k: Fraction(c) for k, c in row.items() if c}
        while v:
            col = min(v, key=fa.key)
            if col in pivots:
                prow = pivots[col]
                f = v[col] / prow[col]
                for k2, c2 in prow.items():
                    nv = v.get(k2, 0) - f * c2
                    if nv:
                        v[k2] = nv
                    else:
                        v.pop(k2, None)
            else:
                pivots[col] = v
                r += 1
                break
    return r
