"""Coalgebra endomorphisms as component families, twisting and untwisting.

An :class:`Endo` ``phi = (phi_1, phi_2, ...)`` has degree-0 components; a
:class:`BraceFamily` ``m = (m_1, m_2, ...)`` collects the components of a
coderivation.  Associative components act on the tensor coalgebra (blocks
of consecutive arguments), commutative ones on the symmetric coalgebra
(unordered blocks with Koszul signs).
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

from . import freealg as fa
from . import natops as no
from . import series as sr
from .freealg import ASSOC, COMM, Expr, SignContext
from .natops import NatOp
from .scalars import norm


class EndoError(ValueError):
    pass


class NotInvertible(EndoError):
    pass


class NotCoclosed(EndoError):
    """The input does not satisfy the master identity at some arity."""


class DegreeViolation(EndoError):
    pass


class FlavorMismatch(EndoError):
    pass


class _Components:
    kind = "components"

    def __init__(self, flavor: str, comps: Sequence[NatOp]):
        if not comps:
            raise EndoError("at least one component is required")
        for k, c in enumerate(comps, start=1):
            if c.flavor != flavor:
                raise FlavorMismatch(f"component {k} has flavor {c.flavor}")
            if c.arity != k:
                raise EndoError(f"component {k} has arity {c.arity}")
        self.flavor = flavor
        self.comps = tuple(comps)

    @property
    def N(self) -> int:
        return len(self.comps)

    def __getitem__(self, k: int) -> NatOp:
        """Component of arity ``k`` (1-based)."""
        if k < 1:
            raise IndexError("components are indexed from 1")
        return self.comps[k - 1]

    def __iter__(self):
        return iter(self.comps)

    def __eq__(self, other):
        return (type(self) is type(other) and self.flavor == other.flavor
                and self.comps == other.comps)

    def __hash__(self):
        return hash((type(self).__name__, self.flavor, self.comps))

    def truncate(self, n: int):
        return type(self)(self.flavor, self.comps[:n])

    def map_coeffs(self, fn):
        return type(self)(self.flavor, [c.map_coeffs(fn) for c in self.comps])

    def to_json(self) -> dict:
        return {"kind": self.kind, "flavor": self.flavor, "arity": self.N,
                "components": [c.to_json() for c in self.comps]}

    @classmethod
    def from_json(cls, obj: dict):
        comps = [NatOp.from_json(c) for c in obj["components"]]
        return cls(obj["flavor"], comps)

    def __str__(self):
        return "\n".join(f"[{k}] {c}" for k, c in enumerate(self.comps, start=1))


class Endo(_Components):
    kind = "endo"

    def __init__(self, flavor: str, comps: Sequence[NatOp]):
        super().__init__(flavor, comps)
        for c in self.comps:
            if c.terms and c.degree != 0:
                raise DegreeViolation("endomorphism components have D-degree 0")

    @classmethod
    def identity(cls, flavor: str, N: int) -> "Endo":
        return cls(flavor, [no.identity(flavor)] + [NatOp.zero(flavor, k) for k in range(2, N + 1)])

    def is_unital(self) -> bool:
        return self[1] == no.identity(self.flavor)

    def to_series(self) -> Optional[sr.PowerSeries]:
        """The generating series when every component is a multiple of the iterated product."""
        coeffs = []
        for k, c in enumerate(self.comps, start=1):
            m = no.mu(k, self.flavor)
            mono = next(iter(m.terms))
            if set(c.terms) - {mono}:
                return None
            coeffs.append(c.terms.get(mono, 0))
        return sr.PowerSeries(self.flavor, tuple(coeffs))

    def to_json(self) -> dict:
        out = super().to_json()
        s = self.to_series()
        if s is not None:
            out["series"] = s.to_json()
        return out


class BraceFamily(_Components):
    kind = "braces"

    def degree_check(self) -> None:
        for k, c in enumerate(self.comps, start=1):
            if c.terms and c.degree != 1:
                raise DegreeViolation(f"component {k} has D-degree {c.degree}, expected 1")

    @classmethod
    def trivial(cls, flavor: str, N: int) -> "BraceFamily":
        return cls(flavor, [no.delta_op(flavor)] + [NatOp.zero(flavor, k, 1) for k in range(2, N + 1)])


def load_components(obj: dict):
    kind = obj.get("kind", "braces")
    if kind == "endo":
        return Endo.from_json(obj)
    return BraceFamily.from_json(obj)


# -- combinatorics of blocks ---------------------------------------------------------

@lru_cache(maxsize=None)
def compositions(n: int) -> tuple:
    """All compositions of ``n`` (ordered tuples of positive parts)."""
    out = []

    def rec(rest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for p in range(1, rest + 1):
            rec(rest - p, acc + [p])
    rec(n, [])
    return tuple(out)


def consecutive_blocks(comp: Sequence[int]) -> List[tuple]:
    out, start = [], 1
    for p in comp:
        out.append(tuple(range(start, start + p)))
        start += p
    return out


@lru_cache(maxsize=None)
def set_partitions(n: int) -> tuple:
    """Set partitions of ``1..n``; blocks sorted internally and ordered by their minima."""
    out = []

    def rec(i, blocks):
        if i > n:
            out.append(tuple(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(i)
            rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        rec(i + 1, blocks)
        blocks.pop()
    rec(1, [])
    return tuple(out)


def koszul_mask(seq: Sequence[int], ctx: SignContext) -> int:
    """Koszul sign mask of rearranging ``x_1..x_n`` into the order ``seq``."""
    degs = ctx.degs
    mask = 0
    for i in range(len(seq)):
        di = degs[seq[i]]
        if not di:
            continue
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                mask ^= di & degs[seq[j]]
    return mask


# -- composition and conjugation ---------------------------------------------------------

def _check_pair(a: _Components, b: _Components):
    if a.flavor != b.flavor:
        raise FlavorMismatch(f"flavors differ: {a.flavor} vs {b.flavor}")


def compose_component(psi: _Components, phi: Endo, n: int, ctx: SignContext) -> Expr:
    """``(psi phi)_n`` on the generators of ``ctx``."""
    out = Expr(psi.flavor, ctx)
    if psi.flavor == ASSOC:
        for comp in compositions(n):
            q = len(comp)
            if q > psi.N or not psi[q].terms:
                continue
            slots = [no.block(phi[len(b)], b, ctx) for b in consecutive_blocks(comp)]
            if all(slots):
                no.plug(out, psi[q], slots)
    else:
        for blocks in set_partitions(n):
            q = len(blocks)
            if q > psi.N or not psi[q].terms:
                continue
            slots = [no.block(phi[len(b)], b, ctx) for b in blocks]
            if all(slots):
                seq = [x for b in blocks for x in b]
                no.plug(out, psi[q], slots, koszul_mask(seq, ctx))
    return out


def compose_endo(psi: Endo, phi: Endo) -> Endo:
    """``psi o phi`` truncated to the shorter arity."""
    _check_pair(psi, phi)
    N = min(psi.N, phi.N)
    comps = []
    for n in range(1, N + 1):
        e = compose_component(psi, phi, n, fa.even_context(n))
        comps.append(NatOp.from_expr(e, n, 0))
    return Endo(psi.flavor, comps)


def invert_endo(phi: Endo) -> Endo:
    """Two-sided inverse via the triangular recurrence ``psi_n = -sum_{r<n} psi_r(phi...)``."""
    if not phi.is_unital():
        raise NotInvertible("only endomorphisms with phi_1 = id are inverted")
    flavor = phi.flavor
    comps = [no.identity(flavor)]
    for n in range(2, phi.N + 1):
        partial = Endo(flavor, comps + [NatOp.zero(flavor, n)])
        e = compose_component(partial, phi, n, fa.even_context(n))
        comps.append(NatOp.from_expr(e, n, 0).scale(-1))
    return Endo(flavor, comps)


def conjugate_component(psi: Endo, m: _Components, chi: Endo, n: int, ctx: SignContext) -> Expr:
    """Arity-``n`` component of ``psi o m o chi`` for a coderivation ``m``."""
    flavor = psi.flavor
    out = Expr(flavor, ctx)
    if flavor == ASSOC:
        for comp in compositions(n):
            blocks = consecutive_blocks(comp)
            q = len(blocks)
            chis = [no.block(chi[len(b)], b, ctx) for b in blocks]
            if not all(chis):
                continue
            for j in range(1, min(q, m.N) + 1):
                mj = m[j]
                if not mj.terms or q - j + 1 > psi.N or not psi[q - j + 1].terms:
                    continue
                for s in range(q - j + 1):
                    inner = Expr(flavor, ctx)
                    no.plug(inner, mj, chis[s:s + j])
                    if not inner.terms:
                        continue
                    before = [x for b in blocks[:s] for x in b]
                    mask = no.passing_mask(before, ctx) if mj.degree & 1 else 0
                    slots = chis[:s] + [no.expr_block(inner)] + chis[s + j:]
                    no.plug(out, psi[q - j + 1], slots, mask)
    else:
        for blocks in set_partitions(n):
            q = len(blocks)
            chis = [no.block(chi[len(b)], b, ctx) for b in blocks]
            if not all(chis):
                continue
            for subset in range(1, 1 << q):
                J = [t for t in range(q) if (subset >> t) & 1]
                j = len(J)
                if j > m.N or not m[j].terms or q - j + 1 > psi.N or not psi[q - j + 1].terms:
                    continue
                inner = Expr(flavor, ctx)
                no.plug(inner, m[j], [chis[t] for t in J])
                if not inner.terms:
                    continue
                rest = [t for t in range(q) if not (subset >> t) & 1]
                seq = [x for t in J for x in blocks[t]] + [x for t in rest for x in blocks[t]]
                slots = [no.expr_block(inner)] + [chis[t] for t in rest]
                no.plug(out, psi[q - j + 1], slots, koszul_mask(seq, ctx))
    return out


def conjugate(psi: Endo, m: _Components, chi: Endo, upto: Optional[int] = None) -> BraceFamily:
    _check_pair(psi, m)
    _check_pair(psi, chi)
    N = min(psi.N, m.N, chi.N) if upto is None else upto
    comps = []
    for n in range(1, N + 1):
        e = conjugate_component(psi, m, chi, n, fa.even_context(n))
        comps.append(NatOp.from_expr(e, n, 1))
    return BraceFamily(psi.flavor, comps)


def twist(phi: Endo, sweep_check: bool = False) -> BraceFamily:
    """``Delta^phi = phi^{-1} Delta phi`` computed by the generic conjugation."""
    if not phi.is_unital():
        raise NotInvertible("twisting needs phi_1 = id")
    psi = invert_endo(phi)
    triv = BraceFamily.trivial(phi.flavor, phi.N)
    fam = conjugate(psi, triv, phi)
    if sweep_check:
        for n in range(1, phi.N + 1):
            e = conjugate_component(psi, triv, phi, n, fa.sweep_context(n))
            if NatOp.from_expr(e, n, 1) != fam[n]:
                raise fa.InconsistentSigns(f"parity sweep disagrees at arity {n}")
    return fam


def series_to_endo(s: sr.PowerSeries, flavor: Optional[str] = None, N: Optional[int] = None) -> Endo:
    """``(id, f_2 mu_2, f_3 mu_3, ...)``."""
    if flavor is not None and flavor != s.flavor:
        raise FlavorMismatch(f"series has flavor {s.flavor}, requested {flavor}")
    if not s.is_unit_normalized():
        raise sr.NotUnitNormalized("series must start with t")
    N = s.order if N is None else N
    if N > s.order:
        raise sr.TruncationTooShort(f"series of order {s.order} cannot give {N} components")
    return Endo(s.flavor, [no.mu(k, s.flavor).scale(s.f(k)) for k in range(1, N + 1)])


def twist_series(s: sr.PowerSeries, N: Optional[int] = None) -> BraceFamily:
    return twist(series_to_endo(s, N=N))


def twist_by_coefficients(s: sr.PowerSeries, N: int) -> BraceFamily:
    """Braces of a series-parametrized automorphism from ``c_{r,s}`` (assoc) or ``c_r`` (comm).

    Assoc: ``sum_{r+p+s=k} c_{r,s} f_p  x_1..x_r D(x_{r+1}..x_{r+p}) x_{r+p+1}..x_k``.
    Comm: ``sum_S c_{k-|S|} f_{|S|} D(x_S) x_rest`` over nonempty subsets ``S``.
    """
    if s.order < N:
        raise sr.TruncationTooShort(f"need a series of order >= {N}")
    flavor = s.flavor
    comps = []
    if flavor == ASSOC:
        grid = sr.nc_taylor_coeffs(s.truncate(N), N - 1) if N > 1 else None
        for k in range(1, N + 1):
            terms = {}
            for p in range(1, k + 1):
                fp = s.f(p)
                if not fp:
                    continue
                for r in range(0, k - p + 1):
                    t = k - p - r
                    c = grid[(r, t)] if grid else 1
                    if not c:
                        continue
                    inner = fa.prod(list(range(r + 1, r + p + 1)))
                    mono = fa.prod(list(range(1, r + 1)) + [(fa.D, inner)] + list(range(r + p + 1, k + 1)))
                    terms[mono] = terms.get(mono, 0) + c * fp
            comps.append(NatOp(ASSOC, k, terms, 1))
    else:
        grid = sr.comm_coeffs(s.truncate(N), N - 1) if N > 1 else None
        for k in range(1, N + 1):
            items = []
            for S in _subsets(k):
                c = grid[k - len(S)] if grid else 1
                fp = s.f(len(S))
                if not c or not fp:
                    continue
                rest = [x for x in range(1, k + 1) if x not in S]
                items.append((fa.prod([(fa.D, fa.prod(list(S)))] + rest), c * fp))
            comps.append(NatOp.from_trees(COMM, k, items, 1))
    return BraceFamily(flavor, comps)


def _subsets(k: int):
    for mask in range(1, 1 << k):
        yield tuple(i + 1 for i in range(k) if (mask >> i) & 1)


def untwist(m: BraceFamily, trace: Optional[list] = None) -> Endo:
    """The unique natural ``phi`` with ``phi_1 = id`` and ``twist(phi) = m``.

    Stage ``s`` conjugates ``m`` by the current ``theta``; its arity-``s+1``
    component ``n`` must be ``delta``-closed, and ``alpha = h(n)`` is the
    correction: ``theta <- (id + alpha) theta``.  ``trace`` collects per-stage
    data for inspection.
    """
    flavor = m.flavor
    m.degree_check()
    if m[1] != no.delta_op(flavor):
        raise DegreeViolation("the first component must be D")
    N = m.N
    theta = Endo.identity(flavor, N)
    for s in range(1, N):
        k = s + 1
        inv = invert_endo(theta)
        e = conjugate_component(theta, m, inv, k, fa.even_context(k))
        n_k = NatOp.from_expr(e, k, 1)
        closed = no.differential(n_k)
        if closed.terms:
            raise NotCoclosed(f"arity {k}: the conjugated component is not delta-closed "
                              f"(master identity fails)")
        alpha = no.homotopy(n_k)
        if trace is not None:
            trace.append({"arity": k, "n": n_k, "alpha": alpha})
        if not alpha.terms:
            continue
        comps = [no.identity(flavor)] + [NatOp.zero(flavor, j) for j in range(2, N + 1)]
        comps[k - 1] = alpha
        theta = compose_endo(Endo(flavor, comps), theta)
    return theta


def random_automorphism(flavor: str, N: int, rng: random.Random, spread: int = 3) -> Endo:
    """Random natural automorphism with small integer coefficients.

    Assoc: ``phi_k`` a random element of the span of the ``k!`` permutation
    products.  Comm: ``phi_k = f_k mu_k``.
    """
    comps = [no.identity(flavor)]
    for k in range(2, N + 1):
        if flavor == ASSOC:
            terms = {}
            for mono in no.basis_monomials(ASSOC, k, 0):
                c = rng.randint(-spread, spread)
                if c:
                    terms[mono] = c
            comps.append(NatOp(ASSOC, k, terms, 0))
        else:
            comps.append(no.mu(k, COMM).scale(rng.randint(-spread, spread)))
    return Endo(flavor, comps)


def random_series(flavor: str, N: int, rng: random.Random, spread: int = 3) -> sr.PowerSeries:
    return sr.PowerSeries(flavor, (1,) + tuple(rng.randint(-spread, spread) for _ in range(N - 1)))
