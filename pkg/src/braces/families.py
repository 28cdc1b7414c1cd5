"""Named brace families, master-identity verification and the structural analyzers.

The closed forms transcribe the classical displays with parity-free
coefficients; all Koszul signs come from the reference-order rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence

from . import freealg as fa
from . import natops as no
from . import scalars
from . import series as sr
from .endo import BraceFamily, _subsets, koszul_mask
from .freealg import ASSOC, COMM, D, Expr
from .natops import NatOp
from .scalars import norm


class FamilyError(ValueError):
    pass


class UnknownFamily(FamilyError):
    pass


class NoRuleRegistered(FamilyError):
    pass


class NonInvertibleScale(FamilyError):
    pass


FAMILY_FLAVOR = {
    "koszul": COMM,
    "exotic_hereditary": COMM,
    "borjeson": ASSOC,
    "nonrecursive": ASSOC,
    "hereditary_nonrecursive": ASSOC,
    "trivial": ASSOC,
}
FAMILY_NAMES = tuple(FAMILY_FLAVOR)


def _w(*labels):
    """Product of generators ``x_a x_b ...`` (a single generator stays a leaf)."""
    return fa.prod(list(labels))


def _d(*labels):
    return (D, _w(*labels))


def _seq(k, i, j):
    return list(range(i, j + 1)) if i <= j else []


def _assoc_term(k: int, lo: int, hi: int):
    """``x_1..x_{lo-1} D(x_lo..x_hi) x_{hi+1}..x_k``."""
    return fa.prod(_seq(k, 1, lo - 1) + [_d(*range(lo, hi + 1))] + _seq(k, hi + 1, k))


def _borjeson(k: int) -> NatOp:
    if k == 1:
        return no.delta_op(ASSOC)
    t = {_assoc_term(k, 1, k): 1, _assoc_term(k, 1, k - 1): -1, _assoc_term(k, 2, k): -1}
    if k >= 3:
        t[_assoc_term(k, 2, k - 1)] = 1
    return NatOp(ASSOC, k, t, 1)


def _koszul(k: int) -> NatOp:
    items = []
    for S in _subsets(k):
        rest = [x for x in range(1, k + 1) if x not in S]
        items.append((fa.prod([_d(*S)] + rest), (-1) ** (k - len(S))))
    return NatOp.from_trees(COMM, k, items, 1)


def _exotic(k: int) -> NatOp:
    if k == 1:
        return no.delta_op(COMM)
    items = []
    for S in _subsets(k):
        rest = [x for x in range(1, k + 1) if x not in S]
        if len(S) == 1:
            c = (-1) ** (k + 1) * factorial(k - 1)
        elif len(S) == 2:
            c = (-1) ** k * factorial(k - 2)
        else:
            continue
        items.append((fa.prod([_d(*S)] + rest), c))
    return NatOp.from_trees(COMM, k, items, 1)


def alpha(k: int) -> int:
    """``alpha_1 = 1``, ``alpha_k = binom(2k-2, k)/(k-1)``."""
    return sr.catalan_number_oracle(k)


def _nonrecursive(k: int) -> NatOp:
    if k == 1:
        return no.delta_op(ASSOC)
    t: Dict = {_assoc_term(k, 1, k): alpha(k)}
    for u in range(1, k):
        c = -alpha(u) * alpha(k - u)
        for mono in (_assoc_term(k, 1, u), _assoc_term(k, u + 1, k)):
            t[mono] = t.get(mono, 0) + c
    return NatOp(ASSOC, k, t, 1)


def _hereditary_nonrecursive(k: int) -> NatOp:
    if k == 1:
        return no.delta_op(ASSOC)
    sgn = (-1) ** k
    t: Dict = {}
    for i in range(0, k - 1):
        t[_assoc_term(k, i + 1, i + 2)] = sgn * comb(k - 2, i)
    for i in range(0, k):
        mono = _assoc_term(k, i + 1, i + 1)
        t[mono] = t.get(mono, 0) - sgn * comb(k - 1, i)
    return NatOp(ASSOC, k, t, 1)


def _trivial(k: int) -> NatOp:
    return no.delta_op(ASSOC) if k == 1 else NatOp.zero(ASSOC, k, 1)


_BUILDERS = {
    "koszul": _koszul,
    "exotic_hereditary": _exotic,
    "borjeson": _borjeson,
    "nonrecursive": _nonrecursive,
    "hereditary_nonrecursive": _hereditary_nonrecursive,
    "trivial": _trivial,
}


def closed_form(name: str, k: int) -> NatOp:
    if name not in _BUILDERS:
        raise UnknownFamily(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
    if k < 1:
        raise FamilyError("arity must be at least 1")
    return _BUILDERS[name](k)


def family(name: str, N: int) -> BraceFamily:
    if name not in _BUILDERS:
        raise UnknownFamily(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")
    return BraceFamily(FAMILY_FLAVOR[name], [closed_form(name, k) for k in range(1, N + 1)])


def family_series(name: str, order: int) -> sr.PowerSeries:
    return sr.named(sr.FAMILY_SERIES[name], order, FAMILY_FLAVOR[name])


# -- master identities ------------------------------------------------------------------------

def ainf_residual(m: BraceFamily, n: int, ctx) -> Expr:
    """``sum_{k+l=n+1} sum_i m_k(id^{i-1} (x) m_l (x) id^{k-i})`` on ``x_1..x_n``."""
    out = Expr(ASSOC, ctx)
    for k in range(1, n + 1):
        l = n + 1 - k
        if not m[k].terms or not m[l].terms:
            continue
        for i in range(1, k + 1):
            no.compose_at_expr(m[k], i, m[l], ctx, out)
    return out


def linf_residual(m: BraceFamily, n: int, ctx) -> Expr:
    """``sum_{i+j=n+1} sum_sigma eps(sigma) l_j(l_i(a_S), a_rest)`` over ``(i, n-i)``-unshuffles."""
    out = Expr(COMM, ctx)
    for i in range(1, n + 1):
        j = n + 1 - i
        if not m[i].terms or not m[j].terms:
            continue
        for S in _subsets(n):
            if len(S) != i:
                continue
            rest = [x for x in range(1, n + 1) if x not in S]
            slots = [no.block(m[i], S, ctx)] + [no.leaf_block(r, ctx) for r in rest]
            no.plug(out, m[j], slots, koszul_mask(list(S) + rest, ctx))
    return out


@dataclass
class IdentityReport:
    identity: str
    arity: int
    vectors: int
    failing: List[tuple] = field(default_factory=list)
    residual_terms: int = 0
    first_residual: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.residual_terms == 0

    def to_json(self) -> dict:
        return {"identity": self.identity, "arity": self.arity,
                "parity": [list(p) for p in self.failing], "vectors": self.vectors,
                "residual_terms": self.residual_terms, "pass": self.passed,
                **({"first_residual": self.first_residual} if self.first_residual else {})}


def verify_sh_identity(m: BraceFamily, upto: int) -> List[IdentityReport]:
    """Expand the master identity for every ``n <= upto`` over all ``2^n`` parity vectors."""
    if m.N < upto:
        raise sr.TruncationTooShort(f"family has {m.N} components, need {upto}")
    name = "A-infinity" if m.flavor == ASSOC else "L-infinity"
    reports = []
    for n in range(1, upto + 1):
        ctx = fa.sweep_context(n)
        res = ainf_residual(m, n, ctx) if m.flavor == ASSOC else linf_residual(m, n, ctx)
        coll = res.collapsed()
        rep = IdentityReport(name, n, ctx.width, residual_terms=len(coll))
        if coll:
            for w in res.nonzero_vectors():
                rep.failing.append(ctx.parity_vector(w))
            w = rep.failing and res.nonzero_vectors()[0]
            vals = res.value_at(w)
            mono = min(vals, key=fa.key)
            rep.first_residual = f"{vals[mono]}*{fa.to_text(mono)} at parities {ctx.parity_vector(w)}"
        reports.append(rep)
    return reports


def identity_holds(m: BraceFamily, upto: int) -> bool:
    return all(r.passed for r in verify_sh_identity(m, upto))


# -- recursivity ------------------------------------------------------------------------------

def recursivity_coefficient(m: BraceFamily, k: int):
    """Coefficient ``C_k`` of ``D(x_1 ... x_k)`` in ``m_k``."""
    if k > m.N:
        raise sr.TruncationTooShort(f"family has {m.N} components")
    return m[k].coefficient(_d(*range(1, k + 1)))


def smallest_prime_factor(n: int) -> Optional[int]:
    n = abs(n)
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def recursivity_report(m: BraceFamily, upto: int, mod: Optional[int] = None) -> List[dict]:
    """Per-arity ``C_k`` with the integrality/unit test and, with ``mod``, the residue."""
    rows = []
    for k in range(1, upto + 1):
        c = recursivity_coefficient(m, k)
        row = {"k": k, "C_k": scalars.to_json(c)}
        if isinstance(c, scalars.Mod):
            row["unit"] = bool(c)
        else:
            integral = Fraction(c).denominator == 1
            row["integral"] = integral
            row["unit"] = integral and c in (1, -1)
            if integral and not row["unit"]:
                row["smallest_failing_prime"] = 2 if c == 0 else smallest_prime_factor(int(c))
        if mod is not None:
            r = scalars.convert(c, scalars.Zmod(mod)) if not isinstance(c, scalars.Mod) else c
            row["mod"] = mod
            row["C_k_mod"] = r.val
            row["vanishes_mod"] = r.val == 0
        rows.append(row)
    return rows


# -- induction rules --------------------------------------------------------------------------

def _borjeson_rule(k: int) -> NatOp:
    return no.compose_at(closed_form("borjeson", k), 2, no.mu(2, ASSOC))


def _exotic_rule(k: int) -> NatOp:
    h = closed_form("exotic_hereditary", k)
    n = k + 1
    ctx = fa.sweep_context(n)
    out = Expr(COMM, ctx)
    mu2 = no.mu(2, COMM)
    for j in range(1, n + 1):
        rest = tuple(x for x in range(1, n + 1) if x != j)
        slots = [no.block(h, rest, ctx), no.leaf_block(j, ctx)]
        no.plug(out, mu2, slots, koszul_mask(list(rest) + [j], ctx), scale=-1)
    return NatOp.from_expr(out, n, 1)


def _hereditary_nonrecursive_rule(k: int) -> NatOp:
    e = closed_form("hereditary_nonrecursive", k)
    mu2 = no.mu(2, ASSOC)
    return (no.compose_at(mu2, 2, e) + no.compose_at(mu2, 1, e)).scale(-1)


# name -> (rule id, first k for which m_{k+1} = rule(k), rule)
INDUCTION_RULES = {
    "borjeson": ("b[k+1] = b[k](x1, x2x3, x4, ...)", 3, _borjeson_rule),
    "exotic_hereditary": ("h[k+1] = -sum eps h[k](...) a", 2, _exotic_rule),
    "hereditary_nonrecursive": ("e[k+1] = -x1 e[k](...) - e[k](...) x[k+1]", 2,
                                _hereditary_nonrecursive_rule),
}


@dataclass
class InductionReport:
    name: str
    rule: str
    checked: List[int]
    failures: List[int]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"family": self.name, "rule": self.rule, "checked_k": self.checked,
                "failures": self.failures, "pass": self.passed}


def verify_induction(name: str, upto: int) -> InductionReport:
    """Check ``m_{k+1} = rule(m_k)`` symbolically for all ``k < upto`` where the rule applies."""
    if name not in INDUCTION_RULES:
        raise NoRuleRegistered(f"no inductive rule registered for {name!r}")
    rule_id, start, rule = INDUCTION_RULES[name]
    checked, failures = [], []
    for k in range(start, upto):
        checked.append(k)
        if rule(k) != closed_form(name, k + 1):
            failures.append(k)
    return InductionReport(name, rule_id, checked, failures)


@dataclass(frozen=True)
class HereditarityVerdict:
    kind: str  # "HereditaryByInduction" | "NonHereditaryCertified" | "Unknown"
    rule: Optional[str] = None
    witness: Optional[int] = None

    def to_json(self) -> dict:
        out = {"verdict": self.kind}
        if self.rule:
            out["rule"] = self.rule
        if self.witness is not None:
            out["witness_arity"] = self.witness
        return out

    def __str__(self):
        if self.kind == "NonHereditaryCertified":
            return f"NonHereditaryCertified({self.witness})"
        if self.kind == "HereditaryByInduction":
            return f"HereditaryByInduction({self.rule})"
        return "Unknown"


def hereditarity_test(m: BraceFamily, upto: int) -> HereditarityVerdict:
    """Three-valued hereditarity verdict.

    Agreement with the canonical family (Börjeson / Koszul) at arities 2 and 3
    plus a difference at some ``k <= upto`` certifies non-hereditarity.  A
    family equal to a registered one whose induction verifies is hereditary.
    """
    if upto < 4:
        raise FamilyError("the test needs upto >= 4")
    if m.N < upto:
        raise sr.TruncationTooShort(f"family has {m.N} components, need {upto}")
    canonical = "borjeson" if m.flavor == ASSOC else "koszul"
    if all(m[k] == closed_form(canonical, k) for k in (2, 3)):
        for k in range(4, upto + 1):
            if m[k] != closed_form(canonical, k):
                return HereditarityVerdict("NonHereditaryCertified", witness=k)
    for name, (rule_id, _, _) in INDUCTION_RULES.items():
        if FAMILY_FLAVOR[name] != m.flavor:
            continue
        if all(m[k] == closed_form(name, k) for k in range(1, upto + 1)):
            if verify_induction(name, upto).passed:
                return HereditarityVerdict("HereditaryByInduction", rule=rule_id)
    return HereditarityVerdict("Unknown")


def scale_braces(m: BraceFamily, a, b) -> BraceFamily:
    """Component ``k`` multiplied by ``a * b^(k-1)``."""
    if not a:
        raise NonInvertibleScale("the scale of the first component must be invertible")
    return BraceFamily(m.flavor, [c.scale(a * b ** (k - 1)) for k, c in enumerate(m.comps, start=1)])


# -- the three-parameter comparison ------------------------------------------------------------

def m3_family(a) -> NatOp:
    """Arity-3 operations with inputs in the order ``x_1 x_2 x_3``, parametrized by ``a``."""
    a = scalars.qq(a)
    t = {
        _d(1, 2, 3): 1 + a,
        _w(_d(1), 2, 3): -a,
        _w(1, 2, _d(3)): -a,
        _w(1, _d(2), 3): 1 - a,
        _w(_d(1, 2), 3): -1,
        _w(1, _d(2, 3)): -1,
    }
    return NatOp(ASSOC, 3, {fa.prod([m]) if type(m) is int else m: c for m, c in t.items()}, 1)


def m4_prime(a, b) -> NatOp:
    a, b = scalars.qq(a), scalars.qq(b)
    t = {
        _d(1, 2, 3, 4): 1 + b,
        _w(_d(1), 2, 3, 4): 2 * a - b,
        _w(1, 2, 3, _d(4)): 2 * a - b,
        _w(1, _d(2), 3, 4): 4 * a - b,
        _w(1, 2, _d(3), 4): 4 * a - b,
        _w(_d(1, 2, 3), 4): -(1 + a),
        _w(1, _d(2, 3, 4)): -(1 + a),
        _w(_d(1, 2), 3, 4): -a,
        _w(1, 2, _d(3, 4)): -a,
        _w(1, _d(2, 3), 4): 1 - a,
    }
    return NatOp(ASSOC, 4, t, 1)


COMBINATION_VARS = ("A", "B", "C", "D", "E")


def combination_terms(a) -> Dict[str, NatOp]:
    """The five composites ``m3(x1x2,x3,x4)``, ``m3(x1,x2x3,x4)``, ``m3(x1,x2,x3x4)``, ``x1 m3(...)``, ``m3(...) x4``."""
    m3 = m3_family(a)
    mu2 = no.mu(2, ASSOC)
    return {
        "A": no.compose_at(m3, 1, mu2),
        "B": no.compose_at(m3, 2, mu2),
        "C": no.compose_at(m3, 3, mu2),
        "D": no.compose_at(mu2, 2, m3),
        "E": no.compose_at(mu2, 1, m3),
    }


@dataclass
class AffineSolution:
    """Solutions ``var = const + sum coeff * free_var``; ``None`` when inconsistent."""

    free: List[str]
    values: Optional[Dict[str, Dict[str, object]]]

    @property
    def empty(self) -> bool:
        return self.values is None

    def point(self, **params) -> Dict[str, object]:
        out = {}
        for v, expr in self.values.items():
            val = expr.get("1", 0)
            for f, c in expr.items():
                if f != "1":
                    val += c * scalars.qq(params.get(f, 0))
            out[v] = norm(val)
        return out

    def describe(self) -> List[str]:
        if self.values is None:
            return ["no solution"]
        lines = []
        for v in COMBINATION_VARS:
            expr = self.values[v]
            if v in self.free:
                lines.append(f"{v} free")
                continue
            parts = []
            const = expr.get("1", 0)
            if const:
                parts.append(scalars.fmt(const))
            for f in COMBINATION_VARS:
                c = expr.get(f, 0)
                if not c:
                    continue
                s = f if abs(c) == 1 else f"{scalars.fmt(abs(c))}*{f}"
                parts.append(("- " if c < 0 else "+ ") + s if parts else ("-" if c < 0 else "") + s)
            lines.append(f"{v} = " + (" ".join(parts) if parts else "0"))
        return lines

    def to_json(self) -> dict:
        if self.values is None:
            return {"solutions": "empty"}
        return {"free": self.free,
                "values": {v: {k: scalars.rational_json(c) for k, c in e.items()}
                           for v, e in self.values.items()},
                "display": self.describe()}


def solve_linear(rows: List[Dict[str, object]], rhs: List[object], variables: Sequence[str],
                 pivot_order: Sequence[str]) -> AffineSolution:
    """Exact Gauss-Jordan elimination; pivots are chosen in ``pivot_order``."""
    aug = [dict({v: Fraction(r.get(v, 0)) for v in variables}, **{"1": Fraction(b)})
           for r, b in zip(rows, rhs)]
    pivots = {}
    used = set()
    for v in pivot_order:
        idx = next((i for i, r in enumerate(aug) if i not in used and r[v] != 0), None)
        if idx is None:
            continue
        used.add(idx)
        prow = aug[idx]
        piv = prow[v]
        for key_ in prow:
            prow[key_] /= piv
        for i, r in enumerate(aug):
            if i != idx and r[v] != 0:
                f = r[v]
                for key_ in r:
                    r[key_] -= f * prow[key_]
        pivots[v] = idx
    for i, r in enumerate(aug):
        if i not in used and r["1"] != 0:
            return AffineSolution([], None)
    free = [v for v in variables if v not in pivots]
    values = {}
    for v in variables:
        if v in pivots:
            r = aug[pivots[v]]
            expr = {"1": norm(r["1"])} if r["1"] else {}
            for f in free:
                if r[f]:
                    expr[f] = norm(-r[f])
            values[v] = expr
        else:
            values[v] = {v: 1}
    return AffineSolution(free, values)


def solve_combination(a, b) -> AffineSolution:
    """All ``(A, B, C, D, E)`` with ``m4'(a, b) = A m3(x1x2,..) + B .. + C .. + D x1 m3 + E m3 x4``."""
    terms = combination_terms(a)
    target = m4_prime(a, b)
    monos = set(target.terms)
    for op in terms.values():
        monos |= set(op.terms)
    rows, rhs = [], []
    for mono in sorted(monos, key=fa.key):
        rows.append({v: terms[v].terms.get(mono, 0) for v in COMBINATION_VARS})
        rhs.append(target.terms.get(mono, 0))
    return solve_linear(rows, rhs, COMBINATION_VARS, ("E", "D", "C", "B", "A"))
