"""Evaluation of natural operations on concrete finite-dimensional algebras.

An algebra is given by structure constants ``e_i e_j = sum_k mul[i][j][k] e_k``,
integer degrees and a matrix whose row ``i`` is ``Delta(e_i)``.  In strict
mode signs follow the reference-order rule; in parity-relaxed mode every
sign is ``+1`` and degree checks are skipped (ungraded operators such as
``d^2/dx^2``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import freealg as fa
from . import scalars
from .endo import BraceFamily
from .families import FAMILY_FLAVOR, UnknownFamily, closed_form
from .freealg import COMM, D
from .natops import NatOp
from .scalars import norm

Vector = Dict[int, object]


class AlgebraError(ValueError):
    pass


class InvalidAlgebra(AlgebraError):
    pass


class FlavorMismatch(AlgebraError):
    pass


class ArityMismatch(AlgebraError):
    pass


class InhomogeneousArgument(AlgebraError):
    pass


def _sparse(row: Sequence) -> Vector:
    return {k: norm(c) for k, c in enumerate(row) if c}


@dataclass(frozen=True)
class ConcreteAlgebra:
    dim: int
    degrees: Tuple[int, ...]
    mul: Tuple[Tuple[Tuple, ...], ...]
    delta: Tuple[Tuple, ...]
    commutative: bool = False
    strict: bool = True
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        n = self.dim
        if len(self.degrees) != n or len(self.mul) != n or len(self.delta) != n:
            raise InvalidAlgebra("degrees, mul and delta must all have length dim")
        if any(len(r) != n for r in self.mul) or any(len(c) != n for r in self.mul for c in r):
            raise InvalidAlgebra("mul must be dim x dim x dim")
        if any(len(r) != n for r in self.delta):
            raise InvalidAlgebra("delta must be dim x dim")
        if self.names is not None and len(self.names) != n:
            raise InvalidAlgebra("names must have length dim")
        object.__setattr__(self, "_mul", {(i, j): _sparse(self.mul[i][j])
                                          for i in range(n) for j in range(n)})
        object.__setattr__(self, "_delta", [_sparse(r) for r in self.delta])
        self._validate()

    # -- structure ----------------------------------------------------------------------------

    def basis(self, i: int) -> Vector:
        return {i: 1}

    def times(self, a: Vector, b: Vector) -> Vector:
        out: Vector = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, c in self._mul[(i, j)].items():
                    out[k] = out.get(k, 0) + ca * cb * c
        return {k: norm(v) for k, v in out.items() if v}

    def apply_delta(self, a: Vector) -> Vector:
        out: Vector = {}
        for i, ca in a.items():
            for k, c in self._delta[i].items():
                out[k] = out.get(k, 0) + ca * c
        return {k: norm(v) for k, v in out.items() if v}

    def parity(self, a: Vector) -> int:
        ps = {self.degrees[i] & 1 for i in a}
        if len(ps) > 1:
            raise InhomogeneousArgument("argument mixes parities")
        return ps.pop() if ps else 0

    def _validate(self):
        n = self.dim
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    left = self.times(self.times({i: 1}, {j: 1}), {k: 1})
                    right = self.times({i: 1}, self.times({j: 1}, {k: 1}))
                    if left != right:
                        raise InvalidAlgebra(f"multiplication is not associative on ({i},{j},{k})")
        if self.commutative:
            for i in range(n):
                for j in range(n):
                    s = -1 if self.strict and (self.degrees[i] & self.degrees[j] & 1) else 1
                    ab = self.times({i: 1}, {j: 1})
                    ba = self.times({j: 1}, {i: 1})
                    if ab != {k: norm(s * c) for k, c in ba.items()}:
                        raise InvalidAlgebra(f"multiplication is not graded-commutative on ({i},{j})")
        if self.strict:
            for i in range(n):
                for j in range(n):
                    for k in self._mul[(i, j)]:
                        if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                            raise InvalidAlgebra(f"product e{i}e{j} is not homogeneous")
                for k in self._delta[i]:
                    if self.degrees[k] != self.degrees[i] + 1:
                        raise InvalidAlgebra(f"Delta(e{i}) does not have degree {self.degrees[i] + 1}")
                if self.apply_delta(self._delta[i]):
                    raise InvalidAlgebra(f"Delta^2(e{i}) is nonzero")

    # -- I/O ----------------------------------------------------------------------------------

    def to_json(self) -> dict:
        out = {"dim": self.dim, "degrees": list(self.degrees),
               "mul": [[[scalars.to_json(c) for c in col] for col in row] for row in self.mul],
               "delta": [[scalars.to_json(c) for c in row] for row in self.delta],
               "commutative": self.commutative, "strict": self.strict}
        if self.names:
            out["names"] = list(self.names)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ConcreteAlgebra":
        try:
            n = int(obj["dim"])
            conv = scalars.from_json
            return cls(
                dim=n,
                degrees=tuple(int(d) for d in obj.get("degrees", [0] * n)),
                mul=tuple(tuple(tuple(conv(c) for c in col) for col in row) for row in obj["mul"]),
                delta=tuple(tuple(conv(c) for c in row) for row in obj["delta"]),
                commutative=bool(obj.get("commutative", False)),
                strict=bool(obj.get("strict", True)),
                names=tuple(obj["names"]) if obj.get("names") else None,
            )
        except (KeyError, TypeError) as exc:
            raise InvalidAlgebra(f"malformed algebra description: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "ConcreteAlgebra":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def element_text(self, a: Vector) -> str:
        if not a:
            return "0"
        names = self.names or tuple(f"e{i}" for i in range(self.dim))
        parts = []
        for k in sorted(a):
            c = a[k]
            coef = "" if c == 1 else "-" if c == -1 else f"{scalars.fmt(c)}*"
            parts.append(f"{coef}{names[k]}")
        return " + ".join(parts).replace("+ -", "- ")


def zero_truncate_product(alg: ConcreteAlgebra) -> ConcreteAlgebra:
    """Keep ``e_i e_j`` only when both factors have degree 0."""
    n = alg.dim
    zero = tuple(0 for _ in range(n))
    mul = tuple(tuple(alg.mul[i][j] if alg.degrees[i] == 0 and alg.degrees[j] == 0 else zero
                      for j in range(n)) for i in range(n))
    return ConcreteAlgebra(n, alg.degrees, mul, alg.delta, alg.commutative, alg.strict, alg.names)


# -- evaluation -------------------------------------------------------------------------------

def _as_vector(a, n: int) -> Vector:
    if isinstance(a, dict):
        return {int(k): norm(v) for k, v in a.items() if v}
    if isinstance(a, int) and not isinstance(a, bool):
        return {a: 1}
    if len(a) != n:
        raise ArityMismatch(f"element has {len(a)} coordinates, algebra has dimension {n}")
    return _sparse(a)


def _value(m, alg: ConcreteAlgebra, idx: Sequence[int]) -> Vector:
    if type(m) is int:
        return {idx[m - 1]: 1}
    if m[0] == D:
        return alg.apply_delta(_value(m[1], alg, idx))
    out = _value(m[1], alg, idx)
    for child in m[2:]:
        if not out:
            return out
        out = alg.times(out, _value(child, alg, idx))
    return out


def evaluate_basis(op: NatOp, alg: ConcreteAlgebra, idx: Sequence[int]) -> Vector:
    """Value of ``op`` on the basis tuple ``(e_{idx_1}, ..., e_{idx_k})``."""
    degs = (0,) + tuple(alg.degrees[i] & 1 for i in idx) if alg.strict else None
    out: Vector = {}
    for m, c in op.terms.items():
        s = -1 if degs is not None and fa.refsign(m, degs) else 1
        for k, v in _value(m, alg, idx).items():
            out[k] = out.get(k, 0) + s * c * v
    return {k: norm(v) for k, v in out.items() if v}


def evaluate(op: NatOp, alg: ConcreteAlgebra, args: Sequence) -> Vector:
    """Multilinear evaluation of ``op`` on algebra elements."""
    if len(args) != op.arity:
        raise ArityMismatch(f"operation has arity {op.arity}, got {len(args)} arguments")
    if op.flavor == COMM and not alg.commutative:
        raise FlavorMismatch("commutative operations need a commutative algebra")
    vecs = [_as_vector(a, alg.dim) for a in args]
    if alg.strict:
        for v in vecs:
            alg.parity(v)
    out: Vector = {}
    for choice in product(*[sorted(v.items()) for v in vecs]):
        coef = 1
        for _, c in choice:
            coef *= c
        for k, v in evaluate_basis(op, alg, [i for i, _ in choice]).items():
            out[k] = out.get(k, 0) + coef * v
    return {k: norm(v) for k, v in out.items() if v}


def vanishes_identically(op: NatOp, alg: ConcreteAlgebra) -> Optional[Tuple[Tuple[int, ...], Vector]]:
    """``None`` when ``op`` vanishes on every basis tuple, else the first witness."""
    for idx in product(range(alg.dim), repeat=op.arity):
        val = evaluate_basis(op, alg, idx)
        if val:
            return idx, val
    return None


@dataclass
class DerivationOrder:
    family: str
    order: Optional[int]
    max_k: int
    vanishing: List[bool]
    witnesses: Dict[int, Tuple[Tuple[int, ...], Vector]]
    relaxed: bool

    def order_text(self) -> str:
        return str(self.order) if self.order is not None else f">= {self.max_k}"

    def to_json(self, alg: Optional[ConcreteAlgebra] = None) -> dict:
        out = {"family": self.family, "order": self.order if self.order is not None else f">={self.max_k}",
               "max_k": self.max_k, "parity_relaxed": self.relaxed,
               "vanishing": {str(k): v for k, v in enumerate(self.vanishing, start=1)}}
        if self.witnesses:
            out["witnesses"] = {
                str(k): {"basis_tuple": list(idx),
                         "value": alg.element_text(val) if alg else
                         {str(i): scalars.to_json(c) for i, c in val.items()}}
                for k, (idx, val) in sorted(self.witnesses.items())}
        return out


def derivation_order(alg: ConcreteAlgebra, family: Union[str, BraceFamily], max_k: int) -> DerivationOrder:
    """Smallest ``r >= 0`` with component ``r + 1`` vanishing on all basis tuples."""
    if isinstance(family, str):
        if family not in FAMILY_FLAVOR:
            raise UnknownFamily(f"unknown family {family!r}")
        name, flavor = family, FAMILY_FLAVOR[family]
        comps = [closed_form(family, k) for k in range(1, max_k + 1)]
    else:
        name, flavor = "custom", family.flavor
        comps = [family[k] for k in range(1, max_k + 1)]
    if flavor == COMM and not alg.commutative:
        raise FlavorMismatch(f"family {name} is commutative but the algebra is not")
    vanishing, witnesses = [], {}
    for k, op in enumerate(comps, start=1):
        w = vanishes_identically(op, alg)
        vanishing.append(w is None)
        if w is not None:
            witnesses[k] = w
    order = next((k - 1 for k, v in enumerate(vanishing, start=1) if v), None)
    return DerivationOrder(name, order, max_k, vanishing, witnesses, not alg.strict)


# -- bundled algebras ------------------------------------------------------------------------

def monomial_algebra(gens: Sequence[Tuple[str, int, int]], delta: Dict[tuple, Dict[tuple, object]],
                     strict: bool = True) -> ConcreteAlgebra:
    """Graded-commutative algebra on generators ``(name, degree, nilpotency)``.

    Basis elements are exponent vectors in generator order; ``delta`` maps
    exponent vectors to combinations of exponent vectors (missing keys are 0).
    """
    ranges = [range(nil) for _, _, nil in gens]
    basis = sorted(product(*ranges), key=lambda e: (sum(e), tuple(-x for x in e)))
    index = {e: i for i, e in enumerate(basis)}
    n = len(basis)
    degs = tuple(sum(g[1] * x for g, x in zip(gens, e)) for e in basis)

    def mult(a, b):
        tot = tuple(x + y for x, y in zip(a, b))
        if any(t >= g[2] for t, g in zip(tot, gens)):
            return None, 0
        sign = 1
        if strict:
            for i in range(len(gens)):
                for j in range(i):
                    if a[i] and b[j] and (gens[i][1] * a[i] * gens[j][1] * b[j]) & 1:
                        sign = -sign
        return tot, sign

    mul = []
    for a in basis:
        row = []
        for b in basis:
            col = [0] * n
            tot, s = mult(a, b)
            if tot is not None:
                col[index[tot]] = s
            row.append(tuple(col))
        mul.append(tuple(row))
    dmat = []
    for e in basis:
        r = [0] * n
        for t, c in delta.get(e, {}).items():
            r[index[t]] = c
        dmat.append(tuple(r))

    def name(e):
        parts = []
        for (g, _, _), x in zip(gens, e):
            if x == 1:
                parts.append(g)
            elif x > 1:
                parts.append(f"{g}^{x}")
        return "".join(parts) or "1"

    return ConcreteAlgebra(n, degs, tuple(mul), tuple(dmat), True, strict, tuple(name(e) for e in basis))


def truncated_polynomial(n: int, delta: str = "d2", ring=None) -> ConcreteAlgebra:
    """``k[x]/(x^n)`` in parity-relaxed mode with ``Delta`` one of ``d2``, ``d1``, ``zero``.

    Over ``Q`` neither ``d/dx`` nor ``d^2/dx^2`` preserves the ideal ``(x^n)``,
    so they are not derivations of the stated orders on the quotient; over
    ``Z/pZ`` with ``p | n`` they are.
    """
    if delta not in ("d2", "d1", "zero"):
        raise AlgebraError("delta must be d2, d1 or zero")
    dmap = {}
    for e in range(n):
        if delta == "d1" and e >= 1:
            dmap[(e,)] = {(e - 1,): e}
        elif delta == "d2" and e >= 2:
            dmap[(e,)] = {(e - 2,): e * (e - 1)}
    alg = monomial_algebra([("x", 0, n)], dmap, strict=False)
    return alg if ring is None else map_algebra(alg, ring)


def map_algebra(alg: ConcreteAlgebra, ring) -> ConcreteAlgebra:
    """Change of scalars for the structure constants and ``Delta``."""
    conv = lambda c: scalars.convert(c, ring)
    mul = tuple(tuple(tuple(conv(c) for c in col) for col in row) for row in alg.mul)
    delta = tuple(tuple(conv(c) for c in row) for row in alg.delta)
    return ConcreteAlgebra(alg.dim, alg.degrees, mul, delta, alg.commutative, alg.strict, alg.names)


def grassmann2() -> ConcreteAlgebra:
    """``Lambda(t1, t2)`` with ``|t1| = 1``, ``|t2| = -1`` and the odd derivation ``d/dt2``."""
    return monomial_algebra([("t1", 1, 2), ("t2", -1, 2)],
                            {(0, 1): {(0, 0): 1}, (1, 1): {(1, 0): -1}})


def mixed_degree_algebra() -> ConcreteAlgebra:
    """``Q[x]/(x^2) (x) Lambda(u, w)`` with ``|u| = -1``, ``|w| = 1``.

    ``Delta``: ``u -> 1``, ``x -> w``, ``xu -> uw``, ``xuw -> xw``.
    """
    return monomial_algebra([("x", 0, 2), ("u", -1, 2), ("w", 1, 2)], {
        (0, 1, 0): {(0, 0, 0): 1},
        (1, 0, 0): {(0, 0, 1): 1},
        (1, 1, 0): {(0, 1, 1): 1},
        (1, 1, 1): {(1, 0, 1): 1},
    })


def upper_triangular(delta: str = "nonderivation") -> ConcreteAlgebra:
    """2x2 upper-triangular matrices ``E11, E12, E22`` (parity-relaxed).

    ``nonderivation``: ``Delta(E11) = E12``, sending the identity to a nilpotent.
    ``inner``: ``Delta = [E12, -]``, a derivation.
    """
    # e0 = E11, e1 = E12, e2 = E22
    table = {(0, 0): 0, (0, 1): 1, (1, 2): 1, (2, 2): 2}
    mul = []
    for i in range(3):
        row = []
        for j in range(3):
            col = [0, 0, 0]
            if (i, j) in table:
                col[table[(i, j)]] = 1
            row.append(tuple(col))
        mul.append(tuple(row))
    if delta == "nonderivation":
        d = ((0, 1, 0), (0, 0, 0), (0, 0, 0))
    elif delta == "inner":
        # [E12, E11] = -E12, [E12, E12] = 0, [E12, E22] = E12
        d = ((0, -1, 0), (0, 0, 0), (0, 1, 0))
    else:
        raise AlgebraError("delta must be nonderivation or inner")
    return ConcreteAlgebra(3, (0, 0, 0), tuple(mul), d, False, False, ("E11", "E12", "E22"))


BUNDLED = {
    "poly5_d2": lambda: truncated_polynomial(5, "d2"),
    "poly5_d1": lambda: truncated_polynomial(5, "d1"),
    "poly5_zero": lambda: truncated_polynomial(5, "zero"),
    "poly5_d2_mod5": lambda: truncated_polynomial(5, "d2", scalars.Zmod(5)),
    "poly5_d1_mod5": lambda: truncated_polynomial(5, "d1", scalars.Zmod(5)),
    "grassmann2": grassmann2,
    "mixed_degree": mixed_degree_algebra,
    "upper_triangular": upper_triangular,
    "upper_triangular_inner": lambda: upper_triangular("inner"),
}


def load_algebra(spec: str) -> ConcreteAlgebra:
    """A bundled algebra name or a path to an algebra JSON file."""
    if spec in BUNDLED:
        return BUNDLED[spec]()
    try:
        return ConcreteAlgebra.load(spec)
    except FileNotFoundError as exc:
        raise AlgebraError(f"no bundled algebra or file named {spec!r}") from exc

