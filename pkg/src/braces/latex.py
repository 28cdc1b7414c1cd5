"""LaTeX rendering of natural operations, with unshuffle sums for commutative orbits."""

from __future__ import annotations

from itertools import permutations
from typing import Dict, List, Tuple

from . import freealg as fa
from . import scalars
from .freealg import COMM, D
from .natops import NatOp


def mono_latex(m, arg: str = "a", sigma: bool = False) -> str:
    if type(m) is int:
        return f"{arg}_{{\\sigma({m})}}" if sigma else f"{arg}_{{{m}}}"
    if m[0] == D:
        return f"\\Delta({mono_latex(m[1], arg, sigma)})"
    return "".join(mono_latex(c, arg, sigma) for c in m[1:])


def scalar_latex(a) -> str:
    a = scalars.norm(a)
    if isinstance(a, int):
        return str(a)
    if isinstance(a, scalars.Mod):
        return f"{a.val}"
    return f"\\tfrac{{{a.numerator}}}{{{a.denominator}}}"


def _coef(c, first: bool) -> str:
    neg = not isinstance(c, scalars.Mod) and c < 0
    a = -c if neg else c
    body = "" if a == 1 else scalar_latex(a)
    if first:
        return ("-" if neg else "") + body
    return (" - " if neg else " + ") + body


def _standard_labels(m) -> Tuple[object, Dict[int, int]]:
    """Relabel so that leaves read ``1..k`` from left to right."""
    order = [s for s in fa.reading(m) if s > 0]
    mapping = [0] * (len(order) + 1)
    for new, old in enumerate(order, start=1):
        mapping[old] = new
    return fa.relabel(m, tuple(mapping)), mapping


def _orbit(op: NatOp, rep) -> set:
    k = op.arity
    out = set()
    for perm in permutations(range(1, k + 1)):
        out.add(fa.relabel(rep, (0,) + perm))
    return {next(iter(NatOp.from_trees(COMM, k, [(m, 1)], op.degree).terms)) for m in out}


def natop_latex(op: NatOp, name: str = "m", arg: str = "a", group_orbits: bool = True) -> str:
    """``name_k(a_1,...,a_k) = ...``; Koszul signs are left implicit as in classical displays."""
    k = op.arity
    lhs = f"{name}_{{{k}}}({', '.join(f'{arg}_{{{i}}}' for i in range(1, k + 1))})"
    if not op.terms:
        return f"{lhs} = 0"
    pieces: List[str] = []
    remaining = dict(op.terms)
    if op.flavor == COMM and group_orbits and k > 1:
        for m in [t for t, _ in op.sorted_terms()]:
            if m not in remaining:
                continue
            c = remaining[m]
            orb = _orbit(op, m)
            if len(orb) > 1 and all(remaining.get(t) == c for t in orb):
                rep, _ = _standard_labels(m)
                pieces.append(_coef(c, not pieces) + "\\sum_{\\sigma}\\varepsilon(\\sigma)"
                              + mono_latex(rep, arg, sigma=True))
                for t in orb:
                    remaining.pop(t)
    for m, c in sorted(remaining.items(), key=lambda mc: fa.key(mc[0])):
        pieces.append(_coef(c, not pieces) + mono_latex(m, arg))
    return f"{lhs} = " + "".join(pieces)


def family_latex(fam, name: str = "m") -> str:
    lines = [natop_latex(c, name) for c in fam.comps]
    return "\\begin{align*}\n" + " \\\\\n".join(l.replace(" = ", " &= ", 1) for l in lines) + "\n\\end{align*}"
