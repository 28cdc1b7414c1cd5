"""Free Lie algebra computations: the partial diagonal, automorphism components,
the C-infinity brace candidates of arity <= 3 and the low Eulerian idempotents.

Letters are generators ``v_i`` (the int ``i``) or formal symbols
``("d", w)`` standing for ``Delta`` applied to a basis bracket ``w``.  A
bracket tree is a letter or ``("b", left, right)``.  Elements are normalized
by expanding graded commutators in the tensor algebra and re-expressing the
result in the Lyndon basis (standard bracketings of Lyndon words, together
with the squares ``[u, u]`` of odd ones).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterable, List, Sequence, Tuple

from . import scalars
from .scalars import norm


class LieError(ValueError):
    pass


class LengthUnsupported(LieError):
    pass


class ArityUnsupported(LieError):
    pass


class InhomogeneousElement(LieError):
    pass


B = "b"
DL = "d"


# -- letters and trees ------------------------------------------------------------------------

def is_letter(t) -> bool:
    return type(t) is int or t[0] == DL


def bracket_tree(a, b):
    return (B, a, b)


def tree_key(t) -> tuple:
    if type(t) is int:
        return (0, t)
    if t[0] == DL:
        return (1, tree_key(t[1]))
    return (2, tree_key(t[1]), tree_key(t[2]))


def tree_letters(t) -> tuple:
    if is_letter(t):
        return (t,)
    return tree_letters(t[1]) + tree_letters(t[2])


def tree_length(t) -> int:
    return len(tree_letters(t))


def letter_parity(l, par: tuple) -> int:
    if type(l) is int:
        if not 1 <= l <= len(par):
            raise LieError(f"generator v{l} has no parity assigned")
        return par[l - 1]
    return (tree_parity(l[1], par) + 1) & 1


def tree_parity(t, par: tuple) -> int:
    return sum(letter_parity(l, par) for l in tree_letters(t)) & 1


# -- tensor expansion and normalization ------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def expand_tree(t, par: tuple) -> Tuple[Tuple[tuple, object], ...]:
    """Graded-commutator expansion ``[a, b] = ab - (-1)^{|a||b|} ba`` into tensor words."""
    if is_letter(t):
        return (((t,), 1),)
    a, b = t[1], t[2]
    s = -1 if tree_parity(a, par) & tree_parity(b, par) else 1
    out: Dict[tuple, object] = {}
    ea, eb = expand_tree(a, par), expand_tree(b, par)
    for wa, ca in ea:
        for wb, cb in eb:
            out[wa + wb] = out.get(wa + wb, 0) + ca * cb
            out[wb + wa] = out.get(wb + wa, 0) - s * ca * cb
    return tuple((w, c) for w, c in out.items() if c)


def _is_lyndon(word: tuple) -> bool:
    keys = tuple(tree_key(l) for l in word)
    return all(keys < keys[i:] + keys[:i] for i in range(1, len(keys)))


def standard_bracketing(word: tuple):
    if len(word) == 1:
        return word[0]
    for i in range(1, len(word)):
        if _is_lyndon(word[i:]):
            return (B, standard_bracketing(word[:i]), standard_bracketing(word[i:]))
    raise LieError("not a Lyndon word")


def _lyndon_words(letters: tuple) -> List[tuple]:
    words = sorted(set(permutations(letters)), key=lambda w: tuple(tree_key(l) for l in w))
    return [w for w in words if _is_lyndon(w)]


@lru_cache(maxsize=1 << 12)
def basis_trees(letters: tuple, par: tuple) -> Tuple:
    """Basis brackets whose letter multiset is ``letters`` (sorted by key)."""
    out = [standard_bracketing(w) for w in _lyndon_words(letters)]
    n = len(letters)
    if n % 2 == 0:
        half = letters[0::2]
        if letters[1::2] == half:
            for w in _lyndon_words(half):
                u = standard_bracketing(w)
                if tree_parity(u, par):
                    out.append((B, u, u))
    return tuple(out)


@lru_cache(maxsize=1 << 12)
def _basis_solver(letters: tuple, par: tuple):
    """Row-reduced system expressing tensor words in the basis of ``letters``."""
    basis = basis_trees(letters, par)
    cols = [dict(expand_tree(b, par)) for b in basis]
    words = sorted({w for c in cols for w in c}, key=lambda w: tuple(tree_key(l) for l in w))
    return basis, cols, words


def _solve(letters: tuple, par: tuple, target: Dict[tuple, object]) -> Dict:
    basis, cols, words = _basis_solver(letters, par)
    extra = [w for w in target if w not in set(words)]
    if extra:
        raise LieError(f"tensor word {extra[0]} lies outside the free Lie algebra")
    nb = len(basis)
    rows = [[Fraction(cols[j].get(w, 0)) for j in range(nb)] + [Fraction(target.get(w, 0))]
            for w in words]
    piv_cols = []
    r = 0
    for c in range(nb):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if len(piv_cols) != nb:
        raise LieError("basis brackets are linearly dependent")
    if any(row[-1] != 0 for row in rows[r:]):
        raise LieError("element is not a Lie polynomial")
    return {basis[c]: norm(rows[i][-1]) for i, c in enumerate(piv_cols) if rows[i][-1] != 0}


def normalize_words(words: Dict[tuple, object], par: tuple) -> Dict:
    """Express a Lie polynomial given as tensor words in the basis."""
    groups: Dict[tuple, Dict[tuple, object]] = {}
    for w, c in words.items():
        if c:
            letters = tuple(sorted(w, key=tree_key))
            groups.setdefault(letters, {})[w] = c
    out: Dict = {}
    for letters, target in groups.items():
        out.update(_solve(letters, par, target))
    return out


# -- LieExpr ----------------------------------------------------------------------------------

class LieExpr:
    """Basis-canonical element of the free Lie algebra on graded letters."""

    __slots__ = ("par", "terms")

    def __init__(self, par: Sequence[int], terms: Dict = None, _normalized: bool = False):
        self.par = tuple(int(p) & 1 for p in par)
        terms = terms or {}
        if _normalized:
            self.terms = {t: c for t, c in terms.items() if c}
        else:
            words: Dict[tuple, object] = {}
            for t, c in terms.items():
                for w, cw in expand_tree(t, self.par):
                    words[w] = words.get(w, 0) + c * cw
            self.terms = normalize_words(words, self.par)

    @classmethod
    def gen(cls, i: int, par: Sequence[int]) -> "LieExpr":
        return cls(par, {i: 1}, _normalized=True)

    @classmethod
    def from_tree(cls, t, par: Sequence[int], coeff=1) -> "LieExpr":
        return cls(par, {t: coeff})

    @classmethod
    def zero(cls, par: Sequence[int]) -> "LieExpr":
        return cls(par, {}, _normalized=True)

    def _check(self, other: "LieExpr"):
        if self.par != other.par:
            raise LieError("elements use different parity assignments")

    def __add__(self, other: "LieExpr") -> "LieExpr":
        self._check(other)
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return LieExpr(self.par, out, _normalized=True)

    def __neg__(self) -> "LieExpr":
        return self.scale(-1)

    def __sub__(self, other: "LieExpr") -> "LieExpr":
        return self + (-other)

    def scale(self, c) -> "LieExpr":
        return LieExpr(self.par, {t: norm(v * c) for t, v in self.terms.items()}, _normalized=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, LieExpr) and self.par == other.par and self.terms == other.terms

    def __hash__(self):
        return hash((self.par, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def parity(self) -> int:
        ps = {tree_parity(t, self.par) for t in self.terms}
        if len(ps) > 1:
            raise InhomogeneousElement("element mixes parities")
        return ps.pop() if ps else 0

    def lengths(self) -> set:
        return {tree_length(t) for t in self.terms}

    def words(self) -> Dict[tuple, object]:
        out: Dict[tuple, object] = {}
        for t, c in self.terms.items():
            for w, cw in expand_tree(t, self.par):
                out[w] = out.get(w, 0) + c * cw
        return {w: norm(c) for w, c in out.items() if c}

    def coefficient(self, t):
        return self.terms.get(t, 0)

    def delta(self) -> "LieExpr":
        """Formal ``Delta``: each basis bracket ``w`` becomes the letter ``("d", w)``; ``Delta^2 = 0``."""
        out = {}
        for t, c in self.terms.items():
            if type(t) is not int and t[0] == DL:
                continue
            out[(DL, t)] = c
        return LieExpr(self.par, out, _normalized=True)

    def expand_derivation(self) -> "LieExpr":
        """Rewrite every ``Delta[a, b]`` as ``[Delta a, b] + (-1)^{|a|} [a, Delta b]``."""
        out = LieExpr.zero(self.par)
        for t, c in self.terms.items():
            out = out + _derive_tree(t, self.par).scale(c)
        return out

    def map_coeffs(self, f) -> "LieExpr":
        return LieExpr(self.par, {t: f(c) for t, c in self.terms.items()}, _normalized=True)

    def sorted_terms(self) -> List[Tuple[object, object]]:
        return sorted(self.terms.items(), key=lambda tc: tree_key(tc[0]))

    def to_json(self) -> dict:
        return {"parities": list(self.par),
                "terms": [[scalars.to_json(c), lie_tree_to_json(t)] for t, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, obj: dict) -> "LieExpr":
        par = tuple(obj["parities"])
        return cls(par, {lie_tree_from_json(t): scalars.from_json(c) for c, t in obj["terms"]})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t, c in self.sorted_terms():
            body = lie_tree_text(t)
            if c == 1:
                parts.append(f"+ {body}")
            elif c == -1:
                parts.append(f"- {body}")
            elif c < 0:
                parts.append(f"- {scalars.fmt(-c)}*{body}")
            else:
                parts.append(f"+ {scalars.fmt(c)}*{body}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    __repr__ = __str__


def _derive_tree(t, par) -> LieExpr:
    """Derivation rewrite of a single tree (letters ``("d", w)`` are expanded recursively)."""
    if type(t) is int:
        return LieExpr.gen(t, par)
    if t[0] == DL:
        return _derivation_of(t[1], par)
    return lie_bracket(_derive_tree(t[1], par), _derive_tree(t[2], par))


def _derivation_of(t, par) -> LieExpr:
    if type(t) is int:
        return LieExpr(par, {(DL, t): 1}, _normalized=True)
    if t[0] == DL:
        return LieExpr.zero(par)
    a, b = t[1], t[2]
    sa = -1 if tree_parity(a, par) else 1
    da, db = _derivation_of(a, par), _derivation_of(b, par)
    ea, eb = _derive_tree(a, par), _derive_tree(b, par)
    return lie_bracket(da, eb) + lie_bracket(ea, db).scale(sa)


def lie_bracket(a: LieExpr, b: LieExpr) -> LieExpr:
    a._check(b)
    words: Dict[tuple, object] = {}
    for ta, ca in a.terms.items():
        for tb, cb in b.terms.items():
            for w, c in expand_tree((B, ta, tb), a.par):
                words[w] = words.get(w, 0) + ca * cb * c
    return LieExpr(a.par, normalize_words(words, a.par), _normalized=True)


def bracket_of(par, *items) -> LieExpr:
    """Right-nested bracket of generators/elements: ``bracket_of(par, 1, 2, 3) = [v1,[v2,v3]]``."""
    els = [x if isinstance(x, LieExpr) else LieExpr.gen(x, par) for x in items]
    out = els[-1]
    for e in reversed(els[:-1]):
        out = lie_bracket(e, out)
    return out


# -- wedge pairs and the diagonal -------------------------------------------------------------

class WedgePair:
    """Combination of ``u ^ w`` with ``u ^ w = -(-1)^{|u||w|} w ^ u``.

    The sign rule is forced by ``D{v1, v2} = v1 ^ v2`` together with graded
    antisymmetry of the bracket.
    """

    __slots__ = ("par", "terms")

    def __init__(self, par, terms: Dict = None):
        self.par = tuple(par)
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def zero(cls, par) -> "WedgePair":
        return cls(par)

    def add_pair(self, u, w, c) -> None:
        if not c:
            return
        if tree_key(u) > tree_key(w):
            s = tree_parity(u, self.par) & tree_parity(w, self.par)
            u, w = w, u
            c = c if s else -c
        elif u == w and not tree_parity(u, self.par):
            return
        k = (u, w)
        v = norm(self.terms.get(k, 0) + c)
        if v:
            self.terms[k] = v
        else:
            self.terms.pop(k, None)

    def __add__(self, other: "WedgePair") -> "WedgePair":
        out = WedgePair(self.par, dict(self.terms))
        for (u, w), c in other.terms.items():
            out.add_pair(u, w, c)
        return out

    def scale(self, c) -> "WedgePair":
        return WedgePair(self.par, {k: norm(v * c) for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, WedgePair) and self.par == other.par and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def swapped(self) -> "WedgePair":
        """Rewrite every pair with its factors exchanged (then renormalize)."""
        out = WedgePair(self.par)
        for (u, w), c in self.terms.items():
            s = tree_parity(u, self.par) & tree_parity(w, self.par)
            out.add_pair(w, u, c if s else -c)
        return out

    def to_json(self) -> list:
        return [[scalars.to_json(c), lie_tree_to_json(u), lie_tree_to_json(w)]
                for (u, w), c in sorted(self.terms.items(), key=lambda kv: (tree_key(kv[0][0]),
                                                                             tree_key(kv[0][1])))]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (u, w), c in sorted(self.terms.items(), key=lambda kv: (tree_key(kv[0][0]), tree_key(kv[0][1]))):
            coef = "" if c == 1 else "-" if c == -1 else f"{scalars.fmt(c)}*"
            parts.append(f"{coef}{lie_tree_text(u)}^{lie_tree_text(w)}")
        return " + ".join(parts).replace("+ -", "- ")


def wedge(a: LieExpr, b: LieExpr) -> WedgePair:
    a._check(b)
    out = WedgePair(a.par)
    for u, cu in a.terms.items():
        for w, cw in b.terms.items():
            out.add_pair(u, w, norm(cu * cw))
    return out


def _koszul(seq_parities: Sequence[Tuple[int, int]]) -> int:
    """Koszul sign of sorting a permutation given as ``(position, parity)`` pairs."""
    sign = 1
    items = list(seq_parities)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i][0] > items[j][0] and items[i][1] & items[j][1]:
                sign = -sign
    return sign


def _cyc_sign(px, py, pz, order: Tuple[int, int, int]) -> int:
    p = {0: px, 1: py, 2: pz}
    return _koszul([(i, p[i]) for i in order])


def diagonal_tree(t, par) -> WedgePair:
    """The partial diagonal on a single bracket tree of length <= 3."""
    n = tree_length(t)
    if n == 1:
        return WedgePair.zero(par)
    if n == 2:
        out = WedgePair(par)
        out.add_pair(t[1], t[2], 1)
        return out
    if n != 3:
        raise LengthUnsupported("the diagonal is only available for brackets of length <= 3")
    if is_letter(t[1]):
        x, inner = t[1], t[2]
        y, z = inner[1], inner[2]
        return _diag3(x, y, z, par)
    inner, z = t[1], t[2]
    x, y = inner[1], inner[2]
    s = tree_parity(inner, par) & tree_parity(z, par)
    return _diag3(z, x, y, par).scale(1 if s else -1)


def _diag3(x, y, z, par) -> WedgePair:
    """``2 x^{y,z} - y^{z,x} - z^{x,y}`` with Koszul signs of the cyclic reorderings."""
    px, py, pz = (letter_parity(l, par) for l in (x, y, z))
    out = wedge(LieExpr.from_tree(x, par), LieExpr.from_tree((B, y, z), par)).scale(2)
    out = out + wedge(LieExpr.from_tree(y, par), LieExpr.from_tree((B, z, x), par)).scale(
        -_cyc_sign(px, py, pz, (1, 2, 0)))
    out = out + wedge(LieExpr.from_tree(z, par), LieExpr.from_tree((B, x, y), par)).scale(
        -_cyc_sign(px, py, pz, (2, 0, 1)))
    return out


def diagonal_D(a: LieExpr) -> WedgePair:
    out = WedgePair(a.par)
    for t, c in a.terms.items():
        if tree_length(t) > 3:
            raise LengthUnsupported("the diagonal is only available for brackets of length <= 3")
        out = out + diagonal_tree(t, a.par).scale(c)
    return out


def lambda2(p: WedgePair) -> LieExpr:
    """Bracket the two factors of every pair."""
    out = LieExpr.zero(p.par)
    for (u, w), c in p.terms.items():
        out = out + LieExpr.from_tree((B, u, w), p.par, c)
    return out


# -- automorphism components ------------------------------------------------------------------

def compose_lie_auto(f: Sequence, g: Sequence) -> Tuple:
    """Components ``(h_2, h_3)`` of ``psi phi`` for ``phi = (id, f_2 l_2, f_3 l_3)``, ``psi`` from ``g``."""
    f2, f3 = (scalars.qq(x) for x in f)
    g2, g3 = (scalars.qq(x) for x in g)
    return (norm(f2 + g2), norm(f3 + 3 * f2 * g2 + g3))


def compose_lie_auto_via_diagonal(f: Sequence, g: Sequence, par: Sequence[int] = (0, 0, 0)) -> Tuple:
    """Independent route: evaluate ``psi phi`` on ``{v1,v2}`` and ``{v1,{v2,v3}}`` through ``D``.

    ``L`` is modelled by the free Lie algebra itself, so ``l_k`` is iterated
    bracketing and the components are read off as coefficients.
    """
    f2, f3 = (scalars.qq(x) for x in f)
    g2, g3 = (scalars.qq(x) for x in g)
    par = tuple(par)
    x2 = bracket_of(par[:2], 1, 2)
    # (psi phi)_2 = psi_1 phi_2 + psi_2 (phi_1 ^ phi_1) D
    h2_val = x2.scale(f2) + lambda2(diagonal_D(x2)).scale(g2)
    x3 = bracket_of(par, 1, 2, 3)
    # (psi phi)_3 = psi_1 phi_3 + psi_2 (phi_1 ^ phi_2) D + psi_3
    d = diagonal_D(x3)
    mixed = WedgePair(par)
    for (u, w), c in d.terms.items():
        lu, lw = tree_length(u), tree_length(w)
        if (lu, lw) in ((1, 2), (2, 1)):
            mixed.add_pair(u, w, norm(c * f2))
    h3_val = x3.scale(f3) + lambda2(mixed).scale(g2) + x3.scale(g3)
    return (_ratio(h2_val, x2), _ratio(h3_val, x3))


def _ratio(val: LieExpr, ref: LieExpr):
    if val.is_zero():
        return 0
    t, c = next(iter(ref.terms.items()))
    r = Fraction(val.terms.get(t, 0)) / Fraction(c)
    if val != ref.scale(r):
        raise LieError("composite is not a multiple of the bracket map")
    return norm(r)


def inverse_lie_auto(f: Sequence) -> Tuple:
    """Inverse components: ``g_2 = -f_2``, ``g_3 = 3 f_2^2 - f_3``."""
    f2, f3 = (scalars.qq(x) for x in f)
    return (norm(-f2), norm(3 * f2 * f2 - f3))


# -- brace candidates --------------------------------------------------------------------------

def _as_expr(a, par) -> LieExpr:
    return a if isinstance(a, LieExpr) else LieExpr.gen(a, par)


def _sgn(p) -> int:
    return -1 if p & 1 else 1


def c_braces(k: int, args: Sequence, par: Sequence[int] = None) -> LieExpr:
    """Twisted brace candidates ``c_1, c_2, c_3`` on homogeneous arguments.

    Arguments are generator indices or :class:`LieExpr`; signs are the Koszul
    signs of moving ``Delta`` and the arguments from ``Delta a_1 a_2 a_3`` into
    each term's reading order.
    """
    if k not in (1, 2, 3):
        raise ArityUnsupported("brace candidates are only available for k <= 3")
    if len(args) != k:
        raise LieError(f"c_{k} takes {k} arguments")
    if par is None:
        par = next(a.par for a in args if isinstance(a, LieExpr))
    par = tuple(par)
    a = [_as_expr(x, par) for x in args]
    if k == 1:
        return a[0].delta()
    p = [x.parity for x in a]
    br = lie_bracket
    if k == 2:
        a1, a2 = a
        return (br(a1, a2).delta() - br(a1.delta(), a2)
                - br(a1, a2.delta()).scale(_sgn(p[0])))
    a1, a2, a3 = a
    e1 = _sgn(p[0] * (p[1] + p[2]))   # a1 a2 a3 -> a2 a3 a1
    e2 = _sgn(p[2] * (p[0] + p[1]))   # a1 a2 a3 -> a3 a1 a2
    out = br(a1, br(a2, a3)).delta()
    out = out - br(a1, br(a2, a3).delta()).scale(2 * _sgn(p[0]))
    out = out + (br(a2.delta(), br(a3, a1)) + br(a2, br(a3, a1).delta()).scale(_sgn(p[1]))).scale(e1)
    out = out + (br(a3.delta(), br(a1, a2)) + br(a3, br(a1, a2).delta()).scale(_sgn(p[2]))).scale(e2)
    out = out + (br(a1, br(a2.delta(), a3)).scale(_sgn(p[0]))
                 + br(a1, br(a2, a3.delta())).scale(_sgn(p[0] + p[1]))).scale(2)
    return out


def c3_reduction(args: Sequence, par: Sequence[int]) -> LieExpr:
    """``-2(-1)^{a1}[a1, c_2(a2,a3)] - c_2(a2,[a3,a1]) - c_2(a3,[a1,a2])`` with Koszul signs."""
    par = tuple(par)
    a1, a2, a3 = (_as_expr(x, par) for x in args)
    p = [a1.parity, a2.parity, a3.parity]
    e1 = _sgn(p[0] * (p[1] + p[2]))
    e2 = _sgn(p[2] * (p[0] + p[1]))
    out = lie_bracket(a1, c_braces(2, [a2, a3], par)).scale(-2 * _sgn(p[0]))
    out = out - c_braces(2, [a2, lie_bracket(a3, a1)], par).scale(e1)
    out = out - c_braces(2, [a3, lie_bracket(a1, a2)], par).scale(e2)
    return out


def c3_identity_holds(par: Sequence[int]) -> bool:
    par = tuple(par)
    return c_braces(3, [1, 2, 3], par) == c3_reduction([1, 2, 3], par)


# -- Eulerian idempotents -----------------------------------------------------------------------

class PermOp:
    """Endomorphism of ``T^k`` on ungraded symbols: ``y_1..y_k -> sum c_s y_{s(1)}..y_{s(k)}``."""

    def __init__(self, k: int, terms: Dict[tuple, object]):
        self.k = k
        self.terms = {s: norm(c) for s, c in terms.items() if c}

    def apply(self, word: Sequence) -> Dict[tuple, object]:
        out: Dict[tuple, object] = {}
        for s, c in self.terms.items():
            w = tuple(word[i - 1] for i in s)
            out[w] = norm(out.get(w, 0) + c)
        return {w: c for w, c in out.items() if c}

    def __matmul__(self, other: "PermOp") -> "PermOp":
        """``(self @ other)(y) = self(other(y))``."""
        out: Dict[tuple, object] = {}
        for t, ct in other.terms.items():
            for s, cs in self.terms.items():
                comp = tuple(t[i - 1] for i in s)
                out[comp] = out.get(comp, 0) + ct * cs
        return PermOp(self.k, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, PermOp) and self.k == other.k and self.terms == other.terms

    def to_json(self) -> dict:
        return {"k": self.k, "terms": [[list(s), scalars.to_json(c)]
                                       for s, c in sorted(self.terms.items())]}

    def __str__(self) -> str:
        parts = []
        for s, c in sorted(self.terms.items()):
            word = "".join(f"x{i}" for i in s)
            parts.append(f"{scalars.fmt(c)}*{word}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def _commutator_words(t) -> Dict[tuple, object]:
    return dict(expand_tree(t, (0,) * len(tree_letters(t))))


def eulerian_idempotent(k: int) -> PermOp:
    """``e_1 = id``, ``e_2 = [x1,x2]/2``, ``e_3 = ([[x1,x2],x3] + [x1,[x2,x3]])/6``."""
    if k == 1:
        return PermOp(1, {(1,): 1})
    if k == 2:
        words = _commutator_words((B, 1, 2))
        return PermOp(2, {w: Fraction(c, 2) for w, c in words.items()})
    if k == 3:
        words: Dict[tuple, object] = {}
        for t in ((B, (B, 1, 2), 3), (B, 1, (B, 2, 3))):
            for w, c in _commutator_words(t).items():
                words[w] = words.get(w, 0) + c
        return PermOp(3, {w: Fraction(c, 6) for w, c in words.items()})
    raise ArityUnsupported("no formula is known for k >= 4")


# -- JSON and text ---------------------------------------------------------------------------

def lie_tree_to_json(t):
    if type(t) is int:
        return t
    if t[0] == DL:
        return {"d": lie_tree_to_json(t[1])}
    return [B, lie_tree_to_json(t[1]), lie_tree_to_json(t[2])]


def lie_tree_from_json(obj):
    if isinstance(obj, bool):
        raise LieError("malformed bracket")
    if isinstance(obj, int):
        if obj < 1:
            raise LieError("generator indices start at 1")
        return obj
    if isinstance(obj, dict) and set(obj) == {"d"}:
        return (DL, lie_tree_from_json(obj["d"]))
    if isinstance(obj, list) and len(obj) == 3 and obj[0] == B:
        return (B, lie_tree_from_json(obj[1]), lie_tree_from_json(obj[2]))
    raise LieError(f"malformed bracket {obj!r}")


def lie_tree_text(t) -> str:
    if type(t) is int:
        return f"v{t}"
    if t[0] == DL:
        return f"D{lie_tree_text(t[1])}"
    return f"[{lie_tree_text(t[1])},{lie_tree_text(t[2])}]"


def parse_parities(text: str, n: int) -> Tuple[int, ...]:
    """``"0,1,0"`` or ``"010"`` into a parity tuple of length ``n``."""
    s = text.replace(",", "").strip()
    if len(s) != n or any(ch not in "01" for ch in s):
        raise LieError(f"expected {n} parities (0/1)")
    return tuple(int(ch) for ch in s)


def all_parities(n: int) -> Iterable[Tuple[int, ...]]:
    for m in range(1 << n):
        yield tuple((m >> i) & 1 for i in range(n))
