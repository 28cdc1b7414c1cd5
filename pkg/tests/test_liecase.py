import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from braces import liecase as lc
from braces.liecase import B, LieExpr, WedgePair

PARS3 = list(lc.all_parities(3))


def g(i, par):
    return LieExpr.gen(i, par)


def commutator_words(t, par):
    """Oracle: expand a bracket tree into signed tensor words by hand."""
    if type(t) is int:
        return {(t,): 1}, par[t - 1]
    a, pa = commutator_words(t[1], par)
    b, pb = commutator_words(t[2], par)
    out = {}
    sign = -1 if pa & pb else 1
    for wa, ca in a.items():
        for wb, cb in b.items():
            out[wa + wb] = out.get(wa + wb, 0) + ca * cb
            out[wb + wa] = out.get(wb + wa, 0) - sign * ca * cb
    return {w: c for w, c in out.items() if c}, (pa + pb) % 2


@pytest.mark.parametrize("par", PARS3)
def test_words_match_oracle(par):
    for t in [(B, 1, 2), (B, 2, 1), (B, 1, (B, 2, 3)), (B, (B, 3, 1), 2)]:
        assert LieExpr.from_tree(t, par).words() == commutator_words(t, par)[0]


@pytest.mark.parametrize("par", PARS3)
def test_antisymmetry(par):
    v1, v2 = g(1, par), g(2, par)
    s = -1 if par[0] & par[1] else 1
    assert lc.lie_bracket(v2, v1) == lc.lie_bracket(v1, v2).scale(-s)


def test_even_square_vanishes_odd_square_survives():
    assert lc.lie_bracket(g(1, (0,)), g(1, (0,))).is_zero()
    assert not lc.lie_bracket(g(1, (1,)), g(1, (1,))).is_zero()


@pytest.mark.parametrize("par", PARS3)
def test_graded_jacobi(par):
    x, y, z = (g(i, par) for i in (1, 2, 3))
    br = lc.lie_bracket

    def s(a, b):
        return -1 if par[a - 1] & par[b - 1] else 1

    total = (br(x, br(y, z)).scale(s(1, 3)) + br(y, br(z, x)).scale(s(2, 1))
             + br(z, br(x, y)).scale(s(3, 2)))
    assert total.is_zero()


def test_diagonal_display():
    par = (0, 0, 0)
    assert lc.diagonal_D(g(1, par)).is_zero()
    assert lc.diagonal_D(lc.bracket_of(par, 1, 2)) == lc.wedge(g(1, par), g(2, par))
    x = lc.bracket_of(par, 1, 2, 3)
    expected = (lc.wedge(g(1, par), lc.bracket_of(par, 2, 3)).scale(2)
                + lc.wedge(g(2, par), lc.bracket_of(par, 3, 1)).scale(-1)
                + lc.wedge(g(3, par), lc.bracket_of(par, 1, 2)).scale(-1))
    assert lc.diagonal_D(x) == expected
    assert str(lc.diagonal_D(x)) == "2*v1^[v2,v3] + v2^[v1,v3] - v3^[v1,v2]"


def test_diagonal_length_four_unsupported():
    par = (0, 0, 0, 0)
    with pytest.raises(lc.LengthUnsupported):
        lc.diagonal_D(lc.bracket_of(par, 1, 2, 3, 4))


@pytest.mark.parametrize("par", PARS3)
def test_diagonal_is_cocommutative_and_splits_bracket(par):
    x2 = lc.bracket_of(par[:2], 1, 2)
    assert lc.lambda2(lc.diagonal_D(x2)) == x2
    x3 = lc.bracket_of(par, 1, 2, 3)
    d = lc.diagonal_D(x3)
    assert d.swapped() == d
    assert lc.lambda2(d) == x3.scale(3)


def test_compose_examples():
    assert lc.compose_lie_auto((1, 1), (-1, 2)) == (0, 0)
    assert lc.compose_lie_auto((-1, 2), (1, 1)) == (0, 0)
    assert lc.compose_lie_auto((0, 0), (5, 7)) == (5, 7)
    assert lc.compose_lie_auto((1, 0), (1, 0)) == (2, 3)
    assert lc.inverse_lie_auto((1, 1)) == (-1, 2)


@settings(max_examples=30, deadline=None)
@given(*(st.integers(-5, 5) for _ in range(6)))
def test_compose_associative_with_unit(a, b, c, d, e, f):
    x, y, z = (a, b), (c, d), (e, f)
    assert lc.compose_lie_auto(lc.compose_lie_auto(x, y), z) == lc.compose_lie_auto(x, lc.compose_lie_auto(y, z))
    assert lc.compose_lie_auto(x, (0, 0)) == x and lc.compose_lie_auto((0, 0), x) == x


@settings(max_examples=20, deadline=None)
@given(*(st.integers(-4, 4) for _ in range(4)), st.sampled_from(PARS3))
def test_compose_formula_matches_diagonal_route(a, b, c, d, par):
    assert lc.compose_lie_auto((a, b), (c, d)) == lc.compose_lie_auto_via_diagonal((a, b), (c, d), par)


def test_c2_display():
    par = (1, 0)
    v1, v2 = g(1, par), g(2, par)
    expected = lc.lie_bracket(v1, v2).delta() - lc.lie_bracket(v1.delta(), v2) + lc.lie_bracket(v1, v2.delta())
    assert lc.c_braces(2, [1, 2], par) == expected
    assert lc.c_braces(1, [1], par) == v1.delta()
    with pytest.raises(lc.ArityUnsupported):
        lc.c_braces(4, [1, 2, 3, 4], (0, 0, 0, 0))


@pytest.mark.parametrize("par", PARS3)
def test_c3_reduction(par):
    assert lc.c3_identity_holds(par)


@pytest.mark.parametrize("par", PARS3)
def test_braces_vanish_for_derivations(par):
    assert lc.c_braces(2, [1, 2], par[:2]).expand_derivation().is_zero()
    assert lc.c_braces(3, [1, 2, 3], par).expand_derivation().is_zero()
    assert not lc.c_braces(1, [1], par[:1]).expand_derivation().is_zero()


def test_delta_squared_zero():
    x = lc.bracket_of((0, 1), 1, 2)
    assert x.delta().delta().is_zero()


def test_eulerian_idempotents():
    e1 = lc.eulerian_idempotent(1)
    assert e1.apply(("a",)) == {("a",): 1}
    for k in (2, 3):
        e = lc.eulerian_idempotent(k)
        assert e @ e == e
    e2 = lc.eulerian_idempotent(2)
    assert e2.apply(("a", "b")) == {("a", "b"): Fraction(1, 2), ("b", "a"): Fraction(-1, 2)}
    with pytest.raises(lc.ArityUnsupported):
        lc.eulerian_idempotent(4)


def test_eulerian_three_oracle():
    """Hand expansion: [[x1,x2],x3] + [x1,[x2,x3]] over 6."""
    e3 = lc.eulerian_idempotent(3)
    raw = {}
    for t in ((B, (B, 1, 2), 3), (B, 1, (B, 2, 3))):
        for w, c in commutator_words(t, (0, 0, 0))[0].items():
            raw[w] = raw.get(w, 0) + c
    assert e3.terms == {w: Fraction(c, 6) for w, c in raw.items() if c}


def test_json_roundtrip():
    t = (B, 1, (B, 2, 3))
    assert lc.lie_tree_to_json(t) == ["b", 1, ["b", 2, 3]]
    assert lc.lie_tree_from_json(["b", 1, ["b", 2, 3]]) == t
    x = lc.c_braces(2, [1, 2], (1, 1))
    assert LieExpr.from_json(x.to_json()) == x


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_normalization_stable(seed):
    rng = random.Random(seed)
    par = tuple(rng.randint(0, 1) for _ in range(3))

    def rand_tree(labels):
        if len(labels) == 1:
            return labels[0]
        cut = rng.randint(1, len(labels) - 1)
        return (B, rand_tree(labels[:cut]), rand_tree(labels[cut:]))

    labels = [rng.randint(1, 3) for _ in range(rng.randint(2, 4))]
    t = rand_tree(labels)
    x = LieExpr.from_tree(t, par)
    again = LieExpr(par, dict(x.terms))
    assert again == x
    assert x.words() == commutator_words(t, par)[0]
