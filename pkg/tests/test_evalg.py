import json
import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from braces import endo as en
from braces import evalg as ev
from braces import families as fm
from braces import natops as no
from braces import scalars
from braces import series as sr
from braces.evalg import ConcreteAlgebra


def poly(n, delta):
    return ev.truncated_polynomial(n, delta)


def test_koszul_phi2_second_derivative():
    alg = poly(4, "d2")
    x = {1: 1}
    assert ev.evaluate(fm.closed_form("koszul", 2), alg, [x, x]) == {0: 2}


def test_zero_delta_kills_everything():
    alg = poly(5, "zero")
    for name in ("koszul", "exotic_hereditary"):
        for k in (1, 2, 3):
            assert ev.vanishes_identically(fm.closed_form(name, k), alg) is None
    assert ev.derivation_order(alg, "koszul", 4).order == 0


def test_borjeson_witness_on_triangular_matrices():
    alg = ev.upper_triangular("nonderivation")
    witness = ev.vanishes_identically(fm.closed_form("borjeson", 2), alg)
    assert witness is not None
    inner = ev.upper_triangular("inner")
    assert ev.vanishes_identically(fm.closed_form("borjeson", 2), inner) is None
    assert ev.derivation_order(inner, "borjeson", 4).order == 1


def test_orders_over_prime_field():
    """Over Z/5Z the derivatives preserve (x^5); the classical orders appear."""
    d2 = ev.truncated_polynomial(5, "d2", scalars.Zmod(5))
    d1 = ev.truncated_polynomial(5, "d1", scalars.Zmod(5))
    r2 = ev.derivation_order(d2, "koszul", 5)
    assert r2.order == 2 and r2.vanishing[3] is True
    assert ev.derivation_order(d1, "koszul", 5).order == 1


def test_orders_over_rationals_see_the_ideal():
    """Over Q, d/dx and d^2/dx^2 on Q[x]/(x^5) are not operators of order 1 and 2."""
    d2 = poly(5, "d2")
    assert ev.evaluate(fm.closed_form("koszul", 3), d2, [{1: 1}, {1: 1}, {3: 1}]) == {3: -20}
    d1 = poly(5, "d1")
    assert ev.evaluate(fm.closed_form("koszul", 2), d1, [{1: 1}, {4: 1}]) == {4: -5}


def test_grassmann_odd_derivation():
    alg = ev.grassmann2()
    assert ev.derivation_order(alg, "koszul", 4).order == 1


def test_flavor_and_arity_errors():
    alg = ev.upper_triangular()
    with pytest.raises(ev.FlavorMismatch):
        ev.derivation_order(alg, "koszul", 3)
    with pytest.raises(ev.ArityMismatch):
        ev.evaluate(fm.closed_form("borjeson", 2), alg, [{0: 1}])


def test_inhomogeneous_argument_rejected():
    alg = ev.mixed_degree_algebra()
    with pytest.raises(ev.InhomogeneousArgument):
        ev.evaluate(fm.closed_form("koszul", 2), alg, [{1: 1, 2: 1}, {0: 1}])


def test_invalid_algebras():
    zero = (0, 0)
    nonassoc = (((0, 1), zero), ((1, 0), zero))
    with pytest.raises(ev.InvalidAlgebra):
        ConcreteAlgebra(2, (0, 0), nonassoc, (zero, zero), False, False)
    with pytest.raises(ev.InvalidAlgebra):
        ConcreteAlgebra(1, (0,), (((1,),),), ((1,),), False, True)


def test_json_roundtrip(tmp_path):
    alg = ev.mixed_degree_algebra()
    p = tmp_path / "alg.json"
    p.write_text(json.dumps(alg.to_json()))
    assert ev.load_algebra(str(p)) == alg
    assert ev.load_algebra("poly5_d2") == poly(5, "d2")
    with pytest.raises(ev.AlgebraError):
        ev.load_algebra("no_such_algebra")


def test_degree_zero_algebra_unchanged_by_truncation():
    alg = poly(4, "d1")
    assert ev.zero_truncate_product(alg) == alg


def super_exotic_oracle(alg, k, idx):
    """The displayed case split, computed with the original product."""
    degs = tuple(alg.degrees[i] for i in idx)
    e = [alg.basis(i) for i in idx]
    t, d = alg.times, alg.apply_delta
    neg = lambda v: {a: -c for a, c in v.items()}
    if all(x == 0 for x in degs):
        acc = e[0]
        for v in e[1:]:
            acc = t(acc, v)
        return d(acc)
    if k == 2 and degs == (-1, 0):
        return neg(t(d(e[0]), e[1]))
    if k == 2 and degs == (0, -1):
        return neg(t(e[0], d(e[1])))
    if k == 3 and degs == (0, -1, 0):
        return t(t(e[0], d(e[1])), e[2])
    return {}


@pytest.mark.parametrize("k", [2, 3, 4])
def test_super_exotic_case_split(k):
    alg = ev.mixed_degree_algebra()
    trunc = ev.zero_truncate_product(alg)
    op = fm.closed_form("borjeson", k)
    hits = 0
    for idx in product(range(alg.dim), repeat=k):
        got = ev.evaluate_basis(op, trunc, idx)
        assert got == super_exotic_oracle(alg, k, idx), idx
        hits += bool(got)
    assert hits > 0


def test_super_exotic_negative_case_is_realized():
    alg = ev.mixed_degree_algebra()
    trunc = ev.zero_truncate_product(alg)
    u = alg.names.index("u")
    x = alg.names.index("x")
    assert ev.evaluate_basis(fm.closed_form("borjeson", 2), trunc, (u, x)) == {x: -1}


@pytest.mark.parametrize("name", ["poly5_d2_mod5", "poly5_d1_mod5", "poly5_zero", "grassmann2",
                                  "mixed_degree", "upper_triangular_inner"])
def test_hereditarity_consequence(name):
    alg = ev.load_algebra(name)
    for fam in ("exotic_hereditary", "hereditary_nonrecursive", "borjeson"):
        if fm.FAMILY_FLAVOR[fam] == "comm" and not alg.commutative:
            continue
        rep = ev.derivation_order(alg, fam, 5)
        for r in range(len(rep.vanishing) - 1):
            if rep.vanishing[r]:
                assert rep.vanishing[r + 1], (fam, r)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_multilinearity(seed):
    rng = random.Random(seed)
    alg = poly(5, "d2")
    op = fm.closed_form("koszul", 2)
    a = {i: rng.randint(-3, 3) for i in range(5)}
    b = {i: rng.randint(-3, 3) for i in range(5)}
    c = {i: rng.randint(-3, 3) for i in range(5)}
    s = rng.randint(-4, 4)
    lhs = ev.evaluate(op, alg, [{i: a.get(i, 0) + s * b.get(i, 0) for i in range(5)}, c])
    ra = ev.evaluate(op, alg, [a, c])
    rb = ev.evaluate(op, alg, [b, c])
    rhs = {i: ra.get(i, 0) + s * rb.get(i, 0) for i in range(5)}
    assert lhs == {i: v for i, v in rhs.items() if v}


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_symbolic_and_concrete_layers_agree(seed):
    rng = random.Random(seed)
    alg = ev.mixed_degree_algebra()
    s = sr.named("exp_minus_one", 3)
    fam = en.twist_series(s)
    for k in (2, 3):
        idx = [rng.randrange(alg.dim) for _ in range(k)]
        assert ev.evaluate_basis(fam[k], alg, idx) == ev.evaluate_basis(fm.closed_form("koszul", k), alg, idx)
