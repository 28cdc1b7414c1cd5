import random
from functools import lru_cache
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from braces import freealg as fa
from braces import natops as no
from braces.freealg import ASSOC, COMM, D, P
from braces.natops import NatComplex, NatOp


@lru_cache(maxsize=None)
def planar_trees_by_vertices(k):
    """Oracle: {v: number of planar trees with k leaves, v vertices, all of arity >= 2}."""
    if k == 1:
        return {0: 1}
    out = {}
    # root of arity r >= 2 with subtrees of sizes summing to k
    def rec(rest, parts, acc):
        if rest == 0:
            if parts >= 2:
                for v, n in acc.items():
                    out[v + 1] = out.get(v + 1, 0) + n
            return
        for s in range(1, rest + 1):
            if s == k:
                continue
            sub = planar_trees_by_vertices(s)
            new = {}
            for v1, n1 in acc.items():
                for v2, n2 in sub.items():
                    new[v1 + v2] = new.get(v1 + v2, 0) + n1 * n2
            rec(rest - s, parts + 1, new)
    rec(k, 0, {0: 1})
    return out


def assoc_dims_oracle(k):
    """Internal edges are all bulleted; any subset of the k + 1 external edges is."""
    out = [0] * (2 * k)
    external = k + 1 if k > 1 else 1
    for v, n in planar_trees_by_vertices(k).items():
        internal = max(v - 1, 0)
        for extra in range(external + 1):
            d = internal + extra
            if d < 2 * k:
                out[d] += n * comb(external, extra) * factorial(k)
    return tuple(out)


def test_small_dimensions():
    assert no.dims(ASSOC, 1) == (1, 1)
    assert no.dims(ASSOC, 2) == (2, 6, 6, 2)
    assert no.dims(COMM, 2) == (1, 2, 2, 1)
    assert NatComplex(COMM, 2).dims() == (1, 2, 2, 1)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_assoc_dims_match_tree_count(k):
    assert no.dims(ASSOC, k) == assoc_dims_oracle(k)
    assert NatComplex(ASSOC, k).dims() == assoc_dims_oracle(k)
    assert no.dims(ASSOC, k, "identity") == tuple(d // factorial(k) for d in assoc_dims_oracle(k))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_euler_characteristic_vanishes(k):
    assert no.euler_characteristic(ASSOC, k) == 0
    assert no.euler_characteristic(COMM, k) == 0
    assert no.euler_characteristic(ASSOC, k, "identity") == 0


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_degree_zero_dimensions(k):
    assert no.dims(ASSOC, k)[0] == factorial(k)
    assert no.dims(COMM, k)[0] == 1


def test_basis_is_duplicate_free_and_multilinear():
    for flavor in (ASSOC, COMM):
        for k in (1, 2, 3):
            for d in range(2 * k):
                ms = no.basis_monomials(flavor, k, d)
                assert len(set(ms)) == len(ms)
                assert all(fa.leaf_set_ok(m, k) and fa.delta_count(m) == d for m in ms)


def test_delta_of_identity_is_zero():
    assert no.differential(no.identity()).is_zero()
    assert no.differential(no.identity(COMM)).is_zero()


def test_delta_of_multiplication():
    b2 = no.differential(no.mu(2))
    assert b2.terms == {(D, (P, 1, 2)): 1, (P, (D, 1), 2): -1, (P, 1, (D, 2)): -1}


def test_compose_multiplications():
    assert no.compose_at(no.mu(2), 1, no.mu(2)) == no.mu(3)
    assert no.compose_at(no.mu(2), 2, no.mu(2)) == no.mu(3)


def test_compose_brace_with_product():
    b2 = no.differential(no.mu(2))
    out = no.compose_at(b2, 2, no.mu(2), sweep_check=True)
    assert out.coefficient((P, (D, 1), 2, 3)) == -1
    assert out.coefficient((D, (P, 1, 2, 3))) == 1
    assert out.coefficient((P, 1, (D, (P, 2, 3)))) == -1


def test_homotopy_rules():
    assert no.homotopy(NatOp(ASSOC, 2, {(D, (P, 1, 2)): 1})) == no.mu(2)
    assert no.homotopy(no.mu(2)).is_zero()
    assert no.homotopy(NatOp(ASSOC, 2, {(P, (D, 1), 2): 1})).is_zero()
    with pytest.raises(no.ArityTooSmall):
        no.homotopy(no.delta_op())


def test_compose_errors():
    with pytest.raises(no.SlotOutOfRange):
        no.compose_at(no.mu(2), 3, no.mu(2))
    with pytest.raises(no.FlavorMismatch):
        no.compose_at(no.mu(2), 1, no.mu(2, COMM))


def test_not_multilinear_rejected():
    with pytest.raises(no.NotMultilinear):
        NatOp(ASSOC, 2, {(P, 1, 1): 1})
    with pytest.raises(no.DegreeMismatch):
        NatOp(ASSOC, 2, {(P, 1, 2): 1, (D, (P, 1, 2)): 1})


def test_json_roundtrip():
    op = no.differential(no.mu(3, COMM)).scale(3)
    assert NatOp.from_json(op.to_json()) == op
    assert {tuple(t["coeff"]) for t in op.to_json()["terms"]} <= {(3, 1), (-3, 1)}


@pytest.mark.parametrize("flavor,k", [(ASSOC, 2), (ASSOC, 3), (COMM, 2), (COMM, 3), (COMM, 4)])
def test_complex_small(flavor, k):
    cx = NatComplex(flavor, k)
    assert cx.check_d_squared()
    assert cx.check_homotopy()


def test_identity_labeled_subcomplex():
    cx = NatComplex(ASSOC, 3, "identity")
    assert cx.check_d_squared() and cx.check_homotopy()


@pytest.mark.parametrize("k", [2, 3, 4])
def test_delta_monic_in_degree_zero(k):
    assert NatComplex(ASSOC, k).is_delta_injective(0)
    assert NatComplex(COMM, k).is_delta_injective(0)


def test_delta_zero_on_arity_one():
    assert NatComplex(ASSOC, 1).delta_rank(0) == 0


def random_op(rng, flavor, k, d):
    ms = no.basis_monomials(flavor, k, d)
    pick = rng.sample(ms, min(len(ms), 3))
    return NatOp.from_trees(flavor, k, [(m, rng.randint(-3, 3) or 1) for m in pick], d)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([ASSOC, COMM]))
def test_sequential_composition_associative(seed, flavor):
    rng = random.Random(seed)
    a = random_op(rng, flavor, 2, rng.randint(0, 2))
    b = random_op(rng, flavor, 2, rng.randint(0, 2))
    c = random_op(rng, flavor, 2, rng.randint(0, 1))
    i = rng.randint(1, 2)
    j = rng.randint(1, 2)
    lhs = no.compose_at(no.compose_at(a, i, b), i + j - 1, c)
    rhs = no.compose_at(a, i, no.compose_at(b, j, c))
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([ASSOC, COMM]))
def test_delta_squared_on_random_combinations(seed, flavor):
    rng = random.Random(seed)
    op = random_op(rng, flavor, 3, rng.randint(0, 3))
    assert no.differential(no.differential(op)).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_sweep_agrees_with_parity_free(seed):
    rng = random.Random(seed)
    a = random_op(rng, ASSOC, 2, rng.randint(0, 3))
    b = random_op(rng, ASSOC, 2, rng.randint(0, 3))
    no.compose_at(a, rng.randint(1, 2), b, sweep_check=True)
