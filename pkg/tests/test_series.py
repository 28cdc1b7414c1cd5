from fractions import Fraction
from math import comb, factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from braces import series as sr
from braces.series import PowerSeries

N = 8
t = sympy.Symbol("t")


def sympy_coeffs(expr, n=N, flavor="assoc"):
    """Oracle: stored coefficients f_1..f_n of a sympy expression."""
    poly = sympy.series(expr, t, 0, n + 1).removeO()
    out = []
    for k in range(1, n + 1):
        c = Fraction(str(sympy.Rational(poly.coeff(t, k))))
        out.append(c * factorial(k) if flavor == "comm" else c)
    return tuple(out)


def ps(coeffs, flavor="assoc"):
    return PowerSeries(flavor, tuple(coeffs))


def test_catalan_inverse_is_t_minus_t2():
    assert sr.compose(sr.named("t_minus_t2", N), sr.named("catalan", N)) == sr.named("identity", N)
    assert sr.compositional_inverse(sr.named("catalan", N)) == sr.named("t_minus_t2", N)


def test_log_exp_compose_to_identity():
    s = sr.compose(sr.named("log1p", N), sr.named("exp_minus_one", N))
    assert s == sr.named("identity", N, flavor="comm")


def test_identity_is_neutral():
    phi = sr.named("catalan", N)
    assert sr.compose(sr.named("identity", N), phi) == phi
    assert sr.compose(phi, sr.named("identity", N)) == phi
    assert sr.compositional_inverse(sr.named("identity", N)) == sr.named("identity", N)


def test_inverse_of_geometric():
    inv = sr.compositional_inverse(sr.named("geometric", N))
    assert inv.coeffs == tuple((-1) ** (k - 1) for k in range(1, N + 1))
    assert inv.coeffs == sympy_coeffs(t / (1 + t))


def test_inverse_of_t_plus_t2():
    inv = sr.compositional_inverse(sr.named("t_plus_t2", N))
    assert inv.coeffs[:5] == (1, -1, 2, -5, 14)
    assert inv.coeffs == sympy_coeffs((sympy.sqrt(1 + 4 * t) - 1) / 2)


def test_catalog_against_closed_forms():
    assert sr.named("catalan", N).coeffs == sympy_coeffs((1 - sympy.sqrt(1 - 4 * t)) / 2)
    assert sr.named("sqrt_plus", N).coeffs == sympy_coeffs((sympy.sqrt(1 + 4 * t) - 1) / 2)
    assert sr.named("exp_minus_one", N).coeffs == sympy_coeffs(sympy.exp(t) - 1, flavor="comm")
    assert sr.named("log1p", N).coeffs == sympy_coeffs(sympy.log(1 + t), flavor="comm")
    assert sr.named("sqrt_2t", N).coeffs == sympy_coeffs(sympy.sqrt(1 + 2 * t) - 1, flavor="comm")


def test_catalan_numbers():
    c = sr.named("catalan", 10)
    assert c.coeffs[:6] == (1, 1, 2, 5, 14, 42)
    assert [sr.catalan_number_oracle(k) for k in range(1, 11)] == list(c.coeffs)
    assert sr.catalan_number_oracle(10) == 4862


def test_truncated_geometric():
    s = sr.named("truncated_geometric(3)", 6)
    assert s.coeffs == (1, 1, 1, 0, 0, 0)


def test_unknown_name():
    with pytest.raises(sr.UnknownName):
        sr.named("no_such_series")


def test_errors():
    with pytest.raises(sr.FlavorMismatch):
        sr.compose(sr.named("geometric", 4), sr.named("exp_minus_one", 4))
    with pytest.raises(sr.NotUnitNormalized):
        sr.compositional_inverse(ps((2, 1, 0)))
    with pytest.raises(sr.TruncationTooShort):
        sr.nc_taylor_coeffs(sr.named("geometric", 3), 4)


def test_geometric_grid():
    grid = sr.nc_taylor_coeffs(sr.named("geometric", N), 6)
    assert grid.nonzero() == {(0, 0): 1, (1, 1): 1, (0, 1): -1, (1, 0): -1}


def test_identity_grid():
    grid = sr.nc_taylor_coeffs(sr.named("identity", N), 5)
    assert grid.nonzero() == {(0, 0): 1}
    assert sr.comm_coeffs(sr.named("identity", N, flavor="comm"), 5).nonzero() == {0: 1}


def test_catalan_grid_is_one_minus_phi_u_minus_phi_v():
    phi = sr.named("catalan", N)
    grid = sr.nc_taylor_coeffs(phi, 6)
    assert grid[(0, 2)] == -1 and grid[(1, 1)] == 0
    for (r, s), v in grid.values.items():
        expected = (1 if (r, s) == (0, 0) else 0)
        if s == 0 and r > 0:
            expected -= phi.f(r)
        if r == 0 and s > 0:
            expected -= phi.f(s)
        assert v == expected, (r, s)


def test_comm_coefficients():
    grid = sr.comm_coeffs(sr.named("exp_minus_one", N), 6)
    assert [grid[r] for r in range(7)] == [(-1) ** r for r in range(7)]
    grid = sr.comm_coeffs(sr.named("t_plus_half_t2", N), 6)
    assert [grid[r] for r in range(7)] == [(-1) ** r * factorial(r) for r in range(7)]


def test_reflect_swaps_catalog_pairs():
    """phi(t) -> -psi(-t) with psi the inverse exchanges catalan and t + t^2."""
    def swap(phi):
        return sr.reflect(sr.compositional_inverse(phi))

    assert swap(sr.named("catalan", N)) == sr.named("t_plus_t2", N)
    assert swap(sr.named("t_plus_t2", N)) == sr.named("catalan", N)
    assert sr.reflect(sr.named("catalan", N)) == sr.compositional_inverse(sr.named("t_plus_t2", N))


def test_json_roundtrip_and_parse():
    s = sr.named("catalan", 6)
    assert PowerSeries.from_json(s.to_json()) == s
    assert sr.parse_series("1,1/2,0", order=4).coeffs == (1, Fraction(1, 2), 0, 0)
    assert sr.parse_series("geometric", order=3).coeffs == (1, 1, 1)


unit_series = st.lists(st.integers(-4, 4), min_size=5, max_size=5).map(lambda xs: ps([1] + xs))


@settings(max_examples=40, deadline=None)
@given(unit_series, unit_series, unit_series)
def test_compose_associative(a, b, c):
    assert sr.compose(sr.compose(a, b), c) == sr.compose(a, sr.compose(b, c))


@settings(max_examples=40, deadline=None)
@given(unit_series)
def test_inverse_two_sided(a):
    inv = sr.compositional_inverse(a)
    ident = sr.named("identity", a.order)
    assert sr.compose(inv, a) == ident
    assert sr.compose(a, inv) == ident


@settings(max_examples=25, deadline=None)
@given(unit_series)
def test_grid_edges_match_univariate_composition(a):
    """Row s = 0 is psi'(phi(u)), computed independently by univariate composition."""
    bound = a.order - 1
    grid = sr.nc_taylor_coeffs(a, bound)
    g = sr.compositional_inverse(a).analytic()
    dpsi = [(j + 1) * g[j + 1] for j in range(bound + 1)]
    phi = a.analytic()
    acc = [0] * (bound + 1)
    power = [1] + [0] * bound
    for j in range(bound + 1):
        acc = [x + dpsi[j] * y for x, y in zip(acc, power)]
        power = [sum(power[i] * phi[n - i] for i in range(n + 1)) for n in range(bound + 1)]
    # c_{r,0} sums g_{k+1} [t^r] phi^k, i.e. the coefficients of (psi(x)/x) after x = phi(u)
    pw = [1] + [0] * bound
    quot = [0] * (bound + 1)
    for k in range(bound + 1):
        quot = [x + g[k + 1] * y for x, y in zip(quot, pw)]
        pw = [sum(pw[i] * phi[n - i] for i in range(n + 1)) for n in range(bound + 1)]
    assert [grid[(r, 0)] for r in range(bound + 1)] == quot
    assert [grid[(0, s)] for s in range(bound + 1)] == quot
