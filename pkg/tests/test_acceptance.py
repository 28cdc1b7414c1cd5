"""The ten acceptance criteria, each checked with exact equality.

Every test records its verdict; a summary with one ``Criterion N: PASS/FAIL``
line per criterion is printed at the end of the run (and by running this file
directly).
"""

import random
import sys
import time
from fractions import Fraction
from math import factorial

import pytest

from braces import endo as en
from braces import evalg as ev
from braces import families as fm
from braces import liecase as lc
from braces import natops as no
from braces import scalars
from braces import series as sr
from braces.endo import BraceFamily, Endo
from braces.freealg import ASSOC, COMM, D

try:
    from conftest import ACCEPTANCE
except ImportError:  # pragma: no cover - direct execution from another directory
    ACCEPTANCE = {}


def record(n, checks, note=""):
    """Store the verdict, print it, and fail the test on any false check."""
    failed = [name for name, ok in checks if not ok]
    ok = not failed
    ACCEPTANCE[n] = (ok, note if ok else "failed: " + ", ".join(failed))
    print(f"Criterion {n}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {n} failed checks: {failed}"


def test_criterion_1_twisting_reproduces_closed_forms():
    start = time.perf_counter()
    checks = []
    cases = [("borjeson", "geometric", 6), ("koszul", "exp_minus_one", 5),
             ("nonrecursive", "catalan", 5), ("hereditary_nonrecursive", "t_plus_t2", 5),
             ("exotic_hereditary", "t_plus_half_t2", 5)]
    for family, series_name, N in cases:
        fam = en.twist_series(sr.named(series_name, N))
        for k in range(1, N + 1):
            checks.append((f"{family}[{k}]", fam[k] == fm.closed_form(family, k)))
        if family == "nonrecursive":
            checks.append(("C_4 = 5", fm.recursivity_coefficient(fam, 4) == 5))
    elapsed = time.perf_counter() - start
    checks.append((f"runtime {elapsed:.1f}s < 30s", elapsed < 30))
    record(1, checks, f"{elapsed:.1f}s")


def test_criterion_2_master_identities():
    start = time.perf_counter()
    checks = []
    for name in ("borjeson", "nonrecursive", "hereditary_nonrecursive"):
        checks.append((name, fm.identity_holds(fm.family(name, 6), 6)))
    for name in ("koszul", "exotic_hereditary"):
        checks.append((name, fm.identity_holds(fm.family(name, 5), 5)))
    rng = random.Random(20240601)
    for i in range(20):
        phi = en.random_automorphism(ASSOC, 6, rng)
        checks.append((f"random assoc #{i}", fm.identity_holds(en.twist(phi), 6)))
    for i in range(20):
        phi = en.random_automorphism(COMM, 5, rng)
        checks.append((f"random comm #{i}", fm.identity_holds(en.twist(phi), 5)))
    elapsed = time.perf_counter() - start
    checks.append((f"runtime {elapsed:.1f}s < 60s", elapsed < 60))
    record(2, checks, f"{elapsed:.1f}s")


def test_criterion_3_coefficient_tables():
    checks = []
    bound = 6
    geo = sr.nc_taylor_coeffs(sr.named("geometric", bound + 2), bound)
    expected = {(r, s): 0 for r in range(bound + 1) for s in range(bound + 1 - r)}
    expected.update({(0, 0): 1, (1, 1): 1, (0, 1): -1, (1, 0): -1})
    checks.append(("geometric c_{r,s}", geo.values == expected))
    exp = sr.comm_coeffs(sr.named("exp_minus_one", bound + 2), bound)
    checks.append(("exp c_r", exp.values == {r: (-1) ** r for r in range(bound + 1)}))
    phi = sr.named("catalan", bound + 2)
    cat = sr.nc_taylor_coeffs(phi, bound)
    # 1 - phi(u) - phi(v): constant 1, -f_r on the u-axis, -f_s on the v-axis
    want = {}
    for (r, s) in expected:
        v = 1 if (r, s) == (0, 0) else 0
        if s == 0 and r > 0:
            v -= phi.f(r)
        if r == 0 and s > 0:
            v -= phi.f(s)
        want[(r, s)] = v
    checks.append(("catalan c_{r,s}", cat.values == want))
    record(3, checks)


def test_criterion_4_complex_structure():
    checks = [("assoc Nat(2)", no.dims(ASSOC, 2) == (2, 6, 6, 2)),
              ("comm Nat(2)", no.dims(COMM, 2) == (1, 2, 2, 1))]
    for k in range(2, 6):
        for flavor in (ASSOC, COMM):
            checks.append((f"euler {flavor} {k}", no.euler_characteristic(flavor, k) == 0))
    for flavor, top in ((ASSOC, 4), (COMM, 5)):
        for k in range(1, top + 1):
            cx = no.NatComplex(flavor, k)
            checks.append((f"delta^2 {flavor} {k}", cx.check_d_squared()))
            if k >= 2:
                checks.append((f"h delta + delta h {flavor} {k}", cx.check_homotopy()))
    for k in range(2, 5):
        checks.append((f"monic {k}", no.NatComplex(ASSOC, k).is_delta_injective(0)))
    checks.append(("delta on Nat(1)^0", no.differential(no.identity()).is_zero()))
    record(4, checks)


def test_criterion_5_untwisting_round_trip():
    checks = []
    rng = random.Random(5)
    for flavor in (ASSOC, COMM):
        for i in range(20):
            phi = en.random_automorphism(flavor, 5, rng)
            checks.append((f"random {flavor} #{i}", en.untwist(en.twist(phi)) == phi))
    for name in sr.CATALOG_NAMES:
        if name == "truncated_geometric(n)":
            name = "truncated_geometric(3)"
        s = sr.named(name, 5)
        phi = en.series_to_endo(s)
        checks.append((f"catalog {name}", en.untwist(en.twist(phi)) == phi))
    phi = en.untwist(fm.family("borjeson", 6))
    checks.append(("borjeson f_k = 1", phi.to_series() == sr.PowerSeries(ASSOC, (1,) * 6)))
    record(5, checks)


def test_criterion_6_linear_system():
    checks = []
    sol = fm.solve_combination(-2, -2)
    half = Fraction(1, 2)
    checks.append(("unique", sol.free == [] and sol.point() == {
        "A": half, "B": 0, "C": half, "D": Fraction(-3, 2), "E": Fraction(-3, 2)}))
    fam = fm.solve_combination(0, 0)
    ok = fam.free == ["A", "B"]
    for a, b in [(0, 0), (1, 0), (0, 1), (Fraction(2, 3), -5)]:
        pt = fam.point(A=a, B=b)
        ok = ok and pt == {"A": a, "B": b, "C": 1 - (a + b), "D": -a, "E": (a + b) - 1}
    checks.append(("two-parameter family", ok))
    pt = fam.point(A=0, B=1)
    checks.append(("B = 1 point", pt == {"A": 0, "B": 1, "C": 0, "D": 0, "E": 0}))
    terms = fm.combination_terms(0)
    combo = no.NatOp.zero(ASSOC, 4, 1)
    for v, c in pt.items():
        combo = combo + terms[v].scale(c)
    b3, b4 = fm.closed_form("borjeson", 3), fm.closed_form("borjeson", 4)
    checks.append(("combination equals m4'", combo == fm.m4_prime(0, 0)))
    checks.append(("b4 = b3(x1, x2x3, x4)", no.compose_at(b3, 2, no.mu(2)) == b4 and combo == b4))
    record(6, checks)


def test_criterion_7_non_hereditary_witness():
    fam = en.twist_series(sr.named("truncated_geometric(3)", 5))
    b = fm.family("borjeson", 5)
    verdict = fm.hereditarity_test(fam, 5)
    record(7, [("agree at 2", fam[2] == b[2]), ("agree at 3", fam[3] == b[3]),
               ("differ at 4", fam[4] != b[4]),
               ("verdict", verdict.kind == "NonHereditaryCertified" and verdict.witness == 4)])


def test_criterion_8_recursivity_mod_p():
    checks = []
    nr = fm.family("nonrecursive", 5)
    mod5 = scalars.map_scalars(nr, scalars.Zmod(5))
    checks.append(("C_4 mod 5 = 0", fm.recursivity_coefficient(mod5, 4) == 0))
    rows = fm.recursivity_report(nr, 5, mod=5)
    checks.append(("flagged", rows[3]["vanishes_mod"] and not rows[3]["unit"]))
    b = fm.family("borjeson", 6)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        bp = scalars.map_scalars(b, scalars.Zmod(p))
        checks.append((f"borjeson mod {p}", all(
            fm.recursivity_coefficient(bp, k) == scalars.Mod(1, p) for k in range(1, 7))))
    record(8, checks)


def test_criterion_9_lie_case():
    checks = []
    par = (0, 0, 0)
    g = [lc.LieExpr.gen(i, par) for i in (1, 2, 3)]
    checks.append(("D(v) = 0", lc.diagonal_D(g[0]).is_zero()))
    checks.append(("D{v1,v2}", lc.diagonal_D(lc.bracket_of(par, 1, 2)) == lc.wedge(g[0], g[1])))
    want = (lc.wedge(g[0], lc.bracket_of(par, 2, 3)).scale(2)
            + lc.wedge(g[1], lc.bracket_of(par, 3, 1)).scale(-1)
            + lc.wedge(g[2], lc.bracket_of(par, 1, 2)).scale(-1))
    checks.append(("D{v1,{v2,v3}}", lc.diagonal_D(lc.bracket_of(par, 1, 2, 3)) == want))
    checks.append(("unit both orders", lc.compose_lie_auto((1, 1), (-1, 2)) == (0, 0)
                   and lc.compose_lie_auto((-1, 2), (1, 1)) == (0, 0)))
    for p in lc.all_parities(3):
        checks.append((f"c3 identity {p}", lc.c3_identity_holds(p)))
        checks.append((f"c2 derivation {p}", lc.c_braces(2, [1, 2], p[:2]).expand_derivation().is_zero()))
        checks.append((f"c3 derivation {p}", lc.c_braces(3, [1, 2, 3], p).expand_derivation().is_zero()))
    for k in (2, 3):
        e = lc.eulerian_idempotent(k)
        checks.append((f"e{k} idempotent", e @ e == e))
    record(9, checks)


def test_criterion_10_concrete_evaluation():
    checks = []
    d2 = ev.truncated_polynomial(5, "d2")
    r2 = ev.derivation_order(d2, "koszul", 5)
    checks.append(("Q[x]/(x^5), d^2: order 2", r2.order == 2))
    checks.append(("Q[x]/(x^5), d^2: Phi_4 vanishes", r2.vanishing[3]))
    d1 = ev.truncated_polynomial(5, "d1")
    checks.append(("Q[x]/(x^5), d: order 1", ev.derivation_order(d1, "koszul", 5).order == 1))
    alg = ev.mixed_degree_algebra()
    trunc = ev.zero_truncate_product(alg)
    split = True
    for k in (2, 3):
        op = fm.closed_form("borjeson", k)
        for idx in __import__("itertools").product(range(alg.dim), repeat=k):
            split = split and ev.evaluate_basis(op, trunc, idx) == _super_exotic(alg, k, idx)
    checks.append(("truncated product case split", split))
    record(10, checks)


def _super_exotic(alg, k, idx):
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


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    tests.sort(key=lambda f: int(f.__name__.split("_")[2]))
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    sys.exit(0 if all(ok for ok, _ in ACCEPTANCE.values()) else 1)
