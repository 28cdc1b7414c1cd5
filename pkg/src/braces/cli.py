"""Command-line front end.

Exit codes: 0 success / PASS, 1 verification FAIL, 2 usage or input error.
"""

from __future__ import annotations

import json
import os
import random
import sys
from itertools import product
from typing import List, Optional

import click

from . import endo
from . import evalg
from . import families as fam
from . import latex
from . import liecase as lc
from . import natops as no
from . import scalars
from . import series as sr
from .freealg import ASSOC, COMM

DEFAULT_ARITY = {ASSOC: 6, COMM: 5}
DEFAULT_BUDGET = 2_000_000


class InputError(click.ClickException):
    exit_code = 2


class VerificationFailed(click.ClickException):
    exit_code = 1


def _emit(obj) -> None:
    click.echo(json.dumps(obj, indent=2, ensure_ascii=False))


def _budget(flag: Optional[int]) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("BRACES_MAX_TERMS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"BRACES_MAX_TERMS must be an integer, got {env!r}")
    return DEFAULT_BUDGET


def _estimate_terms(flavor: str, N: int) -> int:
    """Upper bound on the terms of components ``2..N`` (degree-1 basis sizes)."""
    total = 0
    for k in range(2, N + 1):
        d = no.dims(flavor, k)
        total += d[1] if len(d) > 1 else 0
    return total


def _guard(flavor: str, N: int, budget: int) -> None:
    est = _estimate_terms(flavor, N)
    if est > budget:
        raise InputError(f"estimated {est} terms exceeds the budget of {budget} "
                         f"(raise --budget or BRACES_MAX_TERMS)")


def _flavor(value: Optional[str], default: str = ASSOC) -> str:
    return {"assoc": ASSOC, "comm": COMM, None: default}[value]


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")


def _family_text(m, name: str) -> str:
    return "\n".join(f"{name}_{k} = {c}" for k, c in enumerate(m.comps, start=1))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Exact computations with twisted brace families."""


# -- twist / untwist ----------------------------------------------------------------------------

@cli.command()
@click.option("--series", "series_text", required=True,
              help="Catalog name or comma-separated coefficients f_1,f_2,...")
@click.option("--flavor", type=click.Choice(["assoc", "comm"]), default=None)
@click.option("--arity", type=int, default=None, help="Truncation arity (default 6 assoc, 5 comm).")
@click.option("--json", "as_json", is_flag=True)
@click.option("--latex", "as_latex", is_flag=True)
@click.option("--budget", type=int, default=None)
def twist(series_text, flavor, arity, as_json, as_latex, budget):
    """Twist the trivial structure by the automorphism of a generating series."""
    try:
        fl = _flavor(flavor)
        probe = sr.parse_series(series_text, fl, 1) if "," not in series_text else None
        if probe is not None and flavor is None:
            fl = probe.flavor
        N = arity or DEFAULT_ARITY[fl]
        _guard(fl, N, _budget(budget))
        s = sr.parse_series(series_text, fl, N)
        m = endo.twist_series(s, N)
    except (sr.SeriesError, endo.EndoError) as exc:
        raise InputError(str(exc))
    if as_json:
        _emit({"series": s.to_json(), **m.to_json()})
    elif as_latex:
        click.echo(latex.family_latex(m))
    else:
        click.echo(f"series: {s}")
        click.echo(_family_text(m, "m"))


@cli.command()
@click.option("--braces", "path", required=True, type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def untwist(path, as_json):
    """Recover the unique natural automorphism generating a brace family."""
    try:
        m = endo.load_components(_load_json(path))
        if not isinstance(m, endo.BraceFamily):
            raise InputError("the file holds an endomorphism, not a brace family")
        phi = endo.untwist(m)
    except endo.NotCoclosed as exc:
        raise VerificationFailed(str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(str(exc))
    if as_json:
        _emit(phi.to_json())
        return
    s = phi.to_series()
    if s is not None:
        click.echo(f"series: {s}")
    click.echo(_family_text(phi, "phi"))


# -- verify -------------------------------------------------------------------------------------

def _mod_rows(m, upto: int, p: int) -> List[dict]:
    mapped = m.map_coeffs(lambda c: scalars.convert(c, scalars.Zmod(p)))
    rows = []
    for k in range(1, upto + 1):
        c = scalars.convert(fam.recursivity_coefficient(mapped, k), scalars.Zmod(p))
        rows.append({"k": k, "C_k_mod": c.val, "vanishes": c.val == 0})
    return rows


@cli.command()
@click.option("--family", "name", default=None, help="Named family.")
@click.option("--braces", "path", default=None, type=click.Path(dir_okay=False),
              help="Brace family JSON instead of a named family.")
@click.option("--random", "n_random", type=int, default=0,
              help="Verify twists of this many random natural automorphisms instead.")
@click.option("--seed", type=int, default=0)
@click.option("--flavor", type=click.Choice(["assoc", "comm"]), default="assoc")
@click.option("--upto", type=int, default=None)
@click.option("--mod", "p", type=int, default=None, help="Also report C_k modulo this prime.")
@click.option("--induction/--no-induction", default=False)
@click.option("--json", "as_json", is_flag=True)
def verify(name, path, n_random, seed, flavor, upto, p, induction, as_json):
    """Master identities, recursivity and hereditarity of a brace family."""
    if sum(x is not None and x != 0 for x in (name, path, n_random)) != 1:
        raise InputError("give exactly one of --family, --braces, --random")
    if p is not None and not scalars.is_prime(p):
        raise InputError(f"--mod needs a prime, got {p}")
    try:
        if n_random:
            return _verify_random(n_random, seed, _flavor(flavor), upto, as_json)
        if name:
            fl = fam.FAMILY_FLAVOR.get(name)
            if fl is None:
                raise fam.UnknownFamily(f"unknown family {name!r}; known: {', '.join(fam.FAMILY_NAMES)}")
            N = upto or DEFAULT_ARITY[fl]
            m = fam.family(name, N)
        else:
            m = endo.load_components(_load_json(path))
            N = upto or m.N
        reports = fam.verify_sh_identity(m, N)
        rec = fam.recursivity_report(m, N)
        verdict = fam.hereditarity_test(m, N) if N >= 4 else None
        ind = fam.verify_induction(name, N) if induction and name else None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(str(exc))
    passed = all(r.passed for r in reports) and (ind is None or ind.passed)
    warnings = []
    mod_rows = None
    if p is not None:
        mod_rows = _mod_rows(m, N, p)
        for row in mod_rows:
            if row["vanishes"]:
                warnings.append(f"C_{row['k']} = 0 (mod {p}): recursivity fails")
    for row in rec:
        if not row.get("unit", True) and "smallest_failing_prime" in row:
            warnings.append(f"C_{row['k']} = {row['C_k']} is not a unit over Z "
                            f"(vanishes mod {row['smallest_failing_prime']})")
    if as_json:
        out = {"family": name or path, "flavor": "assoc" if m.flavor == ASSOC else "comm",
               "upto": N, "reports": [r.to_json() for r in reports], "recursivity": rec,
               "pass": passed}
        if mod_rows is not None:
            out["mod"] = {"p": p, "coefficients": mod_rows}
        if verdict is not None:
            out["hereditarity"] = verdict.to_json()
        if ind is not None:
            out["induction"] = ind.to_json()
        if warnings:
            out["warnings"] = warnings
        _emit(out)
    else:
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            click.echo(f"{r.identity:11s} arity {r.arity}: {status} "
                       f"({r.vectors} parity vectors, {r.residual_terms} residual terms)")
            if not r.passed:
                click.echo(f"  first nonzero residual: {r.first_residual}")
        click.echo("recursivity: " + ", ".join(f"C_{row['k']}={row['C_k']}" for row in rec))
        if mod_rows is not None:
            click.echo(f"mod {p}: " + ", ".join(f"C_{row['k']}={row['C_k_mod']}" for row in mod_rows))
        if verdict is not None:
            click.echo(f"hereditarity: {verdict}")
        if ind is not None:
            click.echo(f"induction ({ind.rule}): {'PASS' if ind.passed else 'FAIL'} for k in {ind.checked}")
        for w in warnings:
            click.echo(f"warning: {w}")
        click.echo("PASS" if passed else "FAIL")
    if not passed:
        sys.exit(1)


def _verify_random(count: int, seed: int, flavor: str, upto: Optional[int], as_json: bool):
    N = upto or DEFAULT_ARITY[flavor]
    rng = random.Random(seed)
    results = []
    for i in range(count):
        phi = endo.random_automorphism(flavor, N, rng)
        reports = fam.verify_sh_identity(endo.twist(phi), N)
        results.append({"index": i, "pass": all(r.passed for r in reports),
                        "reports": [r.to_json() for r in reports]})
    passed = all(r["pass"] for r in results)
    if as_json:
        _emit({"random": count, "seed": seed, "flavor": "assoc" if flavor == ASSOC else "comm",
               "upto": N, "results": results, "pass": passed})
    else:
        for r in results:
            click.echo(f"twist #{r['index']}: {'PASS' if r['pass'] else 'FAIL'}")
        click.echo("PASS" if passed else "FAIL")
    if not passed:
        sys.exit(1)


# -- braces-show / coeffs / catalog ---------------------------------------------------------------

@cli.command("braces-show")
@click.option("--family", "name", required=True)
@click.option("--arity", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--latex", "as_latex", is_flag=True)
def braces_show(name, arity, as_json, as_latex):
    """Print the closed form of a named family."""
    try:
        fl = fam.FAMILY_FLAVOR.get(name)
        if fl is None:
            raise fam.UnknownFamily(f"unknown family {name!r}; known: {', '.join(fam.FAMILY_NAMES)}")
        m = fam.family(name, arity or DEFAULT_ARITY[fl])
    except ValueError as exc:
        raise InputError(str(exc))
    if as_json:
        _emit({"family": name, **m.to_json()})
    elif as_latex:
        click.echo(latex.family_latex(m))
    else:
        click.echo(_family_text(m, name))


@cli.command()
@click.option("--series", "series_text", required=True)
@click.option("--flavor", type=click.Choice(["assoc", "comm"]), default=None)
@click.option("--grid", required=True, help="r,s bound (assoc) or r bound (comm).")
@click.option("--json", "as_json", is_flag=True)
def coeffs(series_text, flavor, grid, as_json):
    """Coefficients c_{r,s} (assoc) or c_r (comm) of a generating series."""
    try:
        bounds = [int(x) for x in grid.split(",")]
        bound = max(bounds)
        fl = _flavor(flavor)
        s = sr.parse_series(series_text, fl, bound + 2)
        if flavor is None:
            fl = s.flavor
            s = sr.parse_series(series_text, fl, bound + 2)
        g = sr.nc_taylor_coeffs(s, bound) if fl == ASSOC else sr.comm_coeffs(s, bound)
    except (ValueError, sr.SeriesError) as exc:
        raise InputError(str(exc))
    if as_json:
        _emit({"series": s.to_json(), **g.to_json()})
        return
    if fl == ASSOC:
        R = bounds[0]
        S = bounds[1] if len(bounds) > 1 else bounds[0]
        width = max(len(scalars.fmt(g[(r, t)])) for r in range(R + 1) for t in range(S + 1)) + 1
        click.echo("r\\s " + "".join(f"{t:>{width}}" for t in range(S + 1)))
        for r in range(R + 1):
            click.echo(f"{r:>3} " + "".join(f"{scalars.fmt(g[(r, t)]):>{width}}" for t in range(S + 1)))
    else:
        for r in range(bounds[0] + 1):
            click.echo(f"c_{r} = {scalars.fmt(g[r])}")


@cli.command()
@click.option("--order", type=int, default=6)
@click.option("--json", "as_json", is_flag=True)
def catalog(order, as_json):
    """List the named series and brace families."""
    rows = []
    for name in sr.CATALOG_NAMES:
        if name == "truncated_geometric(n)":
            s = sr.named("truncated_geometric(3)", order)
        else:
            s = sr.named(name, order)
        rows.append({"name": name, "flavor": "assoc" if s.flavor == ASSOC else "comm",
                     "coefficients": [scalars.to_json(c) for c in s.coeffs]})
    families = [{"family": f, "flavor": "assoc" if fam.FAMILY_FLAVOR[f] == ASSOC else "comm",
                 "series": sr.FAMILY_SERIES[f]} for f in fam.FAMILY_NAMES]
    if as_json:
        _emit({"series": rows, "families": families})
        return
    for r in rows:
        click.echo(f"{r['name']:24s} {r['flavor']:5s} f = {', '.join(str(c) for c in r['coefficients'])}")
    click.echo("")
    for f in families:
        click.echo(f"{f['family']:24s} {f['flavor']:5s} <- {f['series']}")


# -- solve / complex ---------------------------------------------------------------------------

@cli.command()
@click.option("--alpha", required=True)
@click.option("--beta", required=True)
@click.option("--json", "as_json", is_flag=True)
def solve(alpha, beta, as_json):
    """Express m4'(alpha, beta) through the five composites of m3(alpha)."""
    try:
        a, b = scalars.qq(alpha), scalars.qq(beta)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad scalar: {exc}")
    sol = fam.solve_combination(a, b)
    if as_json:
        _emit({"alpha": scalars.rational_json(a), "beta": scalars.rational_json(b), **sol.to_json()})
    else:
        for line in sol.describe():
            click.echo(line)


@cli.command()
@click.option("--k", "k", type=int, required=True)
@click.option("--flavor", type=click.Choice(["assoc", "comm"]), default="assoc")
@click.option("--check", type=click.Choice(["dims", "homotopy", "acyclicity"]), default="dims")
@click.option("--json", "as_json", is_flag=True)
def complex(k, flavor, check, as_json):
    """The complex of natural operations in arity k."""
    if k < 1:
        raise InputError("k must be positive")
    fl = _flavor(flavor)
    cx = no.NatComplex(fl, k)
    out = {"k": k, "flavor": flavor, "dims": list(cx.dims()),
           "euler_characteristic": cx.euler_characteristic()}
    if fl == COMM:
        out["operation_dims"] = list(no.operation_dims(k))
    ok = True
    if check in ("homotopy", "acyclicity"):
        out["d_squared_zero"] = cx.check_d_squared()
        if k >= 2:
            out["homotopy"] = cx.check_homotopy()
        ok = out["d_squared_zero"] and out.get("homotopy", True)
    if check == "acyclicity":
        ranks = [cx.delta_rank(d) for d in range(cx.top + 1)]
        dims = cx.dims()
        homology = [dims[d] - ranks[d] - (ranks[d - 1] if d else 0) for d in range(cx.top + 1)]
        out["homology_dims"] = homology
        out["acyclic"] = all(h == 0 for h in homology)
        ok = ok and (out["acyclic"] or k == 1)
    out["pass"] = ok
    if as_json:
        _emit(out)
    else:
        for key_, val in out.items():
            click.echo(f"{key_}: {val}")
    if not ok:
        sys.exit(1)


# -- lie -----------------------------------------------------------------------------------------

@cli.command()
@click.option("--check", type=click.Choice(["c3", "euler", "compose", "diagonal"]), required=True)
@click.option("--f", "f", default="1,1", help="f_2,f_3 for --check compose.")
@click.option("--g", "g", default="-1,2", help="g_2,g_3 for --check compose.")
@click.option("--json", "as_json", is_flag=True)
def lie(check, f, g, as_json):
    """Lie-case checks: the c3 identity, Eulerian idempotents, composition, the diagonal."""
    out = {"check": check}
    if check == "c3":
        rows = []
        for par in lc.all_parities(3):
            rows.append({"parities": list(par),
                         "identity": lc.c3_identity_holds(par),
                         "c2_derivation_zero": lc.c_braces(2, [1, 2], par[:2]).expand_derivation().is_zero(),
                         "c3_derivation_zero": lc.c_braces(3, [1, 2, 3], par).expand_derivation().is_zero()})
        out["rows"] = rows
        ok = all(r["identity"] and r["c2_derivation_zero"] and r["c3_derivation_zero"] for r in rows)
    elif check == "euler":
        rows = []
        for k in (1, 2, 3):
            e = lc.eulerian_idempotent(k)
            rows.append({"k": k, "idempotent": (e @ e) == e, "words": str(e)})
        out["rows"] = rows
        ok = all(r["idempotent"] for r in rows)
    elif check == "compose":
        try:
            fv = [scalars.qq(x) for x in f.split(",")]
            gv = [scalars.qq(x) for x in g.split(",")]
            if len(fv) != 2 or len(gv) != 2:
                raise ValueError("expected two components")
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad components: {exc}")
        h = lc.compose_lie_auto(fv, gv)
        rows = []
        for par in lc.all_parities(3):
            rows.append({"parities": list(par),
                         "via_diagonal": [scalars.to_json(x) for x in lc.compose_lie_auto_via_diagonal(fv, gv, par)]})
        out["formula"] = [scalars.to_json(x) for x in h]
        out["rows"] = rows
        ok = all(r["via_diagonal"] == out["formula"] for r in rows)
    else:
        par = (0, 0, 0)
        items = [("D(v1)", lc.diagonal_D(lc.LieExpr.gen(1, par))),
                 ("D{v1,v2}", lc.diagonal_D(lc.bracket_of(par, 1, 2))),
                 ("D{v1,{v2,v3}}", lc.diagonal_D(lc.bracket_of(par, 1, 2, 3)))]
        out["rows"] = [{"input": n, "value": str(v)} for n, v in items]
        ok = True
    out["pass"] = ok
    if as_json:
        _emit(out)
    else:
        if "formula" in out:
            click.echo(f"formula: h = {out['formula']}")
        for r in out["rows"]:
            click.echo("  ".join(f"{k_}={v}" for k_, v in r.items()))
        click.echo("PASS" if ok else "FAIL")
    if not ok:
        sys.exit(1)


# -- eval ----------------------------------------------------------------------------------------

@cli.command("eval")
@click.option("--algebra", "alg_spec", required=True,
              help=f"Algebra JSON file or one of: {', '.join(evalg.BUNDLED)}")
@click.option("--family", "name", required=True)
@click.option("--order-upto", "max_k", type=int, default=5)
@click.option("--truncate", is_flag=True, help="Zero the product outside degree (0,0) first.")
@click.option("--table", type=int, default=None, help="Print component k on all basis tuples.")
@click.option("--json", "as_json", is_flag=True)
def eval_(alg_spec, name, max_k, truncate, table, as_json):
    """Evaluate a family on a concrete algebra and find the derivation order."""
    try:
        alg = evalg.load_algebra(alg_spec)
        if truncate:
            alg = evalg.zero_truncate_product(alg)
        res = evalg.derivation_order(alg, name, max_k)
        rows = None
        if table is not None:
            op = fam.closed_form(name, table)
            rows = []
            for idx, val in _tuples(alg, op):
                names = alg.names or tuple(f"e{i}" for i in range(alg.dim))
                rows.append({"args": [names[i] for i in idx],
                             "degrees": [alg.degrees[i] for i in idx],
                             "value": alg.element_text(val)})
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(str(exc))
    if as_json:
        out = {"algebra": alg_spec, "truncated": truncate, **res.to_json(alg)}
        if rows is not None:
            out["table"] = rows
        _emit(out)
        return
    mode = " (parity-relaxed)" if res.relaxed else ""
    click.echo(f"{name} on {alg_spec}{mode}: derivation order {res.order_text()}")
    for k, v in enumerate(res.vanishing, start=1):
        click.echo(f"  component {k}: {'vanishes' if v else 'nonzero'}")
    if rows is not None:
        for r in rows:
            click.echo(f"  {name}_{table}({', '.join(r['args'])}) = {r['value']}")


def _tuples(alg, op):
    for idx in product(range(alg.dim), repeat=op.arity):
        val = evalg.evaluate_basis(op, alg, idx)
        if val:
            yield idx, val


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cli.main(args=argv, prog_name="braces", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 2
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
