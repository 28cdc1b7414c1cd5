"""Exact symbolic computation of natural brace families obtained by twisting.

Modules: ``scalars`` (exact rings), ``series`` (generating series and their
coefficient tables), ``freealg`` (the free algebra with a formal ``Delta``),
``natops`` (natural operations and their complex), ``endo`` (twisting and
untwisting), ``families`` (named families and analyzers), ``liecase``,
``evalg`` (concrete algebras) and ``cli``.
"""

from .endo import BraceFamily, Endo, twist, twist_series, untwist
from .families import closed_form, family, solve_combination, verify_sh_identity
from .natops import NatOp
from .series import PowerSeries, named

__all__ = [
    "BraceFamily",
    "Endo",
    "NatOp",
    "PowerSeries",
    "closed_form",
    "family",
    "named",
    "solve_combination",
    "twist",
    "twist_series",
    "untwist",
    "verify_sh_identity",
]
