"""Finite-box enumeration of integer solutions for linear constraint systems.

This is the hot kernel behind the bounded oracle and every brute-force
check in the test suite. A compiled Cython implementation is used when
available; setting CHCPAIR_PURE=1 forces the pure-Python fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .syntax import ConstraintConj, LinAtom, LinExpr, Rel, Sort, Var

if os.environ.get("CHCPAIR_PURE"):
    from . import _boxkernel_py as _impl

    KERNEL = "pure"
else:
    try:
        from . import _boxkernel as _impl  # type: ignore[attr-defined]

        KERNEL = "compiled"
    except ImportError:
        from . import _boxkernel_py as _impl

        KERNEL = "pure"

_INT64_BUDGET = 2**62


@dataclass
class BoxSystem:
    """A conjunction of linear atoms lowered to dense integer rows."""

    vars: tuple[Var, ...]
    matrix: list[int]
    consts: list[int]
    ops: list[int]

    @property
    def nrows(self) -> int:
        return len(self.consts)

    def max_abs(self) -> int:
        m = max((abs(c) for c in self.matrix), default=0)
        return max(m, max((abs(c) for c in self.consts), default=0))


def lower_conj(conj: ConstraintConj, var_order: Optional[Sequence[Var]] = None) -> BoxSystem:
    """Lower the linear part of a conjunction for box evaluation.

    Array atoms are not allowed here; callers strip or reject them first.
    """
    vars_: list[Var] = list(var_order) if var_order is not None else []
    index = {v: i for i, v in enumerate(vars_)}
    rows: list[tuple[dict[int, int], int, int]] = []
    for atom in conj:
        if not isinstance(atom, LinAtom):
            raise ValueError("box systems handle linear atoms only")
        d = atom.lhs.sub(atom.rhs)
        coeffs: dict[int, int] = {}
        for v, c in d.coeffs:
            if v not in index:
                index[v] = len(vars_)
                vars_.append(v)
            coeffs[index[v]] = c
        k = d.const
        rel = atom.rel
        if rel is Rel.EQ:
            rows.append((coeffs, k, _impl.OP_EQ))
        elif rel is Rel.NE:
            rows.append((coeffs, k, _impl.OP_NE))
        elif rel is Rel.LE:
            rows.append((coeffs, k, _impl.OP_LE))
        elif rel is Rel.LT:
            rows.append((coeffs, k + 1, _impl.OP_LE))
        elif rel is Rel.GE:
            rows.append(({i: -c for i, c in coeffs.items()}, -k, _impl.OP_LE))
        else:  # GT
            rows.append(({i: -c for i, c in coeffs.items()}, 1 - k, _impl.OP_LE))
    n = len(vars_)
    matrix: list[int] = []
    consts: list[int] = []
    ops: list[int] = []
    for coeffs, k, op in rows:
        matrix.extend(coeffs.get(i, 0) for i in range(n))
        consts.append(k)
        ops.append(op)
    return BoxSystem(tuple(vars_), matrix, consts, ops)


def _pick_impl(sys_: BoxSystem, lo: int, hi: int):
    if KERNEL == "pure":
        return _impl
    bound = max(abs(lo), abs(hi), 1)
    n = len(sys_.vars)
    budget = (sys_.max_abs() * bound * (n + 1) + 1) * 2
    if budget >= _INT64_BUDGET:
        from . import _boxkernel_py

        return _boxkernel_py
    return _impl


def solutions(
    sys_: BoxSystem,
    lo: int,
    hi: int,
    fixed: Optional[Mapping[Var, int]] = None,
    limit: int = 2**62,
) -> list[dict[Var, int]]:
    """All assignments (as dicts) in the box satisfying the system."""
    fixed = fixed or {}
    fx = [fixed.get(v) for v in sys_.vars]
    impl = _pick_impl(sys_, lo, hi)
    raw = impl.solve_box(
        sys_.matrix, sys_.consts, sys_.ops, sys_.nrows, len(sys_.vars), lo, hi, fx, limit
    )
    return [dict(zip(sys_.vars, tup)) for tup in raw]


def find_solution(
    sys_: BoxSystem, lo: int, hi: int, fixed: Optional[Mapping[Var, int]] = None
) -> Optional[dict[Var, int]]:
    got = solutions(sys_, lo, hi, fixed, limit=1)
    return got[0] if got else None


def eval_atom(atom: LinAtom, env: Mapping[Var, int]) -> bool:
    """Evaluate a ground linear atom under a total assignment."""
    d = atom.lhs.sub(atom.rhs)
    s = d.const + sum(c * env[v] for v, c in d.coeffs)
    rel = atom.rel
    if rel is Rel.EQ:
        return s == 0
    if rel is Rel.NE:
        return s != 0
    if rel is Rel.LE:
        return s <= 0
    if rel is Rel.LT:
        return s < 0
    if rel is Rel.GE:
        return s >= 0
    return s > 0


def eval_conj(conj: ConstraintConj, env: Mapping[Var, int]) -> bool:
    return all(eval_atom(a, env) for a in conj if isinstance(a, LinAtom))
