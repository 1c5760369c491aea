"""Decision services for conjunctions of linear integer atoms.

The internal procedure is Fourier-Motzkin elimination over the rationals
with integer tightening (strict bounds become non-strict via -1, rows are
divided by their coefficient gcd with ceiling on the constant). Rational
unsatisfiability soundly implies integer unsatisfiability, which is the
direction every transformation-rule check needs. Positive (Proved)
satisfiability answers are only given with a concrete integer witness in
hand. Disequalities are handled by bounded case splitting; array atoms are
dropped before any query, which weakens antecedents and therefore keeps
every Proved entailment sound.

Degenerate input note: on an unsatisfiable d, eq_set returns every pair,
since d entails anything; strategy code removes unsatisfiable clauses
before asking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Iterable, Mapping, Optional, Sequence

from . import boxes
from .syntax import (
    Atom,
    ConstraintConj,
    LinAtom,
    LinExpr,
    Rel,
    Sort,
    Var,
    false_atom,
)
from .errors import SortMismatch

NEQ_SPLIT_CAP = 64      # max disequality case splits per query (2^6)
DNF_CAP = 1024          # max disjuncts when distributing to DNF (2^10)
_PROBE_BOX = 2          # quick witness probe over [-2,2]^n
_PROBE_MAX_VARS = 6
_FM_ROW_CAP = 20000


class Verdict(enum.Enum):
    PROVED = "proved"
    DISPROVED = "disproved"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class QuantDisj:
    """Existentially quantified disjunction of constraint conjunctions."""

    exists: tuple[Var, ...] = ()
    disjuncts: tuple[ConstraintConj, ...] = (ConstraintConj(),)
    exact: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not self.disjuncts:
            raise ValueError("QuantDisj requires at least one disjunct")

    def free_vars(self) -> tuple[Var, ...]:
        ex = set(self.exists)
        seen: dict[Var, None] = {}
        for d in self.disjuncts:
            for v in d.vars():
                if v not in ex:
                    seen.setdefault(v)
        return tuple(seen)


def qd_true() -> QuantDisj:
    return QuantDisj((), (ConstraintConj(),))


def qd_false() -> QuantDisj:
    return QuantDisj((), (ConstraintConj((false_atom(),)),))


def qd_of(conj: ConstraintConj, exists: Iterable[Var] = ()) -> QuantDisj:
    return QuantDisj(tuple(exists), (conj,))


def qd_is_true(q: QuantDisj) -> bool:
    return any(d.is_true() for d in q.disjuncts)


def qd_subst(q: QuantDisj, theta: Mapping[Var, Var]) -> QuantDisj:
    """Substitute free variables, renaming existentials to avoid capture."""
    image = set(theta.values())
    ren: dict[Var, Var] = {}
    taken = {v.name for v in image} | {v.name for d in q.disjuncts for v in d.vars()}
    for ev in q.exists:
        if ev in image or ev in theta:
            k = 1
            while f"{ev.name}_{k}" in taken:
                k += 1
            nn = f"{ev.name}_{k}"
            taken.add(nn)
            ren[ev] = Var(nn, ev.sort)
    full = dict(theta)
    for ev in q.exists:
        full[ev] = ren.get(ev, ev)
    return QuantDisj(
        tuple(full[ev] for ev in q.exists),
        tuple(d.subst(full) for d in q.disjuncts),
        q.exact,
    )


def qd_rename_exists_fresh(q: QuantDisj, taken: set[str]) -> QuantDisj:
    """Give the existential prefix names outside `taken` (grows taken)."""
    theta: dict[Var, Var] = {}
    for ev in q.exists:
        if ev.name in taken:
            k = 1
            while f"{ev.name}_{k}" in taken:
                k += 1
            theta[ev] = Var(f"{ev.name}_{k}", ev.sort)
        taken.add(theta.get(ev, ev).name)
    if not theta:
        return q
    return QuantDisj(
        tuple(theta.get(ev, ev) for ev in q.exists),
        tuple(d.subst(theta) for d in q.disjuncts),
        q.exact,
    )


def qd_conjoin(parts: Sequence[QuantDisj], cap: int = DNF_CAP) -> Optional[QuantDisj]:
    """Conjoin quantified disjunctions, distributing to DNF.

    Existential prefixes are renamed apart and merged. Returns None if the
    disjunct count would exceed the cap.
    """
    taken: set[str] = set()
    for q in parts:
        taken |= {v.name for v in q.free_vars()}
    renamed = [qd_rename_exists_fresh(q, taken) for q in parts]
    total = 1
    for q in renamed:
        total *= len(q.disjuncts)
        if total > cap:
            return None
    exists: list[Var] = []
    for q in renamed:
        exists.extend(q.exists)
    disjuncts = []
    for combo in product(*(q.disjuncts for q in renamed)):
        acc = ConstraintConj()
        for c in combo:
            acc = acc.conjoin(c)
        disjuncts.append(acc)
    exact = all(q.exact for q in renamed)
    return QuantDisj(tuple(exists), tuple(disjuncts) or (ConstraintConj(),), exact)


# ---------------------------------------------------------------------------
# Row-level Fourier-Motzkin machinery.
#
# A row is (coeffs: dict[var-index, int], const: int) denoting
# sum(coeffs) + const <= 0. Equalities are expanded into two rows,
# disequalities branch.


def _tighten(coeffs: dict[int, int], const: int) -> tuple[dict[int, int], int]:
    if not coeffs:
        return coeffs, const
    g = 0
    for c in coeffs.values():
        g = gcd(g, abs(c))
    if g > 1:
        coeffs = {i: c // g for i, c in coeffs.items()}
        const = -((-const) // g)  # ceil(const/g)
    return coeffs, const


class _Unsat(Exception):
    pass


class _Overflow(Exception):
    pass


def _fm_eliminate(rows: list[tuple[dict[int, int], int]], elim: Sequence[int]):
    """Eliminate the given variable indices; returns (rows, stages, exact).

    stages records, per eliminated variable, the rows that mentioned it at
    elimination time (for witness back-substitution). Raises _Unsat when a
    ground row becomes positive, _Overflow past the row cap.
    """
    rows = [_tighten(dict(c), k) for c, k in rows]
    stages: list[tuple[int, list[tuple[dict[int, int], int]]]] = []
    exact = True

    def check_ground(rs):
        out = []
        seen = set()
        for c, k in rs:
            if not c:
                if k > 0:
                    raise _Unsat()
                continue
            key = (tuple(sorted(c.items())), k)
            if key not in seen:
                seen.add(key)
                out.append((c, k))
        return out

    rows = check_ground(rows)
    for v in elim:
        pos = [(c, k) for c, k in rows if c.get(v, 0) > 0]
        neg = [(c, k) for c, k in rows if c.get(v, 0) < 0]
        rest = [(c, k) for c, k in rows if v not in c or c[v] == 0]
        stages.append((v, pos + neg))
        if any(abs(c[v]) != 1 for c, _ in pos + neg):
            exact = False
        new_rows = list(rest)
        for cp, kp in pos:
            a = cp[v]
            for cn, kn in neg:
                b = -cn[v]
                comb: dict[int, int] = {}
                for i, c in cp.items():
                    if i != v:
                        comb[i] = comb.get(i, 0) + b * c
                for i, c in cn.items():
                    if i != v:
                        comb[i] = comb.get(i, 0) + a * c
                comb = {i: c for i, c in comb.items() if c != 0}
                k = b * kp + a * kn
                new_rows.append(_tighten(comb, k))
        if len(new_rows) > _FM_ROW_CAP:
            raise _Overflow()
        rows = check_ground(new_rows)
    return rows, stages, exact


def _backsubst_witness(stages, free_idx: Sequence[int]) -> Optional[dict[int, int]]:
    """Build an integer point from recorded elimination stages.

    Variables are assigned in reverse elimination order: at each stage the
    recorded rows only mention the stage variable and later-assigned ones,
    so they reduce to numeric bounds. May fail (None) when the rational
    interval contains no integer.
    """
    env: dict[int, int] = {i: 0 for i in free_idx}
    for v, vrows in reversed(stages):
        lo = None
        hi = None
        for c, k in vrows:
            a = c[v]
            s = k + sum(cc * env[i] for i, cc in c.items() if i != v)
            # a*v + s <= 0
            if a > 0:
                bound = (-s) // a  # v <= floor(-s/a)
                hi = bound if hi is None else min(hi, bound)
            else:
                q = -a
                bound = -((-s) // q)  # v >= ceil(s/q)
                lo = bound if lo is None else max(lo, bound)
        if lo is not None and hi is not None and lo > hi:
            return None
        if lo is None and hi is None:
            env[v] = 0
        elif lo is None:
            env[v] = min(0, hi)
        elif hi is None:
            env[v] = max(0, lo)
        else:
            env[v] = 0 if lo <= 0 <= hi else lo
    return env


@dataclass
class _System:
    vars: tuple[Var, ...]
    index: dict[Var, int]
    le: list[tuple[dict[int, int], int]]
    eq: list[tuple[dict[int, int], int]]
    ne: list[tuple[dict[int, int], int]]
    ground_false: bool


def _lower(atoms: Iterable[LinAtom], var_order: Sequence[Var] = ()) -> _System:
    vars_: list[Var] = list(var_order)
    index = {v: i for i, v in enumerate(vars_)}
    le, eq, ne = [], [], []
    ground_false = False

    def row_of(d: LinExpr) -> dict[int, int]:
        coeffs: dict[int, int] = {}
        for v, c in d.coeffs:
            if v not in index:
                index[v] = len(vars_)
                vars_.append(v)
            coeffs[index[v]] = c
        return coeffs

    for a in atoms:
        d = a.lhs.sub(a.rhs)
        coeffs = row_of(d)
        k = d.const
        rel = a.rel
        if not coeffs:
            holds = {
                Rel.EQ: k == 0,
                Rel.NE: k != 0,
                Rel.LE: k <= 0,
                Rel.LT: k < 0,
                Rel.GE: k >= 0,
                Rel.GT: k > 0,
            }[rel]
            if not holds:
                ground_false = True
            continue
        if rel is Rel.EQ:
            eq.append((coeffs, k))
        elif rel is Rel.NE:
            ne.append((coeffs, k))
        elif rel is Rel.LE:
            le.append((coeffs, k))
        elif rel is Rel.LT:
            le.append((coeffs, k + 1))
        elif rel is Rel.GE:
            le.append(({i: -c for i, c in coeffs.items()}, -k))
        else:
            le.append(({i: -c for i, c in coeffs.items()}, 1 - k))
    return _System(tuple(vars_), index, le, eq, ne, ground_false)


def _ne_branches(sys_: _System) -> Optional[list[list[tuple[dict[int, int], int]]]]:
    """Expand disequalities into <=-row alternatives (None past the cap)."""
    if 2 ** len(sys_.ne) > NEQ_SPLIT_CAP:
        return None
    base = list(sys_.le)
    for c, k in sys_.eq:
        base.append((dict(c), k))
        base.append(({i: -x for i, x in c.items()}, -k))
    branches = [base]
    for c, k in sys_.ne:
        lo = (dict(c), k + 1)  # d <= -1
        hi = ({i: -x for i, x in c.items()}, 1 - k)  # d >= 1
        branches = [br + [alt] for br in branches for alt in (lo, hi)]
    return branches


def _verify_env(atoms: Sequence[LinAtom], env: Mapping[Var, int]) -> bool:
    return all(boxes.eval_atom(a, env) for a in atoms)


def _gauss_reduce(sys_: _System):
    """Substitute away variables defined by unit-coefficient equalities.

    Returns (defs, unsat) where defs is the substitution chain as
    (var_index, coeffs, const) meaning var = sum(coeffs) + const, recorded
    in elimination order. Mutates the system rows in place.
    """
    defs: list[tuple[int, dict[int, int], int]] = []

    def subst_rows(rows, v, dcoeffs, dconst):
        out = []
        for coeffs, k in rows:
            a = coeffs.get(v)
            if not a:
                out.append((coeffs, k))
                continue
            merged = {i: c for i, c in coeffs.items() if i != v}
            for i, c in dcoeffs.items():
                merged[i] = merged.get(i, 0) + a * c
            merged = {i: c for i, c in merged.items() if c != 0}
            out.append((merged, k + a * dconst))
        return out

    progress = True
    while progress:
        progress = False
        for idx, (coeffs, k) in enumerate(sys_.eq):
            unit = next((i for i, c in coeffs.items() if abs(c) == 1), None)
            if unit is None:
                continue
            a = coeffs[unit]
            # a*v + rest + k == 0  =>  v = -a*(rest + k)
            dcoeffs = {i: -a * c for i, c in coeffs.items() if i != unit}
            dconst = -a * k
            sys_.eq.pop(idx)
            sys_.le = subst_rows(sys_.le, unit, dcoeffs, dconst)
            sys_.eq = subst_rows(sys_.eq, unit, dcoeffs, dconst)
            sys_.ne = subst_rows(sys_.ne, unit, dcoeffs, dconst)
            defs.append((unit, dcoeffs, dconst))
            progress = True
            break
    # ground rows may have appeared
    unsat = False
    for bucket, pred in ((sys_.le, lambda k: k <= 0), (sys_.eq, lambda k: k == 0), (sys_.ne, lambda k: k != 0)):
        keep = []
        for coeffs, k in bucket:
            if coeffs:
                keep.append((coeffs, k))
            elif not pred(k):
                unsat = True
        bucket[:] = keep
    return defs, unsat


def _apply_gauss_defs(defs, env: dict[int, int]):
    """Fill substituted variables back into a residual-variable assignment."""
    for v, dcoeffs, dconst in reversed(defs):
        env[v] = dconst + sum(c * env.get(i, 0) for i, c in dcoeffs.items())


def _satisfiable_uncached(c: ConstraintConj) -> tuple[Verdict, Optional[dict[Var, int]]]:
    atoms = c.lin_atoms()
    sys_ = _lower(atoms)
    if sys_.ground_false:
        return Verdict.DISPROVED, None
    if not sys_.le and not sys_.eq and not sys_.ne:
        return Verdict.PROVED, {v: 0 for v in sys_.vars}
    n = len(sys_.vars)
    gdefs, unsat = _gauss_reduce(sys_)
    if unsat:
        return Verdict.DISPROVED, None
    if 0 < n <= _PROBE_MAX_VARS:
        bsys = boxes.lower_conj(ConstraintConj(atoms))
        w = boxes.find_solution(bsys, -_PROBE_BOX, _PROBE_BOX)
        if w is not None:
            return Verdict.PROVED, w
    branches = _ne_branches(sys_)
    if branches is None:
        return Verdict.UNKNOWN, None
    residual = sorted(
        {i for rows in branches for coeffs, _ in rows for i in coeffs}
    )
    saw_feasible = False
    for rows in branches:
        try:
            _, stages, _ = _fm_eliminate(rows, residual)
        except _Unsat:
            continue
        except _Overflow:
            return Verdict.UNKNOWN, None
        saw_feasible = True
        envi = _backsubst_witness(stages, [])
        if envi is not None:
            _apply_gauss_defs(gdefs, envi)
            env = {v: envi.get(i, 0) for i, v in enumerate(sys_.vars)}
            if _verify_env(atoms, env):
                return Verdict.PROVED, env
    if not saw_feasible:
        return Verdict.DISPROVED, None
    return Verdict.UNKNOWN, None


_SAT_CACHE: dict[ConstraintConj, tuple[Verdict, Optional[dict[Var, int]]]] = {}
_SAT_CACHE_MAX = 65536

# optional hook consulted on Unknown verdicts, e.g. an external SMT solver
_UNKNOWN_RESOLVER = None


def install_unknown_resolver(fn) -> None:
    """Install a fallback deciding conjunctions the internal procedure cannot.

    fn takes a ConstraintConj and returns a Verdict (Unknown to decline).
    Pass None to uninstall. Externally resolved Proved answers carry no
    witness.
    """
    global _UNKNOWN_RESOLVER
    _UNKNOWN_RESOLVER = fn
    _SAT_CACHE.clear()


def satisfiable_with_witness(
    c: ConstraintConj,
) -> tuple[Verdict, Optional[dict[Var, int]]]:
    """Integer satisfiability of the linear part of c, with witness if Proved.

    The witness can be None for a Proved verdict that came from an
    installed external resolver.
    """
    hit = _SAT_CACHE.get(c)
    if hit is None:
        hit = _satisfiable_uncached(c)
        if hit[0] is Verdict.UNKNOWN and _UNKNOWN_RESOLVER is not None:
            resolved = _UNKNOWN_RESOLVER(c)
            if resolved in (Verdict.PROVED, Verdict.DISPROVED):
                hit = (resolved, None)
        if len(_SAT_CACHE) >= _SAT_CACHE_MAX:
            _SAT_CACHE.clear()
        _SAT_CACHE[c] = hit
    verdict, env = hit
    return verdict, dict(env) if env is not None else None


def is_satisfiable(c: ConstraintConj) -> Verdict:
    return satisfiable_with_witness(c)[0]


def _conj_with(c: ConstraintConj, extra: Sequence[LinAtom]) -> ConstraintConj:
    return ConstraintConj(c.atoms + tuple(extra))


def entails_atom(c: ConstraintConj, atom: LinAtom) -> Verdict:
    """Validity of for-all(c -> atom) over the integers."""
    results = []
    for na in negate_linatom(atom):
        v, _ = satisfiable_with_witness(_conj_with(c, [na]))
        if v is Verdict.PROVED:
            return Verdict.DISPROVED
        results.append(v)
    if all(r is Verdict.DISPROVED for r in results):
        return Verdict.PROVED
    return Verdict.UNKNOWN


def entails_equality(d: ConstraintConj, x: Var, y: Var) -> Verdict:
    """Does every integer solution of d satisfy x = y?"""
    if x.sort is not Sort.INT or y.sort is not Sort.INT:
        raise SortMismatch("entails_equality is defined on Int variables")
    if x == y:
        return Verdict.PROVED
    return entails_atom(d, LinAtom(LinExpr.of(x), Rel.EQ, LinExpr.of(y)))


def eq_set(d: ConstraintConj, a: Atom, b: Atom) -> tuple[tuple[Var, Var], ...]:
    """Equalities X=Y with X in vars(a), Y in vars(b) entailed by d.

    Pairs are deduplicated semantically (X=Y and Y=X count once, as do
    shared-variable pairs) and returned in lexicographic name order so
    strategy runs are deterministic.
    """
    out = []
    seen: set[frozenset[str]] = set()
    for x in a.vars():
        for y in b.vars():
            if x == y:
                key = frozenset((x.name,))
                ok = True
            elif x.sort is Sort.INT and y.sort is Sort.INT:
                key = frozenset((x.name, y.name))
                if key in seen:
                    continue
                ok = entails_equality(d, x, y) is Verdict.PROVED
            else:
                continue
            if ok and key not in seen:
                seen.add(key)
                out.append((x, y))
    return tuple(sorted(out, key=lambda p: (p[0].name, p[1].name)))


def negate_linatom(a: LinAtom) -> list[LinAtom]:
    """Disjunction (as a list) equivalent to not-a over the integers."""
    one = LinExpr.number(1)
    lhs, rhs = a.lhs, a.rhs
    if a.rel is Rel.EQ:
        return [LinAtom(lhs, Rel.LE, rhs.sub(one)), LinAtom(lhs, Rel.GE, rhs.add(one))]
    if a.rel is Rel.LE:
        return [LinAtom(lhs, Rel.GE, rhs.add(one))]
    if a.rel is Rel.LT:
        return [LinAtom(lhs, Rel.GE, rhs)]
    if a.rel is Rel.GE:
        return [LinAtom(lhs, Rel.LE, rhs.sub(one))]
    if a.rel is Rel.GT:
        return [LinAtom(lhs, Rel.LE, rhs)]
    return [LinAtom(lhs, Rel.EQ, rhs)]


# ---------------------------------------------------------------------------
# Projection


def _rows_to_atoms(rows, eq_pairs_detect=True) -> list[LinAtom]:
    """Turn <=-rows back into readable atoms, pairing x<=y with y<=x as =."""

    def expr(coeffs: Mapping[Var, int], const: int) -> LinExpr:
        return LinExpr.build(dict(coeffs), const)

    atoms: list[LinAtom] = []
    used = [False] * len(rows)
    norm = [
        (tuple(sorted(((v, c) for v, c in row.items()), key=lambda t: t[0].name)), k)
        for row, k in rows
    ]
    for i, (ci, ki) in enumerate(norm):
        if used[i]:
            continue
        if eq_pairs_detect:
            neg = (tuple(sorted(((v, -c) for v, c in ci), key=lambda t: t[0].name)), -ki)
            for j in range(i + 1, len(norm)):
                if not used[j] and norm[j] == neg:
                    used[i] = used[j] = True
                    pos = {v: c for v, c in ci if c > 0}
                    negc = {v: -c for v, c in ci if c < 0}
                    lk = ki if ki > 0 else 0
                    rk = -ki if ki < 0 else 0
                    atoms.append(LinAtom(expr(pos, lk), Rel.EQ, expr(negc, rk)))
                    break
            if used[i]:
                continue
        used[i] = True
        pos = {v: c for v, c in ci if c > 0}
        negc = {v: -c for v, c in ci if c < 0}
        if not pos:
            # all-negative row: print as sum >= const
            atoms.append(LinAtom(expr(negc, 0), Rel.GE, expr({}, ki)))
        else:
            lk = ki if ki > 0 else 0
            rk = -ki if ki < 0 else 0
            atoms.append(LinAtom(expr(pos, lk), Rel.LE, expr(negc, rk)))
    return atoms


def project(c: ConstraintConj, keep: Iterable[Var]) -> QuantDisj:
    """Eliminate the variables of c outside `keep`.

    Exact over the rationals; over the integers the result can be an
    over-approximation, in which case the returned QuantDisj carries
    exact=False. Array atoms touching eliminated variables are dropped
    (over-approximation, also flagged).
    """
    keepset = set(keep)
    exact = True
    passthrough: list = []
    touched: list[LinAtom] = []
    elim_set = {v for v in c.vars() if v not in keepset}
    for a in c.atoms:
        if isinstance(a, LinAtom):
            if elim_set & set(a.vars()):
                touched.append(a)
            else:
                passthrough.append(a)
        else:
            if elim_set & set(a.vars()):
                exact = False  # dropped array atom
            else:
                passthrough.append(a)
    elim_int = [v for v in elim_set if v.sort is Sort.INT]
    # array variables cannot be eliminated; any remaining occurrences were
    # only in dropped atoms
    if not touched:
        return QuantDisj((), (ConstraintConj(tuple(passthrough)),), exact)

    # substitution pass: unit-coefficient equalities define eliminated vars
    atoms = list(touched)
    elim_left = set(elim_int)
    changed = True
    while changed:
        changed = False
        for i, a in enumerate(atoms):
            if a.rel is not Rel.EQ:
                continue
            d = a.lhs.sub(a.rhs)
            for v, coef in d.coeffs:
                if v in elim_left and abs(coef) == 1:
                    # v = -(d - coef*v)/coef
                    rest = LinExpr.build(
                        {w: cc for w, cc in d.coeffs if w != v}, d.const
                    ).scale(-1 if coef == 1 else 1)
                    atoms.pop(i)
                    atoms = [_subst_var_expr(b, v, rest) for b in atoms]
                    elim_left.discard(v)
                    changed = True
                    break
            if changed:
                break
    # split remaining disequalities mentioning eliminated vars
    sys_ = _lower(atoms)
    if sys_.ground_false:
        return QuantDisj((), (ConstraintConj((false_atom(),)),), True)
    elim_idx = [sys_.index[v] for v in sys_.vars if v in elim_left]
    ne_touching = [row for row in sys_.ne if any(i in row[0] for i in elim_idx)]
    if 2 ** len(ne_touching) > NEQ_SPLIT_CAP:
        # drop those disequalities instead of splitting
        atoms = [
            a
            for a in atoms
            if not (a.rel is Rel.NE and elim_left & set(a.vars()))
        ]
        exact = False
        sys_ = _lower(atoms)
        elim_idx = [sys_.index[v] for v in sys_.vars if v in elim_left]
        ne_touching = []

    branches = _project_branches(sys_, set(elim_idx))
    disjuncts = []
    for rows, ne_rows, feasible, br_exact in branches:
        if not feasible:
            continue
        exact = exact and br_exact
        var_rows = [({sys_.vars[i]: cc for i, cc in row.items()}, k) for row, k in rows]
        datoms = list(passthrough) + _rows_to_atoms(var_rows)
        for row, k in ne_rows:
            datoms.append(_ne_row_atom({sys_.vars[i]: cc for i, cc in row.items()}, k))
        disjuncts.append(ConstraintConj(tuple(datoms)))
    if not disjuncts:
        return QuantDisj((), (ConstraintConj((false_atom(),)),), True)
    return QuantDisj((), tuple(disjuncts), exact)


def _ne_row_atom(coeffs: Mapping[Var, int], k: int) -> LinAtom:
    pos = {v: c for v, c in coeffs.items() if c > 0}
    neg = {v: -c for v, c in coeffs.items() if c < 0}
    lk = k if k > 0 else 0
    rk = -k if k < 0 else 0
    return LinAtom(LinExpr.build(pos, lk), Rel.NE, LinExpr.build(neg, rk))


def _subst_var_expr(a: LinAtom, v: Var, repl: LinExpr) -> LinAtom:
    def go(e: LinExpr) -> LinExpr:
        m = e.coeff_map()
        c = m.pop(v, 0)
        out = LinExpr.build(m, e.const)
        if c:
            out = out.add(repl.scale(c))
        return out

    return LinAtom(go(a.lhs), a.rel, go(a.rhs))


def _project_branches(sys_: _System, elim_idx: set[int]):
    """FM-project each disequality branch; yields (rows, ne_rows, feasible, exact)."""
    base = list(sys_.le)
    for c, k in sys_.eq:
        base.append((dict(c), k))
        base.append(({i: -x for i, x in c.items()}, -k))
    ne_plain = [row for row in sys_.ne if not any(i in row[0] for i in elim_idx)]
    ne_split = [row for row in sys_.ne if any(i in row[0] for i in elim_idx)]
    combos = [[]]
    for c, k in ne_split:
        lo = (dict(c), k + 1)
        hi = ({i: -x for i, x in c.items()}, 1 - k)
        combos = [br + [alt] for br in combos for alt in (lo, hi)]
    out = []
    for extra in combos:
        rows = base + extra
        try:
            rem, _, ex = _fm_eliminate(rows, sorted(elim_idx))
        except _Unsat:
            out.append(([], [], False, True))
            continue
        except _Overflow:
            # give up on this branch precisely: keep no constraint at all
            out.append(([], ne_plain, True, False))
            continue
        out.append((rem, ne_plain, True, ex))
    return out


# ---------------------------------------------------------------------------
# Quantified-disjunction equivalence (rule R4 and model checking)


def _flatten_exists(q: QuantDisj) -> tuple[list[ConstraintConj], bool]:
    """Push the existential prefix into each disjunct by projection."""
    if not q.exists:
        return list(q.disjuncts), q.exact
    exact = q.exact
    out: list[ConstraintConj] = []
    for d in q.disjuncts:
        keep = [v for v in d.vars() if v not in set(q.exists)]
        pd = project(d, keep)
        exact = exact and pd.exact
        out.extend(pd.disjuncts)
    return out, exact


def _implies(lhs: QuantDisj, rhs: QuantDisj) -> Verdict:
    """Validity of for-all(lhs -> rhs)."""
    taken = {v.name for v in lhs.free_vars()} | {v.name for v in rhs.free_vars()}
    lhs = qd_rename_exists_fresh(lhs, taken)
    rdisj, r_exact = _flatten_exists(rhs)
    if any(not isinstance(a, LinAtom) for d in rdisj for a in d.atoms) or any(
        not isinstance(a, LinAtom) for d in lhs.disjuncts for a in d.atoms
    ):
        return Verdict.UNKNOWN  # array atoms: no internal theory
    saw_unknown = not r_exact
    for phi in lhs.disjuncts:
        # check phi and not(psi1 or ... or psim) unsatisfiable
        neg_choices: list[list[LinAtom]] = []
        for psi in rdisj:
            if psi.is_true():
                neg_choices = None  # not(true) = false: implication holds
                break
            alts: list[LinAtom] = []
            for a in psi.lin_atoms():
                alts.extend(negate_linatom(a))
            neg_choices.append(alts)
        if neg_choices is None:
            continue
        total = 1
        for alts in neg_choices:
            total *= len(alts)
        if total > DNF_CAP:
            saw_unknown = True
            continue
        for picks in product(*neg_choices):
            v, _ = satisfiable_with_witness(_conj_with(phi, list(picks)))
            if v is Verdict.PROVED:
                return Verdict.DISPROVED
            if v is Verdict.UNKNOWN:
                saw_unknown = True
    if saw_unknown:
        return Verdict.UNKNOWN
    return Verdict.PROVED


def implies_quant_disj(lhs: QuantDisj, rhs: QuantDisj) -> Verdict:
    """Validity of for-all(lhs -> rhs) between quantified disjunctions."""
    return _implies(lhs, rhs)


def equiv_quant_disj(lhs: QuantDisj, rhs: QuantDisj) -> Verdict:
    """Validity of the biconditional between two quantified disjunctions."""
    a = _implies(lhs, rhs)
    if a is Verdict.DISPROVED:
        return Verdict.DISPROVED
    b = _implies(rhs, lhs)
    if b is Verdict.DISPROVED:
        return Verdict.DISPROVED
    if a is Verdict.PROVED and b is Verdict.PROVED:
        return Verdict.PROVED
    return Verdict.UNKNOWN
