"""Bounded ground evaluation: desk-scale least models and goal violations.

Evaluation is bottom-up and semi-naive over derivation-tree height: an
atom enters level k+1 when some clause derives it from body atoms of
height <= k, at least one of exactly height k. All values (including
intermediate constraint variables) are confined to the budget box, so the
result under-approximates the true least model by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Optional, Union

from . import boxes
from .errors import ArrayUnsupported
from .syntax import Clause, ConstraintConj, Program, Sort, Var


@dataclass(frozen=True)
class OracleBudget:
    depth: int
    lo: int
    hi: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.lo > self.hi:
            raise ValueError("empty value box")

    def doubled(self) -> "OracleBudget":
        return OracleBudget(self.depth * 2, self.lo, self.hi)


@dataclass(frozen=True)
class GroundAtom:
    pred: str
    args: tuple[int, ...]

    def __repr__(self):
        return f"{self.pred}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Found:
    goal_id: int
    valuation: Mapping[Var, int]


@dataclass(frozen=True)
class NotWithinBudget:
    pass


def _reject_arrays(p: Program):
    for c in p.clauses:
        if c.constraint.array_atoms():
            raise ArrayUnsupported(f"clause {c.cid} uses array constraints")
        for v in c.vars():
            if v.sort is Sort.ARRAY:
                raise ArrayUnsupported(f"clause {c.cid} has array variables")


def _clause_system(c: Clause) -> boxes.BoxSystem:
    return boxes.lower_conj(
        ConstraintConj(c.constraint.lin_atoms()), var_order=c.vars()
    )


def _bindings(
    body, facts_per_pred, delta_per_pred, need_delta: bool
):
    """Yield variable envs binding every body atom to a known ground atom."""
    n = len(body)

    def rec(k: int, env: dict, used_delta: bool):
        if k == n:
            if not need_delta or used_delta:
                yield dict(env)
            return
        atom = body[k]
        pool = facts_per_pred.get(atom.pred, set())
        dpool = delta_per_pred.get(atom.pred, set())
        for vals in pool:
            ok = True
            touched = []
            for v, x in zip(atom.args, vals):
                if v in env:
                    if env[v] != x:
                        ok = False
                        break
                else:
                    env[v] = x
                    touched.append(v)
            if ok:
                yield from rec(k + 1, env, used_delta or vals in dpool)
            for v in touched:
                env.pop(v)

    yield from rec(0, {}, False)


def bounded_lm(p: Program, b: OracleBudget) -> set[GroundAtom]:
    """Ground atoms derivable within the budget's height and value box."""
    if p.goals():
        raise ValueError("bounded_lm takes a definite program (no goals)")
    _reject_arrays(p)
    systems = {c.cid: _clause_system(c) for c in p.clauses}
    total: dict[str, set[tuple[int, ...]]] = {}
    delta: dict[str, set[tuple[int, ...]]] = {}
    for level in range(b.depth):
        new: dict[str, set[tuple[int, ...]]] = {}
        for c in p.clauses:
            sys_ = systems[c.cid]
            for env in _bindings(c.body, total, delta, need_delta=level > 0):
                for full in boxes.solutions(sys_, b.lo, b.hi, fixed=env):
                    vals = tuple(full[v] for v in c.head.args)
                    if all(b.lo <= x <= b.hi for x in vals):
                        if vals not in total.get(c.head.pred, set()):
                            new.setdefault(c.head.pred, set()).add(vals)
        if not any(new.values()):
            break
        delta = new
        for pred, tuples in new.items():
            total.setdefault(pred, set()).update(tuples)
    return {GroundAtom(pred, vals) for pred, s in total.items() for vals in s}


def false_derivable(p: Program, b: OracleBudget) -> Union[Found, NotWithinBudget]:
    """Search for a goal violated by the bounded least model."""
    _reject_arrays(p)
    lm = bounded_lm(p.definite(), b)
    facts: dict[str, set[tuple[int, ...]]] = {}
    for ga in lm:
        facts.setdefault(ga.pred, set()).add(ga.args)
    for goal in p.goals():
        sys_ = _clause_system(goal)
        for env in _bindings(goal.body, facts, {}, need_delta=False):
            hit = boxes.solutions(sys_, b.lo, b.hi, fixed=env, limit=1)
            if hit:
                return Found(goal.cid, hit[0])
    return NotWithinBudget()


@dataclass(frozen=True)
class ProbeReport:
    p0_budget: Union[Found, NotWithinBudget]
    pn_budget: Union[Found, NotWithinBudget]
    p0_doubled: Union[Found, NotWithinBudget]
    pn_doubled: Union[Found, NotWithinBudget]

    @property
    def agreement(self) -> bool:
        """The theorem-backed direction: a violation found within the budget
        on either side must be found on the other within the doubled budget."""
        p0_found = isinstance(self.p0_budget, Found)
        pn_found = isinstance(self.pn_budget, Found)
        if p0_found and not isinstance(self.pn_doubled, Found):
            return False
        if pn_found and not isinstance(self.p0_doubled, Found):
            return False
        return True

    def summary(self) -> str:
        def s(r):
            return "Found" if isinstance(r, Found) else "NotWithinBudget"

        return (
            f"P0: {s(self.p0_budget)} (doubled: {s(self.p0_doubled)}), "
            f"Pn: {s(self.pn_budget)} (doubled: {s(self.pn_doubled)}), "
            f"agreement: {self.agreement}"
        )


def equisat_probe(p0: Program, pn: Program, b: OracleBudget) -> ProbeReport:
    """Compare goal violations before/after a transformation at desk scale."""
    return ProbeReport(
        p0_budget=false_derivable(p0, b),
        pn_budget=false_derivable(pn, b),
        p0_doubled=false_derivable(p0, b.doubled()),
        pn_doubled=false_derivable(pn, b.doubled()),
    )
