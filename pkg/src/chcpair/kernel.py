"""The four transformation rules as checked transitions over a state.

A TransformationState owns the current clause set P_i, the accumulated
definition set Defs_i and a trace of every rule application. Rule methods
validate their side conditions and mutate the state; states are cloneable
for branching searches. Clause ids are minted monotonically and never
recycled, so trace lines stay stable references.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import lia
from .errors import (
    BadPosition,
    ConstraintClassViolation,
    EntailmentFailure,
    EquivalenceNotProved,
    FreshnessViolation,
    HeadVarViolation,
    MatchFailure,
    NonP0Predicate,
    NoSuchClause,
    NotADefinition,
    ShapeMismatch,
    VarConditionViolation,
)
from .lia import QuantDisj, Verdict, qd_of
from .syntax import (
    Atom,
    Clause,
    ConstraintConj,
    LinAtom,
    LinExpr,
    Program,
    Rel,
    Sort,
    Var,
    fresh_name,
)


class RuleKind(enum.Enum):
    DEFINITION = "DEFINITION"
    UNFOLDING = "UNFOLDING"
    FOLDING = "FOLDING"
    CONSTRAINT_REPLACEMENT = "CONSTRAINT_REPLACEMENT"


@dataclass(frozen=True)
class TraceStep:
    rule: RuleKind
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    position: Optional[int] = None
    def_id: Optional[int] = None
    self_unfolding: Optional[bool] = None
    reversible_folding: Optional[bool] = None

    def line(self, n: int) -> str:
        extra = ""
        if self.position is not None:
            extra += f" pos={self.position}"
        if self.def_id is not None:
            extra += f" def={self.def_id}"
        flags = []
        if self.self_unfolding is not None:
            flags.append(f"self_unfolding:{int(self.self_unfolding)}")
        if self.reversible_folding is not None:
            flags.append(f"reversible_folding:{int(self.reversible_folding)}")
        ins = ",".join(str(i) for i in self.inputs)
        outs = ",".join(str(i) for i in self.outputs)
        return f"STEP {n} {self.rule.value} in={ins} out={outs}{extra} flags={','.join(flags)}"


@dataclass(frozen=True)
class SequenceReport:
    a_sound: bool
    no_self_unfolding: bool
    all_foldings_reversible: bool

    @property
    def a_complete_conditions(self) -> dict[str, bool]:
        return {
            "no_self_unfolding": self.no_self_unfolding,
            "all_foldings_reversible": self.all_foldings_reversible,
        }


# --- constraint-class classifiers for rule R1 condition (ii) ---------------

def _is_lia_conj(c: ConstraintConj) -> bool:
    return all(isinstance(a, LinAtom) for a in c)


def _is_2var_atom(a: LinAtom) -> bool:
    lv, rv = a.lhs.as_var(), a.rhs.as_var()
    zero = LinExpr.number(0)
    if a.rel in (Rel.GT, Rel.EQ):
        if lv is not None and (a.rhs == zero or rv is not None):
            return True
    return False


def _is_2var_conj(c: ConstraintConj) -> bool:
    return all(isinstance(a, LinAtom) and _is_2var_atom(a) for a in c)


A_CLASSIFIERS: dict[str, Callable[[ConstraintConj], bool]] = {
    "lia": _is_lia_conj,
    "2var": _is_2var_conj,
}


class TransformationState:
    """P_i, Defs_i and the application trace of one transformation sequence."""

    def __init__(self, p0: Program, a_classifier: str = "lia"):
        self.clauses: list[Clause] = list(p0.clauses)
        self.defs: list[Clause] = []
        self.trace: list[TraceStep] = []
        self.a_classifier = a_classifier
        self.p0_preds: set[str] = set(p0.preds())
        self.seen_preds: set[str] = set(p0.preds())
        self._next_cid = p0.max_id() + 1

    # -- bookkeeping --

    def clone(self) -> "TransformationState":
        s = object.__new__(TransformationState)
        s.clauses = list(self.clauses)
        s.defs = list(self.defs)
        s.trace = list(self.trace)
        s.a_classifier = self.a_classifier
        s.p0_preds = set(self.p0_preds)
        s.seen_preds = set(self.seen_preds)
        s._next_cid = self._next_cid
        return s

    def mint_id(self) -> int:
        cid = self._next_cid
        self._next_cid += 1
        return cid

    @property
    def current(self) -> Program:
        return Program(self.clauses)

    @property
    def defs_program(self) -> Program:
        return Program(self.defs)

    def clause(self, cid: int) -> Clause:
        for c in self.clauses:
            if c.cid == cid:
                return c
        raise NoSuchClause(f"clause {cid} is not in the current program")

    def def_clause(self, cid: int) -> Clause:
        for c in self.defs:
            if c.cid == cid:
                return c
        raise NotADefinition(f"clause {cid} is not a definition")

    def _index_of(self, cid: int) -> int:
        for i, c in enumerate(self.clauses):
            if c.cid == cid:
                return i
        raise NoSuchClause(f"clause {cid} is not in the current program")

    def trace_text(self) -> str:
        return "\n".join(step.line(i + 1) for i, step in enumerate(self.trace)) + (
            "\n" if self.trace else ""
        )

    # -- rule R1: definition introduction --

    def apply_definition(self, d: Clause) -> Clause:
        if d.head is None:
            raise HeadVarViolation("a definition must have a head atom")
        if d.head.pred in self.seen_preds:
            raise FreshnessViolation(
                f"predicate {d.head.pred!r} already occurs in the sequence"
            )
        classify = A_CLASSIFIERS[self.a_classifier]
        if not classify(d.constraint):
            raise ConstraintClassViolation(
                f"definition constraint is outside the {self.a_classifier!r} class"
            )
        if not d.body:
            raise NonP0Predicate("a definition body must be a non-empty conjunction")
        for a in d.body:
            if a.pred not in self.p0_preds:
                raise NonP0Predicate(
                    f"body predicate {a.pred!r} does not occur in the initial program"
                )
        if len(set(d.head.args)) != len(d.head.args):
            raise HeadVarViolation("head variables of a definition must be distinct")
        body_vars = set(d.constraint.vars()) | {v for a in d.body for v in a.args}
        for v in d.head.args:
            if v not in body_vars:
                raise HeadVarViolation(
                    f"head variable {v.name} does not occur free in the body"
                )
        new = Clause(self.mint_id(), d.head, d.constraint, d.body)
        self.clauses.append(new)
        self.defs.append(new)
        self.seen_preds.add(new.head.pred)
        self.trace.append(
            TraceStep(RuleKind.DEFINITION, (), (new.cid,))
        )
        return new

    # -- rule R2: unfolding --

    def apply_unfold(self, cid: int, atom_index: int) -> list[Clause]:
        at = self._index_of(cid)
        c = self.clauses[at]
        if not (0 <= atom_index < len(c.body)):
            raise BadPosition(f"clause {cid} has no body atom {atom_index}")
        target = c.body[atom_index]
        matching = [cl for cl in self.clauses if cl.head is not None and cl.head.pred == target.pred]
        c_var_names = {v.name for v in c.vars()}
        new_clauses: list[Clause] = []
        for dj in matching:
            head_vars = set(dj.head.args)
            taken = c_var_names | {v.name for v in dj.vars()}
            ren: dict[Var, Var] = {}
            for v in dj.vars():
                if v not in head_vars and v.name in c_var_names:
                    nn = fresh_name(v.name, taken)
                    taken.add(nn)
                    ren[v] = Var(nn, v.sort)
            djr = dj.subst(ren) if ren else dj
            sigma = dict(zip(djr.head.args, target.args))
            new_constraint = c.constraint.conjoin(djr.constraint.subst(sigma))
            new_body = (
                c.body[:atom_index]
                + tuple(a.subst(sigma) for a in djr.body)
                + c.body[atom_index + 1 :]
            )
            new_clauses.append(Clause(self.mint_id(), c.head, new_constraint, new_body))
        self.clauses[at : at + 1] = new_clauses
        self.trace.append(
            TraceStep(
                RuleKind.UNFOLDING,
                (cid,),
                tuple(cl.cid for cl in new_clauses),
                position=atom_index,
                self_unfolding=(c.head is not None and c.head.pred == target.pred),
            )
        )
        return new_clauses

    # -- rule R3: folding --

    def check_fold(
        self,
        clause: Clause,
        body_positions: Sequence[int],
        d: Clause,
        theta: Mapping[Var, Var],
    ) -> ConstraintConj:
        """Validate the folding side conditions; returns the residual constraint e.

        e starts as the clause constraint; conjuncts mentioning images of the
        definition's existential variables are dropped when still entailed by
        the remainder together with the instantiated definition constraint.
        """
        positions = list(body_positions)
        if len(set(positions)) != len(positions) or any(
            not 0 <= i < len(clause.body) for i in positions
        ):
            raise BadPosition(f"invalid body positions {positions}")
        if len(positions) != len(d.body):
            raise MatchFailure(
                f"definition body has {len(d.body)} atoms, {len(positions)} selected"
            )
        q = [clause.body[i] for i in positions]
        b_inst = [a.subst(theta) for a in d.body]
        if q != b_inst:
            raise MatchFailure(
                f"selected atoms {q} do not match the instantiated definition body {b_inst}"
            )
        d_inst = d.constraint.subst(theta)

        def entailed(conj: ConstraintConj, atom) -> Verdict:
            if atom in conj.atoms:
                return Verdict.PROVED
            if isinstance(atom, LinAtom):
                return lia.entails_atom(conj, atom)
            return Verdict.UNKNOWN  # array atom not syntactically present

        # condition (ii) with e := c: c must entail every conjunct of d(theta)
        for atom in d_inst:
            v = entailed(clause.constraint, atom)
            if v is not Verdict.PROVED:
                raise EntailmentFailure(
                    f"clause constraint does not entail {atom!r} ({v.value})",
                    atom=atom,
                    verdict=v,
                )
        # existential variables of the definition and their images
        dvars: list[Var] = []
        for v in d.constraint.vars():
            if v not in dvars:
                dvars.append(v)
        for a in d.body:
            for v in a.args:
                if v not in dvars:
                    dvars.append(v)
        head_vars = set(d.head.args)
        exvars = [v for v in dvars if v not in head_vars]
        images = {theta.get(v, v) for v in exvars}
        # condition (iii.2): theta maps existential vars injectively, apart
        # from every other variable of (d, B)
        for x in exvars:
            xi = theta.get(x, x)
            for y in dvars:
                if y != x and theta.get(y, y) == xi:
                    raise VarConditionViolation(
                        f"existential variable image {xi.name} collides with {y.name}"
                    )
        # residual constraint: drop conjuncts that mention existential images
        # while they stay entailed by the rest plus d(theta)
        e_atoms = list(clause.constraint.atoms)
        changed = True
        while changed:
            changed = False
            for i, atom in enumerate(e_atoms):
                if not images & set(atom.vars()):
                    continue
                rest = ConstraintConj(
                    tuple(e_atoms[:i] + e_atoms[i + 1 :]) + d_inst.atoms
                )
                if entailed(rest, atom) is Verdict.PROVED:
                    e_atoms.pop(i)
                    changed = True
                    break
        e = ConstraintConj(tuple(e_atoms))
        # condition (iii.1): images must not occur in head, e, or unfolded rest
        rest_atoms = [a for i, a in enumerate(clause.body) if i not in set(positions)]
        outside: set[Var] = set()
        if clause.head is not None:
            outside |= set(clause.head.args)
        outside |= set(e.vars())
        for a in rest_atoms:
            outside |= set(a.args)
        bad = images & outside
        if bad:
            raise VarConditionViolation(
                f"existential image {sorted(v.name for v in bad)} occurs outside the folded atoms"
            )
        return e

    def apply_fold(
        self,
        cid: int,
        body_positions: Sequence[int],
        def_id: int,
        theta: Mapping[Var, Var],
    ) -> Clause:
        d = self.def_clause(def_id)
        at = self._index_of(cid)
        c = self.clauses[at]
        e = self.check_fold(c, body_positions, d, theta)
        folded_atom = d.head.subst(theta)
        first = min(body_positions)
        new_body = []
        for i, a in enumerate(c.body):
            if i == first:
                new_body.append(folded_atom)
            elif i in set(body_positions):
                continue
            else:
                new_body.append(a)
        reversible = def_id != cid and any(cl.cid == def_id for cl in self.clauses)
        new = Clause(self.mint_id(), c.head, e, tuple(new_body))
        self.clauses[at] = new
        self.trace.append(
            TraceStep(
                RuleKind.FOLDING,
                (cid,),
                (new.cid,),
                def_id=def_id,
                reversible_folding=reversible,
            )
        )
        return new

    # -- rule R4: constraint replacement --

    def apply_replace(
        self, group: Sequence[int], new_constraints: Sequence[ConstraintConj]
    ) -> list[Clause]:
        if not group:
            raise ShapeMismatch("empty clause group")
        idxs = [self._index_of(cid) for cid in group]
        ref = self.clauses[idxs[0]]
        ref_skel_vars = _skeleton_vars(ref)
        disjuncts: list[ConstraintConj] = []
        taken = {v.name for v in ref.vars()}
        for cid, ix in zip(group, idxs):
            cl = self.clauses[ix]
            theta = _match_skeleton(cl, ref)
            mapped = cl.constraint
            # rename constraint-local variables apart from the reference
            local = [v for v in mapped.vars() if v not in theta]
            ren: dict[Var, Var] = dict(theta)
            for v in local:
                if cl is ref:
                    taken.add(v.name)
                    continue
                nn = fresh_name(v.name, taken)
                taken.add(nn)
                ren[v] = Var(nn, v.sort)
            disjuncts.append(mapped.subst(ren))
        if not new_constraints:
            # deletion: every constraint in the group must be unsatisfiable
            for cid, dj in zip(group, disjuncts):
                v = lia.is_satisfiable(dj)
                if v is not Verdict.DISPROVED:
                    raise EquivalenceNotProved(
                        f"clause {cid} constraint not shown unsatisfiable ({v.value})",
                        verdict=v,
                    )
        else:
            lhs_ex = tuple(
                v for d in disjuncts for v in d.vars() if v not in ref_skel_vars
            )
            rhs_ex = tuple(
                v
                for d in new_constraints
                for v in d.vars()
                if v not in ref_skel_vars
            )
            lhs = QuantDisj(_dedup(lhs_ex), tuple(disjuncts))
            rhs = QuantDisj(_dedup(rhs_ex), tuple(new_constraints))
            v = lia.equiv_quant_disj(lhs, rhs)
            if v is not Verdict.PROVED:
                raise EquivalenceNotProved(
                    f"constraint equivalence not proved ({v.value})", verdict=v
                )
        new_clauses = [
            Clause(self.mint_id(), ref.head, nc, ref.body) for nc in new_constraints
        ]
        group_set = set(group)
        insert_at = min(idxs)
        rebuilt: list[Clause] = []
        for i, c in enumerate(self.clauses):
            if i == insert_at:
                rebuilt.extend(new_clauses)
            if c.cid not in group_set:
                rebuilt.append(c)
        self.clauses = rebuilt
        self.trace.append(
            TraceStep(
                RuleKind.CONSTRAINT_REPLACEMENT,
                tuple(group),
                tuple(c.cid for c in new_clauses),
            )
        )
        return new_clauses


def _dedup(vs: Iterable[Var]) -> tuple[Var, ...]:
    seen: dict[Var, None] = {}
    for v in vs:
        seen.setdefault(v)
    return tuple(seen)


def _skeleton_vars(c: Clause) -> set[Var]:
    out: set[Var] = set()
    if c.head is not None:
        out |= set(c.head.args)
    for a in c.body:
        out |= set(a.args)
    return out


def _match_skeleton(c: Clause, ref: Clause) -> dict[Var, Var]:
    """Variable bijection making (H, G) of c syntactically equal to ref's."""
    if (c.head is None) != (ref.head is None) or len(c.body) != len(ref.body):
        raise ShapeMismatch("clause shapes differ")
    pairs: list[tuple[Var, Var]] = []
    if c.head is not None:
        if c.head.pred != ref.head.pred:
            raise ShapeMismatch("head predicates differ")
        pairs.extend(zip(c.head.args, ref.head.args))
    for a, b in zip(c.body, ref.body):
        if a.pred != b.pred:
            raise ShapeMismatch("body predicates differ")
        pairs.extend(zip(a.args, b.args))
    fwd: dict[Var, Var] = {}
    bwd: dict[Var, Var] = {}
    for x, y in pairs:
        if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
            raise ShapeMismatch("clause skeletons are not renamings of each other")
    return fwd


# ---------------------------------------------------------------------------
# Spec-level operation wrappers and trace validators


def apply_definition(s: TransformationState, d: Clause) -> TransformationState:
    s.apply_definition(d)
    return s


def apply_unfold(s: TransformationState, clause: int, atom_index: int) -> TransformationState:
    s.apply_unfold(clause, atom_index)
    return s


def apply_fold(
    s: TransformationState,
    clause: int,
    body_positions: Sequence[int],
    def_id: int,
    theta: Mapping[Var, Var],
) -> TransformationState:
    s.apply_fold(clause, body_positions, def_id, theta)
    return s


def apply_replace(
    s: TransformationState, group: Sequence[int], new_constraints: Sequence[ConstraintConj]
) -> TransformationState:
    s.apply_replace(group, new_constraints)
    return s


def check_all_defs_unfolded(trace: Sequence[TraceStep]) -> tuple[bool, list[int]]:
    """True iff every introduced definition is later unfolded."""
    def_ids = [s.outputs[0] for s in trace if s.rule is RuleKind.DEFINITION]
    unfolded = {s.inputs[0] for s in trace if s.rule is RuleKind.UNFOLDING}
    offenders = [d for d in def_ids if d not in unfolded]
    return not offenders, offenders


def classify_sequence(trace: Sequence[TraceStep]) -> SequenceReport:
    """Report the syntactic side conditions for completeness over a trace."""
    no_self = all(
        not s.self_unfolding for s in trace if s.rule is RuleKind.UNFOLDING
    )
    all_rev = all(
        s.reversible_folding for s in trace if s.rule is RuleKind.FOLDING
    )
    return SequenceReport(a_sound=True, no_self_unfolding=no_self, all_foldings_reversible=all_rev)


def parse_trace(text: str) -> list[TraceStep]:
    """Parse the line-oriented trace log back into steps."""
    steps = []
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw or raw.startswith("#") or raw.startswith("PAIR"):
            continue
        parts = raw.split()
        if parts[0] != "STEP":
            raise ValueError(f"bad trace line: {raw!r}")
        rule = RuleKind(parts[2])
        fields = {"in": "", "out": "", "pos": None, "def": None, "flags": ""}
        for tok in parts[3:]:
            k, _, v = tok.partition("=")
            fields[k] = v
        ids = lambda s: tuple(int(x) for x in s.split(",") if x)
        flags = dict(
            f.split(":") for f in fields["flags"].split(",") if f
        )
        steps.append(
            TraceStep(
                rule,
                ids(fields["in"]),
                ids(fields["out"]),
                position=int(fields["pos"]) if fields["pos"] else None,
                def_id=int(fields["def"]) if fields["def"] else None,
                self_unfolding=bool(int(flags["self_unfolding"]))
                if "self_unfolding" in flags
                else None,
                reversible_folding=bool(int(flags["reversible_folding"]))
                if "reversible_folding" in flags
                else None,
            )
        )
    return steps
