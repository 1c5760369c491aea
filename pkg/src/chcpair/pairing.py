"""The predicate pairing strategy and its iterated driver.

One pairing run takes a goal false <- c, q(X), r(Y) plus two predicate-
disjoint programs and eliminates every mixed Q/R body by introducing new
predicates for pairs of atoms sharing a maximal set of entailed argument
equalities, then folding. The driver iterates runs over goals whose bodies
mix several predicate cones, duplicating a cone when a goal pairs two
atoms of the same predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import lia
from .errors import (
    CapExceeded,
    InputShapeError,
    NoMixedPair,
    OverlapError,
    PartitionOverlap,
    RuleError,
)
from .kernel import (
    SequenceReport,
    TraceStep,
    TransformationState,
    check_all_defs_unfolded,
    classify_sequence,
)
from .syntax import (
    Atom,
    Clause,
    ConstraintConj,
    LinAtom,
    LinExpr,
    Program,
    Rel,
    Var,
    fresh_name,
    predicate_partition,
    print_atom,
    reachable_preds,
)


@dataclass(frozen=True)
class PairingConfig:
    max_defs: int = 64
    tie_break: str = "leftmost"  # or "lexicographic"
    iterate: bool = False
    a_classifier: str = "lia"

    def __post_init__(self):
        if self.max_defs < 1:
            raise ValueError("max_defs must be positive")
        if self.tie_break not in ("leftmost", "lexicographic"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class PairChoice:
    """One inner-loop pair selection, for the PAIR trace lines."""

    clause_id: int
    clause: Clause
    pos_a: int
    pos_b: int
    atom_a: Atom
    atom_b: Atom
    eq: tuple[tuple[Var, Var], ...]
    trace_index: int

    def line(self) -> str:
        return (
            f"PAIR clause={self.clause_id} "
            f"chosen=({print_atom(self.atom_a)},{print_atom(self.atom_b)}) eq={len(self.eq)}"
        )


@dataclass
class PairingResult:
    transf: Program
    defs: Program
    state: TransformationState
    report: SequenceReport
    pair_log: list[PairChoice] = field(default_factory=list)
    overlaps: list[PartitionOverlap] = field(default_factory=list)
    steps: Optional[list[TraceStep]] = None

    def all_steps(self) -> list[TraceStep]:
        return self.steps if self.steps is not None else list(self.state.trace)

    def trace_text(self) -> str:
        """Kernel trace interleaved with the strategy's PAIR lines."""
        lines = []
        by_index: dict[int, list[PairChoice]] = {}
        for pc in self.pair_log:
            by_index.setdefault(pc.trace_index, []).append(pc)
        steps = self.all_steps()
        for i, step in enumerate(steps):
            for pc in by_index.get(i, ()):
                lines.append(pc.line())
            lines.append(step.line(i + 1))
        for pc in by_index.get(len(steps), ()):
            lines.append(pc.line())
        return "\n".join(lines) + ("\n" if lines else "")


def select_pair(
    e: Clause,
    q_preds: set[str],
    r_preds: set[str],
    tie_break: str = "leftmost",
) -> tuple[int, int, tuple[tuple[Var, Var], ...]]:
    """Pick the (Q-atom, R-atom) body pair with the most entailed equalities."""
    q_pos = [i for i, a in enumerate(e.body) if a.pred in q_preds]
    r_pos = [i for i, a in enumerate(e.body) if a.pred in r_preds]
    if not q_pos or not r_pos:
        raise NoMixedPair(f"clause {e.cid} has no Q/R atom pair")
    scored = []
    for i in q_pos:
        for j in r_pos:
            eqs = lia.eq_set(e.constraint, e.body[i], e.body[j])
            scored.append((len(eqs), i, j, eqs))
    best = max(s[0] for s in scored)
    top = [s for s in scored if s[0] == best]
    if tie_break == "lexicographic":
        top.sort(key=lambda s: (print_atom(e.body[s[1]]), print_atom(e.body[s[2]])))
    else:
        top.sort(key=lambda s: (s[1], s[2]))
    _, i, j, eqs = top[0]
    return i, j, eqs


def find_matching_def(
    defs: Iterable[Clause],
    a: Atom,
    b: Atom,
    d: ConstraintConj,
) -> Optional[tuple[int, dict[Var, Var]]]:
    """First definition (newest first) whose body folds the pair (a, b).

    Matching builds the substitution from the definition's body onto (a, b)
    and requires d to entail the instantiated definition constraint; the
    full folding side conditions are re-checked by the kernel at apply time.
    """
    for defc in reversed(list(defs)):
        if len(defc.body) != 2:
            continue
        da, db = defc.body
        if da.pred != a.pred or db.pred != b.pred:
            continue
        theta: dict[Var, Var] = {}
        ok = True
        for dv, tv in list(zip(da.args, a.args)) + list(zip(db.args, b.args)):
            if theta.setdefault(dv, tv) != tv:
                ok = False
                break
        if not ok:
            continue
        for atom in defc.constraint.subst(theta):
            if not isinstance(atom, LinAtom):
                ok = False
                break
            if lia.entails_atom(d, atom) is not lia.Verdict.PROVED:
                ok = False
                break
        if ok:
            return defc.cid, theta
    return None


def _fresh_pred(state: TransformationState, base: str = "new") -> str:
    k = len(state.defs) + 1
    name = f"{base}{k}"
    while name in state.seen_preds:
        k += 1
        name = f"{base}{k}"
    return name


def _pair_def_clause(a: Atom, b: Atom, eqs, name: str) -> Clause:
    args: list[Var] = []
    for v in a.args + b.args:
        if v not in args:
            args.append(v)
    e_atoms = tuple(
        LinAtom(LinExpr.of(x), Rel.EQ, LinExpr.of(y)) for x, y in eqs if x != y
    )
    return Clause(0, Atom(name, tuple(args)), ConstraintConj(e_atoms), (a, b))


def predicate_pairing(
    c_init: Clause,
    q_prog: Program,
    r_prog: Program,
    cfg: PairingConfig = PairingConfig(),
    reserved_preds: Iterable[str] = (),
) -> PairingResult:
    """Run the pairing strategy on one goal over two disjoint programs."""
    q_preds = set(q_prog.preds())
    r_preds = set(r_prog.preds())
    shared = q_preds & r_preds
    if shared:
        raise InputShapeError(f"input programs share predicate {sorted(shared)[0]!r}")
    if q_prog.goals() or r_prog.goals():
        raise InputShapeError("input programs must be definite")
    qa = [i for i, a in enumerate(c_init.body) if a.pred in q_preds]
    ra = [i for i, a in enumerate(c_init.body) if a.pred in r_preds]
    if len(qa) != 1 or len(ra) != 1:
        raise InputShapeError(
            "the initial clause must contain exactly one Q-atom and one R-atom"
        )

    # assemble P_0 with fresh sequential ids: Q, R, then the goal
    renum: list[Clause] = []
    nid = 1
    for c in tuple(q_prog) + tuple(r_prog) + (c_init,):
        renum.append(Clause(nid, c.head, c.constraint, c.body))
        nid += 1
    state = TransformationState(Program(renum), a_classifier=cfg.a_classifier)
    state.seen_preds |= set(reserved_preds)
    base_ids = [c.cid for c in renum[:-1]]
    goal_id = renum[-1].cid

    in_cls: list[int] = [goal_id]
    pair_log: list[PairChoice] = []
    transf_ids: list[int] = list(base_ids)

    while in_cls:
        cid = in_cls.pop(0)
        clause = state.clause(cid)
        pos_q = next(i for i, a in enumerate(clause.body) if a.pred in q_preds)
        after_q = state.apply_unfold(cid, pos_q)
        unfolded: list[int] = []
        for c in after_q:
            pos_r = next(i for i, a in enumerate(c.body) if a.pred in r_preds)
            unfolded.extend(cl.cid for cl in state.apply_unfold(c.cid, pos_r))
        # silently remove clauses with unsatisfiable constraints (rule R4)
        folded: list[int] = []
        for ucid in unfolded:
            c = state.clause(ucid)
            if lia.is_satisfiable(c.constraint) is lia.Verdict.DISPROVED:
                state.apply_replace([ucid], [])
            else:
                folded.append(ucid)
        # inner definition & folding loop
        progress = True
        while progress:
            progress = False
            for k, ecid in enumerate(folded):
                e = state.clause(ecid)
                has_q = any(a.pred in q_preds for a in e.body)
                has_r = any(a.pred in r_preds for a in e.body)
                if not (has_q and has_r):
                    continue
                pos_a, pos_b, eqs = select_pair(e, q_preds, r_preds, cfg.tie_break)
                pair_log.append(
                    PairChoice(
                        ecid, e, pos_a, pos_b, e.body[pos_a], e.body[pos_b], eqs,
                        trace_index=len(state.trace),
                    )
                )
                hit = find_matching_def(
                    state.defs, e.body[pos_a], e.body[pos_b], e.constraint
                )
                if hit is not None:
                    def_id, theta = hit
                    new = state.apply_fold(ecid, [pos_a, pos_b], def_id, theta)
                else:
                    if len(state.defs) >= cfg.max_defs:
                        raise CapExceeded(
                            f"definition cap {cfg.max_defs} reached"
                        )
                    name = _fresh_pred(state)
                    dcl = _pair_def_clause(e.body[pos_a], e.body[pos_b], eqs, name)
                    intro = state.apply_definition(dcl)
                    theta = {v: v for v in intro.vars()}
                    new = state.apply_fold(ecid, [pos_a, pos_b], intro.cid, theta)
                    in_cls.append(intro.cid)
                folded[k] = new.cid
                progress = True
                break
        transf_ids.extend(folded)

    current_ids = {c.cid for c in state.clauses}
    assert current_ids == set(transf_ids), "strategy state out of sync"
    transf = state.current
    # output contract: no mixed Q/R bodies remain
    for c in transf:
        has_q = any(a.pred in q_preds for a in c.body)
        has_r = any(a.pred in r_preds for a in c.body)
        assert not (has_q and has_r), f"clause {c.cid} still mixes partitions"
    return PairingResult(
        transf=transf,
        defs=state.defs_program,
        state=state,
        report=classify_sequence(state.trace),
        pair_log=pair_log,
    )


# ---------------------------------------------------------------------------
# Iterated driver


def duplicate_cone(program: Program, pred: str, taken: Iterable[str]) -> tuple[list[Clause], dict[str, str]]:
    """Copy the clause cone of pred with renamed predicates."""
    cone = reachable_preds(program, pred)
    taken_set = set(taken) | set(program.preds())
    mapping: dict[str, str] = {}
    for p in sorted(cone):
        k = 2
        name = f"{p}_{k}"
        while name in taken_set:
            k += 1
            name = f"{p}_{k}"
        taken_set.add(name)
        mapping[p] = name
    copies = []
    for c in program:
        if c.head is not None and c.head.pred in cone:
            copies.append(
                Clause(
                    0,
                    Atom(mapping[c.head.pred], c.head.args),
                    c.constraint,
                    tuple(Atom(mapping.get(a.pred, a.pred), a.args) for a in c.body),
                )
            )
    return copies, mapping


def _rank_goal_pairs(goal: Clause) -> list[tuple[int, int]]:
    """Atom index pairs of a goal body, by descending |Eq| then position."""
    n = len(goal.body)
    scored = []
    for i in range(n):
        for j in range(i + 1, n):
            eqs = lia.eq_set(goal.constraint, goal.body[i], goal.body[j])
            scored.append((-len(eqs), i, j))
    scored.sort()
    return [(i, j) for _, i, j in scored]


def iterate_pairing(
    p: Program,
    goals: Sequence[Clause],
    cfg: PairingConfig,
    max_rounds: Optional[int] = None,
) -> PairingResult:
    """Iterate the pairing strategy until no goal mixes two disjoint cones.

    Two atoms of the same predicate are paired by duplicating that
    predicate's cone under renamed predicates. A chosen pair whose cones
    overlap (for distinct predicates) is reported as a PartitionOverlap
    and its goal left untransformed. max_rounds bounds the number of
    pairing rounds (None = run to quiescence).
    """
    if not cfg.iterate and (max_rounds is None or max_rounds > 1):
        raise InputShapeError("multi-round iterate_pairing requires cfg.iterate")
    definite = [c for c in p if not c.is_goal]
    work_goals = [c for c in p if c.is_goal] + [g for g in goals if g not in p.clauses]
    all_steps: list[TraceStep] = []
    all_pairs: list[PairChoice] = []
    overlaps: list[PartitionOverlap] = []
    all_defs: list[Clause] = []
    last_state: Optional[TransformationState] = None
    skipped: set[int] = set()
    rounds = 0

    def renumber(cs: Iterable[Clause]) -> list[Clause]:
        return [Clause(i + 1, c.head, c.constraint, c.body) for i, c in enumerate(cs)]

    while max_rounds is None or rounds < max_rounds:
        prog = Program(renumber(definite + work_goals))
        definite = [c for c in prog if not c.is_goal]
        work_goals = [c for c in prog if c.is_goal]
        target = None
        for gi, g in enumerate(work_goals):
            if gi in skipped or len(g.body) < 2:
                continue
            target = (gi, g)
            break
        if target is None:
            break
        gi, goal = target
        dprog = Program(definite)
        transformed = False
        for i, j in _rank_goal_pairs(goal):
            pa, pb = goal.body[i].pred, goal.body[j].pred
            if pa == pb:
                copies, mapping = duplicate_cone(dprog, pb, [])
                definite2 = definite + copies
                goal2 = Clause(
                    goal.cid,
                    None,
                    goal.constraint,
                    tuple(
                        Atom(mapping[a.pred], a.args) if k == j else a
                        for k, a in enumerate(goal.body)
                    ),
                )
                dprog2 = Program(renumber(definite2))
                q_prog, r_prog = predicate_partition(dprog2, pa, mapping[pb])
            else:
                try:
                    q_prog, r_prog = predicate_partition(dprog, pa, pb)
                except OverlapError as ov:
                    overlaps.append(PartitionOverlap(ov.pred, goal.cid))
                    continue
                definite2 = definite
                goal2 = goal
            qr_preds = q_prog.preds() | r_prog.preds()
            rest = [
                c
                for c in Program(renumber(definite2))
                if c.head is not None and c.head.pred not in qr_preds
            ]
            reserved = {a.pred for c in definite2 + work_goals for a in c.body} | {
                c.head.pred for c in definite2 if c.head is not None
            } | {d.head.pred for d in all_defs}
            res = predicate_pairing(goal2, q_prog, r_prog, cfg, reserved_preds=reserved)
            base = len(all_steps)
            all_steps.extend(res.state.trace)
            for pc in res.pair_log:
                all_pairs.append(
                    PairChoice(
                        pc.clause_id, pc.clause, pc.pos_a, pc.pos_b,
                        pc.atom_a, pc.atom_b, pc.eq, pc.trace_index + base,
                    )
                )
            all_defs.extend(res.defs)
            last_state = res.state
            definite = rest + [c for c in res.transf if not c.is_goal]
            work_goals = (
                work_goals[:gi]
                + [c for c in res.transf if c.is_goal]
                + work_goals[gi + 1 :]
            )
            skipped = set()
            transformed = True
            rounds += 1
            break
        if not transformed:
            skipped.add(gi)

    final = Program(renumber(definite + work_goals))
    state = last_state if last_state is not None else TransformationState(final)
    return PairingResult(
        transf=final,
        defs=Program(renumber(all_defs)),
        state=state,
        report=classify_sequence(all_steps),
        pair_log=all_pairs,
        overlaps=overlaps,
        steps=all_steps,
    )
