"""SMT-LIB emission of clause sets and parsing/printing of model files.

Emission targets the HORN logic: one declare-fun per predicate and one
universally quantified implication per clause, with goals implying false.
Array reads and writes map to select/store equalities, which carries the
array congruence and read-over-write axioms via the standard theory.
Output is byte-deterministic for a given program.

Model files are sequences of define-fun forms over and/or/exists/not and
linear atoms, as produced by common Horn solvers; they are normalized
into quantified disjunctions.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ModelError, ParseError, SortMismatch
from .lia import QuantDisj, negate_linatom, qd_conjoin, qd_false, qd_true
from .models import SymbolicInterpretation
from .syntax import (
    ArrEqAtom,
    Atom,
    Clause,
    ConstraintConj,
    LinAtom,
    LinExpr,
    Program,
    ReadAtom,
    Rel,
    Sort,
    Var,
    WriteAtom,
    fresh_name,
)

_SORT_SMT = {Sort.INT: "Int", Sort.ARRAY: "(Array Int Int)"}


def _smt_int(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def _smt_term(c: int, v: Var) -> str:
    if c == 1:
        return v.name
    return f"(* {_smt_int(c)} {v.name})"


def _smt_expr(e: LinExpr) -> str:
    parts = [_smt_term(c, v) for v, c in e.coeffs]
    if e.const != 0 or not parts:
        parts.append(_smt_int(e.const))
    if len(parts) == 1:
        return parts[0]
    return f"(+ {' '.join(parts)})"


_REL_SMT = {Rel.EQ: "=", Rel.LE: "<=", Rel.LT: "<", Rel.GE: ">=", Rel.GT: ">"}


def _smt_constraint(a) -> str:
    if isinstance(a, LinAtom):
        if a.rel is Rel.NE:
            return f"(not (= {_smt_expr(a.lhs)} {_smt_expr(a.rhs)}))"
        return f"({_REL_SMT[a.rel]} {_smt_expr(a.lhs)} {_smt_expr(a.rhs)})"
    if isinstance(a, ReadAtom):
        return f"(= (select {a.arr.name} {a.idx.name}) {a.val.name})"
    if isinstance(a, WriteAtom):
        return f"(= (store {a.arr.name} {a.idx.name} {a.val.name}) {a.out.name})"
    if isinstance(a, ArrEqAtom):
        return f"(= {a.lhs.name} {a.rhs.name})"
    raise TypeError(f"unknown constraint atom {a!r}")


def _smt_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"({a.pred} {' '.join(v.name for v in a.args)})"


def _smt_and(parts: Sequence[str]) -> str:
    if not parts:
        return "true"
    if len(parts) == 1:
        return parts[0]
    return f"(and {' '.join(parts)})"


def emit_smtlib(p: Program) -> str:
    """Render the program as HORN-logic SMT-LIB text."""
    lines = ["(set-logic HORN)"]
    seen: list[str] = []
    for c in p.clauses:
        for a in ([c.head] if c.head is not None else []) + list(c.body):
            if a.pred not in seen:
                seen.append(a.pred)
    for pred in seen:
        sig = p.signatures[pred]
        args = " ".join(_SORT_SMT[s] for s in sig)
        lines.append(f"(declare-fun {pred} ({args}) Bool)")
    for c in p.clauses:
        body = [_smt_constraint(a) for a in c.constraint] + [_smt_atom(a) for a in c.body]
        head = "false" if c.head is None else _smt_atom(c.head)
        impl = f"(=> {_smt_and(body)} {head})"
        vs = c.vars()
        if vs:
            binder = "".join(f"({v.name} {_SORT_SMT[v.sort]})" for v in vs)
            lines.append(f"(assert (forall ({binder}) {impl}))")
        else:
            lines.append(f"(assert {impl})")
    return "\n".join(lines) + "\n"


def emit_lia_query(c: ConstraintConj) -> str:
    """Render a conjunction's linear part as a QF_LIA satisfiability query."""
    lines = ["(set-logic QF_LIA)"]
    seen: list[Var] = []
    atoms = [a for a in c if isinstance(a, LinAtom)]
    for a in atoms:
        for v in a.vars():
            if v not in seen:
                seen.append(v)
    for v in seen:
        lines.append(f"(declare-const {v.name} Int)")
    for a in atoms:
        lines.append(f"(assert {_smt_constraint(a)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Model files


def _qd_smt(q: QuantDisj) -> str:
    def conj_smt(c: ConstraintConj) -> str:
        return _smt_and([_smt_constraint(a) for a in c])

    if len(q.disjuncts) == 1:
        body = conj_smt(q.disjuncts[0])
    else:
        body = f"(or {' '.join(conj_smt(d) for d in q.disjuncts)})"
    if q.exists:
        binder = "".join(f"({v.name} {_SORT_SMT[v.sort]})" for v in q.exists)
        body = f"(exists ({binder}) {body})"
    return body


def print_model(sigma: SymbolicInterpretation) -> str:
    """Write an interpretation in the define-fun model format."""
    lines = []
    for pred in sigma.preds():
        params, formula = sigma.entry(pred)
        binder = "".join(f"({v.name} {_SORT_SMT[v.sort]})" for v in params)
        lines.append(f"(define-fun {pred} ({binder}) Bool {_qd_smt(formula)})")
    return "\n".join(lines) + ("\n" if lines else "")


# --- s-expression reader ---

_SX_TOKEN = re.compile(r"\s+|;[^\n]*|[()]|[^\s();]+")


class _SExprReader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, raw: str):
        nl = raw.count("\n")
        if nl:
            self.line += nl
            self.col = len(raw) - raw.rfind("\n")
        else:
            self.col += len(raw)
        self.pos += len(raw)

    def tokens(self):
        while self.pos < len(self.text):
            m = _SX_TOKEN.match(self.text, self.pos)
            if m is None:
                raise ParseError("bad character in model file", self.line, self.col)
            raw = m.group()
            pos = (self.line, self.col)
            self._advance(raw)
            if raw.strip() and not raw.startswith(";"):
                yield raw, pos
        yield None, (self.line, self.col)

    def read_all(self):
        toks = self.tokens()
        self.cur = next(toks)
        out = []

        def rd():
            tok, pos = self.cur
            if tok is None:
                raise ParseError("unexpected end of model file", *pos)
            if tok == "(":
                items = []
                self.cur = next(toks)
                while self.cur[0] != ")":
                    if self.cur[0] is None:
                        raise ParseError("unbalanced parenthesis", *pos)
                    items.append(rd())
                self.cur = next(toks)
                return (items, pos)
            self.cur = next(toks)
            return (tok, pos)

        while self.cur[0] is not None:
            out.append(rd())
        return out


def _parse_sort(node) -> Sort:
    val, pos = node
    if val == "Int":
        return Sort.INT
    if isinstance(val, list) and len(val) == 3 and val[0][0] == "Array":
        return Sort.ARRAY
    raise ParseError(f"unsupported sort {val!r}", *pos)


def _parse_expr(node, env: Mapping[str, Var]) -> LinExpr:
    val, pos = node
    if isinstance(val, str):
        if re.fullmatch(r"-?\d+", val):
            return LinExpr.number(int(val))
        if val in env:
            v = env[val]
            if v.sort is not Sort.INT:
                raise SortMismatch(f"array variable {val} in arithmetic")
            return LinExpr.of(v)
        raise ParseError(f"unbound symbol {val!r}", *pos)
    op = val[0][0]
    args = val[1:]
    if op == "+":
        out = LinExpr.number(0)
        for a in args:
            out = out.add(_parse_expr(a, env))
        return out
    if op == "-":
        if len(args) == 1:
            return _parse_expr(args[0], env).scale(-1)
        out = _parse_expr(args[0], env)
        for a in args[1:]:
            out = out.sub(_parse_expr(a, env))
        return out
    if op == "*":
        exprs = [_parse_expr(a, env) for a in args]
        consts = [e for e in exprs if e.is_const()]
        others = [e for e in exprs if not e.is_const()]
        if len(others) > 1:
            raise ParseError("nonlinear product in model formula", *pos)
        k = 1
        for e in consts:
            k *= e.const
        return others[0].scale(k) if others else LinExpr.number(k)
    raise ParseError(f"unsupported term operator {op!r}", *pos)


_REL_FROM_SMT = {"=": Rel.EQ, "<=": Rel.LE, "<": Rel.LT, ">=": Rel.GE, ">": Rel.GT}


def _parse_formula(node, env: dict[str, Var], taken: set[str]) -> QuantDisj:
    val, pos = node
    if val == "true":
        return qd_true()
    if val == "false":
        return qd_false()
    if not isinstance(val, list) or not val:
        raise ParseError(f"unsupported formula {val!r}", *pos)
    op = val[0][0]
    args = val[1:]
    if op in _REL_FROM_SMT:
        lhs = _parse_expr(args[0], env)
        rhs = _parse_expr(args[1], env)
        atoms = [LinAtom(lhs, _REL_FROM_SMT[op], rhs)]
        for extra in args[2:]:  # chained relations
            nxt = _parse_expr(extra, env)
            atoms.append(LinAtom(rhs, _REL_FROM_SMT[op], nxt))
            rhs = nxt
        parts = [QuantDisj((), (ConstraintConj((a,)),)) for a in atoms]
        out = qd_conjoin(parts)
        if out is None:
            raise ParseError("formula too large", *pos)
        return out
    if op == "and":
        parts = [_parse_formula(a, env, taken) for a in args]
        out = qd_conjoin(parts) if parts else qd_true()
        if out is None:
            raise ParseError("conjunction exceeds the disjunct cap", *pos)
        return out
    if op == "or":
        if not args:
            return qd_false()
        parts = [_parse_formula(a, env, taken) for a in args]
        exists: list[Var] = []
        disjuncts: list[ConstraintConj] = []
        for q in parts:
            q = _rename_apart_qd(q, taken)
            exists.extend(q.exists)
            disjuncts.extend(q.disjuncts)
        return QuantDisj(tuple(exists), tuple(disjuncts))
    if op == "not":
        inner, ipos = args[0]
        if not isinstance(inner, list) or inner[0][0] not in _REL_FROM_SMT:
            raise ParseError("negation is only supported on atoms", *ipos)
        lhs = _parse_expr(inner[1], env)
        rhs = _parse_expr(inner[2], env)
        neg = negate_linatom(LinAtom(lhs, _REL_FROM_SMT[inner[0][0]], rhs))
        return QuantDisj((), tuple(ConstraintConj((a,)) for a in neg))
    if op == "exists":
        binders, bpos = args[0]
        inner_env = dict(env)
        bound: list[Var] = []
        for b in binders:
            (bval, bp) = b
            name = bval[0][0]
            sort = _parse_sort(bval[1])
            nn = fresh_name(name, taken)
            taken.add(nn)
            v = Var(nn, sort)
            inner_env[name] = v
            bound.append(v)
        sub = _parse_formula(args[1], inner_env, taken)
        return QuantDisj(tuple(bound) + sub.exists, sub.disjuncts, sub.exact)
    if op in ("let", "ite", "forall", "select", "store"):
        raise ParseError(f"unsupported construct {op!r} in model formula", *pos)
    raise ParseError(f"unsupported formula operator {op!r}", *pos)


def _rename_apart_qd(q: QuantDisj, taken: set[str]) -> QuantDisj:
    from .lia import qd_rename_exists_fresh

    return qd_rename_exists_fresh(q, taken)


def parse_model(text: str) -> SymbolicInterpretation:
    """Parse a sequence of define-fun forms into an interpretation."""
    forms = _SExprReader(text).read_all()
    # tolerate a (model ...) wrapper
    flat = []
    for val, pos in forms:
        if isinstance(val, list) and val and val[0][0] == "model":
            flat.extend(val[1:])
        else:
            flat.append((val, pos))
    entries: dict[str, tuple[tuple[Var, ...], QuantDisj]] = {}
    for val, pos in flat:
        if not isinstance(val, list) or not val:
            raise ParseError("expected a define-fun form", *pos)
        head = val[0][0]
        if head == "declare-fun":
            continue
        if head != "define-fun":
            raise ParseError(f"unsupported construct {head!r}", *pos)
        name = val[1][0]
        if not isinstance(name, str):
            raise ParseError("bad predicate name", *pos)
        ret, rpos = val[3]
        if ret != "Bool":
            raise ParseError(f"predicate {name} must return Bool", *rpos)
        params: list[Var] = []
        env: dict[str, Var] = {}
        taken: set[str] = set()
        binders, _ = val[2]
        for b in binders:
            bval, bp = b
            pname = bval[0][0]
            sort = _parse_sort(bval[1])
            v = Var(pname, sort)
            if pname in env:
                raise ParseError(f"duplicate parameter {pname}", *bp)
            env[pname] = v
            taken.add(pname)
            params.append(v)
        formula = _parse_formula(val[4], env, taken)
        entries[name] = (tuple(params), formula)
    return SymbolicInterpretation(entries)
