from pathlib import Path

import pytest

from chcpair import (
    Program,
    Var,
    check_model,
    emit_smtlib,
    parse_model,
    parse_program,
    print_model,
)
from chcpair.errors import ParseError
from chcpair.lia import Verdict, equiv_quant_disj, qd_of, qd_true
from chcpair.models import SymbolicInterpretation
from chcpair import corpus

from helpers import conj

GOLDEN = Path(__file__).parent / "golden"


def test_emit_clause_two_of_the_loop():
    p = parse_program("su(X,R,Sum) :- X =< 0, Sum = R.")
    out = emit_smtlib(p)
    assert (
        "(assert (forall ((X Int)(R Int)(Sum Int)) "
        "(=> (and (<= X 0) (= Sum R)) (su X R Sum))))" in out
    )


def test_emit_empty_program_is_header_only():
    assert emit_smtlib(Program([])) == "(set-logic HORN)\n"


def test_emit_goal_implies_false(sum_upto):
    out = emit_smtlib(sum_upto)
    assert ") false))" in out.splitlines()[2]


def test_emit_array_select_store():
    p = corpus.load("array_loop")
    out = emit_smtlib(p)
    assert "(declare-fun loop (Int (Array Int Int) Int (Array Int Int)) Bool)" in out
    assert "(= (select A1 J) U)" in out
    assert "(= (store A1 I V) A2)" in out
    assert "(= A_1 A)" in out  # normalized repeated head array variable


def test_emit_deterministic_and_golden():
    for name in corpus.NAMES:
        p = corpus.load(name)
        one = emit_smtlib(p)
        two = emit_smtlib(p)
        assert one == two
        golden = (GOLDEN / f"{name}.smt2").read_bytes()
        assert one.encode() == golden, f"golden drift for {name}"


# --- model files ---------------------------------------------------------------

EX1_MODEL = (
    "(define-fun su ((M Int)(R Int)(S Int)) Bool"
    " (or (and (>= S M) (>= S R)) (< R 0)))\n"
)


def test_parse_model_example1(sum_upto):
    sigma = parse_model(EX1_MODEL)
    params, formula = sigma.entry("su")
    assert [v.name for v in params] == ["M", "R", "S"]
    assert len(formula.disjuncts) == 2
    assert check_model(sum_upto, sigma).overall is Verdict.PROVED


def test_parse_model_true():
    sigma = parse_model("(define-fun p ((X Int)) Bool true)")
    _, formula = sigma.entry("p")
    assert formula == qd_true()


def test_parse_model_nested_with_exists(sum_upto):
    text = (
        "(define-fun su ((M Int)(R Int)(S Int)) Bool "
        "(exists ((D Int)) (and (>= D 0) "
        "(or (and (= S (+ M D)) (>= S R)) (< R 0)))))"
    )
    sigma = parse_model(text)
    _, formula = sigma.entry("su")
    assert formula.exists and len(formula.disjuncts) == 2
    # flattened existential disjunction still checks out against the program
    assert check_model(sum_upto, sigma).overall is Verdict.PROVED


def test_parse_model_wrapped_in_model_form():
    sigma = parse_model("(model (define-fun p ((X Int)) Bool (= X 1)))")
    assert sigma.defines("p")


def test_parse_model_round_trip():
    entries = {
        "su": (
            (Var("M"), Var("R"), Var("S")),
            qd_of(conj("S >= M, S >= R")),
        ),
        "p": ((Var("X"),), qd_true()),
    }
    sigma = SymbolicInterpretation(entries)
    again = parse_model(print_model(sigma))
    for pred in sigma.preds():
        p1, f1 = sigma.entry(pred)
        p2, f2 = again.entry(pred)
        assert p1 == p2
        assert equiv_quant_disj(f1, f2) is Verdict.PROVED


def test_parse_model_round_trip_with_exists():
    sigma = SymbolicInterpretation(
        {"q": ((Var("X"),), qd_of(conj("X = Y + 1, Y >= 0"), exists := (Var("Y"),)))}
    )
    again = parse_model(print_model(sigma))
    _, f = again.entry("q")
    assert f.exists


def test_parse_model_unsupported_construct():
    with pytest.raises(ParseError) as e:
        parse_model("(define-fun p ((X Int)) Bool (let ((y 1)) (= X y)))")
    assert "let" in str(e.value)
    assert e.value.line is not None


def test_parse_model_negated_atom():
    sigma = parse_model("(define-fun p ((X Int)) Bool (not (= X 0)))")
    _, f = sigma.entry("p")
    assert len(f.disjuncts) == 2


def test_parse_model_multiplication():
    sigma = parse_model("(define-fun p ((X Int)) Bool (>= (* 2 X) 4))")
    _, f = sigma.entry("p")
    assert equiv_quant_disj(f, qd_of(conj("2*X >= 4"))) is Verdict.PROVED
