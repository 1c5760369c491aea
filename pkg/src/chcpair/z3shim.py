"""Stdin-to-stdout Horn solving via the z3 Python bindings.

Lets the process client talk to z3 when only the pip package (and not a
z3 executable) is installed:  python -m chcpair.z3shim  reads SMT-LIB text
on stdin and prints sat/unsat/unknown plus a model.
"""

import sys


def main() -> int:
    try:
        import z3
    except ImportError:
        print("unknown")
        print("; z3 python bindings are not installed", file=sys.stderr)
        return 1
    text = sys.stdin.read()
    # the solver object issues its own check; strip command forms
    text = text.replace("(check-sat)", "").replace("(get-model)", "")
    solver = z3.SolverFor("HORN")
    try:
        solver.add(z3.parse_smt2_string(text))
        res = solver.check()
    except z3.Z3Exception as exc:
        print("unknown")
        print(f"; {exc}", file=sys.stderr)
        return 1
    if res == z3.sat:
        print("sat")
        print(solver.model().sexpr())
    elif res == z3.unsat:
        print("unsat")
    else:
        print("unknown")
    return 0


if __name__ == "__main__":
    sys.exit(main())
