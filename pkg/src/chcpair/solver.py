"""External Horn solver process client."""

from __future__ import annotations

import enum
import shlex
import subprocess
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .lia import Verdict
from .smtlib import emit_lia_query, emit_smtlib
from .syntax import ConstraintConj, Program

_GRACE_SECONDS = 2


@dataclass(frozen=True)
class SolverConfig:
    command: tuple[str, ...]
    timeout_seconds: float = 60
    enabled: bool = True

    def __post_init__(self):
        if self.timeout_seconds < 1:
            raise ValueError("timeout must be at least one second")

    @staticmethod
    def from_command_line(cmd: str, timeout_seconds: float = 60) -> "SolverConfig":
        return SolverConfig(tuple(shlex.split(cmd)), timeout_seconds)


class SolveStatus(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"
    TIMEOUT = "timeout"
    PROCESS_ERROR = "process-error"


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    model_text: Optional[str] = None
    detail: str = ""


def external_solve(p: Program, cfg: SolverConfig) -> SolveResult:
    """Feed the emitted clauses to the configured solver process.

    Writes the SMT-LIB text plus (check-sat)(get-model) on the solver's
    stdin, parses the first sat/unsat/unknown answer, and kills the
    process if it outlives the timeout.
    """
    if not cfg.enabled:
        raise ValueError("external solver is disabled in this configuration")
    payload = emit_smtlib(p) + "(check-sat)\n(get-model)\n"
    try:
        proc = subprocess.Popen(
            list(cfg.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
    except OSError as exc:
        return SolveResult(SolveStatus.PROCESS_ERROR, detail=str(exc))
    try:
        out, err = proc.communicate(payload, timeout=cfg.timeout_seconds)
    except subprocess.TimeoutExpired:
        proc.kill()
        try:
            proc.communicate(timeout=_GRACE_SECONDS)
        except subprocess.TimeoutExpired:
            pass
        return SolveResult(SolveStatus.TIMEOUT)
    lines = out.splitlines()
    answer = None
    rest_at = 0
    for i, line in enumerate(lines):
        word = line.strip()
        if word in ("sat", "unsat", "unknown"):
            answer = word
            rest_at = i + 1
            break
    if answer == "sat":
        return SolveResult(SolveStatus.SAT, model_text="\n".join(lines[rest_at:]))
    if answer == "unsat":
        return SolveResult(SolveStatus.UNSAT)
    if answer == "unknown":
        return SolveResult(SolveStatus.UNKNOWN)
    return SolveResult(
        SolveStatus.PROCESS_ERROR,
        detail=f"no answer in solver output (exit {proc.returncode}): {err[:500]}",
    )


def _run_text_query(payload: str, cfg: SolverConfig) -> Optional[str]:
    try:
        out = subprocess.run(
            list(cfg.command),
            input=payload,
            capture_output=True,
            text=True,
            timeout=cfg.timeout_seconds,
        ).stdout
    except (OSError, subprocess.TimeoutExpired):
        return None
    for line in out.splitlines():
        if line.strip() in ("sat", "unsat", "unknown"):
            return line.strip()
    return None


def make_unknown_resolver(cfg: SolverConfig):
    """Build a lia.install_unknown_resolver hook backed by this solver.

    Each query ships the conjunction's linear part as QF_LIA; sat/unsat
    answers become Proved/Disproved, anything else declines.
    """

    def resolve(c: ConstraintConj) -> Verdict:
        answer = _run_text_query(emit_lia_query(c), cfg)
        if answer == "sat":
            return Verdict.PROVED
        if answer == "unsat":
            return Verdict.DISPROVED
        return Verdict.UNKNOWN

    return resolve
