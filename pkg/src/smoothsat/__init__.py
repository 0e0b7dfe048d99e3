"""Hybrid SAT / smoothed-numerical solver for programs with unknown constants."""

from .ir import (Assignment, Program, ProgramBuilder, ParseError, parse_program,
                 print_program, evaluate, eval_bool, eval_real, verify,
                 collect_bool_nodes)
from .boolabs import abstract_bool
from .smooth import SmoothParams, abstract_num
from .optimize import OptimizerConfig, minimize, solve_phase1
from .sat import SatSolver, SatStatus
from .core import CoreConfig, SolveResult, solve, gen_suggestions, is_conflict, gen_conflict
from .baseline import BaselineResult, baseline_smoothing

__all__ = [
    "Assignment", "Program", "ProgramBuilder", "ParseError", "parse_program",
    "print_program", "evaluate", "eval_bool", "eval_real", "verify", "collect_bool_nodes",
    "abstract_bool", "SmoothParams", "abstract_num", "OptimizerConfig", "minimize",
    "solve_phase1", "SatSolver", "SatStatus", "CoreConfig", "SolveResult", "solve",
    "gen_suggestions", "is_conflict", "gen_conflict", "BaselineResult", "baseline_smoothing",
]
