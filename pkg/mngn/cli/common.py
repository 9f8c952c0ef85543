"""Argument groups and conversions shared by the subcommands."""

import argparse
from typing import List, Optional
import numpy as np
from mngn import config
from mngn.exceptions import UsageError
from mngn.schemas.bench import OutputFormat
from mngn.schemas.cli import CliConfig
from mngn.schemas.problems import ProblemId, ProblemParams, RegularizerKind, RegularizerSpec, TestProblem
from mngn.schemas.solver import Method
from mngn.services.problems import build_problem, build_regularizer
from mngn.utils import parse_vector

PROBLEM_CHOICES = [p.value for p in ProblemId]
METHOD_CHOICES = [m.value for m in Method]
REGULARIZER_CHOICES = [k.value for k in RegularizerKind if k != RegularizerKind.custom]


def parse_methods(text: str) -> List[Method]:
    methods = []
    for item in text.split(","):
        item = item.strip()
        if item not in METHOD_CHOICES:
            raise UsageError(f"unknown method '{item}' (valid: {', '.join(METHOD_CHOICES)})")
        methods.append(Method(item))
    return methods


def add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("problem")
    group.add_argument("--problem", required=True, choices=PROBLEM_CHOICES)
    group.add_argument("--m", type=int, help="number of equations (sized problems)")
    group.add_argument("--n", type=int, help="number of unknowns (sized problems)")
    group.add_argument("--a", help="semiaxes: ones, two-e, <scalar>e or a list (default ones)")
    group.add_argument("--c", help="center: two-e, first2, <scalar>e or a list (default two-e)")
    group.add_argument("--delta", type=float, default=0.75, help="circle2d scale")
    group.add_argument("--gamma", type=float, default=2.0, help="circle2d center coordinate")


def add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("solver")
    group.add_argument("--eta", type=float, help="fixed eta, required by mngn2-ab")
    group.add_argument("--L", dest="regularizer", choices=REGULARIZER_CHOICES,
                       help="regularization operator for the minimal-L-norm path")
    group.add_argument("--xbar", help="model profile: zero, <scalar>e or a list")
    group.add_argument("--tol", type=float, default=config.STOP_TOL)
    group.add_argument("--max-iter", type=int, default=config.MAX_ITER)
    group.add_argument("--seed", type=int, default=config.SEED)


def add_output_arguments(parser: argparse.ArgumentParser, formats: Optional[List[str]] = None) -> None:
    formats = formats or [f.value for f in OutputFormat]
    parser.add_argument("--output", choices=formats, default=OutputFormat.table.value)
    parser.add_argument("--out", help="write the result to this path instead of stdout")


def problem_params(cfg: CliConfig) -> ProblemParams:
    n = cfg.n
    return ProblemParams(
        m=cfg.m,
        n=n,
        a=None if cfg.a is None or n is None else parse_vector(cfg.a, n),
        c=None if cfg.c is None or n is None else parse_vector(cfg.c, n),
        delta=cfg.delta,
        gamma=cfg.gamma,
    )


def load_problem(cfg: CliConfig) -> TestProblem:
    return build_problem(cfg.problem, problem_params(cfg))


def model_profile(cfg: CliConfig, n: int) -> Optional[List[float]]:
    return parse_vector(cfg.xbar, n)


def regularizer(cfg: CliConfig, n: int) -> Optional[np.ndarray]:
    if cfg.regularizer is None:
        return None
    return build_regularizer(RegularizerSpec(kind=cfg.regularizer, size=n))
