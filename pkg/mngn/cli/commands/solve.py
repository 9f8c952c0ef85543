import argparse
import json
import numpy as np
from mngn import config
from mngn.cli.common import (
    add_output_arguments, add_problem_arguments, add_solver_arguments,
    load_problem, model_profile, parse_methods, regularizer,
)
from mngn.schemas.cli import CliConfig
from mngn.schemas.solver import Method, SolveOptions
from mngn.services.solver import solve
from mngn.utils import parse_vector, render_template, trial_rng


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("solve", help="run one solve and print its outcome")
    add_problem_arguments(parser)
    parser.add_argument("--method", dest="methods", type=parse_methods, default=[Method.mngn2_abd],
                        help="solver variant")
    parser.add_argument("--x0", help="starting point (default: random draw from --seed)")
    parser.add_argument("--trace", action="store_true", help="print every iteration")
    add_solver_arguments(parser)
    add_output_arguments(parser, formats=["table", "json"])
    parser.set_defaults(handler=handle)
    return parser


def handle(cfg: CliConfig) -> tuple[int, bytes]:
    """
    Solve the selected problem once.

    - **Response:** rendered outcome (and trace with --trace); exit code 0
      when the run converged, 2 otherwise.
    """
    test_problem = load_problem(cfg)
    problem = test_problem.problem
    n = problem.n
    x0 = parse_vector(cfg.x0, n)
    if x0 is None:
        x0 = trial_rng(cfg.seed, 0).uniform(config.X0_LOW, config.X0_HIGH, n)
    xbar = model_profile(cfg, n)
    L = regularizer(cfg, n)

    method = cfg.methods[0]
    options = SolveOptions(
        method=method,
        stop_tol=cfg.tol,
        max_iter=cfg.max_iter,
        model_profile=None if xbar is None else np.asarray(xbar),
        regularizer=L,
        fixed_eta=cfg.eta,
        keep_iterates=cfg.trace,
    )
    result = solve(problem, x0, options)
    x = result.x_final
    offset = x if xbar is None else x - np.asarray(xbar)
    norm = float(np.linalg.norm(offset if L is None else L @ offset))
    residual = float(np.linalg.norm(problem.r(x)))

    if cfg.output == "json":
        exclude = None if cfg.trace else {"trace"}
        payload = {
            "problem": cfg.problem.value,
            "method": method.value,
            "norm": norm,
            "residual": residual,
            "result": result.model_dump(mode="json", exclude=exclude),
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = render_template(
            "trace_table.txt.j2",
            show_trace=cfg.trace,
            result=result,
            problem=cfg.problem.value,
            method=method.value,
            norm_label="||L(x-xbar)||" if L is not None else "||x-xbar||",
            norm=norm,
            residual=residual,
            x=np.array2string(x, precision=6, separator=", ", max_line_width=120),
        )
    return (0 if result.converged else 2), text.encode("utf-8")
