import argparse
from mngn import config
from mngn.cli.common import (
    add_output_arguments, add_problem_arguments, add_solver_arguments,
    load_problem, model_profile, parse_methods,
)
from mngn.schemas.bench import TrialSpec
from mngn.schemas.cli import CliConfig
from mngn.schemas.solver import Method
from mngn.services.bench import export, run_trials
from mngn.utils import parse_vector


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("bench", help="repeat solves from random starts and tabulate")
    add_problem_arguments(parser)
    parser.add_argument("--methods", type=parse_methods, default=[Method.mngn2_abd],
                        help="comma separated solver variants")
    parser.add_argument("--trials", type=int, default=config.TRIALS)
    parser.add_argument("--jobs", type=int, default=config.JOBS, help="worker threads")
    parser.add_argument("--x0", help="fixed starting point shared by every trial")
    parser.add_argument("--independent-starts", dest="shared_starts", action="store_false",
                        help="draw separate starting points for each method")
    parser.add_argument("--title", help="heading printed above the table")
    add_solver_arguments(parser)
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)
    return parser


def handle(cfg: CliConfig) -> tuple[int, bytes]:
    """
    Run every requested method on the same problem.

    - **Response:** one table/CSV row per method, or the JSON export with
      per-trial records; exit code 0 whatever the success counts.
    """
    test_problem = load_problem(cfg)
    n = test_problem.problem.n
    xbar = model_profile(cfg, n)
    x0 = parse_vector(cfg.x0, n)

    summaries = []
    for index, method in enumerate(cfg.methods):
        spec = TrialSpec(
            problem=cfg.problem,
            params=test_problem.params,
            method=method,
            fixed_eta=cfg.eta if method == Method.mngn2_ab else None,
            regularizer=cfg.regularizer,
            model_profile=xbar,
            stop_tol=cfg.tol,
            max_iter=cfg.max_iter,
            n_trials=cfg.trials,
            seed=cfg.seed,
            x0=x0,
            stream_key=None if cfg.shared_starts else index + 1,
        )
        summaries.append(run_trials(spec, jobs=cfg.jobs))
    return 0, export(summaries, cfg.output, title=cfg.title)
