import argparse
import json
from mngn import config
from mngn.cli.common import add_output_arguments, add_problem_arguments, load_problem
from mngn.schemas.cli import CliConfig
from mngn.services.problems import self_check
from mngn.utils import render_template


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("check", help="verify Jacobians and known solutions of a problem")
    add_problem_arguments(parser)
    parser.add_argument("--points", type=int, default=20, help="random points for the Jacobian check")
    parser.add_argument("--seed", type=int, default=config.SEED)
    add_output_arguments(parser, formats=["table", "json"])
    parser.set_defaults(handler=handle)
    return parser


def handle(cfg: CliConfig) -> tuple[int, bytes]:
    test_problem = load_problem(cfg)
    results = self_check(test_problem, n_points=cfg.points, seed=cfg.seed)
    passed = all(r.passed for r in results)
    if cfg.output == "json":
        text = json.dumps({
            "problem": cfg.problem.value,
            "passed": passed,
            "checks": [r.model_dump(mode="json") for r in results],
        }, indent=2) + "\n"
    else:
        text = render_template("check_table.txt.j2", problem=cfg.problem.value, results=results, passed=passed)
    return (0 if passed else 2), text.encode("utf-8")
