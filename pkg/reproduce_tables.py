import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple
from mngn import config
from mngn.schemas.bench import BenchSummary, OutputFormat, TrialSpec
from mngn.schemas.problems import ProblemId, ProblemParams, RegularizerKind
from mngn.schemas.solver import Method
from mngn.services.bench import export, run_trials

logger = logging.getLogger("reproduce_tables")

# (method, fixed eta)
MethodRow = Tuple[Method, Optional[float]]

ALPHA = (Method.mngn2_a, None)
ADAPTIVE = (Method.mngn2_abd, None)
ETA8 = (Method.mngn2_ab, 8.0)
ETA2 = (Method.mngn2_ab, 2.0)
CKB = [(Method.ckb1, None), (Method.ckb2, None)]
RCKB = [(Method.rckb1, None), (Method.rckb2, None)]


class Block(NamedTuple):
    title: str
    problem: ProblemId
    params: ProblemParams
    methods: List[MethodRow]
    regularizer: Optional[RegularizerKind] = None
    model_profile: Optional[List[float]] = None


def _first2(n: int) -> List[float]:
    return [2.0] + [0.0] * (n - 1)


TABLES: Dict[str, List[Block]] = {
    "robot": [
        Block("Robot, (X, Y) = (3, 3)", ProblemId.robot, ProblemParams(),
              [ALPHA, ADAPTIVE, *CKB, (Method.mngn, None)]),
    ],
    "paraboloid": [
        Block("Elliptic paraboloid", ProblemId.paraboloid, ProblemParams(),
              [ETA8, ETA2, ALPHA, ADAPTIVE, *CKB]),
    ],
    "ellipsoid-product": [
        Block("Ellipsoid product, m=8, n=10, c=(2,0,...,0)", ProblemId.ellipsoid_product,
              ProblemParams(m=8, n=10, c=_first2(10)),
              [ALPHA, ETA8, ADAPTIVE, (Method.mngn, None), *CKB, *RCKB]),
    ],
    "sphere-planes": [
        Block("Sphere planes, m=8, n=10, c=(2,0,...,0)", ProblemId.sphere_planes,
              ProblemParams(m=8, n=10, c=_first2(10)), [ALPHA, ETA8, ADAPTIVE, *RCKB]),
        Block("Sphere planes, m=8, n=10, c=2e, L=I", ProblemId.sphere_planes,
              ProblemParams(m=8, n=10), [ALPHA, ADAPTIVE, *RCKB]),
        Block("Sphere planes, m=8, n=10, c=2e, L=D2", ProblemId.sphere_planes,
              ProblemParams(m=8, n=10), [ALPHA, ADAPTIVE, *RCKB], regularizer=RegularizerKind.d2),
    ],
    "chain-size": [
        Block(f"Chain, (m, n) = ({8 * k}, {10 * k}), c=(2,0,...,0)", ProblemId.chain,
              ProblemParams(m=8 * k, n=10 * k, c=_first2(10 * k)), [ALPHA, ETA8, ADAPTIVE, *RCKB])
        for k in (1, 2, 3)
    ],
    "chain-profile": [
        Block(f"Chain, m=8, n=10, c=2e, xbar={label}", ProblemId.chain, ProblemParams(m=8, n=10),
              [ALPHA, ETA8, ADAPTIVE], model_profile=[value] * 10)
        for label, value in (("0", 0.0), ("2e", 2.0), ("1.7e", 1.7))
    ],
}


def run_block(block: Block, trials: int, seed: int, jobs: int) -> List[BenchSummary]:
    summaries = []
    for method, eta in block.methods:
        spec = TrialSpec(
            problem=block.problem,
            params=block.params,
            method=method,
            fixed_eta=eta,
            regularizer=block.regularizer,
            model_profile=block.model_profile,
            n_trials=trials,
            seed=seed,
        )
        summaries.append(run_trials(spec, jobs=jobs))
    return summaries


def _write(path: Path, payload: bytes) -> None:
    path.write_bytes(payload)
    logger.info("wrote %s", path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Rerun the benchmark tables of the minimal-norm study")
    parser.add_argument("tables", nargs="*", help=f"tables to run, from {', '.join(TABLES)} (default: all)")
    parser.add_argument("--trials", type=int, default=config.TRIALS)
    parser.add_argument("--seed", type=int, default=config.SEED)
    parser.add_argument("--jobs", type=int, default=config.JOBS)
    parser.add_argument("--output", choices=[f.value for f in OutputFormat], default=OutputFormat.table.value)
    parser.add_argument("--out-dir", type=Path, help="write the tables to files in this directory instead of printing")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=config.LOG_LEVEL,
        format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
        stream=sys.stderr,
    )

    names = args.tables or list(TABLES)
    unknown = [name for name in names if name not in TABLES]
    if unknown:
        parser.error(f"unknown tables: {', '.join(unknown)}")
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)

    for name in names:
        chunks = []
        for block in TABLES[name]:
            logger.info("running %s", block.title)
            summaries = run_block(block, args.trials, args.seed, args.jobs)
            chunks.append(export(summaries, args.output, title=block.title))
        if not args.out_dir:
            sys.stdout.write(b"\n".join(chunks).decode("utf-8") + "\n")
        elif args.output == OutputFormat.table.value:
            _write(args.out_dir / f"{name}.txt", b"\n".join(chunks))
        else:
            # csv and json exports do not concatenate, one file per block
            for i, chunk in enumerate(chunks, start=1):
                _write(args.out_dir / f"{name}-{i}.{args.output}", chunk)
    return 0


if __name__ == "__main__":
    sys.exit(main())
