from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, Field, model_validator
from mngn import config
from mngn.schemas.bench import OutputFormat
from mngn.schemas.problems import ProblemId, RegularizerKind
from mngn.schemas.solver import Method


class Subcommand(str, Enum):
    solve = "solve"
    bench = "bench"
    check = "check"


class CliConfig(BaseModel):
    subcommand: Subcommand
    problem: ProblemId
    m: Optional[int] = None
    n: Optional[int] = None
    a: Optional[str] = None
    c: Optional[str] = None
    delta: float = 0.75
    gamma: float = 2.0
    methods: List[Method] = Field(default_factory=lambda: [Method.mngn2_abd])
    eta: Optional[float] = None
    regularizer: Optional[RegularizerKind] = None
    xbar: Optional[str] = None
    x0: Optional[str] = None
    trials: int = config.TRIALS
    seed: int = config.SEED
    tol: float = config.STOP_TOL
    max_iter: int = config.MAX_ITER
    jobs: int = config.JOBS
    output: OutputFormat = OutputFormat.table
    trace: bool = False
    shared_starts: bool = True
    points: int = 20
    title: Optional[str] = None
    out: Optional[str] = None

    @model_validator(mode="after")
    def check_eta(self):
        needs_eta = Method.mngn2_ab in self.methods
        if needs_eta and self.eta is None:
            raise ValueError("--eta is required by mngn2-ab")
        if self.eta is not None and not needs_eta:
            raise ValueError("--eta only applies to mngn2-ab")
        return self

    @model_validator(mode="after")
    def check_counts(self):
        if self.trials < 1 or self.points < 1 or self.jobs < 1:
            raise ValueError("--trials, --points and --jobs must be positive")
        if self.seed < 0:
            raise ValueError("--seed must be nonnegative")
        if self.subcommand == Subcommand.solve and len(self.methods) != 1:
            raise ValueError("solve takes exactly one method")
        return self
