from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, Field, field_validator, model_validator, computed_field
from mngn import config
from mngn.schemas.problems import ProblemId, ProblemParams, RegularizerKind
from mngn.schemas.solver import Method, FailureReason


class OutputFormat(str, Enum):
    table = "table"
    csv = "csv"
    json = "json"


class TrialSpec(BaseModel):
    problem: ProblemId
    params: ProblemParams = Field(default_factory=ProblemParams)
    method: Method = Method.mngn2_abd
    fixed_eta: Optional[float] = None
    regularizer: Optional[RegularizerKind] = None
    model_profile: Optional[List[float]] = None
    stop_tol: float = config.STOP_TOL
    max_iter: int = config.MAX_ITER
    n_trials: int = config.TRIALS
    seed: int = config.SEED
    x0_low: float = config.X0_LOW
    x0_high: float = config.X0_HIGH
    # Fixed start shared by every trial instead of a random draw.
    x0: Optional[List[float]] = None
    # Extra key mixed into the random stream; None shares starts across methods.
    stream_key: Optional[int] = None

    @field_validator("n_trials")
    @classmethod
    def trials_positive(cls, v):
        if v < 1:
            raise ValueError("n_trials must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def seed_nonnegative(cls, v):
        if v < 0:
            raise ValueError("seed must be nonnegative")
        return v

    @model_validator(mode="after")
    def check_interval(self):
        if not self.x0_low < self.x0_high:
            raise ValueError("x0_low must be smaller than x0_high")
        return self

    @computed_field
    @property
    def label(self) -> str:
        label = self.method.value
        if self.fixed_eta is not None:
            label += f" (eta={self.fixed_eta:g})"
        return label


class TrialRecord(BaseModel):
    seed_index: int
    x0: List[float]
    converged: bool
    iterations: int
    norm: Optional[float] = None
    failure_reason: Optional[FailureReason] = None


class BenchRow(BaseModel):
    method: str
    iterations: Optional[float] = None
    norm: Optional[float] = None
    success: int


class BenchSummary(BaseModel):
    spec: TrialSpec
    avg_iterations: Optional[float] = None
    avg_norm: Optional[float] = None
    n_success: int
    trials: List[TrialRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_success_count(self):
        if self.n_success > self.spec.n_trials:
            raise ValueError("n_success cannot exceed n_trials")
        return self

    def row(self) -> BenchRow:
        return BenchRow(
            method=self.spec.label,
            iterations=self.avg_iterations,
            norm=self.avg_norm,
            success=self.n_success,
        )
